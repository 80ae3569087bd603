#include "cosmo/synthetic.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "cosmo/error.hpp"

namespace cosmo {

using nlohmann::json;

void ContextSpec::validate() const {
  if (contexts.empty()) fail(ErrorKind::usage, "context spec has no contexts");
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob_ok(noise)) fail(ErrorKind::usage, "noise rate must be in [0,1]");
  const auto layout = vocabulary.layout();
  for (const auto& ctx : contexts) {
    if (ctx.objects.empty()) {
      fail(ErrorKind::usage, "context '" + ctx.name + "' has no objects");
    }
    for (const auto& o : ctx.objects) {
      if (o.object >= layout.objects() || !prob_ok(o.probability)) {
        fail(ErrorKind::usage, "context '" + ctx.name + "' has an invalid object entry");
      }
    }
    auto check = [&](const std::vector<WeightedTriple>& ts, std::size_t types) {
      for (const auto& t : ts) {
        const auto& x = t.triple;
        if (x.type >= types || x.subject >= layout.objects() ||
            x.object >= layout.objects() || x.subject == x.object ||
            !prob_ok(t.probability)) {
          fail(ErrorKind::usage, "context '" + ctx.name + "' has an invalid triple entry");
        }
      }
    };
    check(ctx.relations, layout.relation_types());
    check(ctx.affordances, layout.affordance_types());
  }
}

std::vector<SceneDescription> synthesize_dataset(const ContextSpec& spec, std::size_t n,
                                                 std::uint64_t seed) {
  spec.validate();
  if (n == 0) fail(ErrorKind::usage, "requested scene count must be positive");
  const std::size_t object_count = spec.vocabulary.objects().size();
  std::vector<SceneDescription> scenes;
  scenes.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    Rng rng = make_rng(seed, {0x5c3e, s});
    const auto& ctx = spec.contexts[uniform_index(rng, spec.contexts.size())];
    SceneDescription scene;
    scene.context = ctx.name;
    for (const auto& o : ctx.objects) {
      if (bernoulli(rng, o.probability)) scene.objects.insert(o.object);
    }
    auto draw = [&](const std::vector<WeightedTriple>& ts, std::set<Triple>& out) {
      for (const auto& t : ts) {
        const bool u = bernoulli(rng, t.probability);
        if (u && scene.objects.contains(t.triple.subject) &&
            scene.objects.contains(t.triple.object)) {
          out.insert(t.triple);
        }
      }
    };
    draw(ctx.relations, scene.relations);
    draw(ctx.affordances, scene.affordances);
    if (spec.noise > 0.0) {
      for (std::size_t o = 0; o < object_count; ++o) {
        if (bernoulli(rng, spec.noise)) scene.objects.insert(o);
      }
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

ContextSpec planted_desk_spec(double noise) {
  VocabularySet vocab(
      {"table", "plate", "fridge", "cabinet", "man", "bicycle", "road", "helmet", "chair",
       "desk", "monitor", "keyboard"},
      {{"left", "right"}, {"on-top", "under"}},
      {"hold-ability", "ride-ability"});
  auto o = [&](const char* name) { return vocab.object_index(name); };
  const std::size_t left = 0, on_top = 1, hold = 0, ride = 1;

  ContextSpec spec;
  spec.noise = noise;
  spec.contexts = {
      {"kitchen",
       {{o("table"), 0.95}, {o("plate"), 0.95}, {o("fridge"), 0.95}, {o("cabinet"), 0.95}},
       {{{on_top, o("plate"), o("table")}, 1.0}, {{left, o("fridge"), o("cabinet")}, 0.9}},
       {{{hold, o("table"), o("plate")}, 0.9}}},
      {"street",
       {{o("man"), 0.95}, {o("bicycle"), 0.95}, {o("road"), 0.95}, {o("helmet"), 0.95}},
       {{{on_top, o("bicycle"), o("road")}, 0.9}, {{on_top, o("helmet"), o("man")}, 0.9}},
       {{{ride, o("man"), o("bicycle")}, 1.0}, {{hold, o("man"), o("helmet")}, 0.8}}},
      {"office",
       {{o("chair"), 0.95}, {o("desk"), 0.95}, {o("monitor"), 0.95}, {o("keyboard"), 0.95}},
       {{{on_top, o("monitor"), o("desk")}, 1.0}, {{left, o("keyboard"), o("monitor")}, 0.9}},
       {{{hold, o("desk"), o("keyboard")}, 0.9}}},
  };
  spec.vocabulary = std::move(vocab);
  return spec;
}

ContextSpec planted_suite_spec(const PlantedSuiteOptions& opt) {
  if (opt.contexts == 0 || opt.objects_per_context < 2) {
    fail(ErrorKind::usage, "planted suite needs contexts >= 1 and >= 2 objects each");
  }
  std::vector<std::string> objects;
  for (std::size_t c = 0; c < opt.contexts; ++c) {
    for (std::size_t i = 0; i < opt.objects_per_context; ++i) {
      objects.push_back("c" + std::to_string(c) + "-obj" + std::to_string(i));
    }
  }
  ContextSpec spec;
  spec.vocabulary = VocabularySet(std::move(objects), {{"left", "right"}, {"on-top", "under"}},
                                  {"hold-ability", "ride-ability"});
  spec.noise = opt.noise;

  Rng rng = make_rng(opt.seed, {0x501e});
  const std::size_t m = opt.objects_per_context;
  const std::size_t max_triples = 2 * m * (m - 1);
  auto pick_triples = [&](std::size_t base, std::size_t count) {
    std::set<Triple> chosen;
    count = std::min(count, max_triples);
    while (chosen.size() < count) {
      const std::size_t j = uniform_index(rng, m);
      std::size_t k = uniform_index(rng, m - 1);
      if (k >= j) ++k;
      chosen.insert({uniform_index(rng, 2), base + j, base + k});
    }
    std::vector<WeightedTriple> out;
    for (const auto& t : chosen) out.push_back({t, opt.triple_probability});
    return out;
  };
  for (std::size_t c = 0; c < opt.contexts; ++c) {
    PlantedContext ctx;
    ctx.name = "context" + std::to_string(c);
    const std::size_t base = c * m;
    for (std::size_t i = 0; i < m; ++i) ctx.objects.push_back({base + i, opt.object_probability});
    ctx.relations = pick_triples(base, opt.relations_per_context);
    ctx.affordances = pick_triples(base, opt.affordances_per_context);
    spec.contexts.push_back(std::move(ctx));
  }
  return spec;
}

ContextSpec parse_context_spec_json(const std::string& text) {
  try {
    const json root = json::parse(text);
    // Reuse the dataset parser for the vocabulary block.
    Dataset vocab_only =
        parse_dataset_json(json{{"vocabulary", root.at("vocabulary")}, {"scenes", json::array()}}
                               .dump());
    ContextSpec spec;
    spec.vocabulary = std::move(vocab_only.vocabulary);
    spec.noise = root.value("noise", 0.0);
    const auto& vocab = spec.vocabulary;
    for (const auto& c : root.at("contexts")) {
      PlantedContext ctx;
      ctx.name = c.at("name").get<std::string>();
      for (const auto& o : c.at("objects")) {
        ctx.objects.push_back({vocab.object_index(o.at(0).get<std::string>()),
                               o.at(1).get<double>()});
      }
      if (c.contains("relations")) {
        for (const auto& t : c.at("relations")) {
          const auto triple =
              canonicalize_relation(t.at(0).get<std::string>(),
                                    vocab.object_index(t.at(1).get<std::string>()),
                                    vocab.object_index(t.at(2).get<std::string>()), vocab);
          ctx.relations.push_back({triple, t.at(3).get<double>()});
        }
      }
      if (c.contains("affordances")) {
        for (const auto& t : c.at("affordances")) {
          ctx.affordances.push_back({{vocab.affordance_index(t.at(0).get<std::string>()),
                                      vocab.object_index(t.at(1).get<std::string>()),
                                      vocab.object_index(t.at(2).get<std::string>())},
                                     t.at(3).get<double>()});
        }
      }
      spec.contexts.push_back(std::move(ctx));
    }
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    fail(ErrorKind::data, std::string("malformed context spec: ") + e.what());
  }
}

std::string context_spec_to_json(const ContextSpec& spec) {
  const auto& vocab = spec.vocabulary;
  json root = json::parse(dataset_to_json(Dataset{vocab, {}}));
  root.erase("scenes");
  root["noise"] = spec.noise;
  json contexts = json::array();
  for (const auto& ctx : spec.contexts) {
    json objects = json::array();
    for (const auto& o : ctx.objects) objects.push_back({vocab.objects()[o.object], o.probability});
    json rels = json::array();
    for (const auto& t : ctx.relations) {
      rels.push_back({vocab.relation_types()[t.triple.type].name, vocab.objects()[t.triple.subject],
                      vocab.objects()[t.triple.object], t.probability});
    }
    json affs = json::array();
    for (const auto& t : ctx.affordances) {
      affs.push_back({vocab.affordance_types()[t.triple.type], vocab.objects()[t.triple.subject],
                      vocab.objects()[t.triple.object], t.probability});
    }
    contexts.push_back({{"name", ctx.name},
                        {"objects", std::move(objects)},
                        {"relations", std::move(rels)},
                        {"affordances", std::move(affs)}});
  }
  root["contexts"] = std::move(contexts);
  return root.dump(1) + "\n";
}

}  // namespace cosmo
