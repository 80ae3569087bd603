#include <gtest/gtest.h>

#include <algorithm>

#include "cosmo/error.hpp"
#include "cosmo/tasks.hpp"
#include "cosmo/training.hpp"
#include "support/fixtures.hpp"

namespace cosmo {
namespace {

using testing::desk_dataset;
using testing::desk_model;

const VocabularySet& vocab() { return desk_dataset().vocabulary; }
std::size_t obj(const char* name) { return vocab().object_index(name); }
std::size_t act(const char* name) { return vocab().affordance_index(name); }

SceneDescription scene_of(std::initializer_list<const char*> names) {
  SceneDescription s;
  for (const char* n : names) s.objects.insert(obj(n));
  return s;
}

double probability_of(const TaskResult& r, std::size_t slot) {
  for (const auto& n : r.eligible) {
    if (n.slot == slot) return n.probability;
  }
  ADD_FAILURE() << "slot " << slot << " is not eligible";
  return -1.0;
}

std::unique_ptr<Model> zero_desk() {
  return testing::zero_model(ModelKind::cosmo, ModelDims{12, 2, 2, {4}});
}

TaskOptions opts(std::uint64_t seed = 1) {
  TaskOptions o;
  o.seed = seed;
  return o;
}

TEST(TaskIds, RoundTrip) {
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(task_number(task_from_number(n)), n);
  EXPECT_THROW(task_from_number(0), Error);
  EXPECT_THROW(task_from_number(9), Error);
}

TEST(TaskOptions, Validation) {
  TaskOptions o;
  o.theta = 1.0;
  EXPECT_THROW(o.validate(), Error);
  o.theta = 0.5;
  o.gibbs_steps = 0;
  EXPECT_THROW(o.validate(), Error);
}

TEST(Task1, PlantedRelationIsRecovered) {
  const auto r = estimate_relations(desk_model(), scene_of({"plate", "table"}), opts());
  const auto slot = vocab().layout().relation(1, obj("plate"), obj("table"));
  EXPECT_GT(probability_of(r, slot), 0.9);
  EXPECT_TRUE(r.reconstructed.relations.count(Triple{1, obj("plate"), obj("table")}));
}

TEST(Task1, EligibleAreTriplesAmongActiveObjects) {
  const auto r = estimate_relations(desk_model(), scene_of({"plate", "table", "man"}), opts());
  EXPECT_EQ(r.eligible.size(), 2u * 3u * 2u);
  for (const auto& n : r.eligible) {
    const auto s = vocab().layout().slot(n.slot);
    EXPECT_EQ(s.kind, BlockKind::relation);
    EXPECT_NE(s.subject, s.object);
  }
}

TEST(Task1, ZeroModelAndErrors) {
  const auto m = zero_desk();
  const auto r = estimate_relations(*m, scene_of({"plate", "table"}), opts());
  for (const auto& n : r.eligible) EXPECT_EQ(n.probability, 0.5);
  EXPECT_THROW(estimate_relations(*m, scene_of({"plate"}), opts()), Error);
}

TEST(Task1, ObjectsOnlyIgnoresAffordances) {
  auto s = scene_of({"man", "bicycle"});
  s.affordances.insert(Triple{act("ride-ability"), obj("man"), obj("bicycle")});
  TaskOptions o = opts();
  o.objects_only = true;
  const auto a = estimate_relations(desk_model(), s, o);
  const auto b = estimate_relations(desk_model(), scene_of({"man", "bicycle"}), o);
  ASSERT_EQ(a.eligible.size(), b.eligible.size());
  for (std::size_t i = 0; i < a.eligible.size(); ++i) {
    EXPECT_EQ(a.eligible[i].probability, b.eligible[i].probability);
  }
}

TEST(Task2, MissingPlateIsRecalled) {
  auto s = scene_of({"table", "fridge", "cabinet"});
  s.relations.insert(Triple{0, obj("fridge"), obj("cabinet")});
  const auto r = find_missing_objects(desk_model(), s, opts());
  EXPECT_GT(probability_of(r, obj("plate")), 0.9);
  for (auto slot : r.predicted) EXPECT_FALSE(s.objects.count(slot));
}

TEST(Task2, FullSceneHasNothingEligible) {
  SceneDescription s;
  for (std::size_t o = 0; o < 12; ++o) s.objects.insert(o);
  const auto r = find_missing_objects(desk_model(), s, opts());
  EXPECT_TRUE(r.eligible.empty());
  EXPECT_TRUE(r.predicted.empty());
}

TEST(Task3, InjectedObjectIsFlagged) {
  auto s = scene_of({"table", "plate", "fridge", "cabinet", "bicycle"});
  s.relations.insert(Triple{1, obj("plate"), obj("table")});
  s.relations.insert(Triple{0, obj("fridge"), obj("cabinet")});
  s.affordances.insert(Triple{act("hold-ability"), obj("table"), obj("plate")});
  // The mean over sweeps includes the ones spent leaving the corrupted start.
  TaskOptions o = opts();
  o.gibbs_steps = 20;
  const auto r = find_extra_objects(desk_model(), s, o);
  EXPECT_LT(probability_of(r, obj("bicycle")), 0.1);
  EXPECT_EQ(r.predicted, std::vector<std::size_t>{obj("bicycle")});
  EXPECT_FALSE(r.reconstructed.objects.count(obj("bicycle")));
}

TEST(Task3, CleanPlantedScenesRaiseNoFlags) {
  std::size_t flagged = 0, scenes = 0;
  for (const auto& s : testing::desk_split().test) {
    if (s.objects.size() < 3) continue;
    flagged += !find_extra_objects(desk_model(), s, opts(scenes)).predicted.empty();
    ++scenes;
  }
  EXPECT_LE(static_cast<double>(flagged), 0.05 * static_cast<double>(scenes));
}

TEST(Task3, ZeroModelFlagsNothing) {
  const auto m = zero_desk();
  const auto r = find_extra_objects(*m, scene_of({"table", "man"}), opts());
  for (const auto& n : r.eligible) EXPECT_EQ(n.probability, 0.5);
  EXPECT_TRUE(r.predicted.empty());
  EXPECT_THROW(find_extra_objects(*m, SceneDescription{}, opts()), Error);
}

TEST(Task4, PlantedAffordanceIsPredicted) {
  auto s = scene_of({"man", "bicycle"});
  const auto r = predict_affordances(desk_model(), s, opts());
  const auto slot = vocab().layout().affordance(act("ride-ability"), obj("man"), obj("bicycle"));
  EXPECT_NE(std::find(r.predicted.begin(), r.predicted.end(), slot), r.predicted.end());
}

TEST(Task4, SingleObjectAndZeroModel) {
  EXPECT_TRUE(predict_affordances(desk_model(), scene_of({"man"}), opts()).eligible.empty());
  const auto m = zero_desk();
  for (const auto& n : predict_affordances(*m, scene_of({"man", "road"}), opts()).eligible) {
    EXPECT_EQ(n.probability, 0.5);
  }
}

TEST(Task5, RideableObjectRanksFirst) {
  const auto r = find_afforded_object(desk_model(), act("ride-ability"), obj("man"),
                                      scene_of({"man", "road"}), opts());
  ASSERT_FALSE(r.eligible.empty());
  EXPECT_EQ(vocab().layout().slot(r.eligible.front().slot).object, obj("bicycle"));
  for (std::size_t i = 1; i < r.eligible.size(); ++i) {
    EXPECT_GE(r.eligible[i - 1].probability, r.eligible[i].probability);
  }
}

TEST(Task6, ActorRanksFirstAndAnchorIsExcluded) {
  const auto r = find_actor(desk_model(), act("ride-ability"), obj("bicycle"),
                            scene_of({"bicycle", "road"}), opts());
  ASSERT_EQ(r.eligible.size(), 11u);
  EXPECT_EQ(vocab().layout().slot(r.eligible.front().slot).subject, obj("man"));
  for (const auto& n : r.eligible) {
    const auto s = vocab().layout().slot(n.slot);
    EXPECT_NE(s.subject, obj("bicycle"));
    EXPECT_EQ(s.object, obj("bicycle"));
    EXPECT_EQ(s.type, act("ride-ability"));
  }
}

TEST(Task56, ZeroModelIsUniform) {
  const auto m = zero_desk();
  for (const auto& n : find_afforded_object(*m, 0, 0, scene_of({"table"}), opts()).eligible) {
    EXPECT_EQ(n.probability, 0.5);
  }
  for (const auto& n : find_actor(*m, 1, 3, SceneDescription{}, opts()).eligible) {
    EXPECT_EQ(n.probability, 0.5);
  }
  EXPECT_THROW(find_actor(*m, 2, 0, SceneDescription{}, opts()), Error);
  EXPECT_THROW(find_afforded_object(*m, 0, 12, SceneDescription{}, opts()), Error);
}

TEST(Task5, UnusedActionGivesFlatRanking) {
  auto spec = planted_desk_spec();
  const auto& v = spec.vocabulary;
  auto names = v.affordance_types();
  names.push_back("push-ability");
  spec.vocabulary = VocabularySet(v.objects(), v.relation_types(), names);
  const auto scenes = synthesize_dataset(spec, 600, 3);
  TrainConfig c;
  c.patience = 0;
  const auto params =
      train(split_dataset(scenes, SplitRatios{}, 1), spec.vocabulary, c).params;
  const auto m = make_model(params);
  const auto r = find_afforded_object(*m, 2, obj("man"), scene_of({"man", "bicycle"}), opts());
  EXPECT_LT(r.eligible.front().probability - r.eligible.back().probability, 0.1);
}

TEST(Task7, OutlierIsDropped) {
  RectifyOptions o;
  o.task.seed = 3;
  const std::set<std::size_t> d = {obj("table"), obj("plate"), obj("fridge"), obj("cabinet"),
                                   obj("bicycle")};
  const auto r = rectify_detections(desk_model(), d, o);
  EXPECT_TRUE(r.dropped.count(obj("bicycle")));
  EXPECT_FALSE(r.objects().count(obj("bicycle")));
}

TEST(Task7, ExactContextIsLeftAlone) {
  RectifyOptions o;
  o.task.seed = 3;
  const auto r = rectify_detections(desk_model(), {obj("man"), obj("bicycle"), obj("road"), obj("helmet")}, o);
  EXPECT_TRUE(r.added.empty());
  EXPECT_TRUE(r.dropped.empty());
  EXPECT_EQ(r.kept.size(), 4u);
}

TEST(Task7, ZeroModelChangesNothing) {
  const auto m = zero_desk();
  RectifyOptions o;
  o.theta_add = 0.9;
  o.theta_drop = 0.1;
  const auto r = rectify_detections(*m, {0, 5}, o);
  EXPECT_TRUE(r.added.empty());
  EXPECT_TRUE(r.dropped.empty());
  EXPECT_THROW(rectify_detections(*m, {}, o), Error);
  EXPECT_THROW(rectify_detections(*m, {12}, o), Error);
}

TEST(Detections, ParseAndMap) {
  const auto d = parse_detections_json(R"([{"label": "dining table", "score": 0.9},
                                           {"label": "cup", "score": 0.2}, {"label": "bike"}])");
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[2].score, 1.0);
  const std::string map = R"({"dining table": "table", "cup": "plate", "bike": "bicycle"})";
  EXPECT_EQ(map_detections(d, vocab(), map, 0.5), (std::set<std::size_t>{obj("table"), obj("bicycle")}));
  EXPECT_THROW(map_detections(d, vocab(), std::nullopt), Error);
  EXPECT_THROW(map_detections(d, vocab(), std::string(R"({"cup": "plate"})")), Error);
  EXPECT_THROW(parse_detections_json("{}"), Error);
  EXPECT_THROW(parse_detections_json(R"([{"score": 1}])"), Error);
}

TEST(Task8, ContextCodeGeneratesItsCore) {
  // The first-layer code is distributed, so a context is selected by the set
  // of units whose mean activation over its scenes exceeds one half.
  const auto& m = desk_model();
  const auto spec = planted_desk_spec();
  for (const auto& ctx : spec.contexts) {
    std::vector<double> mean(m.dims().hidden[0], 0.0);
    double n = 0.0;
    for (const auto& s : desk_dataset().scenes) {
      if (s.context != ctx.name) continue;
      const auto p = hidden_probabilities(m, encode_scene(s, vocab()).bits);
      for (std::size_t l = 0; l < mean.size(); ++l) mean[l] += p[0][l];
      n += 1.0;
    }
    std::vector<std::size_t> code;
    for (std::size_t l = 0; l < mean.size(); ++l) {
      if (mean[l] / n > 0.5) code.push_back(l);
    }
    std::set<std::size_t> core;
    for (const auto& o : ctx.objects) core.insert(o.object);
    GenerateOptions g;
    int hits = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
      g.seed = i;
      const auto s = generate_scene(m, code, g);
      hits += std::includes(s.objects.begin(), s.objects.end(), core.begin(), core.end());
      EXPECT_FALSE(s.has_dangling_endpoints());
    }
    EXPECT_GE(hits, 80) << ctx.name;
  }
}

TEST(Task8, ZeroModelObjectsAreFair) {
  const auto m = zero_desk();
  std::vector<double> on(12, 0.0);
  GenerateOptions g;
  g.gibbs_steps = 1;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    g.seed = i;
    for (auto o : generate_scene(*m, {0}, g).objects) on[o] += 1.0;
  }
  for (double c : on) EXPECT_NEAR(c / 1000.0, 0.5, 0.05);
}

TEST(Task8, DeterministicAndChecked) {
  GenerateOptions g;
  g.seed = 77;
  EXPECT_EQ(generate_scene(desk_model(), {1, 2}, g), generate_scene(desk_model(), {1, 2}, g));
  EXPECT_THROW(generate_scene(desk_model(), {16}, g), Error);
}

TEST(Tasks, DeterministicGivenSeed) {
  const auto s = scene_of({"man", "bicycle", "road"});
  const auto a = estimate_relations(desk_model(), s, opts(5));
  const auto b = estimate_relations(desk_model(), s, opts(5));
  ASSERT_EQ(a.eligible.size(), b.eligible.size());
  for (std::size_t i = 0; i < a.eligible.size(); ++i) {
    EXPECT_EQ(a.eligible[i].probability, b.eligible[i].probability);
  }
}

TEST(Tasks, SlotNamesAndJson) {
  const auto slot = vocab().layout().relation(1, obj("plate"), obj("table"));
  EXPECT_EQ(slot_name(slot, vocab()), "on-top(plate,table)");
  EXPECT_EQ(slot_name(obj("man"), vocab()), "man");
  const auto r = estimate_relations(desk_model(), scene_of({"plate", "table"}), opts());
  const auto text = task_result_to_json(TaskId::relations, r, vocab());
  EXPECT_NE(text.find("on-top(plate,table)"), std::string::npos);
}

}  // namespace
}  // namespace cosmo
