#include "cosmo/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "cosmo/error.hpp"
#include "cosmo/sampler.hpp"

namespace cosmo {

using nlohmann::json;

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorKind::usage, "learning_rate must be a finite non-negative number");
  }
  if (epochs == 0) fail(ErrorKind::usage, "epochs must be at least 1");
  if (gibbs_steps == 0) fail(ErrorKind::usage, "gibbs_steps must be at least 1");
  if (hidden.empty()) fail(ErrorKind::usage, "hidden must list at least one layer");
  for (auto h : hidden) {
    if (h == 0) fail(ErrorKind::usage, "hidden layer sizes must be positive");
  }
  if (batch_size == 0) fail(ErrorKind::usage, "batch_size must be at least 1");
  if (!(tolerance >= 0.0)) fail(ErrorKind::usage, "tolerance must be non-negative");
  if (!(init_std >= 0.0) || !std::isfinite(init_std)) {
    fail(ErrorKind::usage, "init_std must be a finite non-negative number");
  }
  if (shared_rate_scale && !(*shared_rate_scale >= 0.0 && std::isfinite(*shared_rate_scale))) {
    fail(ErrorKind::usage, "shared_rate_scale must be a finite non-negative number");
  }
}

namespace {

template <typename T>
T read_field(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::usage, "config field '" + key + "' has the wrong type");
  }
}

std::size_t read_count(const json& j, const std::string& key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    fail(ErrorKind::usage, "config field '" + key + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

TrainConfig parse_train_config_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::usage, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail(ErrorKind::usage, "config must be a JSON object");
  TrainConfig c;
  for (const auto& [key, value] : root.items()) {
    if (key == "model_kind") {
      c.model_kind = parse_model_kind(read_field<std::string>(value, key));
    } else if (key == "learning_rate") {
      c.learning_rate = read_field<double>(value, key);
    } else if (key == "epochs") {
      c.epochs = read_count(value, key);
    } else if (key == "gibbs_steps") {
      c.gibbs_steps = read_count(value, key);
    } else if (key == "schedule") {
      if (!value.is_object()) fail(ErrorKind::usage, "config field 'schedule' must be an object");
      ScheduleKind kind = ScheduleKind::constant;
      double t0 = 1.0, a = 0.0;
      for (const auto& [sk, sv] : value.items()) {
        if (sk == "kind") {
          kind = parse_schedule_kind(read_field<std::string>(sv, "schedule.kind"));
        } else if (sk == "t0") {
          t0 = read_field<double>(sv, "schedule.t0");
        } else if (sk == "a") {
          a = read_field<double>(sv, "schedule.a");
        } else {
          fail(ErrorKind::usage, "unknown config field 'schedule." + sk + "'");
        }
      }
      c.schedule = AnnealSchedule(kind, t0, a);
    } else if (key == "hidden") {
      if (!value.is_array()) fail(ErrorKind::usage, "config field 'hidden' must be an array");
      c.hidden.clear();
      for (const auto& h : value) c.hidden.push_back(read_count(h, key));
    } else if (key == "seed") {
      c.seed = read_field<std::uint64_t>(value, key);
    } else if (key == "patience") {
      c.patience = read_count(value, key);
    } else if (key == "tolerance") {
      c.tolerance = read_field<double>(value, key);
    } else if (key == "batch_size") {
      c.batch_size = read_count(value, key);
    } else if (key == "init_std") {
      c.init_std = read_field<double>(value, key);
    } else if (key == "pretrain_epochs") {
      c.pretrain_epochs = read_count(value, key);
    } else if (key == "shared_rate_scale") {
      if (value.is_null()) {
        c.shared_rate_scale.reset();
      } else {
        c.shared_rate_scale = read_field<double>(value, key);
      }
    } else {
      fail(ErrorKind::usage, "unknown config field '" + key + "'");
    }
  }
  c.validate();
  return c;
}

std::string train_config_to_json(const TrainConfig& c) {
  json j;
  j["model_kind"] = std::string(to_string(c.model_kind));
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["gibbs_steps"] = c.gibbs_steps;
  j["schedule"] = {{"kind", std::string(to_string(c.schedule.kind()))},
                   {"t0", c.schedule.initial()},
                   {"a", c.schedule.coefficient()}};
  j["hidden"] = c.hidden;
  j["seed"] = c.seed;
  j["patience"] = c.patience;
  j["tolerance"] = c.tolerance;
  j["batch_size"] = c.batch_size;
  j["init_std"] = c.init_std;
  j["pretrain_epochs"] = c.pretrain_epochs;
  j["shared_rate_scale"] = c.shared_rate_scale ? json(*c.shared_rate_scale) : json(nullptr);
  return j.dump(2);
}

HiddenValues hidden_probabilities(const Model& model, std::span<const std::uint8_t> visible) {
  constexpr std::size_t kMeanFieldPasses = 20;
  constexpr double kMeanFieldTolerance = 1e-7;
  const auto& sizes = model.dims().hidden;
  HiddenValues h(sizes.size());
  for (std::size_t m = 0; m < sizes.size(); ++m) h[m].assign(sizes[m], 0.0);
  std::vector<double> net;
  // The first pass is bottom-up only, since upper layers start at zero.
  for (std::size_t pass = 0; pass < (sizes.size() == 1 ? 1 : kMeanFieldPasses); ++pass) {
    double change = 0.0;
    for (std::size_t m = 0; m < sizes.size(); ++m) {
      net.assign(sizes[m], 0.0);
      model.hidden_net(m, visible, h, net);
      for (std::size_t l = 0; l < sizes[m]; ++l) {
        const double p = sigmoid(net[l]);
        change = std::max(change, std::abs(p - h[m][l]));
        h[m][l] = p;
      }
    }
    if (pass > 0 && change < kMeanFieldTolerance) break;
  }
  return h;
}

EdgeStatistics positive_phase(const Model& model, const SceneVector& scene, HiddenValues* hidden) {
  if (scene.size() != model.layout().visible_size()) {
    fail(ErrorKind::usage, "scene vector length does not match the model vocabulary");
  }
  HiddenValues h = hidden_probabilities(model, scene.bits);
  EdgeStatistics stats(model.params());
  model.accumulate(scene.bits, h, 1.0, stats.sums);
  stats.count = 1.0;
  if (hidden) *hidden = std::move(h);
  return stats;
}

NegativeSample negative_phase(const Model& model, const HiddenValues& hidden0, std::size_t steps,
                              double temperature, Rng& rng) {
  if (steps == 0) fail(ErrorKind::usage, "negative phase needs at least one step");
  if (hidden0.size() != model.hidden_layers()) {
    fail(ErrorKind::usage, "hidden probabilities do not match the model");
  }
  NegativeSample out;
  out.state = model.make_state();
  for (std::size_t m = 0; m < hidden0.size(); ++m) {
    if (hidden0[m].size() != out.state.hidden[m].size()) {
      fail(ErrorKind::usage, "hidden probabilities do not match the model");
    }
    for (std::size_t l = 0; l < hidden0[m].size(); ++l) {
      out.state.hidden[m][l] = uniform01(rng) < hidden0[m][l] ? 1 : 0;
    }
  }
  out.reconstruction.assign(model.layout().visible_size(), 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    sample_visible(model, out.state, model.object_units(), temperature, rng, out.reconstruction);
    sample_visible(model, out.state, model.relation_units(), temperature, rng, out.reconstruction);
    sample_visible(model, out.state, model.affordance_units(), temperature, rng,
                   out.reconstruction);
    sample_hidden(model, out.state, temperature, rng, &out.hidden);
  }
  return out;
}

EdgeStatistics negative_statistics(const Model& model, const NegativeSample& sample) {
  EdgeStatistics stats(model.params());
  model.accumulate(sample.state.visible, sample.hidden, 1.0, stats.sums);
  stats.count = 1.0;
  return stats;
}

void update_weights(Params& params, const EdgeStatistics& p_plus, const EdgeStatistics& p_minus,
                    double alpha) {
  if (p_plus.sums.size() != params.size() || p_minus.sums.size() != params.size()) {
    fail(ErrorKind::usage, "edge statistics do not match the parameter layout");
  }
  const auto plus = p_plus.mean();
  const auto minus = p_minus.mean();
  Params next = params;
  auto w = next.values();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += alpha * (plus[i] - minus[i]);
  next.enforce_structural_zeros();
  if (!next.all_finite()) fail(ErrorKind::internal, "weight update produced non-finite values");
  params = std::move(next);
}

BlockErrors squared_error(const Layout& layout, const SceneVector& scene,
                          std::span<const double> reconstruction) {
  BlockErrors e;
  const std::size_t rel = layout.relation_offset();
  const std::size_t aff = layout.affordance_offset();
  for (std::size_t v = 0; v < layout.visible_size(); ++v) {
    if (layout.structural_zero(v)) continue;
    const double d = static_cast<double>(scene.bits[v]) - reconstruction[v];
    const double sq = d * d;
    if (v < rel) {
      e.object += sq;
    } else if (v < aff) {
      e.relation += sq;
    } else {
      e.affordance += sq;
    }
  }
  return e;
}

namespace {

void add_into(BlockErrors& acc, const BlockErrors& e) {
  acc.object += e.object;
  acc.relation += e.relation;
  acc.affordance += e.affordance;
}

BlockErrors scaled(BlockErrors e, double s) {
  e.object *= s;
  e.relation *= s;
  e.affordance *= s;
  return e;
}

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kOrderStream = 0x5f0d;
constexpr std::uint64_t kSampleStream = 0x7a1;
constexpr std::uint64_t kValidationStream = 0xe7a1;
constexpr std::uint64_t kPretrainStream = 0x9e7;

struct LoopResult {
  std::vector<EpochErrors> curves;
  std::size_t epochs_run = 0;
  bool early_stopped = false;
};

LoopResult run_training(Model& model, const std::vector<SceneVector>& train_set,
                        const std::vector<SceneVector>& validation_set,
                        const TrainConfig& config) {
  LoopResult result;
  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  struct Pending {
    const SceneVector* scene;
    HiddenValues hidden;
    NegativeSample negative;
  };
  std::vector<Pending> batch;

  // Shared COSMO tensors are stepped with their own multiplier: their values
  // are saved before the fused update and the applied delta is rescaled.
  std::vector<const TensorInfo*> shared;
  double shared_scale = 1.0;
  if (model.kind() == ModelKind::cosmo) {
    const std::size_t o = model.layout().objects();
    const double pairs = static_cast<double>(o * (o > 0 ? o - 1 : 0));
    shared_scale = config.shared_rate_scale.value_or(pairs > 0.0 ? 1.0 / pairs : 1.0);
    if (shared_scale != 1.0) {
      shared = {&model.params().tensor("w_rh"), &model.params().tensor("w_ah")};
    }
  }
  std::vector<std::vector<double>> saved(shared.size());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double t = config.schedule.temperature(epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng order_rng = make_rng(config.seed, {kOrderStream, epoch});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(order_rng, i)]);

    BlockErrors train_error;
    const double step = config.learning_rate / static_cast<double>(config.batch_size);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      batch.clear();
      // Statistics for a batch are taken against one parameter snapshot.
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        Pending p{&train_set[idx], hidden_probabilities(model, train_set[idx].bits), {}};
        Rng rng = make_rng(config.seed, {kSampleStream, epoch, idx});
        p.negative = negative_phase(model, p.hidden, config.gibbs_steps, t, rng);
        add_into(train_error, squared_error(model.layout(), *p.scene, p.negative.reconstruction));
        batch.push_back(std::move(p));
      }
      if (step == 0.0) continue;
      auto target = model.params().values();
      for (std::size_t s = 0; s < shared.size(); ++s) {
        const auto first = target.begin() + static_cast<std::ptrdiff_t>(shared[s]->offset);
        saved[s].assign(first, first + static_cast<std::ptrdiff_t>(shared[s]->size));
      }
      for (const auto& p : batch) {
        model.accumulate(p.scene->bits, p.hidden, step, target);
        model.accumulate(p.negative.state.visible, p.negative.hidden, -step, target);
      }
      for (std::size_t s = 0; s < shared.size(); ++s) {
        double* w = target.data() + shared[s]->offset;
        for (std::size_t q = 0; q < saved[s].size(); ++q) {
          w[q] = saved[s][q] + shared_scale * (w[q] - saved[s][q]);
        }
      }
    }
    if (!model.params().all_finite()) {
      fail(ErrorKind::internal,
           "training diverged: non-finite weights after epoch " + std::to_string(epoch + 1));
    }

    EpochErrors row;
    row.epoch = epoch + 1;
    row.train = scaled(train_error, 1.0 / static_cast<double>(n));
    if (!validation_set.empty()) {
      row.validation =
          reconstruction_error(model, validation_set, config.gibbs_steps, t,
                               stream_seed(config.seed, {kValidationStream}));
    }
    const double monitored = row.validation ? row.validation->total() : row.train.total();
    if (!std::isfinite(monitored)) {
      fail(ErrorKind::internal,
           "training diverged: non-finite error at epoch " + std::to_string(epoch + 1));
    }
    result.curves.push_back(row);
    result.epochs_run = epoch + 1;
    if (monitored < best - config.tolerance) {
      best = monitored;
      stale = 0;
    } else if (config.patience > 0 && ++stale >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

ModelDims dims_for(const VocabularySet& vocabulary, std::vector<std::size_t> hidden) {
  const Layout layout = vocabulary.layout();
  return {layout.objects(), layout.relation_types(), layout.affordance_types(),
          std::move(hidden)};
}

// Binary RBM over real-valued inputs, used for the upper layers of a stack.
// Drives are scaled when the corresponding side is internal to the stack.
struct LayerRbm {
  std::size_t inputs, outputs;
  double up_scale, down_scale;
  std::vector<double> w;  // [inputs, outputs]

  void up(std::span<const double> x, std::vector<double>& h) const {
    h.assign(outputs, 0.0);
    for (std::size_t i = 0; i < inputs; ++i) {
      if (x[i] == 0.0) continue;
      for (std::size_t l = 0; l < outputs; ++l) h[l] += x[i] * w[i * outputs + l];
    }
    for (auto& v : h) v = sigmoid(up_scale * v);
  }

  void down(std::span<const double> h, std::vector<double>& x) const {
    x.assign(inputs, 0.0);
    for (std::size_t i = 0; i < inputs; ++i) {
      double acc = 0.0;
      for (std::size_t l = 0; l < outputs; ++l) acc += w[i * outputs + l] * h[l];
      x[i] = sigmoid(down_scale * acc);
    }
  }
};

}  // namespace

BlockErrors reconstruction_error(const Model& model, const std::vector<SceneVector>& scenes,
                                 std::size_t steps, double temperature, std::uint64_t seed) {
  if (scenes.empty()) fail(ErrorKind::usage, "reconstruction error needs at least one scene");
  BlockErrors total;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto h = hidden_probabilities(model, scenes[i].bits);
    Rng rng = make_rng(seed, {i});
    const auto neg = negative_phase(model, h, steps, temperature, rng);
    add_into(total, squared_error(model.layout(), scenes[i], neg.reconstruction));
  }
  return scaled(total, 1.0 / static_cast<double>(scenes.size()));
}

std::vector<SceneVector> encode_all(const std::vector<SceneDescription>& scenes,
                                    const VocabularySet& vocabulary) {
  std::vector<SceneVector> out;
  out.reserve(scenes.size());
  for (const auto& s : scenes) out.push_back(encode_scene(s, vocabulary));
  return out;
}

Params pretrain_layerwise(const DatasetSplit& split, const VocabularySet& vocabulary,
                          const TrainConfig& config) {
  config.validate();
  if (config.hidden.size() < 2) fail(ErrorKind::usage, "layer-wise pretraining needs >= 2 layers");
  if (split.train.empty()) fail(ErrorKind::usage, "train split is empty");
  const auto train_set = encode_all(split.train, vocabulary);
  const std::size_t epochs = config.pretrain_epochs > 0 ? config.pretrain_epochs : config.epochs;

  TrainConfig first = config;
  first.hidden = {config.hidden.front()};
  first.epochs = epochs;
  first.patience = 0;
  Params p1(config.model_kind, dims_for(vocabulary, first.hidden));
  Rng init_rng = make_rng(config.seed, {kPretrainStream, kInitStream});
  p1.randomize(init_rng, config.init_std);
  auto bottom = make_model(std::move(p1));
  bottom->set_visible_drive_scale(2.0);
  run_training(*bottom, train_set, {}, first);

  std::vector<std::vector<double>> inputs;
  inputs.reserve(train_set.size());
  for (const auto& v : train_set) inputs.push_back(hidden_probabilities(*bottom, v.bits).front());

  Params stacked(config.model_kind, dims_for(vocabulary, config.hidden));
  for (const auto& t : bottom->params().tensors()) {
    auto src = bottom->params().tensor_values(t.name);
    auto dst = stacked.tensor_values(t.name);
    std::copy(src.begin(), src.end(), dst.begin());
  }

  const std::size_t layers = config.hidden.size();
  std::vector<double> h, hs, x2, h2;
  for (std::size_t m = 1; m < layers; ++m) {
    LayerRbm rbm{config.hidden[m - 1], config.hidden[m], m + 1 < layers ? 2.0 : 1.0, 2.0, {}};
    rbm.w.resize(rbm.inputs * rbm.outputs);
    Rng wrng = make_rng(config.seed, {kPretrainStream, kInitStream, m});
    for (auto& x : rbm.w) x = config.init_std * normal01(wrng);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        Rng rng = make_rng(config.seed, {kPretrainStream, m, epoch, i});
        const auto& x = inputs[i];
        rbm.up(x, h);
        hs.resize(h.size());
        for (std::size_t l = 0; l < h.size(); ++l) hs[l] = uniform01(rng) < h[l] ? 1.0 : 0.0;
        rbm.down(hs, x2);
        rbm.up(x2, h2);
        for (std::size_t a = 0; a < rbm.inputs; ++a) {
          for (std::size_t l = 0; l < rbm.outputs; ++l) {
            rbm.w[a * rbm.outputs + l] += config.learning_rate * (x[a] * h[l] - x2[a] * h2[l]);
          }
        }
      }
    }
    for (auto& x : inputs) {
      rbm.up(x, h);
      x = h;
    }
    auto dst = stacked.tensor_values("w_hh" + std::to_string(m));
    std::copy(rbm.w.begin(), rbm.w.end(), dst.begin());
  }
  if (!stacked.all_finite()) fail(ErrorKind::internal, "pretraining diverged");
  return stacked;
}

TrainResult train(const DatasetSplit& split, const VocabularySet& vocabulary,
                  const TrainConfig& config, const Params* initial) {
  config.validate();
  if (split.train.empty()) fail(ErrorKind::usage, "train split is empty");
  const ModelDims dims = dims_for(vocabulary, config.hidden);
  Params params;
  if (initial) {
    if (initial->kind() != config.model_kind || !(initial->dims() == dims)) {
      fail(ErrorKind::usage, "initial parameters do not match the configured model");
    }
    params = *initial;
  } else if (config.hidden.size() >= 2 && config.pretrain_epochs > 0) {
    params = pretrain_layerwise(split, vocabulary, config);
  } else {
    params = Params(config.model_kind, dims);
    Rng rng = make_rng(config.seed, {kInitStream});
    params.randomize(rng, config.init_std);
  }
  auto model = make_model(std::move(params));
  const auto train_set = encode_all(split.train, vocabulary);
  const auto validation_set = encode_all(split.validation, vocabulary);
  auto loop = run_training(*model, train_set, validation_set, config);
  TrainResult result;
  result.params = model->params();
  result.curves = std::move(loop.curves);
  result.epochs_run = loop.epochs_run;
  result.early_stopped = loop.early_stopped;
  return result;
}

void write_curves_csv(std::ostream& out, const std::vector<EpochErrors>& curves) {
  out << "epoch,split,block,value\n";
  auto emit = [&](std::size_t epoch, const char* split, const BlockErrors& e) {
    out << epoch << ',' << split << ",object," << json(e.object).dump() << '\n';
    out << epoch << ',' << split << ",relation," << json(e.relation).dump() << '\n';
    out << epoch << ',' << split << ",affordance," << json(e.affordance).dump() << '\n';
  };
  for (const auto& row : curves) {
    emit(row.epoch, "train", row.train);
    if (row.validation) emit(row.epoch, "validation", *row.validation);
  }
}

}  // namespace cosmo
