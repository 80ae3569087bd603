#include "cosmo/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "cosmo/error.hpp"

namespace cosmo {

std::vector<double> EdgeStatistics::mean() const {
  if (!(count > 0.0)) fail(ErrorKind::usage, "edge statistics are empty");
  std::vector<double> out(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) out[i] = sums[i] / count;
  return out;
}

void EdgeStatistics::merge(const EdgeStatistics& other) {
  if (sums.empty()) sums.assign(other.sums.size(), 0.0);
  if (sums.size() != other.sums.size()) fail(ErrorKind::usage, "edge statistics shape mismatch");
  for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += other.sums[i];
  count += other.count;
}

namespace {

std::size_t total_units(const Model& model) {
  std::size_t n = model.layout().visible_size();
  for (auto h : model.dims().hidden) n += h;
  return n;
}

void check_bound(const Model& model, const TinyModelBound& bound) {
  const std::size_t n = total_units(model);
  const std::size_t limit = std::min(bound.max_total_units, TinyModelBound::hard_cap);
  if (n > limit) {
    fail(ErrorKind::usage, "model has " + std::to_string(n) +
                               " units; exact enumeration is limited to " +
                               std::to_string(limit));
  }
}

void set_unit(ModelState& s, const UnitRef& u, std::uint8_t bit) {
  if (u.is_hidden) {
    s.hidden[u.layer][u.index] = bit;
  } else {
    s.visible[u.index] = bit;
  }
}

}  // namespace

ExactDistribution::ExactDistribution(const Model& model, const ModelState* clamp_template,
                                     TinyModelBound bound)
    : model_(&model) {
  check_bound(model, bound);
  base_ = clamp_template ? *clamp_template : model.make_state();
  model.check_state(base_);

  for (std::size_t v = 0; v < model.layout().visible_size(); ++v) {
    if (model.layout().structural_zero(v)) {
      base_.visible[v] = 0;
      continue;
    }
    if (!base_.visible_clamp[v]) units_.push_back(UnitRef::visible(v));
  }
  for (std::size_t m = 0; m < model.hidden_layers(); ++m) {
    for (std::size_t l = 0; l < model.dims().hidden[m]; ++l) {
      if (!base_.hidden_clamp[m][l]) units_.push_back(UnitRef::hidden(m, l));
    }
  }
  for (const auto& u : units_) set_unit(base_, u, 0);
  std::fill(base_.visible_clamp.begin(), base_.visible_clamp.end(), 0);
  for (auto& layer : base_.hidden_clamp) std::fill(layer.begin(), layer.end(), 0);

  const std::size_t n = units_.size();
  const std::size_t states = std::size_t{1} << n;
  energy_.assign(states, 0.0);
  probability_.assign(states, 0.0);

  // Gray-code walk: consecutive states differ in one unit, so the working
  // state is patched by a single flip before each full energy evaluation.
  ModelState work = base_;
  std::size_t code = 0;
  energy_[0] = model.energy(work);
  for (std::size_t i = 1; i < states; ++i) {
    const std::size_t next = i ^ (i >> 1);
    const std::size_t changed = next ^ code;
    const auto b = static_cast<std::size_t>(std::countr_zero(changed));
    set_unit(work, units_[b], (next >> b) & 1u);
    code = next;
    energy_[code] = model.energy(work);
  }

  double max_neg = -std::numeric_limits<double>::infinity();
  for (double e : energy_) max_neg = std::max(max_neg, -e);
  // Compensated sum of exp(-E - max) keeps log Z stable.
  double sum = 0.0, comp = 0.0;
  for (double e : energy_) {
    const double y = std::exp(-e - max_neg) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  log_z_ = max_neg + std::log(sum);
  for (std::size_t c = 0; c < states; ++c) probability_[c] = std::exp(-energy_[c] - log_z_);
}

double ExactDistribution::partition() const { return std::exp(log_z_); }

ModelState ExactDistribution::state(std::size_t code) const {
  ModelState s = base_;
  for (std::size_t b = 0; b < units_.size(); ++b) set_unit(s, units_[b], (code >> b) & 1u);
  return s;
}

double ExactDistribution::marginal(std::size_t b) const {
  double acc = 0.0;
  for (std::size_t c = 0; c < probability_.size(); ++c) {
    if ((c >> b) & 1u) acc += probability_[c];
  }
  return acc;
}

std::vector<double> ExactDistribution::marginals() const {
  std::vector<double> out(units_.size(), 0.0);
  for (std::size_t c = 0; c < probability_.size(); ++c) {
    for (std::size_t b = 0; b < units_.size(); ++b) {
      if ((c >> b) & 1u) out[b] += probability_[c];
    }
  }
  return out;
}

double ExactDistribution::conditional(std::size_t code, std::size_t b) const {
  const std::size_t on = code | (std::size_t{1} << b);
  const std::size_t off = code & ~(std::size_t{1} << b);
  return probability_[on] / (probability_[on] + probability_[off]);
}

std::size_t ExactDistribution::free_index(UnitRef unit) const {
  for (std::size_t b = 0; b < units_.size(); ++b) {
    const auto& u = units_[b];
    if (u.is_hidden == unit.is_hidden && u.index == unit.index &&
        (!u.is_hidden || u.layer == unit.layer)) {
      return b;
    }
  }
  return npos;
}

double exact_log_partition(const Model& model, TinyModelBound bound) {
  return ExactDistribution(model, nullptr, bound).log_partition();
}

double exact_partition(const Model& model, TinyModelBound bound) {
  return std::exp(exact_log_partition(model, bound));
}

EdgeStatistics exact_edge_expectations(const Model& model, const SceneVector* clamp,
                                       TinyModelBound bound) {
  std::optional<ModelState> tmpl;
  if (clamp) {
    tmpl = model.make_state(*clamp);
    tmpl->clamp_all_visible();
  }
  const ExactDistribution dist(model, tmpl ? &*tmpl : nullptr, bound);
  EdgeStatistics stats(model.params());
  for (std::size_t c = 0; c < dist.state_count(); ++c) {
    const ModelState s = dist.state(c);
    model.accumulate(s.visible, to_values(s.hidden), dist.probability(c), stats.sums);
  }
  stats.count = 1.0;
  return stats;
}

EdgeStatistics exact_data_expectations(const Model& model, const std::vector<SceneVector>& data,
                                       TinyModelBound bound) {
  if (data.empty()) fail(ErrorKind::usage, "data distribution is empty");
  EdgeStatistics total(model.params());
  for (const auto& v : data) {
    const auto one = exact_edge_expectations(model, &v, bound);
    for (std::size_t i = 0; i < total.sums.size(); ++i) total.sums[i] += one.sums[i];
  }
  for (auto& x : total.sums) x /= static_cast<double>(data.size());
  total.count = 1.0;
  return total;
}

double exact_kl_divergence(const Model& model, const std::vector<SceneVector>& data,
                           TinyModelBound bound) {
  if (data.empty()) fail(ErrorKind::usage, "data distribution is empty");
  const ExactDistribution dist(model, nullptr, bound);
  const auto& units = dist.units();
  std::vector<std::size_t> visible_bits;  // free-unit positions of visible units
  for (std::size_t b = 0; b < units.size(); ++b) {
    if (!units[b].is_hidden) visible_bits.push_back(b);
  }
  auto key_of_code = [&](std::size_t code) {
    std::size_t key = 0;
    for (std::size_t t = 0; t < visible_bits.size(); ++t) {
      key |= ((code >> visible_bits[t]) & 1u) << t;
    }
    return key;
  };
  std::map<std::size_t, double> model_marginal;
  for (std::size_t c = 0; c < dist.state_count(); ++c) {
    model_marginal[key_of_code(c)] += dist.probability(c);
  }
  std::map<std::size_t, double> data_marginal;
  for (const auto& v : data) {
    if (v.size() != model.layout().visible_size()) {
      fail(ErrorKind::usage, "data vector length does not match the model");
    }
    std::size_t key = 0;
    for (std::size_t t = 0; t < visible_bits.size(); ++t) {
      key |= static_cast<std::size_t>(v.bits[units[visible_bits[t]].index] & 1u) << t;
    }
    data_marginal[key] += 1.0 / static_cast<double>(data.size());
  }
  double kl = 0.0;
  for (const auto& [key, p] : data_marginal) kl += p * std::log(p / model_marginal.at(key));
  return kl;
}

}  // namespace cosmo
