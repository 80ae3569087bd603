#include "cosmo/sampler.hpp"

#include "cosmo/error.hpp"

namespace cosmo {

namespace {

void check_temperature(double t) {
  if (!(t > 0.0)) fail(ErrorKind::usage, "temperature must be positive");
}

}  // namespace

std::uint8_t sample_unit(const Model& model, ModelState& state, UnitRef unit,
                         double temperature, Rng& rng) {
  check_temperature(temperature);
  model.check_state(state);
  const bool clamped = unit.is_hidden ? (unit.layer < state.hidden_clamp.size() &&
                                         unit.index < state.hidden_clamp[unit.layer].size() &&
                                         state.hidden_clamp[unit.layer][unit.index])
                                      : (unit.index < state.visible_clamp.size() &&
                                         state.visible_clamp[unit.index]);
  if (clamped) fail(ErrorKind::usage, "cannot sample a clamped unit");
  const double p = sigmoid(model.net_input(state, unit) / temperature);
  const std::uint8_t bit = uniform01(rng) < p ? 1 : 0;
  if (unit.is_hidden) {
    state.hidden[unit.layer][unit.index] = bit;
  } else {
    state.visible[unit.index] = bit;
  }
  return bit;
}

void sample_hidden(const Model& model, ModelState& state, double temperature, Rng& rng,
                   HiddenValues* probs) {
  check_temperature(temperature);
  if (probs) probs->resize(model.hidden_layers());
  HiddenValues values = to_values(state.hidden);
  for (std::size_t m = 0; m < model.hidden_layers(); ++m) {
    std::vector<double> net(values[m].size());
    model.hidden_net(m, state.visible, values, net);
    for (std::size_t l = 0; l < net.size(); ++l) {
      const double p = sigmoid(net[l] / temperature);
      net[l] = p;
      if (state.hidden_clamp[m][l]) continue;
      state.hidden[m][l] = uniform01(rng) < p ? 1 : 0;
      values[m][l] = state.hidden[m][l];
    }
    if (probs) (*probs)[m] = std::move(net);
  }
}

void sample_visible(const Model& model, ModelState& state, std::span<const std::size_t> units,
                    double temperature, Rng& rng, std::span<double> probs) {
  check_temperature(temperature);
  std::vector<std::size_t> free_units;
  free_units.reserve(units.size());
  for (auto v : units) {
    if (!state.visible_clamp[v]) free_units.push_back(v);
  }
  if (free_units.empty()) return;
  const std::vector<double> h0 =
      state.hidden.empty() ? std::vector<double>{} : to_values(state.hidden.front());
  std::vector<double> p(probs.empty() ? 0 : free_units.size());
  model.sample_visible_units(state.visible, h0, free_units, temperature, rng, p);
  for (std::size_t t = 0; t < p.size(); ++t) probs[free_units[t]] = p[t];
}

RelaxStats relax(const Model& model, ModelState& state, std::size_t sweeps,
                 const AnnealSchedule& schedule, Rng& rng, const RelaxOptions& options) {
  if (sweeps == 0) fail(ErrorKind::usage, "relax needs at least one sweep");
  model.check_state(state);
  std::vector<double> probs;
  if (options.visible_probability_sum) {
    options.visible_probability_sum->assign(model.layout().visible_size(), 0.0);
    probs.assign(model.layout().visible_size(), 0.0);
  }
  RelaxStats stats;
  for (std::size_t s = 0; s < sweeps; ++s) {
    const double t = schedule.temperature(s);
    sample_hidden(model, state, t, rng);
    for (auto block : options.order) {
      const auto& units = block == VisibleBlock::objects     ? model.object_units()
                          : block == VisibleBlock::relations ? model.relation_units()
                                                             : model.affordance_units();
      sample_visible(model, state, units, t, rng, probs);
    }
    if (options.visible_probability_sum) {
      auto& sum = *options.visible_probability_sum;
      for (std::size_t v = 0; v < sum.size(); ++v) {
        sum[v] += state.visible_clamp[v] ? static_cast<double>(state.visible[v]) : probs[v];
      }
    }
    stats.sweeps = s + 1;
    stats.final_temperature = t;
  }
  return stats;
}

}  // namespace cosmo
