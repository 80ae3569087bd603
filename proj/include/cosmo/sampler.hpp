#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cosmo/model.hpp"
#include "cosmo/random.hpp"
#include "cosmo/schedule.hpp"

namespace cosmo {

/// Draws one unclamped unit from its conditional at temperature T, i.e.
/// p(on) = sigmoid(net / T) = 1 / (1 + exp(dE / T)) with dE = -net.
/// Throws Error(usage) for a clamped unit or T <= 0.
std::uint8_t sample_unit(const Model& model, ModelState& state, UnitRef unit,
                         double temperature, Rng& rng);

/// Samples every unclamped hidden unit, bottom layer first. When `probs` is
/// given it receives the activation probabilities of every hidden unit.
void sample_hidden(const Model& model, ModelState& state, double temperature, Rng& rng,
                   HiddenValues* probs = nullptr);

/// Samples the unclamped members of `units` in order. `probs`, when
/// non-empty, is indexed by visible slot and receives each sampled unit's
/// activation probability.
void sample_visible(const Model& model, ModelState& state, std::span<const std::size_t> units,
                    double temperature, Rng& rng, std::span<double> probs = {});

/// Visible blocks in the order a sweep visits them.
enum class VisibleBlock { objects, relations, affordances };

struct RelaxOptions {
  /// Block order after the hidden layers; hidden always goes first.
  std::vector<VisibleBlock> order = {VisibleBlock::objects, VisibleBlock::relations,
                                     VisibleBlock::affordances};
  /// When set, receives per visible slot the sum over sweeps of the
  /// activation probability at the moment the slot was sampled.
  std::vector<double>* visible_probability_sum = nullptr;
};

struct RelaxStats {
  std::size_t sweeps = 0;
  double final_temperature = 1.0;
};

/// k full sweeps. Sweep s runs at schedule.temperature(s) and samples the
/// unclamped hidden units, then unclamped objects, relations and affordances.
/// Clamped units never change. Deterministic given (state, rng).
RelaxStats relax(const Model& model, ModelState& state, std::size_t sweeps,
                 const AnnealSchedule& schedule, Rng& rng, const RelaxOptions& options = {});

}  // namespace cosmo
