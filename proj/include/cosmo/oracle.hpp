#pragma once

#include <cstdint>
#include <vector>

#include "cosmo/model.hpp"
#include "cosmo/statistics.hpp"

namespace cosmo {

/// Limit on O + Rt*O^2 + At*O^2 + H for exact enumeration.
struct TinyModelBound {
  std::size_t max_total_units = 16;
  static constexpr std::size_t hard_cap = 24;
};

/// Exact joint distribution of a tiny model over its free units.
///
/// Free units are every model unit (visible slots that are not structural
/// zeros, plus all hidden units) that the optional template does not clamp.
/// Clamped units are held at the template's values: the state space is
/// restricted, not reweighted. States are indexed by a code whose bit b is
/// the value of free unit b.
class ExactDistribution {
 public:
  /// Enumerates in Gray-code order and evaluates Model::energy on every
  /// state. Throws Error(usage) when the model exceeds `bound`.
  explicit ExactDistribution(const Model& model, const ModelState* clamp_template = nullptr,
                             TinyModelBound bound = {});

  const std::vector<UnitRef>& units() const noexcept { return units_; }
  std::size_t state_count() const noexcept { return probability_.size(); }
  double log_partition() const noexcept { return log_z_; }
  double partition() const;

  double probability(std::size_t code) const { return probability_[code]; }
  const std::vector<double>& probabilities() const noexcept { return probability_; }
  double energy(std::size_t code) const { return energy_[code]; }

  /// Materializes the joint state for a code (clamp mask cleared).
  ModelState state(std::size_t code) const;

  /// p(free unit b = 1).
  double marginal(std::size_t b) const;
  std::vector<double> marginals() const;

  /// p(unit b = 1 | every other free unit as in `code`), by Bayes quotient
  /// over the two states that differ only in unit b.
  double conditional(std::size_t code, std::size_t b) const;

  /// Free-unit index of a model unit, or npos when it is not free.
  std::size_t free_index(UnitRef unit) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  const Model* model_;
  ModelState base_;
  std::vector<UnitRef> units_;
  std::vector<double> energy_;
  std::vector<double> probability_;
  double log_z_ = 0.0;
};

/// log Z = log sum exp(-E) over all joint states.
double exact_log_partition(const Model& model, TinyModelBound bound = {});
double exact_partition(const Model& model, TinyModelBound bound = {});

/// Exact expectation of every edge's unit product. With `clamp`, the visible
/// layer is fixed to that vector (the exact positive-phase statistic for one
/// scene); without, the free-running model (the exact negative phase).
EdgeStatistics exact_edge_expectations(const Model& model, const SceneVector* clamp = nullptr,
                                       TinyModelBound bound = {});

/// Exact positive statistics for an empirical data distribution: the mean of
/// clamped expectations over `data`.
EdgeStatistics exact_data_expectations(const Model& model, const std::vector<SceneVector>& data,
                                       TinyModelBound bound = {});

/// KL(p_data || p_model) over the visible layer, p_data uniform over `data`
/// (duplicates count with multiplicity).
double exact_kl_divergence(const Model& model, const std::vector<SceneVector>& data,
                           TinyModelBound bound = {});

}  // namespace cosmo
