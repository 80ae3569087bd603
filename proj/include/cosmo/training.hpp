#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cosmo/dataset.hpp"
#include "cosmo/model.hpp"
#include "cosmo/schedule.hpp"
#include "cosmo/statistics.hpp"
#include "cosmo/vocabulary.hpp"

namespace cosmo {

struct TrainConfig {
  ModelKind model_kind = ModelKind::cosmo;
  double learning_rate = 0.05;
  std::size_t epochs = 30;
  std::size_t gibbs_steps = 1;
  AnnealSchedule schedule = AnnealSchedule::constant();
  std::vector<std::size_t> hidden = {16};
  std::uint64_t seed = 1;
  /// Epochs without validation improvement before stopping; 0 disables.
  std::size_t patience = 5;
  double tolerance = 1e-6;
  std::size_t batch_size = 1;
  double init_std = 0.01;
  /// Layer-wise pretraining epochs per layer; used only with >= 2 layers.
  std::size_t pretrain_epochs = 0;
  /// Step multiplier for the per-type shared hidden weights of COSMO (w_rh,
  /// w_ah). Their gradient scales with the number of active triples of a
  /// type, so unset means 1 / (O * (O - 1)); 1 gives the plain rule.
  std::optional<double> shared_rate_scale;

  /// Throws Error(usage) on alpha <= 0, epochs == 0, k == 0 and similar.
  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

/// Unknown keys and ill-typed values are Error(usage) naming the key.
TrainConfig parse_train_config_json(std::string_view text);
std::string train_config_to_json(const TrainConfig& config);

/// Per-block squared reconstruction error.
struct BlockErrors {
  double object = 0.0;
  double relation = 0.0;
  double affordance = 0.0;

  double total() const noexcept { return object + relation + affordance; }
};

struct EpochErrors {
  std::size_t epoch = 0;  // 1-based
  BlockErrors train;
  std::optional<BlockErrors> validation;
};

/// Clamped-visible hidden activation probabilities. One layer is exact;
/// deeper stacks use mean-field fixed-point passes.
HiddenValues hidden_probabilities(const Model& model, std::span<const std::uint8_t> visible);

/// Positive-phase statistics for one scene: visible bits clamped, hidden
/// factors at their activation probabilities. `hidden` receives those
/// probabilities when non-null.
EdgeStatistics positive_phase(const Model& model, const SceneVector& scene,
                              HiddenValues* hidden = nullptr);

struct NegativeSample {
  ModelState state;
  /// Visible-layer values after the final sweep: bits in `state.visible`,
  /// activation probabilities here (zero on structural slots).
  std::vector<double> reconstruction;
  /// Hidden activation probabilities from the final sweep.
  HiddenValues hidden;
};

/// Two-step negative phase started from hidden probabilities `hidden0`:
/// sample the hidden layers, zero the visibles, sample objects from the
/// hidden drive alone, then relations and affordances given those objects,
/// then the hidden layers again. Steps after the first are ordinary sweeps
/// that keep the current visibles.
NegativeSample negative_phase(const Model& model, const HiddenValues& hidden0,
                              std::size_t steps, double temperature, Rng& rng);

EdgeStatistics negative_statistics(const Model& model, const NegativeSample& sample);

/// w += alpha * (mean(p_plus) - mean(p_minus)), then structural zeros are
/// restored. Throws Error(internal) on a non-finite result, leaving params
/// unchanged.
void update_weights(Params& params, const EdgeStatistics& p_plus, const EdgeStatistics& p_minus,
                    double alpha);

/// Mean over scenes of sum_i (bit_i - p_i)^2, split by block, where p is the
/// negative-phase reconstruction probability. Throws Error(usage) when
/// `scenes` is empty.
BlockErrors reconstruction_error(const Model& model, const std::vector<SceneVector>& scenes,
                                 std::size_t steps, double temperature, std::uint64_t seed);

/// Squared error of one reconstruction against its scene, by block.
BlockErrors squared_error(const Layout& layout, const SceneVector& scene,
                          std::span<const double> reconstruction);

struct TrainResult {
  Params params;
  std::vector<EpochErrors> curves;
  std::size_t epochs_run = 0;
  bool early_stopped = false;
};

/// Per-sample contrastive training. Deterministic in (split, config).
/// With `initial`, training starts from those params instead of a random
/// init. Throws Error(usage) on an empty train split and Error(internal)
/// naming the epoch when the weights diverge.
TrainResult train(const DatasetSplit& split, const VocabularySet& vocabulary,
                  const TrainConfig& config, const Params* initial = nullptr);

/// Greedy stack initialization. Layer 1 is trained as the configured model
/// kind, later layers as RBMs on the previous layer's hidden probabilities.
/// Inputs to an internal layer are doubled. Throws Error(usage) for fewer
/// than two layers.
Params pretrain_layerwise(const DatasetSplit& split, const VocabularySet& vocabulary,
                          const TrainConfig& config);

/// Long-form curves: epoch,split,block,value.
void write_curves_csv(std::ostream& out, const std::vector<EpochErrors>& curves);

std::vector<SceneVector> encode_all(const std::vector<SceneDescription>& scenes,
                                    const VocabularySet& vocabulary);

}  // namespace cosmo
