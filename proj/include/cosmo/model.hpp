#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cosmo/params.hpp"
#include "cosmo/random.hpp"
#include "cosmo/scene.hpp"

namespace cosmo {

inline double sigmoid(double x) noexcept {
  // Split form keeps exp() from overflowing for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Joint binary assignment of visible and hidden units plus a clamp mask.
/// Visible bits follow Layout order; structural-zero slots stay 0.
struct ModelState {
  std::vector<std::uint8_t> visible;
  std::vector<std::vector<std::uint8_t>> hidden;  // per layer
  std::vector<std::uint8_t> visible_clamp;
  std::vector<std::vector<std::uint8_t>> hidden_clamp;

  bool operator==(const ModelState&) const = default;

  void clamp_all_visible() { std::fill(visible_clamp.begin(), visible_clamp.end(), 1); }
};

/// Addresses one unit: a visible slot, or unit `index` of hidden layer `layer`.
struct UnitRef {
  bool is_hidden = false;
  std::size_t layer = 0;
  std::size_t index = 0;

  static UnitRef visible(std::size_t v) { return {false, 0, v}; }
  static UnitRef hidden(std::size_t layer, std::size_t l) { return {true, layer, l}; }
};

using HiddenValues = std::vector<std::vector<double>>;

/// Energy-based model over the scene visible layer and a stack of hidden
/// layers. Subclasses define the visible-side energy terms and the first
/// hidden layer's drive; the hidden-to-hidden stack is shared.
///
/// Parameters are only read during inference, so one Model may serve any
/// number of concurrent samplers, each with its own state and Rng.
class Model {
 public:
  explicit Model(Params params);
  virtual ~Model() = default;
  Model(const Model&) = default;
  Model& operator=(const Model&) = default;

  ModelKind kind() const noexcept { return params_.kind(); }
  const ModelDims& dims() const noexcept { return params_.dims(); }
  const Layout& layout() const noexcept { return layout_; }
  const Params& params() const noexcept { return params_; }
  Params& params() noexcept { return params_; }
  std::size_t hidden_layers() const noexcept { return dims().hidden.size(); }

  virtual std::unique_ptr<Model> clone() const = 0;

  /// All-zero state with nothing clamped.
  ModelState make_state() const;
  /// State whose visible layer holds `bits`; hidden zero; nothing clamped.
  ModelState make_state(const SceneVector& bits) const;
  /// Throws Error(usage) when the state's shapes differ from the model's.
  void check_state(const ModelState& state) const;

  /// Visible slots that are units of the model, by block, in index order.
  const std::vector<std::size_t>& object_units() const noexcept { return object_units_; }
  const std::vector<std::size_t>& relation_units() const noexcept { return relation_units_; }
  const std::vector<std::size_t>& affordance_units() const noexcept { return affordance_units_; }

  /// Full energy of a state.
  double energy(const ModelState& state) const;

  /// Net input of a unit: the energy decrease from turning it on with every
  /// other unit held fixed. Throws Error(usage) on an invalid or
  /// structural-zero reference.
  double net_input(const ModelState& state, UnitRef unit) const;

  /// p(unit = 1 | all other units) at temperature 1.
  double conditional(const ModelState& state, UnitRef unit) const {
    return sigmoid(net_input(state, unit));
  }

  // Lower-level hooks used by samplers, training and the oracle. Hidden
  // inputs are real-valued so mean-field probabilities can stand in for bits.

  /// Visible-side energy: every term that involves a visible unit, with the
  /// first hidden layer given by `hidden0`.
  virtual double visible_energy(std::span<const std::uint8_t> visible,
                                std::span<const double> hidden0) const = 0;

  /// Net input of visible slot `v` given the other visibles and `hidden0`.
  virtual double visible_net(std::span<const std::uint8_t> visible,
                             std::span<const double> hidden0, std::size_t v) const = 0;

  /// out[l] = drive from the visible layer into first-layer hidden unit l.
  virtual void visible_to_hidden(std::span<const std::uint8_t> visible,
                                 std::span<double> out) const = 0;

  /// Adds scale * d(-E)/d(theta) at (visible, hidden) to `target`, laid out
  /// like params().values(). Visible-side tensors only.
  virtual void accumulate_visible(std::span<const std::uint8_t> visible,
                                  std::span<const double> hidden0, double scale,
                                  std::span<double> target) const = 0;

  /// Samples `units` in order at temperature T, each from its conditional
  /// given the current state. Writes the activation probability of each unit
  /// to probs (parallel to units) when non-empty. Consumes exactly one
  /// uniform draw per unit.
  virtual void sample_visible_units(std::span<std::uint8_t> visible,
                                    std::span<const double> hidden0,
                                    std::span<const std::size_t> units, double temperature,
                                    Rng& rng, std::span<double> probs) const;

  /// Net input of every unit in hidden layer `layer` given real-valued values
  /// for the visible layer (bits) and the neighbouring hidden layers.
  void hidden_net(std::size_t layer, std::span<const std::uint8_t> visible,
                  const HiddenValues& hidden, std::span<double> out) const;

  /// Full accumulation of d(-E)/d(theta), including the hidden stack.
  void accumulate(std::span<const std::uint8_t> visible, const HiddenValues& hidden,
                  double scale, std::span<double> target) const;

  /// Multiplier on the visible-to-first-hidden drive when computing hidden
  /// activations. 1 except while pretraining a stack, where an internal
  /// layer's bottom-up input is doubled.
  double visible_drive_scale() const noexcept { return visible_drive_scale_; }
  void set_visible_drive_scale(double s) noexcept { visible_drive_scale_ = s; }

 protected:
  Params params_;
  Layout layout_;
  std::vector<std::size_t> object_units_;
  std::vector<std::size_t> relation_units_;
  std::vector<std::size_t> affordance_units_;
  double visible_drive_scale_ = 1.0;
};

/// Builds the model matching params.kind().
std::unique_ptr<Model> make_model(Params params);

/// Bits to doubles, for feeding sampled hidden states to the hooks above.
std::vector<double> to_values(std::span<const std::uint8_t> bits);
HiddenValues to_values(const std::vector<std::vector<std::uint8_t>>& bits);

}  // namespace cosmo
