#pragma once

#include "cosmo/model.hpp"

namespace cosmo {

/// General Boltzmann machine baseline: pairwise visible-visible edges among
/// all object, relation and affordance units plus visible-hidden edges.
///
///   E = - sum_{i<j} v_i w^vv_{ij} v_j - sum_{j,l} v_j w^vh_{jl} h_l
///
/// w^vv is stored as a packed strict upper triangle and read symmetrically.
class GbmModel final : public Model {
 public:
  explicit GbmModel(Params params);

  std::unique_ptr<Model> clone() const override { return std::make_unique<GbmModel>(*this); }

  /// Symmetric read of w^vv; zero on the diagonal.
  double pair_weight(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return 0.0;
    return params_.values()[off_vv_ + packed_pair_index(i, j, visible_)];
  }

  double visible_energy(std::span<const std::uint8_t> visible,
                        std::span<const double> hidden0) const override;
  double visible_net(std::span<const std::uint8_t> visible, std::span<const double> hidden0,
                     std::size_t v) const override;
  void visible_to_hidden(std::span<const std::uint8_t> visible,
                         std::span<double> out) const override;
  void accumulate_visible(std::span<const std::uint8_t> visible,
                          std::span<const double> hidden0, double scale,
                          std::span<double> target) const override;
  /// Keeps a running net-input cache and patches it on every flip, so a
  /// sweep costs O(units * (active + flips)) rather than O(units * V).
  void sample_visible_units(std::span<std::uint8_t> visible, std::span<const double> hidden0,
                            std::span<const std::size_t> units, double temperature, Rng& rng,
                            std::span<double> probs) const override;

 private:
  double hidden_drive(std::size_t v, std::span<const double> hidden0) const;

  std::size_t visible_, off_vv_, off_vh_;
};

/// Restricted Boltzmann machine baseline: visible-hidden edges only.
///
///   E = - sum_{j,l} v_j w^vh_{jl} h_l
class RbmModel final : public Model {
 public:
  explicit RbmModel(Params params);

  std::unique_ptr<Model> clone() const override { return std::make_unique<RbmModel>(*this); }

  double visible_energy(std::span<const std::uint8_t> visible,
                        std::span<const double> hidden0) const override;
  double visible_net(std::span<const std::uint8_t> visible, std::span<const double> hidden0,
                     std::size_t v) const override;
  void visible_to_hidden(std::span<const std::uint8_t> visible,
                         std::span<double> out) const override;
  void accumulate_visible(std::span<const std::uint8_t> visible,
                          std::span<const double> hidden0, double scale,
                          std::span<double> target) const override;

 private:
  std::size_t off_vh_;
};

}  // namespace cosmo
