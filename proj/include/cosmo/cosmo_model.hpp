#pragma once

#include "cosmo/model.hpp"

namespace cosmo {

/// Tri-way Boltzmann machine over objects, relations and affordances.
///
///   E = - sum_{l,j} h_l w^hv_{lj} o_j
///       - sum_{i,j,k} w^r_{ijk} r_{ijk} o_j o_k - sum_{i,l} w^rh_{il} (sum_{j,k} r_{ijk}) h_l
///       - sum_{i,j,k} w^a_{ijk} a_{ijk} o_j o_k - sum_{i,l} w^ah_{il} (sum_{j,k} a_{ijk}) h_l
///
/// w^rh and w^ah hold one weight per (type, hidden unit), shared by every
/// object pair. An object's net input collects tri-way terms from triples in
/// which it is either endpoint, so all conditionals derive from E.
class CosmoModel final : public Model {
 public:
  explicit CosmoModel(Params params);

  std::unique_ptr<Model> clone() const override { return std::make_unique<CosmoModel>(*this); }

  double visible_energy(std::span<const std::uint8_t> visible,
                        std::span<const double> hidden0) const override;
  double visible_net(std::span<const std::uint8_t> visible, std::span<const double> hidden0,
                     std::size_t v) const override;
  void visible_to_hidden(std::span<const std::uint8_t> visible,
                         std::span<double> out) const override;
  void accumulate_visible(std::span<const std::uint8_t> visible,
                          std::span<const double> hidden0, double scale,
                          std::span<double> target) const override;
  void sample_visible_units(std::span<std::uint8_t> visible, std::span<const double> hidden0,
                            std::span<const std::size_t> units, double temperature, Rng& rng,
                            std::span<double> probs) const override;

 private:
  /// sum_l w[type, l] * h_l for a [types, H] shared-weight tensor.
  double shared_drive(std::size_t offset, std::size_t type, std::span<const double> hidden0) const;
  /// Active off-diagonal slots per type in the block starting at `block`.
  std::vector<double> type_counts(std::span<const std::uint8_t> visible, std::size_t block,
                                  std::size_t types) const;

  std::size_t off_hv_, off_r_, off_rh_, off_a_, off_ah_;
};

}  // namespace cosmo
