#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cosmo/random.hpp"
#include "cosmo/vocabulary.hpp"

namespace cosmo {

enum class ModelKind { cosmo, gbm, rbm };

std::string_view to_string(ModelKind kind);
/// Accepts "cosmo", "gbm", "rbm". Throws Error(usage).
ModelKind parse_model_kind(std::string_view name);

struct ModelDims {
  std::size_t objects = 0;
  std::size_t relation_types = 0;
  std::size_t affordance_types = 0;
  std::vector<std::size_t> hidden;  // one entry per hidden layer, bottom first

  Layout layout() const { return {objects, relation_types, affordance_types}; }
  std::size_t visible() const { return layout().visible_size(); }
  std::size_t first_hidden() const { return hidden.empty() ? 0 : hidden.front(); }

  bool operator==(const ModelDims&) const = default;
};

struct TensorInfo {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Every weight of a model in one contiguous buffer, partitioned into named
/// tensors in a fixed declaration order. Statistics and gradients use the
/// same layout, so updates are plain vector arithmetic.
///
/// cosmo: w_hv [H1,O], w_r [Rt,O,O], w_rh [Rt,H1], w_a [At,O,O], w_ah [At,H1]
/// gbm:   w_vv [V*(V-1)/2] (packed strict upper triangle, row-major), w_vh [V,H1]
/// rbm:   w_vh [V,H1]
/// all:   w_hh1 .. w_hh{L-1} with w_hh{m} of shape [H_m, H_{m+1}]
class Params {
 public:
  Params() = default;
  Params(ModelKind kind, ModelDims dims);

  ModelKind kind() const noexcept { return kind_; }
  const ModelDims& dims() const noexcept { return dims_; }
  const std::vector<TensorInfo>& tensors() const noexcept { return tensors_; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  const TensorInfo& tensor(std::string_view name) const;
  std::span<double> tensor_values(std::string_view name);
  std::span<const double> tensor_values(std::string_view name) const;

  /// Offset of w_hh{layer+1}, the weights between hidden layers layer and layer+1.
  std::size_t hidden_link_offset(std::size_t layer) const;

  /// i.i.d. N(0, std^2) entries, then structural zeros re-imposed.
  void randomize(Rng& rng, double std_dev);

  /// Zeroes every entry that must stay zero: COSMO's self-relation diagonals,
  /// and GBM/RBM weights attached to self-relation slots.
  void enforce_structural_zeros();

  bool all_finite() const;

  bool operator==(const Params& other) const {
    return kind_ == other.kind_ && dims_ == other.dims_ && values_ == other.values_;
  }

 private:
  ModelKind kind_ = ModelKind::cosmo;
  ModelDims dims_;
  std::vector<TensorInfo> tensors_;
  std::vector<double> values_;
};

/// Index of the unordered pair (i, j), i != j, in a packed strict upper triangle of size n.
inline std::size_t packed_pair_index(std::size_t i, std::size_t j, std::size_t n) noexcept {
  if (i > j) std::swap(i, j);
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

}  // namespace cosmo
