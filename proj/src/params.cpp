#include "cosmo/params.hpp"

#include <algorithm>
#include <cmath>

#include "cosmo/error.hpp"

namespace cosmo {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::cosmo: return "cosmo";
    case ModelKind::gbm: return "gbm";
    case ModelKind::rbm: return "rbm";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "cosmo") return ModelKind::cosmo;
  if (name == "gbm") return ModelKind::gbm;
  if (name == "rbm") return ModelKind::rbm;
  fail(ErrorKind::usage, "unknown model kind '" + std::string(name) + "'");
}

Params::Params(ModelKind kind, ModelDims dims) : kind_(kind), dims_(std::move(dims)) {
  for (auto h : dims_.hidden) {
    if (h == 0 && dims_.hidden.size() > 1) {
      fail(ErrorKind::usage, "hidden layers in a stack must be non-empty");
    }
  }
  const std::size_t o = dims_.objects, rt = dims_.relation_types, at = dims_.affordance_types;
  const std::size_t h1 = dims_.first_hidden(), v = dims_.visible();
  std::size_t offset = 0;
  auto add = [&](std::string name, std::vector<std::size_t> shape) {
    std::size_t size = 1;
    for (auto s : shape) size *= s;
    tensors_.push_back({std::move(name), std::move(shape), offset, size});
    offset += size;
  };
  switch (kind_) {
    case ModelKind::cosmo:
      add("w_hv", {h1, o});
      add("w_r", {rt, o, o});
      add("w_rh", {rt, h1});
      add("w_a", {at, o, o});
      add("w_ah", {at, h1});
      break;
    case ModelKind::gbm:
      add("w_vv", {v > 0 ? v * (v - 1) / 2 : 0});
      add("w_vh", {v, h1});
      break;
    case ModelKind::rbm:
      add("w_vh", {v, h1});
      break;
  }
  for (std::size_t m = 0; m + 1 < dims_.hidden.size(); ++m) {
    add("w_hh" + std::to_string(m + 1), {dims_.hidden[m], dims_.hidden[m + 1]});
  }
  values_.assign(offset, 0.0);
}

const TensorInfo& Params::tensor(std::string_view name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t;
  }
  fail(ErrorKind::internal, "no tensor named '" + std::string(name) + "'");
}

std::span<double> Params::tensor_values(std::string_view name) {
  const auto& t = tensor(name);
  return std::span<double>(values_).subspan(t.offset, t.size);
}

std::span<const double> Params::tensor_values(std::string_view name) const {
  const auto& t = tensor(name);
  return std::span<const double>(values_).subspan(t.offset, t.size);
}

std::size_t Params::hidden_link_offset(std::size_t layer) const {
  return tensor("w_hh" + std::to_string(layer + 1)).offset;
}

void Params::randomize(Rng& rng, double std_dev) {
  for (auto& w : values_) w = std_dev * normal01(rng);
  enforce_structural_zeros();
}

void Params::enforce_structural_zeros() {
  const Layout layout = dims_.layout();
  const std::size_t o = dims_.objects;
  switch (kind_) {
    case ModelKind::cosmo: {
      for (const char* name : {"w_r", "w_a"}) {
        auto w = tensor_values(name);
        const std::size_t types = w.size() / std::max<std::size_t>(1, o * o);
        for (std::size_t i = 0; i < types; ++i) {
          for (std::size_t j = 0; j < o; ++j) w[i * o * o + j * o + j] = 0.0;
        }
      }
      break;
    }
    case ModelKind::gbm: {
      const std::size_t v = layout.visible_size();
      auto vv = tensor_values("w_vv");
      auto vh = tensor_values("w_vh");
      const std::size_t h1 = dims_.first_hidden();
      for (std::size_t s = o; s < v; ++s) {
        if (!layout.structural_zero(s)) continue;
        for (std::size_t t = 0; t < v; ++t) {
          if (t != s) vv[packed_pair_index(s, t, v)] = 0.0;
        }
        for (std::size_t l = 0; l < h1; ++l) vh[s * h1 + l] = 0.0;
      }
      break;
    }
    case ModelKind::rbm: {
      const std::size_t v = layout.visible_size();
      auto vh = tensor_values("w_vh");
      const std::size_t h1 = dims_.first_hidden();
      for (std::size_t s = o; s < v; ++s) {
        if (!layout.structural_zero(s)) continue;
        for (std::size_t l = 0; l < h1; ++l) vh[s * h1 + l] = 0.0;
      }
      break;
    }
  }
}

bool Params::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double w) { return std::isfinite(w); });
}

}  // namespace cosmo
