#include "cosmo/model.hpp"

#include "cosmo/baselines.hpp"
#include "cosmo/cosmo_model.hpp"
#include "cosmo/error.hpp"

namespace cosmo {

Model::Model(Params params) : params_(std::move(params)), layout_(params_.dims().layout()) {
  for (std::size_t j = 0; j < layout_.objects(); ++j) object_units_.push_back(j);
  for (std::size_t v = layout_.relation_offset(); v < layout_.affordance_offset(); ++v) {
    if (!layout_.structural_zero(v)) relation_units_.push_back(v);
  }
  for (std::size_t v = layout_.affordance_offset(); v < layout_.visible_size(); ++v) {
    if (!layout_.structural_zero(v)) affordance_units_.push_back(v);
  }
}

ModelState Model::make_state() const {
  ModelState s;
  s.visible.assign(layout_.visible_size(), 0);
  s.visible_clamp.assign(layout_.visible_size(), 0);
  for (auto h : dims().hidden) {
    s.hidden.emplace_back(h, 0);
    s.hidden_clamp.emplace_back(h, 0);
  }
  return s;
}

ModelState Model::make_state(const SceneVector& bits) const {
  if (bits.size() != layout_.visible_size()) {
    fail(ErrorKind::usage, "scene vector length does not match the model");
  }
  ModelState s = make_state();
  s.visible = bits.bits;
  return s;
}

void Model::check_state(const ModelState& s) const {
  const bool ok = [&] {
    if (s.visible.size() != layout_.visible_size()) return false;
    if (s.visible_clamp.size() != layout_.visible_size()) return false;
    if (s.hidden.size() != hidden_layers() || s.hidden_clamp.size() != hidden_layers()) {
      return false;
    }
    for (std::size_t m = 0; m < hidden_layers(); ++m) {
      if (s.hidden[m].size() != dims().hidden[m]) return false;
      if (s.hidden_clamp[m].size() != dims().hidden[m]) return false;
    }
    return true;
  }();
  if (!ok) fail(ErrorKind::usage, "model state shape does not match the model");
}

double Model::energy(const ModelState& state) const {
  check_state(state);
  const HiddenValues h = to_values(state.hidden);
  static const std::vector<double> none;
  double e = visible_energy(state.visible, h.empty() ? none : h.front());
  const auto w = params_.values();
  for (std::size_t m = 0; m + 1 < h.size(); ++m) {
    const std::size_t off = params_.hidden_link_offset(m);
    const std::size_t next = h[m + 1].size();
    for (std::size_t l = 0; l < h[m].size(); ++l) {
      if (h[m][l] == 0.0) continue;
      for (std::size_t j = 0; j < next; ++j) e -= h[m][l] * w[off + l * next + j] * h[m + 1][j];
    }
  }
  return e;
}

double Model::net_input(const ModelState& state, UnitRef unit) const {
  check_state(state);
  const HiddenValues h = to_values(state.hidden);
  if (!unit.is_hidden) {
    if (unit.index >= layout_.visible_size() || layout_.structural_zero(unit.index)) {
      fail(ErrorKind::usage, "invalid visible unit " + std::to_string(unit.index));
    }
    static const std::vector<double> none;
    return visible_net(state.visible, h.empty() ? none : h.front(), unit.index);
  }
  if (unit.layer >= hidden_layers() || unit.index >= dims().hidden[unit.layer]) {
    fail(ErrorKind::usage, "invalid hidden unit reference");
  }
  std::vector<double> net(dims().hidden[unit.layer]);
  hidden_net(unit.layer, state.visible, h, net);
  return net[unit.index];
}

void Model::sample_visible_units(std::span<std::uint8_t> visible,
                                 std::span<const double> hidden0,
                                 std::span<const std::size_t> units, double temperature,
                                 Rng& rng, std::span<double> probs) const {
  for (std::size_t t = 0; t < units.size(); ++t) {
    const double p = sigmoid(visible_net(visible, hidden0, units[t]) / temperature);
    if (!probs.empty()) probs[t] = p;
    visible[units[t]] = uniform01(rng) < p ? 1 : 0;
  }
}

void Model::hidden_net(std::size_t layer, std::span<const std::uint8_t> visible,
                       const HiddenValues& hidden, std::span<double> out) const {
  const auto& sizes = dims().hidden;
  const auto w = params_.values();
  if (layer == 0) {
    visible_to_hidden(visible, out);
    if (visible_drive_scale_ != 1.0) {
      for (auto& x : out) x *= visible_drive_scale_;
    }
  } else {
    const std::size_t off = params_.hidden_link_offset(layer - 1);
    const std::size_t n = sizes[layer];
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < sizes[layer - 1]; ++j) {
      const double below = hidden[layer - 1][j];
      if (below == 0.0) continue;
      for (std::size_t l = 0; l < n; ++l) out[l] += below * w[off + j * n + l];
    }
  }
  if (layer + 1 < sizes.size()) {
    const std::size_t off = params_.hidden_link_offset(layer);
    const std::size_t n = sizes[layer + 1];
    for (std::size_t l = 0; l < sizes[layer]; ++l) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += w[off + l * n + j] * hidden[layer + 1][j];
      out[l] += acc;
    }
  }
}

void Model::accumulate(std::span<const std::uint8_t> visible, const HiddenValues& hidden,
                       double scale, std::span<double> target) const {
  static const std::vector<double> none;
  accumulate_visible(visible, hidden.empty() ? none : hidden.front(), scale, target);
  for (std::size_t m = 0; m + 1 < hidden.size(); ++m) {
    const std::size_t off = params_.hidden_link_offset(m);
    const std::size_t n = hidden[m + 1].size();
    for (std::size_t l = 0; l < hidden[m].size(); ++l) {
      const double a = scale * hidden[m][l];
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) target[off + l * n + j] += a * hidden[m + 1][j];
    }
  }
}

std::unique_ptr<Model> make_model(Params params) {
  switch (params.kind()) {
    case ModelKind::cosmo: return std::make_unique<CosmoModel>(std::move(params));
    case ModelKind::gbm: return std::make_unique<GbmModel>(std::move(params));
    case ModelKind::rbm: return std::make_unique<RbmModel>(std::move(params));
  }
  fail(ErrorKind::internal, "unknown model kind");
}

std::vector<double> to_values(std::span<const std::uint8_t> bits) {
  return std::vector<double>(bits.begin(), bits.end());
}

HiddenValues to_values(const std::vector<std::vector<std::uint8_t>>& bits) {
  HiddenValues out;
  out.reserve(bits.size());
  for (const auto& layer : bits) out.push_back(to_values(layer));
  return out;
}

}  // namespace cosmo
