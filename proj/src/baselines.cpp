#include "cosmo/baselines.hpp"

#include "cosmo/error.hpp"

namespace cosmo {

namespace {

std::vector<std::size_t> active_indices(std::span<const std::uint8_t> visible) {
  std::vector<std::size_t> active;
  for (std::size_t v = 0; v < visible.size(); ++v) {
    if (visible[v]) active.push_back(v);
  }
  return active;
}

}  // namespace

GbmModel::GbmModel(Params params) : Model(std::move(params)) {
  if (params_.kind() != ModelKind::gbm) fail(ErrorKind::internal, "params are not GBM params");
  visible_ = layout_.visible_size();
  off_vv_ = params_.tensor("w_vv").offset;
  off_vh_ = params_.tensor("w_vh").offset;
}

double GbmModel::hidden_drive(std::size_t v, std::span<const double> hidden0) const {
  const auto w = params_.values();
  const std::size_t h = dims().first_hidden();
  double acc = 0.0;
  for (std::size_t l = 0; l < h; ++l) acc += w[off_vh_ + v * h + l] * hidden0[l];
  return acc;
}

double GbmModel::visible_energy(std::span<const std::uint8_t> visible,
                                std::span<const double> hidden0) const {
  const auto active = active_indices(visible);
  double e = 0.0;
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (std::size_t b = a + 1; b < active.size(); ++b) e -= pair_weight(active[a], active[b]);
    e -= hidden_drive(active[a], hidden0);
  }
  return e;
}

double GbmModel::visible_net(std::span<const std::uint8_t> visible,
                             std::span<const double> hidden0, std::size_t v) const {
  double net = hidden_drive(v, hidden0);
  for (std::size_t j = 0; j < visible_; ++j) {
    if (visible[j] && j != v) net += pair_weight(v, j);
  }
  return net;
}

void GbmModel::visible_to_hidden(std::span<const std::uint8_t> visible,
                                 std::span<double> out) const {
  const auto w = params_.values();
  const std::size_t h = dims().first_hidden();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t v = 0; v < visible_; ++v) {
    if (!visible[v]) continue;
    for (std::size_t l = 0; l < h; ++l) out[l] += w[off_vh_ + v * h + l];
  }
}

void GbmModel::accumulate_visible(std::span<const std::uint8_t> visible,
                                  std::span<const double> hidden0, double scale,
                                  std::span<double> target) const {
  const auto active = active_indices(visible);
  const std::size_t h = dims().first_hidden();
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      target[off_vv_ + packed_pair_index(active[a], active[b], visible_)] += scale;
    }
    for (std::size_t l = 0; l < h; ++l) target[off_vh_ + active[a] * h + l] += scale * hidden0[l];
  }
}

void GbmModel::sample_visible_units(std::span<std::uint8_t> visible,
                                    std::span<const double> hidden0,
                                    std::span<const std::size_t> units, double temperature,
                                    Rng& rng, std::span<double> probs) const {
  const auto active = active_indices(visible);
  std::vector<double> net(units.size());
  for (std::size_t t = 0; t < units.size(); ++t) {
    double acc = hidden_drive(units[t], hidden0);
    for (auto a : active) {
      if (a != units[t]) acc += pair_weight(units[t], a);
    }
    net[t] = acc;
  }
  for (std::size_t t = 0; t < units.size(); ++t) {
    const std::size_t v = units[t];
    const double p = sigmoid(net[t] / temperature);
    if (!probs.empty()) probs[t] = p;
    const std::uint8_t bit = uniform01(rng) < p ? 1 : 0;
    if (bit == visible[v]) continue;
    visible[v] = bit;
    const double sign = bit ? 1.0 : -1.0;
    for (std::size_t u = t + 1; u < units.size(); ++u) net[u] += sign * pair_weight(units[u], v);
  }
}

RbmModel::RbmModel(Params params) : Model(std::move(params)) {
  if (params_.kind() != ModelKind::rbm) fail(ErrorKind::internal, "params are not RBM params");
  off_vh_ = params_.tensor("w_vh").offset;
}

double RbmModel::visible_energy(std::span<const std::uint8_t> visible,
                                std::span<const double> hidden0) const {
  const auto w = params_.values();
  const std::size_t h = dims().first_hidden();
  double e = 0.0;
  for (std::size_t v = 0; v < visible.size(); ++v) {
    if (!visible[v]) continue;
    for (std::size_t l = 0; l < h; ++l) e -= w[off_vh_ + v * h + l] * hidden0[l];
  }
  return e;
}

double RbmModel::visible_net(std::span<const std::uint8_t>, std::span<const double> hidden0,
                             std::size_t v) const {
  const auto w = params_.values();
  const std::size_t h = dims().first_hidden();
  double acc = 0.0;
  for (std::size_t l = 0; l < h; ++l) acc += w[off_vh_ + v * h + l] * hidden0[l];
  return acc;
}

void RbmModel::visible_to_hidden(std::span<const std::uint8_t> visible,
                                 std::span<double> out) const {
  const auto w = params_.values();
  const std::size_t h = dims().first_hidden();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t v = 0; v < visible.size(); ++v) {
    if (!visible[v]) continue;
    for (std::size_t l = 0; l < h; ++l) out[l] += w[off_vh_ + v * h + l];
  }
}

void RbmModel::accumulate_visible(std::span<const std::uint8_t> visible,
                                  std::span<const double> hidden0, double scale,
                                  std::span<double> target) const {
  const std::size_t h = dims().first_hidden();
  for (std::size_t v = 0; v < visible.size(); ++v) {
    if (!visible[v]) continue;
    for (std::size_t l = 0; l < h; ++l) target[off_vh_ + v * h + l] += scale * hidden0[l];
  }
}

}  // namespace cosmo
