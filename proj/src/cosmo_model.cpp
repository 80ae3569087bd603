#include "cosmo/cosmo_model.hpp"

#include "cosmo/error.hpp"

namespace cosmo {

CosmoModel::CosmoModel(Params params) : Model(std::move(params)) {
  if (params_.kind() != ModelKind::cosmo) fail(ErrorKind::internal, "params are not COSMO params");
  off_hv_ = params_.tensor("w_hv").offset;
  off_r_ = params_.tensor("w_r").offset;
  off_rh_ = params_.tensor("w_rh").offset;
  off_a_ = params_.tensor("w_a").offset;
  off_ah_ = params_.tensor("w_ah").offset;
}

double CosmoModel::shared_drive(std::size_t offset, std::size_t type,
                                std::span<const double> hidden0) const {
  const auto w = params_.values();
  const std::size_t h = dims().first_hidden();
  double acc = 0.0;
  for (std::size_t l = 0; l < h; ++l) acc += w[offset + type * h + l] * hidden0[l];
  return acc;
}

std::vector<double> CosmoModel::type_counts(std::span<const std::uint8_t> visible,
                                            std::size_t block, std::size_t types) const {
  const std::size_t pairs = layout_.pair_count();
  std::vector<double> counts(types, 0.0);
  for (std::size_t i = 0; i < types; ++i) {
    const std::uint8_t* bits = visible.data() + block + i * pairs;
    std::size_t c = 0;
    for (std::size_t p = 0; p < pairs; ++p) c += bits[p];
    counts[i] = static_cast<double>(c);
  }
  return counts;
}

double CosmoModel::visible_energy(std::span<const std::uint8_t> visible,
                                  std::span<const double> hidden0) const {
  const auto w = params_.values();
  const std::size_t o = layout_.objects(), h = dims().first_hidden(), pairs = layout_.pair_count();
  double e = 0.0;
  for (std::size_t j = 0; j < o; ++j) {
    if (!visible[j]) continue;
    for (std::size_t l = 0; l < h; ++l) e -= hidden0[l] * w[off_hv_ + l * o + j];
  }
  auto triway = [&](std::size_t block, std::size_t types, std::size_t off_w, std::size_t off_s) {
    for (std::size_t i = 0; i < types; ++i) {
      double count = 0.0;
      for (std::size_t j = 0; j < o; ++j) {
        for (std::size_t k = 0; k < o; ++k) {
          const std::size_t p = i * pairs + j * o + k;
          if (!visible[block + p]) continue;
          count += 1.0;
          if (visible[j] && visible[k]) e -= w[off_w + p];
        }
      }
      if (count != 0.0) e -= count * shared_drive(off_s, i, hidden0);
    }
  };
  triway(layout_.relation_offset(), layout_.relation_types(), off_r_, off_rh_);
  triway(layout_.affordance_offset(), layout_.affordance_types(), off_a_, off_ah_);
  return e;
}

double CosmoModel::visible_net(std::span<const std::uint8_t> visible,
                               std::span<const double> hidden0, std::size_t v) const {
  const auto w = params_.values();
  const std::size_t o = layout_.objects(), h = dims().first_hidden(), pairs = layout_.pair_count();
  const auto slot = layout_.slot(v);
  switch (slot.kind) {
    case BlockKind::object: {
      const std::size_t j = slot.subject;
      double net = 0.0;
      for (std::size_t l = 0; l < h; ++l) net += hidden0[l] * w[off_hv_ + l * o + j];
      auto triway = [&](std::size_t block, std::size_t types, std::size_t off_w) {
        for (std::size_t i = 0; i < types; ++i) {
          const std::size_t base = i * pairs;
          for (std::size_t k = 0; k < o; ++k) {
            if (k == j || !visible[k]) continue;
            const std::size_t as_subject = base + j * o + k;
            const std::size_t as_object = base + k * o + j;
            if (visible[block + as_subject]) net += w[off_w + as_subject];
            if (visible[block + as_object]) net += w[off_w + as_object];
          }
        }
      };
      triway(layout_.relation_offset(), layout_.relation_types(), off_r_);
      triway(layout_.affordance_offset(), layout_.affordance_types(), off_a_);
      return net;
    }
    case BlockKind::relation: {
      const std::size_t p = slot.type * pairs + slot.subject * o + slot.object;
      const double tri = (visible[slot.subject] && visible[slot.object]) ? w[off_r_ + p] : 0.0;
      return tri + shared_drive(off_rh_, slot.type, hidden0);
    }
    case BlockKind::affordance: {
      const std::size_t p = slot.type * pairs + slot.subject * o + slot.object;
      const double tri = (visible[slot.subject] && visible[slot.object]) ? w[off_a_ + p] : 0.0;
      return tri + shared_drive(off_ah_, slot.type, hidden0);
    }
  }
  return 0.0;
}

void CosmoModel::visible_to_hidden(std::span<const std::uint8_t> visible,
                                   std::span<double> out) const {
  const auto w = params_.values();
  const std::size_t o = layout_.objects(), h = dims().first_hidden();
  const auto rc = type_counts(visible, layout_.relation_offset(), layout_.relation_types());
  const auto ac = type_counts(visible, layout_.affordance_offset(), layout_.affordance_types());
  for (std::size_t l = 0; l < h; ++l) {
    double net = 0.0;
    for (std::size_t j = 0; j < o; ++j) {
      if (visible[j]) net += w[off_hv_ + l * o + j];
    }
    for (std::size_t i = 0; i < rc.size(); ++i) net += w[off_rh_ + i * h + l] * rc[i];
    for (std::size_t i = 0; i < ac.size(); ++i) net += w[off_ah_ + i * h + l] * ac[i];
    out[l] = net;
  }
}

void CosmoModel::accumulate_visible(std::span<const std::uint8_t> visible,
                                    std::span<const double> hidden0, double scale,
                                    std::span<double> target) const {
  const std::size_t o = layout_.objects(), h = dims().first_hidden(), pairs = layout_.pair_count();
  for (std::size_t j = 0; j < o; ++j) {
    if (!visible[j]) continue;
    for (std::size_t l = 0; l < h; ++l) target[off_hv_ + l * o + j] += scale * hidden0[l];
  }
  auto triway = [&](std::size_t block, std::size_t types, std::size_t off_w, std::size_t off_s) {
    for (std::size_t i = 0; i < types; ++i) {
      double count = 0.0;
      for (std::size_t p = i * pairs; p < (i + 1) * pairs; ++p) {
        if (!visible[block + p]) continue;
        count += 1.0;
        const std::size_t pair = p - i * pairs;
        if (visible[pair / o] && visible[pair % o]) target[off_w + p] += scale;
      }
      if (count == 0.0) continue;
      for (std::size_t l = 0; l < h; ++l) target[off_s + i * h + l] += scale * count * hidden0[l];
    }
  };
  triway(layout_.relation_offset(), layout_.relation_types(), off_r_, off_rh_);
  triway(layout_.affordance_offset(), layout_.affordance_types(), off_a_, off_ah_);
}

void CosmoModel::sample_visible_units(std::span<std::uint8_t> visible,
                                      std::span<const double> hidden0,
                                      std::span<const std::size_t> units, double temperature,
                                      Rng& rng, std::span<double> probs) const {
  // Relation and affordance units only see the hidden layer through one
  // shared drive per type, which is fixed for the duration of this call.
  const auto w = params_.values();
  const std::size_t o = layout_.objects(), pairs = layout_.pair_count();
  std::vector<double> rdrive(layout_.relation_types()), adrive(layout_.affordance_types());
  for (std::size_t i = 0; i < rdrive.size(); ++i) rdrive[i] = shared_drive(off_rh_, i, hidden0);
  for (std::size_t i = 0; i < adrive.size(); ++i) adrive[i] = shared_drive(off_ah_, i, hidden0);
  const std::size_t rel0 = layout_.relation_offset(), aff0 = layout_.affordance_offset();

  for (std::size_t t = 0; t < units.size(); ++t) {
    const std::size_t v = units[t];
    double net;
    if (v < rel0) {
      net = visible_net(visible, hidden0, v);
    } else {
      const bool is_rel = v < aff0;
      const std::size_t p = v - (is_rel ? rel0 : aff0);
      const std::size_t type = p / pairs, pair = p % pairs;
      const bool both = visible[pair / o] && visible[pair % o];
      net = is_rel ? (both ? w[off_r_ + p] : 0.0) + rdrive[type]
                   : (both ? w[off_a_ + p] : 0.0) + adrive[type];
    }
    const double prob = sigmoid(net / temperature);
    if (!probs.empty()) probs[t] = prob;
    visible[v] = uniform01(rng) < prob ? 1 : 0;
  }
}

}  // namespace cosmo
