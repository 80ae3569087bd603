#include "cosmo/verification.hpp"

#include <cmath>
#include <sstream>

#include "cosmo/error.hpp"
#include "cosmo/sampler.hpp"
#include "cosmo/training.hpp"

namespace cosmo {

std::unique_ptr<Model> make_tiny_model(ModelKind kind, std::uint64_t seed, double std_dev) {
  Params p(kind, ModelDims{2, 1, 1, {2}});
  Rng rng = make_rng(seed, {0x7e57});
  p.randomize(rng, std_dev);
  return make_model(std::move(p));
}

double naive_energy(const Params& params, const ModelState& state) {
  const ModelDims& d = params.dims();
  const std::size_t o = d.objects, rt = d.relation_types, at = d.affordance_types;
  const std::size_t v_size = o + (rt + at) * o * o;
  auto vis = [&](std::size_t v) { return static_cast<double>(state.visible[v]); };
  auto hid = [&](std::size_t m, std::size_t l) { return static_cast<double>(state.hidden[m][l]); };
  const std::size_t h1 = d.hidden.empty() ? 0 : d.hidden[0];
  double e = 0.0;

  if (params.kind() == ModelKind::cosmo) {
    const auto hv = params.tensor_values("w_hv");
    const auto wr = params.tensor_values("w_r");
    const auto rh = params.tensor_values("w_rh");
    const auto wa = params.tensor_values("w_a");
    const auto ah = params.tensor_values("w_ah");
    for (std::size_t l = 0; l < h1; ++l) {
      for (std::size_t j = 0; j < o; ++j) e -= hid(0, l) * hv[l * o + j] * vis(j);
    }
    for (int block = 0; block < 2; ++block) {
      const std::size_t types = block == 0 ? rt : at;
      const std::size_t base = block == 0 ? o : o + rt * o * o;
      const auto w = block == 0 ? wr : wa;
      const auto s = block == 0 ? rh : ah;
      for (std::size_t i = 0; i < types; ++i) {
        for (std::size_t j = 0; j < o; ++j) {
          for (std::size_t k = 0; k < o; ++k) {
            const double r = vis(base + i * o * o + j * o + k);
            e -= w[i * o * o + j * o + k] * r * vis(j) * vis(k);
            for (std::size_t l = 0; l < h1; ++l) e -= s[i * h1 + l] * r * hid(0, l);
          }
        }
      }
    }
  } else {
    const auto vh = params.tensor_values("w_vh");
    for (std::size_t v = 0; v < v_size; ++v) {
      for (std::size_t l = 0; l < h1; ++l) e -= vis(v) * vh[v * h1 + l] * hid(0, l);
    }
    if (params.kind() == ModelKind::gbm) {
      const auto vv = params.tensor_values("w_vv");
      std::size_t idx = 0;
      for (std::size_t a = 0; a < v_size; ++a) {
        for (std::size_t b = a + 1; b < v_size; ++b) e -= vis(a) * vis(b) * vv[idx++];
      }
    }
  }
  for (std::size_t m = 0; m + 1 < d.hidden.size(); ++m) {
    const auto w = params.tensor_values("w_hh" + std::to_string(m + 1));
    for (std::size_t l = 0; l < d.hidden[m]; ++l) {
      for (std::size_t j = 0; j < d.hidden[m + 1]; ++j) {
        e -= hid(m, l) * w[l * d.hidden[m + 1] + j] * hid(m + 1, j);
      }
    }
  }
  return e;
}

double naive_log_partition(const Params& params) {
  const ModelDims& d = params.dims();
  const std::size_t o = d.objects;
  const std::size_t v_size = o + (d.relation_types + d.affordance_types) * o * o;
  // Free visible slots: everything except j == k triples.
  std::vector<std::size_t> free_visible;
  for (std::size_t v = 0; v < v_size; ++v) {
    if (v < o) {
      free_visible.push_back(v);
      continue;
    }
    const std::size_t pair = (v - o) % (o * o);
    if (pair / o != pair % o) free_visible.push_back(v);
  }
  std::size_t hidden_total = 0;
  for (auto h : d.hidden) hidden_total += h;
  const std::size_t n = free_visible.size() + hidden_total;
  if (n > 24) fail(ErrorKind::usage, "naive enumeration is limited to 24 units");

  ModelState s;
  s.visible.assign(v_size, 0);
  for (auto h : d.hidden) s.hidden.emplace_back(h, 0);
  std::vector<double> neg_energy;
  neg_energy.reserve(std::size_t{1} << n);
  for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
    std::size_t bit = 0;
    for (auto v : free_visible) s.visible[v] = (code >> bit++) & 1u;
    for (auto& layer : s.hidden) {
      for (auto& x : layer) x = (code >> bit++) & 1u;
    }
    neg_energy.push_back(-naive_energy(params, s));
  }
  double mx = neg_energy.front();
  for (double x : neg_energy) mx = std::max(mx, x);
  double sum = 0.0;
  for (double x : neg_energy) sum += std::exp(x - mx);
  return mx + std::log(sum);
}

double max_conditional_error(const Model& model) {
  const ExactDistribution dist(model);
  double worst = 0.0;
  for (std::size_t code = 0; code < dist.state_count(); ++code) {
    const ModelState s = dist.state(code);
    for (std::size_t b = 0; b < dist.units().size(); ++b) {
      const double exact = dist.conditional(code, b);
      worst = std::max(worst, std::abs(model.conditional(s, dist.units()[b]) - exact));
    }
  }
  return worst;
}

GibbsAgreement gibbs_oracle_agreement(const Model& model, std::size_t sweeps,
                                      std::size_t burn_in, std::uint64_t seed) {
  if (sweeps == 0) fail(ErrorKind::usage, "sweeps must be positive");
  const ExactDistribution dist(model);
  const auto exact = dist.marginals();
  const auto exact_edges = exact_edge_expectations(model);
  ModelState state = model.make_state();
  Rng rng = make_rng(seed, {0x61bb5});
  const auto schedule = AnnealSchedule::constant();
  if (burn_in > 0) relax(model, state, burn_in, schedule, rng);
  std::vector<double> on(dist.units().size(), 0.0);
  EdgeStatistics edges(model.params());
  for (std::size_t s = 0; s < sweeps; ++s) {
    relax(model, state, 1, schedule, rng);
    for (std::size_t b = 0; b < on.size(); ++b) {
      const auto& u = dist.units()[b];
      on[b] += u.is_hidden ? state.hidden[u.layer][u.index] : state.visible[u.index];
    }
    model.accumulate(state.visible, to_values(state.hidden), 1.0, edges.sums);
  }
  GibbsAgreement out;
  const double n = static_cast<double>(sweeps);
  for (std::size_t b = 0; b < on.size(); ++b) {
    out.max_l1 = std::max(out.max_l1, 2.0 * std::abs(on[b] / n - exact[b]));
  }
  for (std::size_t i = 0; i < edges.sums.size(); ++i) {
    out.max_edge_error = std::max(out.max_edge_error, std::abs(edges.sums[i] / n - exact_edges.sums[i]));
  }
  return out;
}

double max_gradient_error(const Model& model, const std::vector<SceneVector>& data,
                          double epsilon) {
  const auto plus = exact_data_expectations(model, data);
  const auto minus = exact_edge_expectations(model);
  double worst = 0.0;
  for (std::size_t c = 0; c < model.params().size(); ++c) {
    auto up = model.clone();
    auto down = model.clone();
    up->params().values()[c] += epsilon;
    down->params().values()[c] -= epsilon;
    const double fd =
        (exact_kl_divergence(*up, data) - exact_kl_divergence(*down, data)) / (2.0 * epsilon);
    const double direction = plus.sums[c] - minus.sums[c];
    worst = std::max(worst, std::abs(direction - (-fd)));
  }
  return worst;
}

std::vector<double> exact_descent_kl(const Model& model, const std::vector<SceneVector>& data,
                                     std::size_t steps, double alpha) {
  auto m = model.clone();
  std::vector<double> kl = {exact_kl_divergence(*m, data)};
  for (std::size_t s = 0; s < steps; ++s) {
    const auto plus = exact_data_expectations(*m, data);
    const auto minus = exact_edge_expectations(*m);
    update_weights(m->params(), plus, minus, alpha);
    kl.push_back(exact_kl_divergence(*m, data));
  }
  return kl;
}

std::vector<SceneVector> random_scene_vectors(const Layout& layout, std::size_t n,
                                              std::uint64_t seed) {
  std::vector<SceneVector> out;
  Rng rng = make_rng(seed, {0xda7a});
  for (std::size_t i = 0; i < n; ++i) {
    SceneVector v;
    v.bits.assign(layout.visible_size(), 0);
    for (std::size_t j = 0; j < layout.objects(); ++j) v.bits[j] = bernoulli(rng, 0.5);
    for (std::size_t s = layout.relation_offset(); s < layout.visible_size(); ++s) {
      if (layout.structural_zero(s)) continue;
      const auto slot = layout.slot(s);
      if (v.bits[slot.subject] && v.bits[slot.object]) v.bits[s] = bernoulli(rng, 0.5);
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << x;
  return s.str();
}

}  // namespace

std::vector<PropertyResult> run_verification_suite(std::uint64_t seed) {
  std::vector<PropertyResult> out;
  auto check = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  const ModelKind kinds[] = {ModelKind::cosmo, ModelKind::gbm, ModelKind::rbm};

  {
    auto zero = make_tiny_model(ModelKind::cosmo, seed, 0.0);
    const double n = static_cast<double>(ExactDistribution(*zero).units().size());
    const double err = std::abs(exact_log_partition(*zero) - n * std::log(2.0));
    check("zero-weight partition equals 2^n", err < 1e-12, "|log Z - n log 2| = " + fmt(err));
  }
  {
    Params p(ModelKind::rbm, ModelDims{1, 0, 0, {1}});
    const double w = 0.7;
    p.values()[0] = w;
    const auto m = make_model(std::move(p));
    const double err = std::abs(exact_partition(*m) - (3.0 + std::exp(w)));
    check("single-edge partition equals 3 + e^w", err < 1e-12, "|Z - (3 + e^w)| = " + fmt(err));
  }
  for (auto kind : kinds) {
    const std::string k(to_string(kind));
    const auto m = make_tiny_model(kind, seed + 1);
    const double a = exact_log_partition(*m), b = naive_log_partition(m->params());
    const double rel = std::abs(a - b) / std::max(1.0, std::abs(b));
    check(k + ": Gray-code and naive enumerators agree", rel < 1e-12, "relative diff " + fmt(rel));

    const ExactDistribution dist(*m);
    double total = 0.0;
    for (double p : dist.probabilities()) total += p;
    check(k + ": probabilities sum to one", std::abs(total - 1.0) < 1e-10,
          "|sum - 1| = " + fmt(std::abs(total - 1.0)));

    double worst = 0.0;
    for (std::uint64_t t = 0; t < 3; ++t) {
      worst = std::max(worst, max_conditional_error(*make_tiny_model(kind, seed + 10 + t)));
    }
    check(k + ": conditionals equal Bayes quotients", worst < 1e-10, "max error " + fmt(worst));

    const auto marg = dist.marginals();
    double mworst = 0.0;
    for (std::size_t b = 0; b < marg.size(); ++b) {
      mworst = std::max(mworst, std::abs(marg[b] - dist.marginal(b)));
    }
    check(k + ": marginal consistency", mworst < 1e-12, "max diff " + fmt(mworst));

    const auto data = random_scene_vectors(m->layout(), 4, seed + 2);
    const double g = max_gradient_error(*m, data);
    check(k + ": update direction matches finite-difference gradient", g < 1e-5,
          "max error " + fmt(g));
  }
  {
    const auto zero = make_tiny_model(ModelKind::cosmo, seed, 0.0);
    const auto e = exact_edge_expectations(*zero);
    const auto& p = zero->params();
    const auto hv = p.tensor("w_hv");
    const auto wr = p.tensor("w_r");
    double err = 0.0;
    for (std::size_t i = 0; i < hv.size; ++i) err = std::max(err, std::abs(e.sums[hv.offset + i] - 0.25));
    for (std::size_t i = 0; i < wr.size; ++i) {
      const std::size_t j = (i % 4) / 2, k = i % 2;
      err = std::max(err, std::abs(e.sums[wr.offset + i] - (j == k ? 0.0 : 0.125)));
    }
    check("zero-weight edge expectations are 1/4 and 1/8", err < 1e-12, "max diff " + fmt(err));
  }
  {
    const auto m = make_tiny_model(ModelKind::cosmo, seed + 3);
    const auto g = gibbs_oracle_agreement(*m, 20000, 500, seed);
    check("Gibbs marginals approach exact marginals", g.max_l1 < 0.05,
          "max L1 " + fmt(g.max_l1) + " after 2e4 sweeps");
  }
  {
    const auto m = make_tiny_model(ModelKind::cosmo, seed + 4);
    const auto data = random_scene_vectors(m->layout(), 4, seed + 5);
    const auto kl = exact_descent_kl(*m, data, 50, 1e-3);
    bool ok = true;
    for (std::size_t s = 1; s < kl.size(); ++s) ok = ok && kl[s] <= kl[s - 1] + 1e-12;
    check("exact-statistics updates do not increase KL", ok,
          "KL " + fmt(kl.front()) + " -> " + fmt(kl.back()) + " over 50 steps");
  }
  return out;
}

}  // namespace cosmo
