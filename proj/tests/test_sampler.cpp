#include <gtest/gtest.h>

#include <cmath>

#include "cosmo/error.hpp"
#include "cosmo/oracle.hpp"
#include "cosmo/sampler.hpp"
#include "cosmo/verification.hpp"
#include "support/fixtures.hpp"

namespace cosmo {
namespace {

/// One-visible RBM whose only visible unit has net input `net` when h = 1.
std::unique_ptr<Model> single_net(double net) {
  Params p(ModelKind::rbm, ModelDims{1, 0, 0, {1}});
  p.values()[0] = net;
  return make_model(std::move(p));
}

double frequency(double net, double temperature) {
  const auto m = single_net(net);
  ModelState s = m->make_state();
  s.hidden[0][0] = 1;
  Rng rng = make_rng(42);
  double on = 0;
  for (int i = 0; i < 10000; ++i) on += sample_unit(*m, s, UnitRef::visible(0), temperature, rng);
  return on / 10000.0;
}

TEST(SampleUnit, Frequencies) {
  EXPECT_NEAR(frequency(0.0, 1.0), 0.5, 0.01);
  EXPECT_NEAR(frequency(0.0, 7.0), 0.5, 0.01);
  EXPECT_NEAR(frequency(2.0, 1.0), 1.0 / (1.0 + std::exp(-2.0)), 0.01);
  EXPECT_NEAR(frequency(2.0, 1e6), 0.5, 0.01);
}

TEST(SampleUnit, Errors) {
  const auto m = single_net(1.0);
  ModelState s = m->make_state();
  Rng rng = make_rng(1);
  EXPECT_THROW(sample_unit(*m, s, UnitRef::visible(0), 0.0, rng), Error);
  s.visible_clamp[0] = 1;
  EXPECT_THROW(sample_unit(*m, s, UnitRef::visible(0), 1.0, rng), Error);
}

TEST(Relax, AllClampedIsUnchanged) {
  const auto m = make_tiny_model(ModelKind::cosmo, 2);
  ModelState s = m->make_state();
  s.visible[0] = 1;
  s.hidden[0][1] = 1;
  s.clamp_all_visible();
  for (auto& layer : s.hidden_clamp) std::fill(layer.begin(), layer.end(), 1);
  const ModelState before = s;
  Rng rng = make_rng(3);
  const auto stats = relax(*m, s, 17, AnnealSchedule(ScheduleKind::emc, 4.0, 0.9), rng);
  EXPECT_EQ(s, before);
  EXPECT_EQ(stats.sweeps, 17u);
  EXPECT_NEAR(stats.final_temperature, 4.0 * std::pow(0.9, 16), 1e-12);
}

TEST(Relax, ClampedCoordinatesNeverMove) {
  const auto m = make_tiny_model(ModelKind::cosmo, 4, 2.0);
  Rng rng = make_rng(8);
  for (int t = 0; t < 50; ++t) {
    ModelState s = m->make_state();
    for (std::size_t v = 0; v < s.visible.size(); ++v) {
      if (m->layout().structural_zero(v)) continue;
      s.visible[v] = bernoulli(rng, 0.5);
      s.visible_clamp[v] = bernoulli(rng, 0.5);
    }
    const ModelState before = s;
    relax(*m, s, 5, AnnealSchedule::constant(), rng);
    for (std::size_t v = 0; v < s.visible.size(); ++v) {
      if (before.visible_clamp[v]) {
        EXPECT_EQ(s.visible[v], before.visible[v]);
      }
      if (m->layout().structural_zero(v)) {
        EXPECT_EQ(s.visible[v], 0);
      }
    }
  }
}

TEST(Relax, ZeroWeightsGiveHalf) {
  const auto m = testing::zero_model(ModelKind::cosmo, ModelDims{2, 1, 1, {2}});
  ModelState s = m->make_state();
  Rng rng = make_rng(5);
  std::vector<double> on(s.visible.size(), 0.0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    relax(*m, s, 1, AnnealSchedule::constant(), rng);
    for (std::size_t v = 0; v < on.size(); ++v) on[v] += s.visible[v];
  }
  for (std::size_t v = 0; v < on.size(); ++v) {
    EXPECT_NEAR(on[v] / n, m->layout().structural_zero(v) ? 0.0 : 0.5, 0.02);
  }
}

TEST(Relax, Deterministic) {
  const auto m = make_tiny_model(ModelKind::cosmo, 6);
  ModelState a = m->make_state(), b = m->make_state();
  Rng ra = make_rng(11), rb = make_rng(11);
  relax(*m, a, 30, AnnealSchedule::constant(), ra);
  relax(*m, b, 30, AnnealSchedule::constant(), rb);
  EXPECT_EQ(a, b);
}

TEST(Relax, ClampedObjectsMatchExactConditional) {
  const auto m = make_tiny_model(ModelKind::cosmo, 13);
  ModelState tmpl = m->make_state();
  tmpl.visible[0] = tmpl.visible[1] = 1;
  tmpl.visible_clamp[0] = tmpl.visible_clamp[1] = 1;
  const ExactDistribution exact(*m, &tmpl);
  std::vector<double> counts(exact.state_count(), 0.0);
  ModelState s = tmpl;
  Rng rng = make_rng(19);
  relax(*m, s, 500, AnnealSchedule::constant(), rng);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    relax(*m, s, 1, AnnealSchedule::constant(), rng);
    std::size_t code = 0;
    for (std::size_t b = 0; b < exact.units().size(); ++b) {
      const auto& u = exact.units()[b];
      code |= static_cast<std::size_t>(u.is_hidden ? s.hidden[u.layer][u.index] : s.visible[u.index]) << b;
    }
    counts[code] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) tv += std::abs(counts[c] / n - exact.probability(c));
  EXPECT_LT(0.5 * tv, 0.05);
}

TEST(Relax, VisibleProbabilitySumCountsSweeps) {
  const auto m = testing::zero_model(ModelKind::cosmo, ModelDims{2, 1, 1, {2}});
  ModelState s = m->make_state();
  std::vector<double> sums(s.visible.size(), 0.0);
  RelaxOptions o;
  o.visible_probability_sum = &sums;
  Rng rng = make_rng(1);
  relax(*m, s, 4, AnnealSchedule::constant(), rng, o);
  for (std::size_t v = 0; v < sums.size(); ++v) {
    EXPECT_EQ(sums[v], m->layout().structural_zero(v) ? 0.0 : 2.0);
  }
}

}  // namespace
}  // namespace cosmo
