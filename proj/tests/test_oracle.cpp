#include <gtest/gtest.h>

#include <cmath>

#include "cosmo/error.hpp"
#include "cosmo/oracle.hpp"
#include "cosmo/verification.hpp"
#include "support/fixtures.hpp"

namespace cosmo {
namespace {

TEST(Partition, ZeroWeightsIsTwoToTheN) {
  const auto m = testing::zero_model(ModelKind::cosmo, ModelDims{2, 1, 1, {2}});
  const ExactDistribution d(*m);
  EXPECT_EQ(d.units().size(), 8u);
  EXPECT_NEAR(exact_partition(*m), 256.0, 1e-9);
  for (double p : d.probabilities()) EXPECT_NEAR(p, 1.0 / 256.0, 1e-15);
}

TEST(Partition, SingleEdge) {
  for (double w : {-2.0, 0.0, 0.7, 5.0}) {
    Params p(ModelKind::rbm, ModelDims{1, 0, 0, {1}});
    p.values()[0] = w;
    EXPECT_NEAR(exact_partition(*make_model(std::move(p))), 3.0 + std::exp(w), 1e-12);
  }
}

TEST(Partition, AgreesWithNaiveEnumerator) {
  for (auto kind : {ModelKind::cosmo, ModelKind::gbm, ModelKind::rbm}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto m = make_tiny_model(kind, seed, 2.0);
      const double a = exact_log_partition(*m), b = naive_log_partition(m->params());
      EXPECT_LT(std::abs(a - b) / std::abs(b), 1e-12);
    }
  }
}

TEST(Partition, BoundIsEnforced) {
  const auto m = testing::zero_model(ModelKind::cosmo, ModelDims{3, 1, 1, {2}});
  EXPECT_THROW(exact_partition(*m), Error);
  EXPECT_NO_THROW(exact_partition(*m, TinyModelBound{24}));
  const auto big = testing::zero_model(ModelKind::cosmo, ModelDims{4, 1, 1, {2}});
  EXPECT_THROW(exact_partition(*big, TinyModelBound{1000}), Error);
}

TEST(Distribution, SumsToOneAndModeIsBothOn) {
  Params p(ModelKind::rbm, ModelDims{1, 0, 0, {1}});
  p.values()[0] = 20.0;
  const auto m = make_model(std::move(p));
  const ExactDistribution d(*m);
  double total = 0.0;
  std::size_t mode = 0;
  for (std::size_t c = 0; c < d.state_count(); ++c) {
    total += d.probability(c);
    if (d.probability(c) > d.probability(mode)) mode = c;
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_EQ(mode, 3u);
}

TEST(Distribution, MarginalsConsistent) {
  const auto m = make_tiny_model(ModelKind::cosmo, 5);
  const ExactDistribution d(*m);
  const auto all = d.marginals();
  for (std::size_t b = 0; b < all.size(); ++b) EXPECT_NEAR(all[b], d.marginal(b), 1e-14);
}

TEST(Distribution, ClampRestrictsStateSpace) {
  const auto m = make_tiny_model(ModelKind::cosmo, 5);
  ModelState t = m->make_state();
  t.visible[0] = 1;
  t.visible_clamp[0] = 1;
  const ExactDistribution d(*m, &t);
  EXPECT_EQ(d.units().size(), 7u);
  EXPECT_EQ(d.free_index(UnitRef::visible(0)), ExactDistribution::npos);
  for (std::size_t c = 0; c < d.state_count(); ++c) EXPECT_EQ(d.state(c).visible[0], 1);
}

TEST(EdgeExpectations, ZeroWeights) {
  const auto m = testing::zero_model(ModelKind::cosmo, ModelDims{2, 1, 1, {2}});
  const auto e = exact_edge_expectations(*m);
  const auto hv = m->params().tensor("w_hv");
  for (std::size_t i = 0; i < hv.size; ++i) EXPECT_NEAR(e.sums[hv.offset + i], 0.25, 1e-14);
  const auto wr = m->params().tensor("w_r");
  EXPECT_NEAR(e.sums[wr.offset + 1], 0.125, 1e-14);
  EXPECT_NEAR(e.sums[wr.offset + 0], 0.0, 1e-14);
}

TEST(EdgeExpectations, FullyClampedNoHiddenIsProduct) {
  const auto m = testing::zero_model(ModelKind::cosmo, ModelDims{2, 1, 0, {}});
  SceneVector v;
  v.bits.assign(m->layout().visible_size(), 0);
  v.bits[0] = v.bits[1] = 1;
  v.bits[m->layout().relation(0, 1, 0)] = 1;
  const auto e = exact_edge_expectations(*m, &v);
  const auto wr = m->params().tensor("w_r");
  EXPECT_EQ(e.sums[wr.offset + 2], 1.0);
  EXPECT_EQ(e.sums[wr.offset + 1], 0.0);
}

TEST(EdgeExpectations, LongRunGibbsConverges) {
  const auto m = make_tiny_model(ModelKind::cosmo, 23);
  const auto g = gibbs_oracle_agreement(*m, 100000, 1000, 7);
  EXPECT_LT(g.max_edge_error, 0.02);
}

TEST(Gibbs, KlShrinksWithSweeps) {
  const auto m = make_tiny_model(ModelKind::cosmo, 29);
  double prev = 1e9;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const auto g = gibbs_oracle_agreement(*m, n, 200, 3);
    EXPECT_LE(g.max_l1, prev + 0.01);
    prev = g.max_l1;
  }
}

TEST(VerificationSuite, AllPropertiesPass) {
  for (const auto& r : run_verification_suite(1)) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
}

}  // namespace
}  // namespace cosmo
