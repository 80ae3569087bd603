#include <gtest/gtest.h>

#include <cmath>

#include "cosmo/error.hpp"
#include "cosmo/model.hpp"
#include "cosmo/verification.hpp"
#include "support/fixtures.hpp"

namespace cosmo {
namespace {

ModelState random_state(const Model& m, Rng& rng) {
  ModelState s = m.make_state();
  for (std::size_t v = 0; v < s.visible.size(); ++v) {
    if (!m.layout().structural_zero(v)) s.visible[v] = bernoulli(rng, 0.5);
  }
  for (auto& layer : s.hidden) {
    for (auto& h : layer) h = bernoulli(rng, 0.5);
  }
  return s;
}

TEST(Params, TensorLayout) {
  const Params p(ModelKind::cosmo, ModelDims{3, 2, 1, {4, 2}});
  EXPECT_EQ(p.tensor("w_hv").shape, (std::vector<std::size_t>{4, 3}));
  EXPECT_EQ(p.tensor("w_r").shape, (std::vector<std::size_t>{2, 3, 3}));
  EXPECT_EQ(p.tensor("w_rh").shape, (std::vector<std::size_t>{2, 4}));
  EXPECT_EQ(p.tensor("w_hh1").shape, (std::vector<std::size_t>{4, 2}));
  EXPECT_EQ(p.size(), 12u + 18u + 8u + 9u + 4u + 8u);
  EXPECT_THROW(p.tensor("w_vv"), Error);
}

TEST(Params, RandomizeKeepsStructuralZeros) {
  Params p(ModelKind::cosmo, ModelDims{3, 1, 1, {2}});
  Rng rng = make_rng(1);
  p.randomize(rng, 1.0);
  const auto wr = p.tensor_values("w_r");
  const auto wa = p.tensor_values("w_a");
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(wr[j * 3 + j], 0.0);
    EXPECT_EQ(wa[j * 3 + j], 0.0);
  }
  EXPECT_TRUE(p.all_finite());
}

TEST(Params, KindNames) {
  EXPECT_EQ(parse_model_kind("gbm"), ModelKind::gbm);
  EXPECT_EQ(to_string(ModelKind::cosmo), "cosmo");
  EXPECT_THROW(parse_model_kind("rn"), Error);
}

TEST(CosmoEnergy, ZeroStateIsZero) {
  const auto m = make_tiny_model(ModelKind::cosmo, 3);
  EXPECT_EQ(m->energy(m->make_state()), 0.0);
}

TEST(CosmoEnergy, SingleTriTerm) {
  Params p(ModelKind::cosmo, ModelDims{2, 1, 0, {}});
  p.tensor_values("w_r")[0 * 4 + 0 * 2 + 1] = 0.5;
  const auto m = make_model(std::move(p));
  ModelState s = m->make_state();
  s.visible[0] = s.visible[1] = 1;
  s.visible[m->layout().relation(0, 0, 1)] = 1;
  EXPECT_DOUBLE_EQ(m->energy(s), -0.5);
}

TEST(CosmoEnergy, MatchesNaiveLoopsAllKinds) {
  Rng rng = make_rng(21);
  for (auto kind : {ModelKind::cosmo, ModelKind::gbm, ModelKind::rbm}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Params p(kind, ModelDims{3, 1, 1, {3, 2}});
      Rng init = make_rng(seed);
      p.randomize(init, 1.0);
      const auto m = make_model(p);
      for (int t = 0; t < 20; ++t) {
        const auto s = random_state(*m, rng);
        EXPECT_NEAR(m->energy(s), naive_energy(p, s), 1e-12);
      }
    }
  }
}

TEST(Conditional, ZeroWeightsGiveHalf) {
  const auto m = testing::zero_model(ModelKind::cosmo, ModelDims{3, 1, 1, {2}});
  Rng rng = make_rng(5);
  const auto s = random_state(*m, rng);
  for (auto v : m->object_units()) EXPECT_EQ(m->conditional(s, UnitRef::visible(v)), 0.5);
  for (auto v : m->relation_units()) EXPECT_EQ(m->conditional(s, UnitRef::visible(v)), 0.5);
  EXPECT_EQ(m->conditional(s, UnitRef::hidden(0, 1)), 0.5);
}

TEST(Conditional, HiddenNetLogThree) {
  Params p(ModelKind::cosmo, ModelDims{1, 0, 0, {1}});
  p.tensor_values("w_hv")[0] = std::log(3.0);
  const auto m = make_model(std::move(p));
  ModelState s = m->make_state();
  s.visible[0] = 1;
  EXPECT_NEAR(m->conditional(s, UnitRef::hidden(0, 0)), 0.75, 1e-15);
}

TEST(Conditional, InvalidReferences) {
  const auto m = make_tiny_model(ModelKind::cosmo, 1);
  const auto s = m->make_state();
  EXPECT_THROW(m->net_input(s, UnitRef::visible(m->layout().relation(0, 1, 1))), Error);
  EXPECT_THROW(m->net_input(s, UnitRef::visible(999)), Error);
  EXPECT_THROW(m->net_input(s, UnitRef::hidden(1, 0)), Error);
  ModelState bad = s;
  bad.visible.pop_back();
  EXPECT_THROW(m->energy(bad), Error);
}

TEST(Conditional, MatchOracleExhaustively) {
  for (auto kind : {ModelKind::cosmo, ModelKind::gbm, ModelKind::rbm}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      EXPECT_LT(max_conditional_error(*make_tiny_model(kind, seed)),
                1e-10);
    }
  }
}

TEST(Conditional, SigmoidSymmetryAndRange) {
  for (double x : {-800.0, -30.0, -1.0, 0.0, 0.3, 40.0, 800.0}) {
    EXPECT_NEAR(sigmoid(x) + sigmoid(-x), 1.0, 1e-15);
    EXPECT_GE(sigmoid(x), 0.0);
    EXPECT_LE(sigmoid(x), 1.0);
  }
  const auto m = make_tiny_model(ModelKind::cosmo, 8, 3.0);
  Rng rng = make_rng(8);
  const auto s = random_state(*m, rng);
  for (auto v : m->relation_units()) {
    const double p = m->conditional(s, UnitRef::visible(v));
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(Energy, FlipIdentity) {
  Rng rng = make_rng(31);
  for (auto kind : {ModelKind::cosmo, ModelKind::gbm, ModelKind::rbm}) {
    Params p(kind, ModelDims{3, 1, 1, {3, 2}});
    Rng init = make_rng(4);
    p.randomize(init, 1.0);
    const auto m = make_model(p);
    for (int t = 0; t < 10; ++t) {
      auto s = random_state(*m, rng);
      std::vector<UnitRef> units;
      for (std::size_t v = 0; v < s.visible.size(); ++v) {
        if (!m->layout().structural_zero(v)) units.push_back(UnitRef::visible(v));
      }
      for (std::size_t layer = 0; layer < 2; ++layer) {
        for (std::size_t l = 0; l < p.dims().hidden[layer]; ++l) units.push_back(UnitRef::hidden(layer, l));
      }
      for (const auto& u : units) {
        auto& bit = u.is_hidden ? s.hidden[u.layer][u.index] : s.visible[u.index];
        const double net = m->net_input(s, u);
        const std::uint8_t old = bit;
        const double before = m->energy(s);
        bit = 1 - old;
        const double after = m->energy(s);
        EXPECT_NEAR(after - before, -(2.0 * bit - 1.0) * net, 1e-10);
        bit = old;
      }
    }
  }
}

TEST(Energy, HiddenPermutationSymmetry) {
  Params p(ModelKind::cosmo, ModelDims{2, 1, 1, {3}});
  Rng init = make_rng(6);
  p.randomize(init, 1.0);
  // Relabel hidden units by the cycle 0 -> 1 -> 2 -> 0.
  const std::size_t perm[3] = {1, 2, 0};
  Params q = p;
  const std::size_t o = 2, h = 3;
  for (std::size_t l = 0; l < h; ++l) {
    for (std::size_t j = 0; j < o; ++j) q.tensor_values("w_hv")[perm[l] * o + j] = p.tensor_values("w_hv")[l * o + j];
    q.tensor_values("w_rh")[perm[l]] = p.tensor_values("w_rh")[l];
    q.tensor_values("w_ah")[perm[l]] = p.tensor_values("w_ah")[l];
  }
  const auto a = make_model(p);
  const auto b = make_model(q);
  Rng rng = make_rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_state(*a, rng);
    ModelState r = s;
    for (std::size_t l = 0; l < h; ++l) r.hidden[0][perm[l]] = s.hidden[0][l];
    EXPECT_NEAR(a->energy(s), b->energy(r), 1e-12);
  }
}

}  // namespace
}  // namespace cosmo
