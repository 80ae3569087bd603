#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cosmo/error.hpp"
#include "cosmo/training.hpp"
#include "cosmo/verification.hpp"
#include "support/fixtures.hpp"

namespace cosmo {
namespace {

const ModelDims kDesk{12, 2, 2, {8}};

DatasetSplit two_context_split() {
  auto spec = planted_desk_spec();
  spec.contexts.resize(2);
  return split_dataset(synthesize_dataset(spec, 300, 11), SplitRatios{}, 2);
}

TEST(PositivePhase, ZeroModelEmptyScene) {
  const auto m = testing::zero_model(ModelKind::cosmo, kDesk);
  HiddenValues h;
  const SceneVector empty{std::vector<std::uint8_t>(m->layout().visible_size(), 0)};
  const auto stats = positive_phase(*m, empty, &h);
  for (double p : h[0]) EXPECT_EQ(p, 0.5);
  for (double s : stats.sums) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(stats.count, 1.0);
}

TEST(PositivePhase, OneObjectGivesHalfOnItsColumn) {
  const auto m = testing::zero_model(ModelKind::cosmo, kDesk);
  SceneVector v{std::vector<std::uint8_t>(m->layout().visible_size(), 0)};
  v.bits[3] = 1;
  const auto stats = positive_phase(*m, v);
  const auto& t = m->params().tensor("w_hv");
  for (std::size_t l = 0; l < 8; ++l) {
    for (std::size_t j = 0; j < 12; ++j) {
      EXPECT_EQ(stats.sums[t.offset + l * 12 + j], j == 3 ? 0.5 : 0.0);
    }
  }
}

TEST(NegativePhase, ZeroModelEdgeMeans) {
  const auto m = testing::zero_model(ModelKind::cosmo, kDesk);
  Rng rng = make_rng(4);
  const HiddenValues h0 = {std::vector<double>(8, 0.5)};
  EdgeStatistics acc(m->params());
  for (int i = 0; i < 4000; ++i) acc.merge(negative_statistics(*m, negative_phase(*m, h0, 1, 1.0, rng)));
  const auto mean = acc.mean();
  const auto& t = m->params().tensor("w_hv");
  double sum = 0.0;
  for (std::size_t e = 0; e < t.size; ++e) sum += mean[t.offset + e];
  EXPECT_NEAR(sum / static_cast<double>(t.size), 0.25, 0.01);
}

TEST(NegativePhase, Deterministic) {
  const auto m = make_tiny_model(ModelKind::cosmo, 3);
  const HiddenValues h0 = {{0.3, 0.8}};
  Rng a = make_rng(9), b = make_rng(9);
  const auto x = negative_phase(*m, h0, 3, 1.0, a);
  const auto y = negative_phase(*m, h0, 3, 1.0, b);
  EXPECT_EQ(x.state, y.state);
  EXPECT_EQ(x.reconstruction, y.reconstruction);
}

TEST(UpdateWeights, Examples) {
  Params p(ModelKind::rbm, ModelDims{2, 1, 1, {2}});
  EdgeStatistics plus(p), minus(p);
  plus.count = minus.count = 2.0;
  plus.sums[0] = 2.0;
  minus.sums[1] = 1.0;
  update_weights(p, plus, minus, 0.1);
  EXPECT_DOUBLE_EQ(p.values()[0], 0.1);
  EXPECT_DOUBLE_EQ(p.values()[1], -0.05);
  EXPECT_EQ(p.values()[2], 0.0);

  const Params before = p;
  update_weights(p, plus, minus, 0.0);
  EXPECT_EQ(p, before);
  plus.sums[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(update_weights(p, plus, minus, 0.1), Error);
  EXPECT_EQ(p, before);
}

TEST(UpdateWeights, KeepsStructuralZeros) {
  Params p(ModelKind::cosmo, ModelDims{2, 1, 1, {2}});
  EdgeStatistics plus(p), minus(p);
  plus.count = minus.count = 1.0;
  for (auto& s : plus.sums) s = 1.0;
  update_weights(p, plus, minus, 0.5);
  const auto w = p.tensor_values("w_r");
  EXPECT_EQ(w[0], 0.0);
  EXPECT_EQ(w[3], 0.0);
  EXPECT_EQ(w[1], 0.5);
}

TEST(ExactDescent, KlIsNonIncreasing) {
  for (auto kind : {ModelKind::cosmo, ModelKind::gbm, ModelKind::rbm}) {
    const auto m = make_tiny_model(kind, 21, 0.5);
    const auto data = random_scene_vectors(m->layout(), 6, 5);
    const auto kl = exact_descent_kl(*m, data, 50, 1e-3);
    ASSERT_EQ(kl.size(), 51u);
    for (std::size_t i = 1; i < kl.size(); ++i) EXPECT_LE(kl[i], kl[i - 1] + 1e-12);
  }
}

TEST(Train, ReducesReconstructionError) {
  TrainConfig c;
  c.hidden = {8};
  c.epochs = 10;
  c.patience = 0;
  const auto r = train(two_context_split(), planted_desk_spec().vocabulary, c);
  ASSERT_EQ(r.curves.size(), 10u);
  EXPECT_LT(r.curves.back().train.total(), r.curves.front().train.total());
  EXPECT_TRUE(r.curves.back().validation.has_value());
  EXPECT_TRUE(r.params.all_finite());
}

TEST(Train, DeterministicInSeed) {
  TrainConfig c;
  c.hidden = {4};
  c.epochs = 3;
  const auto split = two_context_split();
  const auto& v = planted_desk_spec().vocabulary;
  const auto a = train(split, v, c);
  const auto b = train(split, v, c);
  EXPECT_EQ(a.params, b.params);
  c.seed = 2;
  EXPECT_FALSE(train(split, v, c).params == a.params);
}

TEST(Train, ZeroRateLeavesInitialWeights) {
  TrainConfig c;
  c.hidden = {4};
  c.epochs = 3;
  c.patience = 0;
  c.learning_rate = 0.0;
  const auto split = two_context_split();
  const auto& v = planted_desk_spec().vocabulary;
  Params init(ModelKind::cosmo, ModelDims{12, 2, 2, {4}});
  Rng rng = make_rng(1);
  init.randomize(rng, 0.01);
  const auto r = train(split, v, c, &init);
  EXPECT_EQ(r.params, init);
  for (const auto& e : r.curves) {
    EXPECT_NEAR(e.train.total(), r.curves.front().train.total(), 0.5);
  }
}

TEST(Train, Errors) {
  TrainConfig c;
  DatasetSplit empty;
  EXPECT_THROW(train(empty, planted_desk_spec().vocabulary, c), Error);
  c.epochs = 0;
  EXPECT_THROW(c.validate(), Error);
  c.epochs = 1;
  c.gibbs_steps = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(ReconstructionError, ZeroModelIsQuarterPerUnit) {
  const auto m = testing::zero_model(ModelKind::cosmo, kDesk);
  const auto scenes = encode_all(testing::desk_split().test, testing::desk_dataset().vocabulary);
  const auto e = reconstruction_error(*m, scenes, 1, 1.0, 3);
  const auto& l = m->layout();
  EXPECT_DOUBLE_EQ(e.object, 0.25 * 12);
  EXPECT_DOUBLE_EQ(e.relation, 0.25 * 2 * 12 * 11);
  EXPECT_DOUBLE_EQ(e.total(), 0.25 * static_cast<double>(l.unit_count()));
  EXPECT_THROW(reconstruction_error(*m, {}, 1, 1.0, 3), Error);
}

TEST(SquaredError, Algebra) {
  const Layout l(2, 1, 1);
  SceneVector v{std::vector<std::uint8_t>(l.visible_size(), 0)};
  v.bits[0] = 1;
  std::vector<double> p(l.visible_size(), 0.0);
  p[0] = 0.25;
  p[l.relation(0, 0, 1)] = 0.5;
  const auto e = squared_error(l, v, p);
  EXPECT_DOUBLE_EQ(e.object, 0.5625);
  EXPECT_DOUBLE_EQ(e.relation, 0.25);
  EXPECT_DOUBLE_EQ(e.affordance, 0.0);
}

TEST(Pretrain, NeedsTwoLayers) {
  TrainConfig c;
  c.hidden = {4};
  c.pretrain_epochs = 2;
  EXPECT_THROW(pretrain_layerwise(two_context_split(), planted_desk_spec().vocabulary, c), Error);
}

TEST(Pretrain, StartsDeepStackCloser) {
  TrainConfig c;
  c.hidden = {8, 4};
  c.epochs = 1;
  c.patience = 0;
  c.pretrain_epochs = 5;
  const auto split = two_context_split();
  const auto& v = planted_desk_spec().vocabulary;
  const auto init = pretrain_layerwise(split, v, c);
  EXPECT_EQ(init.dims().hidden, c.hidden);
  const auto warm = train(split, v, c);
  EXPECT_EQ(warm.params, train(split, v, c, &init).params);
  c.pretrain_epochs = 0;
  const auto cold = train(split, v, c);
  EXPECT_LT(warm.curves.front().train.total(), cold.curves.front().train.total());
}

TEST(Config, JsonRoundTripAndErrors) {
  TrainConfig c;
  c.model_kind = ModelKind::gbm;
  c.hidden = {8, 4};
  c.schedule = AnnealSchedule(ScheduleKind::emc, 2.0, 0.85);
  c.shared_rate_scale = 0.5;
  EXPECT_EQ(parse_train_config_json(train_config_to_json(c)), c);
  EXPECT_EQ(parse_train_config_json("{}"), TrainConfig{});
  EXPECT_THROW(parse_train_config_json(R"({"learning_rat": 0.1})"), Error);
  EXPECT_THROW(parse_train_config_json(R"({"epochs": "ten"})"), Error);
  EXPECT_THROW(parse_train_config_json("[1"), Error);
}

TEST(Curves, CsvShape) {
  std::vector<EpochErrors> curves(1);
  curves[0].epoch = 1;
  curves[0].train.object = 1.5;
  curves[0].validation = BlockErrors{};
  std::ostringstream out;
  write_curves_csv(out, curves);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "epoch,split,block,value");
  EXPECT_NE(text.find("1,train,object,1.5"), std::string::npos);
  EXPECT_NE(text.find("1,validation,"), std::string::npos);
}

}  // namespace
}  // namespace cosmo
