#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "tspg/checkpoint.hpp"
#include "tspg/training.hpp"

namespace tspg {
namespace {

TEST(RmsProp, ZeroGradientLeavesParametersAlone) {
  ParameterVector p(std::vector<double>{0.5, -1.0, 2.0});
  RmsPropState st;
  const std::vector<double> g(3, 0.0);
  for (int i = 0; i < 5; ++i) rmsprop_update(p, g, st, {});
  EXPECT_EQ(p.values()[0], 0.5);
  EXPECT_EQ(p.values()[1], -1.0);
  EXPECT_EQ(p.values()[2], 2.0);
}

TEST(RmsProp, FirstAndSecondStep) {
  ParameterVector p(1);
  RmsPropState st;
  const std::vector<double> g{1.0};
  rmsprop_update(p, g, st, {});
  // ms = 0.1, m = 0.1, so the scale is sqrt(0.09) = 0.3.
  EXPECT_NEAR(p.values()[0], -0.005 / std::sqrt(0.09 + 1e-8), 1e-12);
  EXPECT_NEAR(p.values()[0], -0.0166667, 1e-6);
  const double after_one = p.values()[0];
  rmsprop_update(p, g, st, {});
  const double step = after_one - p.values()[0];
  EXPECT_TRUE(std::isfinite(step));
  EXPECT_GT(step, 0.0);
  // Hand-computed: ms = 0.19, m = 0.19, variance 0.1539.
  const double v2 = 0.9 * (0.005 / std::sqrt(0.09 + 1e-8)) + 0.005 / std::sqrt(0.19 - 0.0361 + 1e-8);
  EXPECT_NEAR(step, v2, 1e-12);
}

TEST(RmsProp, RejectsBadGradientWithoutSideEffects) {
  ParameterVector p(std::vector<double>{1.0, 2.0});
  RmsPropState st;
  const std::vector<double> bad{0.1, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(rmsprop_update(p, bad, st, {}), std::invalid_argument);
  const std::vector<double> inf{std::numeric_limits<double>::infinity(), 0.0};
  EXPECT_THROW(rmsprop_update(p, inf, st, {}), std::invalid_argument);
  const std::vector<double> short_grad{0.1};
  EXPECT_THROW(rmsprop_update(p, short_grad, st, {}), std::invalid_argument);
  EXPECT_EQ(p.values()[0], 1.0);
  EXPECT_EQ(p.values()[1], 2.0);
  EXPECT_TRUE(st.mean_square.empty());
}

ExperienceEntry tagged(int tag) {
  ExperienceEntry e;
  e.feature_version = tag;
  return e;
}

TEST(ReplayBuffer, FifoEviction) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) buf.push(tagged(i));
  ASSERT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf[0].feature_version, 2);
  EXPECT_EQ(buf[2].feature_version, 4);
  EXPECT_THROW(ReplayBuffer(0), std::invalid_argument);
}

TEST(ReplayBuffer, DefaultCapacityHolds400) {
  ReplayBuffer buf;
  EXPECT_EQ(buf.capacity(), 400u);
  for (int i = 0; i < 1000; ++i) buf.push(tagged(i));
  EXPECT_EQ(buf.size(), 400u);
  EXPECT_EQ(buf[0].feature_version, 600);
}

TEST(ReplayBuffer, SampleIsDistinctAndBounded) {
  ReplayBuffer buf(50);
  for (int i = 0; i < 10; ++i) buf.push(tagged(i));
  Rng rng(1);
  EXPECT_EQ(buf.sample(30, rng).size(), 10u);
  for (int k = 0; k < 20; ++k) buf.push(tagged(100 + k));
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = buf.sample(25, rng);
    ASSERT_EQ(s.size(), 25u);
    std::set<const ExperienceEntry*> seen(s.begin(), s.end());
    EXPECT_EQ(seen.size(), 25u);
  }
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.game = "tictactoe";
  EXPECT_NO_THROW(c.validate());
  c.gamma = 0.99;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.gamma = 1.0;
  c.games = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.games = 10;
  c.train_tspg = false;
  c.playout = PlayoutSource::kTspg;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(TrainConfig, CheckpointsIncludeFinalGame) {
  TrainConfig c;
  c.game = "connect4";
  c.games = 60;
  EXPECT_EQ(c.resolved_checkpoints(), (std::vector<int>{1, 25, 50, 60}));
  c.games = 1;
  EXPECT_EQ(c.resolved_checkpoints(), (std::vector<int>{1}));
}

TrainConfig small_config(const std::string& game, int games) {
  TrainConfig c;
  c.game = game;
  c.games = games;
  c.mcts_iterations = 40;
  c.seed = 11;
  return c;
}

TEST(SelfPlay, StoredEntriesAreWellFormed) {
  auto g = make_game("connect4");
  const FeatureSet fs = atomic_features(*g);
  LearnerState learner;
  learner.params.ce = ParameterVector(static_cast<std::size_t>(fs.size()));
  learner.params.tspg = ParameterVector(learner.params.ce.size());
  TrainConfig cfg = small_config("connect4", 1);
  ReplayBuffer buf(400);
  Rng rng(3);
  std::vector<ExperienceEntry> entries;
  const auto rec = self_play_game(*g, learner, fs, cfg, buf, rng, &entries);
  ASSERT_EQ(static_cast<int>(entries.size()), rec.length);
  EXPECT_EQ(learner.update_steps, rec.length);
  for (const auto& e : entries) {
    EXPECT_NEAR(e.visit_distribution.sum(), 1.0, 1e-9);
    ASSERT_EQ(e.q_values.size(), e.actions.size());
    ASSERT_EQ(e.features.size(), e.actions.size());
    for (double q : e.q_values) {
      EXPECT_GE(q, -1.0);
      EXPECT_LE(q, 1.0);
    }
  }
  EXPECT_FALSE(learner.params.ce.all_zero());
  EXPECT_FALSE(learner.params.tspg->all_zero());
}

TEST(SelfPlay, MoveCapEndsInDraw) {
  auto g = make_game("connect4");
  const FeatureSet fs = atomic_features(*g);
  LearnerState learner;
  learner.params.ce = ParameterVector(static_cast<std::size_t>(fs.size()));
  TrainConfig cfg = small_config("connect4", 1);
  cfg.move_cap = 3;
  ReplayBuffer buf(400);
  Rng rng(4);
  const auto rec = self_play_game(*g, learner, fs, cfg, buf, rng);
  EXPECT_TRUE(rec.capped);
  EXPECT_EQ(rec.length, 3);
  EXPECT_EQ(rec.result, Outcome::draw());
  EXPECT_EQ(buf.size(), 3u);
}

TEST(Train, DeterministicAndRoundTrips) {
  const TrainConfig cfg = small_config("tictactoe", 3);
  std::ostringstream log1, log2;
  const auto a = train(cfg, {nullptr, &log1});
  const auto b = train(cfg, {nullptr, &log2});
  ASSERT_EQ(a.size(), 2u);  // games 1 and 3
  EXPECT_EQ(log1.str(), log2.str());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string text = serialize_checkpoint(a[i]);
    EXPECT_EQ(text, serialize_checkpoint(b[i]));
    const Checkpoint back = deserialize_checkpoint(text);
    EXPECT_EQ(back.params, a[i].params);
    EXPECT_EQ(back.games_played, a[i].games_played);
    EXPECT_EQ(back.update_steps, a[i].update_steps);
    EXPECT_EQ(back.features.serialize(), a[i].features.serialize());
    EXPECT_EQ(serialize_checkpoint(back), text);
  }
  EXPECT_EQ(a.back().params.ce.size(), static_cast<std::size_t>(a.back().features.size()));
  EXPECT_EQ(a.back().params.tspg->size(), a.back().params.ce.size());
}

TEST(Train, CeOnlyRunHasNoOffsets) {
  TrainConfig cfg = small_config("connect4", 2);
  cfg.train_tspg = false;
  cfg.train_ce_double = false;
  const auto cks = train(cfg);
  for (const auto& ck : cks) {
    EXPECT_FALSE(ck.params.tspg.has_value());
    EXPECT_FALSE(ck.params.ce_double.has_value());
    EXPECT_EQ(ck.params.tspg_policy().offset, std::nullopt);
  }
  const std::string text = serialize_checkpoint(cks.back());
  EXPECT_EQ(text.find("weights tspg"), std::string::npos);
}

TEST(Train, SingleGameGivesOneCheckpointAndOneFeatureAtMost) {
  const TrainConfig cfg = small_config("connect4", 1);
  const auto cks = train(cfg);
  ASSERT_EQ(cks.size(), 1u);
  auto g = make_game("connect4");
  const int atomic = atomic_features(*g).size();
  EXPECT_LE(cks[0].features.size(), atomic + 1);
  EXPECT_GE(cks[0].features.size(), atomic);
}

TEST(Checkpoint, MalformedInputNamesTheLine) {
  const auto cks = train(small_config("tictactoe", 1));
  std::string text = serialize_checkpoint(cks[0]);
  text.replace(text.find("update_steps"), 12, "update_stepz");
  try {
    deserialize_checkpoint(text);
    FAIL() << "expected a parse error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
  EXPECT_THROW(deserialize_checkpoint(""), std::runtime_error);
  EXPECT_THROW(load_checkpoint("/nonexistent/none.ckpt"), std::runtime_error);
}

}  // namespace
}  // namespace tspg
