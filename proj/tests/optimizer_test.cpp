#include "slabtune/optimizer.hpp"

#include <gtest/gtest.h>

#include <random>

#include "slabtune/error.hpp"
#include "support/brute_force.hpp"

namespace {

using namespace slabtune;

SizeHistogram H(std::map<Bytes, Count> m) { return SizeHistogram(m); }

OptimizerParams P(std::uint64_t seed, std::uint32_t restarts = 1) {
  OptimizerParams p;
  p.seed = seed;
  p.restarts = restarts;
  return p;
}

// Random restarts on sparse histograms can drift across empty plateaus until
// the iteration cap; property tests don't need the full default cap.
OptimizerParams capped(std::uint64_t seed, std::uint32_t restarts) {
  auto p = P(seed, restarts);
  p.max_iterations = 200'000;
  return p;
}

TEST(HillClimbTest, AlreadyOptimalStaysPut) {
  const auto h = H({{100, 3}, {180, 7}, {420, 1}});
  const SlabConfig start({100, 180, 420});
  const auto r = hill_climb(start, h, P(1));
  EXPECT_EQ(r.wasted_bytes, 0u);
  EXPECT_EQ(r.initial_wasted_bytes, 0u);
  EXPECT_EQ(r.config, start);
}

TEST(HillClimbTest, SingleClassDescendsToItemSize) {
  const auto r = hill_climb(SlabConfig({150}), H({{100, 10}}), P(7));
  EXPECT_EQ(r.config, SlabConfig({100}));
  EXPECT_EQ(r.wasted_bytes, 0u);
  EXPECT_EQ(r.initial_wasted_bytes, 500u);
  // Every downward step improves; the 50 of them are all accepted.
  EXPECT_EQ(r.accepted_moves, 50u);
}

TEST(HillClimbTest, StopsAfterPatienceRejections) {
  auto params = P(3);
  params.patience = 10;
  const auto r = hill_climb(SlabConfig({100}), H({{100, 1}}), params);
  // Down is infeasible and up is worse: 11 consecutive rejections end the climb.
  EXPECT_EQ(r.iterations, 11u);
  EXPECT_EQ(r.accepted_moves, 0u);
}

TEST(HillClimbTest, MaxIterationsCap) {
  auto params = P(3);
  params.patience = 5;
  params.max_iterations = 20;
  // A lone empty class below the data wanders on a plateau indefinitely.
  const auto r = hill_climb(SlabConfig({200, 5000}), H({{5000, 1}}), params);
  EXPECT_LE(r.iterations, 20u);
}

TEST(HillClimbTest, ImprovesPublishedStyleStart) {
  WorkloadSpec spec{.mean = 518, .sd = 60, .item_count = 200'000, .seed = 12};
  const auto h = generate_lognormal(spec);
  const SlabConfig start({304, 384, 480, 600, 752, 944});
  ASSERT_LE(h.max_size(), 944u);
  ASSERT_GT(h.count_of(h.min_size()), 0u);
  const auto r = hill_climb(start, h, P(1));
  EXPECT_LT(r.wasted_bytes, r.initial_wasted_bytes);
  EXPECT_EQ(r.config.size(), start.size());
  EXPECT_EQ(r.wasted_bytes, wasted_bytes(r.config, h));
}

TEST(HillClimbTest, Errors) {
  EXPECT_THROW(hill_climb(SlabConfig({100}), H({{101, 1}}), P(1)), OversizeError);
  EXPECT_THROW(hill_climb(SlabConfig({100}), SizeHistogram{}, P(1)), ValidationError);
  auto bad = P(1);
  bad.patience = 0;
  EXPECT_THROW(hill_climb(SlabConfig({100}), H({{90, 1}}), bad), ValidationError);
  bad = P(1);
  bad.max_iterations = 10;
  EXPECT_THROW(hill_climb(SlabConfig({100}), H({{90, 1}}), bad), ValidationError);
}

TEST(HillClimbTest, NoRegressionFuzz) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 200; ++t) {
    const auto h = test_support::random_histogram(rng, 25, 96, 4000, 200);
    const auto start = restrict_to_occupied(default_classes(), h);
    const auto r = hill_climb(start, h, P(t));
    ASSERT_LE(r.wasted_bytes, r.initial_wasted_bytes);
    ASSERT_EQ(r.config.size(), start.size());
    ASSERT_GE(r.config.largest(), h.max_size());
    ASSERT_EQ(r.wasted_bytes, wasted_bytes(r.config, h));
  }
}

TEST(OptimizeTest, SingleRestartMatchesHillClimb) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto h = test_support::random_histogram(rng, 20, 96, 2000, 100);
    const auto defaults = default_classes();
    auto climbed = hill_climb(restrict_to_occupied(defaults, h), h, P(t));
    EXPECT_EQ(optimize(h, defaults, P(t)), climbed);
  }
}

TEST(OptimizeTest, ParallelMatchesSerialAndIsDeterministic) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto h = test_support::random_histogram(rng, 30, 96, 3000, 100);
    const auto params = capped(1000 + t, 16);
    const auto a = optimize(h, default_classes(), params);
    EXPECT_EQ(a, optimize(h, default_classes(), params));
    EXPECT_EQ(a, optimize_serial(h, default_classes(), params));
  }
}

TEST(OptimizeTest, HundredRestartsDeterministic) {
  WorkloadSpec spec{.mean = 1210, .sd = 40, .item_count = 100'000, .seed = 2};
  const auto h = generate_lognormal(spec);
  const auto params = P(42, 100);
  const auto a = optimize(h, default_classes(), params);
  EXPECT_EQ(a, optimize(h, default_classes(), params));
  EXPECT_LT(a.restart_index_of_best, 100u);
  EXPECT_LE(a.wasted_bytes, a.initial_wasted_bytes);
}

TEST(OptimizeTest, BestRestartNeverWorseThanFirst) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const auto h = test_support::random_histogram(rng, 12, 96, 1500, 50);
    const auto one = optimize(h, default_classes(), capped(t, 1));
    const auto many = optimize(h, default_classes(), capped(t, 8));
    EXPECT_LE(many.wasted_bytes, one.wasted_bytes);
    EXPECT_EQ(many.initial_wasted_bytes, one.initial_wasted_bytes);
    EXPECT_EQ(many.config.size(), one.config.size());
  }
}

TEST(OptimizeTest, ClassOverride) {
  const auto h = H({{100, 5}, {130, 5}, {170, 5}, {400, 5}, {410, 1}});
  auto params = P(5, 4);
  params.classes = 5;
  const auto r = optimize(h, default_classes(), params);
  EXPECT_EQ(r.config, SlabConfig({100, 130, 170, 400, 410}));
  EXPECT_EQ(r.wasted_bytes, 0u);

  params.classes = 2;
  EXPECT_EQ(optimize(h, default_classes(), params).config.size(), 2u);

  params.classes = 6;
  EXPECT_THROW(optimize(h, default_classes(), params), ValidationError);
}

TEST(OptimizeTest, InitialConfig) {
  const auto h = H({{90, 1}, {100, 4}, {200, 4}, {900, 1}});
  const auto d = default_classes();
  EXPECT_EQ(initial_config(h, d, std::nullopt), restrict_to_occupied(d, h));
  // Sizes below the minimum chunk are lifted to it, then spread by quantile.
  const auto three = initial_config(h, d, 3);
  EXPECT_EQ(three, SlabConfig({100, 200, 900}));
  EXPECT_EQ(initial_config(h, d, 1), SlabConfig({900}));
}

TEST(OptimizeTest, Errors) {
  const auto d = default_classes();
  EXPECT_THROW(optimize(SizeHistogram{}, d, P(1)), ValidationError);
  EXPECT_THROW(optimize(H({{2'000'000, 1}}), d, P(1)), OversizeError);
  auto bad = P(1);
  bad.restarts = 0;
  EXPECT_THROW(optimize(H({{100, 1}}), d, bad), ValidationError);
}

}  // namespace
