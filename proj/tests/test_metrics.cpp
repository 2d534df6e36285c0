#include <gtest/gtest.h>

#include <vector>

#include "ofdma/metrics.hpp"

using namespace ofdma;

TEST(Jain, Examples) {
  EXPECT_DOUBLE_EQ(jain_index({1, 1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(jain_index({4, 0, 0, 0}), 0.25);
  EXPECT_DOUBLE_EQ(jain_index({2, 2, 1, 1}), 0.9);
  EXPECT_THROW(jain_index({}), UndefinedMetric);
  EXPECT_THROW(jain_index({0, 0}), UndefinedMetric);
}

TEST(Jain, BoundsAndScaleInvariance) {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> r(1 + rng.uniform_index(30));
    for (auto& v : r) v = rng.uniform(0, 100);
    r[0] += 1.0;
    const double j = jain_index(r);
    EXPECT_GE(j, 1.0 / static_cast<double>(r.size()) - 1e-12);
    EXPECT_LE(j, 1.0 + 1e-12);
    for (auto& v : r) v *= 7.5;
    EXPECT_NEAR(jain_index(r), j, 1e-12);
  }
}

TEST(Satisfaction, Examples) {
  EXPECT_DOUBLE_EQ(satisfaction({5, 0}, {10, 10}, {true, true}), 0.25);
  EXPECT_DOUBLE_EQ(satisfaction({50, 0}, {10, 10}, {true, false}), 1.0);
  EXPECT_THROW(satisfaction({1}, {1}, {false}), UndefinedMetric);
  EXPECT_THROW(satisfaction({1, 2}, {1}, {true}), InvalidInput);
}

TEST(Stats, UniformRamp) {
  TtiRecord r;
  for (int m = 0; m < 25; ++m) r.achieved.push_back(m);
  const auto s = throughput_stats({r});
  EXPECT_DOUBLE_EQ(s.average, 12.0);
  EXPECT_DOUBLE_EQ(s.peak, 24.0);
  EXPECT_DOUBLE_EQ(s.edge, 1.2);
  EXPECT_LE(s.edge, s.average);
  EXPECT_LE(s.average, s.peak);
}

TEST(Stats, PercentileInterpolates) {
  EXPECT_DOUBLE_EQ(percentile({3, 1, 2}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 0.25), 2.5);
  EXPECT_DOUBLE_EQ(percentile({7}, 0.05), 7.0);
}

TEST(Stats, MeanSatisfactionSkipsBestEffortTtis) {
  TtiRecord gbr;
  gbr.achieved = {150.0};
  gbr.demands = {{300e3}, {true}};
  TtiRecord be;
  be.achieved = {0.0};
  be.demands = {{0.0}, {false}};
  EXPECT_DOUBLE_EQ(*mean_satisfaction({gbr, be}), 0.5);
  EXPECT_FALSE(mean_satisfaction({be}));
}
