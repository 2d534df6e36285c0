#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "ofdma/ml_adapt.hpp"

using namespace ofdma;

namespace {

const std::vector<FeatureVector> kPairs{{0, 0}, {0, 1}, {10, 10}, {10, 11}};

// Three well-separated Gaussian-ish blobs in `dims` dimensions.
std::vector<FeatureVector> blobs(std::size_t per, std::size_t dims, std::uint64_t seed,
                                 std::vector<std::size_t>* truth = nullptr) {
  Rng rng(seed);
  std::vector<FeatureVector> pts;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < per; ++i) {
      FeatureVector p(dims);
      for (std::size_t d = 0; d < dims; ++d) p[d] = 100.0 * static_cast<double>(c) * (d % 3 == c ? 1 : 0.3) + rng.uniform(-1, 1);
      pts.push_back(p);
      if (truth) truth->push_back(c);
    }
  return pts;
}

}  // namespace

TEST(DemandDatabase, FifoEviction) {
  DemandDatabase db(2);
  db.append({{1.0}, {true}});
  db.append({{2.0}, {true}});
  db.append({{3.0}, {false}});
  ASSERT_EQ(db.size(), 2u);
  EXPECT_EQ(db.rows().front().values.front(), 2.0);
  EXPECT_THROW(db.append({{1.0, 2.0}, {true, true}}), InvalidInput);
}

TEST(DemandDatabase, TextRoundTrip) {
  DemandDatabase db;
  db.append({{300000.5, 0.0, 12.25}, {true, false, true}});
  db.append({{1.0, 2.0, 3.0}, {false, false, false}});
  std::stringstream ss;
  db.save(ss);
  const auto back = DemandDatabase::load(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.rows()[0], db.rows()[0]);
  EXPECT_EQ(back.rows()[1], db.rows()[1]);
}

TEST(DemandDatabase, LoadRejectsBadRows) {
  std::istringstream odd("1 2 3\n");
  EXPECT_THROW(DemandDatabase::load(odd), InvalidInput);
  std::istringstream flag("1 2 1 5\n");
  EXPECT_THROW(DemandDatabase::load(flag), InvalidInput);
  std::istringstream junk("1 x\n");
  EXPECT_THROW(DemandDatabase::load(junk), InvalidInput);
}

TEST(KMeans, SingleClusterIsTheMean) {
  const auto m = kmeans_fit(kPairs, 1, 3);
  EXPECT_EQ(m.centroids.front(), (FeatureVector{5.0, 5.5}));
}

TEST(KMeans, SeparatedPairs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = kmeans_fit(kPairs, 2, seed);
    EXPECT_EQ(m.assignment[0], m.assignment[1]);
    EXPECT_EQ(m.assignment[2], m.assignment[3]);
    EXPECT_NE(m.assignment[0], m.assignment[2]);
    EXPECT_EQ(m.centroids[m.assignment[0]], (FeatureVector{0.0, 0.5}));
    EXPECT_EQ(m.centroids[m.assignment[2]], (FeatureVector{10.0, 10.5}));
    EXPECT_TRUE(m.converged);
  }
}

TEST(KMeans, DuplicatesHaveZeroInertia) {
  const std::vector<FeatureVector> dup(6, FeatureVector{3.0, 4.0});
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto m = kmeans_fit(dup, k, 1);
    EXPECT_EQ(m.inertia, 0.0);
    for (std::size_t c = 0; c < k; ++c)
      EXPECT_TRUE(std::find(m.assignment.begin(), m.assignment.end(), c) != m.assignment.end());
  }
}

TEST(KMeans, InsufficientRows) {
  EXPECT_THROW(kmeans_fit(kPairs, 5, 1), InsufficientData);
}

TEST(KMeans, InertiaNonIncreasingAndCentroidsAreMeans) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<FeatureVector> pts(40, FeatureVector(3));
    for (auto& p : pts)
      for (auto& x : p) x = rng.uniform(0, 10);
    const auto m = kmeans_fit(pts, 4, rng.next_u64());
    for (std::size_t i = 1; i < m.inertia_history.size(); ++i)
      EXPECT_LE(m.inertia_history[i], m.inertia_history[i - 1] + 1e-9);
    if (!m.converged) continue;
    for (std::size_t c = 0; c < 4; ++c) {
      FeatureVector mean(3, 0.0);
      std::size_t n = 0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (m.assignment[i] == c) {
          ++n;
          for (std::size_t d = 0; d < 3; ++d) mean[d] += pts[i][d];
        }
      ASSERT_GT(n, 0u);
      for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(m.centroids[c][d], mean[d] / static_cast<double>(n), 1e-9);
    }
  }
}

TEST(KMeans, RecoversSeparatedBlobs) {
  std::vector<std::size_t> truth;
  const auto pts = blobs(30, 6, 5, &truth);
  const auto m = kmeans_fit(pts, 3, 2);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      ASSERT_EQ(truth[i] == truth[j], m.assignment[i] == m.assignment[j]);
}

TEST(TrainingMatrix, LabelsFollowNearestCentroid) {
  const auto m = kmeans_fit(kPairs, 2, 0);
  const auto t = build_training_matrix(kPairs, m);
  EXPECT_EQ(t.labels, m.assignment);
  EXPECT_EQ(t.classes, 2u);

  const std::vector<FeatureVector> one{{1.0}};
  const auto single = build_training_matrix(one, kmeans_fit(one, 1, 0));
  EXPECT_EQ(single.labels, (std::vector<std::size_t>{0}));

  ClusterModel tie;
  tie.centroids = {{0.0}, {2.0}};
  EXPECT_EQ(build_training_matrix(one, tie).labels.front(), 0u);
}

TEST(Classifier, SeparablePairsTrainPerfectly) {
  const auto m = kmeans_fit(kPairs, 2, 0);
  const auto t = build_training_matrix(kPairs, m);
  const auto c = train_classifier(t);
  for (std::size_t i = 0; i < kPairs.size(); ++i) EXPECT_EQ(classify(c, kPairs[i]), t.labels[i]);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(classify(c, m.centroids[k]), k);
}

TEST(Classifier, SingleClassAlwaysWins) {
  TrainingMatrix t{{{1.0, 2.0}, {1.5, 2.5}, {0.5, 1.0}}, {0, 0, 0}, 1};
  const auto c = train_classifier(t);
  EXPECT_EQ(classify(c, FeatureVector{100.0, -100.0}), 0u);

  TrainingMatrix t3{{{1.0, 2.0}, {1.5, 2.5}, {0.5, 1.0}}, {2, 2, 2}, 3};
  const auto c3 = train_classifier(t3);
  for (const auto& x : t3.features) EXPECT_EQ(classify(c3, x), 2u);
}

TEST(Classifier, ZeroModelPicksClassZero) {
  const auto z = ClassifierModel::zeros(3, 4);
  EXPECT_EQ(classify(z, FeatureVector{1, 2, 3, 4}), 0u);
}

TEST(Classifier, DimensionMismatchAndEmptyInput) {
  const auto z = ClassifierModel::zeros(2, 4);
  EXPECT_THROW(classify(z, FeatureVector{1, 2}), InvalidInput);
  EXPECT_THROW(train_classifier(TrainingMatrix{}), InvalidInput);
}

TEST(Classifier, AgreesWithNearestCentroidOnHeldOut) {
  const auto train = blobs(40, 6, 1);
  const auto m = kmeans_fit(train, 3, 4);
  const auto c = train_classifier(build_training_matrix(train, m));
  const auto held = blobs(334, 6, 99);
  std::size_t agree = 0;
  for (const auto& x : held) agree += classify(c, x) == nearest_centroid(m.centroids, x);
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(held.size()), 0.95);
}

TEST(Classifier, DeterministicPerSeed) {
  const auto pts = blobs(10, 4, 3);
  const auto t = build_training_matrix(pts, kmeans_fit(pts, 3, 1));
  EXPECT_EQ(train_classifier(t).weights, train_classifier(t).weights);
}

TEST(AdaptWeights, ThreeCases) {
  EXPECT_EQ(adapt_weights({std::vector<double>(25, 0.0), std::vector<bool>(25, false)}), (SchedulerWeights{1.0, 0.0}));
  EXPECT_EQ(adapt_weights({std::vector<double>(3, 1.0), std::vector<bool>(3, true)}), (SchedulerWeights{0.0, 1.0}));
  EXPECT_EQ(adapt_weights({{1, 1, 0, 0}, {true, true, false, false}}), (SchedulerWeights{0.5, 0.5}));
  EXPECT_EQ(adapt_weights({{1, 0, 0, 0}, {true, false, false, false}}), (SchedulerWeights{0.75, 0.25}));
}

TEST(MappingCache, LookupUpdateIsolation) {
  MappingCache cache(3);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_FALSE(cache_lookup(cache, k));
  GaResult r;
  r.best_pattern = AllocationPattern{{0, 1}};
  r.best_fitness.combined = 0.4;
  cache = cache_update(cache, 2, r, 7);
  EXPECT_FALSE(cache.lookup(0));
  EXPECT_FALSE(cache.lookup(1));
  ASSERT_TRUE(cache.lookup(2));
  EXPECT_EQ(cache.lookup(2)->fitness, 0.4);
  EXPECT_EQ(cache.lookup(2)->tti, 7u);

  r.best_pattern = AllocationPattern{{1, 1}};
  r.best_fitness.combined = 0.1;
  cache.update(2, r, 8);
  EXPECT_EQ(cache.lookup(2)->pattern, r.best_pattern);
  EXPECT_EQ(cache.lookup(2)->fitness, 0.1);
  EXPECT_EQ(cache.populated(), 1u);
  EXPECT_THROW(cache.lookup(3), InvalidInput);
}

TEST(MappingCache, RemapCarriesEntries) {
  MappingCache cache(2);
  GaResult r;
  r.best_pattern = AllocationPattern{{1}};
  cache.update(0, r, 1);
  cache.remap({1, 0, 0});
  EXPECT_EQ(cache.clusters(), 3u);
  EXPECT_FALSE(cache.lookup(0));
  EXPECT_TRUE(cache.lookup(1));
  EXPECT_TRUE(cache.lookup(2));
}
