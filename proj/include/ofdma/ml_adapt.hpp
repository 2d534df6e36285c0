#pragma once

// Closed-loop adaptation: demand history, k-means clustering of demand
// patterns, a one-vs-rest linear hinge-loss classifier, the GBR-mix weight
// rule and the per-cluster cache of optimized allocation patterns.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ofdma/error.hpp"
#include "ofdma/fitness.hpp"
#include "ofdma/ga.hpp"
#include "ofdma/lte_model.hpp"
#include "ofdma/rng.hpp"

namespace ofdma {

using FeatureVector = std::vector<double>;

/// FIFO-bounded store of observed demand vectors, all of one length.
class DemandDatabase {
 public:
  explicit DemandDatabase(std::size_t capacity = 1000) : capacity_(capacity) {
    if (capacity_ == 0) throw InvalidInput("demand database capacity must be >= 1");
  }

  void append(DemandVector d) {
    if (d.gbr_mask.size() != d.values.size())
      throw InvalidInput("demand vector and GBR mask lengths differ");
    if (!rows_.empty() && d.size() != rows_.front().size())
      throw InvalidInput("demand vector length differs from database rows");
    if (rows_.size() == capacity_) rows_.pop_front();
    rows_.push_back(std::move(d));
  }

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t width() const { return rows_.empty() ? 0 : rows_.front().size(); }
  const std::deque<DemandVector>& rows() const { return rows_; }

  std::vector<FeatureVector> features() const {
    std::vector<FeatureVector> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.features());
    return out;
  }

  /// One row per line: M demands in bits/s, then M GBR flags (0/1).
  void save(std::ostream& out) const {
    out << "# demand database: " << width() << " UEs, " << rows_.size() << " rows\n";
    char buf[64];
    for (const auto& r : rows_) {
      for (std::size_t m = 0; m < r.size(); ++m) {
        auto res = std::to_chars(buf, buf + sizeof buf, r.values[m], std::chars_format::fixed, 6);
        out.write(buf, res.ptr - buf);
        out << ' ';
      }
      for (std::size_t m = 0; m < r.size(); ++m) out << (r.gbr_mask[m] ? '1' : '0') << (m + 1 < r.size() ? " " : "");
      out << '\n';
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write demand database: " + path);
    save(out);
  }

  static DemandDatabase load(std::istream& in, std::size_t capacity = 1000) {
    DemandDatabase db(capacity);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::vector<double> tokens;
      double v;
      while (ls >> v) tokens.push_back(v);
      if (!ls.eof()) throw InvalidInput("demand database line " + std::to_string(lineno) + ": bad number");
      if (tokens.empty()) continue;
      if (tokens.size() % 2 != 0)
        throw InvalidInput("demand database line " + std::to_string(lineno) +
                           ": expected M demands followed by M flags");
      const std::size_t m = tokens.size() / 2;
      DemandVector d;
      d.values.assign(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(m));
      for (std::size_t i = m; i < tokens.size(); ++i) {
        if (tokens[i] != 0.0 && tokens[i] != 1.0)
          throw InvalidInput("demand database line " + std::to_string(lineno) + ": GBR flag must be 0 or 1");
        d.gbr_mask.push_back(tokens[i] == 1.0);
      }
      db.append(std::move(d));
    }
    return db;
  }

  static DemandDatabase load(const std::string& path, std::size_t capacity = 1000) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open demand database: " + path);
    return load(in, capacity);
  }

 private:
  std::size_t capacity_;
  std::deque<DemandVector> rows_;
};

inline double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

/// Nearest centroid; ties resolve to the lower index.
inline std::size_t nearest_centroid(const std::vector<FeatureVector>& centroids, const FeatureVector& x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centroids.size(); ++k) {
    const double d = squared_distance(centroids[k], x);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

struct ClusterModel {
  std::vector<FeatureVector> centroids;
  std::vector<std::size_t> assignment;  // one per fitted row
  double inertia = 0.0;
  std::vector<double> inertia_history;  // after each centroid update
  std::size_t iterations = 0;
  bool converged = false;

  std::size_t clusters() const { return centroids.size(); }
};

namespace detail {

inline std::vector<FeatureVector> cluster_means(const std::vector<FeatureVector>& points,
                                                const std::vector<std::size_t>& assignment,
                                                std::size_t k) {
  const std::size_t dims = points.front().size();
  std::vector<FeatureVector> means(k, FeatureVector(dims, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++counts[assignment[i]];
    for (std::size_t d = 0; d < dims; ++d) means[assignment[i]][d] += points[i][d];
  }
  for (std::size_t c = 0; c < k; ++c)
    for (auto& v : means[c]) v /= static_cast<double>(counts[c]);
  return means;
}

inline double inertia_of(const std::vector<FeatureVector>& points,
                         const std::vector<std::size_t>& assignment,
                         const std::vector<FeatureVector>& centroids) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    s += squared_distance(points[i], centroids[assignment[i]]);
  return s;
}

// Empty clusters take the point farthest from the centroid of the largest
// cluster.
inline void repair_empty(const std::vector<FeatureVector>& points,
                         std::vector<std::size_t>& assignment,
                         const std::vector<FeatureVector>& centroids) {
  const std::size_t k = centroids.size();
  for (;;) {
    std::vector<std::size_t> counts(k, 0);
    for (auto a : assignment) ++counts[a];
    const auto empty = std::find(counts.begin(), counts.end(), std::size_t{0});
    if (empty == counts.end()) return;
    const auto largest = static_cast<std::size_t>(
        std::distance(counts.begin(), std::max_element(counts.begin(), counts.end())));
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (assignment[i] != largest) continue;
      const double d = squared_distance(points[i], centroids[largest]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    assignment[far] = static_cast<std::size_t>(std::distance(counts.begin(), empty));
  }
}

inline std::vector<std::size_t> assign_all(const std::vector<FeatureVector>& points,
                                           const std::vector<FeatureVector>& centroids) {
  std::vector<std::size_t> a(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) a[i] = nearest_centroid(centroids, points[i]);
  return a;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding.
inline ClusterModel kmeans_fit(const std::vector<FeatureVector>& points, std::size_t k,
                               std::uint64_t seed, std::size_t max_iters = 100) {
  if (k == 0) throw InvalidInput("k-means needs K >= 1");
  if (points.size() < k)
    throw InsufficientData("k-means needs at least K = " + std::to_string(k) + " rows, got " +
                           std::to_string(points.size()));
  const std::size_t dims = points.front().size();
  for (const auto& p : points)
    if (p.size() != dims) throw InvalidInput("k-means rows differ in length");

  Rng rng(seed);
  ClusterModel model;
  model.centroids.push_back(points[rng.uniform_index(points.size())]);
  std::vector<double> d2(points.size());
  while (model.centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = squared_distance(points[i], model.centroids[nearest_centroid(model.centroids, points[i])]);
      total += d2[i];
    }
    std::size_t pick = points.size() - 1;
    if (total > 0.0) {
      double target = rng.uniform01() * total;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (target < d2[i]) {
          pick = i;
          break;
        }
        target -= d2[i];
      }
    } else {
      pick = rng.uniform_index(points.size());
    }
    model.centroids.push_back(points[pick]);
  }

  auto assignment = detail::assign_all(points, model.centroids);
  detail::repair_empty(points, assignment, model.centroids);
  for (std::size_t it = 0; it < max_iters; ++it) {
    model.centroids = detail::cluster_means(points, assignment, k);
    model.inertia_history.push_back(detail::inertia_of(points, assignment, model.centroids));
    model.iterations = it + 1;
    auto next = detail::assign_all(points, model.centroids);
    detail::repair_empty(points, next, model.centroids);
    if (next == assignment) {
      model.converged = true;
      break;
    }
    assignment = std::move(next);
  }
  if (!model.converged) model.centroids = detail::cluster_means(points, assignment, k);
  model.assignment = std::move(assignment);
  model.inertia = detail::inertia_of(points, model.assignment, model.centroids);
  return model;
}

inline ClusterModel kmeans_fit(const DemandDatabase& db, std::size_t k, std::uint64_t seed,
                               std::size_t max_iters = 100) {
  return kmeans_fit(db.features(), k, seed, max_iters);
}

struct TrainingMatrix {
  std::vector<FeatureVector> features;
  std::vector<std::size_t> labels;
  std::size_t classes = 0;

  std::size_t size() const { return features.size(); }
};

/// Labels every row with its nearest centroid.
inline TrainingMatrix build_training_matrix(const std::vector<FeatureVector>& rows,
                                            const ClusterModel& model) {
  TrainingMatrix t;
  t.classes = model.clusters();
  t.features = rows;
  t.labels.reserve(rows.size());
  for (const auto& r : rows) t.labels.push_back(nearest_centroid(model.centroids, r));
  return t;
}

inline TrainingMatrix build_training_matrix(const DemandDatabase& db, const ClusterModel& model) {
  return build_training_matrix(db.features(), model);
}

struct SvmConfig {
  std::size_t epochs = 50;
  double learning_rate = 0.05;
  double regularization = 1e-3;
  std::uint64_t seed = 7;
};

/// K one-vs-rest linear separators over standardized features.
struct ClassifierModel {
  std::vector<double> mean;   // per-feature standardization
  std::vector<double> scale;
  std::vector<std::vector<double>> weights;  // K x dims
  std::vector<double> bias;

  std::size_t classes() const { return weights.size(); }
  std::size_t dims() const { return mean.size(); }

  /// Model with zero separators over `dims` features.
  static ClassifierModel zeros(std::size_t classes, std::size_t dims) {
    ClassifierModel m;
    m.mean.assign(dims, 0.0);
    m.scale.assign(dims, 1.0);
    m.weights.assign(classes, std::vector<double>(dims, 0.0));
    m.bias.assign(classes, 0.0);
    return m;
  }

  FeatureVector standardize(const FeatureVector& x) const {
    FeatureVector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean[i]) / scale[i];
    return z;
  }

  std::vector<double> scores(const FeatureVector& x) const {
    if (x.size() != dims())
      throw InvalidInput("feature length " + std::to_string(x.size()) +
                         " does not match classifier width " + std::to_string(dims()));
    std::vector<double> s(classes());
    for (std::size_t k = 0; k < classes(); ++k) {
      double acc = bias[k];
      for (std::size_t i = 0; i < x.size(); ++i) acc += weights[k][i] * (x[i] - mean[i]) / scale[i];
      s[k] = acc;
    }
    return s;
  }
};

/// Hinge-loss subgradient descent with L2 shrinkage, one separator per class.
inline ClassifierModel train_classifier(const TrainingMatrix& t, const SvmConfig& config = {}) {
  if (t.size() == 0) throw InvalidInput("training matrix is empty");
  if (t.classes == 0) throw InvalidInput("training matrix declares no classes");
  const std::size_t dims = t.features.front().size();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.features[i].size() != dims) throw InvalidInput("training rows differ in length");
    if (t.labels[i] >= t.classes) throw InvalidInput("training label out of range");
  }

  ClassifierModel model = ClassifierModel::zeros(t.classes, dims);
  for (std::size_t d = 0; d < dims; ++d) {
    double sum = 0.0;
    for (const auto& row : t.features) sum += row[d];
    const double mu = sum / static_cast<double>(t.size());
    double var = 0.0;
    for (const auto& row : t.features) var += (row[d] - mu) * (row[d] - mu);
    const double sd = std::sqrt(var / static_cast<double>(t.size()));
    model.mean[d] = mu;
    model.scale[d] = sd > 0.0 ? sd : 1.0;
  }
  std::vector<FeatureVector> z;
  z.reserve(t.size());
  for (const auto& row : t.features) z.push_back(model.standardize(row));

  Rng rng(config.seed);
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double shrink = 1.0 - config.learning_rate * config.regularization;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    for (std::size_t i : order) {
      const FeatureVector& x = z[i];
      for (std::size_t k = 0; k < t.classes; ++k) {
        const double y = t.labels[i] == k ? 1.0 : -1.0;
        auto& w = model.weights[k];
        double margin = model.bias[k];
        for (std::size_t d = 0; d < dims; ++d) margin += w[d] * x[d];
        margin *= y;
        for (auto& wd : w) wd *= shrink;
        if (margin < 1.0) {
          for (std::size_t d = 0; d < dims; ++d) w[d] += config.learning_rate * y * x[d];
          model.bias[k] += config.learning_rate * y;
        }
      }
    }
  }
  return model;
}

/// Highest one-vs-rest score; ties to the lowest class index.
inline std::size_t classify(const ClassifierModel& model, const FeatureVector& x) {
  const auto s = model.scores(x);
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.size(); ++k)
    if (s[k] > s[best]) best = k;
  return best;
}

inline std::size_t classify(const ClassifierModel& model, const DemandVector& d) {
  return classify(model, d.features());
}

/// All GBR -> (0, 1); none -> (1, 0); otherwise w2 = #GBR / M, w1 = 1 - w2.
inline SchedulerWeights adapt_weights(const DemandVector& d) {
  const std::size_t total = d.gbr_mask.size();
  const std::size_t gbr = d.gbr_count();
  if (total == 0) throw InvalidInput("empty GBR mask");
  if (gbr == total) return {0.0, 1.0};
  if (gbr == 0) return {1.0, 0.0};
  const double w2 = static_cast<double>(gbr) / static_cast<double>(total);
  return {1.0 - w2, w2};
}

struct CacheEntry {
  AllocationPattern pattern;
  double fitness = 0.0;  // combined value when stored
  std::size_t tti = 0;
};

/// One slot per demand cluster; the newest optimized pattern wins.
class MappingCache {
 public:
  explicit MappingCache(std::size_t clusters = 0) : entries_(clusters) {}

  std::size_t clusters() const { return entries_.size(); }

  std::size_t populated() const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.has_value(); }));
  }

  const std::optional<CacheEntry>& lookup(std::size_t k) const {
    check(k);
    return entries_[k];
  }

  void update(std::size_t k, const GaResult& result, std::size_t tti) {
    check(k);
    entries_[k] = CacheEntry{result.best_pattern, result.best_fitness.combined, tti};
  }

  /// Re-key after reclustering: new slot k takes old slot source[k].
  void remap(const std::vector<std::size_t>& source) {
    std::vector<std::optional<CacheEntry>> next(source.size());
    for (std::size_t k = 0; k < source.size(); ++k)
      if (source[k] < entries_.size()) next[k] = entries_[source[k]];
    entries_ = std::move(next);
  }

 private:
  void check(std::size_t k) const {
    if (k >= entries_.size())
      throw InvalidInput("cluster index " + std::to_string(k) + " outside cache of size " +
                         std::to_string(entries_.size()));
  }

  std::vector<std::optional<CacheEntry>> entries_;
};

inline std::optional<CacheEntry> cache_lookup(const MappingCache& cache, std::size_t k) {
  return cache.lookup(k);
}

inline MappingCache cache_update(MappingCache cache, std::size_t k, const GaResult& result,
                                 std::size_t tti) {
  cache.update(k, result, tti);
  return cache;
}

}  // namespace ofdma
