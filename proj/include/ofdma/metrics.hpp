#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ofdma/error.hpp"
#include "ofdma/fitness.hpp"
#include "ofdma/lte_model.hpp"

namespace ofdma {

/// Jain's fairness index (sum r)^2 / (M * sum r^2), in [1/M, 1].
inline double jain_index(const std::vector<double>& rates) {
  if (rates.empty()) throw UndefinedMetric("Jain index of an empty rate vector");
  double sum = 0.0;
  double sq = 0.0;
  for (double r : rates) {
    sum += r;
    sq += r * r;
  }
  if (sq == 0.0) throw UndefinedMetric("Jain index undefined for all-zero rates");
  return (sum * sum) / (static_cast<double>(rates.size()) * sq);
}

/// Mean over GBR UEs of min(1, r / R). Rates and demands share units.
inline double satisfaction(const std::vector<double>& rates, const std::vector<double>& demands,
                           const std::vector<bool>& gbr_mask) {
  if (rates.size() != demands.size() || rates.size() != gbr_mask.size())
    throw InvalidInput("satisfaction inputs differ in length");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!gbr_mask[i]) continue;
    sum += std::min(1.0, rates[i] / demands[i]);
    ++count;
  }
  if (count == 0) throw UndefinedMetric("satisfaction undefined without GBR UEs");
  return sum / static_cast<double>(count);
}

struct TtiRecord {
  std::size_t tti = 0;
  std::string scheduler;
  std::optional<SchedulerWeights> weights;
  std::vector<double> achieved;  // bits/TTI per UE
  std::optional<std::size_t> cluster;
  std::optional<std::size_t> generations_used;
  std::optional<double> combined_fitness;
  DemandVector demands;  // bits/s, as requested this TTI
};

struct ThroughputStats {
  double peak = 0.0;
  double average = 0.0;
  double edge = 0.0;  // 5th percentile
};

/// Linear-interpolation percentile (q in [0, 1]) of an unsorted sample.
inline double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Per-UE mean achieved bits/TTI across records.
inline std::vector<double> per_ue_mean(const std::vector<TtiRecord>& records) {
  if (records.empty()) throw InvalidInput("no TTI records");
  std::vector<double> mean(records.front().achieved.size(), 0.0);
  for (const auto& r : records)
    for (std::size_t m = 0; m < mean.size(); ++m) mean[m] += r.achieved[m];
  for (auto& v : mean) v /= static_cast<double>(records.size());
  return mean;
}

inline ThroughputStats throughput_stats(const std::vector<TtiRecord>& records) {
  const auto mean = per_ue_mean(records);
  ThroughputStats s;
  s.peak = *std::max_element(mean.begin(), mean.end());
  double sum = 0.0;
  for (double v : mean) sum += v;
  s.average = sum / static_cast<double>(mean.size());
  s.edge = percentile(mean, 0.05);
  return s;
}

/// Satisfaction per TTI averaged over the TTIs that carry GBR traffic;
/// nullopt when no TTI does.
inline std::optional<double> mean_satisfaction(const std::vector<TtiRecord>& records) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : records) {
    if (r.demands.gbr_count() == 0) continue;
    std::vector<double> demand_bits(r.demands.size());
    for (std::size_t m = 0; m < demand_bits.size(); ++m)
      demand_bits[m] = demand_bits_per_tti(r.demands.values[m]);
    sum += satisfaction(r.achieved, demand_bits, r.demands.gbr_mask);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace ofdma
