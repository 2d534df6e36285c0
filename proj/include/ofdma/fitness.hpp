#pragma once

// Scheduling objectives: rate maximization (f1), GBR shortfall (f2) and
// their normalized weighted combination w1*f1 - w2*f2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ofdma/error.hpp"
#include "ofdma/lte_model.hpp"

namespace ofdma {

inline constexpr double kTtiSeconds = 1e-3;

/// genes[n] = index of the UE holding RB n.
struct AllocationPattern {
  std::vector<UeIndex> genes;

  std::size_t size() const { return genes.size(); }
  UeIndex operator[](std::size_t n) const { return genes[n]; }

  friend bool operator==(const AllocationPattern&, const AllocationPattern&) = default;
};

inline bool is_valid(const AllocationPattern& p, std::size_t ues, std::size_t rbs) {
  return p.size() == rbs &&
         std::all_of(p.genes.begin(), p.genes.end(), [&](UeIndex g) { return g < ues; });
}

struct SchedulerWeights {
  double w1 = 1.0;
  double w2 = 0.0;

  static SchedulerWeights from_w1(double w1) {
    if (!(w1 >= 0.0 && w1 <= 1.0)) throw InvalidInput("w1 must lie in [0, 1]");
    return {w1, 1.0 - w1};
  }

  friend bool operator==(const SchedulerWeights&, const SchedulerWeights&) = default;
};

struct FitnessBreakdown {
  double f1_raw = 0.0;  // bits/TTI
  double f1_norm = 0.0;
  double f2_raw = 0.0;  // shortfall, bits/TTI
  double f2_norm = 0.0;
  double combined = 0.0;
  std::vector<double> per_ue_rate;
};

/// Achieved bits/TTI for every UE under the one-MCS-per-UE rule: a UE
/// transmits on all its RBs at the MCS its worst assigned RB supports.
inline std::vector<double> user_rates(const AllocationPattern& pattern, const CqiMatrix& cqi,
                                      const McsTable& table) {
  const std::size_t ues = cqi.ues();
  std::vector<int> worst(ues, std::numeric_limits<int>::max());
  std::vector<std::size_t> held(ues, 0);
  for (std::size_t n = 0; n < pattern.size(); ++n) {
    const UeIndex m = pattern[n];
    ++held[m];
    worst[m] = std::min(worst[m], cqi(m, n));
  }
  std::vector<double> rates(ues, 0.0);
  for (std::size_t m = 0; m < ues; ++m)
    if (held[m] > 0) rates[m] = static_cast<double>(held[m]) * table.rate_for_cqi(worst[m]);
  return rates;
}

inline double user_rate(const AllocationPattern& pattern, std::size_t ue, const CqiMatrix& cqi,
                        const McsTable& table) {
  std::size_t held = 0;
  int worst = std::numeric_limits<int>::max();
  for (std::size_t n = 0; n < pattern.size(); ++n) {
    if (pattern[n] != ue) continue;
    ++held;
    worst = std::min(worst, cqi(ue, n));
  }
  return held == 0 ? 0.0 : static_cast<double>(held) * table.rate(table.mcs_for_cqi(worst));
}

/// Bits granted on each RB: the owner's common MCS rate.
inline std::vector<double> granted_per_rb(const AllocationPattern& pattern, const CqiMatrix& cqi,
                                          const McsTable& table) {
  std::vector<int> worst(cqi.ues(), std::numeric_limits<int>::max());
  for (std::size_t n = 0; n < pattern.size(); ++n)
    worst[pattern[n]] = std::min(worst[pattern[n]], cqi(pattern[n], n));
  std::vector<double> granted(pattern.size());
  for (std::size_t n = 0; n < pattern.size(); ++n)
    granted[n] = table.rate_for_cqi(worst[pattern[n]]);
  return granted;
}

inline double fitness_f1(const AllocationPattern& pattern, const EfficiencyGrid& c) {
  double sum = 0.0;
  for (std::size_t n = 0; n < pattern.size(); ++n) sum += c(pattern[n], n);
  return sum;
}

inline double demand_bits_per_tti(double bps) { return bps * kTtiSeconds; }

inline double shortfall(const std::vector<double>& rates, const DemandVector& demands) {
  double sum = 0.0;
  for (std::size_t m = 0; m < rates.size(); ++m)
    if (demands.gbr_mask[m])
      sum += std::max(0.0, demand_bits_per_tti(demands.values[m]) - rates[m]);
  return sum;
}

/// Total GBR shortfall in bits/TTI; 0 when every GBR UE is served.
inline double fitness_f2(const AllocationPattern& pattern, const DemandVector& demands,
                         const CqiMatrix& cqi, const McsTable& table) {
  return shortfall(user_rates(pattern, cqi, table), demands);
}

struct Normalizers {
  double f1_ub = 0.0;
  double f2_ub = 0.0;
};

inline Normalizers normalizers(const EfficiencyGrid& c, const DemandVector& demands) {
  Normalizers z;
  for (std::size_t n = 0; n < c.cols(); ++n) {
    double best = 0.0;
    for (std::size_t m = 0; m < c.rows(); ++m) best = std::max(best, c(m, n));
    z.f1_ub += best;
  }
  for (std::size_t m = 0; m < demands.size(); ++m)
    if (demands.gbr_mask[m]) z.f2_ub += demand_bits_per_tti(demands.values[m]);
  if (z.f1_ub <= 0.0 && z.f2_ub <= 0.0)
    throw DegenerateScenario("zero efficiency on every RB and no GBR demand");
  return z;
}

/// Everything a pattern is scored against in one TTI.
class FitnessContext {
 public:
  FitnessContext(CqiMatrix cqi, McsTable table, DemandVector demands, SchedulerWeights weights)
      : cqi_(std::move(cqi)),
        table_(std::move(table)),
        demands_(std::move(demands)),
        weights_(weights),
        efficiency_(build_efficiency_matrix(cqi_, table_)) {
    if (demands_.size() != cqi_.ues() || demands_.gbr_mask.size() != cqi_.ues())
      throw InvalidInput("demand vector length must equal M");
    bounds_ = normalizers(efficiency_, demands_);
  }

  std::size_t ues() const { return cqi_.ues(); }
  std::size_t rbs() const { return cqi_.rbs(); }
  const CqiMatrix& cqi() const { return cqi_; }
  const McsTable& table() const { return table_; }
  const DemandVector& demands() const { return demands_; }
  const SchedulerWeights& weights() const { return weights_; }
  const EfficiencyGrid& efficiency() const { return efficiency_; }
  const Normalizers& bounds() const { return bounds_; }

  FitnessBreakdown evaluate(const AllocationPattern& pattern) const {
    FitnessBreakdown b;
    b.per_ue_rate = user_rates(pattern, cqi_, table_);
    b.f1_raw = fitness_f1(pattern, efficiency_);
    b.f2_raw = shortfall(b.per_ue_rate, demands_);
    b.f1_norm = bounds_.f1_ub > 0.0 ? b.f1_raw / bounds_.f1_ub : 0.0;
    b.f2_norm = bounds_.f2_ub > 0.0 ? b.f2_raw / bounds_.f2_ub : 0.0;
    b.combined = weights_.w1 * b.f1_norm - weights_.w2 * b.f2_norm;
    return b;
  }

  double combined(const AllocationPattern& pattern) const { return evaluate(pattern).combined; }

 private:
  CqiMatrix cqi_;
  McsTable table_;
  DemandVector demands_;
  SchedulerWeights weights_;
  EfficiencyGrid efficiency_;
  Normalizers bounds_;
};

inline FitnessBreakdown combined_fitness(const AllocationPattern& pattern,
                                         const SchedulerWeights& weights,
                                         const FitnessContext& context) {
  FitnessBreakdown b = context.evaluate(pattern);
  b.combined = weights.w1 * b.f1_norm - weights.w2 * b.f2_norm;
  return b;
}

}  // namespace ofdma
