#pragma once

// Reference schedulers: per-RB maximum throughput and proportional fair.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "ofdma/error.hpp"
#include "ofdma/fitness.hpp"
#include "ofdma/lte_model.hpp"

namespace ofdma {

namespace detail {

template <typename Metric>
AllocationPattern per_rb_argmax(std::size_t ues, std::size_t rbs, Metric metric) {
  AllocationPattern p;
  p.genes.resize(rbs);
  for (std::size_t n = 0; n < rbs; ++n) {
    std::size_t best = 0;
    double best_v = metric(0, n);
    for (std::size_t m = 1; m < ues; ++m) {
      const double v = metric(m, n);
      if (v > best_v) {
        best_v = v;
        best = m;
      }
    }
    p.genes[n] = static_cast<UeIndex>(best);
  }
  return p;
}

}  // namespace detail

/// Each RB to the UE with the highest efficiency on it (lowest index on
/// ties). Exact maximizer of f1.
inline AllocationPattern max_tp_schedule(const EfficiencyGrid& c) {
  return detail::per_rb_argmax(c.rows(), c.cols(), [&](std::size_t m, std::size_t n) { return c(m, n); });
}

struct PfState {
  std::vector<double> average;  // bits/TTI, exponentially smoothed
  double time_constant = 10.0;  // TTIs
  double floor = 1.0;           // bits/TTI

  static PfState initial(std::size_t ues, double time_constant = 10.0, double floor = 1.0) {
    if (!(time_constant >= 1.0)) throw InvalidInput("PF time constant must be >= 1 TTI");
    if (!(floor > 0.0)) throw InvalidInput("PF average floor must be > 0");
    return PfState{std::vector<double>(ues, floor), time_constant, floor};
  }
};

/// Per-RB argmax of instantaneous efficiency over smoothed throughput.
inline AllocationPattern pf_schedule(const EfficiencyGrid& c, const PfState& state) {
  if (state.average.size() != c.rows()) throw InvalidInput("PF state size must equal M");
  return detail::per_rb_argmax(c.rows(), c.cols(), [&](std::size_t m, std::size_t n) {
    return c(m, n) / state.average[m];
  });
}

inline PfState pf_update(PfState state, const std::vector<double>& achieved) {
  if (achieved.size() != state.average.size()) throw InvalidInput("PF update length must equal M");
  const double alpha = 1.0 / state.time_constant;
  for (std::size_t m = 0; m < achieved.size(); ++m)
    state.average[m] = std::max(state.floor, (1.0 - alpha) * state.average[m] + alpha * achieved[m]);
  return state;
}

}  // namespace ofdma
