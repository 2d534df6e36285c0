#pragma once

// Radio-resource abstractions: CQI grid, MCS rate table, UE population and
// the synthetic channel / traffic generators that drive the simulator.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ofdma/error.hpp"
#include "ofdma/rng.hpp"

namespace ofdma {

using UeIndex = std::uint32_t;

/// Row-major dense grid, rows = UEs, cols = RBs.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Grid(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw InvalidInput("grid data size does not match dimensions");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using EfficiencyGrid = Grid<double>;

inline constexpr int kDefaultCqiLevels = 15;

/// Per-(UE, RB) channel quality indices, each in [1, levels].
class CqiMatrix {
 public:
  CqiMatrix() = default;
  CqiMatrix(Grid<int> values, int levels = kDefaultCqiLevels)
      : values_(std::move(values)), levels_(levels) {
    if (levels_ < 1) throw InvalidInput("CQI level count must be >= 1");
    for (int v : values_.data())
      if (v < 1 || v > levels_)
        throw InvalidInput("CQI entry " + std::to_string(v) + " outside [1, " +
                           std::to_string(levels_) + "]");
  }
  CqiMatrix(std::size_t ues, std::size_t rbs, std::vector<int> values,
            int levels = kDefaultCqiLevels)
      : CqiMatrix(Grid<int>(ues, rbs, std::move(values)), levels) {}

  std::size_t ues() const { return values_.rows(); }
  std::size_t rbs() const { return values_.cols(); }
  int levels() const { return levels_; }
  int operator()(std::size_t ue, std::size_t rb) const { return values_(ue, rb); }
  const Grid<int>& grid() const { return values_; }

  friend bool operator==(const CqiMatrix&, const CqiMatrix&) = default;

 private:
  // Mutation goes through step_cqi only, which keeps the bound.
  friend CqiMatrix step_cqi(const CqiMatrix&, const std::vector<double>&, Rng&);

  Grid<int> values_;
  int levels_ = kDefaultCqiLevels;
};

struct McsEntry {
  int mcs_index = 0;
  int min_cqi = 1;
  double rate_bits_per_rb = 0.0;  // per 1 ms TTI
};

/// MCS index -> per-RB rate, plus CQI -> highest decodable MCS.
class McsTable {
 public:
  /// `cqi_levels` = 0 takes the largest min_cqi in the table.
  explicit McsTable(std::vector<McsEntry> rows, int cqi_levels = 0) : rows_(std::move(rows)) {
    if (rows_.empty()) throw InvalidInput("MCS table is empty");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (rows_[i].mcs_index != static_cast<int>(i))
        throw InvalidInput("MCS indices must be consecutive from 0");
      if (i > 0 && !(rows_[i].rate_bits_per_rb > rows_[i - 1].rate_bits_per_rb))
        throw InvalidInput("MCS rates must be strictly increasing");
      if (i > 0 && rows_[i].min_cqi < rows_[i - 1].min_cqi)
        throw InvalidInput("MCS min_cqi must be non-decreasing");
      if (rows_[i].rate_bits_per_rb < 0.0) throw InvalidInput("MCS rate must be >= 0");
    }
    if (rows_.front().min_cqi != 1)
      throw InvalidInput("lowest MCS must be reachable at CQI 1");
    levels_ = cqi_levels > 0 ? cqi_levels : rows_.back().min_cqi;
    if (rows_.back().min_cqi > levels_)
      throw InvalidInput("MCS min_cqi exceeds the CQI level count");

    cqi_to_mcs_.assign(static_cast<std::size_t>(levels_) + 1, 0);
    std::size_t mcs = 0;
    for (int c = 1; c <= levels_; ++c) {
      while (mcs + 1 < rows_.size() && rows_[mcs + 1].min_cqi <= c) ++mcs;
      cqi_to_mcs_[static_cast<std::size_t>(c)] = mcs;
    }
  }

  std::size_t size() const { return rows_.size(); }
  int cqi_levels() const { return levels_; }
  const std::vector<McsEntry>& rows() const { return rows_; }

  double rate(std::size_t mcs) const { return rows_[mcs].rate_bits_per_rb; }
  double max_rate() const { return rows_.back().rate_bits_per_rb; }

  std::size_t mcs_for_cqi(int cqi) const {
    if (cqi < 1 || cqi > levels_)
      throw InvalidInput("CQI " + std::to_string(cqi) + " outside [1, " +
                         std::to_string(levels_) + "]");
    return cqi_to_mcs_[static_cast<std::size_t>(cqi)];
  }
  // Unchecked variant for inner loops over validated matrices.
  double rate_for_cqi(int cqi) const { return rows_[cqi_to_mcs_[static_cast<std::size_t>(cqi)]].rate_bits_per_rb; }

  /// Whitespace-separated rows `mcs_index min_cqi rate`; '#' starts a comment.
  static McsTable parse(std::istream& in, int cqi_levels = 0) {
    std::vector<McsEntry> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      McsEntry e;
      if (!(ls >> e.mcs_index)) continue;
      std::string extra;
      if (!(ls >> e.min_cqi >> e.rate_bits_per_rb) || (ls >> extra))
        throw InvalidInput("MCS table line " + std::to_string(lineno) +
                           ": expected `mcs_index min_cqi rate`");
      rows.push_back(e);
    }
    return McsTable(std::move(rows), cqi_levels);
  }

  static McsTable load(const std::string& path, int cqi_levels = 0) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open MCS table: " + path);
    return parse(in, cqi_levels);
  }

 private:
  std::vector<McsEntry> rows_;
  std::vector<std::size_t> cqi_to_mcs_;
  int levels_ = 0;
};

/// 4-bit CQI spectral efficiencies x 168 resource elements per RB per TTI.
/// Same values as data/mcs_table_default.txt.
inline McsTable default_mcs_table() {
  static const double kRate[] = {25.5864,  39.3792,  63.3360,  101.0688, 147.3360,
                                 197.5344, 248.0688, 321.5688, 404.2584, 458.7240,
                                 558.1464, 655.5864, 759.9312, 859.3536, 933.1896};
  std::vector<McsEntry> rows;
  for (int i = 0; i < 15; ++i) rows.push_back({i, i + 1, kRate[i]});
  return McsTable(std::move(rows), kDefaultCqiLevels);
}

struct UeProfile {
  bool gbr = false;
  double demand_bps = 0.0;  // R_q(m); ignored for best-effort UEs
  double speed_kmh = 0.0;
};

class UePopulation {
 public:
  explicit UePopulation(std::vector<UeProfile> ues) : ues_(std::move(ues)) {
    if (ues_.empty()) throw InvalidInput("UE population must hold at least one UE");
    for (const auto& u : ues_) {
      if (u.gbr && !(u.demand_bps > 0.0)) throw InvalidInput("GBR demand must be > 0");
      if (u.speed_kmh < 0.0) throw InvalidInput("UE speed must be >= 0");
    }
  }

  /// The first round(fraction * M) UEs are GBR at `demand_bps`.
  static UePopulation uniform(std::size_t count, double gbr_fraction, double demand_bps,
                              double speed_kmh) {
    if (gbr_fraction < 0.0 || gbr_fraction > 1.0)
      throw InvalidInput("GBR fraction must lie in [0, 1]");
    const auto gbr_count =
        static_cast<std::size_t>(gbr_fraction * static_cast<double>(count) + 0.5);
    std::vector<UeProfile> ues(count);
    for (std::size_t m = 0; m < count; ++m)
      ues[m] = {m < gbr_count, m < gbr_count ? demand_bps : 0.0, speed_kmh};
    return UePopulation(std::move(ues));
  }

  std::size_t size() const { return ues_.size(); }
  const UeProfile& operator[](std::size_t m) const { return ues_[m]; }
  const std::vector<UeProfile>& ues() const { return ues_; }

  std::vector<double> speeds() const {
    std::vector<double> s;
    s.reserve(ues_.size());
    for (const auto& u : ues_) s.push_back(u.speed_kmh);
    return s;
  }

 private:
  std::vector<UeProfile> ues_;
};

/// Best-effort UEs carry this demand; the mask is the only GBR signal.
inline constexpr double kBestEffortDemand = 0.0;

struct DemandVector {
  std::vector<double> values;  // bits/s
  std::vector<bool> gbr_mask;

  std::size_t size() const { return values.size(); }

  std::size_t gbr_count() const {
    return static_cast<std::size_t>(std::count(gbr_mask.begin(), gbr_mask.end(), true));
  }

  /// ML feature layout: demands followed by the mask as 0/1, length 2M.
  std::vector<double> features() const {
    std::vector<double> f(values);
    f.reserve(2 * values.size());
    for (bool g : gbr_mask) f.push_back(g ? 1.0 : 0.0);
    return f;
  }

  friend bool operator==(const DemandVector&, const DemandVector&) = default;
};

/// C(m, n) = r(cqi_to_mcs(j(m, n))).
inline EfficiencyGrid build_efficiency_matrix(const CqiMatrix& cqi, const McsTable& table) {
  EfficiencyGrid c(cqi.ues(), cqi.rbs());
  for (std::size_t m = 0; m < cqi.ues(); ++m)
    for (std::size_t n = 0; n < cqi.rbs(); ++n)
      c(m, n) = table.rate(table.mcs_for_cqi(cqi(m, n)));
  return c;
}

inline CqiMatrix init_cqi(std::uint64_t seed, std::size_t ues, std::size_t rbs,
                          int levels = kDefaultCqiLevels) {
  if (ues == 0 || rbs == 0) throw InvalidInput("CQI matrix needs M, N >= 1");
  Rng rng(seed);
  std::vector<int> v(ues * rbs);
  for (auto& x : v) x = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(levels)));
  return CqiMatrix(ues, rbs, std::move(v), levels);
}

inline constexpr double kReferenceSpeedKmh = 200.0;

/// Clamped +/-1 random walk per entry; step probability min(1, speed / 200).
/// Two draws are consumed per entry regardless of speed so the stream stays
/// aligned across speed settings.
inline CqiMatrix step_cqi(const CqiMatrix& cqi, const std::vector<double>& speeds, Rng& rng) {
  if (speeds.size() != cqi.ues()) throw InvalidInput("speed vector length must equal M");
  CqiMatrix next = cqi;
  for (std::size_t m = 0; m < cqi.ues(); ++m) {
    const double p = std::min(1.0, speeds[m] / kReferenceSpeedKmh);
    for (std::size_t n = 0; n < cqi.rbs(); ++n) {
      const bool move = rng.uniform01() < p;
      const bool up = (rng.next_u64() >> 63) != 0;
      if (!move) continue;
      int& v = next.values_(m, n);
      v = std::clamp(v + (up ? 1 : -1), 1, cqi.levels());
    }
  }
  return next;
}

struct DemandJitter {
  double lo = 0.9;
  double hi = 1.1;
};

/// GBR UEs request R_q(m) scaled by a factor in [lo, hi]; others the sentinel.
inline DemandVector generate_demands(const UePopulation& population, std::uint64_t seed,
                                     DemandJitter jitter = {}) {
  Rng rng(seed);
  DemandVector d;
  d.values.reserve(population.size());
  d.gbr_mask.reserve(population.size());
  for (const auto& ue : population.ues()) {
    const double factor = rng.uniform(jitter.lo, jitter.hi);
    d.values.push_back(ue.gbr ? ue.demand_bps * factor : kBestEffortDemand);
    d.gbr_mask.push_back(ue.gbr);
  }
  return d;
}

}  // namespace ofdma
