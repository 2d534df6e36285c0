#pragma once

// Scenario configuration and its INI representation.
//
//   [scenario] ues rbs ttis bandwidth speed_kmh gbr_fraction gbr_demand_bps
//              demand_jitter demand_profile demand_cycle scheduler weights
//              mcs_table warm_start
//   [ga]       population generations crossover_rate mutation_rate
//              tournament elite stall_limit
//   [ml]       clusters recluster_period db_capacity kmeans_max_iters
//              svm_epochs svm_learning_rate svm_regularization
//   [pf]       time_constant floor
//   [seeds]    channel demand ga ml
//   [output]   csv summary demand_db

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ofdma/error.hpp"
#include "ofdma/fitness.hpp"
#include "ofdma/ga.hpp"
#include "ofdma/lte_model.hpp"
#include "ofdma/ml_adapt.hpp"

namespace ofdma {

enum class SchedulerKind { ga_adaptive, max_tp, pf };

inline std::string to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::ga_adaptive: return "ga_adaptive";
    case SchedulerKind::max_tp: return "max_tp";
    case SchedulerKind::pf: return "pf";
  }
  return "?";
}

inline SchedulerKind parse_scheduler(const std::string& s) {
  if (s == "ga_adaptive") return SchedulerKind::ga_adaptive;
  if (s == "max_tp") return SchedulerKind::max_tp;
  if (s == "pf") return SchedulerKind::pf;
  throw ConfigError("unknown scheduler '" + s + "' (expected ga_adaptive, max_tp or pf)");
}

/// fixed: every TTI uses the configured GBR split.
/// cycled: TTIs rotate through all-GBR, all-best-effort and the configured
/// split, giving three recurring demand regimes.
enum class DemandProfile { fixed, cycled };

/// RB count for an LTE channel bandwidth label.
inline std::size_t rbs_for_bandwidth(const std::string& label) {
  static const std::map<std::string, std::size_t> kRbs = {
      {"1.4MHz", 6}, {"3MHz", 15}, {"5MHz", 25}, {"10MHz", 50}, {"15MHz", 75}, {"20MHz", 100}};
  auto it = kRbs.find(label);
  if (it == kRbs.end()) throw ConfigError("unknown bandwidth label '" + label + "'");
  return it->second;
}

struct Seeds {
  std::uint64_t channel = 1;
  std::uint64_t demand = 2;
  std::uint64_t ga = 3;
  std::uint64_t ml = 4;
};

struct OutputPaths {
  std::string csv;
  std::string summary;
  std::string demand_db;
};

struct ScenarioConfig {
  std::size_t ues = 25;
  std::size_t rbs = 25;
  std::size_t ttis = 20;
  std::string bandwidth = "5MHz";
  double speed_kmh = 5.0;
  double gbr_fraction = 0.5;
  double gbr_demand_bps = 300e3;
  double demand_jitter = 0.1;
  DemandProfile demand_profile = DemandProfile::fixed;
  std::size_t demand_cycle = 0;  // 0: fresh demand draw every TTI
  SchedulerKind scheduler = SchedulerKind::ga_adaptive;
  std::optional<double> fixed_w1;  // overrides weight adaptation when set
  bool warm_start = true;
  std::string mcs_table;  // empty: built-in table

  GaConfig ga;

  std::size_t clusters = 3;
  std::size_t recluster_period = 10;
  std::size_t db_capacity = 1000;
  std::size_t kmeans_max_iters = 100;
  SvmConfig svm;

  double pf_time_constant = 10.0;
  double pf_floor = 1.0;

  Seeds seeds;
  OutputPaths output;

  void validate() const {
    if (ues < 1 || rbs < 1 || ttis < 1) throw ConfigError("ues, rbs and ttis must be >= 1");
    if (gbr_fraction < 0.0 || gbr_fraction > 1.0) throw ConfigError("gbr_fraction must lie in [0, 1]");
    if (!(gbr_demand_bps > 0.0)) throw ConfigError("gbr_demand_bps must be > 0");
    if (demand_jitter < 0.0 || demand_jitter >= 1.0) throw ConfigError("demand_jitter must lie in [0, 1)");
    if (speed_kmh < 0.0) throw ConfigError("speed_kmh must be >= 0");
    if (fixed_w1 && (*fixed_w1 < 0.0 || *fixed_w1 > 1.0)) throw ConfigError("weights must lie in [0, 1]");
    if (clusters < 1) throw ConfigError("clusters must be >= 1");
    if (recluster_period < 1) throw ConfigError("recluster_period must be >= 1");
    if (db_capacity < clusters) throw ConfigError("db_capacity must be >= clusters");
    if (pf_time_constant < 1.0) throw ConfigError("pf time_constant must be >= 1");
    if (!(pf_floor > 0.0)) throw ConfigError("pf floor must be > 0");
    try {
      ga.validate();
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
  }
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> kKeys = {
      {"scenario",
       {"ues", "rbs", "ttis", "bandwidth", "speed_kmh", "gbr_fraction", "gbr_demand_bps",
        "demand_jitter", "demand_profile", "demand_cycle", "scheduler", "weights", "mcs_table",
        "warm_start"}},
      {"ga",
       {"population", "generations", "crossover_rate", "mutation_rate", "tournament", "elite",
        "stall_limit"}},
      {"ml",
       {"clusters", "recluster_period", "db_capacity", "kmeans_max_iters", "svm_epochs",
        "svm_learning_rate", "svm_regularization"}},
      {"pf", {"time_constant", "floor"}},
      {"seeds", {"channel", "demand", "ga", "ml"}},
      {"output", {"csv", "summary", "demand_db"}},
  };
  return kKeys;
}

template <typename T>
T read(const boost::property_tree::ptree& tree, const std::string& key, T fallback) {
  auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  std::istringstream in(*node);
  T value;
  if constexpr (std::is_same_v<T, bool>) {
    std::string s;
    in >> s;
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + *node + "'");
  } else if constexpr (std::is_same_v<T, std::string>) {
    return *node;
  } else {
    if (!(in >> value) || !(in >> std::ws).eof())
      throw ConfigError("key '" + key + "': cannot parse '" + *node + "'");
    if constexpr (std::is_unsigned_v<T>)
      if (node->find('-') != std::string::npos)
        throw ConfigError("key '" + key + "' must be non-negative");
    return value;
  }
}

}  // namespace detail

/// Applies `section.key=value` overrides on top of a parsed tree.
inline void apply_overrides(boost::property_tree::ptree& tree, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + o + "' must look like section.key=value");
    tree.put(o.substr(0, eq), o.substr(eq + 1));
  }
}

inline ScenarioConfig config_from_tree(const boost::property_tree::ptree& tree) {
  using detail::read;
  for (const auto& [section, body] : tree) {
    auto known = detail::known_keys().find(section);
    if (known == detail::known_keys().end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, unused] : body)
      if (!known->second.count(key)) throw ConfigError("unknown config key " + section + "." + key);
  }

  ScenarioConfig c;
  c.bandwidth = read<std::string>(tree, "scenario.bandwidth", c.bandwidth);
  c.rbs = rbs_for_bandwidth(c.bandwidth);
  c.rbs = read<std::size_t>(tree, "scenario.rbs", c.rbs);
  c.ues = read<std::size_t>(tree, "scenario.ues", c.ues);
  c.ttis = read<std::size_t>(tree, "scenario.ttis", c.ttis);
  c.speed_kmh = read<double>(tree, "scenario.speed_kmh", c.speed_kmh);
  c.gbr_fraction = read<double>(tree, "scenario.gbr_fraction", c.gbr_fraction);
  c.gbr_demand_bps = read<double>(tree, "scenario.gbr_demand_bps", c.gbr_demand_bps);
  c.demand_jitter = read<double>(tree, "scenario.demand_jitter", c.demand_jitter);
  const auto profile = read<std::string>(tree, "scenario.demand_profile", "fixed");
  if (profile == "fixed")
    c.demand_profile = DemandProfile::fixed;
  else if (profile == "cycled")
    c.demand_profile = DemandProfile::cycled;
  else
    throw ConfigError("demand_profile must be fixed or cycled");
  c.demand_cycle = read<std::size_t>(tree, "scenario.demand_cycle", c.demand_cycle);
  c.scheduler = parse_scheduler(read<std::string>(tree, "scenario.scheduler", to_string(c.scheduler)));
  const auto weights = read<std::string>(tree, "scenario.weights", "adaptive");
  if (weights != "adaptive") c.fixed_w1 = read<double>(tree, "scenario.weights", 0.0);
  c.mcs_table = read<std::string>(tree, "scenario.mcs_table", c.mcs_table);
  c.warm_start = read<bool>(tree, "scenario.warm_start", c.warm_start);

  c.ga.population_size = read<std::size_t>(tree, "ga.population", c.ga.population_size);
  c.ga.max_generations = read<std::size_t>(tree, "ga.generations", c.ga.max_generations);
  c.ga.crossover_rate = read<double>(tree, "ga.crossover_rate", c.ga.crossover_rate);
  if (tree.get_optional<std::string>("ga.mutation_rate"))
    c.ga.mutation_rate = read<double>(tree, "ga.mutation_rate", 0.0);
  c.ga.tournament_size = read<std::size_t>(tree, "ga.tournament", c.ga.tournament_size);
  c.ga.elite_count = read<std::size_t>(tree, "ga.elite", c.ga.elite_count);
  c.ga.stall_limit = read<std::size_t>(tree, "ga.stall_limit", c.ga.stall_limit);

  c.clusters = read<std::size_t>(tree, "ml.clusters", c.clusters);
  c.recluster_period = read<std::size_t>(tree, "ml.recluster_period", c.recluster_period);
  c.db_capacity = read<std::size_t>(tree, "ml.db_capacity", c.db_capacity);
  c.kmeans_max_iters = read<std::size_t>(tree, "ml.kmeans_max_iters", c.kmeans_max_iters);
  c.svm.epochs = read<std::size_t>(tree, "ml.svm_epochs", c.svm.epochs);
  c.svm.learning_rate = read<double>(tree, "ml.svm_learning_rate", c.svm.learning_rate);
  c.svm.regularization = read<double>(tree, "ml.svm_regularization", c.svm.regularization);

  c.pf_time_constant = read<double>(tree, "pf.time_constant", c.pf_time_constant);
  c.pf_floor = read<double>(tree, "pf.floor", c.pf_floor);

  c.seeds.channel = read<std::uint64_t>(tree, "seeds.channel", c.seeds.channel);
  c.seeds.demand = read<std::uint64_t>(tree, "seeds.demand", c.seeds.demand);
  c.seeds.ga = read<std::uint64_t>(tree, "seeds.ga", c.seeds.ga);
  c.seeds.ml = read<std::uint64_t>(tree, "seeds.ml", c.seeds.ml);

  c.output.csv = read<std::string>(tree, "output.csv", "");
  c.output.summary = read<std::string>(tree, "output.summary", "");
  c.output.demand_db = read<std::string>(tree, "output.demand_db", "");

  c.validate();
  return c;
}

inline ScenarioConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {}) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  apply_overrides(tree, overrides);
  return config_from_tree(tree);
}

inline ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, overrides);
}

}  // namespace ofdma
