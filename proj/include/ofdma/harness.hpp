#pragma once

// Per-TTI closed-loop orchestration plus the study drivers built on it:
// scenario runs, scheduler comparison, weight sweeps and the warm-start
// generations study.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ofdma/baselines.hpp"
#include "ofdma/config.hpp"
#include "ofdma/error.hpp"
#include "ofdma/fitness.hpp"
#include "ofdma/ga.hpp"
#include "ofdma/lte_model.hpp"
#include "ofdma/metrics.hpp"
#include "ofdma/ml_adapt.hpp"
#include "ofdma/rng.hpp"

namespace ofdma {

/// Cluster model and classifier trained on the same snapshot. Replaced as
/// a unit between TTIs.
struct AdaptiveModels {
  ClusterModel clusters;
  ClassifierModel classifier;
  std::size_t fitted_at = 0;
};

struct SimulationState {
  ScenarioConfig config;
  McsTable table;
  std::vector<UePopulation> regimes;  // demand populations, indexed by regime
  std::vector<double> speeds;
  CqiMatrix cqi;
  Rng channel_rng;
  DemandDatabase database;
  std::shared_ptr<const AdaptiveModels> models;
  MappingCache cache;
  PfState pf;

  explicit SimulationState(const ScenarioConfig& c)
      : config(c),
        table(c.mcs_table.empty() ? default_mcs_table() : McsTable::load(c.mcs_table)),
        speeds(c.ues, c.speed_kmh),
        cqi(init_cqi(c.seeds.channel, c.ues, c.rbs, table.cqi_levels())),
        channel_rng(derive_seed(c.seeds.channel, 0x636871ULL)),
        database(c.db_capacity),
        cache(c.clusters),
        pf(PfState::initial(c.ues, c.pf_time_constant, c.pf_floor)) {
    c.validate();
    const auto mixed = UePopulation::uniform(c.ues, c.gbr_fraction, c.gbr_demand_bps, c.speed_kmh);
    if (c.demand_profile == DemandProfile::cycled) {
      regimes.push_back(UePopulation::uniform(c.ues, 1.0, c.gbr_demand_bps, c.speed_kmh));
      regimes.push_back(UePopulation::uniform(c.ues, 0.0, c.gbr_demand_bps, c.speed_kmh));
    }
    regimes.push_back(mixed);
  }

  std::size_t bootstrap_rows() const { return config.clusters * 5; }
};

/// Everything decided before the scheduler runs in one TTI.
struct TtiInputs {
  std::size_t tti = 0;
  CqiMatrix cqi;
  DemandVector demands;
  SchedulerWeights weights;
  std::optional<std::size_t> cluster;
  std::vector<AllocationPattern> warm_seeds;
};

namespace detail {

inline void refit_models(SimulationState& s, std::size_t tti) {
  const auto features = s.database.features();
  auto next = std::make_shared<AdaptiveModels>();
  next->clusters = kmeans_fit(features, s.config.clusters, derive_seed(s.config.seeds.ml, 2 * tti),
                              s.config.kmeans_max_iters);
  const auto training = build_training_matrix(features, next->clusters);
  SvmConfig svm = s.config.svm;
  svm.seed = derive_seed(s.config.seeds.ml, 2 * tti + 1);
  next->classifier = train_classifier(training, svm);
  next->fitted_at = tti;

  // Cluster ids are arbitrary per fit; carry each cache slot over to the
  // new cluster whose centroid is nearest the old one.
  if (s.models) {
    std::vector<std::size_t> source(next->clusters.clusters());
    for (std::size_t k = 0; k < source.size(); ++k)
      source[k] = nearest_centroid(s.models->clusters.centroids, next->clusters.centroids[k]);
    s.cache.remap(source);
  }
  s.models = std::move(next);
}

}  // namespace detail

/// Channel step, demand draw, database append, periodic refit,
/// classification, weight adaptation and cache lookup.
inline TtiInputs prepare_tti(SimulationState& s, std::size_t tti) {
  const auto& c = s.config;
  s.cqi = step_cqi(s.cqi, s.speeds, s.channel_rng);

  const std::size_t regime = s.regimes.size() == 1 ? 0 : tti % s.regimes.size();
  const std::uint64_t draw = c.demand_cycle > 0 ? tti % c.demand_cycle : tti;
  TtiInputs in;
  in.tti = tti;
  in.cqi = s.cqi;
  in.demands = generate_demands(s.regimes[regime], derive_seed(c.seeds.demand, draw),
                                {1.0 - c.demand_jitter, 1.0 + c.demand_jitter});

  if (c.scheduler == SchedulerKind::ga_adaptive) {
    s.database.append(in.demands);
    if (s.database.size() >= s.bootstrap_rows() &&
        (!s.models || tti - s.models->fitted_at >= c.recluster_period))
      detail::refit_models(s, tti);
    if (s.models) {
      in.cluster = classify(s.models->classifier, in.demands);
      if (c.warm_start)
        if (const auto& hit = s.cache.lookup(*in.cluster)) in.warm_seeds.push_back(hit->pattern);
    }
  }
  in.weights = c.fixed_w1 ? SchedulerWeights::from_w1(*c.fixed_w1) : adapt_weights(in.demands);
  return in;
}

inline GaConfig ga_config_for_tti(const ScenarioConfig& c, std::size_t tti) {
  GaConfig ga = c.ga;
  ga.seed = derive_seed(c.seeds.ga, tti);
  return ga;
}

/// Applies the chosen pattern, stores it in the cache and emits the record.
inline TtiRecord commit_tti(SimulationState& s, const TtiInputs& in, const AllocationPattern& pattern,
                            const GaResult* ga) {
  TtiRecord r;
  r.tti = in.tti;
  r.scheduler = to_string(s.config.scheduler);
  r.achieved = user_rates(pattern, in.cqi, s.table);
  r.demands = in.demands;
  if (ga) {
    r.weights = in.weights;
    r.cluster = in.cluster;
    r.generations_used = ga->generations_used;
    r.combined_fitness = ga->best_fitness.combined;
    if (in.cluster) s.cache.update(*in.cluster, *ga, in.tti);
  }
  s.pf = pf_update(s.pf, r.achieved);
  return r;
}

inline TtiRecord run_tti(SimulationState& s, std::size_t tti) {
  const TtiInputs in = prepare_tti(s, tti);
  try {
    switch (s.config.scheduler) {
      case SchedulerKind::ga_adaptive: {
        const FitnessContext ctx(in.cqi, s.table, in.demands, in.weights);
        const GaResult ga = evolve(ga_config_for_tti(s.config, tti), ctx, in.warm_seeds);
        return commit_tti(s, in, ga.best_pattern, &ga);
      }
      case SchedulerKind::max_tp:
        return commit_tti(s, in, max_tp_schedule(build_efficiency_matrix(in.cqi, s.table)), nullptr);
      case SchedulerKind::pf:
        return commit_tti(s, in, pf_schedule(build_efficiency_matrix(in.cqi, s.table), s.pf), nullptr);
    }
  } catch (const DegenerateScenario& e) {
    throw DegenerateScenario("TTI " + std::to_string(tti) + ": " + e.what());
  }
  throw InvalidInput("unknown scheduler");
}

struct RunSummary {
  ThroughputStats throughput;
  double jain = 0.0;
  std::optional<double> satisfaction;
};

struct RunArtifact {
  std::vector<TtiRecord> records;
  RunSummary summary;
  std::vector<CqiMatrix> cqi_log;  // filled only when requested
};

inline RunSummary summarize(const std::vector<TtiRecord>& records) {
  RunSummary s;
  s.throughput = throughput_stats(records);
  s.jain = jain_index(per_ue_mean(records));
  s.satisfaction = mean_satisfaction(records);
  return s;
}

/// Fixed-point decimal with six places, rounded from the exact binary value.
inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  std::string s(buf, res.ptr);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

inline void write_csv_header(std::ostream& out, std::size_t ues) {
  out << "tti,scheduler,w1,w2,cluster,generations_used,combined_fitness";
  for (std::size_t m = 0; m < ues; ++m) out << ",ue_" << m;
  out << '\n';
}

inline void write_csv_row(std::ostream& out, const TtiRecord& r) {
  out << r.tti << ',' << r.scheduler << ',';
  if (r.weights) out << format_real(r.weights->w1) << ',' << format_real(r.weights->w2);
  else out << ',';
  out << ',';
  if (r.cluster) out << *r.cluster;
  out << ',';
  if (r.generations_used) out << *r.generations_used;
  out << ',';
  if (r.combined_fitness) out << format_real(*r.combined_fitness);
  for (double a : r.achieved) out << ',' << format_real(a);
  out << '\n';
}

inline void write_csv(std::ostream& out, const std::vector<TtiRecord>& records, std::size_t ues) {
  write_csv_header(out, ues);
  for (const auto& r : records) write_csv_row(out, r);
}

inline nlohmann::ordered_json config_echo(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = {{"ues", c.ues},
                   {"rbs", c.rbs},
                   {"ttis", c.ttis},
                   {"bandwidth", c.bandwidth},
                   {"speed_kmh", c.speed_kmh},
                   {"gbr_fraction", c.gbr_fraction},
                   {"gbr_demand_bps", c.gbr_demand_bps},
                   {"demand_jitter", c.demand_jitter},
                   {"demand_profile", c.demand_profile == DemandProfile::cycled ? "cycled" : "fixed"},
                   {"demand_cycle", c.demand_cycle},
                   {"scheduler", to_string(c.scheduler)},
                   {"weights", c.fixed_w1 ? nlohmann::ordered_json(*c.fixed_w1) : nlohmann::ordered_json("adaptive")},
                   {"mcs_table", c.mcs_table.empty() ? "builtin" : c.mcs_table},
                   {"warm_start", c.warm_start}};
  j["ga"] = {{"population", c.ga.population_size},
             {"generations", c.ga.max_generations},
             {"crossover_rate", c.ga.crossover_rate},
             {"mutation_rate", c.ga.mutation_rate_for(c.rbs)},
             {"tournament", c.ga.tournament_size},
             {"elite", c.ga.elite_count},
             {"stall_limit", c.ga.stall_limit}};
  j["ml"] = {{"clusters", c.clusters},
             {"recluster_period", c.recluster_period},
             {"db_capacity", c.db_capacity},
             {"kmeans_max_iters", c.kmeans_max_iters},
             {"svm_epochs", c.svm.epochs},
             {"svm_learning_rate", c.svm.learning_rate},
             {"svm_regularization", c.svm.regularization}};
  j["pf"] = {{"time_constant", c.pf_time_constant}, {"floor", c.pf_floor}};
  j["seeds"] = {{"channel", c.seeds.channel}, {"demand", c.seeds.demand}, {"ga", c.seeds.ga}, {"ml", c.seeds.ml}};
  return j;
}

inline nlohmann::ordered_json report_row(SchedulerKind kind, const RunSummary& s) {
  nlohmann::ordered_json j;
  j["scheduler"] = to_string(kind);
  j["peak"] = s.throughput.peak;
  j["average"] = s.throughput.average;
  j["edge"] = s.throughput.edge;
  j["jain"] = s.jain;
  j["satisfaction"] = s.satisfaction ? nlohmann::ordered_json(*s.satisfaction) : nlohmann::ordered_json();
  return j;
}

/// JSON document: config echo (with seeds) and the report rows.
inline void write_summary(std::ostream& out, const ScenarioConfig& config, const RunSummary& summary) {
  nlohmann::ordered_json j;
  j["config"] = config_echo(config);
  j["rows"] = nlohmann::ordered_json::array({report_row(config.scheduler, summary)});
  out << j.dump(2) << '\n';
}

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write output file: " + path);
  return out;
}

}  // namespace detail

/// Runs config.ttis TTIs. Output paths are opened before the first TTI so
/// an unwritable destination fails fast.
inline RunArtifact run_scenario(const ScenarioConfig& config, bool keep_cqi_log = false) {
  config.validate();
  std::optional<std::ofstream> csv, summary, dbfile;
  if (!config.output.csv.empty()) csv = detail::open_output(config.output.csv);
  if (!config.output.summary.empty()) summary = detail::open_output(config.output.summary);
  if (!config.output.demand_db.empty()) dbfile = detail::open_output(config.output.demand_db);

  SimulationState state(config);
  RunArtifact run;
  run.records.reserve(config.ttis);
  for (std::size_t t = 0; t < config.ttis; ++t) {
    run.records.push_back(run_tti(state, t));
    if (keep_cqi_log) run.cqi_log.push_back(state.cqi);
  }
  run.summary = summarize(run.records);

  if (csv) write_csv(*csv, run.records, config.ues);
  if (summary) write_summary(*summary, config, run.summary);
  if (dbfile) state.database.save(*dbfile);
  return run;
}

struct SweepRow {
  double w1 = 0.0;
  double jain = 0.0;
  std::optional<double> satisfaction;
  double average_throughput = 0.0;
};

/// One GA run per w1 with adaptation replaced by fixed (w1, 1 - w1).
inline std::vector<SweepRow> weight_sweep(ScenarioConfig config, const std::vector<double>& w1_grid) {
  config.scheduler = SchedulerKind::ga_adaptive;
  config.output = {};
  std::vector<SweepRow> rows;
  for (double w1 : w1_grid) {
    if (w1 < 0.0 || w1 > 1.0) throw ConfigError("w1 grid values must lie in [0, 1]");
    config.fixed_w1 = w1;
    const auto run = run_scenario(config);
    rows.push_back({w1, run.summary.jain, run.summary.satisfaction, run.summary.throughput.average});
  }
  return rows;
}

struct ComparisonRow {
  SchedulerKind scheduler;
  ThroughputStats throughput;
  double jain = 0.0;
  std::optional<double> satisfaction;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::vector<std::vector<CqiMatrix>> channel_traces;  // per row
};

/// Every scheduler sees the same seeds, hence the same channel and demands.
inline Comparison compare_schedulers(ScenarioConfig config, const std::vector<SchedulerKind>& schedulers) {
  if (schedulers.size() < 2) throw ConfigError("comparison needs at least two schedulers");
  config.output = {};
  Comparison cmp;
  for (auto kind : schedulers) {
    config.scheduler = kind;
    auto run = run_scenario(config, true);
    cmp.rows.push_back({kind, run.summary.throughput, run.summary.jain, run.summary.satisfaction});
    cmp.channel_traces.push_back(std::move(run.cqi_log));
  }
  return cmp;
}

struct WarmstartSample {
  std::size_t repeat = 0;
  std::size_t tti = 0;
  bool cache_hit = false;
  std::size_t warm_generations = 0;
  std::size_t random_generations = 0;
};

struct WarmstartReport {
  std::vector<WarmstartSample> samples;
  double median_warm = 0.0;
  double median_random = 0.0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidInput("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline constexpr double kConvergedFraction = 0.95;

/// Threshold at 95% of the reference fitness, measured on the side of zero
/// that keeps it below the reference for negative values too.
inline double fitness_threshold(double reference) {
  return reference - (1.0 - kConvergedFraction) * std::abs(reference);
}

/// For every post-bootstrap TTI, runs the GA twice on the same context and
/// GA seed: once with the cached pattern injected, once from a random
/// population. The warm-started result drives the loop.
inline WarmstartReport warmstart_study(ScenarioConfig config, std::size_t repeats) {
  config.scheduler = SchedulerKind::ga_adaptive;
  config.warm_start = true;
  config.output = {};
  WarmstartReport report;
  std::vector<double> warm, cold;
  for (std::size_t rep = 0; rep < repeats; ++rep) {
    ScenarioConfig rc = config;
    rc.seeds.channel = derive_seed(config.seeds.channel, rep);
    rc.seeds.ga = derive_seed(config.seeds.ga, rep);
    rc.seeds.ml = derive_seed(config.seeds.ml, rep);
    SimulationState state(rc);
    for (std::size_t t = 0; t < rc.ttis; ++t) {
      const TtiInputs in = prepare_tti(state, t);
      const FitnessContext ctx(in.cqi, state.table, in.demands, in.weights);
      const GaConfig ga = ga_config_for_tti(rc, t);
      const GaResult warm_run = evolve(ga, ctx, in.warm_seeds);
      if (in.cluster) {
        const GaResult cold_run = in.warm_seeds.empty() ? warm_run : evolve(ga, ctx);
        const double thr = fitness_threshold(
            std::max(warm_run.best_fitness.combined, cold_run.best_fitness.combined));
        WarmstartSample s{rep, t, !in.warm_seeds.empty(),
                          generations_to_reach(warm_run.fitness_trace, thr),
                          generations_to_reach(cold_run.fitness_trace, thr)};
        warm.push_back(static_cast<double>(s.warm_generations));
        cold.push_back(static_cast<double>(s.random_generations));
        report.samples.push_back(s);
      }
      commit_tti(state, in, warm_run.best_pattern, &warm_run);
    }
  }
  if (!report.samples.empty()) {
    report.median_warm = median(warm);
    report.median_random = median(cold);
  }
  return report;
}

}  // namespace ofdma
