// ofdma_sim: command-line front end for the adaptive GA scheduler.
//
//   ofdma_sim simulate  <config> [--csv F] [--summary F] [--demand-db F]
//   ofdma_sim compare   <config> [--schedulers a,b,..] [--report F]
//   ofdma_sim sweep     <config> [--w1-grid 0,0.25,..] [--out F]
//   ofdma_sim warmstart <config> [--repeats N] [--out F]
//   ofdma_sim cluster   <demand-db> --k K [--seed S]
//
// Every config subcommand accepts --set section.key=value (repeatable).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ofdma/harness.hpp"

namespace {

using ofdma::ExitCode;

int code(ExitCode c) { return static_cast<int>(c); }

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw ofdma::IoError("cannot write output file: " + path);
  return file;
}

std::string optional_real(const std::optional<double>& v) {
  return v ? ofdma::format_real(*v) : std::string("NA");
}

struct Common {
  std::string config;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "scenario config file (INI)")->required();
  cmd->add_option("--set", c.overrides, "override a config key, section.key=value");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive GA-based OFDMA downlink scheduler simulator"};
  app.require_subcommand(1);

  Common sim_opts;
  std::string csv, summary, demand_db;
  auto* simulate = app.add_subcommand("simulate", "run one scenario and write CSV / summary");
  add_common(simulate, sim_opts);
  simulate->add_option("--csv", csv, "per-TTI CSV output");
  simulate->add_option("--summary", summary, "JSON summary output");
  simulate->add_option("--demand-db", demand_db, "demand database export");

  Common cmp_opts;
  std::vector<std::string> schedulers{"ga_adaptive", "max_tp", "pf"};
  std::string report;
  auto* compare = app.add_subcommand("compare", "run several schedulers on one channel trace");
  add_common(compare, cmp_opts);
  compare->add_option("--schedulers", schedulers, "scheduler list")->delimiter(',');
  compare->add_option("--report", report, "JSON report output (default stdout)");

  Common sweep_opts;
  std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "fixed-weight sweep over w1");
  add_common(sweep, sweep_opts);
  sweep->add_option("--w1-grid", grid, "w1 values")->delimiter(',');
  sweep->add_option("--out", sweep_out, "CSV output (default stdout)");

  Common warm_opts;
  std::size_t repeats = 20;
  std::string warm_out;
  auto* warm = app.add_subcommand("warmstart", "generations-to-threshold with/without warm start");
  add_common(warm, warm_opts);
  warm->add_option("--repeats", repeats, "independent repeats")->check(CLI::PositiveNumber);
  warm->add_option("--out", warm_out, "per-sample CSV output (default stdout)");

  std::string db_path;
  std::size_t k = 3;
  std::uint64_t seed = 1;
  auto* cluster = app.add_subcommand("cluster", "k-means over a recorded demand database");
  cluster->add_option("demand_db", db_path, "demand database file")->required();
  cluster->add_option("--k", k, "cluster count")->required()->check(CLI::PositiveNumber);
  cluster->add_option("--seed", seed, "seeding RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::config_error);
  }

  try {
    if (*simulate) {
      auto cfg = ofdma::load_config(sim_opts.config, sim_opts.overrides);
      if (!csv.empty()) cfg.output.csv = csv;
      if (!summary.empty()) cfg.output.summary = summary;
      if (!demand_db.empty()) cfg.output.demand_db = demand_db;
      const auto run = ofdma::run_scenario(cfg);
      if (cfg.output.csv.empty()) ofdma::write_csv(std::cout, run.records, cfg.ues);
      if (cfg.output.summary.empty()) ofdma::write_summary(std::cerr, cfg, run.summary);
    } else if (*compare) {
      const auto cfg = ofdma::load_config(cmp_opts.config, cmp_opts.overrides);
      std::vector<ofdma::SchedulerKind> kinds;
      for (const auto& s : schedulers) kinds.push_back(ofdma::parse_scheduler(s));
      std::ofstream file;
      std::ostream& out = open_or_stdout(report, file);
      const auto cmp = ofdma::compare_schedulers(cfg, kinds);
      nlohmann::ordered_json j;
      j["config"] = ofdma::config_echo(cfg);
      j["rows"] = nlohmann::ordered_json::array();
      for (const auto& row : cmp.rows)
        j["rows"].push_back(ofdma::report_row(row.scheduler, {row.throughput, row.jain, row.satisfaction}));
      out << j.dump(2) << '\n';
    } else if (*sweep) {
      const auto cfg = ofdma::load_config(sweep_opts.config, sweep_opts.overrides);
      std::ofstream file;
      std::ostream& out = open_or_stdout(sweep_out, file);
      out << "w1,jain,satisfaction,average_throughput\n";
      for (const auto& row : ofdma::weight_sweep(cfg, grid))
        out << ofdma::format_real(row.w1) << ',' << ofdma::format_real(row.jain) << ','
            << optional_real(row.satisfaction) << ',' << ofdma::format_real(row.average_throughput) << '\n';
    } else if (*warm) {
      const auto cfg = ofdma::load_config(warm_opts.config, warm_opts.overrides);
      std::ofstream file;
      std::ostream& out = open_or_stdout(warm_out, file);
      const auto rep = ofdma::warmstart_study(cfg, repeats);
      out << "repeat,tti,cache_hit,warm_generations,random_generations\n";
      for (const auto& s : rep.samples)
        out << s.repeat << ',' << s.tti << ',' << (s.cache_hit ? 1 : 0) << ',' << s.warm_generations << ','
            << s.random_generations << '\n';
      std::cerr << "median generations to 95% fitness: warm " << rep.median_warm << ", random "
                << rep.median_random << '\n';
    } else if (*cluster) {
      const auto db = ofdma::DemandDatabase::load(db_path, std::max<std::size_t>(1, 1u << 30));
      const auto model = ofdma::kmeans_fit(db, k, seed);
      std::vector<std::size_t> sizes(k, 0);
      for (auto a : model.assignment) ++sizes[a];
      std::cout << "rows " << db.size() << ", width " << db.width() << ", K " << k << ", iterations "
                << model.iterations << ", inertia " << ofdma::format_real(model.inertia) << '\n';
      for (std::size_t c = 0; c < k; ++c) {
        std::cout << "cluster " << c << " size " << sizes[c] << " centroid";
        for (double v : model.centroids[c]) std::cout << ' ' << ofdma::format_real(v);
        std::cout << '\n';
      }
      std::cout << "assignment";
      for (auto a : model.assignment) std::cout << ' ' << a;
      std::cout << '\n';
    }
  } catch (const ofdma::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return code(ExitCode::config_error);
  } catch (const ofdma::DegenerateScenario& e) {
    std::cerr << "degenerate scenario: " << e.what() << '\n';
    return code(ExitCode::degenerate_scenario);
  } catch (const ofdma::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return code(ExitCode::io_error);
  } catch (const ofdma::InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return code(ExitCode::degenerate_scenario);
  } catch (const ofdma::UndefinedMetric& e) {
    std::cerr << "undefined metric: " << e.what() << '\n';
    return code(ExitCode::degenerate_scenario);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return code(ExitCode::config_error);
  }
  return code(ExitCode::ok);
}
