#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "ofdma/harness.hpp"

using namespace ofdma;

namespace {

ScenarioConfig small() {
  ScenarioConfig c;
  c.ues = 6;
  c.rbs = 10;
  c.ttis = 24;
  c.speed_kmh = 20.0;
  c.ga.population_size = 30;
  c.ga.max_generations = 40;
  c.clusters = 2;
  c.recluster_period = 5;
  return c;
}

std::string csv_of(const ScenarioConfig& c) {
  std::ostringstream out;
  write_csv(out, run_scenario(c).records, c.ues);
  return out.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST(Config, DefaultsWithoutFile) {
  std::istringstream empty("");
  const auto c = parse_config(empty);
  EXPECT_EQ(c.ues, 25u);
  EXPECT_EQ(c.rbs, 25u);
  EXPECT_EQ(c.ga.population_size, 100u);
  EXPECT_FALSE(c.fixed_w1);
}

TEST(Config, SectionsAndOverrides) {
  std::istringstream in(
      "[scenario]\nues = 8\nbandwidth = 10MHz\nweights = 0.3\nscheduler = pf\n"
      "[ga]\nmutation_rate = 0.2\n[seeds]\nga = 77\n");
  const auto c = parse_config(in, {"scenario.ttis=7", "seeds.ga=5"});
  EXPECT_EQ(c.ues, 8u);
  EXPECT_EQ(c.rbs, 50u);
  EXPECT_EQ(c.ttis, 7u);
  EXPECT_EQ(c.scheduler, SchedulerKind::pf);
  EXPECT_DOUBLE_EQ(*c.fixed_w1, 0.3);
  EXPECT_DOUBLE_EQ(*c.ga.mutation_rate, 0.2);
  EXPECT_EQ(c.seeds.ga, 5u);
}

TEST(Config, Rejections) {
  auto bad = [](const std::string& text, std::vector<std::string> o = {}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_config(in, o), ConfigError) << text;
  };
  bad("[scenario]\nues = 0\n");
  bad("[scenario]\nues = -3\n");
  bad("[scenario]\nrbs = many\n");
  bad("[scenario]\ncolour = red\n");
  bad("[extras]\nx = 1\n");
  bad("[scenario]\nbandwidth = 7MHz\n");
  bad("[scenario]\nweights = 1.5\n");
  bad("[scenario]\nscheduler = round_robin\n");
  bad("[ga]\nelite = 100\n");
  bad("", {"no_dot=1"});
  EXPECT_THROW(load_config("/nonexistent/file.ini"), ConfigError);
}

TEST(Config, ShippedFilesParse) {
  for (const char* name : {"table1_5mhz.ini", "nongbr_10mhz.ini", "high_mobility_gbr.ini", "warmstart.ini"})
    EXPECT_NO_THROW(load_config(std::string(OFDMA_CONFIG_DIR) + "/" + name)) << name;
}

TEST(Csv, HeaderRowsAndFormatting) {
  auto c = small();
  const auto out = lines(csv_of(c));
  ASSERT_EQ(out.size(), c.ttis + 1);
  EXPECT_EQ(out[0], "tti,scheduler,w1,w2,cluster,generations_used,combined_fitness,ue_0,ue_1,ue_2,ue_3,ue_4,ue_5");
  EXPECT_EQ(out[1].rfind("0,ga_adaptive,", 0), 0u);
  // No model exists at TTI 0, so the cluster field is empty.
  EXPECT_NE(out[1].find(",,"), std::string::npos);
  EXPECT_EQ(format_real(-0.0), "0.000000");
  EXPECT_EQ(format_real(1.0 / 3.0), "0.333333");
}

TEST(Csv, BaselineRowsLeaveGaFieldsEmpty) {
  auto c = small();
  c.scheduler = SchedulerKind::max_tp;
  const auto out = lines(csv_of(c));
  EXPECT_EQ(out[1].rfind("0,max_tp,,,,,,", 0), 0u);
}

TEST(Run, DeterministicAcrossRuns) {
  const auto c = small();
  EXPECT_EQ(csv_of(c), csv_of(c));
  auto d = c;
  d.seeds.ga = 99;
  EXPECT_NE(csv_of(c), csv_of(d));
}

TEST(Run, RecordsRespectCapacityAndWeightRule) {
  const auto c = small();
  SimulationState state(c);
  const auto table = default_mcs_table();
  for (std::size_t t = 0; t < c.ttis; ++t) {
    const auto r = run_tti(state, t);
    ASSERT_TRUE(r.weights);
    EXPECT_EQ(*r.weights, adapt_weights(r.demands));
    EXPECT_NEAR(r.weights->w1 + r.weights->w2, 1.0, 1e-12);
    double total = 0.0;
    for (double a : r.achieved) total += a;
    double cap = 0.0;
    const auto eff = build_efficiency_matrix(state.cqi, table);
    for (std::size_t n = 0; n < c.rbs; ++n) {
      double best = 0.0;
      for (std::size_t m = 0; m < c.ues; ++m) best = std::max(best, eff(m, n));
      cap += best;
    }
    EXPECT_LE(total, cap + 1e-9);
    EXPECT_LE(*r.generations_used, c.ga.max_generations);
    if (t < state.bootstrap_rows() - 1) EXPECT_FALSE(r.cluster);
    else EXPECT_TRUE(r.cluster);
  }
}

TEST(Run, RegimeWeights) {
  auto c = small();
  c.gbr_fraction = 0.0;
  for (const auto& r : run_scenario(c).records) EXPECT_EQ(*r.weights, (SchedulerWeights{1.0, 0.0}));
  c.gbr_fraction = 1.0;
  for (const auto& r : run_scenario(c).records) EXPECT_EQ(*r.weights, (SchedulerWeights{0.0, 1.0}));
}

TEST(Run, DemandDatabaseStaysBounded) {
  auto c = small();
  c.db_capacity = 7;
  c.ttis = 30;
  SimulationState state(c);
  for (std::size_t t = 0; t < c.ttis; ++t) run_tti(state, t);
  EXPECT_EQ(state.database.size(), 7u);
}

TEST(Run, UnwritableOutputFailsBeforeSimulating) {
  auto c = small();
  c.output.csv = "/nonexistent-dir/out.csv";
  EXPECT_THROW(run_scenario(c), IoError);
}

TEST(Run, WritesRequestedFiles) {
  auto c = small();
  const auto dir = std::filesystem::temp_directory_path() / "ofdma_harness_test";
  std::filesystem::create_directories(dir);
  c.output.csv = (dir / "a.csv").string();
  c.output.summary = (dir / "a.json").string();
  c.output.demand_db = (dir / "a.db").string();
  run_scenario(c);
  const auto j = nlohmann::json::parse(std::ifstream(c.output.summary));
  EXPECT_EQ(j["config"]["seeds"]["ga"], c.seeds.ga);
  EXPECT_EQ(j["rows"][0]["scheduler"], "ga_adaptive");
  EXPECT_EQ(DemandDatabase::load(c.output.demand_db).size(), c.ttis);
  std::filesystem::remove_all(dir);
}

TEST(Compare, SchedulersShareTheChannel) {
  const auto cmp = compare_schedulers(small(), {SchedulerKind::ga_adaptive, SchedulerKind::max_tp, SchedulerKind::pf});
  ASSERT_EQ(cmp.rows.size(), 3u);
  EXPECT_EQ(cmp.channel_traces[0], cmp.channel_traces[1]);
  EXPECT_EQ(cmp.channel_traces[0], cmp.channel_traces[2]);
  const auto self = compare_schedulers(small(), {SchedulerKind::pf, SchedulerKind::pf});
  EXPECT_EQ(self.rows[0].jain, self.rows[1].jain);
  EXPECT_EQ(self.rows[0].throughput.average, self.rows[1].throughput.average);
  EXPECT_THROW(compare_schedulers(small(), {SchedulerKind::pf}), ConfigError);
}

TEST(Sweep, OneRowPerWeight) {
  auto c = small();
  c.ttis = 8;
  const auto rows = weight_sweep(c, {0.0, 1.0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].w1, 0.0);
  EXPECT_EQ(rows[1].w1, 1.0);
  EXPECT_THROW(weight_sweep(c, {1.2}), ConfigError);
}

TEST(Warmstart, FrozenChannelRepeatedDemandsFavourWarmStart) {
  auto c = small();
  c.speed_kmh = 0.0;
  c.demand_profile = DemandProfile::cycled;
  c.demand_cycle = 3;
  c.ttis = 30;
  const auto report = warmstart_study(c, 2);
  ASSERT_FALSE(report.samples.empty());
  EXPECT_LE(report.median_warm, report.median_random);
  for (const auto& s : report.samples) EXPECT_LE(s.warm_generations, c.ga.max_generations + 1);
}

TEST(Warmstart, Threshold) {
  EXPECT_DOUBLE_EQ(fitness_threshold(1.0), 0.95);
  EXPECT_DOUBLE_EQ(fitness_threshold(-1.0), -1.05);
  EXPECT_DOUBLE_EQ(fitness_threshold(0.0), 0.0);
}
