#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rgc/harness.hpp"
#include "rgc/verify.hpp"

namespace {

using nlohmann::json;

json base_config() {
  return json::parse(R"({
    "manifold": {"kind": "torus", "d": 2},
    "n_list": [300],
    "offsets": [{"k": 1, "c": 2}, {"k": 0, "c": 0}],
    "trials": 10,
    "master_seed": 17,
    "k_range": [0, 2],
    "epsilon": 0.1,
    "dim_cap": 3,
    "toggles": {"run_morse": true, "run_theta": false, "run_coverage": true},
    "out": "unused.csv"
  })");
}

std::size_t lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

std::string rows_text(const rgc::SweepConfig& cfg, const rgc::SweepOutput& out) {
  std::ostringstream os;
  os << rgc::sweep_header(cfg) << '\n';
  for (const auto& t : out.rows) rgc::write_row(cfg, t, os);
  return os.str();
}

std::string summary_text(const rgc::SweepConfig& cfg, const rgc::SweepOutput& out) {
  std::ostringstream os;
  rgc::write_summary(cfg, out.summary, os);
  return os.str();
}

TEST(SweepConfig, ParsesAndRoundTrips) {
  const auto cfg = rgc::SweepConfig::from_json(base_config());
  EXPECT_EQ(cfg.trials, 10);
  EXPECT_EQ(cfg.offsets.size(), 2u);
  EXPECT_TRUE(cfg.toggles.run_morse);
  const auto again = rgc::SweepConfig::from_json(cfg.to_json());
  EXPECT_EQ(again.to_json(), cfg.to_json());
}

TEST(SweepConfig, SphereDefaultsToUnitVolume) {
  auto j = base_config();
  j["manifold"] = {{"kind", "sphere"}, {"d", 2}};
  j.erase("dim_cap");
  const auto cfg = rgc::SweepConfig::from_json(j);
  EXPECT_NEAR(cfg.manifold.volume(), 1.0, 1e-12);
  EXPECT_EQ(cfg.dim_cap, 3);
}

TEST(SweepConfig, RejectsBadConfigs) {
  auto j = base_config();
  j["surprise"] = 1;
  EXPECT_THROW(rgc::SweepConfig::from_json(j), rgc::InvalidInput);
  j = base_config();
  j["trials"] = 0;
  EXPECT_THROW(rgc::SweepConfig::from_json(j), rgc::InvalidInput);
  j = base_config();
  j["manifold"]["kind"] = "klein";
  EXPECT_THROW(rgc::SweepConfig::from_json(j), rgc::InvalidInput);
  j = base_config();
  j["offsets"] = json::array({{{"k", 1}, {"c", 200}}});
  EXPECT_THROW(rgc::SweepConfig::from_json(j), rgc::OutOfRegime);
  j = base_config();
  j.erase("trials");
  EXPECT_THROW(rgc::SweepConfig::from_json(j), rgc::InvalidInput);
  j = base_config();
  j["k_range"] = {0, 3};
  EXPECT_THROW(rgc::SweepConfig::from_json(j), rgc::InvalidInput);
}

TEST(Sweep, Bookkeeping) {
  const auto cfg = rgc::SweepConfig::from_json(base_config());
  const auto out = rgc::run_sweep(cfg);
  EXPECT_EQ(out.rows.size(), 20u);
  EXPECT_EQ(lines(rows_text(cfg, out)), 21u);
  EXPECT_EQ(lines(summary_text(cfg, out)), 3u);
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    EXPECT_EQ(out.rows[i].cell, i / 10);
    EXPECT_EQ(out.rows[i].trial, i % 10);
    EXPECT_TRUE(out.rows[i].passed()) << out.rows[i].status();
    for (std::size_t k = 0; k < out.rows[i].match.size(); ++k)
      EXPECT_EQ(out.rows[i].match[k], out.rows[i].betti[k] == out.rows[i].manifold_betti[k]);
  }
}

TEST(Sweep, EmptyCellList) {
  auto j = base_config();
  j["n_list"] = json::array();
  const auto cfg = rgc::SweepConfig::from_json(j);
  const auto out = rgc::run_sweep(cfg);
  EXPECT_TRUE(out.rows.empty());
  EXPECT_TRUE(out.ok());
  EXPECT_EQ(lines(rows_text(cfg, out)), 1u);
}

TEST(Sweep, DeterministicAndSchedulingIndependent) {
  auto j = base_config();
  j["toggles"]["run_theta"] = true;
  j["k_range"] = {1, 1};
  const auto cfg = rgc::SweepConfig::from_json(j);
  const auto a = rgc::run_sweep(cfg, 1);
  const auto b = rgc::run_sweep(cfg, 1);
  const auto c = rgc::run_sweep(cfg, 3);
  EXPECT_EQ(rows_text(cfg, a), rows_text(cfg, b));
  EXPECT_EQ(rows_text(cfg, a), rows_text(cfg, c));
  EXPECT_EQ(summary_text(cfg, a), summary_text(cfg, c));
}

TEST(Sweep, SparseRegimeDoesNotMatch) {
  auto j = base_config();
  j["n_list"] = {5000};
  j["offsets"] = json::array({{{"k", 0}, {"c", 0.5 - std::log(5000.0)}}});
  j["k_range"] = {1, 1};
  j["toggles"] = json::object();
  j["trials"] = 3;
  const auto cfg = rgc::SweepConfig::from_json(j);
  const auto out = rgc::run_sweep(cfg);
  for (const auto& t : out.rows) {
    EXPECT_FALSE(t.match[0]);
    EXPECT_GT(t.betti[0], static_cast<std::int64_t>(t.n_realized / 5));
    EXPECT_TRUE(t.passed());
  }
}

TEST(Sweep, UpperBranchMatchesTorus) {
  auto j = base_config();
  j["n_list"] = {1000};
  j["offsets"] = json::array({{{"k", 1}, {"c", 6}}});
  j["toggles"] = json::object();
  j["trials"] = 4;
  const auto cfg = rgc::SweepConfig::from_json(j);
  const auto out = rgc::run_sweep(cfg);
  for (const auto& t : out.rows) {
    EXPECT_EQ(t.betti, (std::vector<std::int64_t>{1, 2, 1}));
    EXPECT_TRUE(t.full_match());
  }
}

TEST(Sweep, WritesDeterministicFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "rgc_harness_test";
  std::filesystem::create_directories(dir);
  auto cfg = rgc::SweepConfig::from_json(base_config());
  cfg.trials = 2;
  const auto out = (dir / "sweep.csv").string();
  rgc::write_sweep(cfg, rgc::run_sweep(cfg), out);
  const auto first = rgc::detail::slurp(out) + rgc::detail::slurp(rgc::sibling_path(out, "summary").string());
  rgc::write_sweep(cfg, rgc::run_sweep(cfg, 2), out);
  const auto second = rgc::detail::slurp(out) + rgc::detail::slurp(rgc::sibling_path(out, "summary").string());
  EXPECT_EQ(first, second);
  EXPECT_TRUE(std::filesystem::exists(rgc::sibling_path(out, "timing")));
  std::filesystem::remove_all(dir);
}

TEST(Wilson, KnownValues) {
  const auto [lo, hi] = rgc::wilson_interval(20, 20);
  EXPECT_NEAR(lo, 20.0 / (20.0 + 1.959963984540054 * 1.959963984540054), 1e-12);
  EXPECT_EQ(hi, 1.0);
  const auto [l2, h2] = rgc::wilson_interval(50, 100);
  EXPECT_NEAR(l2, 0.4038, 5e-5);
  EXPECT_NEAR(h2, 0.5962, 5e-5);
  const auto [l3, h3] = rgc::wilson_interval(0, 0);
  EXPECT_EQ(l3, 0.0);
  EXPECT_EQ(h3, 1.0);
}

TEST(Moments, Unbiased) {
  const auto m = rgc::moments({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
  EXPECT_EQ(rgc::moments({7.0}).variance, 0.0);
}

TEST(TrialSeed, DependsOnCellAndTrial) {
  EXPECT_NE(rgc::trial_seed(1, 0, 1), rgc::trial_seed(1, 1, 0));
  EXPECT_EQ(rgc::trial_seed(1, 2, 3), rgc::subtrial_seed(rgc::subtrial_seed(1, 2), 3));
}

TEST(Verify, QuickOracleCriteriaPass) {
  rgc::VerifyOptions opt;
  opt.out_dir = (std::filesystem::temp_directory_path() / "rgc_verify_test").string();
  opt.only = {1, 2, 3, 4};
  const auto rep = rgc::verify_suite(opt);
  ASSERT_EQ(rep.results.size(), 4u);
  for (const auto& r : rep.results) EXPECT_TRUE(r.pass) << r.id << ' ' << r.detail;
  std::filesystem::remove_all(opt.out_dir);
}

}  // namespace
