#pragma once

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rgc/analytics.hpp"
#include "rgc/error.hpp"
#include "rgc/homology.hpp"
#include "rgc/implicit_homology.hpp"
#include "rgc/manifold.hpp"
#include "rgc/morse.hpp"
#include "rgc/random.hpp"
#include "rgc/sampler.hpp"
#include "rgc/theta.hpp"

namespace rgc {

/// Lambda = log n + k log log n + c.
struct LambdaOffset {
  double k = 0.0;
  double c = 0.0;
};

struct Toggles {
  bool run_morse = false;
  bool run_theta = false;
  bool run_coverage = false;
};

struct SweepConfig {
  ManifoldModel manifold = ManifoldModel::flat_torus(2);
  std::vector<double> n_list;
  std::vector<LambdaOffset> offsets;
  int trials = 1;
  std::uint64_t master_seed = 0;
  int k_lo = 0;
  int k_hi = 1;
  double epsilon = 0.1;
  int dim_cap = 3;
  Toggles toggles;
  std::string out = "results.csv";

  /// Reads the keys manifold, n_list, offsets, trials, master_seed, k_range, epsilon, dim_cap, toggles, out.
  static SweepConfig from_json(const nlohmann::json& j) {
    static const std::vector<std::string> keys = {"manifold", "n_list",  "offsets", "trials",
                                                  "master_seed", "k_range", "epsilon", "dim_cap",
                                                  "toggles", "out"};
    for (auto it = j.begin(); it != j.end(); ++it)
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
        throw InvalidInput("unknown config key '" + it.key() + "'");
    SweepConfig c;
    try {
      const auto& mj = j.at("manifold");
      const auto kind = mj.at("kind").get<std::string>();
      const int d = mj.at("d").get<int>();
      const bool has_scale = mj.contains("scale") && !mj.at("scale").is_null();
      if (kind == "torus") {
        c.manifold = ManifoldModel::flat_torus(d, has_scale ? mj.at("scale").get<double>() : 1.0);
      } else if (kind == "sphere") {
        c.manifold = has_scale ? ManifoldModel::round_sphere(d, mj.at("scale").get<double>())
                               : ManifoldModel::unit_volume_sphere(d);
      } else {
        throw InvalidInput("manifold kind must be 'torus' or 'sphere'");
      }
      c.n_list = j.at("n_list").get<std::vector<double>>();
      for (const auto& o : j.at("offsets"))
        c.offsets.push_back({o.at("k").get<double>(), o.at("c").get<double>()});
      c.trials = j.at("trials").get<int>();
      c.master_seed = j.at("master_seed").get<std::uint64_t>();
      if (j.contains("k_range")) {
        const auto kr = j.at("k_range").get<std::vector<int>>();
        if (kr.size() != 2) throw InvalidInput("k_range must be [lo, hi]");
        c.k_lo = kr[0];
        c.k_hi = kr[1];
      }
      if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
      c.dim_cap = j.contains("dim_cap") ? j.at("dim_cap").get<int>() : c.manifold.dim() + 1;
      if (j.contains("toggles")) {
        const auto& t = j.at("toggles");
        c.toggles.run_morse = t.value("run_morse", false);
        c.toggles.run_theta = t.value("run_theta", false);
        c.toggles.run_coverage = t.value("run_coverage", false);
      }
      if (j.contains("out")) c.out = j.at("out").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("bad config: ") + e.what());
    }
    c.validate();
    return c;
  }

  static SweepConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    nlohmann::json offs = nlohmann::json::array();
    for (const auto& o : offsets) offs.push_back({{"k", o.k}, {"c", o.c}});
    return {{"manifold", {{"kind", manifold.name()}, {"d", manifold.dim()}, {"scale", manifold.scale()}}},
            {"n_list", n_list},
            {"offsets", offs},
            {"trials", trials},
            {"master_seed", master_seed},
            {"k_range", {k_lo, k_hi}},
            {"epsilon", epsilon},
            {"dim_cap", dim_cap},
            {"toggles",
             {{"run_morse", toggles.run_morse},
              {"run_theta", toggles.run_theta},
              {"run_coverage", toggles.run_coverage}}},
            {"out", out}};
  }

  void validate() const;
};

/// One (n, offset) grid point.
struct Cell {
  std::size_t index = 0;
  double n = 0.0;
  LambdaOffset offset;
  double r = 0.0;
  double lambda = 0.0;
};

inline std::vector<Cell> cells_of(const SweepConfig& cfg) {
  std::vector<Cell> out;
  for (double n : cfg.n_list)
    for (const auto& o : cfg.offsets) {
      Cell c;
      c.index = out.size();
      c.n = n;
      c.offset = o;
      c.r = threshold_radius(cfg.manifold, n, o.k, o.c);
      c.lambda = lambda_of(cfg.manifold, n, c.r);
      out.push_back(c);
    }
  return out;
}

inline void SweepConfig::validate() const {
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  if (dim_cap < 1 || dim_cap > kMaxDimCap)
    throw InvalidInput("dim_cap must lie in [1, " + std::to_string(kMaxDimCap) + "]");
  if (k_lo < 0 || k_lo > k_hi || k_hi >= dim_cap || k_hi > manifold.dim())
    throw InvalidInput("k_range must satisfy 0 <= lo <= hi < dim_cap and hi <= d");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
  for (double n : n_list)
    if (!(n > std::numbers::e)) throw InvalidInput("every n must exceed e");
  for (const auto& c : cells_of(*this)) {
    check_radius(manifold, c.r);
    if (toggles.run_theta) ThetaConfig::make(manifold, c.r, c.lambda, epsilon).validate(manifold);
  }
}

/// Seed of trial t in cell c.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t cell, std::size_t trial) {
  return subtrial_seed(subtrial_seed(master, cell), trial);
}

struct TrialResult {
  std::size_t cell = 0;
  std::size_t trial = 0;
  double n = 0.0;
  LambdaOffset offset;
  std::size_t n_realized = 0;
  std::uint64_t seed = 0;
  double r = 0.0;
  double lambda = 0.0;
  std::vector<std::int64_t> betti;           // 0..dim_cap-1
  std::vector<std::int64_t> manifold_betti;  // 0..dim_cap-1
  std::vector<std::size_t> f_vector;
  std::vector<bool> match;                   // k_lo..k_hi
  std::vector<std::int64_t> crit_below;      // C_k(0, r], k = 0..d
  std::vector<std::int64_t> crit_above;      // C_k(r, r0], k = 1..d
  std::vector<std::int64_t> theta;           // per k in k_range with 1 <= k <= d-1
  std::optional<double> r0;
  bool covered = false;
  std::vector<std::string> failures;
  double wall_seconds = 0.0;

  bool passed() const { return failures.empty(); }
  bool full_match() const {
    return std::equal(betti.begin(), betti.end(), manifold_betti.begin(), manifold_betti.end());
  }
  std::string status() const {
    if (failures.empty()) return "pass";
    std::string s = "fail:";
    for (std::size_t i = 0; i < failures.size(); ++i) s += (i ? ";" : "") + failures[i];
    return s;
  }
};

inline std::vector<int> theta_degrees(const SweepConfig& cfg) {
  std::vector<int> out;
  for (int k = cfg.k_lo; k <= cfg.k_hi; ++k)
    if (k >= 1 && k <= cfg.manifold.dim() - 1) out.push_back(k);
  return out;
}

/// sample, build, betti, then the enabled coverage / Morse / theta stages and the per-trial invariants.
inline TrialResult run_trial(const SweepConfig& cfg, const Cell& cell, std::size_t trial) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& m = cfg.manifold;
  const int d = m.dim();
  TrialResult res;
  res.cell = cell.index;
  res.trial = trial;
  res.n = cell.n;
  res.offset = cell.offset;
  res.r = cell.r;
  res.lambda = cell.lambda;
  res.seed = trial_seed(cfg.master_seed, cell.index, trial);

  const auto cloud = poisson_process(m, cell.n, res.seed);
  res.n_realized = cloud.size();
  const auto h = betti_numbers_implicit(cloud, cell.r, cfg.dim_cap);
  res.betti = h.betti.betti;
  res.f_vector = h.f_vector;
  const auto mb = manifold_betti(m);
  for (int k = 0; k < cfg.dim_cap; ++k) res.manifold_betti.push_back(mb.at(k));
  for (int k = cfg.k_lo; k <= cfg.k_hi; ++k) res.match.push_back(res.betti[k] == mb.at(k));

  if (!h.euler_consistent()) res.failures.push_back("euler");
  for (int k = 0; k < cfg.dim_cap; ++k)
    if (res.betti[k] < 0 || res.betti[k] > static_cast<std::int64_t>(res.f_vector[k]))
      res.failures.push_back("betti_bound_" + std::to_string(k));

  if (cfg.toggles.run_coverage) {
    res.r0 = coverage_radius(cloud, cell.r);
    res.covered = res.r0 && *res.r0 == cell.r;
    if (res.covered)
      for (int k = 0; k <= d && k < cfg.dim_cap; ++k)
        if (res.betti[k] != mb.at(k)) res.failures.push_back("coverage_match_" + std::to_string(k));
  }

  if (cfg.toggles.run_morse) {
    const double hi = res.r0 ? *res.r0 : cell.r;
    const auto counts = crit_counts(cloud, 0.0, hi, d);
    for (int k = 0; k <= d; ++k)
      res.crit_below.push_back(k == 0 ? counts.at(0) : counts.between(k, 0.0, cell.r));
    if (cfg.toggles.run_coverage)
      for (int k = 1; k <= d; ++k)
        res.crit_above.push_back(res.r0 ? counts.between(k, cell.r, *res.r0) : 0);
    const auto rep = morse_inequality_check(h.betti, cell.r, m, counts, res.r0);
    for (const auto& c : rep.checks) {
      if (!c.weak_ok) res.failures.push_back("weak_morse_" + std::to_string(c.k));
      if (!c.relative_ok) res.failures.push_back("relative_morse_" + std::to_string(c.k));
    }
  }

  if (cfg.toggles.run_theta) {
    const auto tc = ThetaConfig::make(m, cell.r, cell.lambda, cfg.epsilon);
    for (int k : theta_degrees(cfg)) {
      const auto t = count_theta_cycles(cloud, k, tc);
      res.theta.push_back(t.count);
      if (!theta_lower_bound_check(h.betti, t.count, k))
        res.failures.push_back("theta_bound_" + std::to_string(k));
    }
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

/// Fixed CSV header for a config.
inline std::string sweep_header(const SweepConfig& cfg) {
  const int d = cfg.manifold.dim();
  std::ostringstream os;
  os << "manifold,d,n,cell,trial,offset_k,offset_c,n_realized,seed,r,lambda";
  for (int k = 0; k < cfg.dim_cap; ++k) os << ",betti_" << k;
  for (int k = 0; k < cfg.dim_cap; ++k) os << ",manifold_betti_" << k;
  for (int k = cfg.k_lo; k <= cfg.k_hi; ++k) os << ",match_" << k;
  if (cfg.toggles.run_morse) {
    for (int k = 0; k <= d; ++k) os << ",crit_" << k;
    if (cfg.toggles.run_coverage)
      for (int k = 1; k <= d; ++k) os << ",crit_above_" << k;
  }
  if (cfg.toggles.run_theta)
    for (int k : theta_degrees(cfg)) os << ",theta_" << k;
  if (cfg.toggles.run_coverage) os << ",covered,r0";
  os << ",status";
  return os.str();
}

inline void write_row(const SweepConfig& cfg, const TrialResult& t, std::ostream& os) {
  os << cfg.manifold.name() << ',' << cfg.manifold.dim() << ',' << format_real(t.n) << ','
     << t.cell << ',' << t.trial << ',' << format_real(t.offset.k) << ','
     << format_real(t.offset.c) << ',' << t.n_realized << ',' << t.seed << ',' << format_real(t.r)
     << ',' << format_real(t.lambda);
  for (auto b : t.betti) os << ',' << b;
  for (auto b : t.manifold_betti) os << ',' << b;
  for (bool b : t.match) os << ',' << (b ? 1 : 0);
  for (auto c : t.crit_below) os << ',' << c;
  for (auto c : t.crit_above) os << ',' << c;
  for (auto c : t.theta) os << ',' << c;
  if (cfg.toggles.run_coverage) os << ',' << (t.covered ? 1 : 0) << ',' << (t.r0 ? format_real(*t.r0) : "");
  os << ',' << t.status() << '\n';
}

/// Wilson score interval for k successes out of n at 95%.
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
  if (n == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double p = static_cast<double>(k) / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased; 0 for a single sample
};

inline Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    for (double x : xs) m.variance += (x - m.mean) * (x - m.mean);
    m.variance /= static_cast<double>(xs.size() - 1);
  }
  return m;
}

struct CellSummary {
  Cell cell;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::vector<std::size_t> matches;  // per k in k_range
  std::size_t full_matches = 0;
  std::vector<Moments> betti;        // per k < dim_cap
  std::vector<Moments> crit;         // per k = 0..d when morse is on
  std::vector<Moments> theta;        // per theta degree
  std::size_t covered = 0;

  double fraction(std::size_t k) const {
    return trials ? static_cast<double>(k) / static_cast<double>(trials) : 0.0;
  }
};

inline CellSummary summarize(const SweepConfig& cfg, const Cell& cell,
                             const std::vector<TrialResult>& rows) {
  CellSummary s;
  s.cell = cell;
  std::vector<const TrialResult*> mine;
  for (const auto& t : rows)
    if (t.cell == cell.index) mine.push_back(&t);
  s.trials = mine.size();
  s.matches.assign(cfg.k_hi - cfg.k_lo + 1, 0);
  auto column = [&](auto get) {
    std::vector<double> xs;
    for (const auto* t : mine) xs.push_back(static_cast<double>(get(*t)));
    return moments(xs);
  };
  for (const auto* t : mine) {
    s.failures += !t->passed();
    s.full_matches += t->full_match();
    s.covered += t->covered;
    for (std::size_t i = 0; i < t->match.size(); ++i) s.matches[i] += t->match[i];
  }
  for (int k = 0; k < cfg.dim_cap; ++k)
    s.betti.push_back(column([k](const TrialResult& t) { return t.betti[k]; }));
  if (cfg.toggles.run_morse)
    for (int k = 0; k <= cfg.manifold.dim(); ++k)
      s.crit.push_back(column([k](const TrialResult& t) { return t.crit_below[k]; }));
  const auto td = theta_degrees(cfg);
  if (cfg.toggles.run_theta)
    for (std::size_t i = 0; i < td.size(); ++i)
      s.theta.push_back(column([i](const TrialResult& t) { return t.theta[i]; }));
  return s;
}

inline void write_summary(const SweepConfig& cfg, const std::vector<CellSummary>& cells,
                          std::ostream& os) {
  os << "cell,n,offset_k,offset_c,r,lambda,trials,failures,full_match,full_match_lo,full_match_hi";
  for (int k = cfg.k_lo; k <= cfg.k_hi; ++k)
    os << ",match_" << k << ",match_" << k << "_lo,match_" << k << "_hi";
  for (int k = 0; k < cfg.dim_cap; ++k) os << ",betti_" << k << "_mean,betti_" << k << "_var";
  if (cfg.toggles.run_morse)
    for (int k = 0; k <= cfg.manifold.dim(); ++k) os << ",crit_" << k << "_mean,crit_" << k << "_var";
  if (cfg.toggles.run_theta)
    for (int k : theta_degrees(cfg)) os << ",theta_" << k << "_mean,theta_" << k << "_var";
  if (cfg.toggles.run_coverage) os << ",covered";
  os << '\n';
  for (const auto& s : cells) {
    const auto w = wilson_interval(s.full_matches, s.trials);
    os << s.cell.index << ',' << format_real(s.cell.n) << ',' << format_real(s.cell.offset.k) << ','
       << format_real(s.cell.offset.c) << ',' << format_real(s.cell.r) << ','
       << format_real(s.cell.lambda) << ',' << s.trials << ',' << s.failures << ','
       << format_real(s.fraction(s.full_matches)) << ',' << format_real(w.first) << ','
       << format_real(w.second);
    for (std::size_t m : s.matches) {
      const auto wi = wilson_interval(m, s.trials);
      os << ',' << format_real(s.fraction(m)) << ',' << format_real(wi.first) << ','
         << format_real(wi.second);
    }
    for (const auto& mo : s.betti) os << ',' << format_real(mo.mean) << ',' << format_real(mo.variance);
    for (const auto& mo : s.crit) os << ',' << format_real(mo.mean) << ',' << format_real(mo.variance);
    for (const auto& mo : s.theta) os << ',' << format_real(mo.mean) << ',' << format_real(mo.variance);
    if (cfg.toggles.run_coverage) os << ',' << s.covered;
    os << '\n';
  }
}

struct SweepOutput {
  std::vector<TrialResult> rows;  // sorted by (cell, trial)
  std::vector<CellSummary> summary;
  bool ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const TrialResult& t) { return t.passed(); });
  }
};

/// Runs every (cell, trial) on a pool of workers; results do not depend on the worker count.
inline SweepOutput run_sweep(const SweepConfig& cfg, int threads = 1) {
  cfg.validate();
  const auto cells = cells_of(cfg);
  const std::size_t total = cells.size() * static_cast<std::size_t>(cfg.trials);
  SweepOutput out;
  out.rows.resize(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < total;) {
      const auto& cell = cells[i / cfg.trials];
      const std::size_t trial = i % cfg.trials;
      try {
        out.rows[i] = run_trial(cfg, cell, trial);
      } catch (const std::exception& e) {
        auto& t = out.rows[i];
        t.cell = cell.index;
        t.trial = trial;
        t.n = cell.n;
        t.offset = cell.offset;
        t.r = cell.r;
        t.lambda = cell.lambda;
        t.seed = trial_seed(cfg.master_seed, cell.index, trial);
        t.betti.assign(cfg.dim_cap, 0);
        t.manifold_betti.assign(cfg.dim_cap, 0);
        t.match.assign(cfg.k_hi - cfg.k_lo + 1, false);
        if (cfg.toggles.run_morse) {
          t.crit_below.assign(cfg.manifold.dim() + 1, 0);
          if (cfg.toggles.run_coverage) t.crit_above.assign(cfg.manifold.dim(), 0);
        }
        if (cfg.toggles.run_theta) t.theta.assign(theta_degrees(cfg).size(), 0);
        t.failures.push_back(std::string("error ") + e.what());
      }
    }
  };
  const int w = std::max(1, threads);
  if (w == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < w; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& c : cells) out.summary.push_back(summarize(cfg, c, out.rows));
  return out;
}

/// Sibling paths of the results file: stem.summary.csv and stem.timing.csv.
inline std::filesystem::path sibling_path(const std::string& out, const std::string& tag) {
  std::filesystem::path p(out);
  auto stem = p.stem().string();
  return p.parent_path() / (stem + "." + tag + ".csv");
}

/// Writes rows, summary and the wall-time sidecar; the first two are byte-deterministic.
inline void write_sweep(const SweepConfig& cfg, const SweepOutput& res, const std::string& out) {
  std::ofstream rows(out, std::ios::binary);
  if (!rows) throw InvalidInput("cannot write " + out);
  rows << sweep_header(cfg) << '\n';
  for (const auto& t : res.rows) write_row(cfg, t, rows);
  std::ofstream sum(sibling_path(out, "summary"), std::ios::binary);
  write_summary(cfg, res.summary, sum);
  std::ofstream tim(sibling_path(out, "timing"), std::ios::binary);
  tim << "cell,trial,wall_seconds\n";
  for (const auto& t : res.rows)
    tim << t.cell << ',' << t.trial << ',' << format_real(t.wall_seconds) << '\n';
}

}  // namespace rgc
