#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rgc/analytics.hpp"
#include "rgc/cech.hpp"
#include "rgc/harness.hpp"
#include "rgc/homology.hpp"
#include "rgc/implicit_homology.hpp"
#include "rgc/morse.hpp"
#include "rgc/oracles.hpp"
#include "rgc/random.hpp"
#include "rgc/sampler.hpp"

namespace rgc {

enum class Scale { quick, full };

inline Scale parse_scale(const std::string& s) {
  if (s == "quick") return Scale::quick;
  if (s == "full") return Scale::full;
  throw InvalidInput("scale must be 'quick' or 'full'");
}

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // deterministic given the seed
  double seconds = 0.0;
};

struct VerifyReport {
  Scale scale = Scale::quick;
  std::vector<CriterionResult> results;
  bool ok() const {
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
  }
};

struct VerifyOptions {
  Scale scale = Scale::quick;
  std::uint64_t seed = 20240611;
  std::string out_dir = "verify_out";
  int threads = 1;
  std::ostream* log = nullptr;  // one line per criterion as it finishes
  std::vector<int> only;        // empty: every criterion
};

namespace detail {

struct VerifyContext {
  VerifyOptions opt;
  std::size_t euler_checked = 0;
  std::size_t euler_failed = 0;
  std::vector<std::string> files;

  bool full() const { return opt.scale == Scale::full; }
  std::uint64_t seed(int criterion, std::size_t i) const {
    return subtrial_seed(subtrial_seed(opt.seed, criterion), i);
  }

  void count_euler(const BettiVector& b) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < b.betti.size(); ++k) s += k % 2 ? -b.betti[k] : b.betti[k];
    if (b.top) s += b.betti.size() % 2 ? -*b.top : *b.top;
    ++euler_checked;
    euler_failed += s != b.euler;
  }
  void count_euler(const ImplicitHomology& h) {
    ++euler_checked;
    euler_failed += !h.euler_consistent();
  }
  void count_rows(const SweepOutput& out) {
    for (const auto& t : out.rows) {
      ++euler_checked;
      euler_failed += std::count(t.failures.begin(), t.failures.end(), "euler") > 0;
    }
  }
};

inline ManifoldModel small_manifold(std::size_t i) {
  return i % 2 ? ManifoldModel::unit_volume_sphere(2) : ManifoldModel::flat_torus(2);
}

inline PointCloud random_cloud(const ManifoldModel& m, Rng& rng, int lo, int hi) {
  const int n = lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
  return PointCloud(m, uniform_sample(m, static_cast<std::size_t>(n), rng));
}

inline bool same_complex(const CechComplex& a, const CechComplex& b) {
  if (a.dim_cap() != b.dim_cap()) return false;
  for (int k = 0; k <= a.dim_cap(); ++k)
    if (a.flat(k) != b.flat(k)) return false;
  return true;
}

inline std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

inline CriterionResult cech_oracle(VerifyContext& ctx) {
  const std::size_t clouds = ctx.full() ? 200 : 100;
  std::size_t bad = 0, mutation_caught = 0, simplices = 0;
  for (std::size_t i = 0; i < clouds; ++i) {
    Rng rng(ctx.seed(1, i));
    const auto m = small_manifold(i);
    const auto cloud = random_cloud(m, rng, 4, 25);
    const double u = rng.uniform_pos();
    const double r = m.convexity_radius() * u * u;
    const auto cx = build_complex(cloud, r);
    const auto ref = oracle::cech_complex(cloud, r, cx.dim_cap());
    simplices += cx.total();
    bad += !same_complex(cx, ref);
    mutation_caught += !same_complex(oracle::rips_complex(cloud, r, cx.dim_cap()), ref);
    ctx.count_euler(betti_numbers(cx));
  }
  CriterionResult res{1, "cech-oracle", false, {}, 0.0};
  res.pass = bad == 0 && mutation_caught > 0;
  res.detail = std::to_string(clouds) + " clouds, " + std::to_string(simplices) + " simplices, " +
               std::to_string(bad) + " mismatches; Rips mutation differs on " +
               std::to_string(mutation_caught) + " clouds";
  return res;
}

inline CriterionResult homology_oracle(VerifyContext& ctx) {
  const std::size_t total = ctx.full() ? 200 : 100;
  std::size_t bad = 0, implicit_bad = 0, from_clouds = 0;
  for (std::size_t i = 0; i < total; ++i) {
    Rng rng(ctx.seed(2, i));
    CechComplex cx;
    std::optional<PointCloud> cloud;
    if (i % 4 != 3) {
      const auto m = small_manifold(i);
      cloud.emplace(random_cloud(m, rng, 5, 25));
      double r = m.convexity_radius() * rng.uniform_pos();
      cx = build_complex(*cloud, r);
      while (cx.total() > 500) {
        r *= 0.85;
        cx = build_complex(*cloud, r);
      }
      ++from_clouds;
    } else {
      // Random abstract complex: closure of random vertex sets on 9 vertices.
      std::vector<std::vector<Index>> sims;
      const int count = 4 + static_cast<int>(rng.uniform() * 14);
      for (int s = 0; s < count; ++s) {
        std::vector<Index> v;
        const int size = 2 + static_cast<int>(rng.uniform() * 4);
        while (static_cast<int>(v.size()) < size) {
          const auto x = static_cast<Index>(rng.uniform() * 9);
          if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
        }
        std::sort(v.begin(), v.end());
        for (unsigned mask = 1; mask < (1u << v.size()); ++mask) {
          std::vector<Index> f;
          for (std::size_t b = 0; b < v.size(); ++b)
            if (mask >> b & 1u) f.push_back(v[b]);
          sims.push_back(f);
        }
      }
      std::sort(sims.begin(), sims.end());
      sims.erase(std::unique(sims.begin(), sims.end()), sims.end());
      cx = CechComplex::from_simplices(sims, 5);
    }
    const auto prod = betti_numbers(cx);
    const auto ref = oracle::betti_numbers(cx);
    bad += prod.betti != ref.betti || prod.top != ref.top || prod.euler != ref.euler;
    ctx.count_euler(prod);
    ctx.count_euler(ref);
    if (cloud && cx.dim_cap() >= 1) {
      const auto h = betti_numbers_implicit(*cloud, cx.radius(), cx.dim_cap());
      implicit_bad += h.betti.betti != prod.betti;
      ctx.count_euler(h);
    }
  }
  CriterionResult res{2, "homology-oracle", false, {}, 0.0};
  res.pass = bad == 0 && implicit_bad == 0;
  res.detail = std::to_string(total) + " complexes (" + std::to_string(from_clouds) +
               " geometric), " + std::to_string(bad) + " sparse/dense mismatches, " +
               std::to_string(implicit_bad) + " implicit-engine mismatches";
  return res;
}

inline CriterionResult critical_oracle(VerifyContext& ctx) {
  const std::size_t clouds = ctx.full() ? 100 : 50;
  std::size_t bad = 0, points = 0, degenerate = 0;
  for (std::size_t i = 0; i < clouds; ++i) {
    Rng rng(ctx.seed(4, i));
    const auto m = small_manifold(i);
    const auto cloud = random_cloud(m, rng, 3, 25);
    const double r_hi = m.convexity_radius() * rng.uniform_pos();
    const double r_lo = r_hi * 0.5 * rng.uniform();
    for (int k = 0; k <= m.dim(); ++k) {
      std::size_t deg = 0;
      const auto got = enumerate_critical_points(cloud, k, r_lo, r_hi, &deg);
      const auto want = oracle::critical_points(cloud, k, r_lo, r_hi);
      degenerate += deg;
      points += got.size();
      bool ok = got.size() == want.size();
      for (std::size_t j = 0; ok && j < got.size(); ++j)
        ok = got[j].generators == want[j].generators &&
             std::abs(got[j].radius - want[j].radius) <= 1e-9 &&
             distance(m, got[j].center, want[j].center) <= 1e-9;
      bad += !ok;
    }
  }
  CriterionResult res{4, "critical-oracle", false, {}, 0.0};
  res.pass = bad == 0;
  res.detail = std::to_string(clouds) + " clouds, " + std::to_string(points) +
               " critical points, " + std::to_string(bad) + " mismatched (cloud, index) pairs, " +
               std::to_string(degenerate) + " degenerate candidates";
  return res;
}

inline SweepConfig torus_sweep(double n, std::vector<LambdaOffset> offsets, int trials,
                               std::uint64_t seed) {
  SweepConfig c;
  c.manifold = ManifoldModel::flat_torus(2);
  c.n_list = {n};
  c.offsets = std::move(offsets);
  c.trials = trials;
  c.master_seed = seed;
  c.k_lo = 0;
  c.k_hi = 2;
  c.dim_cap = 3;
  return c;
}

inline SweepOutput run_and_save(VerifyContext& ctx, SweepConfig cfg, const std::string& name) {
  cfg.out = (std::filesystem::path(ctx.opt.out_dir) / (name + ".csv")).string();
  auto out = run_sweep(cfg, ctx.opt.threads);
  write_sweep(cfg, out, cfg.out);
  ctx.files.push_back(cfg.out);
  ctx.files.push_back(sibling_path(cfg.out, "summary").string());
  ctx.count_rows(out);
  return out;
}

inline LambdaOffset exact_lambda(double n, double lambda) { return {0.0, lambda - std::log(n)}; }

inline CriterionResult morse_inequalities(VerifyContext& ctx) {
  const double n = ctx.full() ? 2000 : 1000;
  const int trials = ctx.full() ? 200 : 4;
  auto cfg = torus_sweep(n, {exact_lambda(n, 8), exact_lambda(n, 12), exact_lambda(n, 16)}, trials,
                         ctx.seed(5, 0));
  cfg.toggles.run_morse = true;
  cfg.toggles.run_coverage = true;
  const auto out = run_and_save(ctx, cfg, "morse");
  std::size_t failed = 0, relative = 0;
  for (const auto& t : out.rows) {
    failed += !t.passed();
    relative += t.r0.has_value();
  }
  CriterionResult res{5, "morse-inequalities", false, {}, 0.0};
  res.pass = failed == 0 && relative > 0;
  res.detail = std::to_string(out.rows.size()) + " trials at lambda 8/12/16, " +
               std::to_string(failed) + " failing, relative inequality checked on " +
               std::to_string(relative);
  return res;
}

inline CriterionResult theta_bound(VerifyContext& ctx) {
  const double n = ctx.full() ? 5000 : 2000;
  auto cfg = torus_sweep(n, {{1.0, 0.0}}, ctx.full() ? 100 : 10, ctx.seed(6, 0));
  cfg.k_lo = cfg.k_hi = 1;
  cfg.dim_cap = 2;
  cfg.epsilon = 0.1;
  cfg.toggles.run_theta = true;
  const auto out = run_and_save(ctx, cfg, "theta");
  std::size_t failed = 0;
  std::int64_t certified = 0;
  for (const auto& t : out.rows) {
    failed += !t.passed();
    certified += t.theta.empty() ? 0 : t.theta[0];
  }
  CriterionResult res{6, "theta-lower-bound", false, {}, 0.0};
  res.pass = failed == 0;
  res.detail = std::to_string(out.rows.size()) + " trials at n=" + fmt(n) + ", " +
               std::to_string(failed) + " violating beta_1 >= theta count; " +
               std::to_string(certified) + " certified theta cycles in total";
  return res;
}

struct BranchFractions {
  double upper = -1.0;
};

inline CriterionResult upper_branch(VerifyContext& ctx, BranchFractions& fr) {
  const double n = ctx.full() ? 1e4 : 1000;
  const auto cfg = torus_sweep(n, {{1.0, 6.0}}, ctx.full() ? 100 : 10, ctx.seed(7, 0));
  const auto out = run_and_save(ctx, cfg, "upper");
  const auto& s = out.summary.at(0);
  fr.upper = s.fraction(s.full_matches);
  const auto w = wilson_interval(s.full_matches, s.trials);
  CriterionResult res{7, "upper-branch", false, {}, 0.0};
  res.pass = fr.upper >= 0.90 && out.ok();
  res.detail = "n=" + fmt(n) + " lambda=" + fmt(s.cell.lambda) + ": full match " +
               std::to_string(s.full_matches) + "/" + std::to_string(s.trials) + " (Wilson 95% " +
               fmt(w.first) + ".." + fmt(w.second) + "), need >= 0.90";
  return res;
}

inline CriterionResult lower_branch(VerifyContext& ctx, const BranchFractions& fr) {
  // log n - log log n - 6 is only positive for n above about 4000.
  const double n = ctx.full() ? 1e4 : 5000;
  auto cfg = torus_sweep(n, {{-1.0, -6.0}}, ctx.full() ? 100 : 10, ctx.seed(8, 0));
  cfg.k_lo = cfg.k_hi = 1;
  cfg.dim_cap = 2;
  const auto out = run_and_save(ctx, cfg, "lower");
  const auto& s = out.summary.at(0);
  const double lower = s.fraction(s.matches.at(0));
  CriterionResult res{8, "lower-branch", false, {}, 0.0};
  res.pass = fr.upper >= 0.0 && lower <= fr.upper - 0.5 && out.ok();
  res.detail = "n=" + fmt(n) + " lambda=" + fmt(s.cell.lambda) + ": beta_1 = 2 in " +
               std::to_string(s.matches.at(0)) + "/" + std::to_string(s.trials) +
               ", upper-branch fraction " + fmt(fr.upper);
  return res;
}

inline CriterionResult sphere_sanity(VerifyContext& ctx) {
  const double n = ctx.full() ? 1e4 : 1000;
  SweepConfig cfg;
  cfg.manifold = ManifoldModel::unit_volume_sphere(2);
  cfg.n_list = {n};
  cfg.offsets = {exact_lambda(n, 3.0 * std::log(n))};
  cfg.trials = ctx.full() ? 50 : 5;
  cfg.master_seed = ctx.seed(9, 0);
  cfg.k_lo = 0;
  cfg.k_hi = 2;
  cfg.dim_cap = 3;
  cfg.toggles.run_coverage = true;
  const auto out = run_and_save(ctx, cfg, "sphere");
  std::size_t good = 0;
  for (const auto& t : out.rows) good += t.covered && t.full_match();
  const double frac = static_cast<double>(good) / static_cast<double>(out.rows.size());
  CriterionResult res{9, "sphere-sanity", false, {}, 0.0};
  res.pass = frac >= 0.95 && out.ok();
  res.detail = "n=" + fmt(n) + " lambda=" + fmt(3.0 * std::log(n)) + ": covered with betti (1,0,1) in " +
               std::to_string(good) + "/" + std::to_string(out.rows.size()) + ", need >= 0.95";
  return res;
}

inline CriterionResult crit_trend(VerifyContext& ctx) {
  // Quick scale shifts the grid down so a few dozen small clouds still see counts at every level.
  const double n = ctx.full() ? 1e4 : 2000;
  const int trials = ctx.full() ? 500 : 40;
  const std::vector<double> grid =
      ctx.full() ? std::vector<double>{8, 10, 12, 14} : std::vector<double>{6, 7, 8, 9};
  const auto m = ManifoldModel::flat_torus(2);
  const double lambda0 = 3.0 * std::log(n);
  const double r0 = radius_for_lambda(m, n, lambda0);
  std::vector<double> radii;
  for (double l : grid) radii.push_back(radius_for_lambda(m, n, l));

  const auto path = std::filesystem::path(ctx.opt.out_dir) / "crit_trend.csv";
  std::ofstream csv(path, std::ios::binary);
  csv << "trial,seed,n_realized";
  for (double l : grid) csv << ",crit_1_lambda_" << format_real(l);
  csv << '\n';
  std::vector<double> sums(grid.size(), 0.0);
  for (int t = 0; t < trials; ++t) {
    const auto seed = ctx.seed(10, static_cast<std::size_t>(t));
    const auto cloud = poisson_process(m, n, seed);
    const auto cps = enumerate_critical_points(cloud, 1, radii.front(), r0);
    csv << t << ',' << seed << ',' << cloud.size();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto c = std::count_if(cps.begin(), cps.end(),
                                   [&](const CriticalPoint& cp) { return cp.radius > radii[g]; });
      sums[g] += static_cast<double>(c);
      csv << ',' << c;
    }
    csv << '\n';
  }
  ctx.files.push_back(path.string());

  std::vector<double> means, ratio;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    means.push_back(sums[g] / trials);
    ratio.push_back(means.back() / crit_envelope(n, grid[g], lambda0, 1));
  }
  bool decreasing = true;
  for (std::size_t g = 1; g < means.size(); ++g) decreasing = decreasing && means[g] < means[g - 1];
  bool within = ratio[0] > 0.0;
  std::string rs, ms, gs;
  for (std::size_t g = 0; g < ratio.size(); ++g) {
    const double rel = ratio[0] > 0.0 ? ratio[g] / ratio[0] : 0.0;
    within = within && rel >= 0.2 && rel <= 5.0;
    rs += (g ? " " : "") + fmt(rel, 3);
    ms += (g ? " " : "") + fmt(means[g], 5);
    gs += (g ? "," : "") + fmt(grid[g]);
  }
  CriterionResult res{10, "critical-count-trend", false, {}, 0.0};
  res.pass = decreasing && within;
  res.detail = "n=" + fmt(n) + ", " + std::to_string(trials) + " clouds, lambda in {" + gs +
               "}, lambda0=" + fmt(lambda0) + ": mean C_1 " + ms + "; ratio to envelope fitted at " +
               fmt(grid[0]) + ": " + rs;
  return res;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline CriterionResult determinism(VerifyContext& ctx) {
  SweepConfig cfg = torus_sweep(400, {{1.0, 2.0}, {0.0, 0.0}}, 4, ctx.seed(11, 0));
  cfg.toggles = {true, true, true};
  cfg.k_lo = 1;
  cfg.k_hi = 1;
  const auto dir = std::filesystem::path(ctx.opt.out_dir);
  const auto a = (dir / "determinism_a.csv").string();
  const auto b = (dir / "determinism_b.csv").string();
  write_sweep(cfg, run_sweep(cfg, 1), a);
  write_sweep(cfg, run_sweep(cfg, std::max(2, ctx.opt.threads)), b);
  const bool same = slurp(a) == slurp(b) &&
                    slurp(sibling_path(a, "summary").string()) == slurp(sibling_path(b, "summary").string());
  ctx.files.push_back(a);
  CriterionResult res{11, "determinism", false, {}, 0.0};
  res.pass = same;
  res.detail = same ? "repeat run with a different worker count is byte-identical"
                    : "repeat run differs";
  return res;
}

}  // namespace detail

/**
 * Runs the acceptance criteria at the chosen scale and writes every result
 * file (plus verify.csv, one line per criterion) into opt.out_dir.
 */
inline VerifyReport verify_suite(const VerifyOptions& opt) {
  std::filesystem::create_directories(opt.out_dir);
  detail::VerifyContext ctx;
  ctx.opt = opt;
  VerifyReport rep;
  rep.scale = opt.scale;
  detail::BranchFractions fr;
  auto wanted = [&](int id) {
    return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end();
  };
  auto run = [&](int id, const std::function<CriterionResult()>& f) {
    if (!wanted(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = f();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion-" + std::to_string(id);
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.log)
      *opt.log << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << ": " << r.detail
               << " (" << detail::fmt(r.seconds, 3) << " s)" << std::endl;
    rep.results.push_back(r);
  };
  run(1, [&] { return detail::cech_oracle(ctx); });
  run(2, [&] { return detail::homology_oracle(ctx); });
  run(4, [&] { return detail::critical_oracle(ctx); });
  run(5, [&] { return detail::morse_inequalities(ctx); });
  run(6, [&] { return detail::theta_bound(ctx); });
  run(7, [&] { return detail::upper_branch(ctx, fr); });
  run(8, [&] {
    if (fr.upper < 0.0) detail::upper_branch(ctx, fr);
    return detail::lower_branch(ctx, fr);
  });
  run(9, [&] { return detail::sphere_sanity(ctx); });
  run(10, [&] { return detail::crit_trend(ctx); });
  run(11, [&] { return detail::determinism(ctx); });
  run(3, [&] {
    CriterionResult r{3, "euler-poincare", false, {}, 0.0};
    r.pass = ctx.euler_failed == 0 && ctx.euler_checked > 0;
    r.detail = std::to_string(ctx.euler_checked) + " complexes checked, " +
               std::to_string(ctx.euler_failed) + " violations";
    return r;
  });
  std::sort(rep.results.begin(), rep.results.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  std::ofstream csv(std::filesystem::path(opt.out_dir) / "verify.csv", std::ios::binary);
  csv << "criterion,name,pass,detail\n";
  for (const auto& r : rep.results)
    csv << r.id << ',' << r.name << ',' << (r.pass ? 1 : 0) << ",\"" << r.detail << "\"\n";
  return rep;
}

}  // namespace rgc
