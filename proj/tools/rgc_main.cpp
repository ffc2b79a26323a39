#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "rgc/rgc.hpp"
#include "rgc/verify.hpp"

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string out;
  int threads = 1;
};

struct CloudArgs {
  std::string manifold = "torus";
  int dim = 2;
  std::optional<double> scale;
  std::string input;
  double n = 1000;
};

void add_cloud_options(CLI::App* sub, CloudArgs& a) {
  sub->add_option("--manifold", a.manifold, "torus or sphere")
      ->check(CLI::IsMember({"torus", "sphere"}))
      ->capture_default_str();
  sub->add_option("--dim", a.dim, "intrinsic dimension d")->capture_default_str();
  sub->add_option("--scale", a.scale, "torus side L or sphere radius R (default: side 1, unit-volume sphere)");
  sub->add_option("--input", a.input, "point CSV (x0,x1,...); sampled from --n and --seed when absent");
  sub->add_option("--n", a.n, "Poisson intensity when sampling")->capture_default_str();
}

rgc::ManifoldModel manifold_of(const CloudArgs& a) {
  if (a.manifold == "torus") return rgc::ManifoldModel::flat_torus(a.dim, a.scale.value_or(1.0));
  return a.scale ? rgc::ManifoldModel::round_sphere(a.dim, *a.scale)
                 : rgc::ManifoldModel::unit_volume_sphere(a.dim);
}

rgc::PointCloud cloud_of(const CloudArgs& a, const Globals& g) {
  const auto m = manifold_of(a);
  if (a.input.empty()) return rgc::poisson_process(m, a.n, g.seed);
  std::ifstream in(a.input);
  if (!in) throw rgc::InvalidInput("cannot open " + a.input);
  return rgc::read_csv(m, in);
}

/// stdout unless --out names a file.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw rgc::InvalidInput("cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void print_betti(std::ostream& os, const std::vector<std::int64_t>& b, std::optional<std::int64_t> top) {
  os << "k,betti\n";
  for (std::size_t k = 0; k < b.size(); ++k) os << k << ',' << b[k] << '\n';
  if (top) os << b.size() << ',' << *top << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Cech complexes on the flat torus and round sphere"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "sweep config JSON");
  app.add_option("--seed", g.seed, "master seed")->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--out", g.out, "output file (directory for verify)");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

  CloudArgs ca;
  double radius = 0.0;
  std::optional<int> dim_cap;
  std::string engine = "implicit";
  int index = 1;
  double r_lo = 0.0, r_hi = 0.0;
  std::optional<double> lambda;
  double epsilon = 0.1;
  std::string scale = "quick";
  std::vector<int> only;

  auto* sample = app.add_subcommand("sample", "sample a Poisson process and write the point CSV");
  add_cloud_options(sample, ca);

  auto* build = app.add_subcommand("build", "build the Cech complex and list its simplices");
  add_cloud_options(build, ca);
  build->add_option("--radius", radius, "ball radius r")->required();
  build->add_option("--dim-cap", dim_cap, "highest simplex dimension (default d+1)");

  auto* betti = app.add_subcommand("betti", "Betti numbers of the Cech complex");
  add_cloud_options(betti, ca);
  betti->add_option("--radius", radius, "ball radius r")->required();
  betti->add_option("--dim-cap", dim_cap, "highest simplex dimension (default d+1)");
  betti->add_option("--engine", engine, "implicit (scalable) or explicit (stores the complex)")
      ->check(CLI::IsMember({"implicit", "explicit"}))
      ->capture_default_str();

  auto* critical = app.add_subcommand("critical", "critical points of the distance function");
  add_cloud_options(critical, ca);
  critical->add_option("--index", index, "critical index k")->capture_default_str();
  critical->add_option("--r-lo", r_lo, "lower radius (exclusive)")->capture_default_str();
  critical->add_option("--r-hi", r_hi, "upper radius (inclusive)")->required();

  auto* theta = app.add_subcommand("theta", "count certified theta cycles");
  add_cloud_options(theta, ca);
  theta->add_option("--index", index, "cycle degree k")->capture_default_str();
  theta->add_option("--radius", radius, "ball radius r")->required();
  theta->add_option("--lambda", lambda, "Lambda used for xi = 1/Lambda (default: n omega_d r^d / vol)");
  theta->add_option("--epsilon", epsilon, "phi threshold")->capture_default_str();

  auto* coverage = app.add_subcommand("coverage", "coverage certificate at r and the smallest certified radius");
  add_cloud_options(coverage, ca);
  coverage->add_option("--radius", radius, "ball radius r")->required();

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep from --config");

  auto* verify = app.add_subcommand("verify", "acceptance suite");
  verify->add_option("--scale", scale, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();
  verify->add_option("--only", only, "criterion ids to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sample) {
      const auto cloud = cloud_of(ca, g);
      Sink s(g.out);
      rgc::write_csv(cloud, s.os());
      return 0;
    }
    if (*build) {
      const auto cx = rgc::build_complex(cloud_of(ca, g), radius, dim_cap);
      Sink s(g.out);
      s.os() << cx.to_text();
      return 0;
    }
    if (*betti) {
      const auto cloud = cloud_of(ca, g);
      Sink s(g.out);
      if (engine == "explicit") {
        const auto b = rgc::betti_numbers(rgc::build_complex(cloud, radius, dim_cap));
        print_betti(s.os(), b.betti, b.top);
      } else {
        rgc::check_radius(cloud.manifold, radius);
        const auto h =
            rgc::betti_numbers_implicit(cloud, radius, dim_cap.value_or(cloud.manifold.dim() + 1));
        print_betti(s.os(), h.betti.betti, std::nullopt);
        if (!h.euler_consistent()) {
          std::cerr << "euler identity failed\n";
          return 1;
        }
      }
      return 0;
    }
    if (*critical) {
      const auto cloud = cloud_of(ca, g);
      std::size_t degenerate = 0;
      const auto cps = rgc::enumerate_critical_points(cloud, index, r_lo, r_hi, &degenerate);
      Sink s(g.out);
      rgc::write_critical_csv(cloud.manifold, cps, s.os());
      if (degenerate) std::cerr << degenerate << " degenerate candidates skipped\n";
      return 0;
    }
    if (*theta) {
      const auto cloud = cloud_of(ca, g);
      const double l = lambda.value_or(rgc::lambda_of(cloud.manifold, static_cast<double>(cloud.size()), radius));
      const auto cfg = rgc::ThetaConfig::make(cloud.manifold, radius, l, epsilon);
      cfg.validate(cloud.manifold);
      const auto res = rgc::count_theta_cycles(cloud, index, cfg);
      Sink s(g.out);
      rgc::write_theta_csv(index, res, s.os());
      std::cerr << "certified theta cycles: " << res.count << '\n';
      return 0;
    }
    if (*coverage) {
      const auto cloud = cloud_of(ca, g);
      rgc::check_radius(cloud.manifold, radius);
      const bool ok = rgc::coverage_certificate(cloud, radius);
      const auto r0 = rgc::coverage_radius(cloud, radius);
      Sink s(g.out);
      s.os() << "radius,covered,r0\n"
             << rgc::format_real(radius) << ',' << (ok ? 1 : 0) << ','
             << (r0 ? rgc::format_real(*r0) : "") << '\n';
      return 0;
    }
    if (*sweep) {
      if (g.config.empty()) throw rgc::InvalidInput("sweep needs --config");
      auto cfg = rgc::SweepConfig::load(g.config);
      if (g.seed_set) cfg.master_seed = g.seed;
      if (!g.out.empty()) cfg.out = g.out;
      const auto res = rgc::run_sweep(cfg, g.threads);
      rgc::write_sweep(cfg, res, cfg.out);
      std::size_t failed = 0;
      for (const auto& t : res.rows)
        if (!t.passed()) {
          ++failed;
          std::cerr << "cell " << t.cell << " trial " << t.trial << ": " << t.status() << '\n';
        }
      std::cout << res.rows.size() << " trials, " << failed << " failed; rows in " << cfg.out << '\n';
      return failed ? 1 : 0;
    }
    if (*verify) {
      rgc::VerifyOptions opt;
      opt.scale = rgc::parse_scale(scale);
      if (g.seed_set) opt.seed = g.seed;
      opt.out_dir = g.out.empty() ? "verify_" + scale : g.out;
      opt.threads = g.threads;
      opt.log = &std::cout;
      opt.only = only;
      const auto rep = rgc::verify_suite(opt);
      std::cout << (rep.ok() ? "all criteria passed" : "some criteria failed") << '\n';
      return rep.ok() ? 0 : 1;
    }
  } catch (const rgc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
