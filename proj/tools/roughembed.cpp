#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "roughembed/acceptance.hpp"
#include "roughembed/domain.hpp"
#include "roughembed/error.hpp"
#include "roughembed/inequalities.hpp"
#include "roughembed/io.hpp"
#include "roughembed/mappings.hpp"
#include "roughembed/spectrum.hpp"

namespace fs = std::filesystem;
using namespace roughembed;

namespace {

constexpr int kOk = 0;
constexpr int kFailedCheck = 1;
constexpr int kUsage = 2;

struct DomainArgs {
  std::string name;
  std::string config;
  CatalogParams params;
  std::vector<double> breaks, values;

  void add_to(CLI::App* app) {
    app->add_option("--name", name, "catalog domain name");
    app->add_option("--config", config, "key-value domain config file");
    app->add_option("--n", params.n, "unit_cube dimension");
    app->add_option("--alpha", params.alpha, "rectangle_chain exponent");
    app->add_option("--k-max", params.k_max, "rectangle_chain truncation");
    app->add_option("--breaks", breaks, "step_domain jump locations")->delimiter(',');
    app->add_option("--values", values, "step_domain piece values")->delimiter(',');
  }

  std::pair<std::string, Domain> build() const {
    if (name.empty() == config.empty()) throw ConfigError("give exactly one of --name and --config");
    if (!config.empty()) {
      const Config c = Config::load(config);
      return {c.get_string("domain", fs::path(config).stem().string()), domain_from_config(c)};
    }
    if (!catalog_has(name)) {
      throw ConfigError("unknown catalog name '" + name + "'");
    }
    CatalogParams p = params;
    p.breaks = breaks;
    p.values = values;
    return {name, catalog(name, p)};
  }
};

fs::path output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir + "'");
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

std::string num(double x) { return format_number(x); }

// ---------------------------------------------------------------------------

struct DomainCommand {
  DomainArgs domain;
  int cells = 128;
  bool plot = false;
  bool pgm = false;
  double approx_h = 0.0;
  std::string out = ".";

  int run() const {
    const auto [name, d] = domain.build();
    const GridMask mask = rasterize(d, cells);
    std::cout << "domain = " << name << "\n"
              << "dimension = " << mask.grid().dim() << "\n"
              << "cells_per_unit = " << cells << "\n"
              << "cell_count = " << mask.count() << "\n"
              << "measure = " << num(mask.measure()) << "\n"
              << "components = " << label_components(mask).sizes.size() << "\n";
    if (mask.grid().dim() == 2) std::cout << "boundary_components = " << boundary_components(mask) << "\n";
    const BoundingBox box = bounding_box(d);
    std::cout << "bbox_lo =";
    for (Eigen::Index i = 0; i < box.lo.size(); ++i) std::cout << ' ' << num(box.lo[i]);
    std::cout << "\nbbox_hi =";
    for (Eigen::Index i = 0; i < box.hi.size(); ++i) std::cout << ' ' << num(box.hi[i]);
    std::cout << "\n";

    int status = kOk;
    if (approx_h > 0.0) {
      const auto* e = std::get_if<ElementaryDomain>(&d);
      if (!e) throw ConfigError("--approx needs an elementary domain");
      const LipschitzApproximant v = lipschitz_approximant(*e, approx_h);
      std::cout << "approx_h = " << num(approx_h) << "\napprox_knots = " << v.knot_count
                << "\napprox_inner_violations = " << v.inner_violations
                << "\napprox_outer_violations = " << v.outer_violations
                << "\napprox_containment = " << (v.containment_holds() ? "true" : "false") << "\n";
      if (!v.containment_holds()) status = kFailedCheck;
    }
    if (plot || pgm) {
      const fs::path dir = output_dir(out);
      if (plot) {
        auto f = open_output(dir / (name + ".svg"));
        write_svg(f, mask, fmt::format("{} at {} cells per unit", name, cells));
        std::cout << "svg = " << (dir / (name + ".svg")).string() << "\n";
      }
      if (pgm) {
        auto f = open_output(dir / (name + ".pgm"));
        write_pgm(f, mask);
        std::cout << "pgm = " << (dir / (name + ".pgm")).string() << "\n";
      }
    }
    return status;
  }
};

struct InequalityCommand {
  SweepOptions sweep;
  std::string out = ".";

  int run() const {
    const auto rows = inequality_sweep(sweep);
    const fs::path path = output_dir(out) / "inequality_sweep.csv";
    auto f = open_output(path);
    CsvWriter csv(f, sweep.seed, {"suite", "trial", "h", "lhs", "rhs", "slack", "holds", "asserted"});
    std::size_t failed = 0, unasserted_failed = 0;
    for (const auto& r : rows) {
      csv.row({r.suite, std::to_string(r.trial), num(r.h), num(r.lhs), num(r.rhs), num(r.slack),
               r.holds ? "true" : "false", r.asserted ? "true" : "false"});
      if (!r.holds) ++(r.asserted ? failed : unasserted_failed);
    }
    std::cout << "rows = " << rows.size() << "\nfailed = " << failed << "\nmonitored_failed = " << unasserted_failed
              << "\ncsv = " << path.string() << "\n";
    return failed ? kFailedCheck : kOk;
  }
};

struct MapCommand {
  std::string name = "spiral";
  double alpha = 2.0;
  double k = 2.0;
  int piece = 1;
  std::size_t samples = 10000;
  std::size_t pairs = 10000;
  double radius = 0.0;
  std::uint64_t seed = 7;
  std::string csv;

  int run() const {
    SmoothMap map;
    Domain region = PolygonDomain({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
    std::optional<Vec> probe;
    if (name == "spiral") {
      map = spiral_map();
      region = spiral_triangle_piece(piece);
    } else if (name == "power") {
      map = power_map(alpha);
      region = PolygonDomain({{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}});
      probe = Vec(Eigen::Vector2d::Zero());
    } else if (name == "identity") {
      map = identity_map(2);
    } else if (name == "similarity") {
      map = similarity(k);
    } else {
      throw ConfigError("unknown map '" + name + "' (spiral, power, identity, similarity)");
    }
    const auto pts = sample_domain(region, samples, seed);
    const DilatationReport d = dilatation(map, pts, probe, true);
    const BoundingBox box = bounding_box(region);
    const double r = radius > 0.0 ? radius : 0.01 * (box.hi - box.lo).minCoeff();
    const QIReport q = quasiisometry_constant(map, region, r, pairs, seed);

    std::size_t bad = 0;
    for (const auto& s : d.samples) {
      if (!(s.geom_ratio <= s.frob_ratio * (1.0 + 1e-12) && s.frob_ratio <= 2.0 * s.geom_ratio * (1.0 + 1e-12))) ++bad;
    }
    std::cout << "map = " << map.name << "\nseed = " << seed << "\nsample_count = " << d.sample_count
              << "\nK_frob = " << num(d.K_frob) << "\nK_geom = " << num(d.K_geom)
              << "\nmin_abs_det = " << num(d.min_abs_det) << "\nmax_abs_det = " << num(d.max_abs_det) << "\n";
    if (d.det_growth) {
      std::cout << "det_growth = " << num(*d.det_growth)
                << "\ndet_growth_flag = " << (d.det_growth_flag ? "true" : "false") << "\n";
    }
    std::cout << "Q_est = " << num(q.Q_est) << "\nball_radius = " << num(q.ball_radius)
              << "\npair_count = " << q.pair_count << "\ndilatation_order_violations = " << bad << "\n";
    if (!csv.empty()) {
      auto f = open_output(csv);
      CsvWriter w(f, seed, {"x", "y", "abs_det", "lambda1", "lambda2", "frobenius_ratio", "geometric_ratio"});
      for (const auto& s : d.samples) {
        w.row({num(s.point[0]), num(s.point[1]), num(s.abs_det), num(s.singular[0]), num(s.singular[1]),
               num(s.frob_ratio), num(s.geom_ratio)});
      }
      std::cout << "csv = " << csv << "\n";
    }
    return bad ? kFailedCheck : kOk;
  }
};

struct SpectrumCommand {
  DomainArgs domain;
  std::vector<int> resolutions{64, 128};
  int k = 6;
  double tol = 1e-6;
  std::uint64_t seed = 7;
  double drift_limit = 0.05;
  std::string out = ".";

  int run() const {
    const auto [name, d] = domain.build();
    DossierOptions opt;
    opt.k = k;
    opt.seed = seed;
    opt.spectrum.eigen.tol = tol;
    opt.spectrum.eigen.seed = seed;
    std::vector<SpectrumReport> spectra;
    std::optional<DossierReport> dossier;
    if (resolutions.size() >= 2) {
      dossier = compactness_dossier(d, name, resolutions, opt);
      spectra = dossier->spectra;
    } else {
      spectra.push_back(domain_spectrum(d, resolutions.at(0), k, opt.spectrum));
    }
    const fs::path path = output_dir(out) / (name + "_spectrum.csv");
    auto f = open_output(path);
    CsvWriter csv(f, seed, {"resolution", "j", "lambda", "sigma", "residual"});
    for (const auto& s : spectra) {
      for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) {
        csv.row({std::to_string(s.resolution), std::to_string(j + 1), num(s.eigenvalues[j]), num(s.singular_values[j]),
                 num(s.residuals[j])});
      }
    }
    int status = kOk;
    for (const auto& s : spectra) {
      std::cout << fmt::format("resolution {}: {} cells, {} component(s), {} debris cells dropped, {} iterations ({})\n",
                               s.resolution, s.cell_count, s.component_count, s.dropped_cells, s.iterations, s.method);
      if (std::abs(s.eigenvalues[0]) > tol && s.component_count == 1) status = kFailedCheck;
    }
    if (dossier) {
      std::cout << dossier->verdict << "\n";
      if (dossier->max_drift >= drift_limit) status = kFailedCheck;
      for (const auto& c : dossier->condition2) {
        if (!c.passed()) status = kFailedCheck;
      }
    }
    std::cout << "csv = " << path.string() << "\n";
    return status;
  }
};

struct VerifyCommand {
  bool quick = false;
  std::vector<int> criteria;
  std::uint64_t seed = 7;
  std::string out = ".";

  int run() const {
    AcceptanceOptions opt;
    opt.quick = quick;
    opt.seed = seed;
    for (int c : criteria) {
      if (c < 1 || c > 9) throw ConfigError("criteria are numbered 1 to 9");
    }
    const auto results = run_acceptance(opt, criteria);
    const fs::path path = output_dir(out) / "acceptance.csv";
    auto f = open_output(path);
    CsvWriter csv(f, seed, {"criterion", "name", "passed"});
    bool all = true;
    for (const auto& r : results) {
      std::cout << format_result(r) << std::endl;
      csv.row({std::to_string(r.id), r.name, r.passed ? "true" : "false"});
      all = all && r.passed;
    }
    std::cout << "csv = " << path.string() << "\n";
    return all ? kOk : kFailedCheck;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rough-domain Sobolev embedding toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  DomainCommand domain_cmd;
  auto* domain = app.add_subcommand("domain", "rasterize a domain and report its topology");
  domain_cmd.domain.add_to(domain);
  domain->add_option("--cells", domain_cmd.cells, "cells per unit length")->check(CLI::PositiveNumber);
  domain->add_flag("--plot", domain_cmd.plot, "write an SVG of the mask");
  domain->add_flag("--pgm", domain_cmd.pgm, "write the mask as a plain graymap");
  domain->add_option("--approx", domain_cmd.approx_h, "build the polygonal approximant V_h for this h");
  domain->add_option("--out", domain_cmd.out, "output directory");

  InequalityCommand ineq_cmd;
  auto* ineq = app.add_subcommand("inequality", "random-function sweeps of the interior inequalities");
  ineq->add_option("--suite", ineq_cmd.sweep.suites, "shift half interior fibered interp fibered_all or all")
      ->delimiter(',');
  ineq->add_option("--trials", ineq_cmd.sweep.trials)->check(CLI::PositiveNumber);
  ineq->add_option("--hs", ineq_cmd.sweep.hs, "shrink parameters h")->delimiter(',');
  ineq->add_option("--seed", ineq_cmd.sweep.seed);
  ineq->add_option("--max-order", ineq_cmd.sweep.max_order)->check(CLI::PositiveNumber);
  ineq->add_option("--samples", ineq_cmd.sweep.samples_1d, "samples per 1-D function")->check(CLI::Range(16, 100000000));
  ineq->add_option("--cells", ineq_cmd.sweep.cells_per_unit)->check(CLI::PositiveNumber);
  ineq->add_option("--domain", ineq_cmd.sweep.domain, "elementary catalog domain for the fibred suites");
  ineq->add_option("--out", ineq_cmd.out, "output directory");

  MapCommand map_cmd;
  auto* map = app.add_subcommand("map", "map diagnostics");
  map->require_subcommand(1);
  auto* analyze = map->add_subcommand("analyze", "dilatation and quasiisometry estimates");
  analyze->add_option("--name", map_cmd.name, "spiral, power, identity or similarity");
  analyze->add_option("--alpha", map_cmd.alpha, "power map exponent");
  analyze->add_option("--k", map_cmd.k, "similarity factor");
  analyze->add_option("--piece", map_cmd.piece, "spiral piece T_n sampled")->check(CLI::PositiveNumber);
  analyze->add_option("--samples", map_cmd.samples)->check(CLI::PositiveNumber);
  analyze->add_option("--pairs", map_cmd.pairs)->check(CLI::PositiveNumber);
  analyze->add_option("--radius", map_cmd.radius, "ball radius (default 1% of the region's short side)");
  analyze->add_option("--seed", map_cmd.seed);
  analyze->add_option("--csv", map_cmd.csv, "per-sample CSV path");

  SpectrumCommand spec_cmd;
  auto* spectrum = app.add_subcommand("spectrum", "Neumann spectra and the compactness dossier");
  spec_cmd.domain.add_to(spectrum);
  spectrum->add_option("--res", spec_cmd.resolutions, "cells per unit, one or more")->delimiter(',');
  spectrum->add_option("--k", spec_cmd.k)->check(CLI::PositiveNumber);
  spectrum->add_option("--tol", spec_cmd.tol)->check(CLI::PositiveNumber);
  spectrum->add_option("--seed", spec_cmd.seed);
  spectrum->add_option("--drift-limit", spec_cmd.drift_limit)->check(CLI::PositiveNumber);
  spectrum->add_option("--out", spec_cmd.out, "output directory");

  VerifyCommand verify_cmd;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_flag("--quick", verify_cmd.quick, "reduced resolutions");
  verify->add_option("--criteria", verify_cmd.criteria, "subset of 1..9")->delimiter(',');
  verify->add_option("--seed", verify_cmd.seed);
  verify->add_option("--out", verify_cmd.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*domain) return domain_cmd.run();
    if (*ineq) return ineq_cmd.run();
    if (*analyze) return map_cmd.run();
    if (*spectrum) return spec_cmd.run();
    if (*verify) return verify_cmd.run();
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const ParameterError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kFailedCheck;
  }
  return kUsage;
}
