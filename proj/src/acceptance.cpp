#include "roughembed/acceptance.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>

#include "roughembed/domain.hpp"
#include "roughembed/inequalities.hpp"
#include "roughembed/mappings.hpp"
#include "roughembed/spectrum.hpp"

namespace roughembed {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects named sub-checks; the criterion passes iff all of them pass.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool passed() const { return failures_.empty(); }
  std::string detail() const {
    std::string out;
    for (const auto& n : notes_) out += (out.empty() ? "" : "; ") + n;
    for (const auto& f : failures_) out += (out.empty() ? "FAILED " : "; FAILED ") + f;
    return out;
  }

 private:
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

CriterionResult finish(int id, const char* name, const Checks& c, Clock::time_point t0) {
  return {id, name, c.passed(), c.detail(), since(t0)};
}

bool close(double x, double target, double tol) { return std::abs(x - target) <= tol; }

}  // namespace

CriterionResult criterion_inequality_suites(const AcceptanceOptions& options) {
  const auto t0 = Clock::now();
  Checks c;
  SweepOptions sweep;
  sweep.suites = {"shift", "half", "interior", "fibered"};
  sweep.trials = 200;
  sweep.hs = {0.05, 0.1, 0.2};
  sweep.seed = options.seed;
  const auto rows = inequality_sweep(sweep);
  std::size_t bad = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    const double rel = r.slack / std::max(r.lhs, 1e-300);
    worst = std::min(worst, rel);
    if (r.slack < -1e-6 * r.lhs) ++bad;
  }
  const double secs = since(t0);
  c.note(fmt::format("{} rows, {} below -1e-6*lhs, min slack/lhs {:.3g}, {:.1f} s", rows.size(), bad, worst, secs));
  c.expect(bad == 0, "rows with slack < -1e-6*lhs");
  c.expect(rows.size() == 200u * 3u * 5u, "row count");
  c.expect(secs < 30.0, "runtime >= 30 s");
  return finish(1, "inequality suites", c, t0);
}

CriterionResult criterion_exact_constants(const AcceptanceOptions&) {
  const auto t0 = Clock::now();
  Checks c;
  constexpr int kN = 10000;
  const double e2 = std::exp(2.0), em2 = std::exp(-2.0);
  auto expo = [](double t) { return std::exp(t); };
  auto ident = [](double t) { return t; };

  const auto ue = SampledFunction1D::from(expo, -1.0, 1.0, kN);
  const InequalityReport shift = shift_difference_bound(ue);
  const double shift_lhs = std::sqrt((e2 - 1.0) / 2.0) - std::sqrt((1.0 - em2) / 2.0);
  const double shift_rhs = std::numbers::sqrt2 * std::sqrt((e2 - em2) / 2.0);
  c.expect(close(shift.lhs, shift_lhs, 1e-4) && close(shift.rhs, shift_rhs, 1e-4) && shift.holds,
           fmt::format("shift bound e^t: {} / {}", shift.lhs, shift.rhs));
  c.expect(close(shift_lhs, 1.12981, 1e-5) && close(shift_rhs, 2.69327, 1e-5), "shift bound closed form");

  const InequalityReport half = half_interval_bound(ue, Side::right);
  const double half_lhs = (e2 - 1.0) / 2.0, half_rhs = (1.0 - em2) + 2.0 * (e2 - em2);
  c.expect(close(half.lhs, half_lhs, 1e-4) && close(half.rhs, half_rhs, 1e-4) && half.holds,
           fmt::format("half-interval bound e^t: {} / {}", half.lhs, half.rhs));
  c.expect(close(half_lhs, 3.19453, 1e-5) && close(half_rhs, 15.37211, 1e-5), "half-interval closed form");

  const auto ut = SampledFunction1D::from(ident, 0.0, 1.0, kN);
  const InequalityReport interior = interior_bound_1d(ut, 0.2);
  c.expect(close(interior.lhs, 1.0 / 3.0, 1e-4) && close(interior.rhs, 0.664, 1e-4) && interior.holds,
           fmt::format("interior bound u=t: {} / {}", interior.lhs, interior.rhs));

  const auto odd = SampledFunction1D::from(ident, -1.0, 1.0, kN);
  const InequalityReport shiftodd = shift_difference_bound(odd);
  c.expect(close(shiftodd.lhs, 0.0, 1e-4) && close(shiftodd.rhs, 2.0, 1e-4), "shift bound u=t");
  const InequalityReport halft = half_interval_bound(odd, Side::right);
  c.expect(close(halft.lhs, 1.0 / 3.0, 1e-4) && close(halft.rhs, 2.0 / 3.0 + 8.0, 1e-4), "half-interval bound u=t");

  const Norms1D nt = norms_1d(ut, {0.0, 1.0});
  c.expect(close(nt.l2, 1.0 / std::sqrt(3.0), 1e-6) && close(nt.h1_semi, 1.0, 1e-6), "norms of u=t");
  const auto us = SampledFunction1D::from([](double t) { return std::sin(std::numbers::pi * t); }, 0.0, 1.0, kN);
  c.expect(close(norms_1d(us, {0.0, 1.0}).l2, std::sqrt(0.5), 1e-5), "norm of sin(pi t)");

  const auto [a, b] = interpolation_constants(0.1);
  c.expect(close(a, 0.2, 1e-15) && close(b, std::sqrt(3.0), 1e-15), "interpolation constants at h=0.1");

  // u = 1 on the unit square: 0.2 + sqrt3 sqrt(0.8) - 1.
  const auto square = std::get<ElementaryDomain>(catalog("unit_square"));
  const GridMask m = rasterize(square, 40);
  const GridMask inner = rasterize_on(square.shrink(0.1, ShrinkMode::vertical_only), m.grid());
  const double slack = condition2_slack(GridFunction(m, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m.count()))),
                                        inner, a, b);
  c.expect(close(slack, 0.2 + std::sqrt(3.0) * std::sqrt(0.8) - 1.0, 1e-4), fmt::format("constant slack {}", slack));

  c.note(fmt::format("shift e^t {:.6f}/{:.6f}, half e^t {:.6f}/{:.6f}, interior u=t {:.6f}/{:.6f}", shift.lhs, shift.rhs,
                     half.lhs, half.rhs, interior.lhs, interior.rhs));
  return finish(2, "exact constants", c, t0);
}

CriterionResult criterion_spiral_map(const AcceptanceOptions& options) {
  const auto t0 = Clock::now();
  Checks c;
  const SmoothMap phi = spiral_map();
  const PolygonDomain t1 = spiral_triangle_piece(1);
  const auto pts = sample_domain(t1, 10000, options.seed);
  double round_trip = 0.0, det_err = 0.0;
  for (const Vec& p : pts) {
    round_trip = std::max(round_trip, (phi.inverse(phi(p)) - p).norm());
    const double exact = 2.0 * std::numbers::pi * p[0] / p[1];
    det_err = std::max(det_err, std::abs(jacobian_fd(phi, p).determinant() - exact) / exact);
  }
  c.expect(round_trip < 1e-10, fmt::format("round trip {:.3g}", round_trip));
  c.expect(det_err < 1e-6, fmt::format("finite-difference det error {:.3g}", det_err));
  double comp = 0.0;
  for (int n : {2, 3, 5}) comp = std::max(comp, spiral_composition_check(n, 10000, options.seed));
  c.expect(comp < 1e-10, fmt::format("composition identity {:.3g}", comp));

  const std::size_t pairs = options.quick ? 20000 : 100000;
  const QIReport q1 = quasiisometry_constant(phi, t1, 0.01 * std::exp(-2.0), pairs, options.seed);
  const QIReport q3 = quasiisometry_constant(phi, spiral_triangle_piece(3), 0.01 * std::exp(-4.0), pairs, options.seed);
  const double rel = std::abs(q1.Q_est - q3.Q_est) / q1.Q_est;
  c.expect(std::isfinite(q1.Q_est) && rel < 0.05, fmt::format("Q(T1) {:.6g} vs Q(T3) {:.6g}", q1.Q_est, q3.Q_est));
  const double secs = since(t0);
  c.expect(secs < 10.0, "runtime >= 10 s");
  c.note(fmt::format("round trip {:.2g}, composition {:.2g}, det rel err {:.2g}, Q(T1) {:.5g}, Q(T3) {:.5g}",
                     round_trip, comp, det_err, q1.Q_est, q3.Q_est));
  return finish(3, "spiral map", c, t0);
}

CriterionResult criterion_dilatation(const AcceptanceOptions& options) {
  const auto t0 = Clock::now();
  Checks c;
  const BoundingBox box{Eigen::Vector2d(-1.0, -1.0), Eigen::Vector2d(1.0, 1.0)};
  const auto pts = sample_box(box, 10000, options.seed);
  const DilatationReport pw = dilatation(power_map(2.0), pts, Vec(Eigen::Vector2d::Zero()), true);
  const DilatationReport id = dilatation(identity_map(2), pts, std::nullopt, true);
  c.expect(close(pw.K_frob, 2.5, 1e-6) && close(pw.K_geom, 2.0, 1e-6),
           fmt::format("power map K {} / {}", pw.K_frob, pw.K_geom));
  c.expect(id.K_frob == 2.0 && id.K_geom == 1.0, fmt::format("identity K {} / {}", id.K_frob, id.K_geom));
  std::size_t bad = 0;
  for (const auto* r : {&pw, &id}) {
    for (const auto& s : r->samples) {
      if (!(s.geom_ratio <= s.frob_ratio * (1.0 + 1e-12) && s.frob_ratio <= 2.0 * s.geom_ratio * (1.0 + 1e-12))) ++bad;
    }
  }
  c.expect(bad == 0, fmt::format("{} samples break K_geom <= K_frob <= 2 K_geom", bad));
  c.note(fmt::format("power K_frob {:.12g}, K_geom {:.12g}, |det| growth {:.3g} (flag {}); identity {} / {}", pw.K_frob,
                     pw.K_geom, pw.det_growth.value_or(0.0), pw.det_growth_flag, id.K_frob, id.K_geom));
  return finish(4, "dilatation", c, t0);
}

CriterionResult criterion_classical_spectra(const AcceptanceOptions&) {
  const auto t0 = Clock::now();
  Checks c;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const SpectrumReport line = domain_spectrum(catalog("unit_interval"), 200, 4);
  const SpectrumReport sq = domain_spectrum(catalog("unit_square"), 128, 6);
  auto rel = [](double x, double y) { return std::abs(x - y) / y; };
  c.expect(rel(line.eigenvalues[1], pi2) < 0.01, fmt::format("interval lambda2 {}", line.eigenvalues[1]));
  c.expect(rel(sq.eigenvalues[1], pi2) < 0.01 && rel(sq.eigenvalues[2], pi2) < 0.01,
           fmt::format("square lambda2,3 {} {}", sq.eigenvalues[1], sq.eigenvalues[2]));
  c.expect(rel(sq.eigenvalues[3], 2.0 * pi2) < 0.015, fmt::format("square lambda4 {}", sq.eigenvalues[3]));
  const double secs = since(t0);
  c.expect(secs < 60.0, "runtime >= 60 s");
  c.note(fmt::format("interval lambda2 {:.6g}; square lambda2..4 {:.6g} {:.6g} {:.6g}", line.eigenvalues[1],
                     sq.eigenvalues[1], sq.eigenvalues[2], sq.eigenvalues[3]));
  return finish(5, "classical spectra", c, t0);
}

CriterionResult criterion_mesh_independence(const AcceptanceOptions& options) {
  const auto t0 = Clock::now();
  Checks c;
  const int coarse = options.quick ? 128 : 256, fine = options.quick ? 256 : 512;
  CatalogParams chain;
  chain.alpha = 1.0;
  const std::vector<std::pair<std::string, Domain>> domains{{"sin_component_domain", catalog("sin_component_domain")},
                                                           {"spiral_domain", catalog("spiral_domain")},
                                                           {"rectangle_chain", catalog("rectangle_chain", chain)}};
  MaskSpectrumOptions so;
  for (const auto& [name, d] : domains) {
    const SpectrumReport a = domain_spectrum(d, coarse, 6, so);
    const SpectrumReport b = domain_spectrum(d, fine, 6, so);
    double worst = 0.0;
    for (int j = 1; j < 6; ++j) worst = std::max(worst, std::abs(b.eigenvalues[j] - a.eigenvalues[j]) / b.eigenvalues[j]);
    const double tol = so.eigen.tol;
    c.expect(worst < 0.05, fmt::format("{} drift {:.3g}", name, worst));
    c.expect(std::abs(a.eigenvalues[0]) <= tol && std::abs(b.eigenvalues[0]) <= tol,
             fmt::format("{} lambda1 {:.3g} / {:.3g}", name, a.eigenvalues[0], b.eigenvalues[0]));
    c.note(fmt::format("{} drift {:.2f}% (lambda2 {:.5g}, {} cells, {} dropped)", name, 100.0 * worst, b.eigenvalues[1],
                       b.cell_count, b.dropped_cells));
  }
  const double secs = since(t0);
  c.expect(secs < 300.0, "runtime >= 300 s");
  c.note(fmt::format("{:.1f} s", secs));
  return finish(6, "mesh independence", c, t0);
}

CriterionResult criterion_condition2(const AcceptanceOptions& options) {
  const auto t0 = Clock::now();
  Checks c;
  const auto step = std::get<ElementaryDomain>(catalog("step_domain"));
  const double h = 0.1;
  const auto [a, b] = interpolation_constants(h);
  const Condition2Report r = condition2_check(step, 128, h, a, b, 500, options.seed);
  c.expect(r.min_slack > -1e-6, fmt::format("min slack {}", r.min_slack));
  c.note(fmt::format("500 trials, min slack {:.6g}, {} negative", r.min_slack, r.failures));
  return finish(7, "condition 2", c, t0);
}

CriterionResult criterion_c_epsilon(const AcceptanceOptions& options) {
  const auto t0 = Clock::now();
  Checks c;
  CEpsilonOptions opt;
  opt.seed = options.seed;
  const std::vector<double> eps{0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  double worst_euclid = 0.0;
  for (int d : {2, 5}) {
    for (const auto& row : find_c_epsilon(NormTriple::euclidean(d), eps, opt)) {
      worst_euclid = std::max(worst_euclid, std::abs(row.c - std::max(1.0 - row.eps, 0.0)));
    }
  }
  c.expect(worst_euclid < 1e-12, fmt::format("euclidean triple error {:.3g}", worst_euclid));

  Eigen::MatrixXd n1 = Eigen::Vector2d(4.0, 1.0).asDiagonal();
  Eigen::MatrixXd n2 = Eigen::Matrix2d::Identity();
  Eigen::MatrixXd n3 = Eigen::Vector2d(1.0, 0.25).asDiagonal();
  const NormTriple diag(n1, n2, n3);
  double worst_grid = 0.0;
  for (const auto& row : find_c_epsilon(diag, {0.1, 0.5, 1.0}, opt)) {
    // Dense angular grid over the unit circle.
    double best = 0.0;
    constexpr int kDirections = 1000000;
    for (int i = 0; i < kDirections; ++i) {
      const double th = std::numbers::pi * i / kDirections;
      const double x = std::cos(th), y = std::sin(th);
      const double v = (1.0 - row.eps * std::sqrt(4.0 * x * x + y * y)) / std::sqrt(x * x + 0.25 * y * y);
      best = std::max(best, v);
    }
    worst_grid = std::max(worst_grid, std::abs(row.c - best));
    c.note(fmt::format("c({}) = {:.8f} (grid {:.8f})", row.eps, row.c, best));
  }
  c.expect(worst_grid < 1e-4, fmt::format("diagonal triple error {:.3g}", worst_grid));
  return finish(8, "finite-dimensional criterion", c, t0);
}

CriterionResult criterion_topology(const AcceptanceOptions&) {
  const auto t0 = Clock::now();
  Checks c;
  const Domain d = catalog("sin_component_domain");
  const int lo = 512, hi = 1024;
  const int b_lo = boundary_components(rasterize(d, lo));
  const int b_hi = boundary_components(rasterize(d, hi));
  c.expect(b_lo >= 3, fmt::format("{} boundary components at {}", b_lo, lo));
  c.expect(b_hi >= b_lo, fmt::format("{} -> {} boundary components", b_lo, b_hi));
  c.note(fmt::format("boundary components {} at {}, {} at {}", b_lo, lo, b_hi, hi));
  return finish(9, "topology", c, t0);
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const std::vector<int>& which) {
  using Fn = std::function<CriterionResult(const AcceptanceOptions&)>;
  const std::vector<Fn> all{criterion_inequality_suites, criterion_exact_constants, criterion_spiral_map,
                            criterion_dilatation,        criterion_classical_spectra, criterion_mesh_independence,
                            criterion_condition2,        criterion_c_epsilon,        criterion_topology};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 9; ++id) {
    if (!which.empty() && std::find(which.begin(), which.end(), id) == which.end()) continue;
    try {
      out.push_back(all[static_cast<std::size_t>(id - 1)](options));
    } catch (const std::exception& e) {
      out.push_back({id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), 0.0});
    }
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("[{}] {} {} ({:.1f} s): {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.seconds, r.detail);
}

}  // namespace roughembed
