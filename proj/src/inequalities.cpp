#include "roughembed/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "roughembed/error.hpp"

namespace roughembed {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt3 = std::numbers::sqrt3;

/// Trapezoid rule for g^2 over [lo, hi], where g is given at the knots and
/// linearly interpolated in between.
double trapezoid_of_square(const Eigen::VectorXd& g, double a, double dx, Interval sub) {
  const int n = static_cast<int>(g.size());
  auto value_at = [&](double x) {
    double pos = (x - a) / dx;
    pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
    const int i = std::min(static_cast<int>(std::floor(pos)), n - 2);
    const double w = pos - i;
    return (1.0 - w) * g[i] + w * g[i + 1];
  };
  auto snap = [](double pos) {
    const double r = std::round(pos);
    return std::abs(pos - r) < 1e-9 ? r : pos;
  };
  const double p_lo = snap((sub.lo - a) / dx), p_hi = snap((sub.hi - a) / dx);
  const int i0 = static_cast<int>(std::ceil(p_lo));
  const int i1 = static_cast<int>(std::floor(p_hi));
  const double g_lo = value_at(sub.lo), g_hi = value_at(sub.hi);
  if (i0 > i1) return 0.5 * (g_lo * g_lo + g_hi * g_hi) * (sub.hi - sub.lo);

  double sum = 0.0;
  const double t0 = a + i0 * dx, t1 = a + i1 * dx;
  sum += 0.5 * (g_lo * g_lo + g[i0] * g[i0]) * (t0 - sub.lo);
  for (int i = i0; i < i1; ++i) sum += 0.5 * (g[i] * g[i] + g[i + 1] * g[i + 1]) * dx;
  sum += 0.5 * (g[i1] * g[i1] + g_hi * g_hi) * (sub.hi - t1);
  return sum;
}

Eigen::VectorXd derivative_samples(const SampledFunction1D& u) {
  const int n = u.size();
  const double dx = u.spacing();
  const Eigen::VectorXd& v = u.values;
  Eigen::VectorXd d(n);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dx);
  for (int i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * dx);
  return d;
}

void require_symmetric(const SampledFunction1D& u) {
  if (std::abs(u.a + u.b) > 1e-12 * (u.b - u.a)) {
    throw ParameterError("interval must be symmetric about 0");
  }
}

}  // namespace

SampledFunction1D::SampledFunction1D(double a_, double b_, Eigen::VectorXd v)
    : a(a_), b(b_), values(std::move(v)) {
  if (!(a < b)) throw ParameterError("sampled function needs a < b");
  if (values.size() < 16) throw ParameterError("sampled function needs at least 16 samples");
  if (!values.allFinite()) throw InvalidData("sampled function contains non-finite values");
}

std::pair<double, double> integrals_1d(const SampledFunction1D& u, Interval sub) {
  const double slop = 1e-12 * (u.b - u.a);
  if (!(sub.lo >= u.a - slop && sub.hi <= u.b + slop && sub.lo < sub.hi)) {
    throw ParameterError("sub-interval must lie inside the sampling interval");
  }
  const Interval clipped{std::max(sub.lo, u.a), std::min(sub.hi, u.b)};
  const double dx = u.spacing();
  return {trapezoid_of_square(u.values, u.a, dx, clipped),
          trapezoid_of_square(derivative_samples(u), u.a, dx, clipped)};
}

Norms1D norms_1d(const SampledFunction1D& u, Interval sub) {
  const auto [l2sq, semisq] = integrals_1d(u, sub);
  return {std::sqrt(l2sq), std::sqrt(semisq)};
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(GridMask m, Eigen::VectorXd v) : mask(std::move(m)), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != mask.count()) {
    throw ParameterError("grid function needs one value per included cell");
  }
  if (!values.allFinite()) throw InvalidData("grid function contains non-finite values");
}

GridFunction GridFunction::restrict_to(const GridMask& sub) const {
  if (!sub.subset_of(mask)) throw ParameterError("restriction mask is not a sub-mask");
  Eigen::VectorXd v(static_cast<Eigen::Index>(sub.count()));
  for (std::size_t c = 0; c < sub.count(); ++c) {
    v[static_cast<Eigen::Index>(c)] = values[mask.compact_index(sub.included()[c])];
  }
  return {sub, std::move(v)};
}

double l2_norm_squared(const GridFunction& u) {
  return u.values.squaredNorm() * u.mask.grid().cell_volume();
}

double dirichlet_energy(const GridFunction& u) {
  const Grid& g = u.mask.grid();
  const int d = g.dim();
  const double weight = std::pow(g.spacing, d - 2);
  double sum = 0.0;
  for (std::size_t c = 0; c < u.mask.count(); ++c) {
    const std::size_t flat = u.mask.included()[c];
    for (int a = 0; a < d; ++a) {
      if (g.coordinate(flat, a) + 1 >= g.dims[static_cast<std::size_t>(a)]) continue;
      const std::int64_t nb = u.mask.compact_index(flat + g.stride(a));
      if (nb < 0) continue;
      const double diff = u.values[static_cast<Eigen::Index>(c)] - u.values[nb];
      sum += diff * diff;
    }
  }
  return sum * weight;
}

// ---------------------------------------------------------------------------

TrigPolynomial TrigPolynomial::random(int dim, int order, std::mt19937_64& rng) {
  if (dim < 1 || dim > 3) throw ParameterError("trig polynomials are supported in 1 to 3 dimensions");
  if (order < 0) throw ParameterError("trig polynomial order must be nonnegative");
  TrigPolynomial p;
  p.dim_ = dim;
  p.order_ = order;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  // Half-lattice: k = 0 or the first nonzero component is positive.
  Eigen::VectorXi k = Eigen::VectorXi::Constant(dim, -order);
  while (true) {
    int first = 0;
    for (int a = 0; a < dim; ++a) {
      if (k[a] != 0) {
        first = k[a];
        break;
      }
    }
    if (first >= 0) {
      p.waves_.push_back(k);
      p.coeff_.push_back(normal(rng));
      p.phase_.push_back(angle(rng));
    }
    int a = dim - 1;
    while (a >= 0 && ++k[a] > order) k[a--] = -order;
    if (a < 0) break;
  }
  return p;
}

double TrigPolynomial::operator()(const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (std::size_t w = 0; w < waves_.size(); ++w) {
    s += coeff_[w] * std::cos(std::numbers::pi * waves_[w].cast<double>().dot(x) + phase_[w]);
  }
  return s;
}

double TrigPolynomial::operator()(double t) const {
  if (dim_ != 1) throw ParameterError("scalar evaluation needs a one-dimensional polynomial");
  return (*this)(Eigen::VectorXd::Constant(1, t));
}

Eigen::VectorXd TrigPolynomial::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  for (std::size_t w = 0; w < waves_.size(); ++w) {
    const Eigen::VectorXd kv = waves_[w].cast<double>();
    g -= coeff_[w] * std::numbers::pi * std::sin(std::numbers::pi * kv.dot(x) + phase_[w]) * kv;
  }
  return g;
}

double TrigPolynomial::derivative(double t) const {
  return gradient(Eigen::VectorXd::Constant(1, t))[0];
}

GridFunction TrigPolynomial::sample(const GridMask& mask) const {
  const Grid& g = mask.grid();
  if (g.dim() != dim_) throw ParameterError("mask and polynomial dimensions differ");
  if (dim_ != 2) return GridFunction::sample(mask, *this);

  // u(x, y) = Re sum_{k1} e^{i pi k1 x} A_{k1}(y),  A_{k1}(y) = sum_{k2} c e^{i phi} e^{i pi k2 y}.
  using C = std::complex<double>;
  const int nx = g.dims[0], ny = g.dims[1];
  const int m = order_;
  std::vector<C> ex(static_cast<std::size_t>((m + 1) * nx));
  for (int i = 0; i < nx; ++i) {
    const double x = g.origin[0] + (i + 0.5) * g.spacing;
    for (int k1 = 0; k1 <= m; ++k1) ex[static_cast<std::size_t>(k1 * nx + i)] = std::polar(1.0, std::numbers::pi * k1 * x);
  }
  std::vector<C> acc(static_cast<std::size_t>((m + 1) * ny), C{});
  for (std::size_t w = 0; w < waves_.size(); ++w) {
    const int k1 = waves_[w][0], k2 = waves_[w][1];
    const C amp = std::polar(coeff_[w], phase_[w]);
    for (int j = 0; j < ny; ++j) {
      const double y = g.origin[1] + (j + 0.5) * g.spacing;
      acc[static_cast<std::size_t>(k1 * ny + j)] += amp * std::polar(1.0, std::numbers::pi * k2 * y);
    }
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(mask.count()));
  for (std::size_t c = 0; c < mask.count(); ++c) {
    const std::size_t flat = mask.included()[c];
    const int i = static_cast<int>(flat % static_cast<std::size_t>(nx));
    const int j = static_cast<int>(flat / static_cast<std::size_t>(nx));
    double s = 0.0;
    for (int k1 = 0; k1 <= m; ++k1) {
      s += (ex[static_cast<std::size_t>(k1 * nx + i)] * acc[static_cast<std::size_t>(k1 * ny + j)]).real();
    }
    v[static_cast<Eigen::Index>(c)] = s;
  }
  return {mask, std::move(v)};
}

// ---------------------------------------------------------------------------

InequalityReport make_report(std::string name, std::string formula, double lhs, double rhs,
                             std::vector<std::pair<std::string, double>> constants) {
  InequalityReport r;
  r.name = std::move(name);
  r.formula = std::move(formula);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tolerance = 1e-6 * std::max({lhs, rhs, 1.0});
  r.holds = lhs <= rhs + r.tolerance;
  r.constants = std::move(constants);
  return r;
}

InequalityReport shift_difference_bound(const SampledFunction1D& u) {
  require_symmetric(u);
  const double h = u.b;
  const double right = std::sqrt(integrals_1d(u, {0.0, h}).first);
  const double left = std::sqrt(integrals_1d(u, {-h, 0.0}).first);
  const double semi = std::sqrt(integrals_1d(u, {-h, h}).second);
  return make_report("shift_difference", "|‖u‖(0,h) − ‖u‖(−h,0)| ≤ √2·h·‖u'‖(−h,h)",
                     std::abs(right - left), kSqrt2 * h * semi, {{"sqrt2", kSqrt2}, {"h", h}});
}

InequalityReport half_interval_bound(const SampledFunction1D& u, Side target) {
  require_symmetric(u);
  const double h = u.b;
  const double right = integrals_1d(u, {0.0, h}).first;
  const double left = integrals_1d(u, {-h, 0.0}).first;
  const double semi = integrals_1d(u, {-h, h}).second;
  const bool to_right = target == Side::right;
  return make_report(to_right ? "half_interval_right" : "half_interval_left",
                     to_right ? "∫(0,h)|u|² ≤ 2∫(−h,0)|u|² + 4h²∫(−h,h)|u'|²"
                              : "∫(−h,0)|u|² ≤ 2∫(0,h)|u|² + 4h²∫(−h,h)|u'|²",
                     to_right ? right : left, 2.0 * (to_right ? left : right) + 4.0 * h * h * semi,
                     {{"2", 2.0}, {"4", 4.0}, {"h", h}});
}

InequalityReport interior_bound_1d(const SampledFunction1D& u, double h) {
  if (!(h > 0.0 && h < (u.b - u.a) / 4.0)) throw ParameterError("interior bound needs 0 < h < (b - a)/4");
  const double whole = integrals_1d(u, {u.a, u.b}).first;
  const double inner = integrals_1d(u, {u.a + h, u.b - h}).first;
  const double semi = integrals_1d(u, {u.a, u.b}).second;
  return make_report("interior_1d", "∫(a,b)|u|² ≤ 3∫(a+h,b−h)|u|² + 4h²∫(a,b)|u'|²", whole,
                     3.0 * inner + 4.0 * h * h * semi, {{"3", 3.0}, {"4", 4.0}, {"h", h}});
}

namespace {

void require_fibre_parameters(const ElementaryDomain& domain, double h) {
  if (!(h > 0.0 && h < 1.0 / 3.0)) throw ParameterError("h must lie in (0, 1/3)");
  if (domain.shrink_h() != 0.0) throw ParameterError("expected an unshrunk elementary domain");
}

GridMask shrunk_mask(const GridFunction& u, const ElementaryDomain& domain, double h, ShrinkMode mode) {
  return rasterize_on(domain.shrink(h, mode), u.mask.grid()).intersect(u.mask);
}

InequalityReport fibered_from_parts(double whole, double inner, double energy, double h, ShrinkMode mode) {
  return make_report(mode == ShrinkMode::vertical_only ? "fibered_vertical" : "fibered_all_directions",
                     "∫U|u|² ≤ 3∫U_h|u|² + 4h²∫U|∇u|²", whole, 3.0 * inner + 4.0 * h * h * energy,
                     {{"3", 3.0}, {"4", 4.0}, {"h", h}});
}

InequalityReport interpolation_from_parts(double whole, double inner, double energy, double h) {
  const auto [a, b] = interpolation_constants(h);
  return make_report("interpolation", "‖u‖L²(U) ≤ 2h‖u‖H¹(U) + √3‖u‖L²(U_h)", std::sqrt(whole),
                     a * std::sqrt(whole + energy) + b * std::sqrt(inner),
                     {{"2", 2.0}, {"sqrt3", kSqrt3}, {"h", h}});
}

}  // namespace

InequalityReport fibered_interior_bound(const GridFunction& u, const ElementaryDomain& domain, double h,
                                        ShrinkMode mode) {
  require_fibre_parameters(domain, h);
  const GridMask inner = shrunk_mask(u, domain, h, mode);
  return fibered_from_parts(l2_norm_squared(u), l2_norm_squared(u.restrict_to(inner)), dirichlet_energy(u), h,
                            mode);
}

InterpolationConstants interpolation_constants(double h) {
  if (!(h > 0.0 && h < 1.0 / 3.0)) throw ParameterError("h must lie in (0, 1/3)");
  return {2.0 * h, kSqrt3};
}

InequalityReport verify_interpolation(const GridFunction& u, const ElementaryDomain& domain, double h) {
  require_fibre_parameters(domain, h);
  const GridMask inner = shrunk_mask(u, domain, h, ShrinkMode::vertical_only);
  return interpolation_from_parts(l2_norm_squared(u), l2_norm_squared(u.restrict_to(inner)),
                                  dirichlet_energy(u), h);
}

// ---------------------------------------------------------------------------

std::vector<std::string> expand_suites(const std::vector<std::string>& suites) {
  static const std::vector<std::string> known{"shift", "half", "interior", "fibered", "interp", "fibered_all"};
  std::vector<std::string> out;
  for (const auto& s : suites) {
    if (s == "all") {
      for (const auto& k : known) {
        if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
      }
    } else if (std::find(known.begin(), known.end(), s) != known.end()) {
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    } else {
      throw ParameterError("unknown inequality suite '" + s + "'");
    }
  }
  return out;
}

std::vector<SweepRow> inequality_sweep(const SweepOptions& options) {
  const auto suites = expand_suites(options.suites);
  auto wants = [&](const char* s) { return std::find(suites.begin(), suites.end(), s) != suites.end(); };
  for (double h : options.hs) {
    if (!(h > 0.0 && h < 0.25)) throw ParameterError("sweep h values must lie in (0, 1/4)");
  }

  const bool needs_grid = wants("fibered") || wants("interp") || wants("fibered_all");
  std::optional<ElementaryDomain> domain;
  std::optional<GridMask> mask;
  std::vector<GridMask> vertical, all_dirs;
  if (needs_grid) {
    const Domain d = catalog(options.domain);
    if (!std::holds_alternative<ElementaryDomain>(d)) {
      throw ParameterError("fibred suites need an elementary domain");
    }
    domain = std::get<ElementaryDomain>(d);
    mask = rasterize(*domain, options.cells_per_unit);
    for (double h : options.hs) {
      vertical.push_back(rasterize_on(domain->shrink(h, ShrinkMode::vertical_only), mask->grid()).intersect(*mask));
      all_dirs.push_back(rasterize_on(domain->shrink(h, ShrinkMode::all_directions), mask->grid()).intersect(*mask));
    }
  }

  std::vector<SweepRow> rows;
  auto push = [&](const char* suite, int trial, double h, const InequalityReport& r, bool asserted = true) {
    rows.push_back({suite, trial, h, r.lhs, r.rhs, r.slack, r.holds, asserted});
  };

  for (int trial = 0; trial < options.trials; ++trial) {
    std::seed_seq seq{options.seed, static_cast<std::uint64_t>(trial)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> pick_order(1, std::max(1, options.max_order));
    const TrigPolynomial p1 = TrigPolynomial::random(1, pick_order(rng), rng);

    std::optional<GridFunction> u2;
    double whole = 0.0, energy = 0.0;
    if (needs_grid) {
      const TrigPolynomial p2 = TrigPolynomial::random(2, pick_order(rng), rng);
      u2 = p2.sample(*mask);
      whole = l2_norm_squared(*u2);
      energy = dirichlet_energy(*u2);
    }

    for (std::size_t hi = 0; hi < options.hs.size(); ++hi) {
      const double h = options.hs[hi];
      if (wants("shift") || wants("half")) {
        const auto u = SampledFunction1D::from(p1, -h, h, options.samples_1d);
        if (wants("shift")) push("shift", trial, h, shift_difference_bound(u));
        if (wants("half")) {
          push("half_right", trial, h, half_interval_bound(u, Side::right));
          push("half_left", trial, h, half_interval_bound(u, Side::left));
        }
      }
      if (wants("interior")) {
        const auto u = SampledFunction1D::from(p1, 0.0, 1.0, options.samples_1d);
        push("interior", trial, h, interior_bound_1d(u, h));
      }
      if (needs_grid) {
        const double inner_v = l2_norm_squared(u2->restrict_to(vertical[hi]));
        if (wants("fibered")) {
          push("fibered", trial, h, fibered_from_parts(whole, inner_v, energy, h, ShrinkMode::vertical_only));
        }
        if (wants("interp")) push("interp", trial, h, interpolation_from_parts(whole, inner_v, energy, h));
        if (wants("fibered_all")) {
          const double inner_a = l2_norm_squared(u2->restrict_to(all_dirs[hi]));
          push("fibered_all", trial, h, fibered_from_parts(whole, inner_a, energy, h, ShrinkMode::all_directions),
               false);
        }
      }
    }
  }
  return rows;
}

}  // namespace roughembed
