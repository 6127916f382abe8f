#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "roughembed/domain.hpp"

namespace roughembed {

// ---------------------------------------------------------------------------
// Sampled functions

/// Uniform samples u(t_i), t_i = a + i (b - a) / (N - 1), N >= 16.
struct SampledFunction1D {
  double a = 0.0;
  double b = 1.0;
  Eigen::VectorXd values;

  SampledFunction1D(double a, double b, Eigen::VectorXd values);

  template <typename F>
  static SampledFunction1D from(F&& u, double a, double b, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = u(a + (b - a) * i / (n - 1));
    return {a, b, std::move(v)};
  }

  int size() const { return static_cast<int>(values.size()); }
  double spacing() const { return (b - a) / (size() - 1); }
  double knot(int i) const { return a + (b - a) * i / (size() - 1); }
};

struct Interval {
  double lo;
  double hi;
};

struct Norms1D {
  double l2;
  double h1_semi;
};

/// Trapezoid L2 norm and H1 seminorm of u over `sub`, derivative by central
/// differences (second-order one-sided at the ends).
Norms1D norms_1d(const SampledFunction1D& u, Interval sub);
/// Squared-norm variant: (int |u|^2, int |u'|^2) over `sub`.
std::pair<double, double> integrals_1d(const SampledFunction1D& u, Interval sub);

/// Values on the included cells of a mask, in the mask's compact order.
struct GridFunction {
  GridMask mask;
  Eigen::VectorXd values;

  GridFunction(GridMask mask, Eigen::VectorXd values);

  template <typename F>
  static GridFunction sample(const GridMask& mask, F&& u) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(mask.count()));
    for (std::size_t c = 0; c < mask.count(); ++c) {
      v[static_cast<Eigen::Index>(c)] = u(mask.grid().cell_center(mask.included()[c]));
    }
    return {mask, std::move(v)};
  }

  /// Restriction to a sub-mask on the same grid.
  GridFunction restrict_to(const GridMask& sub) const;
};

/// Cell-sum quadrature of |u|^2.
double l2_norm_squared(const GridFunction& u);
/// Face-difference Dirichlet energy: sum over faces between included cells of
/// ((u_i - u_j) / dx)^2 dx^d. Equals u^T K u for the assembled stiffness K.
double dirichlet_energy(const GridFunction& u);

// ---------------------------------------------------------------------------
// Random H1 family: u(x) = sum_k c_k cos(pi k.x + phi_k), k over a half-lattice
// with max-norm <= order, c_k ~ N(0,1), phi_k ~ U(0, 2 pi).

class TrigPolynomial {
 public:
  static TrigPolynomial random(int dim, int order, std::mt19937_64& rng);

  int dim() const { return dim_; }
  int order() const { return order_; }
  double operator()(const Eigen::VectorXd& x) const;
  double operator()(double t) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  double derivative(double t) const;

  /// Fast evaluation on every included cell of a 2-D (or 1-D) mask.
  GridFunction sample(const GridMask& mask) const;

 private:
  int dim_ = 1;
  int order_ = 0;
  std::vector<Eigen::VectorXi> waves_;
  std::vector<double> coeff_;
  std::vector<double> phase_;
};

// ---------------------------------------------------------------------------
// Reports

struct InequalityReport {
  std::string name;
  std::string formula;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double tolerance = 0.0;
  bool holds = false;
  std::vector<std::pair<std::string, double>> constants;
};

/// Quadrature tolerance 1e-6 * max(lhs, rhs, 1).
InequalityReport make_report(std::string name, std::string formula, double lhs, double rhs,
                             std::vector<std::pair<std::string, double>> constants);

/// |‖u‖(0,h) - ‖u‖(-h,0)| <= sqrt(2) h ‖u'‖(-h,h); u sampled on a symmetric interval.
InequalityReport shift_difference_bound(const SampledFunction1D& u);

enum class Side { left, right };

/// int over the target half <= 2 int over the other half + 4 h^2 int |u'|^2.
InequalityReport half_interval_bound(const SampledFunction1D& u, Side target);

/// int_a^b |u|^2 <= 3 int_{a+h}^{b-h} |u|^2 + 4 h^2 int_a^b |u'|^2, h < (b - a) / 4.
InequalityReport interior_bound_1d(const SampledFunction1D& u, double h);

/// Fibred version on an unshrunk elementary domain:
/// int_U |u|^2 <= 3 int_{U_h} |u|^2 + 4 h^2 int_U |grad u|^2.
/// `u` must live on the rasterization of `domain`.
InequalityReport fibered_interior_bound(const GridFunction& u, const ElementaryDomain& domain, double h,
                                        ShrinkMode mode = ShrinkMode::vertical_only);

struct InterpolationConstants {
  double a;
  double b;
};

/// (a(h), b) = (2h, sqrt(3)) from sqrt(3A + 4h^2 B) <= sqrt(3) sqrt(A) + 2h sqrt(B).
InterpolationConstants interpolation_constants(double h);

/// ‖u‖_{L2(U)} <= 2h ‖u‖_{H1(U)} + sqrt(3) ‖u‖_{L2(U_h)}, vertical shrink.
InequalityReport verify_interpolation(const GridFunction& u, const ElementaryDomain& domain, double h);

// ---------------------------------------------------------------------------
// Sweeps

struct SweepOptions {
  std::vector<std::string> suites{"shift", "half", "interior", "fibered", "interp", "fibered_all"};
  int trials = 200;
  std::vector<double> hs{0.05, 0.1, 0.2};
  std::uint64_t seed = 7;
  int max_order = 8;
  int samples_1d = 4001;
  int cells_per_unit = 128;
  std::string domain = "step_domain";
};

struct SweepRow {
  std::string suite;
  int trial;
  double h;
  double lhs;
  double rhs;
  double slack;
  bool holds;
  bool asserted;  // false for experiment suites (all_directions shrink)
};

/// Suite names: shift, half, interior, fibered, interp, fibered_all ("all" expands).
std::vector<SweepRow> inequality_sweep(const SweepOptions& options);
std::vector<std::string> expand_suites(const std::vector<std::string>& suites);

}  // namespace roughembed
