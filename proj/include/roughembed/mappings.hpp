#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "roughembed/domain.hpp"
#include "roughembed/error.hpp"
#include "roughembed/inequalities.hpp"
#include "roughembed/smooth_map.hpp"

namespace roughembed {

/// Analytic Jacobian when the map has one, central differences otherwise.
/// Throws SingularityError where the map is undefined or singular.
Mat jacobian(const SmoothMap& map, const Vec& p);
/// Central differences with step 1e-6 (1 + |p|), ignoring any analytic rule.
Mat jacobian_fd(const SmoothMap& map, const Vec& p);

/// Singular values of a square matrix, ascending. Closed form for 2x2.
template <typename Derived>
Vec singular_values(const Eigen::MatrixBase<Derived>& m);

struct DilatationSample {
  Vec point;
  double abs_det = 0.0;
  Vec singular;  // ascending
  double frob_ratio = 0.0;
  double geom_ratio = 0.0;
};

struct DilatationReport {
  double K_frob = 0.0;
  double K_geom = 0.0;
  double min_abs_det = 0.0;
  double max_abs_det = 0.0;
  std::size_t sample_count = 0;
  // |det| growth along successive halvings toward a probe point.
  std::optional<double> det_growth;
  bool det_growth_flag = false;
  std::vector<DilatationSample> samples;
};

/// Sample maxima of |J|_F^2/|det J| and lambda_n/(lambda_1...lambda_{n-1}).
/// Throws DegenerateJacobian naming the sample when |det| < 1e-12.
DilatationReport dilatation(const SmoothMap& map, const std::vector<Vec>& samples,
                            const std::optional<Vec>& growth_probe = std::nullopt,
                            bool keep_samples = false);

/// Uniform points in the box (open), seeded.
std::vector<Vec> sample_box(const BoundingBox& box, std::size_t count, std::uint64_t seed = 1);
/// Uniform points of a domain by rejection from its bounding box.
std::vector<Vec> sample_domain(const Domain& d, std::size_t count, std::uint64_t seed = 1);

struct QIReport {
  double Q_est = 1.0;
  double ball_radius = 0.0;
  std::size_t pair_count = 0;
};

/// Largest sampled two-sided distortion of `map` over pairs in balls B(x, r)
/// inside `domain`; a lower bound for any admissible Q.
QIReport quasiisometry_constant(const SmoothMap& map, const Domain& domain, double r,
                                std::size_t trials, std::uint64_t seed = 1);

/// max |phi(p) - (S_{e^{-(n-1)}} o phi o S_{e^{n-1}})(p)| over samples of T_n.
double spiral_composition_check(int n, std::size_t samples, std::uint64_t seed = 1);

struct Pullback {
  GridFunction function;  // on the valid target cells
  std::size_t invalid_cells = 0;
  std::size_t target_cells = 0;
};

/// (phi^* u)(p) = u(phi(p)) at target cell centres, by bilinear (multilinear)
/// interpolation on the grid of u. Cells with no stencil cell in u's mask are
/// invalid; more than 1% invalid throws CoverageError.
Pullback pullback(const GridFunction& u, const SmoothMap& map, const GridMask& target);

double h1_norm(const GridFunction& u);

// ---------------------------------------------------------------------------

template <typename Derived>
Vec singular_values(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw ParameterError("singular_values needs a square matrix");
  if (!m.allFinite()) throw InvalidData("matrix has non-finite entries");
  if (m.rows() == 2) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double frob = a * a + b * b + c * c + d * d;
    const double det = std::abs(a * d - b * c);
    const double disc = std::sqrt(std::max(0.0, frob * frob - 4.0 * det * det));
    const double hi = std::sqrt(0.5 * (frob + disc));
    const double lo = hi > 0.0 ? det / hi : 0.0;
    return Eigen::Vector2d(lo, hi);
  }
  Eigen::JacobiSVD<Mat> svd(m.template cast<double>().eval());
  return svd.singularValues().reverse();
}

}  // namespace roughembed
