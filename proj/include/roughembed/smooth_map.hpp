#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace roughembed {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A homeomorphism given by rules. `inverse` and `jacobian_rule` may be empty.
/// `defined_at` is the domain hint; an empty predicate means "everywhere".
struct SmoothMap {
  std::string name;
  int dim = 2;
  std::function<Vec(const Vec&)> forward;
  std::function<Vec(const Vec&)> inverse;
  std::function<Mat(const Vec&)> jacobian_rule;
  std::function<bool(const Vec&)> defined_at;

  Vec operator()(const Vec& p) const { return forward(p); }
  bool has_inverse() const { return static_cast<bool>(inverse); }
  bool has_jacobian() const { return static_cast<bool>(jacobian_rule); }
  bool is_defined_at(const Vec& p) const { return !defined_at || defined_at(p); }
};

SmoothMap identity_map(int dim);

/// S_k(x) = k x.
SmoothMap similarity(double k, int dim = 2);

/// x -> A x + b.
SmoothMap affine_map(const Mat& matrix, const Vec& translation);

/// Cartesian spiral F(s,t) = (s cos theta, s sin theta), theta = 2 pi ln(t / s^2),
/// on the open quadrant s, t > 0. The inverse resolves the 2 pi ambiguity of the
/// planar angle by picking theta in [theta_c - pi, theta_c + pi) where
/// theta_c = 2 pi ln(sqrt(2) / rho) is the angular centre of the band s < t < 2s.
SmoothMap spiral_map();

/// phi(x) = x |x|^{1/alpha - 1}; singular at the origin.
SmoothMap power_map(double alpha, int dim = 2);

/// outer o inner. Inverse and Jacobian rules are chained when both sides have them.
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);

}  // namespace roughembed
