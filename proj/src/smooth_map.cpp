#include "roughembed/smooth_map.hpp"

#include <cmath>
#include <numbers>

#include "roughembed/error.hpp"

namespace roughembed {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SmoothMap identity_map(int dim) {
  SmoothMap m;
  m.name = "identity";
  m.dim = dim;
  m.forward = [](const Vec& p) { return p; };
  m.inverse = [](const Vec& p) { return p; };
  m.jacobian_rule = [dim](const Vec&) { return Mat::Identity(dim, dim); };
  return m;
}

SmoothMap similarity(double k, int dim) {
  if (!(k > 0.0)) throw ParameterError("similarity coefficient must be positive");
  SmoothMap m;
  m.name = "similarity";
  m.dim = dim;
  m.forward = [k](const Vec& p) -> Vec { return k * p; };
  m.inverse = [k](const Vec& p) -> Vec { return p / k; };
  m.jacobian_rule = [k, dim](const Vec&) -> Mat { return k * Mat::Identity(dim, dim); };
  return m;
}

SmoothMap affine_map(const Mat& matrix, const Vec& translation) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != translation.size()) {
    throw ParameterError("affine map dimensions do not agree");
  }
  if (std::abs(matrix.determinant()) <= 1e-12) throw ParameterError("affine matrix is singular");
  const Mat inv = matrix.inverse();
  SmoothMap m;
  m.name = "affine";
  m.dim = static_cast<int>(matrix.rows());
  m.forward = [matrix, translation](const Vec& p) -> Vec { return matrix * p + translation; };
  m.inverse = [inv, translation](const Vec& p) -> Vec { return inv * (p - translation); };
  m.jacobian_rule = [matrix](const Vec&) -> Mat { return matrix; };
  return m;
}

SmoothMap spiral_map() {
  SmoothMap m;
  m.name = "spiral";
  m.dim = 2;
  m.defined_at = [](const Vec& p) { return p.size() == 2 && p[0] > 0.0 && p[1] > 0.0; };
  m.forward = [](const Vec& p) -> Vec {
    const double s = p[0], t = p[1];
    const double theta = kTwoPi * std::log(t / (s * s));
    return Eigen::Vector2d(s * std::cos(theta), s * std::sin(theta));
  };
  m.inverse = [](const Vec& q) -> Vec {
    const double rho = q.norm();
    if (!(rho > 0.0)) throw SingularityError("spiral inverse undefined at the origin");
    const double centre = kTwoPi * std::log(std::numbers::sqrt2 / rho);
    const double raw = std::atan2(q[1], q[0]);
    const double turns = std::floor((centre + std::numbers::pi - raw) / kTwoPi);
    double theta = raw + kTwoPi * turns;
    // floor() may land one branch off when the argument is an exact integer.
    if (theta >= centre + std::numbers::pi) theta -= kTwoPi;
    if (theta < centre - std::numbers::pi) theta += kTwoPi;
    return Eigen::Vector2d(rho, rho * rho * std::exp(theta / kTwoPi));
  };
  m.jacobian_rule = [](const Vec& p) -> Mat {
    const double s = p[0], t = p[1];
    const double theta = kTwoPi * std::log(t / (s * s));
    const double c = std::cos(theta), sn = std::sin(theta);
    const double dth_ds = -2.0 * kTwoPi / s;  // -4 pi / s
    const double dth_dt = kTwoPi / t;
    Mat j(2, 2);
    j << c - s * sn * dth_ds, -s * sn * dth_dt,
         sn + s * c * dth_ds, s * c * dth_dt;
    return j;
  };
  return m;
}

SmoothMap power_map(double alpha, int dim) {
  if (!(alpha > 0.0)) throw ParameterError("power map exponent alpha must be positive");
  const double beta = 1.0 / alpha;
  SmoothMap m;
  m.name = "power";
  m.dim = dim;
  m.defined_at = [](const Vec& p) { return p.norm() > 0.0; };
  m.forward = [beta](const Vec& p) -> Vec {
    const double r = p.norm();
    if (r == 0.0) return p;
    return p * std::pow(r, beta - 1.0);
  };
  m.inverse = [alpha](const Vec& q) -> Vec {
    const double r = q.norm();
    if (r == 0.0) return q;
    return q * std::pow(r, alpha - 1.0);
  };
  // d/dx [x r^{b-1}] = r^{b-1} (I + (b-1) xhat xhat^T)
  m.jacobian_rule = [beta, dim](const Vec& p) -> Mat {
    const double r = p.norm();
    if (r == 0.0) throw SingularityError("power map Jacobian is singular at the origin");
    const Vec u = p / r;
    return std::pow(r, beta - 1.0) *
           (Mat::Identity(dim, dim) + (beta - 1.0) * u * u.transpose());
  };
  return m;
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner) {
  if (outer.dim != inner.dim) throw ParameterError("cannot compose maps of different dimension");
  SmoothMap m;
  m.name = outer.name + "*" + inner.name;
  m.dim = inner.dim;
  m.forward = [outer, inner](const Vec& p) -> Vec { return outer.forward(inner.forward(p)); };
  if (outer.has_inverse() && inner.has_inverse()) {
    m.inverse = [outer, inner](const Vec& q) -> Vec { return inner.inverse(outer.inverse(q)); };
  }
  if (outer.has_jacobian() && inner.has_jacobian()) {
    m.jacobian_rule = [outer, inner](const Vec& p) -> Mat {
      return outer.jacobian_rule(inner.forward(p)) * inner.jacobian_rule(p);
    };
  }
  m.defined_at = [outer, inner](const Vec& p) {
    return inner.is_defined_at(p) && outer.is_defined_at(inner.forward(p));
  };
  return m;
}

}  // namespace roughembed
