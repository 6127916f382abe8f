#include "roughembed/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace roughembed {

namespace {

std::string describe(const Vec& p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

void require_defined(const SmoothMap& map, const Vec& p) {
  if (p.size() != map.dim) throw DomainError("point dimension does not match the map");
  if (!map.is_defined_at(p)) throw SingularityError(map.name + " is undefined or singular at " + describe(p));
}

}  // namespace

Mat jacobian_fd(const SmoothMap& map, const Vec& p) {
  require_defined(map, p);
  const double delta = 1e-6 * (1.0 + p.norm());
  Mat j(map.dim, map.dim);
  for (int c = 0; c < map.dim; ++c) {
    Vec plus = p, minus = p;
    plus[c] += delta;
    minus[c] -= delta;
    if (!map.is_defined_at(plus) || !map.is_defined_at(minus)) {
      throw SingularityError("finite-difference stencil leaves the domain of " + map.name + " at " + describe(p));
    }
    j.col(c) = (map(plus) - map(minus)) / (2.0 * delta);
  }
  return j;
}

Mat jacobian(const SmoothMap& map, const Vec& p) {
  require_defined(map, p);
  Mat j = map.has_jacobian() ? map.jacobian_rule(p) : jacobian_fd(map, p);
  if (!j.allFinite()) throw SingularityError(map.name + " Jacobian is not finite at " + describe(p));
  return j;
}

DilatationReport dilatation(const SmoothMap& map, const std::vector<Vec>& samples,
                            const std::optional<Vec>& growth_probe, bool keep_samples) {
  if (samples.empty()) throw ParameterError("dilatation needs at least one sample");
  DilatationReport r;
  r.min_abs_det = std::numeric_limits<double>::infinity();
  for (const Vec& p : samples) {
    const Mat j = jacobian(map, p);
    const double det = std::abs(j.determinant());
    if (det < 1e-12) throw DegenerateJacobian("|det| < 1e-12 at sample " + describe(p));
    const Vec sv = singular_values(j);
    const double frob = j.squaredNorm() / det;
    double geom = sv[sv.size() - 1];
    for (Eigen::Index i = 0; i + 1 < sv.size(); ++i) geom /= sv[i];
    r.K_frob = std::max(r.K_frob, frob);
    r.K_geom = std::max(r.K_geom, geom);
    r.min_abs_det = std::min(r.min_abs_det, det);
    r.max_abs_det = std::max(r.max_abs_det, det);
    if (keep_samples) r.samples.push_back({p, det, sv, frob, geom});
  }
  r.sample_count = samples.size();

  if (growth_probe) {
    const Vec& start = samples.front();
    const double det0 = std::abs(jacobian(map, start).determinant());
    double worst = 1.0;
    for (int k = 1; k <= 12; ++k) {
      const Vec p = *growth_probe + std::ldexp(1.0, -k) * (start - *growth_probe);
      worst = std::max(worst, std::abs(jacobian(map, p).determinant()) / det0);
    }
    r.det_growth = worst;
    r.det_growth_flag = worst > 10.0;
  }
  return r;
}

std::vector<Vec> sample_box(const BoundingBox& box, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec p(box.dim());
    for (int a = 0; a < box.dim(); ++a) {
      double u = unit(rng);
      while (u == 0.0) u = unit(rng);
      p[a] = box.lo[a] + u * (box.hi[a] - box.lo[a]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Vec> sample_domain(const Domain& d, std::size_t count, std::uint64_t seed) {
  const BoundingBox box = bounding_box(d);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  std::size_t misses = 0;
  while (out.size() < count) {
    Vec p(box.dim());
    for (int a = 0; a < box.dim(); ++a) p[a] = box.lo[a] + unit(rng) * (box.hi[a] - box.lo[a]);
    if (contains(d, p)) {
      out.push_back(std::move(p));
      misses = 0;
    } else if (++misses > 1000000) {
      throw DegenerateDomain("rejection sampling found no interior points");
    }
  }
  return out;
}

QIReport quasiisometry_constant(const SmoothMap& map, const Domain& domain, double r, std::size_t trials,
                                std::uint64_t seed) {
  if (!(r > 0.0)) throw ParameterError("ball radius must be positive");
  if (trials == 0) throw ParameterError("need at least one trial");
  const int n = dimension(domain);
  if (n != map.dim) throw ParameterError("map and domain dimensions differ");
  const BoundingBox box = bounding_box(domain);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Ring of probe directions used to accept a centre.
  std::vector<Vec> ring;
  if (n == 2) {
    for (int k = 0; k < 32; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 32.0;
      ring.push_back(Eigen::Vector2d(std::cos(a), std::sin(a)));
    }
  } else {
    std::mt19937_64 ring_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (int k = 0; k < 32; ++k) {
      Vec v(n);
      for (int a = 0; a < n; ++a) v[a] = normal(ring_rng);
      ring.push_back(v.normalized());
    }
  }

  auto admissible = [&](const Vec& x) {
    if (!contains(domain, x) || !map.is_defined_at(x)) return false;
    for (const Vec& dir : ring) {
      if (!contains(domain, Vec(x + r * dir))) return false;
    }
    return true;
  };
  auto in_ball = [&](const Vec& x) {
    Vec dir(n);
    for (int a = 0; a < n; ++a) dir[a] = normal(rng);
    dir.normalize();
    return Vec(x + r * std::pow(unit(rng), 1.0 / n) * dir);
  };

  QIReport report;
  report.ball_radius = r;
  std::size_t misses = 0;
  while (report.pair_count < trials) {
    Vec x(n);
    for (int a = 0; a < n; ++a) x[a] = box.lo[a] + unit(rng) * (box.hi[a] - box.lo[a]);
    if (!admissible(x)) {
      if (++misses > 200000) {
        throw ParameterError("no admissible ball centres for r = " + std::to_string(r) + "; try a smaller r");
      }
      continue;
    }
    misses = 0;
    const Vec y = in_ball(x), z = in_ball(x);
    const double dist = (y - z).norm();
    if (!(dist > 1e-14 * r)) continue;
    const double ratio = (map(y) - map(z)).norm() / dist;
    report.Q_est = std::max({report.Q_est, ratio, 1.0 / ratio});
    ++report.pair_count;
  }
  return report;
}

double spiral_composition_check(int n, std::size_t samples, std::uint64_t seed) {
  if (n < 1) throw ParameterError("spiral piece index must be positive");
  const double k = std::exp(static_cast<double>(n - 1));
  const SmoothMap phi = spiral_map();
  const SmoothMap rescaled = compose(similarity(1.0 / k), compose(phi, similarity(k)));
  double worst = 0.0;
  for (const Vec& p : sample_domain(spiral_triangle_piece(n), samples, seed)) {
    worst = std::max(worst, (phi(p) - rescaled(p)).norm());
  }
  return worst;
}

Pullback pullback(const GridFunction& u, const SmoothMap& map, const GridMask& target) {
  const Grid& vg = u.mask.grid();
  const int n = vg.dim();
  if (target.grid().dim() != n || map.dim != n) throw ParameterError("pullback dimensions differ");

  std::vector<std::size_t> valid_flat;
  std::vector<double> valid_values;
  std::size_t invalid = 0;
  const int corners = 1 << n;
  std::vector<int> base(static_cast<std::size_t>(n));
  std::vector<double> frac(static_cast<std::size_t>(n));

  for (std::size_t flat : target.included()) {
    const Vec p = target.grid().cell_center(flat);
    bool ok = map.is_defined_at(p);
    Vec q;
    if (ok) {
      q = map(p);
      ok = q.allFinite();
    }
    double sum = 0.0, weight = 0.0;
    if (ok) {
      for (int a = 0; a < n; ++a) {
        const double pos = (q[a] - vg.origin[a]) / vg.spacing - 0.5;
        const double fl = std::floor(pos);
        base[static_cast<std::size_t>(a)] = static_cast<int>(fl);
        frac[static_cast<std::size_t>(a)] = pos - fl;
      }
      for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t idx = 0;
        bool inside = true;
        for (int a = 0; a < n; ++a) {
          const int bit = (c >> a) & 1;
          const int i = base[static_cast<std::size_t>(a)] + bit;
          if (i < 0 || i >= vg.dims[static_cast<std::size_t>(a)]) {
            inside = false;
            break;
          }
          idx += static_cast<std::size_t>(i) * vg.stride(a);
          w *= bit ? frac[static_cast<std::size_t>(a)] : 1.0 - frac[static_cast<std::size_t>(a)];
        }
        if (!inside) continue;
        const std::int64_t ci = u.mask.compact_index(idx);
        if (ci < 0) continue;
        sum += w * u.values[ci];
        weight += w;
      }
    }
    if (ok && weight > 1e-12) {
      valid_flat.push_back(flat);
      valid_values.push_back(sum / weight);
    } else {
      ++invalid;
    }
  }

  const std::size_t total = target.count();
  if (static_cast<double>(invalid) > 0.01 * static_cast<double>(total)) {
    throw CoverageError(std::to_string(invalid) + " of " + std::to_string(total) +
                        " target cells map outside the source mask");
  }
  std::vector<std::uint8_t> cells(target.grid().cell_count(), 0);
  for (std::size_t f : valid_flat) cells[f] = 1;
  GridMask mask(target.grid(), std::move(cells));
  Eigen::VectorXd values = Eigen::Map<Eigen::VectorXd>(valid_values.data(), static_cast<Eigen::Index>(valid_values.size()));
  return {GridFunction(std::move(mask), std::move(values)), invalid, total};
}

double h1_norm(const GridFunction& u) { return std::sqrt(l2_norm_squared(u) + dirichlet_energy(u)); }

}  // namespace roughembed
