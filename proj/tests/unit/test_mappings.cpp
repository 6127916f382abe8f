#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "roughembed/error.hpp"
#include "roughembed/mappings.hpp"

using namespace roughembed;

namespace {

constexpr double kPi = std::numbers::pi;

Vec pt(double x, double y) { return Eigen::Vector2d(x, y); }

PolygonDomain scaled(const PolygonDomain& p, double k) {
  std::vector<Eigen::Vector2d> v;
  for (const auto& q : p.vertices()) v.push_back(k * q);
  return PolygonDomain(v);
}

// Analytic spiral Jacobian, written out independently of the library rule.
Mat spiral_jacobian_oracle(double s, double t) {
  const double th = 2 * kPi * std::log(t / (s * s));
  const double dth_ds = -4 * kPi / s, dth_dt = 2 * kPi / t;
  Mat j(2, 2);
  j << std::cos(th) - s * std::sin(th) * dth_ds, -s * std::sin(th) * dth_dt,
      std::sin(th) + s * std::cos(th) * dth_ds, s * std::cos(th) * dth_dt;
  return j;
}

}  // namespace

TEST(Jacobian, Identity) {
  EXPECT_TRUE(jacobian(identity_map(2), pt(0.3, 0.4)).isApprox(Mat::Identity(2, 2)));
  EXPECT_TRUE(jacobian(identity_map(3), Eigen::Vector3d(1, 2, 3)).isApprox(Mat::Identity(3, 3)));
}

TEST(Jacobian, Similarity) {
  EXPECT_TRUE(jacobian(similarity(2.5), pt(0.3, -0.4)).isApprox(2.5 * Mat::Identity(2, 2)));
}

TEST(Jacobian, SpiralDeterminant) {
  const Mat j = jacobian(spiral_map(), pt(0.5, 0.75));
  EXPECT_NEAR(j.determinant(), 4 * kPi / 3, 1e-9);
  EXPECT_NEAR(j.determinant(), 4.18879, 1e-5);
  EXPECT_LT((j - spiral_jacobian_oracle(0.5, 0.75)).norm(), 1e-9 * j.norm());
}

TEST(Jacobian, AnalyticAgreesWithFiniteDifferences) {
  const SmoothMap f = spiral_map();
  for (const Vec& p : sample_domain(spiral_triangle_piece(1), 200, 3)) {
    const Mat a = jacobian(f, p), d = jacobian_fd(f, p);
    EXPECT_LT((a - d).norm(), 1e-5 * a.norm());
  }
  const SmoothMap g = power_map(2.0);
  for (const Vec& p : {pt(0.3, 0.2), pt(-0.7, 0.1), pt(0.05, -0.02)}) {
    const Mat a = jacobian(g, p), d = jacobian_fd(g, p);
    EXPECT_LT((a - d).norm(), 1e-5 * a.norm());
  }
}

TEST(Jacobian, FiniteDifferencePathWithoutRule) {
  SmoothMap m = similarity(3.0);
  m.jacobian_rule = nullptr;
  EXPECT_TRUE(jacobian(m, pt(0.2, 0.9)).isApprox(3.0 * Mat::Identity(2, 2), 1e-8));
}

TEST(Jacobian, SingularPoint) {
  EXPECT_THROW(jacobian(power_map(2.0), pt(0.0, 0.0)), SingularityError);
  EXPECT_THROW(jacobian(spiral_map(), pt(-0.1, 0.5)), SingularityError);
}

TEST(SingularValues, Examples) {
  EXPECT_TRUE(singular_values(Mat::Identity(2, 2)).isApprox(pt(1, 1)));
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  EXPECT_TRUE(singular_values(d).isApprox(pt(1, 3)));
}

TEST(SingularValues, SpiralJacobianIdentities) {
  const Vec s = singular_values(jacobian(spiral_map(), pt(0.5, 0.75)));
  EXPECT_NEAR(s[0] * s[1], 4 * kPi / 3, 1e-9);
  const double frob = 1 + 16 * kPi * kPi + 4 * kPi * kPi * 0.25 / 0.5625;
  EXPECT_NEAR(s.squaredNorm(), frob, 1e-9 * frob);
  EXPECT_NEAR(s.squaredNorm(), 176.460, 1e-3);
}

TEST(SingularValues, NonFinite) {
  Mat m = Mat::Identity(2, 2);
  m(0, 1) = std::nan("");
  EXPECT_THROW(singular_values(m), InvalidData);
}

TEST(SingularValues, ProductIsAbsDeterminant) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  for (int dim : {2, 3, 4}) {
    for (int trial = 0; trial < 50; ++trial) {
      Mat m(dim, dim);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
      const Vec s = singular_values(m);
      for (int i = 1; i < dim; ++i) EXPECT_LE(s[i - 1], s[i]);
      EXPECT_GE(s[0], 0.0);
      EXPECT_NEAR(s.prod(), std::abs(m.determinant()), 1e-9 * std::max(1.0, std::abs(m.determinant())));
    }
  }
}

TEST(Dilatation, Identity) {
  const auto r = dilatation(identity_map(2), sample_box({pt(0, 0), pt(1, 1)}, 500));
  EXPECT_NEAR(r.K_frob, 2.0, 1e-12);
  EXPECT_NEAR(r.K_geom, 1.0, 1e-12);
}

TEST(Dilatation, PowerMap) {
  const auto r = dilatation(power_map(2.0), sample_box({pt(-1, -1), pt(1, 1)}, 2000, 9));
  EXPECT_NEAR(r.K_frob, 2.5, 1e-9);
  EXPECT_NEAR(r.K_geom, 2.0, 1e-9);
}

TEST(Dilatation, SimilarityIsScaleFree) {
  for (double k : {0.01, 0.5, 3.0, 1e3}) {
    const auto r = dilatation(similarity(k), sample_box({pt(0, 0), pt(1, 1)}, 200));
    EXPECT_NEAR(r.K_frob, 2.0, 1e-12);
    EXPECT_NEAR(r.K_geom, 1.0, 1e-12);
  }
}

TEST(Dilatation, DegenerateJacobian) {
  SmoothMap flat = identity_map(2);
  flat.name = "flatten";
  flat.jacobian_rule = [](const Vec&) {
    Mat j = Mat::Zero(2, 2);
    j(0, 0) = 1.0;
    return j;
  };
  EXPECT_THROW(dilatation(flat, {pt(0.5, 0.5)}), DegenerateJacobian);
}

TEST(Dilatation, DeterminantGrowthFlaggedNearSingularity) {
  const auto grows = dilatation(power_map(2.0), {pt(0.5, 0.5)}, pt(0.0, 0.0));
  ASSERT_TRUE(grows.det_growth.has_value());
  EXPECT_TRUE(grows.det_growth_flag);
  const auto flat = dilatation(similarity(2.0), {pt(0.5, 0.5)}, pt(0.0, 0.0));
  EXPECT_FALSE(flat.det_growth_flag);
}

TEST(DilatationProperty, GeometricBelowFrobeniusBelowNTimesGeometric) {
  const auto r = dilatation(spiral_map(), sample_domain(spiral_triangle_piece(1), 1000, 4), std::nullopt, true);
  ASSERT_EQ(r.samples.size(), 1000u);
  for (const auto& s : r.samples) {
    EXPECT_LE(s.geom_ratio, s.frob_ratio * (1 + 1e-12));
    EXPECT_LE(s.frob_ratio, 2 * s.geom_ratio * (1 + 1e-12));
  }
  EXPECT_LE(r.K_geom, r.K_frob);
  EXPECT_LE(r.K_frob, 2 * r.K_geom);
}

TEST(DilatationProperty, CompositionMonitored) {
  // K_frob(g o f) <= n K_frob(g) K_frob(f) per sample; recorded, not asserted.
  const SmoothMap f = power_map(2.0), g = spiral_map();
  const SmoothMap gf = compose(g, f);
  int within = 0, total = 0;
  for (const Vec& p : sample_box({pt(0.2, 0.3), pt(0.5, 0.6)}, 200, 6)) {
    if (!g.is_defined_at(f(p))) continue;
    const double kf = dilatation(f, {p}).K_frob, kg = dilatation(g, {f(p)}).K_frob;
    within += dilatation(gf, {p}).K_frob <= 2 * kf * kg;
    ++total;
  }
  RecordProperty("within", within);
  RecordProperty("total", total);
  EXPECT_GT(total, 0);
}

TEST(QuasiIsometry, Identity) {
  const auto r = quasiisometry_constant(identity_map(2), catalog("unit_square"), 0.05, 2000);
  EXPECT_NEAR(r.Q_est, 1.0, 1e-12);
  EXPECT_EQ(r.pair_count, 2000u);
  EXPECT_DOUBLE_EQ(r.ball_radius, 0.05);
}

TEST(QuasiIsometry, Similarity) {
  EXPECT_NEAR(quasiisometry_constant(similarity(2.0), catalog("unit_square"), 0.05, 2000).Q_est, 2.0, 1e-12);
}

TEST(QuasiIsometry, NoAdmissibleCenters) {
  EXPECT_THROW(quasiisometry_constant(identity_map(2), catalog("unit_square"), 0.6, 10), ParameterError);
  EXPECT_THROW(quasiisometry_constant(identity_map(2), catalog("unit_square"), 0.0, 10), ParameterError);
}

TEST(QuasiIsometry, MonotoneInTrials) {
  const SmoothMap f = spiral_map();
  const PolygonDomain t1 = spiral_triangle_piece(1);
  const double r = 0.01 * std::exp(-2.0);
  double last = 0.0;
  for (std::size_t trials : {100u, 1000u, 10000u}) {
    const double q = quasiisometry_constant(f, t1, r, trials, 3).Q_est;
    EXPECT_GE(q, last);
    last = q;
  }
}

TEST(QuasiIsometry, ProductLaw) {
  const SmoothMap phi = spiral_map();
  const PolygonDomain t1 = spiral_triangle_piece(1);
  const double r = 0.01 * std::exp(-2.0);
  const double q = quasiisometry_constant(phi, t1, r, 5000, 8).Q_est;
  for (auto [k1, k] : {std::pair{2.0, 3.0}, std::pair{0.5, 4.0}, std::pair{std::exp(1.0), 1.0}}) {
    const SmoothMap m = compose(similarity(k), compose(phi, similarity(k1)));
    const double qm = quasiisometry_constant(m, scaled(t1, 1 / k1), r / k1, 5000, 8).Q_est;
    EXPECT_LE(qm, k1 * k * q * (1 + 1e-6));
  }
  // Two-sided distortion: shrinking overall needs the reciprocal factor.
  for (auto [k1, k] : {std::pair{0.5, 0.25}, std::pair{1.0, 0.1}}) {
    const SmoothMap m = compose(similarity(k), compose(phi, similarity(k1)));
    const double qm = quasiisometry_constant(m, scaled(t1, 1 / k1), r / k1, 5000, 8).Q_est;
    EXPECT_LE(qm, q * (1 + 1e-6) / (k1 * k));
  }
}

TEST(Composition, SpiralIdentity) {
  EXPECT_EQ(spiral_composition_check(1, 1000), 0.0);
  for (int n : {2, 3, 5}) EXPECT_LT(spiral_composition_check(n, 10000), 1e-10) << n;
}

TEST(Composition, ChainsRules) {
  const SmoothMap a = affine_map((Mat(2, 2) << 2, 1, 0, 1).finished(), pt(0, 0.5));
  const SmoothMap c = compose(spiral_map(), a);
  const Vec p = pt(0.2, 0.5);
  EXPECT_TRUE(c(p).isApprox(spiral_map()(a(p))));
  ASSERT_TRUE(c.has_inverse() && c.has_jacobian());
  EXPECT_LT((c.inverse(c(p)) - p).norm(), 1e-12);
  EXPECT_LT((jacobian(c, p) - jacobian_fd(c, p)).norm(), 1e-5 * jacobian(c, p).norm());
  EXPECT_THROW(compose(identity_map(3), identity_map(2)), ParameterError);
}

TEST(MappingProperty, RoundTrip) {
  const SmoothMap f = spiral_map();
  for (int n : {1, 2, 3, 5}) {
    for (const Vec& p : sample_domain(spiral_triangle_piece(n), 2000, 10 + n)) {
      EXPECT_LT((f.inverse(f(p)) - p).norm(), 1e-9 * (1 + p.norm()));
    }
  }
  const SmoothMap g = power_map(3.0);
  for (const Vec& p : sample_box({pt(-1, -1), pt(1, 1)}, 500, 2)) {
    EXPECT_LT((g.inverse(g(p)) - p).norm(), 1e-9 * (1 + p.norm()));
  }
}

TEST(Pullback, Constant) {
  const GridMask v = rasterize(catalog("unit_square"), 64);
  const GridFunction u(v, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(v.count()), 2.5));
  const Pullback p = pullback(u, similarity(0.5), rasterize(catalog("unit_square"), 32));
  EXPECT_EQ(p.invalid_cells, 0u);
  EXPECT_LT((p.function.values.array() - 2.5).abs().maxCoeff(), 1e-12);
}

TEST(Pullback, SimilarityKeepsDirichletEnergy) {
  std::mt19937_64 rng(17);
  const GridMask target = rasterize(catalog("unit_square"), 256);
  for (double k : {2.0, 1.7}) {
    const Domain image = PolygonDomain({{0, 0}, {k, 0}, {k, k}, {0, k}});
    const GridMask v = rasterize(image, static_cast<int>(std::lround(256 / k)));
    for (int trial = 0; trial < 5; ++trial) {
      const auto poly = TrigPolynomial::random(2, 1 + trial, rng);
      const GridFunction u = GridFunction::sample(v, [&](const Vec& x) { return poly(Vec(x / k)); });
      const Pullback p = pullback(u, similarity(k), target);
      EXPECT_NEAR(dirichlet_energy(p.function) / dirichlet_energy(u), 1.0, 0.02) << k << " " << trial;
    }
  }
}

TEST(Pullback, SpiralRatioBounded) {
  const PolygonDomain t1 = spiral_triangle_piece(1);
  const SmoothMap f = spiral_map();
  const GridMask target = rasterize(t1, 128);
  const GridMask image = rasterize(MappedDomain(t1, f), 512);
  std::mt19937_64 rng(23);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto poly = TrigPolynomial::random(2, 1 + trial % 4, rng);
    const GridFunction u = poly.sample(image);
    const Pullback p = pullback(u, f, target);
    worst = std::max(worst, h1_norm(p.function) / h1_norm(u));
  }
  RecordProperty("max_ratio", std::to_string(worst));
  EXPECT_TRUE(std::isfinite(worst));
  EXPECT_GT(worst, 0.0);
  EXPECT_LT(worst, 1e3);
}

TEST(Pullback, CoverageError) {
  const GridMask v = rasterize(catalog("unit_square"), 32);
  const GridFunction u(v, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(v.count())));
  EXPECT_THROW(pullback(u, similarity(3.0), rasterize(catalog("unit_square"), 32)), CoverageError);
}
