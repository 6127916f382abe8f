#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "roughembed/error.hpp"
#include "roughembed/spectrum.hpp"

using namespace roughembed;

namespace {

constexpr double kPi = std::numbers::pi;

GridMask mask_of(std::vector<int> dims, std::vector<std::uint8_t> cells, double spacing = 1.0) {
  Grid g{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dims.size())), spacing, std::move(dims)};
  return GridMask(g, std::move(cells));
}

ElementaryDomain square() { return std::get<ElementaryDomain>(catalog("unit_square")); }

// max over unit directions of (|u|_2 - eps |u|_1) / |u|_3 for diagonal forms.
double diagonal_oracle(const Eigen::Vector2d& d1, const Eigen::Vector2d& d2, const Eigen::Vector2d& d3,
                       double eps, int directions) {
  double best = 0.0;
  for (int i = 0; i < directions; ++i) {
    const double th = kPi * i / directions;
    const double c = std::cos(th), s = std::sin(th);
    auto nrm = [&](const Eigen::Vector2d& w) { return std::sqrt(w[0] * c * c + w[1] * s * s); };
    best = std::max(best, (nrm(d2) - eps * nrm(d1)) / nrm(d3));
  }
  return best;
}

}  // namespace

TEST(Assemble, SingleCell) {
  const auto f = assemble(mask_of({1, 1}, {1}, 0.5));
  EXPECT_EQ(f.stiffness.nonZeros() == 0 || f.stiffness.norm() == 0.0, true);
  EXPECT_DOUBLE_EQ(f.mass[0], 0.25);
}

TEST(Assemble, TwoCellsOneFace) {
  const auto f = assemble(mask_of({2, 1}, {1, 1}));
  Eigen::MatrixXd k = Eigen::MatrixXd(f.stiffness);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_TRUE(k.isApprox(expected));
}

TEST(Assemble, RowSumsVanish) {
  const auto f = assemble(rasterize(catalog("unit_square"), 64));
  EXPECT_EQ(f.mask.count(), 64u * 64u);
  const Eigen::VectorXd sums = f.stiffness * Eigen::VectorXd::Ones(f.stiffness.cols());
  EXPECT_EQ(sums.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE((f.mass.array() > 0).all());
  const Eigen::MatrixXd dense = Eigen::MatrixXd(f.stiffness).topLeftCorner(200, 200);
  EXPECT_TRUE(dense.isApprox(dense.transpose()));
}

TEST(Assemble, MatchesDirichletEnergy) {
  const GridMask m = rasterize(catalog("step_domain"), 40);
  const auto f = assemble(m);
  std::mt19937_64 rng(3);
  const GridFunction u = TrigPolynomial::random(2, 5, rng).sample(m);
  EXPECT_NEAR(u.values.dot(f.stiffness * u.values), dirichlet_energy(u), 1e-10 * dirichlet_energy(u));
}

TEST(Assemble, DisconnectedMask) {
  const GridMask m = mask_of({3, 1}, {1, 0, 1});
  try {
    assemble(m);
    FAIL() << "expected TopologyError";
  } catch (const TopologyError& e) {
    EXPECT_NE(std::string(e.what()).find('1'), std::string::npos);
  }
  EXPECT_NO_THROW(assemble(m, true));
}

TEST(Eigen, UnitInterval) {
  const auto r = domain_spectrum(catalog("unit_interval"), 200, 4);
  EXPECT_NEAR(r.eigenvalues[0], 0.0, r.solver_tolerance);
  EXPECT_NEAR(r.eigenvalues[1] / (kPi * kPi), 1.0, 0.01);
  EXPECT_NEAR(r.eigenvalues[2] / (4 * kPi * kPi), 1.0, 0.01);
}

TEST(Eigen, UnitSquare) {
  const auto r = domain_spectrum(catalog("unit_square"), 128, 6);
  EXPECT_EQ(r.method, "lobpcg");
  EXPECT_NEAR(r.eigenvalues[0], 0.0, r.solver_tolerance);
  EXPECT_NEAR(r.eigenvalues[1] / (kPi * kPi), 1.0, 0.01);
  EXPECT_NEAR(r.eigenvalues[2] / (kPi * kPi), 1.0, 0.01);
  EXPECT_NEAR(r.eigenvalues[3] / (2 * kPi * kPi), 1.0, 0.015);
  EXPECT_EQ(r.resolution, 128);
}

TEST(Eigen, DenseAgreesWithIterative) {
  const auto forms = assemble(rasterize(catalog("step_domain"), 24));
  ASSERT_GT(forms.mask.count(), 400u);
  EigenOptions dense;
  dense.dense_limit = 100000;
  const auto a = lowest_eigenvalues(forms, 6);
  const auto b = lowest_eigenvalues(forms, 6, dense);
  EXPECT_EQ(b.method, "dense");
  EXPECT_NE(a.method, "dense");
  for (int j = 0; j < 6; ++j) EXPECT_NEAR(a.eigenvalues[j], b.eigenvalues[j], 1e-5 * (1 + b.eigenvalues[j]));
}

TEST(Eigen, Preconditions) {
  const auto forms = assemble(mask_of({2, 1}, {1, 1}));
  EXPECT_THROW(lowest_eigenvalues(forms, 1), ParameterError);
  EXPECT_THROW(lowest_eigenvalues(forms, 3), ParameterError);
}

TEST(Eigen, IterationBudget) {
  const auto forms = assemble(rasterize(catalog("unit_square"), 64));
  EigenOptions o;
  o.max_iterations = 1;
  o.tol = 1e-14;
  EXPECT_THROW(lowest_eigenvalues(forms, 6, o), SolverError);
}

TEST(Eigen, DebrisDroppedAndComponentsMerged) {
  // Two 10x10 squares plus one isolated cell.
  std::vector<std::uint8_t> cells(25 * 10, 0);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      cells[y * 25 + x] = 1;
      cells[y * 25 + 12 + x] = 1;
    }
  }
  cells[24] = 1;
  const auto r = mask_spectrum(mask_of({25, 10}, cells, 0.1), 4);
  EXPECT_EQ(r.component_count, 2u);
  EXPECT_EQ(r.dropped_cells, 1u);
  EXPECT_NEAR(r.eigenvalues[0], 0.0, 1e-6);
  EXPECT_NEAR(r.eigenvalues[1], 0.0, 1e-6);
  EXPECT_NEAR(r.eigenvalues[2], r.eigenvalues[3], 1e-6);
}

TEST(SpectrumProperty, ConstantModeAndResiduals) {
  for (const char* name : {"unit_square", "step_domain", "sin_component_domain"}) {
    const int cpu = std::string(name) == "sin_component_domain" ? 48 : 64;
    const GridMask m = rasterize(catalog(name), cpu);
    const auto forms = assemble(component_mask(m, label_components(m), 0));
    const auto r = lowest_eigenvalues(forms, 5);
    EXPECT_GE(r.eigenvalues[0], -r.solver_tolerance) << name;
    EXPECT_LE(std::abs(r.eigenvalues[0]), r.solver_tolerance) << name;
    const Eigen::VectorXd v0 = r.eigenvectors.col(0) / r.eigenvectors.col(0).mean();
    EXPECT_LT((v0.array() - 1.0).abs().maxCoeff(), 1e-4) << name;
    const Eigen::VectorXd isqrt = forms.mass.cwiseSqrt().cwiseInverse();
    for (int j = 0; j < 5; ++j) {
      const Eigen::VectorXd v = r.eigenvectors.col(j);
      const Eigen::VectorXd res = isqrt.asDiagonal() * (forms.stiffness * v - r.eigenvalues[j] * forms.mass.asDiagonal() * v);
      const double scale = forms.mass.cwiseSqrt().cwiseProduct(v).norm();
      EXPECT_LE(res.norm() / scale, 1.01 * r.solver_tolerance * (1 + r.eigenvalues[j])) << name << " " << j;
    }
    for (int j = 1; j < 5; ++j) {
      EXPECT_LE(r.eigenvalues[j - 1], r.eigenvalues[j]);
      if (r.eigenvalues[j] > r.eigenvalues[j - 1]) {
        EXPECT_LT(r.singular_values[j], r.singular_values[j - 1]);
      }
      EXPECT_NEAR(r.singular_values[j], 1 / std::sqrt(1 + r.eigenvalues[j]), 1e-15);
    }
  }
}

TEST(SpectrumProperty, Deterministic) {
  const auto a = domain_spectrum(catalog("step_domain"), 48, 5);
  const auto b = domain_spectrum(catalog("step_domain"), 48, 5);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
}

TEST(SpectrumProperty, RefinementMonitored) {
  // Neumann eigenvalues of a fixed domain need not be monotone in resolution;
  // record the changes instead of asserting a direction.
  const auto a = domain_spectrum(catalog("step_domain"), 32, 4);
  const auto b = domain_spectrum(catalog("step_domain"), 64, 4);
  for (int j = 1; j < 4; ++j) RecordProperty("rel_change_" + std::to_string(j), std::to_string(b.eigenvalues[j] / a.eigenvalues[j] - 1));
  EXPECT_NEAR(b.eigenvalues[1] / a.eigenvalues[1], 1.0, 0.1);
}

TEST(Condition2, ConstantOnSquare) {
  const GridMask m = rasterize(square(), 40);
  const GridMask s = rasterize_on(square().shrink(0.1, ShrinkMode::vertical_only), m.grid());
  const GridFunction u(m, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m.count())));
  const double slack = condition2_slack(u, s, 0.2, std::sqrt(3.0));
  EXPECT_NEAR(slack, 0.2 + std::sqrt(3.0) * std::sqrt(0.8) - 1, 1e-12);
  EXPECT_NEAR(slack, 0.74919, 1e-5);
}

TEST(Condition2, RandomFamilyOnStepDomain) {
  const auto d = std::get<ElementaryDomain>(catalog("step_domain"));
  const auto [a, b] = interpolation_constants(0.1);
  const auto r = condition2_check(d, 64, 0.1, a, b, 500);
  EXPECT_EQ(r.trials, 500);
  EXPECT_EQ(r.failures, 0);
  EXPECT_GT(r.min_slack, -1e-6);
  EXPECT_TRUE(r.passed());
}

TEST(Condition2, ZeroConstantsFailEverywhere) {
  const auto d = std::get<ElementaryDomain>(catalog("step_domain"));
  const auto r = condition2_check(d, 32, 0.1, 0.0, 0.0, 50);
  EXPECT_EQ(r.failures, 50);
  EXPECT_FALSE(r.passed());
}

TEST(Condition2, EmptyShrink) {
  const GridMask m = rasterize(square(), 8);
  const GridMask empty(m.grid(), std::vector<std::uint8_t>(m.grid().cell_count(), 0));
  EXPECT_THROW(condition2_check(m, empty, 0.1, 0.2, 1.7, 5), DegenerateDomain);
}

TEST(CEpsilon, EuclideanTriple) {
  const std::vector<double> eps{0.1, 0.5, 0.9, 1.0, 2.0};
  const auto rows = find_c_epsilon(NormTriple::euclidean(5), eps);
  ASSERT_EQ(rows.size(), eps.size());
  for (const auto& r : rows) EXPECT_NEAR(r.c, std::max(1 - r.eps, 0.0), 1e-9);
}

TEST(CEpsilon, DiagonalTripleGridOracle) {
  const Eigen::Vector2d d1(4, 1), d2(1, 1), d3(1, 0.25);
  const NormTriple t(d1.asDiagonal().toDenseMatrix(), d2.asDiagonal().toDenseMatrix(), d3.asDiagonal().toDenseMatrix());
  const auto rows = find_c_epsilon(t, {0.1, 0.5, 1.0});
  for (const auto& r : rows) EXPECT_NEAR(r.c, diagonal_oracle(d1, d2, d3, r.eps, 1000000), 1e-4) << r.eps;
}

TEST(CEpsilon, NonincreasingAndZeroPastOne) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  Eigen::MatrixXd b(6, 6);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = n(rng);
  const Eigen::MatrixXd n3 = b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(6, 6);
  const Eigen::MatrixXd n2 = n3 + Eigen::MatrixXd::Identity(6, 6);
  const Eigen::MatrixXd n1 = 3 * n2;
  const NormTriple t(n1, n2, n3);
  EXPECT_EQ(t.ordering_violations(1000), 0);
  CEpsilonOptions o;
  o.starts = 200;
  const auto rows = find_c_epsilon(t, {0.05, 0.1, 0.3, 0.6, 1.0, 1.5}, o);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].c, rows[i - 1].c);
  EXPECT_EQ(rows[4].c, 0.0);
  EXPECT_EQ(rows[5].c, 0.0);
}

TEST(CEpsilon, Errors) {
  Eigen::MatrixXd singular = Eigen::MatrixXd::Identity(2, 2);
  singular(1, 1) = 0.0;
  EXPECT_THROW(NormTriple(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2), singular), ParameterError);
  EXPECT_THROW(NormTriple(Eigen::MatrixXd::Identity(2, 2), 2 * Eigen::MatrixXd::Identity(2, 2),
                          Eigen::MatrixXd::Identity(2, 2)),
               ParameterError);
  EXPECT_THROW(find_c_epsilon(NormTriple::euclidean(2), {0.0}), ParameterError);
}

TEST(Dossier, UnitSquare) {
  DossierOptions o;
  o.condition2_trials = 20;
  const auto r = compactness_dossier(catalog("unit_square"), "unit_square", {64, 128}, o);
  ASSERT_EQ(r.spectra.size(), 2u);
  EXPECT_LT(r.max_drift, 0.015);
  ASSERT_EQ(r.condition2.size(), 1u);
  EXPECT_TRUE(r.condition2[0].passed());
  EXPECT_FALSE(r.verdict.empty());
}
