#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "roughembed/domain.hpp"
#include "roughembed/error.hpp"

using namespace roughembed;

namespace {

Point pt(double x, double y) { return Eigen::Vector2d(x, y); }

ElementaryDomain unit_square() { return std::get<ElementaryDomain>(catalog("unit_square")); }

GridMask mask_from_rows(const std::vector<std::string>& rows) {
  // rows[0] is the top row; '#' marks an included cell.
  const int h = static_cast<int>(rows.size()), w = static_cast<int>(rows[0].size());
  Grid g{Eigen::Vector2d(0.0, 0.0), 1.0, {w, h}};
  std::vector<std::uint8_t> cells(g.cell_count(), 0);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) cells[static_cast<std::size_t>((h - 1 - j) * w + i)] = rows[j][i] == '#';
  }
  return {g, cells};
}

}  // namespace

TEST(Contains, UnitSquare) {
  EXPECT_TRUE(contains(catalog("unit_square"), pt(0.5, 0.5)));
  EXPECT_FALSE(contains(catalog("unit_square"), pt(0.5, 1.2)));
  EXPECT_FALSE(contains(catalog("unit_cube"), pt(1.5, 0.5)));
}

TEST(Contains, BoundaryPointsAreOutside) {
  EXPECT_FALSE(contains(catalog("unit_square"), pt(0.5, 1.0)));
  EXPECT_FALSE(contains(catalog("unit_square"), pt(0.0, 0.5)));
  EXPECT_FALSE(contains(catalog("spiral_triangle"), pt(0.5, 0.5)));
}

TEST(Contains, DimensionMismatchThrows) {
  EXPECT_THROW(contains(catalog("unit_square"), Eigen::Vector3d(0.5, 0.5, 0.5)), DomainError);
}

TEST(Contains, SinComponentDomain) {
  const Domain d = catalog("sin_component_domain");
  EXPECT_TRUE(contains(d, pt(1.0 / (2.0 * std::numbers::pi), 1.0)));
  EXPECT_TRUE(contains(d, pt(0.1, -1.0)));
  EXPECT_FALSE(contains(d, pt(0.1, 5.0)));
  const double top = 0.1 * std::sin(10.0) + 4.0;
  EXPECT_NEAR(top, 3.9456, 1e-4);
  EXPECT_TRUE(contains(d, pt(0.1, top - 1e-6)));
  EXPECT_FALSE(contains(d, pt(0.1, top + 1e-6)));
}

TEST(Contains, RectangleChainFirstRectangle) {
  CatalogParams p;
  p.alpha = 1.0;
  const Domain d = catalog("rectangle_chain", p);
  // T_1 = {|x1 - 1/2| < 1/8, 0 < x2 < 1/8}
  EXPECT_TRUE(contains(d, pt(0.5, 0.06)));
  EXPECT_TRUE(contains(d, pt(0.5 - 0.124, 0.124)));
  EXPECT_FALSE(contains(d, pt(0.5 - 0.126, 0.06)));
  EXPECT_FALSE(contains(d, pt(0.5, 0.126)));
  EXPECT_TRUE(contains(d, pt(0.9, -0.5)));
  const auto& parts = std::get<UnionDomain>(d).parts();
  const BoundingBox t1 = bounding_box(parts[1]);
  EXPECT_DOUBLE_EQ(t1.lo[0], 0.375);
  EXPECT_DOUBLE_EQ(t1.hi[0], 0.625);
  EXPECT_DOUBLE_EQ(t1.lo[1], 0.0);
  EXPECT_DOUBLE_EQ(t1.hi[1], 0.125);
}

TEST(Catalog, UnknownNameAndBadAlpha) {
  EXPECT_THROW(catalog("no_such_domain"), ParameterError);
  CatalogParams p;
  p.alpha = 0.0;
  EXPECT_THROW(catalog("rectangle_chain", p), ParameterError);
  EXPECT_TRUE(catalog_has("sin_component"));
  EXPECT_FALSE(catalog_has("nothing"));
}

TEST(AffineMapTest, SingularMatrixRejected) {
  Mat a(2, 2);
  a << 1.0, 2.0, 2.0, 4.0;
  EXPECT_THROW(AffineMap(a, Vec::Zero(2)), ParameterError);
}

TEST(Shrink, ZeroKeepsMembership) {
  const auto u = std::get<ElementaryDomain>(catalog("step_domain"));
  const auto u0 = u.shrink(0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(-0.1, 1.1), y(-0.6, 1.6);
  for (int i = 0; i < 100000; ++i) {
    const Point p = pt(x(rng), y(rng));
    ASSERT_EQ(u.contains(p), u0.contains(p));
  }
}

TEST(Shrink, AllDirectionsSquare) {
  const auto s = unit_square().shrink(0.25, ShrinkMode::all_directions);
  EXPECT_TRUE(s.contains(pt(0.3, 0.3)));
  EXPECT_TRUE(s.contains(pt(0.74, 0.26)));
  EXPECT_FALSE(s.contains(pt(0.2, 0.5)));
  EXPECT_FALSE(s.contains(pt(0.5, 0.8)));
}

TEST(Shrink, VerticalOnlyMonteCarloArea) {
  const auto s = unit_square().shrink(0.25, ShrinkMode::vertical_only);
  EXPECT_TRUE(s.contains(pt(0.05, 0.5)));
  EXPECT_FALSE(s.contains(pt(0.5, 0.2)));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += s.contains(pt(unit(rng), unit(rng)));
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.5, 0.01);
}

TEST(Shrink, ParameterRange) {
  EXPECT_THROW(unit_square().shrink(1.0 / 3.0), ParameterError);
  EXPECT_THROW(unit_square().shrink(-0.1), ParameterError);
}

TEST(Shrink, MonotoneInH) {
  const auto u = std::get<ElementaryDomain>(catalog("step_domain"));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> x(0.0, 1.0), y(-0.5, 1.5);
  for (auto mode : {ShrinkMode::all_directions, ShrinkMode::vertical_only}) {
    const auto a = u.shrink(0.05, mode), b = u.shrink(0.2, mode);
    for (int i = 0; i < 20000; ++i) {
      const Point p = pt(x(rng), y(rng));
      if (b.contains(p)) {
        ASSERT_TRUE(a.contains(p));
      }
      if (a.contains(p)) {
        ASSERT_TRUE(u.contains(p));
      }
    }
  }
}

// --- rasterization ----------------------------------------------------------

TEST(Rasterize, UnitSquareTwoCells) {
  const GridMask m = rasterize(catalog("unit_square"), 2);
  EXPECT_EQ(m.count(), 4u);
  EXPECT_EQ(m.grid().cell_count(), 4u);
}

TEST(Rasterize, EmptyMaskIsDegenerate) {
  const ElementaryDomain tiny(ProfileFunction::closed_form(1, ClosedForm::constant(0.0)),
                              AffineMap::axis_aligned(Eigen::Vector2d(1e-3, 1e-3), Eigen::Vector2d(0.1, 0.1)));
  EXPECT_THROW(rasterize(tiny, 2), DegenerateDomain);
}

TEST(Rasterize, ShrunkMaskIsSubset) {
  for (const char* name : {"step_domain", "unit_square"}) {
    const auto u = std::get<ElementaryDomain>(catalog(name));
    const GridMask m = rasterize(u, 64);
    for (auto mode : {ShrinkMode::all_directions, ShrinkMode::vertical_only}) {
      EXPECT_TRUE(rasterize_on(u.shrink(0.1, mode), m.grid()).subset_of(m)) << name;
    }
  }
  const Domain sin = catalog("sin_component_domain");
  const auto& u = std::get<ElementaryDomain>(std::get<UnionDomain>(sin).parts()[0]);
  const GridMask m = rasterize(sin, 128);
  EXPECT_TRUE(rasterize_on(u.shrink(0.1), m.grid()).subset_of(m));
}

TEST(Rasterize, RectangleChainMatchesPerCellOracle) {
  CatalogParams p;
  p.alpha = 1.0;
  const GridMask m = rasterize(catalog("rectangle_chain", p), 256);
  const Grid& g = m.grid();
  std::size_t expected = 0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const double x = g.origin[0] + (g.coordinate(c, 0) + 0.5) * g.spacing;
    const double y = g.origin[1] + (g.coordinate(c, 1) + 0.5) * g.spacing;
    bool in = x > 0.0 && x < 1.0 && y > -1.0 && y < 0.0;
    for (int k = 1; k <= 40 && !in; ++k) {
      const double ck = std::ldexp(1.0, -k), wk = std::ldexp(1.0, -(k + 2));
      in = std::abs(x - ck) < wk && y > 0.0 && y < wk;
    }
    expected += in;
    ASSERT_EQ(in, m.at(c)) << "cell " << c;
  }
  EXPECT_EQ(m.count(), expected);
}

TEST(Rasterize, AreaConvergesUnderRefinement) {
  // U and V overlap where x sin(1/x) < 0, so |U u V| = 6/pi - int max(-f, 0).
  const double w = 1.0 / std::numbers::pi;
  double overlap = 0.0;
  const int n = 2000000;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * w / n;
    overlap += std::max(-x * std::sin(1.0 / x), 0.0) * w / n;
  }
  const double exact = 6.0 * w - overlap;
  const Domain d = catalog("sin_component_domain");
  const double perimeter = 14.0;
  std::vector<double> errs;
  for (int cpu : {16, 32, 64, 128, 256, 512}) {
    errs.push_back(std::abs(rasterize(d, cpu).measure() - exact));
    EXPECT_LT(errs.back(), perimeter / cpu) << cpu;
  }
  EXPECT_LT(errs.back(), errs.front() / 8.0);
}

TEST(Components, TwoBlocksLargestFirst) {
  const GridMask m = mask_from_rows({"##....", "##..##", "....##", "....##"});
  const auto comps = connected_components(m);
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0].count(), 6u);
  EXPECT_EQ(comps[1].count(), 4u);
}

TEST(Components, DiagonalContactDoesNotConnect) {
  EXPECT_EQ(connected_components(mask_from_rows({"#.", ".#"})).size(), 2u);
}

TEST(BoundaryComponents, FullSquareIsOne) {
  EXPECT_EQ(boundary_components(rasterize(catalog("unit_square"), 16)), 1);
}

TEST(BoundaryComponents, AnnulusIsTwo) {
  const GridMask m = mask_from_rows({"######", "######", "##..##", "##..##", "######", "######"});
  EXPECT_EQ(boundary_components(m), 2);
}

TEST(BoundaryComponents, SinDomainHasSeveral) {
  EXPECT_GE(boundary_components(rasterize(catalog("sin_component_domain"), 512)), 3);
}

// --- Lipschitz approximants -------------------------------------------------

TEST(Lipschitz, FlatProfileGivesSquare) {
  const auto v = lipschitz_approximant(unit_square(), 0.2);
  EXPECT_TRUE(v.containment_holds());
  EXPECT_EQ(v.polygon.vertices().size(), 4u);
  EXPECT_NEAR(v.polygon.area(), 0.8 * 0.8, 1e-12);
}

TEST(Lipschitz, StepProfileContainment) {
  const ElementaryDomain u(ProfileFunction::step({0.5}, {0.0, 1.0}));
  const auto v = lipschitz_approximant(u, 0.3, 100000);
  EXPECT_EQ(v.samples, 100000u);
  EXPECT_TRUE(v.containment_holds()) << v.inner_violations << " " << v.outer_violations;
}

TEST(Lipschitz, XSinKnotsGrowTowardsSingularEndpoint) {
  auto build = [](double eps0) {
    const double w = 1.0 / std::numbers::pi - eps0;
    const ElementaryDomain u(ProfileFunction::closed_form(1, ClosedForm::xsin(eps0, 1.0 / std::numbers::pi)),
                             AffineMap::axis_aligned(Eigen::Vector2d(w, 1.0), Eigen::Vector2d(eps0, 0.0)));
    return lipschitz_approximant(u, 0.1, 100000);
  };
  const auto a = build(0.05), b = build(0.02);
  EXPECT_TRUE(a.containment_holds());
  EXPECT_TRUE(b.containment_holds());
  EXPECT_GT(b.knot_count, a.knot_count);
}

TEST(Lipschitz, KnotBudgetExceeded) {
  const ElementaryDomain u(ProfileFunction::closed_form(1, ClosedForm::sine(0.3, 400.0)));
  EXPECT_THROW(lipschitz_approximant(u, 0.1, 1000, 50), ApproximationFailure);
}

// --- properties -------------------------------------------------------------

TEST(DomainProperty, AffineInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), unit(-0.5, 1.5);
  const ProfileFunction f = ProfileFunction::closed_form(1, ClosedForm::sine(0.3, 1.0));
  const ElementaryDomain base(f);
  for (int trial = 0; trial < 20; ++trial) {
    Mat a(2, 2);
    a << coef(rng), coef(rng), coef(rng), coef(rng);
    if (std::abs(a.determinant()) < 0.1) continue;
    const Vec b = Eigen::Vector2d(coef(rng), coef(rng));
    const ElementaryDomain mapped(f, AffineMap(a, b));
    for (int i = 0; i < 2000; ++i) {
      const Point q = pt(unit(rng), unit(rng));
      // Skip points within 1e-9 of the standard boundary.
      const double fx = q[0] > 0.0 && q[0] < 1.0 ? f.evaluate(q[0]) : 0.0;
      const double margin = std::min({std::abs(q[0]), std::abs(q[0] - 1.0), std::abs(q[1] - fx),
                                      std::abs(q[1] - fx - 1.0)});
      if (margin < 1e-9) continue;
      ASSERT_EQ(mapped.contains(a * q + b), base.contains(q));
    }
  }
}

TEST(DomainProperty, UnionIsDisjunction) {
  const Domain d = catalog("sin_component_domain");
  const auto& parts = std::get<UnionDomain>(d).parts();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> x(-0.05, 0.4), y(-2.5, 4.5);
  for (int i = 0; i < 20000; ++i) {
    const Point p = pt(x(rng), y(rng));
    ASSERT_EQ(contains(d, p), contains(parts[0], p) || contains(parts[1], p));
  }
}

TEST(DomainProperty, CavalieriArea) {
  const std::vector<ElementaryDomain> domains{
      std::get<ElementaryDomain>(catalog("step_domain")),
      ElementaryDomain(ProfileFunction::closed_form(1, ClosedForm::sine(0.4, 2.0)),
                       AffineMap::axis_aligned(Eigen::Vector2d(2.0, 0.5), Eigen::Vector2d(1.0, -1.0))),
      ElementaryDomain(ProfileFunction::accumulating_jumps())};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& u : domains) {
    const BoundingBox box = u.bounding_box();
    const double box_area = (box.hi - box.lo).prod();
    const int n = 200000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      hits += u.contains(pt(box.lo[0] + unit(rng) * (box.hi[0] - box.lo[0]),
                            box.lo[1] + unit(rng) * (box.hi[1] - box.lo[1])));
    }
    const double p = static_cast<double>(hits) / n;
    const double se = box_area * std::sqrt(p * (1.0 - p) / n);
    EXPECT_NEAR(p * box_area, u.volume(), 3.0 * se);
    EXPECT_NEAR(u.volume(), u.affine().abs_det(), 1e-12);
  }
}
