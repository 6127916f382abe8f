#include "roughembed/domain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <random>

#include "roughembed/error.hpp"

namespace roughembed {

// ---------------------------------------------------------------------------
// AffineMap

AffineMap::AffineMap(Mat matrix, Vec translation)
    : matrix_(std::move(matrix)), translation_(std::move(translation)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != translation_.size()) {
    throw ParameterError("affine map dimensions do not agree");
  }
  abs_det_ = std::abs(matrix_.determinant());
  // Scale-free test, so that tiny but well-shaped boxes remain valid.
  const double n = static_cast<double>(matrix_.rows());
  const double scale = std::pow(matrix_.norm() / std::sqrt(n), n);
  if (!(abs_det_ > 1e-12 * scale)) throw ParameterError("affine matrix is not invertible");
  inverse_ = matrix_.inverse();
}

AffineMap AffineMap::identity(int n) { return {Mat::Identity(n, n), Vec::Zero(n)}; }

AffineMap AffineMap::axis_aligned(const Vec& scale, const Vec& translation) {
  return {scale.asDiagonal().toDenseMatrix(), translation};
}

std::string to_string(ShrinkMode mode) {
  return mode == ShrinkMode::all_directions ? "all_directions" : "vertical_only";
}

// ---------------------------------------------------------------------------
// ElementaryDomain

ElementaryDomain::ElementaryDomain(ProfileFunction profile, std::optional<AffineMap> affine)
    : profile_(std::move(profile)),
      affine_(affine.value_or(AffineMap::identity(profile_.base_dim() + 1))) {
  if (affine_.dim() != dim()) throw ParameterError("affine map dimension does not match domain");
}

bool ElementaryDomain::contains(const Point& p) const {
  if (p.size() != dim()) throw DomainError("point dimension does not match domain dimension");
  return contains_standard(affine_.apply_inverse(p));
}

bool ElementaryDomain::contains_standard(const Point& q) const {
  const int n = dim();
  const double h = shrink_h_;
  const double base_lo = shrink_mode_ == ShrinkMode::all_directions ? h : 0.0;
  const double base_hi = 1.0 - base_lo;
  for (int i = 0; i + 1 < n; ++i) {
    if (!(q[i] > base_lo && q[i] < base_hi)) return false;
  }
  const double f = profile_.evaluate(std::span<const double>(q.data(), static_cast<std::size_t>(n - 1)));
  const double t = q[n - 1];
  return t > f + h && t < f + 1.0 - h;
}

ElementaryDomain ElementaryDomain::shrink(double h, ShrinkMode mode) const {
  if (!(h >= 0.0 && h < 1.0 / 3.0)) throw ParameterError("shrink parameter h must lie in [0, 1/3)");
  ElementaryDomain out = *this;
  out.shrink_h_ = h;
  out.shrink_mode_ = mode;
  return out;
}

BoundingBox ElementaryDomain::bounding_box() const {
  const int n = dim();
  const double m = profile_.bound();
  Point lo = Point::Constant(n, std::numeric_limits<double>::infinity());
  Point hi = -lo;
  for (int corner = 0; corner < (1 << n); ++corner) {
    Point q(n);
    for (int i = 0; i + 1 < n; ++i) q[i] = (corner >> i) & 1 ? 1.0 : 0.0;
    q[n - 1] = (corner >> (n - 1)) & 1 ? 1.0 + m : -m;
    const Point p = affine_.apply(q);
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

double ElementaryDomain::volume() const {
  const int n = dim();
  const double fibre = 1.0 - 2.0 * shrink_h_;
  const double base_side = shrink_mode_ == ShrinkMode::all_directions ? fibre : 1.0;
  return std::pow(base_side, n - 1) * fibre * affine_.abs_det();
}

// ---------------------------------------------------------------------------
// PolygonDomain

PolygonDomain::PolygonDomain(std::vector<Eigen::Vector2d> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw ParameterError("polygon needs at least three vertices");
}

bool PolygonDomain::contains(const Point& p) const {
  if (p.size() != 2) throw DomainError("polygon membership needs a planar point");
  const double x = p[0], y = p[1];
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Eigen::Vector2d& a = vertices_[i];
    const Eigen::Vector2d& b = vertices_[j];
    // On-edge test: collinear and within the segment's box.
    const double cross = (b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x());
    if (cross == 0.0 && x >= std::min(a.x(), b.x()) && x <= std::max(a.x(), b.x()) &&
        y >= std::min(a.y(), b.y()) && y <= std::max(a.y(), b.y())) {
      return false;
    }
    if ((a.y() > y) != (b.y() > y)) {
      const double xc = a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x < xc) inside = !inside;
    }
  }
  return inside;
}

BoundingBox PolygonDomain::bounding_box() const {
  Eigen::Vector2d lo = vertices_.front(), hi = vertices_.front();
  for (const auto& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

double PolygonDomain::area() const {
  double twice = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    twice += vertices_[j].x() * vertices_[i].y() - vertices_[i].x() * vertices_[j].y();
  }
  return 0.5 * std::abs(twice);
}

// ---------------------------------------------------------------------------
// MappedDomain / UnionDomain

namespace {

BoundingBox sampled_image_box(const Domain& base, const SmoothMap& map) {
  const BoundingBox box = bounding_box(base);
  const int n = box.dim();
  constexpr int kPerAxis = 200;
  Point lo = Point::Constant(n, std::numeric_limits<double>::infinity());
  Point hi = -lo;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  bool any = false;
  while (true) {
    Point q(n);
    for (int a = 0; a < n; ++a) {
      q[a] = box.lo[a] + (idx[static_cast<std::size_t>(a)] + 0.5) / kPerAxis * (box.hi[a] - box.lo[a]);
    }
    if (contains(base, q) && map.is_defined_at(q)) {
      const Point p = map(q);
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
      any = true;
    }
    int a = 0;
    while (a < n && ++idx[static_cast<std::size_t>(a)] == kPerAxis) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == n) break;
  }
  if (!any) throw DegenerateDomain("mapped domain has no sampled interior points");
  const Point pad = 0.02 * (hi - lo) + Point::Constant(n, 1e-9);
  return {lo - pad, hi + pad};
}

}  // namespace

MappedDomain::MappedDomain(const Domain& base, SmoothMap map, std::optional<BoundingBox> bbox)
    : base_(std::make_shared<const Domain>(base)), map_(std::move(map)) {
  if (!map_.has_inverse()) throw ParameterError("mapped domain needs a map with an inverse rule");
  if (dimension(*base_) != map_.dim) throw ParameterError("map and base domain dimensions differ");
  bbox_ = bbox ? *bbox : sampled_image_box(*base_, map_);
}

const Domain& MappedDomain::base() const { return *base_; }

bool MappedDomain::contains(const Point& p) const {
  if (p.size() != dim()) throw DomainError("point dimension does not match domain dimension");
  try {
    const Point q = map_.inverse(p);
    return map_.is_defined_at(q) && roughembed::contains(*base_, q);
  } catch (const SingularityError&) {
    return false;
  }
}

UnionDomain::UnionDomain(std::vector<Domain> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw ParameterError("union needs at least one part");
  const int n = dimension(parts_.front());
  for (const auto& p : parts_) {
    if (dimension(p) != n) throw ParameterError("union parts have different dimensions");
  }
}

int UnionDomain::dim() const { return dimension(parts_.front()); }

bool UnionDomain::contains(const Point& p) const {
  return std::any_of(parts_.begin(), parts_.end(),
                     [&](const Domain& d) { return roughembed::contains(d, p); });
}

BoundingBox UnionDomain::bounding_box() const {
  BoundingBox box = roughembed::bounding_box(parts_.front());
  for (const auto& p : parts_) box = box.merged(roughembed::bounding_box(p));
  return box;
}

int dimension(const Domain& d) {
  return std::visit([](const auto& x) { return x.dim(); }, d);
}

bool contains(const Domain& d, const Point& p) {
  if (p.size() != dimension(d)) throw DomainError("point dimension does not match domain dimension");
  return std::visit([&](const auto& x) { return x.contains(p); }, d);
}

BoundingBox bounding_box(const Domain& d) {
  return std::visit([](const auto& x) { return x.bounding_box(); }, d);
}

// ---------------------------------------------------------------------------
// Grid / GridMask

std::size_t Grid::cell_count() const {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

double Grid::cell_volume() const { return std::pow(spacing, dim()); }

std::size_t Grid::stride(int axis) const {
  std::size_t s = 1;
  for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(dims[static_cast<std::size_t>(a)]);
  return s;
}

int Grid::coordinate(std::size_t flat, int axis) const {
  return static_cast<int>((flat / stride(axis)) % static_cast<std::size_t>(dims[static_cast<std::size_t>(axis)]));
}

Point Grid::cell_center(std::size_t flat) const {
  Point c(dim());
  for (int a = 0; a < dim(); ++a) {
    const auto n = static_cast<std::size_t>(dims[static_cast<std::size_t>(a)]);
    c[a] = origin[a] + (static_cast<double>(flat % n) + 0.5) * spacing;
    flat /= n;
  }
  return c;
}

bool Grid::same_as(const Grid& other) const {
  return dims == other.dims && spacing == other.spacing && origin == other.origin;
}

Grid grid_for(const BoundingBox& box, int cells_per_unit) {
  if (cells_per_unit < 2) throw ParameterError("cells_per_unit must be at least 2");
  Grid g;
  const int n = box.dim();
  g.spacing = 1.0 / cells_per_unit;
  g.origin.resize(n);
  g.dims.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const double lo = std::floor(box.lo[a] * cells_per_unit);
    const double hi = std::ceil(box.hi[a] * cells_per_unit);
    g.origin[a] = lo / cells_per_unit;
    g.dims[static_cast<std::size_t>(a)] = std::max(1, static_cast<int>(hi - lo));
  }
  return g;
}

GridMask::GridMask(Grid grid, std::vector<std::uint8_t> cells)
    : grid_(std::move(grid)), cells_(std::move(cells)) {
  if (cells_.size() != grid_.cell_count()) throw ParameterError("mask size does not match grid");
  compact_.assign(cells_.size(), -1);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i]) {
      compact_[i] = static_cast<std::int64_t>(included_.size());
      included_.push_back(i);
    }
  }
}

int GridMask::cells_per_unit() const { return static_cast<int>(std::lround(1.0 / grid_.spacing)); }

bool GridMask::subset_of(const GridMask& other) const {
  if (!grid_.same_as(other.grid_)) throw ParameterError("masks live on different grids");
  for (std::size_t i : included_) {
    if (!other.cells_[i]) return false;
  }
  return true;
}

GridMask GridMask::intersect(const GridMask& other) const {
  if (!grid_.same_as(other.grid_)) throw ParameterError("masks live on different grids");
  std::vector<std::uint8_t> cells(cells_.size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = cells_[i] && other.cells_[i];
  return {grid_, std::move(cells)};
}

GridMask rasterize_on(const Domain& d, const Grid& grid) {
  if (grid.dim() != dimension(d)) throw DomainError("grid and domain dimensions differ");
  std::vector<std::uint8_t> cells(grid.cell_count(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = contains(d, grid.cell_center(i)) ? 1 : 0;
  return {grid, std::move(cells)};
}

GridMask rasterize(const Domain& d, int cells_per_unit) {
  GridMask mask = rasterize_on(d, grid_for(bounding_box(d), cells_per_unit));
  if (mask.empty()) throw DegenerateDomain("no cell center lies inside the domain");
  return mask;
}

ComponentLabels label_components(const GridMask& mask) {
  const Grid& g = mask.grid();
  const int n = g.dim();
  ComponentLabels out;
  out.label.assign(mask.count(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.count(); ++start) {
    if (out.label[start] >= 0) continue;
    const int id = static_cast<int>(out.sizes.size());
    out.sizes.push_back(0);
    out.label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t ci = stack.back();
      stack.pop_back();
      ++out.sizes.back();
      const std::size_t c = mask.included()[ci];
      for (int a = 0; a < n; ++a) {
        const std::size_t s = g.stride(a);
        const int coord = g.coordinate(c, a);
        const std::int64_t lo = coord > 0 ? mask.compact_index(c - s) : -1;
        const std::int64_t hi = coord + 1 < g.dims[static_cast<std::size_t>(a)] ? mask.compact_index(c + s) : -1;
        for (std::int64_t nb : {lo, hi}) {
          if (nb >= 0 && out.label[static_cast<std::size_t>(nb)] < 0) {
            out.label[static_cast<std::size_t>(nb)] = id;
            stack.push_back(static_cast<std::size_t>(nb));
          }
        }
      }
    }
  }
  // Relabel so that component 0 is the largest (ties keep discovery order).
  std::vector<int> order(out.sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return out.sizes[a] > out.sizes[b]; });
  std::vector<int> rank(order.size());
  std::vector<std::size_t> sizes(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
    sizes[r] = out.sizes[static_cast<std::size_t>(order[r])];
  }
  for (int& l : out.label) l = rank[static_cast<std::size_t>(l)];
  out.sizes = std::move(sizes);
  return out;
}

GridMask component_mask(const GridMask& mask, const ComponentLabels& labels, int id) {
  std::vector<std::uint8_t> cells(mask.grid().cell_count(), 0);
  for (std::size_t c = 0; c < mask.count(); ++c) {
    if (labels.label[c] == id) cells[mask.included()[c]] = 1;
  }
  return {mask.grid(), std::move(cells)};
}

std::vector<GridMask> connected_components(const GridMask& mask) {
  const ComponentLabels labels = label_components(mask);
  std::vector<GridMask> out;
  out.reserve(labels.sizes.size());
  for (std::size_t id = 0; id < labels.sizes.size(); ++id) {
    out.push_back(component_mask(mask, labels, static_cast<int>(id)));
  }
  return out;
}

int boundary_components(const GridMask& mask) {
  const Grid& g = mask.grid();
  if (g.dim() != 2) throw UnsupportedRepresentation("boundary components are computed in 2-D only");
  if (mask.empty()) throw DegenerateDomain("boundary of an empty mask");
  const int w = g.dims[0] + 2, h = g.dims[1] + 2;
  auto inside = [&](int i, int j) {
    if (i < 1 || j < 1 || i > g.dims[0] || j > g.dims[1]) return false;
    return mask.at(static_cast<std::size_t>(i - 1) + static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(g.dims[0]));
  };
  std::vector<std::uint8_t> boundary(static_cast<std::size_t>(w) * h, 0);
  auto at = [&](int i, int j) -> std::uint8_t& { return boundary[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * w]; };
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      if (inside(i, j)) continue;
      if (inside(i - 1, j) || inside(i + 1, j) || inside(i, j - 1) || inside(i, j + 1)) at(i, j) = 1;
    }
  }
  int count = 0;
  std::vector<std::pair<int, int>> stack;
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      if (at(i, j) != 1) continue;
      ++count;
      at(i, j) = 2;
      stack.emplace_back(i, j);
      while (!stack.empty()) {
        const auto [ci, cj] = stack.back();
        stack.pop_back();
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            const int ni = ci + di, nj = cj + dj;
            if (ni < 0 || nj < 0 || ni >= w || nj >= h || at(ni, nj) != 1) continue;
            at(ni, nj) = 2;
            stack.emplace_back(ni, nj);
          }
        }
      }
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Lipschitz approximant

LipschitzApproximant lipschitz_approximant(const ElementaryDomain& u, double h, std::size_t samples,
                                           std::size_t max_knots, std::uint64_t seed) {
  if (u.dim() != 2) throw UnsupportedRepresentation("Lipschitz approximants are built for planar domains");
  if (!(h > 0.0 && h < 1.0 / 3.0)) throw ParameterError("h must lie in (0, 1/3)");
  if (u.shrink_h() != 0.0) throw ParameterError("Lipschitz approximant expects an unshrunk domain");

  const ProfileFunction& f = u.profile();
  struct Piece {
    double lo, hi;
    std::function<double(double)> g;
  };
  std::vector<Piece> pieces;
  if (const auto* pw = std::get_if<ProfileFunction::PiecewiseJumpRep>(&f.representation())) {
    double left = 0.0;
    for (std::size_t i = 0; i <= pw->breaks.size(); ++i) {
      const double right = i < pw->breaks.size() ? pw->breaks[i] : 1.0;
      const ClosedForm rule = pw->pieces[i];
      pieces.push_back({left, right, [rule](double x) { return rule(std::span<const double>(&x, 1)); }});
      left = right;
    }
  } else {
    pieces.push_back({0.0, 1.0, [&f](double x) { return f.evaluate(x); }});
  }

  const double x_lo = h / 2.0, x_hi = 1.0 - h / 2.0;
  const double osc_limit = h / 4.0;
  constexpr int kProbe = 32;
  std::size_t knots = 0;

  std::vector<Eigen::Vector2d> lower, upper;
  for (const auto& piece : pieces) {
    const double a = std::max(piece.lo, x_lo), b = std::min(piece.hi, x_hi);
    if (!(b > a)) continue;
    // Bisect until every cell's sampled oscillation is below h/4.
    std::vector<double> xs{a};
    std::vector<std::pair<double, double>> work{{a, b}};
    std::vector<std::pair<double, double>> done;
    while (!work.empty()) {
      auto [c0, c1] = work.back();
      work.pop_back();
      double mn = std::numeric_limits<double>::infinity(), mx = -mn;
      for (int k = 0; k <= kProbe; ++k) {
        const double v = piece.g(c0 + (c1 - c0) * k / kProbe);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      if (mx - mn < osc_limit) {
        done.emplace_back(c0, c1);
        continue;
      }
      if (++knots > max_knots) {
        throw ApproximationFailure("oscillation below h/4 not reached within " + std::to_string(max_knots) +
                                   " knots; last cell [" + std::to_string(c0) + ", " + std::to_string(c1) +
                                   "] oscillates by " + std::to_string(mx - mn));
      }
      const double mid = 0.5 * (c0 + c1);
      work.emplace_back(c0, mid);
      work.emplace_back(mid, c1);
    }
    std::sort(done.begin(), done.end());
    for (const auto& cell : done) xs.push_back(cell.second);
    for (double x : xs) {
      const double gx = piece.g(x);
      lower.emplace_back(x, gx + h / 2.0);
      upper.emplace_back(x, gx + 1.0 - h / 2.0);
    }
  }

  std::vector<Eigen::Vector2d> ring = lower;
  ring.insert(ring.end(), upper.rbegin(), upper.rend());
  std::vector<Eigen::Vector2d> mapped;
  mapped.reserve(ring.size());
  for (const auto& v : ring) {
    const Eigen::Vector2d p = u.affine().apply(v);
    if (mapped.empty() || (mapped.back() - p).norm() > 0.0) mapped.push_back(p);
  }
  PolygonDomain polygon(std::move(mapped));

  LipschitzApproximant out{UnionDomain({polygon}), polygon, lower.size(), samples, 0, 0};
  const ElementaryDomain uh = u.shrink(h, ShrinkMode::all_directions);
  std::mt19937_64 rng(seed);
  const double m = f.bound();
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(-m, 1.0 + m);
  for (std::size_t i = 0; i < samples; ++i) {
    const Point p = u.affine().apply(Eigen::Vector2d(ux(rng), uy(rng)));
    const bool in_v = polygon.contains(p);
    if (uh.contains(p) && !in_v) ++out.inner_violations;
    if (in_v && !u.contains(p)) ++out.outer_violations;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

ElementaryDomain box(double x0, double x1, double y0, double y1) {
  return {ProfileFunction::closed_form(1, ClosedForm::constant(0.0)),
          AffineMap::axis_aligned(Eigen::Vector2d(x1 - x0, y1 - y0), Eigen::Vector2d(x0, y0))};
}

}  // namespace

PolygonDomain spiral_triangle_piece(int n) {
  if (n < 1) throw ParameterError("spiral piece index must be positive");
  const double a = std::exp(-(n + 1.0)), b = std::exp(-(n - 1.0));
  return PolygonDomain({{a, a}, {b, b}, {b, 2.0 * b}, {a, 2.0 * a}});
}

std::vector<std::string> catalog_names() {
  return {"unit_cube", "sin_component_domain", "spiral_triangle", "spiral_domain", "rectangle_chain",
          "step_domain"};
}

bool catalog_has(const std::string& name) {
  for (const char* alias : {"unit_square", "unit_interval", "sin_component"}) {
    if (name == alias) return true;
  }
  const auto names = catalog_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Domain catalog(const std::string& name, const CatalogParams& params) {
  if (name == "unit_cube" || name == "unit_square" || name == "unit_interval") {
    const int n = name == "unit_square" ? 2 : name == "unit_interval" ? 1 : params.n;
    if (n < 1 || n > 3) throw ParameterError("unit_cube dimension must be 1, 2 or 3");
    return ElementaryDomain(ProfileFunction::closed_form(n - 1, ClosedForm::constant(0.0)));
  }
  if (name == "sin_component_domain" || name == "sin_component") {
    const double w = 1.0 / std::numbers::pi;
    // U: x sin(1/x) < x2 < x sin(1/x) + 4 over 0 < x1 < 1/pi, in standard form with
    // horizontal scale 1/pi and fibre height 4, so the standard profile is x sin(1/x) / 4.
    ElementaryDomain u(ProfileFunction::closed_form(1, ClosedForm::xsin(0.0, w, 0.25)),
                       AffineMap::axis_aligned(Eigen::Vector2d(w, 4.0), Eigen::Vector2d(0.0, 0.0)));
    return UnionDomain({u, box(0.0, w, -2.0, 0.0)});
  }
  if (name == "spiral_triangle") {
    return PolygonDomain({{0.0, 0.0}, {1.0, 1.0}, {1.0, 2.0}});
  }
  if (name == "spiral_domain") {
    BoundingBox b{Eigen::Vector2d(-1.0, -1.0), Eigen::Vector2d(1.0, 1.0)};
    return MappedDomain(PolygonDomain({{0.0, 0.0}, {1.0, 1.0}, {1.0, 2.0}}), spiral_map(), b);
  }
  if (name == "rectangle_chain") {
    if (!(params.alpha > 0.0)) throw ParameterError("rectangle_chain needs alpha > 0");
    if (params.k_max < 1) throw ParameterError("rectangle_chain needs k_max >= 1");
    std::vector<Domain> parts;
    parts.emplace_back(box(0.0, 1.0, -1.0, 0.0));
    for (int k = 1; k <= params.k_max; ++k) {
      const double c = std::pow(2.0, -params.alpha * k);
      const double w = std::pow(2.0, -params.alpha * (k + 2));
      parts.emplace_back(box(c - w, c + w, 0.0, w));
    }
    return UnionDomain(std::move(parts));
  }
  if (name == "step_domain") {
    if (params.breaks.empty() && params.values.empty()) {
      return ElementaryDomain(ProfileFunction::step({0.5}, {0.0, 0.5}));
    }
    return ElementaryDomain(ProfileFunction::step(params.breaks, params.values));
  }
  throw ParameterError("unknown catalog domain '" + name + "'");
}

}  // namespace roughembed
