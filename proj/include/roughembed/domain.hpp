#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "roughembed/profile.hpp"
#include "roughembed/smooth_map.hpp"

namespace roughembed {

using Point = Eigen::VectorXd;

struct BoundingBox {
  Point lo;
  Point hi;

  int dim() const { return static_cast<int>(lo.size()); }
  BoundingBox merged(const BoundingBox& other) const {
    return {lo.cwiseMin(other.lo), hi.cwiseMax(other.hi)};
  }
  double diameter() const { return (hi - lo).norm(); }
};

/// Invertible affine map x -> matrix * x + translation.
class AffineMap {
 public:
  AffineMap(Mat matrix, Vec translation);
  static AffineMap identity(int n);
  /// diag(scale) followed by translation.
  static AffineMap axis_aligned(const Vec& scale, const Vec& translation);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Mat& matrix() const { return matrix_; }
  const Vec& translation() const { return translation_; }
  double abs_det() const { return abs_det_; }

  Point apply(const Point& q) const { return matrix_ * q + translation_; }
  Point apply_inverse(const Point& p) const { return inverse_ * (p - translation_); }

 private:
  Mat matrix_;
  Vec translation_;
  Mat inverse_;
  double abs_det_ = 1.0;
};

enum class ShrinkMode { all_directions, vertical_only };

std::string to_string(ShrinkMode mode);

/// Image under an affine map of U = Int{Q_n + (0,...,0,f(x'))}, optionally shrunk
/// to U_h. Membership is decided in standard coordinates q = affine^{-1}(p).
class ElementaryDomain {
 public:
  ElementaryDomain(ProfileFunction profile, std::optional<AffineMap> affine = std::nullopt);

  int dim() const { return profile_.base_dim() + 1; }
  const ProfileFunction& profile() const { return profile_; }
  const AffineMap& affine() const { return affine_; }
  double shrink_h() const { return shrink_h_; }
  ShrinkMode shrink_mode() const { return shrink_mode_; }

  bool contains(const Point& p) const;
  bool contains_standard(const Point& q) const;

  /// U_h; 0 <= h < 1/3. Replaces any previous shrink.
  ElementaryDomain shrink(double h, ShrinkMode mode = ShrinkMode::all_directions) const;

  BoundingBox bounding_box() const;
  /// Exact measure: base measure times fibre length times |det affine|.
  double volume() const;

 private:
  ProfileFunction profile_;
  AffineMap affine_;
  double shrink_h_ = 0.0;
  ShrinkMode shrink_mode_ = ShrinkMode::all_directions;
};

/// Planar polygon, even-odd interior. Points on an edge are outside.
class PolygonDomain {
 public:
  explicit PolygonDomain(std::vector<Eigen::Vector2d> vertices);

  int dim() const { return 2; }
  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  bool contains(const Point& p) const;
  BoundingBox bounding_box() const;
  double area() const;

 private:
  std::vector<Eigen::Vector2d> vertices_;
};

class MappedDomain;
class UnionDomain;
using Domain = std::variant<ElementaryDomain, PolygonDomain, MappedDomain, UnionDomain>;

/// Image of a base domain under a map with an inverse rule: p is inside iff
/// map^{-1}(p) lies in the base domain.
class MappedDomain {
 public:
  MappedDomain(const Domain& base, SmoothMap map, std::optional<BoundingBox> bbox = std::nullopt);

  int dim() const { return map_.dim; }
  const Domain& base() const;
  const SmoothMap& map() const { return map_; }
  bool contains(const Point& p) const;
  BoundingBox bounding_box() const { return bbox_; }

 private:
  std::shared_ptr<const Domain> base_;
  SmoothMap map_;
  BoundingBox bbox_;
};

/// Finite union; membership is the disjunction of part memberships.
class UnionDomain {
 public:
  explicit UnionDomain(std::vector<Domain> parts);

  int dim() const;
  const std::vector<Domain>& parts() const { return parts_; }
  bool contains(const Point& p) const;
  BoundingBox bounding_box() const;

 private:
  std::vector<Domain> parts_;
};

int dimension(const Domain& d);
/// Interior membership; throws DomainError on dimension mismatch.
bool contains(const Domain& d, const Point& p);
BoundingBox bounding_box(const Domain& d);

// ---------------------------------------------------------------------------
// Grids and masks

/// Uniform cell grid; cell (i_0, ..., i_{n-1}) covers origin + spacing * [i, i+1).
/// Flat index runs axis 0 fastest.
struct Grid {
  Point origin;
  double spacing = 1.0;
  std::vector<int> dims;

  int dim() const { return static_cast<int>(dims.size()); }
  std::size_t cell_count() const;
  double cell_volume() const;
  Point cell_center(std::size_t flat) const;
  std::size_t stride(int axis) const;
  /// Index along `axis` of cell `flat`.
  int coordinate(std::size_t flat, int axis) const;
  bool same_as(const Grid& other) const;
};

/// Grid snapped to multiples of 1/cells_per_unit covering `box`.
Grid grid_for(const BoundingBox& box, int cells_per_unit);

/// Boolean cell set on a grid, with a compact numbering of the included cells
/// (ascending flat order).
class GridMask {
 public:
  GridMask(Grid grid, std::vector<std::uint8_t> cells);

  const Grid& grid() const { return grid_; }
  std::size_t count() const { return included_.size(); }
  bool empty() const { return included_.empty(); }
  bool at(std::size_t flat) const { return cells_[flat] != 0; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  /// Flat indices of included cells.
  const std::vector<std::size_t>& included() const { return included_; }
  /// Compact index of a flat cell, or -1.
  std::int64_t compact_index(std::size_t flat) const { return compact_[flat]; }
  int cells_per_unit() const;

  bool subset_of(const GridMask& other) const;
  GridMask intersect(const GridMask& other) const;
  double measure() const { return static_cast<double>(count()) * grid_.cell_volume(); }

 private:
  Grid grid_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::size_t> included_;
  std::vector<std::int64_t> compact_;
};

/// Cell-center rasterization on a grid fitted to the domain's bounding box.
/// Throws DegenerateDomain if no cell center lies inside.
GridMask rasterize(const Domain& d, int cells_per_unit);
/// Cell-center rasterization on a given grid (may be empty).
GridMask rasterize_on(const Domain& d, const Grid& grid);

/// Face-connected (4-connectivity in 2-D) components of the included cells,
/// largest first.
std::vector<GridMask> connected_components(const GridMask& mask);

/// Component label per compact index (0 = largest) and component sizes.
struct ComponentLabels {
  std::vector<int> label;
  std::vector<std::size_t> sizes;
};
ComponentLabels label_components(const GridMask& mask);
GridMask component_mask(const GridMask& mask, const ComponentLabels& labels, int id);

/// Number of connected pieces of the discrete boundary: excluded cells that share
/// a face with an included cell, labelled with 8-connectivity inside the grid
/// dilated by one cell. 2-D only.
int boundary_components(const GridMask& mask);

// ---------------------------------------------------------------------------
// Lipschitz approximants

struct LipschitzApproximant {
  UnionDomain domain;     // single polygonal part
  PolygonDomain polygon;  // the same polygon, for direct access
  std::size_t knot_count = 0;
  std::size_t samples = 0;
  std::size_t inner_violations = 0;  // sampled points in U_h but not in V_h
  std::size_t outer_violations = 0;  // sampled points in V_h but not in U
  bool containment_holds() const { return inner_violations == 0 && outer_violations == 0; }
};

/// Polygon V_h with U_h <= V_h <= U for a planar elementary domain, built from a
/// piecewise-linear interpolant of the profile (per-cell oscillation < h/4)
/// offset by h/2 inside each fibre, with vertical segments at the jumps.
LipschitzApproximant lipschitz_approximant(const ElementaryDomain& u, double h,
                                           std::size_t samples = 100000,
                                           std::size_t max_knots = 1000000,
                                           std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Catalog

struct CatalogParams {
  int n = 2;                   // unit_cube dimension
  double alpha = 1.0;          // rectangle_chain exponent
  int k_max = 40;              // rectangle_chain truncation
  std::vector<double> breaks;  // step_domain; default one jump 0 -> 0.5 at 1/2
  std::vector<double> values;
};

/// Named constructions: unit_cube, sin_component_domain, spiral_triangle,
/// spiral_domain, rectangle_chain, step_domain (plus a few aliases).
Domain catalog(const std::string& name, const CatalogParams& params = {});
std::vector<std::string> catalog_names();
/// True for catalog names and their aliases.
bool catalog_has(const std::string& name);

/// T_n = {e^{-(n+1)} < s < e^{-(n-1)}, s < t < 2s}, the n-th piece of the spiral triangle.
PolygonDomain spiral_triangle_piece(int n);

}  // namespace roughembed
