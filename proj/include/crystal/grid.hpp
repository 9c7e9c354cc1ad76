// Integer boxes, multi-channel fields on them, and the cell geometry used
// to sample functions at refinement level n.
//
// Level-n cells are A^{-n}(j + Q) for integer j, where Q is the self-affine
// tile of the digit set (Q = union of A^{-1}(Q + d)).  Cells at level n+1
// nest inside level-n cells: the children of cell i are A i + d.  A field
// stores cell averages, so the transfer operator, restriction and group
// actions are all exact index arithmetic.

#pragma once

#include <optional>
#include <vector>

#include "crystal/group.hpp"

namespace crystal {

// Half-open integer box [lo, hi).  Linear order: first coordinate fastest.
class IntBox {
 public:
  IntBox() = default;
  IntBox(IntVector lo, IntVector hi);

  static IntBox empty(int dimension);
  static IntBox cube(int dimension, Int lo, Int hi);

  int dimension() const { return static_cast<int>(lo_.size()); }
  const IntVector& lo() const { return lo_; }
  const IntVector& hi() const { return hi_; }
  Int extent(int axis) const { return hi_[axis] - lo_[axis]; }
  size_t size() const;
  bool empty() const { return size() == 0; }

  bool contains(const IntVector& j) const;
  bool contains(const IntBox& other) const;
  size_t index(const IntVector& j) const;
  IntVector point(size_t index) const;

  IntBox united(const IntBox& other) const;
  IntBox intersected(const IntBox& other) const;
  IntBox shifted(const IntVector& offset) const;
  IntBox expanded(Int margin) const;
  // Smallest box containing the point.
  IntBox including(const IntVector& j) const;

  friend bool operator==(const IntBox& a, const IntBox& b) { return a.lo_ == b.lo_ && a.hi_ == b.hi_; }

 private:
  IntVector lo_;
  IntVector hi_;
};

// r complex channels per box point, stored point-major.
struct VectorField {
  IntBox box;
  int r = 0;
  std::vector<cd> values;

  VectorField() = default;
  VectorField(IntBox b, int channels);

  cd& at(size_t cell, int comp) { return values[cell * static_cast<size_t>(r) + static_cast<size_t>(comp)]; }
  cd at(size_t cell, int comp) const { return values[cell * static_cast<size_t>(r) + static_cast<size_t>(comp)]; }
  // Zero outside the box.
  cd read(const IntVector& j, int comp) const;

  double norm_sq() const;
  double max_abs() const;
  // Bounding box of cells with a non-zero channel (empty box when zero).
  IntBox nonzero_box() const;
  // Copy onto `target`, dropping values outside it.
  VectorField reboxed(const IntBox& target) const;
  VectorField channel(int comp) const;
};

using VectorSequence = VectorField;

struct SampledVectorFunction {
  int level = 0;
  VectorField field;
  bool intertwined = false;
};

struct RealBox {
  RealVector lo;
  RealVector hi;
};

// Bounding box of the attractor of { x -> A^{-1}(x + k) : k in translations }.
RealBox ifs_bounding_box(const IntMatrix& a, const std::vector<IntVector>& translations);

class CellGeometry {
 public:
  explicit CellGeometry(const CrystalTriple& triple);

  const CrystalTriple& triple() const { return triple_; }
  int dimension() const { return triple_.dimension(); }
  int m() const { return triple_.dilation().m; }

  double cell_volume(int level) const;
  const RealVector& tile_centroid() const { return centroid_; }
  const RealBox& tile_box() const { return tile_box_; }
  RealVector cell_centroid(int level, const IntVector& j) const;
  IntMatrix dilation_power(int n) const;

  // True when every point-group element maps Q onto a lattice translate.
  bool group_compatible() const { return compatible_; }
  // Index of gamma(cell j) at `level`.  Throws GridIncompatibleGroup.
  IntVector apply(const GroupElement& gamma, int level, const IntVector& j) const;

  // Q = [0,1]^d (diagonal A with standard digits).
  bool unit_cube_tile() const { return unit_cube_; }

  // Cells at `level` meeting the lattice-coordinate box [lo, hi], plus margin.
  IntBox cells_covering(int level, const RealBox& region, Int margin = 1) const;

  // Parent index of a level-(n+1) cell.
  IntVector parent(const IntVector& j) const;
  IntBox parent_box(const IntBox& fine) const;
  IntBox child_box(const IntBox& coarse) const;

 private:
  CrystalTriple triple_;
  RealVector centroid_;
  RealBox tile_box_;
  std::vector<IntVector> shifts_;  // g Q = Q + shift
  bool compatible_ = true;
  bool unit_cube_ = false;
};

// Cell averages at level n+1 averaged onto level n.
SampledVectorFunction restrict_level(const CellGeometry& geom, const SampledVectorFunction& f);
// Piecewise-constant refinement: children inherit the parent value.
SampledVectorFunction prolong_level(const CellGeometry& geom, const SampledVectorFunction& f);

double l2_norm(const CellGeometry& geom, const SampledVectorFunction& f);
// L2 distance on a common level (boxes may differ; outside reads are zero).
double l2_distance(const CellGeometry& geom, const SampledVectorFunction& a, const SampledVectorFunction& b);
// sum vol * a_comp * conj(b_comp)
cd inner_product(const CellGeometry& geom, const SampledVectorFunction& a, int comp_a,
                 const SampledVectorFunction& b, int comp_b);

// F_i = f o g_i^{-1} built from the single channel of `scalar`.
SampledVectorFunction intertwine(const CellGeometry& geom, const SampledVectorFunction& scalar);

struct IntertwiningReport {
  bool ok = true;
  double max_violation = 0.0;
  std::optional<std::pair<int, IntVector>> witness;  // (component, cell)
};
// Checks F_i(x) = F_1(g_i^{-1} x) on every cell.
IntertwiningReport check_intertwined(const CellGeometry& geom, const SampledVectorFunction& f,
                                     double tol);

// Exact cell averages of a convex polygon (d = 2, counter-clockwise or not)
// or an interval (d = 1, two vertices) given in lattice coordinates.
// Requires a unit-cube tile.
SampledVectorFunction polygon_indicator(const CellGeometry& geom, int level,
                                        const std::vector<RealVector>& vertices);

}  // namespace crystal
