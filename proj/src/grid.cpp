#include "crystal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crystal/error.hpp"
#include "crystal/intmath.hpp"

namespace crystal {

// ---------------------------------------------------------------- IntBox

IntBox::IntBox(IntVector lo, IntVector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw Error(ErrorKind::DimensionMismatch, "box corners differ in dimension");
  for (Eigen::Index i = 0; i < lo_.size(); ++i) hi_[i] = std::max(hi_[i], lo_[i]);
}

IntBox IntBox::empty(int dimension) { return IntBox(IntVector::Zero(dimension), IntVector::Zero(dimension)); }

IntBox IntBox::cube(int dimension, Int lo, Int hi) {
  return IntBox(IntVector::Constant(dimension, lo), IntVector::Constant(dimension, hi));
}

size_t IntBox::size() const {
  if (lo_.size() == 0) return 0;
  size_t n = 1;
  for (Eigen::Index i = 0; i < lo_.size(); ++i) n *= static_cast<size_t>(hi_[i] - lo_[i]);
  return n;
}

bool IntBox::contains(const IntVector& j) const {
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (j[i] < lo_[i] || j[i] >= hi_[i]) return false;
  }
  return true;
}

bool IntBox::contains(const IntBox& other) const {
  if (other.empty()) return true;
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (other.lo_[i] < lo_[i] || other.hi_[i] > hi_[i]) return false;
  }
  return true;
}

size_t IntBox::index(const IntVector& j) const {
  size_t idx = 0;
  size_t stride = 1;
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    idx += static_cast<size_t>(j[i] - lo_[i]) * stride;
    stride *= static_cast<size_t>(hi_[i] - lo_[i]);
  }
  return idx;
}

IntVector IntBox::point(size_t index) const {
  IntVector j(lo_.size());
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    const auto ext = static_cast<size_t>(hi_[i] - lo_[i]);
    j[i] = lo_[i] + static_cast<Int>(index % ext);
    index /= ext;
  }
  return j;
}

IntBox IntBox::united(const IntBox& other) const {
  if (empty()) return other;
  if (other.empty()) return *this;
  return IntBox(lo_.cwiseMin(other.lo_), hi_.cwiseMax(other.hi_));
}

IntBox IntBox::intersected(const IntBox& other) const {
  return IntBox(lo_.cwiseMax(other.lo_), hi_.cwiseMin(other.hi_));
}

IntBox IntBox::shifted(const IntVector& offset) const { return IntBox(lo_ + offset, hi_ + offset); }

IntBox IntBox::expanded(Int margin) const {
  return IntBox(lo_.array() - margin, hi_.array() + margin);
}

IntBox IntBox::including(const IntVector& j) const {
  if (empty()) return IntBox(j, j.array() + 1);
  return IntBox(lo_.cwiseMin(j), hi_.cwiseMax(IntVector(j.array() + 1)));
}

// ---------------------------------------------------------------- VectorField

VectorField::VectorField(IntBox b, int channels)
    : box(std::move(b)), r(channels), values(box.size() * static_cast<size_t>(channels), cd(0.0)) {}

cd VectorField::read(const IntVector& j, int comp) const {
  if (!box.contains(j)) return cd(0.0);
  return at(box.index(j), comp);
}

double VectorField::norm_sq() const {
  double s = 0.0;
  for (const cd& v : values) s += std::norm(v);
  return s;
}

double VectorField::max_abs() const {
  double s = 0.0;
  for (const cd& v : values) s = std::max(s, std::abs(v));
  return s;
}

IntBox VectorField::nonzero_box() const {
  IntBox out = IntBox::empty(box.dimension());
  const size_t n = box.size();
  for (size_t c = 0; c < n; ++c) {
    for (int i = 0; i < r; ++i) {
      if (at(c, i) != cd(0.0)) {
        out = out.including(box.point(c));
        break;
      }
    }
  }
  return out;
}

VectorField VectorField::reboxed(const IntBox& target) const {
  VectorField out(target, r);
  const IntBox common = box.intersected(target);
  const size_t n = common.size();
  for (size_t c = 0; c < n; ++c) {
    const IntVector j = common.point(c);
    const size_t src = box.index(j);
    const size_t dst = target.index(j);
    for (int i = 0; i < r; ++i) out.at(dst, i) = at(src, i);
  }
  return out;
}

VectorField VectorField::channel(int comp) const {
  VectorField out(box, 1);
  for (size_t c = 0; c < box.size(); ++c) out.at(c, 0) = at(c, comp);
  return out;
}

// ---------------------------------------------------------------- geometry

RealBox ifs_bounding_box(const IntMatrix& a, const std::vector<IntVector>& translations) {
  const int d = static_cast<int>(a.rows());
  RealBox box{RealVector::Zero(d), RealVector::Zero(d)};
  if (translations.empty()) return box;
  const RealMatrix inv = to_real(a).inverse();
  double kmax = 0.0;
  for (const auto& k : translations) kmax = std::max(kmax, to_real(k).norm());
  RealMatrix power = inv;
  for (int t = 1; t <= 2000; ++t) {
    for (int axis = 0; axis < d; ++axis) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& k : translations) {
        const double v = (power * to_real(k))[axis];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      box.lo[axis] += lo;
      box.hi[axis] += hi;
    }
    power = power * inv;
    if (power.norm() * kmax < 1e-15) break;
  }
  return box;
}

CellGeometry::CellGeometry(const CrystalTriple& triple) : triple_(triple) {
  const Dilation& dil = triple_.dilation();
  const int d = triple_.dimension();
  RealVector mean = RealVector::Zero(d);
  for (const auto& digit : dil.digits) mean += to_real(digit);
  mean /= static_cast<double>(dil.digits.size());
  const RealMatrix a = to_real(dil.matrix);
  centroid_ = (a - RealMatrix::Identity(d, d)).partialPivLu().solve(mean);
  tile_box_ = ifs_bounding_box(dil.matrix, dil.digits);

  const PointGroup& group = triple_.group();
  for (int i = 0; i < group.order(); ++i) {
    const RealVector moved = to_real(group.element(i)) * centroid_ - centroid_;
    IntVector shift(d);
    for (int axis = 0; axis < d; ++axis) {
      shift[axis] = static_cast<Int>(std::llround(moved[axis]));
      if (std::abs(moved[axis] - static_cast<double>(shift[axis])) > 1e-9) compatible_ = false;
    }
    shifts_.push_back(shift);
  }

  bool diagonal = true;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i != j && dil.matrix(i, j) != 0) diagonal = false;
    }
    if (dil.matrix(i, i) < 2) diagonal = false;
  }
  unit_cube_ = diagonal;
  if (diagonal) {
    for (const auto& digit : dil.digits) {
      for (int i = 0; i < d; ++i) {
        if (digit[i] < 0 || digit[i] >= dil.matrix(i, i)) unit_cube_ = false;
      }
    }
  }
}

double CellGeometry::cell_volume(int level) const {
  return triple_.lattice().covolume() * std::pow(static_cast<double>(m()), -level);
}

RealVector CellGeometry::cell_centroid(int level, const IntVector& j) const {
  const RealMatrix an = to_real(dilation_power(level));
  return an.partialPivLu().solve(to_real(j) + centroid_);
}

IntMatrix CellGeometry::dilation_power(int n) const { return matrix_power(triple_.dilation().matrix, n); }

IntVector CellGeometry::apply(const GroupElement& gamma, int level, const IntVector& j) const {
  if (!compatible_) {
    throw Error(ErrorKind::GridIncompatibleGroup,
                "point group does not map the digit tile onto lattice translates of itself",
                {{"group", triple_.name()}});
  }
  // gamma(A^{-n}(j + Q)) = A^{-n}(g'(j + A^n k) + g'Q), g' = A^n g A^{-n}
  const int conj = triple_.conjugate_index(gamma.point, level);
  const IntMatrix& g = triple_.group().element(conj);
  IntVector shifted = j;
  if (gamma.translation.size() > 0 && !gamma.translation.isZero()) {
    shifted += dilation_power(level) * gamma.translation;
  }
  return g * shifted + shifts_[static_cast<size_t>(conj)];
}

IntBox CellGeometry::cells_covering(int level, const RealBox& region, Int margin) const {
  const int d = dimension();
  const RealMatrix an = to_real(dilation_power(level));
  RealVector lo = RealVector::Constant(d, std::numeric_limits<double>::infinity());
  RealVector hi = -lo;
  for (int corner = 0; corner < (1 << d); ++corner) {
    RealVector x(d);
    for (int axis = 0; axis < d; ++axis) x[axis] = (corner >> axis) & 1 ? region.hi[axis] : region.lo[axis];
    const RealVector y = an * x;
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  IntVector jl(d), jh(d);
  for (int axis = 0; axis < d; ++axis) {
    jl[axis] = static_cast<Int>(std::floor(lo[axis] - tile_box_.hi[axis] + 1e-9)) - margin;
    jh[axis] = static_cast<Int>(std::floor(hi[axis] - tile_box_.lo[axis] - 1e-9)) + 1 + margin;
  }
  return IntBox(jl, jh);
}

IntVector CellGeometry::parent(const IntVector& j) const {
  const Dilation& dil = triple_.dilation();
  const int h = dil.coset_of(j);
  return dil.coset_quotient(j, h);
}

IntBox CellGeometry::parent_box(const IntBox& fine) const {
  if (fine.empty()) return IntBox::empty(dimension());
  const Dilation& dil = triple_.dilation();
  const int d = dimension();
  const RealMatrix inv = to_real(dil.matrix).inverse();
  RealVector lo = RealVector::Constant(d, std::numeric_limits<double>::infinity());
  RealVector hi = -lo;
  for (int corner = 0; corner < (1 << d); ++corner) {
    RealVector x(d);
    for (int axis = 0; axis < d; ++axis) {
      x[axis] = static_cast<double>((corner >> axis) & 1 ? fine.hi()[axis] - 1 : fine.lo()[axis]);
    }
    for (const auto& digit : dil.digits) {
      const RealVector y = inv * (x - to_real(digit));
      lo = lo.cwiseMin(y);
      hi = hi.cwiseMax(y);
    }
  }
  IntVector jl(d), jh(d);
  for (int axis = 0; axis < d; ++axis) {
    jl[axis] = static_cast<Int>(std::floor(lo[axis] + 1e-9));
    jh[axis] = static_cast<Int>(std::floor(hi[axis] + 1e-9)) + 1;
  }
  return IntBox(jl, jh);
}

IntBox CellGeometry::child_box(const IntBox& coarse) const {
  if (coarse.empty()) return IntBox::empty(dimension());
  const Dilation& dil = triple_.dilation();
  const int d = dimension();
  IntBox out = IntBox::empty(d);
  for (int corner = 0; corner < (1 << d); ++corner) {
    IntVector x(d);
    for (int axis = 0; axis < d; ++axis) x[axis] = (corner >> axis) & 1 ? coarse.hi()[axis] - 1 : coarse.lo()[axis];
    for (const auto& digit : dil.digits) out = out.including(IntVector(dil.matrix * x + digit));
  }
  return out;
}

// ---------------------------------------------------------------- level maps

SampledVectorFunction restrict_level(const CellGeometry& geom, const SampledVectorFunction& f) {
  if (f.level < 1) throw Error(ErrorKind::InvalidInput, "cannot restrict below level 0");
  const Dilation& dil = geom.triple().dilation();
  const IntBox coarse = geom.parent_box(f.field.box);
  SampledVectorFunction out{f.level - 1, VectorField(coarse, f.field.r), f.intertwined};
  const double inv_m = 1.0 / static_cast<double>(dil.m);
  const size_t n = coarse.size();
  for (size_t c = 0; c < n; ++c) {
    const IntVector i = coarse.point(c);
    const IntVector base = dil.matrix * i;
    for (const auto& digit : dil.digits) {
      const IntVector child = base + digit;
      if (!f.field.box.contains(child)) continue;
      const size_t src = f.field.box.index(child);
      for (int comp = 0; comp < f.field.r; ++comp) out.field.at(c, comp) += f.field.at(src, comp) * inv_m;
    }
  }
  return out;
}

SampledVectorFunction prolong_level(const CellGeometry& geom, const SampledVectorFunction& f) {
  const Dilation& dil = geom.triple().dilation();
  const IntBox fine = geom.child_box(f.field.box);
  SampledVectorFunction out{f.level + 1, VectorField(fine, f.field.r), f.intertwined};
  const size_t n = f.field.box.size();
  for (size_t c = 0; c < n; ++c) {
    const IntVector base = dil.matrix * f.field.box.point(c);
    for (const auto& digit : dil.digits) {
      const size_t dst = fine.index(IntVector(base + digit));
      for (int comp = 0; comp < f.field.r; ++comp) out.field.at(dst, comp) = f.field.at(c, comp);
    }
  }
  return out;
}

double l2_norm(const CellGeometry& geom, const SampledVectorFunction& f) {
  return std::sqrt(f.field.norm_sq() * geom.cell_volume(f.level));
}

double l2_distance(const CellGeometry& geom, const SampledVectorFunction& a, const SampledVectorFunction& b) {
  if (a.level != b.level || a.field.r != b.field.r) {
    throw Error(ErrorKind::DimensionMismatch, "l2_distance needs equal levels and channel counts");
  }
  const IntBox all = a.field.box.united(b.field.box);
  double s = 0.0;
  const size_t n = all.size();
  for (size_t c = 0; c < n; ++c) {
    const IntVector j = all.point(c);
    for (int comp = 0; comp < a.field.r; ++comp) s += std::norm(a.field.read(j, comp) - b.field.read(j, comp));
  }
  return std::sqrt(s * geom.cell_volume(a.level));
}

cd inner_product(const CellGeometry& geom, const SampledVectorFunction& a, int comp_a,
                 const SampledVectorFunction& b, int comp_b) {
  if (a.level != b.level) throw Error(ErrorKind::DimensionMismatch, "inner_product needs equal levels");
  const IntBox common = a.field.box.intersected(b.field.box);
  cd s = 0.0;
  const size_t n = common.size();
  for (size_t c = 0; c < n; ++c) {
    const IntVector j = common.point(c);
    s += a.field.at(a.field.box.index(j), comp_a) * std::conj(b.field.at(b.field.box.index(j), comp_b));
  }
  return s * geom.cell_volume(a.level);
}

namespace {

IntBox image_box(const CellGeometry& geom, const GroupElement& gamma, int level, const IntBox& box) {
  const int d = box.dimension();
  IntBox out = IntBox::empty(d);
  if (box.empty()) return out;
  for (int corner = 0; corner < (1 << d); ++corner) {
    IntVector x(d);
    for (int axis = 0; axis < d; ++axis) x[axis] = (corner >> axis) & 1 ? box.hi()[axis] - 1 : box.lo()[axis];
    out = out.including(geom.apply(gamma, level, x));
  }
  return out;
}

}  // namespace

SampledVectorFunction intertwine(const CellGeometry& geom, const SampledVectorFunction& scalar) {
  const CrystalTriple& triple = geom.triple();
  const PointGroup& group = triple.group();
  const int r = group.order();
  const int d = triple.dimension();
  IntBox box = IntBox::empty(d);
  for (int i = 0; i < r; ++i) {
    box = box.united(image_box(geom, GroupElement{i, IntVector::Zero(d)}, scalar.level, scalar.field.box));
  }
  SampledVectorFunction out{scalar.level, VectorField(box, r), true};
  const size_t n = box.size();
  for (size_t c = 0; c < n; ++c) {
    const IntVector j = box.point(c);
    for (int i = 0; i < r; ++i) {
      const IntVector src = geom.apply(GroupElement{group.inverse(i), IntVector::Zero(d)}, scalar.level, j);
      out.field.at(c, i) = scalar.field.read(src, 0);
    }
  }
  return out;
}

IntertwiningReport check_intertwined(const CellGeometry& geom, const SampledVectorFunction& f, double tol) {
  const PointGroup& group = geom.triple().group();
  const int d = geom.dimension();
  IntertwiningReport report;
  const IntBox& box = f.field.box;
  const size_t n = box.size();
  auto note = [&](double v, int comp, const IntVector& j) {
    if (v > report.max_violation) {
      report.max_violation = v;
      report.witness = std::make_pair(comp, j);
    }
  };
  for (size_t c = 0; c < n; ++c) {
    const IntVector j = box.point(c);
    for (int i = 1; i < group.order(); ++i) {
      // F_i(x) vs F_1(g_i^{-1} x)
      const IntVector src = geom.apply(GroupElement{group.inverse(i), IntVector::Zero(d)}, f.level, j);
      note(std::abs(f.field.at(c, i) - f.field.read(src, 0)), i, j);
      // F_1(y) vs F_i(g_i y)
      const IntVector dst = geom.apply(GroupElement{i, IntVector::Zero(d)}, f.level, j);
      note(std::abs(f.field.at(c, 0) - f.field.read(dst, i)), i, dst);
    }
  }
  report.ok = report.max_violation <= tol;
  return report;
}

// ---------------------------------------------------------------- polygons

namespace {

using Point2 = Eigen::Vector2d;

std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, int axis, double bound, bool keep_below) {
  std::vector<Point2> out;
  if (poly.empty()) return out;
  auto inside = [&](const Point2& p) { return keep_below ? p[axis] <= bound : p[axis] >= bound; };
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point2& cur = poly[i];
    const Point2& prev = poly[(i + poly.size() - 1) % poly.size()];
    const bool cin = inside(cur);
    const bool pin = inside(prev);
    if (cin != pin) {
      const double t = (bound - prev[axis]) / (cur[axis] - prev[axis]);
      out.push_back(prev + t * (cur - prev));
    }
    if (cin) out.push_back(cur);
  }
  return out;
}

double polygon_area(const std::vector<Point2>& poly) {
  double s = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % poly.size()];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(s) * 0.5;
}

}  // namespace

SampledVectorFunction polygon_indicator(const CellGeometry& geom, int level,
                                        const std::vector<RealVector>& vertices) {
  const int d = geom.dimension();
  if (!geom.unit_cube_tile()) {
    throw Error(ErrorKind::InvalidInput, "polygon sampling needs a diagonal dilation with standard digits");
  }
  if (d != 1 && d != 2) throw Error(ErrorKind::InvalidInput, "polygon sampling supports d = 1 or 2");
  if ((d == 1 && vertices.size() != 2) || (d == 2 && vertices.size() < 3)) {
    throw Error(ErrorKind::InvalidInput, "polygon needs 2 endpoints (d=1) or at least 3 vertices (d=2)");
  }
  RealBox bbox{RealVector::Constant(d, std::numeric_limits<double>::infinity()),
               RealVector::Constant(d, -std::numeric_limits<double>::infinity())};
  for (const auto& v : vertices) {
    if (v.size() != d) throw Error(ErrorKind::DimensionMismatch, "polygon vertex has wrong dimension");
    bbox.lo = bbox.lo.cwiseMin(v);
    bbox.hi = bbox.hi.cwiseMax(v);
  }
  const IntMatrix& a = geom.triple().dilation().matrix;
  RealVector scale(d);
  for (int axis = 0; axis < d; ++axis) scale[axis] = std::pow(static_cast<double>(a(axis, axis)), level);
  IntVector lo(d), hi(d);
  for (int axis = 0; axis < d; ++axis) {
    lo[axis] = static_cast<Int>(std::floor(bbox.lo[axis] * scale[axis]));
    hi[axis] = static_cast<Int>(std::ceil(bbox.hi[axis] * scale[axis]));
    if (hi[axis] == lo[axis]) ++hi[axis];
  }
  SampledVectorFunction out{level, VectorField(IntBox(lo, hi), 1), false};
  const IntBox& box = out.field.box;
  if (d == 1) {
    const double x0 = std::min(vertices[0][0], vertices[1][0]);
    const double x1 = std::max(vertices[0][0], vertices[1][0]);
    for (size_t c = 0; c < box.size(); ++c) {
      const double left = static_cast<double>(box.point(c)[0]) / scale[0];
      const double right = static_cast<double>(box.point(c)[0] + 1) / scale[0];
      const double overlap = std::max(0.0, std::min(right, x1) - std::max(left, x0));
      out.field.at(c, 0) = overlap * scale[0];
    }
    return out;
  }
  std::vector<Point2> poly;
  for (const auto& v : vertices) poly.emplace_back(v[0], v[1]);
  const double cell_area = 1.0 / (scale[0] * scale[1]);
  for (size_t c = 0; c < box.size(); ++c) {
    const IntVector j = box.point(c);
    const double x0 = static_cast<double>(j[0]) / scale[0];
    const double x1 = static_cast<double>(j[0] + 1) / scale[0];
    const double y0 = static_cast<double>(j[1]) / scale[1];
    const double y1 = static_cast<double>(j[1] + 1) / scale[1];
    std::vector<Point2> clipped = clip_half_plane(poly, 0, x0, false);
    clipped = clip_half_plane(clipped, 0, x1, true);
    clipped = clip_half_plane(clipped, 1, y0, false);
    clipped = clip_half_plane(clipped, 1, y1, true);
    if (clipped.size() >= 3) out.field.at(c, 0) = polygon_area(clipped) / cell_area;
  }
  return out;
}

}  // namespace crystal
