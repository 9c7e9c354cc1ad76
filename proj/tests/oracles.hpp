// Test-side reference computations.  These work from point evaluation on
// square-lattice presets with A = 2I (unit-cube tiles), independently of the
// index arithmetic used by the library.
#pragma once

#include <cmath>
#include <random>

#include "crystal/grid.hpp"
#include "crystal/group.hpp"
#include "crystal/mask.hpp"
#include "crystal/presets.hpp"

namespace oracle {

using namespace crystal;

inline CrystalTriple triple2(const char* name) { return preset(name).with_dilation(parse_dilation("2I", preset(name).dimension())); }

// Level-n cell of A = 2I containing x.
inline IntVector cell_of(const RealVector& x, int level) {
  const double s = std::ldexp(1.0, level);
  IntVector j(x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) j[a] = static_cast<Int>(std::floor(x[a] * s));
  return j;
}

inline RealVector centroid(const IntVector& j, int level) {
  return (to_real(j).array() + 0.5).matrix() / std::ldexp(1.0, level);
}

// g x as an affine map of the lattice coordinates.
inline RealVector apply_point(const IntMatrix& g, const RealVector& x) { return to_real(g) * x; }

inline IntMatrix inverse_matrix(const IntMatrix& g) {
  const RealMatrix inv = to_real(g).inverse();
  return inv.array().round().cast<Int>().matrix();
}

// Random scalar mask with `count` entries, translations in [-span, span].
inline ScalarMask random_mask(std::mt19937_64& rng, const CrystalTriple& t, int count, int span) {
  std::uniform_int_distribution<int> gi(0, t.order() - 1);
  std::uniform_int_distribution<Int> ki(-span, span);
  std::normal_distribution<double> z;
  ScalarMask d(t.dimension());
  for (int e = 0; e < count; ++e) {
    IntVector k(t.dimension());
    for (int a = 0; a < t.dimension(); ++a) k[a] = ki(rng);
    d.set(gi(rng), k, cd(z(rng), z(rng)));
  }
  return d;
}

// F_i[j] = f[cell of g_i^{-1}(centroid j)] for a random scalar field f.
inline SampledVectorFunction random_intertwined(std::mt19937_64& rng, const CrystalTriple& t, int level,
                                                const IntBox& box) {
  std::normal_distribution<double> z;
  VectorField scalar(box, 1);
  for (auto& v : scalar.values) v = cd(z(rng), z(rng));
  SampledVectorFunction f{level, VectorField(box, t.order()), true};
  for (size_t c = 0; c < box.size(); ++c) {
    const RealVector x = centroid(box.point(c), level);
    for (int i = 0; i < t.order(); ++i) {
      const IntMatrix ginv = inverse_matrix(t.group().element(i));
      f.field.at(c, i) = scalar.read(cell_of(apply_point(ginv, x), level), 0);
    }
  }
  return f;
}

// max |F_i[j] - F_0[cell of g_i^{-1} x_j]|
inline double intertwining_defect(const CrystalTriple& t, const SampledVectorFunction& f) {
  double worst = 0.0;
  const IntBox& box = f.field.box;
  for (size_t c = 0; c < box.size(); ++c) {
    const RealVector x = centroid(box.point(c), f.level);
    for (int i = 1; i < t.order(); ++i) {
      const IntMatrix ginv = inverse_matrix(t.group().element(i));
      const cd expect = f.field.read(cell_of(apply_point(ginv, x), f.level), 0);
      worst = std::max(worst, std::abs(f.field.at(c, i) - expect));
    }
  }
  return worst;
}

// (SF)(x) = sum_k c_k F(2x - k) evaluated at the centroids of level n+1 cells.
inline VectorField transfer_by_points(const MatrixMask& c, const SampledVectorFunction& f, const IntBox& out) {
  VectorField g(out, f.field.r);
  for (size_t cell = 0; cell < out.size(); ++cell) {
    const RealVector x = centroid(out.point(cell), f.level + 1);
    for (const auto& [k, tap] : c.taps()) {
      const IntVector src = cell_of(2.0 * x - to_real(k), f.level);
      for (int i = 0; i < g.r; ++i) {
        for (int j = 0; j < g.r; ++j) g.at(cell, i) += tap(i, j) * f.field.read(src, j);
      }
    }
  }
  return g;
}

// Exact cell averages of sqrt(2) times the indicators of the triangle
// P = {0 <= y <= x <= 1} and of its mirror image sP.
inline SampledVectorFunction haar_triangle(int level) {
  const Int n = Int{1} << level;
  IntBox box(make_vector({0, 0}), make_vector({n, n}));
  SampledVectorFunction f{level, VectorField(box, 2), true};
  for (size_t c = 0; c < box.size(); ++c) {
    const IntVector j = box.point(c);
    const double lower = j[0] > j[1] ? 1.0 : (j[0] == j[1] ? 0.5 : 0.0);
    const double upper = j[1] > j[0] ? 1.0 : (j[0] == j[1] ? 0.5 : 0.0);
    f.field.at(c, 0) = std::sqrt(2.0) * lower;
    f.field.at(c, 1) = std::sqrt(2.0) * upper;
  }
  return f;
}

inline std::vector<IntVector> haar_pieces_translations() {
  return {make_vector({0, 0}), make_vector({1, 0}), make_vector({1, 1}), make_vector({0, 1})};
}

inline ScalarMask cm_diag_haar() {
  ScalarMask d(2);
  d.set(0, make_vector({0, 0}), 1.0);
  d.set(0, make_vector({1, 0}), 1.0);
  d.set(0, make_vector({1, 1}), 1.0);
  d.set(1, make_vector({0, 1}), 1.0);
  return d;
}

inline ScalarMask line_mask(std::initializer_list<std::pair<Int, cd>> taps) {
  ScalarMask d(1);
  for (const auto& [k, v] : taps) d.set(0, make_vector({k}), v);
  return d;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace oracle
