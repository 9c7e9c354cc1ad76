// Basic numeric aliases shared by every crystalwave module.
//
// Lattice quantities are stored in lattice coordinates, where the
// translation lattice is Z^d and every point-group element is an
// integer matrix.  Ambient coordinates are obtained through the basis.

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace crystal {

using Int = std::int64_t;
using cd = std::complex<double>;

using IntVector = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Strict weak order on integer vectors: shorter first, then lexicographic.
struct IntVectorLess {
  bool operator()(const IntVector& a, const IntVector& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  }
};

inline RealVector to_real(const IntVector& v) { return v.cast<double>(); }
inline RealMatrix to_real(const IntMatrix& m) { return m.cast<double>(); }

inline IntVector zero_vector(int d) { return IntVector::Zero(d); }

inline IntVector make_vector(std::initializer_list<Int> values) {
  IntVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (Int x : values) v[i++] = x;
  return v;
}

inline IntMatrix make_matrix(std::initializer_list<std::initializer_list<Int>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto c = n == 0 ? 0 : static_cast<Eigen::Index>(rows.begin()->size());
  IntMatrix m(n, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (Int x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

}  // namespace crystal
