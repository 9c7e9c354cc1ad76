#include "crystal/intmath.hpp"

#include <stdexcept>
#include <utility>

namespace crystal {

Int determinant(const IntMatrix& a) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  if (n == 0) return 1;
  IntMatrix m = a;
  Int sign = 1;
  Int prev = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      Eigen::Index swap = k + 1;
      while (swap < n && m(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      m.row(k).swap(m.row(swap));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
      }
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

IntMatrix adjugate(const IntMatrix& a) {
  const Eigen::Index n = a.rows();
  IntMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  IntMatrix minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = a(r, c);
        }
        ++mr;
      }
      const Int cof = ((i + j) % 2 == 0 ? 1 : -1) * determinant(minor);
      adj(j, i) = cof;
    }
  }
  return adj;
}

std::optional<IntMatrix> integer_inverse(const IntMatrix& a) {
  const Int det = determinant(a);
  if (det == 0) return std::nullopt;
  IntMatrix adj = adjugate(a);
  for (Eigen::Index i = 0; i < adj.size(); ++i) {
    if (adj.data()[i] % det != 0) return std::nullopt;
  }
  return IntMatrix(adj / det);
}

std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b) {
  const Int det = determinant(a);
  if (det == 0) return std::nullopt;
  IntVector x = adjugate(a) * b;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] % det != 0) return std::nullopt;
  }
  return IntVector(x / det);
}

bool congruent_mod(const IntMatrix& a, const IntVector& u, const IntVector& v) {
  return solve_integer(a, u - v).has_value();
}

IntMatrix matrix_power(const IntMatrix& a, int n) {
  IntMatrix result = IntMatrix::Identity(a.rows(), a.cols());
  IntMatrix base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

bool is_identity(const IntMatrix& a) {
  return a.rows() == a.cols() && a == IntMatrix::Identity(a.rows(), a.cols());
}

}  // namespace crystal
