#include <cmath>

#include "crystal/error.hpp"
#include "crystal/group.hpp"
#include "crystal/intmath.hpp"

namespace crystal {

namespace {

constexpr double kEigenTolerance = 1e-9;

nlohmann::json to_json_matrix(const IntMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

bool divisible(const IntVector& v, Int det) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] % det != 0) return false;
  }
  return true;
}

}  // namespace

bool is_expanding(const IntMatrix& a) {
  const RealMatrix ar = to_real(a);
  Eigen::EigenSolver<RealMatrix> eig(ar, false);
  const double min_modulus = eig.eigenvalues().cwiseAbs().minCoeff();
  if (!(min_modulus > 1.0 + kEigenTolerance)) return false;
  // Cross-check: ||A^{-n}|| must decay.
  RealMatrix inv = ar.inverse();
  RealMatrix power = RealMatrix::Identity(a.rows(), a.cols());
  for (int n = 0; n < 64; ++n) power = power * inv;
  return power.norm() < 1.0;
}

std::vector<IntVector> digit_representatives(const IntMatrix& a) {
  const Int det = determinant(a);
  const Int m = det < 0 ? -det : det;
  if (m < 2) {
    throw Error(ErrorKind::InvalidInput, "|det A| must be at least 2", {{"det", det}});
  }
  const IntMatrix adj = adjugate(a);
  const Eigen::Index d = a.rows();
  // m Z^d lies in A Z^d, so the box [0, m-1]^d meets every coset.
  std::vector<IntVector> digits;
  std::vector<IntVector> keys;
  IntVector p = IntVector::Zero(d);
  Int visited = 0;
  while (true) {
    IntVector key = adj * p;
    for (Eigen::Index i = 0; i < d; ++i) key[i] = ((key[i] % m) + m) % m;
    bool fresh = true;
    for (const auto& k : keys) {
      if (k == key) {
        fresh = false;
        break;
      }
    }
    if (fresh) {
      digits.push_back(p);
      keys.push_back(key);
      if (static_cast<Int>(digits.size()) == m) return digits;
    }
    ++visited;
    Eigen::Index axis = 0;
    while (axis < d) {
      if (++p[axis] < m) break;
      p[axis] = 0;
      ++axis;
    }
    if (axis == d) break;
  }
  throw Error(ErrorKind::DigitSearchFailed, "digit search box exhausted",
              {{"box_lo", 0}, {"box_hi", m - 1}, {"found", digits.size()}, {"visited", visited}});
}

int Dilation::coset_of(const IntVector& k) const {
  const Int md = det < 0 ? -det : det;
  for (size_t h = 0; h < digits.size(); ++h) {
    IntVector diff = adjugate * (k - digits[h]);
    if (divisible(diff, md)) return static_cast<int>(h);
  }
  throw Error(ErrorKind::DigitSearchFailed, "vector not covered by digit set");
}

IntVector Dilation::coset_quotient(const IntVector& k, int coset) const {
  IntVector diff = adjugate * (k - digits[static_cast<size_t>(coset)]);
  return diff / det;
}

Dilation check_admissible(const IntMatrix& a, const CrystalTriple& triple) {
  const int d = triple.dimension();
  if (a.rows() != d || a.cols() != d) {
    throw Error(ErrorKind::DimensionMismatch, "dilation has wrong shape",
                {{"expected", d}, {"rows", a.rows()}, {"cols", a.cols()}});
  }
  if (!is_expanding(a)) {
    const RealMatrix ar = to_real(a);
    Eigen::EigenSolver<RealMatrix> eig(ar, false);
    throw Error(ErrorKind::NotExpanding, "dilation is not expanding",
                {{"matrix", to_json_matrix(a)},
                 {"min_eigenvalue_modulus", eig.eigenvalues().cwiseAbs().minCoeff()}});
  }
  Dilation dil;
  dil.matrix = a;
  dil.det = determinant(a);
  dil.m = static_cast<int>(dil.det < 0 ? -dil.det : dil.det);
  dil.adjugate = adjugate(a);
  const PointGroup& group = triple.group();
  for (int i = 0; i < group.order(); ++i) {
    // A g A^{-1} = (A g adj(A)) / det
    const IntMatrix scaled = a * group.element(i) * dil.adjugate;
    bool integral = true;
    for (Eigen::Index t = 0; t < scaled.size(); ++t) {
      if (scaled.data()[t] % dil.det != 0) integral = false;
    }
    std::optional<int> idx;
    if (integral) idx = group.find(IntMatrix(scaled / dil.det));
    if (!idx) {
      throw Error(ErrorKind::NotNormalizing, "A g A^{-1} is not in the point group",
                  {{"element", i},
                   {"g", to_json_matrix(group.element(i))},
                   {"integral", integral},
                   {"conjugate_times_det", to_json_matrix(scaled)},
                   {"det", dil.det}});
    }
    dil.h.push_back(*idx);
  }
  dil.digits = digit_representatives(a);
  dil.dual_digits = digit_representatives(IntMatrix(a.transpose()));
  return dil;
}

Permutations perms(const Dilation& dilation, const PointGroup& group) {
  const int r = group.order();
  Permutations p;
  p.h = dilation.h;
  p.rho.assign(static_cast<size_t>(r), std::vector<int>(static_cast<size_t>(r)));
  p.sigma = p.rho;
  p.s = p.rho;
  for (int i = 0; i < r; ++i) {
    const int hi = dilation.h[static_cast<size_t>(i)];
    for (int j = 0; j < r; ++j) {
      p.rho[static_cast<size_t>(i)][static_cast<size_t>(j)] = group.product(group.inverse(hi), j);
      p.sigma[static_cast<size_t>(i)][static_cast<size_t>(j)] = group.product(i, j);
      p.s[static_cast<size_t>(i)][static_cast<size_t>(j)] = group.product(hi, j);
    }
  }
  return p;
}

}  // namespace crystal
