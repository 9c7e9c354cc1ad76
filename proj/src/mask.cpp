#include "crystal/mask.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "crystal/error.hpp"

namespace crystal {

void ScalarMask::set(const GroupElement& gamma, cd value) {
  if (value == cd(0.0)) {
    entries_.erase(gamma);
    return;
  }
  entries_[gamma] = value;
}

cd ScalarMask::get(const GroupElement& gamma) const {
  auto it = entries_.find(gamma);
  return it == entries_.end() ? cd(0.0) : it->second;
}

ScalarMask ScalarMask::scaled(cd factor) const {
  ScalarMask out(dimension_);
  for (const auto& [gamma, v] : entries_) out.set(gamma, v * factor);
  return out;
}

double ScalarMask::sum_squares() const {
  double s = 0.0;
  for (const auto& [gamma, v] : entries_) s += std::norm(v);
  return s;
}

ComplexMatrix MatrixMask::tap(const IntVector& k) const {
  auto it = taps_.find(k);
  if (it == taps_.end()) return ComplexMatrix::Zero(r_, r_);
  return it->second;
}

const ComplexMatrix* MatrixMask::find(const IntVector& k) const {
  auto it = taps_.find(k);
  return it == taps_.end() ? nullptr : &it->second;
}

ComplexMatrix& MatrixMask::tap_ref(const IntVector& k) {
  auto it = taps_.find(k);
  if (it == taps_.end()) it = taps_.emplace(k, ComplexMatrix::Zero(r_, r_)).first;
  return it->second;
}

void MatrixMask::set_tap(const IntVector& k, ComplexMatrix value) {
  if (value.rows() != r_ || value.cols() != r_) {
    throw Error(ErrorKind::DimensionMismatch, "matrix tap has wrong size",
                {{"expected", r_}, {"rows", value.rows()}, {"cols", value.cols()}});
  }
  taps_[k] = std::move(value);
}

void MatrixMask::prune() {
  for (auto it = taps_.begin(); it != taps_.end();) {
    if (it->second.cwiseAbs().maxCoeff() == 0.0) {
      it = taps_.erase(it);
    } else {
      ++it;
    }
  }
}

std::vector<IntVector> MatrixMask::support() const {
  std::vector<IntVector> out;
  out.reserve(taps_.size());
  for (const auto& [k, c] : taps_) out.push_back(k);
  return out;
}

MatrixMask lift_mask(const ScalarMask& d, const CrystalTriple& triple) {
  const PointGroup& group = triple.group();
  const Permutations& p = triple.permutations();
  const int r = group.order();
  MatrixMask c(triple.dimension(), r);
  // For fixed row i, (p, t) -> (j = s_i(p), k = g_j t) is a bijection, so
  // each scalar entry lands once per row.
  for (int i = 0; i < r; ++i) {
    for (const auto& [gamma, v] : d.entries()) {
      const int j = p.s[static_cast<size_t>(i)][static_cast<size_t>(gamma.point)];
      const IntVector k = group.element(j) * gamma.translation;
      c.tap_ref(k)(i, j) = v;
    }
  }
  c.set_symmetric(true);
  return c;
}

SymmetryReport check_gamma_a_symmetry(const MatrixMask& c, const CrystalTriple& triple, double tol) {
  const PointGroup& group = triple.group();
  const Permutations& p = triple.permutations();
  const int r = group.order();
  SymmetryReport report;
  if (c.r() != r) {
    report.ok = false;
    report.max_violation = std::numeric_limits<double>::infinity();
    return report;
  }
  std::set<IntVector, IntVectorLess> keys;
  for (const auto& [k, m] : c.taps()) {
    keys.insert(k);
    for (int i = 0; i < r; ++i) keys.insert(group.element(p.h[static_cast<size_t>(i)]) * k);
  }
  for (const IntVector& k : keys) {
    const ComplexMatrix* lhs = c.find(k);
    for (int i = 0; i < r; ++i) {
      const int hi = p.h[static_cast<size_t>(i)];
      const IntVector kk = group.element(group.inverse(hi)) * k;
      const ComplexMatrix* rhs = c.find(kk);
      for (int j = 0; j < r; ++j) {
        const cd a = lhs ? (*lhs)(i, j) : cd(0.0);
        const cd b = rhs ? (*rhs)(0, p.rho[static_cast<size_t>(i)][static_cast<size_t>(j)]) : cd(0.0);
        const double v = std::abs(a - b);
        if (v > report.max_violation) {
          report.max_violation = v;
          report.witness = std::make_tuple(i, j, k);
        }
      }
    }
  }
  report.ok = report.max_violation <= tol;
  return report;
}

ScalarMask extract_scalar(const MatrixMask& c, const CrystalTriple& triple, double tol) {
  const SymmetryReport sym = check_gamma_a_symmetry(c, triple, tol);
  if (!sym.ok) {
    nlohmann::json w = {{"max_violation", sym.max_violation}};
    if (sym.witness) {
      const auto& [i, j, k] = *sym.witness;
      w["i"] = i;
      w["j"] = j;
      w["k"] = std::vector<Int>(k.data(), k.data() + k.size());
    }
    throw Error(ErrorKind::NotSymmetric, "matrix mask lacks (Gamma,a)-symmetry", w);
  }
  const PointGroup& group = triple.group();
  ScalarMask d(triple.dimension());
  for (const auto& [k, m] : c.taps()) {
    for (int p = 0; p < group.order(); ++p) {
      const cd v = m(0, p);
      if (v != cd(0.0)) d.set(p, IntVector(group.element(group.inverse(p)) * k), v);
    }
  }
  return d;
}

ContractionReport check_contraction(const ScalarMask& d, const CrystalTriple& triple) {
  ContractionReport out;
  out.sum_sq = d.sum_squares();
  out.m = triple.dilation().m;
  out.strict = out.sum_sq < static_cast<double>(out.m);
  return out;
}

}  // namespace crystal
