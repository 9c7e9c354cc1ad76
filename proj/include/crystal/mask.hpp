// Scalar Gamma-refinement masks and their r x r matrix lifts.

#pragma once

#include <map>
#include <optional>
#include <tuple>

#include "crystal/group.hpp"

namespace crystal {

// Finitely supported d_gamma, keyed by gamma = (point index, translation).
class ScalarMask {
 public:
  explicit ScalarMask(int dimension = 0) : dimension_(dimension) {}

  int dimension() const { return dimension_; }
  // Zero values erase the entry.
  void set(const GroupElement& gamma, cd value);
  void set(int point, const IntVector& k, cd value) { set(GroupElement{point, k}, value); }
  cd get(const GroupElement& gamma) const;
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  const std::map<GroupElement, cd, GroupElementLess>& entries() const { return entries_; }

  ScalarMask scaled(cd factor) const;
  double sum_squares() const;

 private:
  int dimension_;
  std::map<GroupElement, cd, GroupElementLess> entries_;
};

class MatrixMask {
 public:
  MatrixMask(int dimension = 0, int r = 0) : dimension_(dimension), r_(r) {}

  int dimension() const { return dimension_; }
  int r() const { return r_; }
  bool empty() const { return taps_.empty(); }
  size_t size() const { return taps_.size(); }

  // Returns the tap at k (a zero matrix when absent).
  ComplexMatrix tap(const IntVector& k) const;
  const ComplexMatrix* find(const IntVector& k) const;
  ComplexMatrix& tap_ref(const IntVector& k);
  void set_tap(const IntVector& k, ComplexMatrix value);
  // Drops taps whose entries are all exactly zero.
  void prune();

  std::vector<IntVector> support() const;
  const std::map<IntVector, ComplexMatrix, IntVectorLess>& taps() const { return taps_; }

  bool symmetric() const { return symmetric_; }
  void set_symmetric(bool flag) { symmetric_ = flag; }

 private:
  int dimension_;
  int r_;
  std::map<IntVector, ComplexMatrix, IntVectorLess> taps_;
  bool symmetric_ = false;
};

struct SymmetryReport {
  bool ok = true;
  double max_violation = 0.0;
  // (i, j, k) of the largest violation
  std::optional<std::tuple<int, int, IntVector>> witness;
};

struct ContractionReport {
  double sum_sq = 0.0;
  int m = 0;
  bool strict = true;
};

// c_k[i][j] = d at (g_{h_i}^{-1} g_j, g_j^{-1} k).
MatrixMask lift_mask(const ScalarMask& d, const CrystalTriple& triple);

// c^k_{i,j} = c^{g_{h_i}^{-1} k}_{1, rho_i(j)} over the support and its images.
SymmetryReport check_gamma_a_symmetry(const MatrixMask& c, const CrystalTriple& triple,
                                      double tol = 1e-12);

// d_(g_i, l) = c^{g_i l}_{1,i}.  Throws NotSymmetric when the check fails.
ScalarMask extract_scalar(const MatrixMask& c, const CrystalTriple& triple, double tol = 1e-12);

ContractionReport check_contraction(const ScalarMask& d, const CrystalTriple& triple);

}  // namespace crystal
