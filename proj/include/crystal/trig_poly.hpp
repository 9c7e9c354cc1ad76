// Matrix trigonometric polynomials: symbols M_l, polyphase components u_lh,
// the modulation matrix and unitarity defects.  Frequencies are in dual
// lattice coordinates, so A* acts as A^T and Lambda* is Z^d.

#pragma once

#include <map>
#include <vector>

#include "crystal/grid.hpp"
#include "crystal/mask.hpp"

namespace crystal {

class TrigMatrixPolynomial {
 public:
  TrigMatrixPolynomial(int dimension = 0, int rows = 0, int cols = 0, cd normalization = 1.0)
      : dimension_(dimension), rows_(rows), cols_(cols), normalization_(normalization) {}

  int dimension() const { return dimension_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  cd normalization() const { return normalization_; }
  const std::map<IntVector, ComplexMatrix, IntVectorLess>& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  void add(const IntVector& k, const ComplexMatrix& value);
  // normalization * sum_k coeff_k exp(-2 pi i k.omega)
  ComplexMatrix evaluate(const RealVector& omega) const;

 private:
  int dimension_;
  int rows_;
  int cols_;
  cd normalization_;
  std::map<IntVector, ComplexMatrix, IntVectorLess> coeffs_;
};

class FrequencyGrid {
 public:
  FrequencyGrid(int dimension, int resolution);

  int dimension() const { return dimension_; }
  int resolution() const { return resolution_; }
  size_t size() const { return points_.size(); }
  const std::vector<RealVector>& points() const { return points_; }

 private:
  int dimension_;
  int resolution_;
  std::vector<RealVector> points_;
};

// M_0 = (1/m) sum_k c_k e^{-2 pi i k.omega}
TrigMatrixPolynomial symbol_from_mask(const MatrixMask& c, const CrystalTriple& triple);

// Alternative lift c_k[i][j] = d(g_i^{-1} g_j, g_j^{-1} k), without the
// conjugation by A.  It coincides with lift_mask when h is the identity.
MatrixMask sigma_lift(const ScalarMask& d, const CrystalTriple& triple);

// u_h has coefficient c_{A k + d_h} at k and normalization m^{-1/2}.
std::vector<TrigMatrixPolynomial> polyphase(const MatrixMask& c, const CrystalTriple& triple);

// sum_h m^{-1/2} e^{-2 pi i d_h.omega} u_h(A^T omega)
ComplexMatrix reassemble_symbol(const std::vector<TrigMatrixPolynomial>& u, const CrystalTriple& triple,
                                const RealVector& omega);

// Block (i, j) = M_i(omega + A^{-T} rho_j).  Accepts fewer than m symbols
// (a block row per symbol).
ComplexMatrix modulation_matrix(const std::vector<TrigMatrixPolynomial>& symbols, const CrystalTriple& triple,
                                const RealVector& omega);

// Block (l, h) = u_lh(omega).
ComplexMatrix polyphase_matrix(const std::vector<std::vector<TrigMatrixPolynomial>>& u, const RealVector& omega);

// max |X X* - I| entrywise; for a wide X this is the row-orthonormality defect.
double unitarity_defect(const ComplexMatrix& x);

struct DefectSweep {
  double max_defect = 0.0;
  RealVector argmax;
  std::vector<std::pair<RealVector, double>> samples;
};

DefectSweep modulation_defect(const std::vector<TrigMatrixPolynomial>& symbols, const CrystalTriple& triple,
                              const FrequencyGrid& grid);
DefectSweep polyphase_defect(const std::vector<std::vector<TrigMatrixPolynomial>>& u, const FrequencyGrid& grid);

// Centroid Riemann sum of sum_cells F[j] vol exp(-2 pi i xi.x_j).
ComplexVector sampled_fourier(const CellGeometry& geom, const SampledVectorFunction& f, const RealVector& xi);

struct TwoScaleReport {
  double max_error = 0.0;  // max |F^(A^T w) - M_0(w) F^(w)|
  RealVector argmax;
  double scale = 0.0;      // max |F^(A^T w)| over the probes
};

TwoScaleReport two_scale_defect(const CellGeometry& geom, const SampledVectorFunction& f,
                                const TrigMatrixPolynomial& symbol, const std::vector<RealVector>& probes);

}  // namespace crystal
