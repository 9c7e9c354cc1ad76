// Checks that a sampled scaling function generates a crystal MRA.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crystal/grid.hpp"
#include "crystal/mask.hpp"
#include "crystal/transfer.hpp"

namespace crystal {

struct OrthonormalityReport {
  double defect = 0.0;             // max |<phi o gamma^{-1}, phi> - delta|
  double quadrature_error = 0.0;   // max |G_n - G_{n-1}| over the same gammas
  double norm_sq = 0.0;
  double tol = 0.0;
  size_t pairs = 0;
  std::optional<GroupElement> worst;
  bool ok = false;                 // defect <= tol
};

// Gram entries use component 0 of `f`.  Auto tolerance is 4 m^{-n/d}.
// Throws GridTooCoarse when the quadrature estimate exceeds the tolerance.
OrthonormalityReport check_orthonormal_translates(const CellGeometry& geom, const SampledVectorFunction& f,
                                                  std::optional<double> tol = std::nullopt);
// Same computation without the GridTooCoarse exception.
OrthonormalityReport orthonormality_defect(const CellGeometry& geom, const SampledVectorFunction& f,
                                           std::optional<double> tol = std::nullopt);

struct DensityReport {
  double lhs = 0.0;  // |phi^(0)|^2
  double rhs = 0.0;  // |L| / r
  bool ok = false;
};

DensityReport check_density_condition(const CellGeometry& geom, const SampledVectorFunction& f,
                                      double tol = 1e-6);

struct MraOptions {
  int level = 8;
  int iterations = 8;
  double tol = 1e-10;
  std::optional<SampledVectorFunction> init;
  std::optional<double> orthonormality_tol;
  double density_tol = 1e-6;
};

struct MraReport {
  OrthonormalityReport orthonormality;
  double refinability_residual = 0.0;
  bool geometric_decay = false;
  bool refinable = false;
  SymmetryReport symmetry;
  DensityReport density;
  ContractionReport contraction;
  CascadeResult cascade;
  bool ok() const {
    return orthonormality.ok && refinable && symmetry.ok && density.ok;
  }
};

MraReport check_mra(const CellGeometry& geom, const ScalarMask& d, const MraOptions& options);
// Sampled candidate together with the mask it is meant to satisfy.
MraReport check_mra(const CellGeometry& geom, const ScalarMask& d, const SampledVectorFunction& f,
                    const MraOptions& options);

}  // namespace crystal
