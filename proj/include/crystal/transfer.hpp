// Transfer operator S F(x) = sum_k c_k F(A x - k) on cell-average grids, and
// the cascade iteration built on it.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crystal/grid.hpp"
#include "crystal/mask.hpp"

namespace crystal {

// Level n -> n+1.  When `target` is given, any non-zero output outside it
// raises GridTooSmall with the required box in the witness.
SampledVectorFunction apply_transfer(const CellGeometry& geom, const MatrixMask& c,
                                     const SampledVectorFunction& f,
                                     const std::optional<IntBox>& target = std::nullopt);

// ||R(S F) - F||, R = restriction back to the level of F.
double refinement_residual(const CellGeometry& geom, const MatrixMask& c, const SampledVectorFunction& f);

enum class CascadeInit { Tile, Custom };

// Normalized indicator of the digit tile at `level`, spread over components
// as F_i = f o g_i^{-1}.  The scale gives |phi^(0)|^2 = |L| / r.
SampledVectorFunction tile_init(const CellGeometry& geom, int level);

struct CascadeOptions {
  int level = 8;       // level of the returned function
  int iterations = 8;  // start level is level - iterations
  double tol = 1e-10;
  CascadeInit init = CascadeInit::Tile;
  // Used with CascadeInit::Custom; its level fixes the iteration count.
  std::optional<SampledVectorFunction> custom;
  std::optional<IntBox> box;  // optional bound on every iterate
};

struct CascadeResult {
  SampledVectorFunction solution;
  std::vector<double> trace;  // ||R F_{t+1} - F_t|| per step
  bool converged = false;
  int converged_at = -1;
  bool non_convergent = false;
  double residual = 0.0;
  std::vector<std::string> warnings;
};

CascadeResult cascade_solve(const CellGeometry& geom, const MatrixMask& c, const CascadeOptions& options);

}  // namespace crystal
