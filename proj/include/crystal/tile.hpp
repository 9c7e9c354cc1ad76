// Haar-type scaling functions from self-affine Gamma-tiles: A P is the
// measure-disjoint union of gamma_s(P) for the supplied pieces.

#pragma once

#include <optional>
#include <vector>

#include "crystal/grid.hpp"
#include "crystal/mask.hpp"

namespace crystal {

struct HaarTileResult {
  ScalarMask mask;        // d = 1 at every piece
  MatrixMask lifted;
  double defect = 0.0;    // sum |C - AP| vol / |AP| at level n-1
  double tol = 0.0;
  double measure = 0.0;   // |P|
  double expected_measure = 0.0;  // |L| / r
  double fixed_point_residual = 0.0;
  // Largest coverage mismatch (cell at level n-1, covered - expected).
  std::optional<std::pair<IntVector, double>> worst_cell;
};

// `tile` is the single-channel cell-average indicator of P at level n >= 1.
// Default tolerance 2^{-n/2}.  Throws PieceCountMismatch when the piece count
// differs from m and NotATileDecomposition when the defect exceeds tol.
HaarTileResult haar_from_tile(const CellGeometry& geom, const std::vector<GroupElement>& pieces,
                              const SampledVectorFunction& tile, std::optional<double> tol = std::nullopt);

// Occupancy raster at `level` of the attractor of { x -> A^{-1} gamma_s(x) },
// from the depth-(level + extra) point cloud.  Needs a unit-cube tile.
SampledVectorFunction tile_from_pieces(const CellGeometry& geom, const std::vector<GroupElement>& pieces,
                                       int level, int extra = 3);

}  // namespace crystal
