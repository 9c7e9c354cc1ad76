// Attractors of the IFS { x -> A^{-1}(x + k) : k in support }.

#pragma once

#include <optional>
#include <vector>

#include "crystal/grid.hpp"

namespace crystal {

struct AttractorEstimate {
  int depth = 0;
  // K_n = { sum_{t=1..n} A^{-t} k_t }, stored exactly as A^{-n} J.
  std::vector<IntVector> numerators;
  std::vector<RealVector> points;
  double support_radius = 0.0;  // max |k| * sum_t ||A^{-t}||
  RealBox bbox;
  // Present when |support| = m.  Half the mean of |coverage - 1| over the
  // classes of level-n cells modulo Lambda, where coverage counts occupied
  // cells; miscovered is the fraction of classes with coverage != 1.
  std::optional<double> tiling_defect;
  std::optional<double> miscovered_fraction;
  int raster_level = 0;
};

struct AttractorOptions {
  int depth = 8;
  // Occupancy raster level for the tiling test; default depth - depth/2.
  std::optional<int> raster_level;
  size_t max_points = size_t{1} << 22;
};

AttractorEstimate attractor_estimate(const IntMatrix& a, const std::vector<IntVector>& support,
                                     const AttractorOptions& options);

// Symmetric Hausdorff distance between two finite point sets.
double hausdorff_distance(const std::vector<RealVector>& a, const std::vector<RealVector>& b);

}  // namespace crystal
