#include "crystal/attractor.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "crystal/error.hpp"
#include "crystal/intmath.hpp"

namespace crystal {

namespace {

Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Int pos_mod(Int a, Int b) {
  const Int r = a % b;
  return r < 0 ? r + std::abs(b) : r;
}

}  // namespace

AttractorEstimate attractor_estimate(const IntMatrix& a, const std::vector<IntVector>& support,
                                     const AttractorOptions& options) {
  if (support.empty()) throw Error(ErrorKind::InvalidInput, "attractor needs a nonempty support");
  if (options.depth < 1) throw Error(ErrorKind::InvalidInput, "attractor depth must be positive");
  const int d = static_cast<int>(a.rows());
  const Int det = determinant(a);
  const int m = static_cast<int>(std::abs(det));

  const double count = std::pow(static_cast<double>(support.size()), options.depth);
  if (count > static_cast<double>(options.max_points)) {
    throw Error(ErrorKind::CombinatorialBlowup, "attractor point cloud exceeds the point budget",
                {{"points", count}, {"budget", options.max_points}});
  }

  AttractorEstimate est;
  est.depth = options.depth;
  // J_n = A J_{n-1} + support, points A^{-n} J_n
  std::vector<IntVector> level{IntVector::Zero(d)};
  for (int t = 0; t < options.depth; ++t) {
    std::vector<IntVector> next;
    next.reserve(level.size() * support.size());
    for (const auto& j : level) {
      const IntVector aj = a * j;
      for (const auto& k : support) next.push_back(aj + k);
    }
    level = std::move(next);
  }
  const RealMatrix an_inv = to_real(matrix_power(a, options.depth)).inverse();
  est.points.reserve(level.size());
  for (const auto& j : level) est.points.push_back(an_inv * to_real(j));
  est.numerators = std::move(level);

  const RealMatrix inv = to_real(a).inverse();
  double kmax = 0.0;
  for (const auto& k : support) kmax = std::max(kmax, to_real(k).norm());
  double series = 0.0;
  RealMatrix power = inv;
  for (int t = 0; t < 4000; ++t) {
    const double nrm = power.operatorNorm();
    series += nrm;
    if (nrm < 1e-17) break;
    power = power * inv;
  }
  est.support_radius = kmax * series;
  est.bbox = ifs_bounding_box(a, support);

  if (static_cast<int>(support.size()) == m) {
    const int raster = options.raster_level.value_or(options.depth - options.depth / 2);
    if (raster < 0 || raster > options.depth) {
      throw Error(ErrorKind::InvalidInput, "raster level must lie in [0, depth]", {{"raster_level", raster}});
    }
    est.raster_level = raster;
    const int s = options.depth - raster;
    // Occupied unit cells of A^raster K: floor(A^{-s} J).
    const IntMatrix as = matrix_power(a, s);
    const IntMatrix as_adj = adjugate(as);
    const Int as_det = determinant(as);
    std::set<IntVector, IntVectorLess> occupied;
    for (const auto& j : est.numerators) {
      const IntVector num = as_adj * j;
      IntVector cell(d);
      for (int i = 0; i < d; ++i) cell[i] = floor_div(num[i], as_det);
      occupied.insert(cell);
    }
    // Classes of cells modulo A^raster Z^d, keyed by adj(A^n) j mod det.
    const IntMatrix an = matrix_power(a, raster);
    const IntMatrix an_adj = adjugate(an);
    const Int an_det = std::abs(determinant(an));
    std::map<IntVector, int, IntVectorLess> coverage;
    for (const auto& cell : occupied) {
      IntVector key = an_adj * cell;
      for (int i = 0; i < d; ++i) key[i] = pos_mod(key[i], an_det);
      ++coverage[key];
    }
    const double classes = static_cast<double>(an_det);
    double total = classes - static_cast<double>(coverage.size());
    double wrong = total;
    for (const auto& [key, count_in_class] : coverage) {
      total += std::abs(count_in_class - 1);
      if (count_in_class != 1) wrong += 1.0;
    }
    est.tiling_defect = 0.5 * total / classes;
    est.miscovered_fraction = wrong / classes;
  }
  return est;
}

double hausdorff_distance(const std::vector<RealVector>& a, const std::vector<RealVector>& b) {
  auto directed = [](const std::vector<RealVector>& from, const std::vector<RealVector>& to) {
    double worst = 0.0;
    for (const auto& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : to) best = std::min(best, (x - y).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace crystal
