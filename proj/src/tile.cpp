#include "crystal/tile.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "crystal/error.hpp"
#include "crystal/transfer.hpp"

namespace crystal {

HaarTileResult haar_from_tile(const CellGeometry& geom, const std::vector<GroupElement>& pieces,
                              const SampledVectorFunction& tile, std::optional<double> tol) {
  const CrystalTriple& triple = geom.triple();
  const int m = geom.m();
  const int d = geom.dimension();
  if (static_cast<int>(pieces.size()) != m) {
    throw Error(ErrorKind::PieceCountMismatch, "number of pieces must equal |det A|",
                {{"pieces", pieces.size()}, {"m", m}});
  }
  if (tile.field.r != 1) throw Error(ErrorKind::DimensionMismatch, "tile must be a single-channel field");
  if (tile.level < 1) throw Error(ErrorKind::InvalidInput, "tile level must be at least 1");
  for (const auto& g : pieces) {
    if (g.point < 0 || g.point >= triple.order() || g.translation.size() != d) {
      throw Error(ErrorKind::InvalidInput, "piece is not an element of the crystal group", {{"point", g.point}});
    }
  }

  HaarTileResult out;
  out.tol = tol.value_or(std::pow(2.0, -tile.level / 2.0));
  const int coarse_level = tile.level - 1;
  const SampledVectorFunction coarse = restrict_level(geom, tile);
  out.measure = std::real(std::accumulate(tile.field.values.begin(), tile.field.values.end(), cd(0.0))) *
                geom.cell_volume(tile.level);
  out.expected_measure = triple.lattice().covolume() / triple.order();

  // On level n-1 cells, chi_{AP} has the level-n averages of chi_P and
  // chi_{gamma P} reads chi_P at gamma^{-1}(cell).
  const PointGroup& group = triple.group();
  IntBox box = tile.field.box;
  std::vector<GroupElement> inverses;
  for (const auto& g : pieces) {
    const GroupElement gi = invert(g, group);
    inverses.push_back(gi);
    const IntBox& cb = coarse.field.box;
    for (int corner = 0; corner < (1 << d); ++corner) {
      IntVector x(d);
      for (int a = 0; a < d; ++a) x[a] = (corner >> a) & 1 ? cb.hi()[a] - 1 : cb.lo()[a];
      box = box.including(geom.apply(g, coarse_level, x));
    }
  }
  double mismatch = 0.0;
  double worst = 0.0;
  for (size_t c = 0; c < box.size(); ++c) {
    const IntVector j = box.point(c);
    double covered = 0.0;
    for (const auto& gi : inverses) covered += coarse.field.read(geom.apply(gi, coarse_level, j), 0).real();
    const double diff = covered - tile.field.read(j, 0).real();
    mismatch += std::abs(diff);
    if (std::abs(diff) > worst) {
      worst = std::abs(diff);
      out.worst_cell = std::make_pair(j, diff);
    }
  }
  const double amass = static_cast<double>(m) * out.measure;
  out.defect = amass > 0.0 ? mismatch * geom.cell_volume(coarse_level) / amass
                           : std::numeric_limits<double>::infinity();

  if (!(out.defect <= out.tol)) {
    nlohmann::json w = {{"defect", out.defect}, {"tol", out.tol}, {"level", coarse_level}};
    if (out.worst_cell) {
      const IntVector& j = out.worst_cell->first;
      w["worst_cell"] = std::vector<Int>(j.data(), j.data() + j.size());
      w["worst_mismatch"] = out.worst_cell->second;
    }
    throw Error(ErrorKind::NotATileDecomposition, "pieces do not decompose A P", w);
  }

  out.mask = ScalarMask(d);
  for (const auto& g : pieces) out.mask.set(g, 1.0);
  out.lifted = lift_mask(out.mask, triple);

  SampledVectorFunction phi = tile;
  for (auto& v : phi.field.values) v /= std::sqrt(out.measure);
  const SampledVectorFunction f = intertwine(geom, phi);
  out.fixed_point_residual = refinement_residual(geom, out.lifted, f);
  return out;
}

SampledVectorFunction tile_from_pieces(const CellGeometry& geom, const std::vector<GroupElement>& pieces,
                                       int level, int extra) {
  if (!geom.unit_cube_tile()) {
    throw Error(ErrorKind::InvalidInput, "IFS rasterization needs a diagonal dilation with standard digits");
  }
  const CrystalTriple& triple = geom.triple();
  const int d = geom.dimension();
  const RealMatrix inv = to_real(triple.dilation().matrix).inverse();
  const int depth = level + extra;
  if (std::pow(static_cast<double>(pieces.size()), depth) > 1 << 24) {
    throw Error(ErrorKind::CombinatorialBlowup, "IFS raster depth too large", {{"depth", depth}});
  }
  // x -> A^{-1} g (x + k), iterated from the origin
  std::vector<RealVector> pts{RealVector::Zero(d)};
  for (int t = 0; t < depth; ++t) {
    std::vector<RealVector> next;
    next.reserve(pts.size() * pieces.size());
    for (const auto& x : pts) {
      for (const auto& g : pieces) next.push_back(act(g, x, triple));
    }
    for (auto& x : next) x = inv * x;
    pts = std::move(next);
  }
  const RealMatrix an = to_real(geom.dilation_power(level));
  std::set<IntVector, IntVectorLess> cells;
  for (const auto& x : pts) {
    const RealVector y = an * x;
    IntVector j(d);
    for (int a = 0; a < d; ++a) j[a] = static_cast<Int>(std::floor(y[a] + 1e-12));
    cells.insert(j);
  }
  IntBox box = IntBox::empty(d);
  for (const auto& j : cells) box = box.including(j);
  SampledVectorFunction out{level, VectorField(box, 1), false};
  for (const auto& j : cells) out.field.at(box.index(j), 0) = 1.0;
  return out;
}

}  // namespace crystal
