#include "crystal/mra.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "crystal/error.hpp"

namespace crystal {

namespace {

// Region of lattice space covered by the cells of a box.
RealBox cell_region(const CellGeometry& geom, int level, const IntBox& box) {
  const int d = geom.dimension();
  const RealMatrix inv = to_real(geom.dilation_power(level)).inverse();
  RealVector lo = RealVector::Constant(d, std::numeric_limits<double>::infinity());
  RealVector hi = -lo;
  const RealBox& q = geom.tile_box();
  for (int corner = 0; corner < (1 << d); ++corner) {
    RealVector x(d);
    for (int a = 0; a < d; ++a) {
      x[a] = (corner >> a) & 1 ? static_cast<double>(box.hi()[a] - 1) + q.hi[a] : static_cast<double>(box.lo()[a]) + q.lo[a];
    }
    const RealVector y = inv * x;
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  return {lo, hi};
}

std::vector<GroupElement> overlapping_elements(const CellGeometry& geom, const RealBox& region) {
  const PointGroup& group = geom.triple().group();
  const int d = geom.dimension();
  std::vector<GroupElement> out;
  for (int i = 0; i < group.order(); ++i) {
    // g (x + k) meets the region when k lies in g^{-1} R - R
    const RealMatrix ginv = to_real(group.element(group.inverse(i)));
    RealVector lo = RealVector::Constant(d, std::numeric_limits<double>::infinity());
    RealVector hi = -lo;
    for (int corner = 0; corner < (1 << d); ++corner) {
      RealVector x(d);
      for (int a = 0; a < d; ++a) x[a] = (corner >> a) & 1 ? region.hi[a] : region.lo[a];
      const RealVector y = ginv * x;
      lo = lo.cwiseMin(y);
      hi = hi.cwiseMax(y);
    }
    IntVector kl(d), kh(d);
    for (int a = 0; a < d; ++a) {
      kl[a] = static_cast<Int>(std::floor(lo[a] - region.hi[a])) - 1;
      kh[a] = static_cast<Int>(std::ceil(hi[a] - region.lo[a])) + 2;
    }
    const IntBox ks(kl, kh);
    for (size_t c = 0; c < ks.size(); ++c) out.push_back(GroupElement{i, ks.point(c)});
  }
  return out;
}

std::map<GroupElement, cd, GroupElementLess> gram_entries(const CellGeometry& geom, const SampledVectorFunction& f,
                                                          const std::vector<GroupElement>& gammas) {
  const PointGroup& group = geom.triple().group();
  const IntBox& box = f.field.box;
  const double vol = geom.cell_volume(f.level);
  std::map<GroupElement, cd, GroupElementLess> out;
  for (const auto& gamma : gammas) {
    const GroupElement inv = invert(gamma, group);
    cd s = 0.0;
    for (size_t c = 0; c < box.size(); ++c) {
      const cd v = f.field.at(c, 0);
      if (v == cd(0.0)) continue;
      s += f.field.read(geom.apply(inv, f.level, box.point(c)), 0) * std::conj(v);
    }
    out[gamma] = s * vol;
  }
  return out;
}

}  // namespace

OrthonormalityReport orthonormality_defect(const CellGeometry& geom, const SampledVectorFunction& f,
                                           std::optional<double> tol) {
  OrthonormalityReport rep;
  const int d = geom.dimension();
  rep.tol = tol.value_or(4.0 * std::pow(static_cast<double>(geom.m()), -static_cast<double>(f.level) / d));
  const SampledVectorFunction scalar{f.level, f.field.channel(0), false};
  const IntBox live = scalar.field.nonzero_box();
  if (live.empty()) {
    rep.defect = 1.0;
    rep.worst = GroupElement::identity(d);
    rep.ok = false;
    return rep;
  }
  const SampledVectorFunction trimmed{f.level, scalar.field.reboxed(live), false};
  const std::vector<GroupElement> gammas = overlapping_elements(geom, cell_region(geom, f.level, live));
  const auto fine = gram_entries(geom, trimmed, gammas);
  std::map<GroupElement, cd, GroupElementLess> coarse;
  if (f.level >= 1) coarse = gram_entries(geom, restrict_level(geom, trimmed), gammas);
  const GroupElement e = GroupElement::identity(d);
  for (const auto& [gamma, g] : fine) {
    const double target = gamma == e ? 1.0 : 0.0;
    const double dev = std::abs(g - target);
    if (!rep.worst || dev > rep.defect) {
      rep.defect = dev;
      rep.worst = gamma;
    }
    if (gamma == e) rep.norm_sq = g.real();
    if (!coarse.empty()) rep.quadrature_error = std::max(rep.quadrature_error, std::abs(g - coarse.at(gamma)));
  }
  rep.pairs = fine.size();
  rep.ok = rep.defect <= rep.tol;
  return rep;
}

OrthonormalityReport check_orthonormal_translates(const CellGeometry& geom, const SampledVectorFunction& f,
                                                  std::optional<double> tol) {
  OrthonormalityReport rep = orthonormality_defect(geom, f, tol);
  if (rep.quadrature_error > rep.tol) {
    throw Error(ErrorKind::GridTooCoarse, "quadrature error estimate exceeds the tolerance",
                {{"quadrature_error", rep.quadrature_error}, {"tol", rep.tol}, {"level", f.level}});
  }
  return rep;
}

DensityReport check_density_condition(const CellGeometry& geom, const SampledVectorFunction& f, double tol) {
  DensityReport rep;
  cd s = 0.0;
  for (size_t c = 0; c < f.field.box.size(); ++c) s += f.field.at(c, 0);
  rep.lhs = std::norm(s * geom.cell_volume(f.level));
  rep.rhs = geom.triple().lattice().covolume() / geom.triple().order();
  rep.ok = std::abs(rep.lhs - rep.rhs) <= tol;
  return rep;
}

namespace {

MraReport assemble(const CellGeometry& geom, const ScalarMask& d, const MatrixMask& c,
                   const SampledVectorFunction& f, const MraOptions& options, CascadeResult cascade) {
  MraReport rep;
  rep.symmetry = check_gamma_a_symmetry(c, geom.triple());
  rep.contraction = check_contraction(d, geom.triple());
  rep.orthonormality = orthonormality_defect(geom, f, options.orthonormality_tol);
  rep.density = check_density_condition(geom, f, options.density_tol);
  rep.refinability_residual = refinement_residual(geom, c, f);
  const auto& tr = cascade.trace;
  if (tr.size() >= 3) {
    rep.geometric_decay = true;
    for (size_t t = tr.size() - 2; t < tr.size(); ++t) {
      if (!(tr[t] < tr[t - 1] * 0.999)) rep.geometric_decay = false;
    }
  }
  rep.refinable = rep.refinability_residual <= options.tol || rep.geometric_decay;
  rep.cascade = std::move(cascade);
  return rep;
}

}  // namespace

MraReport check_mra(const CellGeometry& geom, const ScalarMask& d, const MraOptions& options) {
  const MatrixMask c = lift_mask(d, geom.triple());
  CascadeOptions co;
  co.level = options.level;
  co.iterations = options.iterations;
  co.tol = options.tol;
  if (options.init) {
    co.init = CascadeInit::Custom;
    co.custom = options.init;
  }
  CascadeResult cascade = cascade_solve(geom, c, co);
  const SampledVectorFunction f = cascade.solution;
  return assemble(geom, d, c, f, options, std::move(cascade));
}

MraReport check_mra(const CellGeometry& geom, const ScalarMask& d, const SampledVectorFunction& f,
                    const MraOptions& options) {
  const MatrixMask c = lift_mask(d, geom.triple());
  return assemble(geom, d, c, f, options, CascadeResult{});
}

}  // namespace crystal
