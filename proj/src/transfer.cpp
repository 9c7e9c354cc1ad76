#include "crystal/transfer.hpp"

#include <cmath>
#include <set>

#include "crystal/error.hpp"

namespace crystal {

namespace {

nlohmann::json box_json(const IntBox& b) {
  return {{"lo", std::vector<Int>(b.lo().data(), b.lo().data() + b.lo().size())},
          {"hi", std::vector<Int>(b.hi().data(), b.hi().data() + b.hi().size())}};
}

}  // namespace

SampledVectorFunction apply_transfer(const CellGeometry& geom, const MatrixMask& c,
                                     const SampledVectorFunction& f, const std::optional<IntBox>& target) {
  const int r = f.field.r;
  if (c.r() != r && !c.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "mask size does not match the number of components",
                {{"mask_r", c.r()}, {"function_r", r}});
  }
  const int d = geom.dimension();
  const IntMatrix an = geom.dilation_power(f.level);
  const IntBox& in = f.field.box;

  IntBox out_box = IntBox::empty(d);
  std::vector<std::pair<IntVector, const ComplexMatrix*>> taps;
  for (const auto& [k, m] : c.taps()) {
    const IntVector shift = an * k;
    taps.emplace_back(shift, &m);
    out_box = out_box.united(in.shifted(shift));
  }
  SampledVectorFunction out{f.level + 1, VectorField(out_box, r), f.intertwined && c.symmetric()};
  if (out_box.empty()) return out;

  // (S F)_{n+1}[j] = sum_k c_k F_n[j - A^n k]
  const size_t n = in.size();
  Eigen::VectorXcd value(r);
  for (const auto& [shift, m] : taps) {
    for (size_t cell = 0; cell < n; ++cell) {
      bool nonzero = false;
      for (int comp = 0; comp < r; ++comp) {
        value[comp] = f.field.at(cell, comp);
        nonzero = nonzero || value[comp] != cd(0.0);
      }
      if (!nonzero) continue;
      const size_t dst = out_box.index(IntVector(in.point(cell) + shift));
      const Eigen::VectorXcd y = (*m) * value;
      for (int comp = 0; comp < r; ++comp) out.field.at(dst, comp) += y[comp];
    }
  }

  const IntBox live = out.field.nonzero_box();
  if (target) {
    if (!target->contains(live)) {
      throw Error(ErrorKind::GridTooSmall, "transfer output leaves the grid box",
                  {{"level", out.level}, {"box", box_json(*target)}, {"required", box_json(live)}});
    }
    out.field = out.field.reboxed(*target);
  } else {
    out.field = out.field.reboxed(live);
  }
  return out;
}

double refinement_residual(const CellGeometry& geom, const MatrixMask& c, const SampledVectorFunction& f) {
  const SampledVectorFunction sf = apply_transfer(geom, c, f);
  return l2_distance(geom, restrict_level(geom, sf), f);
}

SampledVectorFunction tile_init(const CellGeometry& geom, int level) {
  const CrystalTriple& triple = geom.triple();
  const Dilation& dil = triple.dilation();
  const int d = triple.dimension();
  // Q = union of level-n cells indexed by sum_t A^t d_t.
  std::set<IntVector, IntVectorLess> cells{IntVector::Zero(d)};
  for (int t = 0; t < level; ++t) {
    std::set<IntVector, IntVectorLess> next;
    for (const auto& j : cells) {
      for (const auto& digit : dil.digits) next.insert(IntVector(dil.matrix * j + digit));
    }
    cells = std::move(next);
  }
  IntBox box = IntBox::empty(d);
  for (const auto& j : cells) box = box.including(j);
  SampledVectorFunction scalar{level, VectorField(box, 1), false};
  const double scale = 1.0 / std::sqrt(static_cast<double>(triple.order()) * triple.lattice().covolume());
  for (const auto& j : cells) scalar.field.at(box.index(j), 0) = scale;
  return intertwine(geom, scalar);
}

CascadeResult cascade_solve(const CellGeometry& geom, const MatrixMask& c, const CascadeOptions& options) {
  CascadeResult result;
  SampledVectorFunction f;
  if (options.init == CascadeInit::Custom) {
    if (!options.custom) throw Error(ErrorKind::InvalidInput, "custom cascade init requested without a function");
    f = *options.custom;
    if (f.level > options.level) {
      throw Error(ErrorKind::InvalidInput, "initial function is finer than the requested level",
                  {{"init_level", f.level}, {"level", options.level}});
    }
  } else {
    if (options.iterations < 0 || options.iterations > options.level) {
      throw Error(ErrorKind::InvalidInput, "iterations must lie in [0, level]",
                  {{"iterations", options.iterations}, {"level", options.level}});
    }
    f = tile_init(geom, options.level - options.iterations);
  }

  double row0 = 0.0;
  for (const auto& [k, m] : c.taps()) row0 += m.row(0).squaredNorm();
  if (row0 >= static_cast<double>(geom.m())) {
    result.warnings.push_back("sum of |d|^2 = " + std::to_string(row0) + " is not below m = " +
                              std::to_string(geom.m()) + "; the fixed point need not be unique");
  }

  while (f.level < options.level) {
    SampledVectorFunction next = apply_transfer(geom, c, f, options.box);
    const double diff = l2_distance(geom, restrict_level(geom, next), f);
    result.trace.push_back(diff);
    if (!result.converged && diff < options.tol) {
      result.converged = true;
      result.converged_at = static_cast<int>(result.trace.size());
    }
    f = std::move(next);
  }
  if (!result.trace.empty() && result.trace.back() < options.tol) result.converged = true;

  const auto& tr = result.trace;
  if (!result.converged && tr.size() >= 6) {
    bool decreasing = false;
    for (size_t t = tr.size() - 5; t < tr.size(); ++t) decreasing = decreasing || tr[t] < tr[t - 1];
    result.non_convergent = !decreasing;
  }
  result.residual = refinement_residual(geom, c, f);
  result.solution = std::move(f);
  return result;
}

}  // namespace crystal
