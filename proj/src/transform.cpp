#include "crystal/transform.hpp"

#include <cmath>
#include <limits>

#include "crystal/error.hpp"

namespace crystal {

namespace {

// Box of v with A v + t in `box` for some tap t.
IntBox analysis_box(const Dilation& dil, const MatrixMask& c, const IntBox& box) {
  const int d = box.dimension();
  IntBox out = IntBox::empty(d);
  if (box.empty()) return out;
  const RealMatrix inv = to_real(dil.matrix).inverse();
  for (const auto& [t, tap] : c.taps()) {
    RealVector lo = RealVector::Constant(d, std::numeric_limits<double>::infinity());
    RealVector hi = -lo;
    for (int corner = 0; corner < (1 << d); ++corner) {
      RealVector x(d);
      for (int a = 0; a < d; ++a) x[a] = static_cast<double>((corner >> a) & 1 ? box.hi()[a] - 1 : box.lo()[a]);
      const RealVector y = inv * (x - to_real(t));
      lo = lo.cwiseMin(y);
      hi = hi.cwiseMax(y);
    }
    IntVector jl(d), jh(d);
    for (int a = 0; a < d; ++a) {
      jl[a] = static_cast<Int>(std::ceil(lo[a] - 1e-9));
      jh[a] = static_cast<Int>(std::floor(hi[a] + 1e-9)) + 1;
    }
    out = out.united(IntBox(jl, jh));
  }
  return out;
}

IntBox synthesis_box(const Dilation& dil, const MatrixMask& c, const IntBox& box) {
  const int d = box.dimension();
  IntBox out = IntBox::empty(d);
  if (box.empty()) return out;
  for (const auto& [t, tap] : c.taps()) {
    for (int corner = 0; corner < (1 << d); ++corner) {
      IntVector x(d);
      for (int a = 0; a < d; ++a) x[a] = (corner >> a) & 1 ? box.hi()[a] - 1 : box.lo()[a];
      out = out.including(IntVector(dil.matrix * x + t));
    }
  }
  return out;
}

}  // namespace

std::vector<VectorField> analyze_one_level(const FilterBank& bank, const VectorField& s) {
  const Dilation& dil = bank.triple.dilation();
  const int r = bank.r();
  if (s.r != r) throw Error(ErrorKind::DimensionMismatch, "data channels differ from the group order",
                            {{"channels", s.r}, {"r", r}});
  const double scale = 1.0 / std::sqrt(static_cast<double>(dil.m));
  std::vector<VectorField> out;
  for (const MatrixMask& c : bank.masks) {
    const IntBox box = analysis_box(dil, c, s.box);
    VectorField w(box, r);
    const size_t n = box.size();
    Eigen::VectorXcd x(r);
    for (size_t cell = 0; cell < n; ++cell) {
      const IntVector av = dil.matrix * box.point(cell);
      Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(r);
      for (const auto& [t, tap] : c.taps()) {
        const IntVector k = av + t;
        if (!s.box.contains(k)) continue;
        const size_t src = s.box.index(k);
        for (int i = 0; i < r; ++i) x[i] = s.at(src, i);
        acc.noalias() += tap.conjugate() * x;
      }
      for (int i = 0; i < r; ++i) w.at(cell, i) = scale * acc[i];
    }
    out.push_back(std::move(w));
  }
  return out;
}

VectorField synthesize_one_level(const FilterBank& bank, const std::vector<VectorField>& w,
                                 const std::optional<IntBox>& target) {
  const Dilation& dil = bank.triple.dilation();
  const int r = bank.r();
  if (w.size() != bank.masks.size()) {
    throw Error(ErrorKind::DimensionMismatch, "need one coefficient field per mask",
                {{"fields", w.size()}, {"masks", bank.masks.size()}});
  }
  IntBox box = IntBox::empty(bank.triple.dimension());
  for (size_t l = 0; l < w.size(); ++l) box = box.united(synthesis_box(dil, bank.masks[l], w[l].box));
  VectorField s(box, r);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dil.m));
  Eigen::VectorXcd x(r);
  for (size_t l = 0; l < w.size(); ++l) {
    const VectorField& wl = w[l];
    if (wl.r != r) throw Error(ErrorKind::DimensionMismatch, "coefficient field has the wrong channel count");
    const size_t n = wl.box.size();
    for (size_t cell = 0; cell < n; ++cell) {
      bool nonzero = false;
      for (int i = 0; i < r; ++i) {
        x[i] = wl.at(cell, i);
        nonzero = nonzero || x[i] != cd(0.0);
      }
      if (!nonzero) continue;
      const IntVector av = dil.matrix * wl.box.point(cell);
      for (const auto& [t, tap] : bank.masks[l].taps()) {
        const size_t dst = box.index(IntVector(av + t));
        const Eigen::VectorXcd y = tap.transpose() * x;
        for (int i = 0; i < r; ++i) s.at(dst, i) += scale * y[i];
      }
    }
  }
  if (target) return s.reboxed(*target);
  return s;
}

Pyramid transform_multilevel(const FilterBank& bank, const VectorField& s, int levels) {
  if (levels < 1) throw Error(ErrorKind::InvalidInput, "need at least one level", {{"levels", levels}});
  Pyramid p;
  VectorField current = s;
  for (int j = 0; j < levels; ++j) {
    if (current.box.empty()) {
      throw Error(ErrorKind::BoxUnderflow, "coarse box became empty", {{"level", j}, {"levels", levels}});
    }
    p.input_boxes.push_back(current.box);
    std::vector<VectorField> w = analyze_one_level(bank, current);
    current = std::move(w.front());
    w.erase(w.begin());
    p.details.push_back(std::move(w));
  }
  p.coarse = std::move(current);
  return p;
}

VectorField inverse_multilevel(const FilterBank& bank, const Pyramid& pyramid) {
  VectorField current = pyramid.coarse;
  for (size_t j = pyramid.details.size(); j-- > 0;) {
    std::vector<VectorField> w{current};
    w.insert(w.end(), pyramid.details[j].begin(), pyramid.details[j].end());
    current = synthesize_one_level(bank, w, pyramid.input_boxes[j]);
  }
  return current;
}

VectorField vectorize(const CrystalTriple& triple, const VectorField& f) {
  if (f.r != 1) throw Error(ErrorKind::DimensionMismatch, "vectorize expects a single-channel field");
  const PointGroup& group = triple.group();
  const int d = triple.dimension();
  IntBox box = IntBox::empty(d);
  if (f.box.empty()) return VectorField(box, group.order());
  for (int i = 0; i < group.order(); ++i) {
    for (int corner = 0; corner < (1 << d); ++corner) {
      IntVector x(d);
      for (int a = 0; a < d; ++a) x[a] = (corner >> a) & 1 ? f.box.hi()[a] - 1 : f.box.lo()[a];
      box = box.including(IntVector(group.element(i) * x));
    }
  }
  VectorField out(box, group.order());
  for (size_t c = 0; c < box.size(); ++c) {
    const IntVector k = box.point(c);
    for (int i = 0; i < group.order(); ++i) {
      out.at(c, i) = f.read(IntVector(group.element(group.inverse(i)) * k), 0);
    }
  }
  return out;
}

}  // namespace crystal
