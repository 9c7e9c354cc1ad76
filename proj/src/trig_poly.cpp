#include "crystal/trig_poly.hpp"

#include <cmath>
#include <numbers>

#include "crystal/error.hpp"

namespace crystal {

namespace {

cd phase(const IntVector& k, const RealVector& omega) {
  return std::polar(1.0, -2.0 * std::numbers::pi * to_real(k).dot(omega));
}

}  // namespace

void TrigMatrixPolynomial::add(const IntVector& k, const ComplexMatrix& value) {
  if (value.rows() != rows_ || value.cols() != cols_) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient has the wrong shape");
  }
  auto it = coeffs_.find(k);
  if (it == coeffs_.end()) {
    coeffs_.emplace(k, value);
  } else {
    it->second += value;
  }
}

ComplexMatrix TrigMatrixPolynomial::evaluate(const RealVector& omega) const {
  ComplexMatrix out = ComplexMatrix::Zero(rows_, cols_);
  for (const auto& [k, c] : coeffs_) out += phase(k, omega) * c;
  return normalization_ * out;
}

FrequencyGrid::FrequencyGrid(int dimension, int resolution) : dimension_(dimension), resolution_(resolution) {
  if (resolution < 2) throw Error(ErrorKind::InvalidInput, "frequency resolution must be at least 2");
  size_t total = 1;
  for (int i = 0; i < dimension; ++i) total *= static_cast<size_t>(resolution);
  for (size_t idx = 0; idx < total; ++idx) {
    RealVector w(dimension);
    size_t rest = idx;
    for (int i = 0; i < dimension; ++i) {
      w[i] = static_cast<double>(rest % static_cast<size_t>(resolution)) / resolution;
      rest /= static_cast<size_t>(resolution);
    }
    points_.push_back(w);
  }
}

TrigMatrixPolynomial symbol_from_mask(const MatrixMask& c, const CrystalTriple& triple) {
  const int m = triple.dilation().m;
  TrigMatrixPolynomial out(triple.dimension(), c.r(), c.r(), 1.0 / m);
  for (const auto& [k, tap] : c.taps()) out.add(k, tap);
  return out;
}

MatrixMask sigma_lift(const ScalarMask& d, const CrystalTriple& triple) {
  const PointGroup& group = triple.group();
  const int r = group.order();
  MatrixMask c(triple.dimension(), r);
  for (int i = 0; i < r; ++i) {
    for (const auto& [gamma, v] : d.entries()) {
      const int j = group.product(i, gamma.point);  // g_i^{-1} g_j = g_p
      c.tap_ref(IntVector(group.element(j) * gamma.translation))(i, j) = v;
    }
  }
  return c;
}

std::vector<TrigMatrixPolynomial> polyphase(const MatrixMask& c, const CrystalTriple& triple) {
  const Dilation& dil = triple.dilation();
  std::vector<TrigMatrixPolynomial> u;
  for (int h = 0; h < dil.m; ++h) {
    u.emplace_back(triple.dimension(), c.r(), c.r(), 1.0 / std::sqrt(static_cast<double>(dil.m)));
  }
  for (const auto& [k, tap] : c.taps()) {
    const int h = dil.coset_of(k);
    u[static_cast<size_t>(h)].add(dil.coset_quotient(k, h), tap);
  }
  return u;
}

ComplexMatrix reassemble_symbol(const std::vector<TrigMatrixPolynomial>& u, const CrystalTriple& triple,
                                const RealVector& omega) {
  const Dilation& dil = triple.dilation();
  if (static_cast<int>(u.size()) != dil.m) {
    throw Error(ErrorKind::DimensionMismatch, "need one polyphase component per digit");
  }
  const RealVector dual = to_real(dil.matrix).transpose() * omega;
  ComplexMatrix out = ComplexMatrix::Zero(u.front().rows(), u.front().cols());
  for (int h = 0; h < dil.m; ++h) {
    out += phase(dil.digits[static_cast<size_t>(h)], omega) * u[static_cast<size_t>(h)].evaluate(dual);
  }
  return out / std::sqrt(static_cast<double>(dil.m));
}

ComplexMatrix modulation_matrix(const std::vector<TrigMatrixPolynomial>& symbols, const CrystalTriple& triple,
                                const RealVector& omega) {
  const Dilation& dil = triple.dilation();
  if (symbols.empty() || static_cast<int>(symbols.size()) > dil.m) {
    throw Error(ErrorKind::DimensionMismatch, "modulation matrix needs between 1 and m symbols",
                {{"symbols", symbols.size()}, {"m", dil.m}});
  }
  const int r = symbols.front().rows();
  for (const auto& s : symbols) {
    if (s.rows() != r || s.cols() != r) throw Error(ErrorKind::DimensionMismatch, "symbols must all be r x r");
  }
  const RealMatrix inv_t = to_real(dil.matrix).transpose().inverse();
  ComplexMatrix out(static_cast<Eigen::Index>(symbols.size()) * r, dil.m * r);
  for (int j = 0; j < dil.m; ++j) {
    const RealVector shifted = omega + inv_t * to_real(dil.dual_digits[static_cast<size_t>(j)]);
    for (size_t i = 0; i < symbols.size(); ++i) {
      out.block(static_cast<Eigen::Index>(i) * r, j * r, r, r) = symbols[i].evaluate(shifted);
    }
  }
  return out;
}

ComplexMatrix polyphase_matrix(const std::vector<std::vector<TrigMatrixPolynomial>>& u, const RealVector& omega) {
  if (u.empty() || u.front().empty()) throw Error(ErrorKind::DimensionMismatch, "empty polyphase matrix");
  const int r = u.front().front().rows();
  const auto cols = static_cast<Eigen::Index>(u.front().size());
  ComplexMatrix out(static_cast<Eigen::Index>(u.size()) * r, cols * r);
  for (size_t l = 0; l < u.size(); ++l) {
    if (static_cast<Eigen::Index>(u[l].size()) != cols) {
      throw Error(ErrorKind::DimensionMismatch, "ragged polyphase matrix");
    }
    for (size_t h = 0; h < u[l].size(); ++h) {
      out.block(static_cast<Eigen::Index>(l) * r, static_cast<Eigen::Index>(h) * r, r, r) = u[l][h].evaluate(omega);
    }
  }
  return out;
}

double unitarity_defect(const ComplexMatrix& x) {
  const ComplexMatrix g = x * x.adjoint();
  return (g - ComplexMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

namespace {

template <typename Eval>
DefectSweep sweep(const FrequencyGrid& grid, Eval eval) {
  DefectSweep out;
  out.argmax = RealVector::Zero(grid.dimension());
  for (const auto& w : grid.points()) {
    const double v = unitarity_defect(eval(w));
    out.samples.emplace_back(w, v);
    if (v > out.max_defect || out.samples.size() == 1) {
      out.max_defect = std::max(out.max_defect, v);
      out.argmax = w;
    }
  }
  return out;
}

}  // namespace

DefectSweep modulation_defect(const std::vector<TrigMatrixPolynomial>& symbols, const CrystalTriple& triple,
                              const FrequencyGrid& grid) {
  return sweep(grid, [&](const RealVector& w) { return modulation_matrix(symbols, triple, w); });
}

DefectSweep polyphase_defect(const std::vector<std::vector<TrigMatrixPolynomial>>& u, const FrequencyGrid& grid) {
  return sweep(grid, [&](const RealVector& w) { return polyphase_matrix(u, w); });
}

ComplexVector sampled_fourier(const CellGeometry& geom, const SampledVectorFunction& f, const RealVector& xi) {
  const int r = f.field.r;
  ComplexVector out = ComplexVector::Zero(r);
  const IntBox& box = f.field.box;
  const RealMatrix an = to_real(geom.dilation_power(f.level));
  const RealMatrix an_inv = an.inverse();
  // x_j = A^{-n}(j + c), so xi.x_j = (A^{-n})^T xi . (j + c)
  const RealVector eta = an_inv.transpose() * xi;
  const double offset = eta.dot(geom.tile_centroid());
  const size_t n = box.size();
  for (size_t c = 0; c < n; ++c) {
    const cd e = std::polar(1.0, -2.0 * std::numbers::pi * (eta.dot(to_real(box.point(c))) + offset));
    for (int i = 0; i < r; ++i) out[i] += f.field.at(c, i) * e;
  }
  return out * geom.cell_volume(f.level);
}

TwoScaleReport two_scale_defect(const CellGeometry& geom, const SampledVectorFunction& f,
                                const TrigMatrixPolynomial& symbol, const std::vector<RealVector>& probes) {
  TwoScaleReport out;
  const RealMatrix at = to_real(geom.triple().dilation().matrix).transpose();
  out.argmax = RealVector::Zero(geom.dimension());
  for (const auto& w : probes) {
    const ComplexVector lhs = sampled_fourier(geom, f, at * w);
    const ComplexVector rhs = symbol.evaluate(w) * sampled_fourier(geom, f, w);
    const double err = (lhs - rhs).cwiseAbs().maxCoeff();
    out.scale = std::max(out.scale, lhs.cwiseAbs().maxCoeff());
    if (err > out.max_error) {
      out.max_error = err;
      out.argmax = w;
    }
  }
  return out;
}

}  // namespace crystal
