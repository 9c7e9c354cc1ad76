#include "crystal/spectral.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "crystal/error.hpp"

namespace crystal {

void validate_matrix_set(const MatrixSet& set) {
  if (set.empty()) throw Error(ErrorKind::InvalidInput, "matrix set is empty");
  const auto n = set.front().rows();
  for (size_t i = 0; i < set.size(); ++i) {
    if (set[i].rows() != n || set[i].cols() != n) {
      throw Error(ErrorKind::DimensionMismatch, "matrix set needs square matrices of one size",
                  {{"index", i}, {"rows", set[i].rows()}, {"cols", set[i].cols()}, {"expected", n}});
    }
  }
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_radius(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

SpectralRadius spectral_radius_report(const ComplexMatrix& m) {
  SpectralRadius out;
  out.value = spectral_radius(m);
  // repeated squaring with rescaling keeps M^64 finite
  ComplexMatrix p = m;
  double log_scale = 0.0;
  for (int t = 0; t < 6; ++t) {
    p = p * p;
    log_scale *= 2.0;
    const double nrm = operator_norm(p);
    if (nrm == 0.0) {
      log_scale = -kInfinity;
      break;
    }
    p /= nrm;
    log_scale += std::log(nrm);
  }
  out.power_est = std::isinf(log_scale) ? 0.0 : std::exp(log_scale / 64.0);
  if (out.value < 1e-300 && out.power_est < 1e-6) {
    out.cross_check = true;
  } else {
    out.cross_check = std::abs(out.power_est - out.value) <= 0.05 * std::max(out.value, out.power_est);
  }
  return out;
}

JsrResult jsr_estimate(const MatrixSet& set, const JsrOptions& options) {
  validate_matrix_set(set);
  if (!(options.p >= 1.0)) throw Error(ErrorKind::InvalidInput, "p must lie in [1, inf]", {{"p", options.p}});
  if (options.max_length < 1) throw Error(ErrorKind::InvalidInput, "max length must be at least 1");

  const size_t q = set.size();
  const bool inf = std::isinf(options.p);
  JsrResult result;
  result.p = options.p;

  // deepest length whose full enumeration fits the budget
  int length = 0;
  double visited = 0.0;
  double layer = 1.0;
  while (length < options.max_length) {
    layer *= static_cast<double>(q);
    if (visited + layer > static_cast<double>(options.budget)) break;
    visited += layer;
    ++length;
  }
  if (length < options.max_length) result.blowup = true;
  if (length == 0) {
    throw Error(ErrorKind::CombinatorialBlowup, "budget too small for a single product length",
                {{"budget", options.budget}, {"set_size", q}});
  }
  result.complete_length = length;

  // sum of ||P||^p (or max ||P||) per length, accumulated over a DFS with prefix products
  std::vector<double> acc(static_cast<size_t>(length), 0.0);
  const auto n = set.front().rows();
  std::vector<ComplexMatrix> prefix(static_cast<size_t>(length) + 1);
  prefix[0] = ComplexMatrix::Identity(n, n);
  std::vector<size_t> word(static_cast<size_t>(length) + 1, 0);
  int depth = 1;
  word[1] = 0;
  while (depth > 0) {
    if (word[static_cast<size_t>(depth)] == q) {
      --depth;
      if (depth > 0) ++word[static_cast<size_t>(depth)];
      continue;
    }
    const auto ud = static_cast<size_t>(depth);
    prefix[ud] = set[word[ud]] * prefix[ud - 1];
    ++result.products;
    const double nrm = operator_norm(prefix[ud]);
    const double rho = spectral_radius(prefix[ud]);
    const double l = static_cast<double>(depth);
    result.lower = std::max(result.lower, std::pow(rho, 1.0 / l));
    if (inf) {
      acc[ud - 1] = std::max(acc[ud - 1], nrm);
    } else {
      acc[ud - 1] += std::pow(nrm, options.p);
    }
    if (depth < length) {
      ++depth;
      word[static_cast<size_t>(depth)] = 0;
    } else {
      ++word[ud];
    }
  }

  for (int l = 1; l <= length; ++l) {
    const double a = acc[static_cast<size_t>(l - 1)];
    const double v = inf ? std::pow(a, 1.0 / l) : std::pow(a, 1.0 / (options.p * l));
    result.per_length.push_back(v);
    result.upper = std::min(result.upper, v);
  }
  // Equal in exact arithmetic when some product is normal (golden pair).
  result.upper = std::max(result.upper, result.lower);
  result.estimate = inf ? result.lower : result.per_length.back();
  return result;
}

NormBound norm_bound_check(const MatrixSet& set, double p, double delta) {
  validate_matrix_set(set);
  NormBound out;
  if (std::isinf(p)) {
    for (const auto& m : set) out.value = std::max(out.value, operator_norm(m));
  } else {
    double s = 0.0;
    for (const auto& m : set) s += std::pow(operator_norm(m), p);
    out.value = std::pow(s, 1.0 / p);
  }
  out.holds = out.value <= delta;
  return out;
}

}  // namespace crystal
