// Spectral radius and p-joint spectral radius of finite matrix sets.

#pragma once

#include <limits>
#include <vector>

#include "crystal/types.hpp"

namespace crystal {

using MatrixSet = std::vector<ComplexMatrix>;

// Throws InvalidInput / DimensionMismatch for empty or ragged sets.
void validate_matrix_set(const MatrixSet& set);

struct SpectralRadius {
  double value = 0.0;      // max |eigenvalue|
  double power_est = 0.0;  // ||M^64||^{1/64}
  bool cross_check = true;  // the two agree within 5% (or both vanish)
};

SpectralRadius spectral_radius_report(const ComplexMatrix& m);
double spectral_radius(const ComplexMatrix& m);
double operator_norm(const ComplexMatrix& m);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct JsrOptions {
  double p = kInfinity;
  int max_length = 10;
  size_t budget = 4'000'000;  // products visited
};

struct JsrResult {
  double p = kInfinity;
  double lower = 0.0;
  double upper = kInfinity;
  // lower for p = inf; per_length at the deepest complete length otherwise
  double estimate = 0.0;
  std::vector<double> per_length;  // entry l-1 is the length-l value
  int complete_length = 0;
  bool blowup = false;
  size_t products = 0;
};

JsrResult jsr_estimate(const MatrixSet& set, const JsrOptions& options);

struct NormBound {
  bool holds = false;
  double value = 0.0;  // (sum ||M_j||^p)^{1/p} or max ||M_j||
};

NormBound norm_bound_check(const MatrixSet& set, double p, double delta);

}  // namespace crystal
