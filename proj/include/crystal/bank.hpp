// Filter banks: m symmetric masks (index 0 = scaling), the orthogonality
// condition (1/m) sum_k c_{i,k} c*_{j,k-Av} = delta_{0,v} delta_{ij} I, and
// completion of a constant-polyphase scaling mask.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crystal/mask.hpp"
#include "crystal/trig_poly.hpp"

namespace crystal {

struct FilterBank {
  CrystalTriple triple;
  std::vector<ScalarMask> scalar_masks;
  std::vector<MatrixMask> masks;

  // Lifts every scalar mask.
  static FilterBank from_scalar(const CrystalTriple& triple, std::vector<ScalarMask> scalar);

  int m() const { return static_cast<int>(masks.size()); }
  int r() const { return triple.order(); }
  std::vector<TrigMatrixPolynomial> symbols() const;
  std::vector<std::vector<TrigMatrixPolynomial>> polyphase_components() const;
};

struct ConditionDReport {
  bool ok = true;
  double max_violation = 0.0;
  double symmetry_violation = 0.0;
  // (i, j, v) of the largest orthogonality violation
  std::optional<std::tuple<int, int, IntVector>> witness;
  std::optional<int> asymmetric_mask;
  size_t checked = 0;
};

ConditionDReport check_condition_d(const FilterBank& bank, double tol = 1e-10);

struct CompletionOptions {
  double tol = 1e-10;
  int random_seeds = 64;
  std::uint64_t seed = 0x5eed;
};

// Throws NotConstantPolyphase, ScalingNotOrthonormal or CompletionFailed.
FilterBank complete_constant_polyphase(const MatrixMask& scaling, const CrystalTriple& triple,
                                       const CompletionOptions& options = {});

}  // namespace crystal
