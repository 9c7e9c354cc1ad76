// Analysis / synthesis with a filter bank on lattice-indexed r-channel data.
//   w_l[v] = m^{-1/2} sum_k conj(c_{l,k-Av}) s[k]
//   s[k]   = m^{-1/2} sum_l sum_v c_{l,k-Av}^T w_l[v]
// conj is entrywise, so w_l[v]_a = <f, phi_a(. - v)> for f with coefficients
// s against m^{1/2} phi(A . - k); the orthogonality condition then makes
// analysis unitary.  Data outside a box is zero; output boxes are large
// enough to hold every non-zero value, so the round trip is exact on the
// input box.
#pragma once

#include <optional>
#include <vector>

#include "crystal/bank.hpp"
#include "crystal/grid.hpp"

namespace crystal {

std::vector<VectorField> analyze_one_level(const FilterBank& bank, const VectorField& s);

// Result on `target` when given, otherwise on the full support box.
VectorField synthesize_one_level(const FilterBank& bank, const std::vector<VectorField>& w,
                                 const std::optional<IntBox>& target = std::nullopt);

struct Pyramid {
  std::vector<IntBox> input_boxes;                // box of the data entering level j
  std::vector<std::vector<VectorField>> details;  // level j: channels 1..m-1
  VectorField coarse;
};

Pyramid transform_multilevel(const FilterBank& bank, const VectorField& s, int levels);
VectorField inverse_multilevel(const FilterBank& bank, const Pyramid& pyramid);

// s_i[k] = f[g_i^{-1} k] for a single-channel field f.
VectorField vectorize(const CrystalTriple& triple, const VectorField& f);

}  // namespace crystal
