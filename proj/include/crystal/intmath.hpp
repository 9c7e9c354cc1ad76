// Exact integer linear algebra for small lattice matrices.

#pragma once

#include <optional>

#include "crystal/types.hpp"

namespace crystal {

// Fraction-free (Bareiss) determinant.
Int determinant(const IntMatrix& a);

// adj(A) with A * adj(A) = det(A) * I.
IntMatrix adjugate(const IntMatrix& a);

// A^{-1} when it is an integer matrix, nullopt otherwise.
std::optional<IntMatrix> integer_inverse(const IntMatrix& a);

// Solves A x = b over the integers; nullopt if the solution is not integral.
std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b);

// True iff u - v lies in A Z^d.
bool congruent_mod(const IntMatrix& a, const IntVector& u, const IntVector& v);

IntMatrix matrix_power(const IntMatrix& a, int n);

bool is_identity(const IntMatrix& a);

}  // namespace crystal
