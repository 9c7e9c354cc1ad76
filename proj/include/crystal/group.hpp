// Splitting crystal groups Gamma = G x| Z^d in lattice coordinates.
//
// An element gamma = (i, k) acts by x -> g_i (x + k).  Composition follows
//   (g_j, l) . (g_i, k) = (g_j g_i, k + g_i^{-1} l).

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crystal/types.hpp"

namespace crystal {

class LatticeBasis {
 public:
  // Columns of `basis` are the lattice generators in ambient coordinates.
  explicit LatticeBasis(RealMatrix basis);

  static LatticeBasis standard(int dimension);

  int dimension() const { return static_cast<int>(basis_.rows()); }
  const RealMatrix& basis() const { return basis_; }
  const RealMatrix& gram() const { return gram_; }
  double covolume() const { return covolume_; }
  // Basis of the dual lattice, B^{-T}.
  RealMatrix dual_basis() const;

  RealVector to_ambient(const RealVector& lattice_point) const { return basis_ * lattice_point; }
  RealVector to_lattice(const RealVector& ambient_point) const;

 private:
  RealMatrix basis_;
  RealMatrix gram_;
  double covolume_;
};

class PointGroup {
 public:
  // The first element must be the identity.  Invariants are validated
  // against `gram` (each g satisfies g^T Q g = Q).
  PointGroup(std::vector<IntMatrix> elements, const RealMatrix& gram);

  int order() const { return static_cast<int>(elements_.size()); }
  int dimension() const { return static_cast<int>(elements_.front().rows()); }
  const IntMatrix& element(int i) const { return elements_[static_cast<size_t>(i)]; }
  const std::vector<IntMatrix>& elements() const { return elements_; }

  // index of g_i g_j
  int product(int i, int j) const { return cayley_[static_cast<size_t>(i * order() + j)]; }
  int inverse(int i) const { return inverse_[static_cast<size_t>(i)]; }
  std::optional<int> find(const IntMatrix& g) const;

 private:
  std::vector<IntMatrix> elements_;
  std::vector<int> cayley_;
  std::vector<int> inverse_;
};

struct GroupElement {
  int point = 0;
  IntVector translation;

  static GroupElement identity(int dimension) { return {0, IntVector::Zero(dimension)}; }
  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.point == b.point && a.translation == b.translation;
  }
};

struct GroupElementLess {
  bool operator()(const GroupElement& a, const GroupElement& b) const {
    if (a.point != b.point) return a.point < b.point;
    return IntVectorLess{}(a.translation, b.translation);
  }
};

struct Permutations {
  std::vector<int> h;                   // g_{h_i} = A g_i A^{-1}
  std::vector<std::vector<int>> rho;    // g_{rho_i(j)} = g_{h_i}^{-1} g_j
  std::vector<std::vector<int>> sigma;  // g_{sigma_i(j)} = g_i g_j
  std::vector<std::vector<int>> s;      // g_{s_i(j)} = g_{h_i} g_j
};

struct Dilation {
  IntMatrix matrix;
  int m = 0;  // |det A|
  std::vector<int> h;
  std::vector<IntVector> digits;       // Z^d / A Z^d
  std::vector<IntVector> dual_digits;  // Z^d / A^T Z^d
  IntMatrix adjugate;                  // A adj(A) = det I
  Int det = 0;

  int coset_of(const IntVector& k) const;
  // k = A q + digits[coset]; returns q.
  IntVector coset_quotient(const IntVector& k, int coset) const;
};

class CrystalTriple {
 public:
  CrystalTriple(std::string name, LatticeBasis lattice, PointGroup group);

  const std::string& name() const { return name_; }
  int dimension() const { return lattice_.dimension(); }
  int order() const { return group_.order(); }
  const LatticeBasis& lattice() const { return lattice_; }
  const PointGroup& group() const { return group_; }

  bool has_dilation() const { return dilation_.has_value(); }
  const Dilation& dilation() const;
  // Validates admissibility of A and attaches it.
  void attach_dilation(const IntMatrix& a);
  CrystalTriple with_dilation(const IntMatrix& a) const;

  const Permutations& permutations() const;

  // A^n g_i A^{-n} = g_{power_h(i, n)}
  int conjugate_index(int i, int n) const;

 private:
  std::string name_;
  LatticeBasis lattice_;
  PointGroup group_;
  std::optional<Dilation> dilation_;
  std::optional<Permutations> perms_;
};

enum class Frame { Lattice, Ambient };

GroupElement compose(const GroupElement& left, const GroupElement& right, const PointGroup& group);
GroupElement invert(const GroupElement& gamma, const PointGroup& group);
RealVector act(const GroupElement& gamma, const RealVector& x, const CrystalTriple& triple,
               Frame frame = Frame::Lattice);

// Verifies expansiveness and A G A^{-1} = G, and computes h and both digit sets.
Dilation check_admissible(const IntMatrix& a, const CrystalTriple& triple);
Permutations perms(const Dilation& dilation, const PointGroup& group);

// m coset representatives of Z^d / A Z^d, first coordinate varying fastest.
std::vector<IntVector> digit_representatives(const IntMatrix& a);

bool is_expanding(const IntMatrix& a);

}  // namespace crystal
