#include "crystal/group.hpp"

#include <cmath>
#include <sstream>

#include "crystal/error.hpp"
#include "crystal/intmath.hpp"

namespace crystal {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotExpanding: return "NotExpanding";
    case ErrorKind::NotNormalizing: return "NotNormalizing";
    case ErrorKind::DigitSearchFailed: return "DigitSearchFailed";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridIncompatibleGroup: return "GridIncompatibleGroup";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::CombinatorialBlowup: return "CombinatorialBlowup";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotATileDecomposition: return "NotATileDecomposition";
    case ErrorKind::PieceCountMismatch: return "PieceCountMismatch";
    case ErrorKind::NotConstantPolyphase: return "NotConstantPolyphase";
    case ErrorKind::ScalingNotOrthonormal: return "ScalingNotOrthonormal";
    case ErrorKind::CompletionFailed: return "CompletionFailed";
    case ErrorKind::BoxUnderflow: return "BoxUnderflow";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

nlohmann::json matrix_json(const IntMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

// ---------------------------------------------------------------- lattice

LatticeBasis::LatticeBasis(RealMatrix basis) : basis_(std::move(basis)) {
  if (basis_.rows() == 0 || basis_.rows() != basis_.cols()) {
    throw Error(ErrorKind::InvalidInput, "lattice basis must be a non-empty square matrix");
  }
  covolume_ = std::abs(basis_.determinant());
  if (!(covolume_ > 1e-12)) {
    throw Error(ErrorKind::InvalidInput, "lattice basis is singular",
                {{"invariant", "basis invertible"}, {"covolume", covolume_}});
  }
  gram_ = basis_.transpose() * basis_;
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(gram_);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "gram matrix is not positive definite",
                {{"invariant", "gram positive definite"}});
  }
}

LatticeBasis LatticeBasis::standard(int dimension) {
  return LatticeBasis(RealMatrix::Identity(dimension, dimension));
}

RealMatrix LatticeBasis::dual_basis() const { return basis_.inverse().transpose(); }

RealVector LatticeBasis::to_lattice(const RealVector& ambient_point) const {
  return basis_.partialPivLu().solve(ambient_point);
}

// ---------------------------------------------------------------- point group

PointGroup::PointGroup(std::vector<IntMatrix> elements, const RealMatrix& gram)
    : elements_(std::move(elements)) {
  if (elements_.empty()) throw Error(ErrorKind::InvalidInput, "point group is empty");
  const Eigen::Index d = elements_.front().rows();
  for (size_t i = 0; i < elements_.size(); ++i) {
    const IntMatrix& g = elements_[i];
    if (g.rows() != d || g.cols() != d || gram.rows() != d) {
      throw Error(ErrorKind::DimensionMismatch, "point group element has wrong shape",
                  {{"invariant", "uniform dimension"}, {"element", i}});
    }
  }
  if (!is_identity(elements_.front())) {
    throw Error(ErrorKind::InvalidInput, "first point group element must be the identity",
                {{"invariant", "g1 = identity"}, {"element", 0}});
  }
  for (size_t i = 0; i < elements_.size(); ++i) {
    const IntMatrix& g = elements_[i];
    const Int det = determinant(g);
    if (det != 1 && det != -1) {
      throw Error(ErrorKind::InvalidInput, "point group element is not unimodular",
                  {{"invariant", "g Z^d = Z^d"}, {"element", i}, {"det", det}});
    }
    const RealMatrix gr = to_real(g);
    const double violation = (gr.transpose() * gram * gr - gram).cwiseAbs().maxCoeff();
    if (violation > 1e-9 * std::max(1.0, gram.cwiseAbs().maxCoeff())) {
      throw Error(ErrorKind::InvalidInput, "point group element is not orthogonal for the lattice metric",
                  {{"invariant", "g^T Q g = Q"}, {"element", i}, {"violation", violation}});
    }
    for (size_t j = 0; j < i; ++j) {
      if (elements_[j] == g) {
        throw Error(ErrorKind::InvalidInput, "duplicate point group element",
                    {{"invariant", "distinct elements"}, {"element", i}, {"duplicate_of", j}});
      }
    }
  }
  const int r = order();
  cayley_.assign(static_cast<size_t>(r * r), -1);
  inverse_.assign(static_cast<size_t>(r), -1);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const IntMatrix prod = elements_[static_cast<size_t>(i)] * elements_[static_cast<size_t>(j)];
      auto k = find(prod);
      if (!k) {
        throw Error(ErrorKind::InvalidInput, "point group is not closed under composition",
                    {{"invariant", "closure"}, {"i", i}, {"j", j}, {"product", matrix_json(prod)}});
      }
      cayley_[static_cast<size_t>(i * r + j)] = *k;
      if (*k == 0) inverse_[static_cast<size_t>(i)] = j;
    }
    if (inverse_[static_cast<size_t>(i)] < 0) {
      throw Error(ErrorKind::InvalidInput, "point group element has no inverse in the group",
                  {{"invariant", "closure under inverse"}, {"element", i}});
    }
  }
}

std::optional<int> PointGroup::find(const IntMatrix& g) const {
  for (size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].rows() == g.rows() && elements_[i].cols() == g.cols() && elements_[i] == g) {
      return static_cast<int>(i);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- elements

GroupElement compose(const GroupElement& left, const GroupElement& right, const PointGroup& group) {
  const IntMatrix& gi_inv = group.element(group.inverse(right.point));
  return {group.product(left.point, right.point), right.translation + gi_inv * left.translation};
}

GroupElement invert(const GroupElement& gamma, const PointGroup& group) {
  return {group.inverse(gamma.point), -(group.element(gamma.point) * gamma.translation)};
}

RealVector act(const GroupElement& gamma, const RealVector& x, const CrystalTriple& triple,
               Frame frame) {
  const RealMatrix g = to_real(triple.group().element(gamma.point));
  const RealVector k = to_real(gamma.translation);
  if (frame == Frame::Lattice) return g * (x + k);
  const LatticeBasis& lat = triple.lattice();
  return lat.to_ambient(g * (lat.to_lattice(x) + k));
}

// ---------------------------------------------------------------- triple

CrystalTriple::CrystalTriple(std::string name, LatticeBasis lattice, PointGroup group)
    : name_(std::move(name)), lattice_(std::move(lattice)), group_(std::move(group)) {
  if (group_.dimension() != lattice_.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "point group and lattice dimensions differ",
                {{"lattice", lattice_.dimension()}, {"group", group_.dimension()}});
  }
  // Re-validate the metric invariant against this lattice.
  PointGroup check(group_.elements(), lattice_.gram());
  (void)check;
}

const Dilation& CrystalTriple::dilation() const {
  if (!dilation_) throw Error(ErrorKind::InvalidInput, "no dilation attached to triple '" + name_ + "'");
  return *dilation_;
}

void CrystalTriple::attach_dilation(const IntMatrix& a) {
  Dilation dil = check_admissible(a, *this);
  perms_ = perms(dil, group_);
  dilation_ = std::move(dil);
}

CrystalTriple CrystalTriple::with_dilation(const IntMatrix& a) const {
  CrystalTriple copy = *this;
  copy.attach_dilation(a);
  return copy;
}

const Permutations& CrystalTriple::permutations() const {
  if (!perms_) throw Error(ErrorKind::InvalidInput, "no dilation attached to triple '" + name_ + "'");
  return *perms_;
}

int CrystalTriple::conjugate_index(int i, int n) const {
  if (n == 0) return i;
  const auto& h = dilation().h;
  if (n > 0) {
    for (int t = 0; t < n; ++t) i = h[static_cast<size_t>(i)];
    return i;
  }
  for (int t = 0; t < -n; ++t) {
    for (int j = 0; j < order(); ++j) {
      if (h[static_cast<size_t>(j)] == i) {
        i = j;
        break;
      }
    }
  }
  return i;
}

}  // namespace crystal
