#include "crystal/bank.hpp"

#include <cmath>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>

#include "crystal/error.hpp"
#include "crystal/intmath.hpp"

namespace crystal {

namespace {

std::vector<Int> as_list(const IntVector& v) { return std::vector<Int>(v.data(), v.data() + v.size()); }

}  // namespace

FilterBank FilterBank::from_scalar(const CrystalTriple& triple, std::vector<ScalarMask> scalar) {
  FilterBank bank{triple, std::move(scalar), {}};
  for (const auto& d : bank.scalar_masks) bank.masks.push_back(lift_mask(d, triple));
  return bank;
}

std::vector<TrigMatrixPolynomial> FilterBank::symbols() const {
  std::vector<TrigMatrixPolynomial> out;
  for (const auto& c : masks) out.push_back(symbol_from_mask(c, triple));
  return out;
}

std::vector<std::vector<TrigMatrixPolynomial>> FilterBank::polyphase_components() const {
  std::vector<std::vector<TrigMatrixPolynomial>> out;
  for (const auto& c : masks) out.push_back(polyphase(c, triple));
  return out;
}

ConditionDReport check_condition_d(const FilterBank& bank, double tol) {
  const Dilation& dil = bank.triple.dilation();
  const int r = bank.r();
  const int n = bank.m();
  ConditionDReport report;

  for (int i = 0; i < n; ++i) {
    const SymmetryReport sym = check_gamma_a_symmetry(bank.masks[static_cast<size_t>(i)], bank.triple, tol);
    if (sym.max_violation > report.symmetry_violation) {
      report.symmetry_violation = sym.max_violation;
      report.asymmetric_mask = i;
    }
  }

  for (int i = 0; i < n; ++i) {
    const MatrixMask& ci = bank.masks[static_cast<size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const MatrixMask& cj = bank.masks[static_cast<size_t>(j)];
      // v = 0 and every v with A v = k - k' for taps k of c_i and k' of c_j
      std::set<IntVector, IntVectorLess> shifts{IntVector::Zero(bank.triple.dimension())};
      for (const auto& [k, a] : ci.taps()) {
        for (const auto& [kk, b] : cj.taps()) {
          if (auto v = solve_integer(dil.matrix, IntVector(k - kk))) shifts.insert(*v);
        }
      }
      for (const IntVector& v : shifts) {
        const IntVector av = dil.matrix * v;
        ComplexMatrix sum = ComplexMatrix::Zero(r, r);
        for (const auto& [k, a] : ci.taps()) {
          if (const ComplexMatrix* b = cj.find(IntVector(k - av))) sum += a * b->adjoint();
        }
        sum /= static_cast<double>(dil.m);
        if (i == j && v.isZero()) sum -= ComplexMatrix::Identity(r, r);
        const double viol = r == 0 ? 0.0 : sum.cwiseAbs().maxCoeff();
        ++report.checked;
        if (!report.witness || viol > report.max_violation) {
          report.max_violation = viol;
          report.witness = std::make_tuple(i, j, v);
        }
      }
    }
  }
  report.ok = report.max_violation <= tol && report.symmetry_violation <= tol;
  return report;
}

FilterBank complete_constant_polyphase(const MatrixMask& scaling, const CrystalTriple& triple,
                                       const CompletionOptions& options) {
  const Dilation& dil = triple.dilation();
  const PointGroup& group = triple.group();
  const Permutations& perm = triple.permutations();
  const int m = dil.m;
  const int r = group.order();

  // one tap per coset
  std::vector<IntVector> support = scaling.support();
  std::vector<int> owner(static_cast<size_t>(m), -1);
  for (size_t t = 0; t < support.size(); ++t) {
    const int h = dil.coset_of(support[t]);
    if (owner[static_cast<size_t>(h)] >= 0) {
      throw Error(ErrorKind::NotConstantPolyphase, "two scaling taps share a coset of A Z^d",
                  {{"coset", h},
                   {"taps", {as_list(support[static_cast<size_t>(owner[static_cast<size_t>(h)])]),
                             as_list(support[t])}}});
    }
    owner[static_cast<size_t>(h)] = static_cast<int>(t);
  }
  if (static_cast<int>(support.size()) != m) {
    throw Error(ErrorKind::NotConstantPolyphase, "scaling mask must have exactly one tap in each coset",
                {{"taps", support.size()}, {"m", m}});
  }
  std::map<IntVector, int, IntVectorLess> slot;
  for (size_t t = 0; t < support.size(); ++t) slot[support[t]] = static_cast<int>(t);
  for (const auto& k : support) {
    for (int g = 0; g < r; ++g) {
      const IntVector gk = group.element(g) * k;
      if (!slot.count(gk)) {
        throw Error(ErrorKind::NotConstantPolyphase,
                    "tap set is not closed under the point group, so lifted wavelet masks would leave it",
                    {{"tap", as_list(k)}, {"g", g}, {"image", as_list(gk)}});
      }
    }
  }

  const ScalarMask d0 = extract_scalar(scaling, triple, options.tol);
  FilterBank probe{triple, {d0}, {scaling}};
  const ConditionDReport own = check_condition_d(probe, options.tol);
  if (!own.ok) {
    throw Error(ErrorKind::ScalingNotOrthonormal, "scaling mask fails its own orthogonality condition",
                {{"max_violation", own.max_violation}, {"symmetry_violation", own.symmetry_violation}});
  }

  // Parameter x_{(t, p)} is row 0, column p of the tap at support[t].  Row i
  // of the block row is T_i x with (T_i x)_{(k, j)} = x_{(g_{h_i}^{-1} k, rho_i(j))}.
  const int dim = m * r;
  auto index = [r](int t, int p) { return t * r + p; };
  std::vector<std::vector<int>> source(static_cast<size_t>(r), std::vector<int>(static_cast<size_t>(dim)));
  for (int i = 0; i < r; ++i) {
    const IntMatrix ginv = group.element(group.inverse(perm.h[static_cast<size_t>(i)]));
    for (int t = 0; t < m; ++t) {
      const int tt = slot.at(IntVector(ginv * support[static_cast<size_t>(t)]));
      for (int j = 0; j < r; ++j) {
        source[static_cast<size_t>(i)][static_cast<size_t>(index(t, j))] =
            index(tt, perm.rho[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      }
    }
  }
  auto translate = [&](int i, const ComplexVector& x) {
    ComplexVector y(dim);
    for (int a = 0; a < dim; ++a) y[a] = x[source[static_cast<size_t>(i)][static_cast<size_t>(a)]];
    return y;
  };

  ComplexVector x0(dim);
  for (int t = 0; t < m; ++t) {
    const ComplexMatrix& tap = *scaling.find(support[static_cast<size_t>(t)]);
    for (int p = 0; p < r; ++p) x0[index(t, p)] = tap(0, p);
  }

  std::vector<ComplexVector> accepted;  // every T_i x of accepted rows, norm^2 = m
  for (int i = 0; i < r; ++i) accepted.push_back(translate(i, x0));
  std::vector<ComplexVector> wavelets;

  auto try_seed = [&](ComplexVector y) {
    for (const auto& v : accepted) y -= v * (v.dot(y) / static_cast<double>(m));
    if (y.norm() < 1e-9) return false;
    ComplexMatrix ys(dim, r);
    for (int i = 0; i < r; ++i) ys.col(i) = translate(i, y);
    const ComplexMatrix gram = ys.adjoint() * ys;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram);
    const Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() <= 1e-10 * std::max(1.0, ev.maxCoeff())) return false;
    const ComplexMatrix inv_sqrt =
        es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    ComplexVector x = std::sqrt(static_cast<double>(m)) * (ys * inv_sqrt.col(0));
    for (auto& v : x) {
      if (std::abs(v.real()) < 1e-14) v.real(0.0);
      if (std::abs(v.imag()) < 1e-14) v.imag(0.0);
    }
    for (int i = 0; i < r; ++i) accepted.push_back(translate(i, x));
    wavelets.push_back(x);
    return true;
  };

  for (int a = 0; a < dim && static_cast<int>(wavelets.size()) < m - 1; ++a) {
    try_seed(ComplexVector::Unit(dim, a));
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  for (int s = 0; s < options.random_seeds && static_cast<int>(wavelets.size()) < m - 1; ++s) {
    ComplexVector y(dim);
    for (auto& v : y) v = cd(normal(rng), normal(rng));
    try_seed(y);
  }
  if (static_cast<int>(wavelets.size()) < m - 1) {
    throw Error(ErrorKind::CompletionFailed, "could not find enough orthogonal symmetric wavelet rows",
                {{"achieved", wavelets.size()}, {"required", m - 1}});
  }

  std::vector<ScalarMask> scalar{d0};
  for (const auto& x : wavelets) {
    ScalarMask d(triple.dimension());
    for (int t = 0; t < m; ++t) {
      for (int p = 0; p < r; ++p) {
        d.set(p, IntVector(group.element(group.inverse(p)) * support[static_cast<size_t>(t)]), x[index(t, p)]);
      }
    }
    scalar.push_back(std::move(d));
  }
  FilterBank bank = FilterBank::from_scalar(triple, std::move(scalar));
  bank.masks[0] = scaling;
  const ConditionDReport final_check = check_condition_d(bank, options.tol);
  if (!final_check.ok) {
    throw Error(ErrorKind::CompletionFailed, "completed bank fails the orthogonality condition",
                {{"max_violation", final_check.max_violation}, {"achieved", wavelets.size()}});
  }
  return bank;
}

}  // namespace crystal
