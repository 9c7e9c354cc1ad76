#include <doctest.h>

#include <numbers>
#include <random>

#include "crystal/error.hpp"
#include "crystal/spectral.hpp"
#include "crystal/transfer.hpp"
#include "crystal/trig_poly.hpp"
#include "oracles.hpp"

using namespace crystal;

namespace {

constexpr double kPi = std::numbers::pi;
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

ComplexMatrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  ComplexMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

RealVector vec(std::initializer_list<double> xs) {
  RealVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Largest product norm over all words of length l, by explicit recursion.
double brute_norm(const MatrixSet& set, int l, double p) {
  std::vector<ComplexMatrix> level = {ComplexMatrix::Identity(set[0].rows(), set[0].cols())};
  for (int s = 0; s < l; ++s) {
    std::vector<ComplexMatrix> next;
    for (const auto& w : level) {
      for (const auto& m : set) next.push_back(m * w);
    }
    level = std::move(next);
  }
  double acc = 0.0;
  for (const auto& w : level) {
    Eigen::JacobiSVD<ComplexMatrix> svd(w);
    const double n = svd.singularValues()(0);
    acc = std::isinf(p) ? std::max(acc, n) : acc + std::pow(n, p);
  }
  return std::isinf(p) ? std::pow(acc, 1.0 / l) : std::pow(acc, 1.0 / (p * l));
}

MatrixMask classical_wavelet() {
  const CrystalTriple t = oracle::triple2("line");
  return lift_mask(oracle::line_mask({{0, 1.0}, {1, -1.0}}), t);
}

}  // namespace

TEST_CASE("spectral radius") {
  CHECK(spectral_radius(ComplexMatrix::Identity(3, 3)) == doctest::Approx(1.0));
  CHECK(spectral_radius(real_matrix({{2, 0}, {0, 0.5}})) == doctest::Approx(2.0));
  const SpectralRadius g = spectral_radius_report(real_matrix({{0, 1}, {1, 1}}));
  CHECK(g.value == doctest::Approx(kGolden).epsilon(1e-12));
  CHECK(g.cross_check);
  // Jordan block: ||J^64||^{1/64} is about 1.067, outside the 5% window.
  const SpectralRadius j = spectral_radius_report(real_matrix({{1, 1}, {0, 1}}));
  CHECK(j.value == doctest::Approx(1.0));
  CHECK(j.power_est == doctest::Approx(1.067).epsilon(0.01));
  CHECK_FALSE(j.cross_check);
}

TEST_CASE("jsr of a single matrix approaches the spectral radius") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> z;
  for (int n = 0; n < 10; ++n) {
    ComplexMatrix m(3, 3);
    for (Eigen::Index i = 0; i < 9; ++i) m(i / 3, i % 3) = z(rng);
    JsrOptions o;
    o.max_length = 20;
    const JsrResult r = jsr_estimate({m}, o);
    const double rho = spectral_radius(m);
    CHECK(r.lower == doctest::Approx(rho).epsilon(1e-9));
    CHECK(r.lower <= r.upper + 1e-12);
    CHECK(std::abs(r.estimate - rho) <= 0.02 * rho);
  }
}

TEST_CASE("jsr of the golden pair") {
  const MatrixSet pair = {real_matrix({{1, 1}, {0, 1}}), real_matrix({{1, 0}, {1, 1}})};
  JsrOptions o;
  o.max_length = 12;
  const JsrResult r = jsr_estimate(pair, o);
  CHECK(r.lower >= 1.61);
  CHECK(r.lower == doctest::Approx(kGolden).epsilon(1e-12));
  CHECK(r.upper >= r.lower);
  CHECK(r.complete_length == 12);
  CHECK_FALSE(r.blowup);
  for (int l : {1, 3, 6}) {
    CHECK(r.per_length[static_cast<size_t>(l - 1)] == doctest::Approx(brute_norm(pair, l, kInfinity)).epsilon(1e-12));
  }
  JsrOptions two = o;
  two.p = 2.0;
  two.max_length = 6;
  const JsrResult r2 = jsr_estimate(pair, two);
  CHECK(r2.per_length[5] == doctest::Approx(brute_norm(pair, 6, 2.0)).epsilon(1e-12));
}

TEST_CASE("jsr monotonicity in p") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> z;
  for (int n = 0; n < 8; ++n) {
    MatrixSet set;
    for (int q = 0; q < 3; ++q) {
      ComplexMatrix m(2, 2);
      for (Eigen::Index i = 0; i < 4; ++i) m(i / 2, i % 2) = cd(z(rng), z(rng));
      set.push_back(m);
    }
    double last = kInfinity;
    for (double p : {1.0, 2.0, kInfinity}) {
      JsrOptions o;
      o.p = p;
      o.max_length = 6;
      const JsrResult r = jsr_estimate(set, o);
      CHECK(r.estimate <= last * (1 + 1e-12));
      last = r.estimate;
    }
  }
}

TEST_CASE("jsr budget truncation") {
  const MatrixSet pair = {real_matrix({{1, 1}, {0, 1}}), real_matrix({{1, 0}, {1, 1}})};
  JsrOptions o;
  o.max_length = 20;
  o.budget = 5000;
  const JsrResult r = jsr_estimate(pair, o);
  CHECK(r.blowup);
  CHECK(r.complete_length < 20);
  CHECK(r.lower <= r.upper);
  CHECK_THROWS_AS(jsr_estimate({}, o), Error);
  CHECK_THROWS_AS(jsr_estimate({ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)}, o), Error);
}

TEST_CASE("norm bound") {
  const MatrixSet small = {0.4 * ComplexMatrix::Identity(2, 2), 0.4 * ComplexMatrix::Identity(2, 2)};
  const NormBound b = norm_bound_check(small, 2.0, 0.6);
  CHECK(b.holds);
  CHECK(b.value == doctest::Approx(std::sqrt(0.32)));
  CHECK_FALSE(norm_bound_check({ComplexMatrix::Identity(2, 2)}, kInfinity, 0.5).holds);
  CHECK(norm_bound_check({ComplexMatrix::Zero(2, 2)}, 3.0, 1e-9).holds);
}

TEST_CASE("classical Haar symbol") {
  const CrystalTriple t = oracle::triple2("line");
  const TrigMatrixPolynomial m0 = symbol_from_mask(lift_mask(oracle::line_mask({{0, 1.0}, {1, 1.0}}), t), t);
  for (double w : {0.0, 0.1, 0.37, 0.5}) {
    const cd expect = (1.0 + std::exp(cd(0, -2 * kPi * w))) / 2.0;
    CHECK(std::abs(m0.evaluate(vec({w}))(0, 0) - expect) < 1e-15);
  }
  CHECK(symbol_from_mask(MatrixMask(1, 1), t).is_zero());
}

TEST_CASE("cm-diag Haar symbol at zero and its periodicity") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const MatrixMask c = lift_mask(oracle::cm_diag_haar(), t);
  const TrigMatrixPolynomial m0 = symbol_from_mask(c, t);
  CHECK(oracle::max_abs_diff(m0.evaluate(vec({0, 0})), real_matrix({{0.75, 0.25}, {0.25, 0.75}})) < 1e-15);
  const RealVector w = vec({0.213, -0.71});
  CHECK(oracle::max_abs_diff(m0.evaluate(w), m0.evaluate(w + vec({3, -2}))) < 1e-12);
  // Scaling row alone: (1/4)(I + I + diag(2,0) + diag(0,2)) = I over the dual digits.
  const FrequencyGrid grid(2, 8);
  CHECK(modulation_defect({m0}, t, grid).max_defect < 1e-12);
}

TEST_CASE("sigma-indexed lift agrees when h is trivial") {
  std::mt19937_64 rng(37);
  for (const char* name : {"cm-diag", "pm", "p4"}) {
    const CrystalTriple t = oracle::triple2(name);
    const ScalarMask d = oracle::random_mask(rng, t, 6, 2);
    const MatrixMask a = lift_mask(d, t);
    const MatrixMask b = sigma_lift(d, t);
    REQUIRE(a.size() == b.size());
    for (const auto& [k, tap] : a.taps()) CHECK(oracle::max_abs_diff(tap, b.tap(k)) < 1e-15);
  }
}

TEST_CASE("polyphase components") {
  const CrystalTriple line = oracle::triple2("line");
  const auto u = polyphase(lift_mask(oracle::line_mask({{0, 1.0}, {1, 1.0}}), line), line);
  REQUIRE(u.size() == 2);
  for (const auto& uh : u) CHECK(std::abs(uh.evaluate(vec({0.3}))(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-15);

  const CrystalTriple t = oracle::triple2("cm-diag");
  const MatrixMask c = lift_mask(oracle::cm_diag_haar(), t);
  const auto v = polyphase(c, t);
  REQUIRE(v.size() == 4);
  for (size_t h = 0; h < 4; ++h) {
    const IntVector& dh = t.dilation().digits[h];
    CHECK(oracle::max_abs_diff(v[h].evaluate(vec({0.4, 0.1})), 0.5 * c.tap(dh)) < 1e-15);
  }

  std::mt19937_64 rng(41);
  for (const char* name : {"cm-diag", "p4"}) {
    const CrystalTriple s = oracle::triple2(name);
    const MatrixMask rand = lift_mask(oracle::random_mask(rng, s, 9, 3), s);
    const auto w = polyphase(rand, s);
    size_t count = 0;
    for (const auto& wh : w) count += wh.coefficients().size();
    CHECK(count == rand.size());
    const TrigMatrixPolynomial sym = symbol_from_mask(rand, s);
    std::uniform_real_distribution<double> u01(-1, 1);
    for (int n = 0; n < 20; ++n) {
      const RealVector om = vec({u01(rng), u01(rng)});
      CHECK(oracle::max_abs_diff(reassemble_symbol(w, s, om), sym.evaluate(om)) < 1e-12);
    }
  }
}

TEST_CASE("modulation matrix of the classical Haar bank") {
  const CrystalTriple t = oracle::triple2("line");
  const MatrixMask c0 = lift_mask(oracle::line_mask({{0, 1.0}, {1, 1.0}}), t);
  const std::vector<TrigMatrixPolynomial> symbols = {symbol_from_mask(c0, t), symbol_from_mask(classical_wavelet(), t)};
  const ComplexMatrix m = modulation_matrix(symbols, t, vec({0.0}));
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 2);
  CHECK(std::abs(m(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(m(0, 1)) < 1e-15);
  // Unitarity in this normalization holds for sqrt(m) M; the modulation
  // defect uses the condition sum_n M_i M_j^* = delta.
  const FrequencyGrid grid(1, 32);
  CHECK(modulation_defect(symbols, t, grid).max_defect < 1e-12);
  const std::vector<std::vector<TrigMatrixPolynomial>> u = {polyphase(c0, t), polyphase(classical_wavelet(), t)};
  CHECK(polyphase_defect(u, grid).max_defect < 1e-12);

  std::vector<TrigMatrixPolynomial> doubled;
  for (const auto& s : symbols) {
    TrigMatrixPolynomial d(1, 1, 1, 2.0 * s.normalization());
    for (const auto& [k, coeff] : s.coefficients()) d.add(k, coeff);
    doubled.push_back(d);
  }
  for (const auto& [w, defect] : modulation_defect(doubled, t, grid).samples) CHECK(defect >= 3.0 - 1e-12);
}

TEST_CASE("modulation blocks") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const TrigMatrixPolynomial m0 = symbol_from_mask(lift_mask(oracle::cm_diag_haar(), t), t);
  const RealVector w = vec({0.1, 0.3});
  const ComplexMatrix m = modulation_matrix({m0, m0, m0, m0}, t, w);
  CHECK(m.rows() == 8);
  CHECK(m.cols() == 8);
  const auto& dual = t.dilation().dual_digits;
  for (size_t j = 0; j < dual.size(); ++j) {
    const RealVector shifted = w + to_real(dual[j]) / 2.0;
    CHECK(oracle::max_abs_diff(m.block(2, 2 * static_cast<Eigen::Index>(j), 2, 2), m0.evaluate(shifted)) < 1e-15);
  }
  CHECK_THROWS_AS(modulation_matrix({m0, m0, m0, m0, m0}, t, w), Error);
}

TEST_CASE("two-scale relation for the cascade solution") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const CellGeometry geom(t);
  const MatrixMask c = lift_mask(oracle::cm_diag_haar(), t);
  const TrigMatrixPolynomial m0 = symbol_from_mask(c, t);
  std::vector<RealVector> probes = {vec({0.1, 0.2}), vec({-0.3, 0.45}), vec({0.6, -0.15})};
  double prev = 0.0;
  for (int level : {4, 6}) {
    const TwoScaleReport r = two_scale_defect(geom, oracle::haar_triangle(level), m0, probes);
    if (prev > 0) CHECK(r.max_error < 0.5 * prev);
    prev = r.max_error;
  }
  // Direct check of the centroid rule against a closed form:
  // the Fourier transform of the unit-square indicator at xi = (0.5, 0).
  const CrystalTriple p1 = oracle::triple2("p1");
  const CellGeometry g1(p1);
  const SampledVectorFunction square{5, VectorField(IntBox::cube(2, 0, 32), 1), false};
  SampledVectorFunction sq = square;
  for (auto& v : sq.field.values) v = 1.0;
  const cd exact = (1.0 - std::exp(cd(0, -kPi))) / cd(0, kPi);
  CHECK(std::abs(sampled_fourier(g1, sq, vec({0.5, 0}))(0) - exact) < 1e-3);
}
