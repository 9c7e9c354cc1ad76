#include <doctest.h>

#include <random>

#include "crystal/bank.hpp"
#include "crystal/error.hpp"
#include "crystal/mra.hpp"
#include "crystal/tile.hpp"
#include "crystal/transfer.hpp"
#include "crystal/transform.hpp"
#include "crystal/trig_poly.hpp"
#include "oracles.hpp"

using namespace crystal;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidInput;
}

FilterBank classical_bank(cd wavelet_second = -1.0) {
  const CrystalTriple t = oracle::triple2("line");
  return FilterBank::from_scalar(t, {oracle::line_mask({{0, 1.0}, {1, 1.0}}),
                                     oracle::line_mask({{0, 1.0}, {1, wavelet_second}})});
}

std::vector<GroupElement> haar_pieces() {
  const auto k = oracle::haar_pieces_translations();
  return {{0, k[0]}, {0, k[1]}, {0, k[2]}, {1, k[3]}};
}

SampledVectorFunction triangle_tile(const CellGeometry& geom, int level) {
  std::vector<RealVector> tri(3, RealVector(2));
  tri[0] << 0, 0;
  tri[1] << 1, 0;
  tri[2] << 1, 1;
  return polygon_indicator(geom, level, tri);
}

VectorField random_field(std::mt19937_64& rng, const IntBox& box, int r) {
  std::normal_distribution<double> z;
  VectorField f(box, r);
  for (auto& v : f.values) v = cd(z(rng), z(rng));
  return f;
}

double max_error_on(const VectorField& a, const VectorField& ref) {
  double err = 0.0;
  for (size_t c = 0; c < ref.box.size(); ++c) {
    for (int i = 0; i < ref.r; ++i) err = std::max(err, std::abs(a.read(ref.box.point(c), i) - ref.at(c, i)));
  }
  // Anything a stores outside the reference box must vanish.
  for (size_t c = 0; c < a.box.size(); ++c) {
    if (ref.box.contains(a.box.point(c))) continue;
    for (int i = 0; i < a.r; ++i) err = std::max(err, std::abs(a.at(c, i)));
  }
  return err;
}

FilterBank completed_haar() {
  const CrystalTriple t = oracle::triple2("cm-diag");
  return complete_constant_polyphase(lift_mask(oracle::cm_diag_haar(), t), t);
}

}  // namespace

TEST_CASE("condition (d) on the classical Haar bank") {
  const ConditionDReport ok = check_condition_d(classical_bank());
  CHECK(ok.ok);
  CHECK(ok.max_violation == 0.0);
  const ConditionDReport bad = check_condition_d(classical_bank(1.0));
  CHECK_FALSE(bad.ok);
  CHECK(bad.max_violation == doctest::Approx(1.0));
  REQUIRE(bad.witness);
  const auto& [i, j, v] = *bad.witness;
  CHECK(std::min(i, j) == 0);
  CHECK(std::max(i, j) == 1);
  CHECK(v == make_vector({0}));
}

TEST_CASE("condition (d) on the cm-diag Haar scaling mask alone") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const FilterBank partial = FilterBank::from_scalar(t, {oracle::cm_diag_haar()});
  const ConditionDReport r = check_condition_d(partial);
  CHECK(r.ok);
  CHECK(r.max_violation < 1e-15);
  // Oracle: (1/4) sum_k c_k c_k^* = I.
  ComplexMatrix acc = ComplexMatrix::Zero(2, 2);
  for (const auto& [k, c] : partial.masks[0].taps()) acc += c * c.adjoint();
  CHECK(oracle::max_abs_diff(acc / 4.0, ComplexMatrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("condition (d) flags an asymmetric mask") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  FilterBank cm = FilterBank::from_scalar(t, {oracle::cm_diag_haar()});
  ComplexMatrix tap = cm.masks[0].tap(make_vector({0, 0}));
  tap(1, 1) = 0.0;
  cm.masks[0].set_tap(make_vector({0, 0}), tap);
  const ConditionDReport r = check_condition_d(cm);
  CHECK_FALSE(r.ok);
  REQUIRE(r.asymmetric_mask);
  CHECK(*r.asymmetric_mask == 0);
  CHECK(r.symmetry_violation > 0.5);
}

TEST_CASE("completion of the classical Haar scaling mask") {
  const CrystalTriple t = oracle::triple2("line");
  const FilterBank b = complete_constant_polyphase(lift_mask(oracle::line_mask({{0, 1.0}, {1, 1.0}}), t), t);
  REQUIRE(b.m() == 2);
  const cd w0 = b.scalar_masks[1].get({0, make_vector({0})});
  const cd w1 = b.scalar_masks[1].get({0, make_vector({1})});
  CHECK(std::abs(w0) == doctest::Approx(1.0));
  CHECK(std::abs(w1 / w0 + 1.0) < 1e-12);
  CHECK(check_condition_d(b).ok);
}

TEST_CASE("completion of the cm-diag Haar scaling mask") {
  const FilterBank b = completed_haar();
  REQUIRE(b.m() == 4);
  const ConditionDReport r = check_condition_d(b, 1e-10);
  CHECK(r.ok);
  CHECK(r.symmetry_violation == 0.0);
  for (const auto& c : b.masks) CHECK(check_gamma_a_symmetry(c, b.triple, 0.0).ok);
  const FrequencyGrid grid(2, 8);
  CHECK(polyphase_defect(b.polyphase_components(), grid).max_defect < 1e-12);
  CHECK(modulation_defect(b.symbols(), b.triple, grid).max_defect < 1e-12);
  const ComplexMatrix u = polyphase_matrix(b.polyphase_components(), RealVector::Zero(2));
  CHECK(u.rows() == 8);
  CHECK(u.cols() == 8);
  CHECK(unitarity_defect(u) < 1e-12);
  // Deterministic.
  const FilterBank again = completed_haar();
  for (size_t l = 0; l < 4; ++l) CHECK(again.scalar_masks[l].entries() == b.scalar_masks[l].entries());
}

TEST_CASE("completion on p1") {
  const CrystalTriple t = oracle::triple2("p1");
  ScalarMask d(2);
  for (const auto& k : t.dilation().digits) d.set(0, k, 1.0);
  const FilterBank b = complete_constant_polyphase(lift_mask(d, t), t);
  CHECK(b.m() == 4);
  CHECK(check_condition_d(b).ok);
}

TEST_CASE("completion preconditions") {
  const CrystalTriple t = oracle::triple2("line");
  CHECK(kind_of([&] {
          complete_constant_polyphase(lift_mask(oracle::line_mask({{0, 1.0}, {2, 1.0}}), t), t);
        }) == ErrorKind::NotConstantPolyphase);
  CHECK(kind_of([&] {
          complete_constant_polyphase(lift_mask(oracle::line_mask({{0, 1.0}, {1, 0.5}}), t), t);
        }) == ErrorKind::ScalingNotOrthonormal);
}

TEST_CASE("condition (d) and unitarity agree on randomized banks") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> eps(-5.0, -1.0);
  const FilterBank base = completed_haar();
  const FrequencyGrid grid(2, 6);
  int passing = 0;
  for (int n = 0; n < 30; ++n) {
    // Mix the masks with a random unitary, then break every other bank.
    ComplexMatrix g(4, 4);
    for (Eigen::Index e = 0; e < 16; ++e) g(e / 4, e % 4) = cd(z(rng), z(rng));
    const ComplexMatrix v = Eigen::HouseholderQR<ComplexMatrix>(g).householderQ();
    std::vector<ScalarMask> mixed(4, ScalarMask(2));
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        for (const auto& [gamma, val] : base.scalar_masks[static_cast<size_t>(b)].entries()) {
          mixed[static_cast<size_t>(a)].set(gamma, mixed[static_cast<size_t>(a)].get(gamma) + v(a, b) * val);
        }
      }
    }
    if (n % 2 == 1) {
      const auto& [gamma, val] = *mixed[1].entries().begin();
      mixed[1].set(gamma, val + std::pow(10.0, eps(rng)));
    }
    const FilterBank bank = FilterBank::from_scalar(base.triple, mixed);
    const bool d_ok = check_condition_d(bank, 1e-8).ok;
    const bool u_ok = polyphase_defect(bank.polyphase_components(), grid).max_defect <= 1e-8;
    CHECK(d_ok == u_ok);
    CHECK(d_ok == (n % 2 == 0));
    passing += d_ok;
  }
  CHECK(passing == 15);
}

TEST_CASE("analysis and synthesis for the classical Haar bank") {
  const FilterBank b = classical_bank();
  VectorField s(IntBox(make_vector({0}), make_vector({4})), 1);
  s.values = {1.0, 1.0, 0.0, 0.0};
  const auto w = analyze_one_level(b, s);
  REQUIRE(w.size() == 2);
  CHECK(std::abs(w[0].read(make_vector({0}), 0) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(w[0].read(make_vector({1}), 0)) < 1e-15);
  CHECK(w[1].max_abs() < 1e-15);

  VectorField w0(IntBox(make_vector({0}), make_vector({2})), 1);
  w0.values = {std::sqrt(2.0), 0.0};
  VectorField w1(IntBox(make_vector({0}), make_vector({2})), 1);
  const VectorField back = synthesize_one_level(b, {w0, w1});
  CHECK(max_error_on(back, s) < 1e-15);

  VectorField zero(IntBox(make_vector({-3}), make_vector({5})), 1);
  for (const auto& x : analyze_one_level(b, zero)) CHECK(x.max_abs() == 0.0);
}

TEST_CASE("constant input under classical Haar has no detail") {
  const FilterBank b = classical_bank();
  VectorField s(IntBox(make_vector({0}), make_vector({64})), 1);
  for (auto& v : s.values) v = 3.0;
  const Pyramid p = transform_multilevel(b, s, 4);
  for (size_t j = 0; j < 4; ++j) {
    const IntBox& in = p.input_boxes[j];
    // Boundary windows straddle the zero padding; interior coefficients vanish.
    const auto& w = p.details[j][0];
    for (size_t c = 0; c < w.box.size(); ++c) {
      const Int v = w.box.point(c)[0];
      if (2 * v >= in.lo()[0] && 2 * v + 1 < in.hi()[0]) CHECK(std::abs(w.at(c, 0)) < 1e-12);
    }
  }
}

TEST_CASE("Parseval and perfect reconstruction on cm-diag") {
  const FilterBank b = completed_haar();
  std::mt19937_64 rng(47);
  const VectorField s = random_field(rng, IntBox::cube(2, 0, 16), 2);
  const auto w = analyze_one_level(b, s);
  double energy = 0.0;
  for (const auto& x : w) energy += x.norm_sq();
  CHECK(std::abs(energy - s.norm_sq()) < 1e-10 * s.norm_sq());
  CHECK(max_error_on(synthesize_one_level(b, w, s.box), s) < 1e-12);
  CHECK(max_error_on(synthesize_one_level(b, w), s) < 1e-12);
  for (int levels : {1, 3, 4}) {
    const Pyramid p = transform_multilevel(b, s, levels);
    CHECK(max_error_on(inverse_multilevel(b, p), s) < 1e-10);
  }
}

TEST_CASE("multilevel on a random mask bank with a wide support") {
  // Shift each mask by a different swap-invariant multiple of A: still
  // constant polyphase, with the taps of different masks far apart.
  const FilterBank base = completed_haar();
  std::vector<ScalarMask> shifted;
  Int step = 0;
  for (const auto& d : base.scalar_masks) {
    ScalarMask e(2);
    for (const auto& [g, v] : d.entries()) {
      e.set(g.point, g.translation + make_vector({2 * step, 2 * step}), v);
    }
    shifted.push_back(e);
    ++step;
  }
  const FilterBank b = FilterBank::from_scalar(base.triple, shifted);
  REQUIRE(check_condition_d(b).ok);
  std::mt19937_64 rng(53);
  const VectorField s = random_field(rng, IntBox(make_vector({-3, 2}), make_vector({17, 13})), 2);
  const Pyramid p = transform_multilevel(b, s, 3);
  CHECK(max_error_on(inverse_multilevel(b, p), s) < 1e-10);
}

TEST_CASE("multilevel underflow") {
  const FilterBank b = classical_bank();
  VectorField s(IntBox(make_vector({0}), make_vector({0})), 1);
  CHECK(kind_of([&] { transform_multilevel(b, s, 2); }) == ErrorKind::BoxUnderflow);
}

TEST_CASE("vectorize") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  std::mt19937_64 rng(59);
  const VectorField f = random_field(rng, IntBox::cube(2, -2, 5), 1);
  const VectorField s = vectorize(t, f);
  CHECK(s.r == 2);
  for (size_t c = 0; c < s.box.size(); ++c) {
    const IntVector k = s.box.point(c);
    CHECK(s.at(c, 0) == f.read(k, 0));
    CHECK(s.at(c, 1) == f.read(make_vector({k[1], k[0]}), 0));
  }
}

TEST_CASE("Haar mask from the triangle tile") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const CellGeometry geom(t);
  const HaarTileResult r = haar_from_tile(geom, haar_pieces(), triangle_tile(geom, 8));
  CHECK(r.defect < 1e-12);
  CHECK(r.measure == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.expected_measure == 0.5);
  CHECK(r.fixed_point_residual < 1e-12);
  CHECK(r.mask.entries() == oracle::cm_diag_haar().entries());
  CHECK(r.lifted.size() == 4);

  // The IFS raster converges to the same tile.
  const HaarTileResult ifs = haar_from_tile(geom, haar_pieces(), tile_from_pieces(geom, haar_pieces(), 7));
  CHECK(ifs.defect <= ifs.tol);
  CHECK(ifs.measure == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("Haar construction rejects a wrong decomposition") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const CellGeometry geom(t);
  const auto k = oracle::haar_pieces_translations();
  const std::vector<GroupElement> translates = {{0, k[0]}, {0, k[1]}, {0, k[2]}, {0, k[3]}};
  CHECK(kind_of([&] { haar_from_tile(geom, translates, triangle_tile(geom, 6)); }) ==
        ErrorKind::NotATileDecomposition);
  const std::vector<GroupElement> three = {{0, k[0]}, {0, k[1]}, {0, k[2]}};
  CHECK(kind_of([&] { haar_from_tile(geom, three, triangle_tile(geom, 6)); }) == ErrorKind::PieceCountMismatch);
}

TEST_CASE("Haar on the line") {
  const CrystalTriple t = oracle::triple2("line");
  const CellGeometry geom(t);
  std::vector<RealVector> unit(2, RealVector(1));
  unit[0] << 0.0;
  unit[1] << 1.0;
  const std::vector<GroupElement> pieces = {{0, make_vector({0})}, {0, make_vector({1})}};
  const HaarTileResult r = haar_from_tile(geom, pieces, polygon_indicator(geom, 6, unit));
  CHECK(r.defect == 0.0);
  CHECK(r.measure == doctest::Approx(1.0));
  CHECK(r.mask.entries() == oracle::line_mask({{0, 1.0}, {1, 1.0}}).entries());
}

TEST_CASE("orthonormal translates") {
  const CrystalTriple line = oracle::triple2("line");
  const CellGeometry g1(line);
  const int n = 8;
  SampledVectorFunction box{n, VectorField(IntBox(make_vector({0}), make_vector({256})), 1), true};
  for (auto& v : box.field.values) v = 1.0;
  const OrthonormalityReport haar = check_orthonormal_translates(g1, box);
  CHECK(haar.ok);
  CHECK(haar.defect <= std::ldexp(1.0, -n));

  SampledVectorFunction wide{n, VectorField(IntBox(make_vector({0}), make_vector({512})), 1), true};
  for (auto& v : wide.field.values) v = 1.0;
  const OrthonormalityReport two = orthonormality_defect(g1, wide);
  CHECK(two.defect == doctest::Approx(1.0));
  CHECK_FALSE(two.ok);

  const CrystalTriple t = oracle::triple2("cm-diag");
  const CellGeometry geom(t);
  const OrthonormalityReport tri = check_orthonormal_translates(geom, oracle::haar_triangle(8));
  CHECK(tri.ok);
  CHECK(tri.defect <= tri.quadrature_error + 1e-12);
  CHECK(tri.norm_sq == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("density condition") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const CellGeometry geom(t);
  const DensityReport r = check_density_condition(geom, oracle::haar_triangle(6));
  CHECK(r.lhs == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.rhs == 0.5);
  CHECK(r.ok);
  SampledVectorFunction doubled = oracle::haar_triangle(6);
  for (auto& v : doubled.field.values) v *= 2.0;
  const DensityReport d = check_density_condition(geom, doubled);
  CHECK(d.lhs == doctest::Approx(4 * d.rhs));
  CHECK_FALSE(d.ok);
}

TEST_CASE("check_mra verdicts") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const CellGeometry geom(t);
  MraOptions o;
  o.level = 7;
  o.iterations = 7;
  const MraReport haar = check_mra(geom, oracle::cm_diag_haar(), o);
  CHECK(haar.ok());
  CHECK(haar.refinability_residual < 1e-12);

  const CrystalTriple line = oracle::triple2("line");
  const CellGeometry g1(line);
  MraOptions ol;
  ol.level = 10;
  ol.iterations = 10;
  const MraReport mixed = check_mra(g1, oracle::line_mask({{0, 0.9}, {1, 0.9}}), ol);
  CHECK(mixed.refinable);
  CHECK(mixed.contraction.strict);
  CHECK(mixed.orthonormality.defect > 0.5);
  CHECK_FALSE(mixed.ok());

  const MraReport zero = check_mra(g1, ScalarMask(1), ol);
  CHECK_FALSE(zero.density.ok);
  CHECK_FALSE(zero.ok());
}
