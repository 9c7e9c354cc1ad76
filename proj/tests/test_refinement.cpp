#include <doctest.h>

#include <random>
#include <set>

#include "crystal/attractor.hpp"
#include "crystal/error.hpp"
#include "crystal/grid.hpp"
#include "crystal/mask.hpp"
#include "crystal/transfer.hpp"
#include "oracles.hpp"

using namespace crystal;
using oracle::max_abs_diff;

namespace {

ComplexMatrix cmat(std::initializer_list<std::initializer_list<double>> rows) {
  ComplexMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("lift of the cm-diag Haar mask") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const MatrixMask c = lift_mask(oracle::cm_diag_haar(), t);
  CHECK(c.size() == 4);
  CHECK(max_abs_diff(c.tap(make_vector({0, 0})), cmat({{1, 0}, {0, 1}})) == 0.0);
  CHECK(max_abs_diff(c.tap(make_vector({1, 0})), cmat({{1, 1}, {0, 0}})) == 0.0);
  CHECK(max_abs_diff(c.tap(make_vector({0, 1})), cmat({{0, 0}, {1, 1}})) == 0.0);
  CHECK(max_abs_diff(c.tap(make_vector({1, 1})), cmat({{1, 0}, {0, 1}})) == 0.0);
  CHECK(c.symmetric());
}

TEST_CASE("lift for a trivial group is a reindexing") {
  const CrystalTriple t = oracle::triple2("p1");
  std::mt19937_64 rng(3);
  const ScalarMask d = oracle::random_mask(rng, t, 6, 2);
  const MatrixMask c = lift_mask(d, t);
  CHECK(c.size() == d.size());
  for (const auto& [g, v] : d.entries()) CHECK(c.tap(g.translation)(0, 0) == v);
  CHECK(lift_mask(ScalarMask(2), t).empty());
}

TEST_CASE("symmetry check") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  MatrixMask bad(2, 2);
  bad.set_tap(make_vector({0, 0}), cmat({{1, 0}, {0, 0}}));
  const SymmetryReport r = check_gamma_a_symmetry(bad, t);
  CHECK_FALSE(r.ok);
  CHECK(r.max_violation == doctest::Approx(1.0));
  REQUIRE(r.witness);
  CHECK_THROWS_AS(extract_scalar(bad, t), Error);

  std::mt19937_64 rng(11);
  for (const char* name : {"p1", "cm-diag", "pm", "p4"}) {
    const CrystalTriple u = oracle::triple2(name);
    for (int n = 0; n < 10; ++n) {
      const ScalarMask d = oracle::random_mask(rng, u, 8, 3);
      const MatrixMask c = lift_mask(d, u);
      const SymmetryReport s = check_gamma_a_symmetry(c, u);
      CHECK(s.ok);
      CHECK(s.max_violation == 0.0);
      const ScalarMask back = extract_scalar(c, u);
      CHECK(back.entries() == d.entries());
    }
  }
  // r = 1: any matrix mask is symmetric.
  const CrystalTriple p1 = oracle::triple2("p1");
  MatrixMask any(2, 1);
  any.set_tap(make_vector({3, -1}), cmat({{2.5}}));
  CHECK(check_gamma_a_symmetry(any, p1).ok);
}

TEST_CASE("extract recovers the Haar entries") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  MatrixMask c(2, 2);
  c.set_tap(make_vector({0, 0}), cmat({{1, 0}, {0, 1}}));
  c.set_tap(make_vector({1, 0}), cmat({{1, 1}, {0, 0}}));
  c.set_tap(make_vector({0, 1}), cmat({{0, 0}, {1, 1}}));
  c.set_tap(make_vector({1, 1}), cmat({{1, 0}, {0, 1}}));
  const ScalarMask d = extract_scalar(c, t);
  CHECK(d.entries() == oracle::cm_diag_haar().entries());
  CHECK(extract_scalar(MatrixMask(2, 2), t).empty());
}

TEST_CASE("contraction") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const ContractionReport haar = check_contraction(oracle::cm_diag_haar(), t);
  CHECK(haar.sum_sq == 4.0);
  CHECK(haar.m == 4);
  CHECK_FALSE(haar.strict);
  const ContractionReport scaled = check_contraction(oracle::cm_diag_haar().scaled(0.9), t);
  CHECK(scaled.sum_sq == doctest::Approx(3.24));
  CHECK(scaled.strict);
  const ContractionReport empty = check_contraction(ScalarMask(2), t);
  CHECK(empty.sum_sq == 0.0);
  CHECK(empty.strict);
}

TEST_CASE("attractor of the binary digits on the line") {
  const IntMatrix a = make_matrix({{2}});
  for (int depth : {4, 8, 10}) {
    AttractorOptions o;
    o.depth = depth;
    const AttractorEstimate e = attractor_estimate(a, {make_vector({0}), make_vector({1})}, o);
    double gap = 0.0;  // one-sided distance from [0, 1] to K_n, probed finely
    for (int s = 0; s <= 4096; ++s) {
      const double x = s / 4096.0;
      double best = 1e9;
      for (const auto& p : e.points) best = std::min(best, std::abs(p[0] - x));
      gap = std::max(gap, best);
    }
    double spill = 0.0;
    for (const auto& p : e.points) spill = std::max({spill, -p[0], p[0] - 1.0});
    CHECK(std::max(gap, spill) <= std::ldexp(1.0, -depth) + 1e-15);
    REQUIRE(e.tiling_defect);
    CHECK(*e.tiling_defect == doctest::Approx(0.0));
    CHECK(e.support_radius == doctest::Approx(1.0));
  }
}

TEST_CASE("attractor tiling defect") {
  AttractorOptions o;
  o.depth = 10;
  const AttractorEstimate square =
      attractor_estimate(2 * IntMatrix::Identity(2, 2), oracle::triple2("p1").dilation().digits, o);
  REQUIRE(square.tiling_defect);
  CHECK(*square.tiling_defect < 1e-12);

  // {0, 2}: K = [0, 2]; brute-force oracle of coverage modulo Z on a raster.
  o.depth = 12;
  const AttractorEstimate wide = attractor_estimate(make_matrix({{2}}), {make_vector({0}), make_vector({2})}, o);
  REQUIRE(wide.tiling_defect);
  const int level = wide.raster_level;
  const Int cells = Int{1} << level;
  std::vector<int> coverage(static_cast<size_t>(cells), 0);
  std::set<Int> occupied;
  for (const auto& p : wide.points) occupied.insert(static_cast<Int>(std::floor(p[0] * cells)));
  for (Int c : occupied) ++coverage[static_cast<size_t>(((c % cells) + cells) % cells)];
  double dev = 0.0;
  for (int v : coverage) dev += std::abs(v - 1);
  CHECK(*wide.tiling_defect == doctest::Approx(0.5 * dev / static_cast<double>(cells)).epsilon(1e-12));
  CHECK(*wide.tiling_defect == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("attractor budget") {
  AttractorOptions o;
  o.depth = 30;
  o.max_points = 1000;
  CHECK_THROWS_AS(attractor_estimate(make_matrix({{2}}), {make_vector({0}), make_vector({1})}, o), Error);
}

TEST_CASE("transfer with the identity tap is a dilated resample") {
  const CrystalTriple t = oracle::triple2("p1");
  const CellGeometry geom(t);
  std::mt19937_64 rng(5);
  const IntBox box(make_vector({-3, -2}), make_vector({5, 6}));
  const SampledVectorFunction f = oracle::random_intertwined(rng, t, 3, box);
  MatrixMask id(2, 1);
  id.set_tap(make_vector({0, 0}), ComplexMatrix::Identity(1, 1));
  const SampledVectorFunction g = apply_transfer(geom, id, f);
  CHECK(g.level == 4);
  const VectorField expect = oracle::transfer_by_points(id, f, g.field.box.expanded(2));
  double err = 0.0;
  for (size_t c = 0; c < expect.box.size(); ++c) {
    err = std::max(err, std::abs(expect.at(c, 0) - g.field.read(expect.box.point(c), 0)));
  }
  CHECK(err == 0.0);
}

TEST_CASE("transfer matches point evaluation and preserves intertwining") {
  std::mt19937_64 rng(17);
  for (const char* name : {"cm-diag", "pm", "p4"}) {
    CAPTURE(name);
    const CrystalTriple t = oracle::triple2(name);
    const CellGeometry geom(t);
    for (int n = 0; n < 4; ++n) {
      const MatrixMask c = lift_mask(oracle::random_mask(rng, t, 5, 2), t);
      const SampledVectorFunction f = oracle::random_intertwined(rng, t, 4, IntBox::cube(2, -12, 12));
      REQUIRE(oracle::intertwining_defect(t, f) == 0.0);
      const SampledVectorFunction g = apply_transfer(geom, c, f);
      const VectorField expect = oracle::transfer_by_points(c, f, g.field.box.expanded(1));
      double err = 0.0;
      for (size_t k = 0; k < expect.box.size(); ++k) {
        for (int i = 0; i < t.order(); ++i) {
          err = std::max(err, std::abs(expect.at(k, i) - g.field.read(expect.box.point(k), i)));
        }
      }
      CHECK(err < 1e-12);
      CHECK(oracle::intertwining_defect(t, g) < 1e-12);
      CHECK(check_intertwined(geom, g, 1e-12).ok);
    }
  }
}

TEST_CASE("transfer reports an undersized target") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const CellGeometry geom(t);
  const MatrixMask c = lift_mask(oracle::cm_diag_haar(), t);
  const SampledVectorFunction f = oracle::haar_triangle(3);
  try {
    apply_transfer(geom, c, f, IntBox::cube(2, 0, 4));
    FAIL("expected GridTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridTooSmall);
    CHECK(e.witness().contains("required"));
  }
}

TEST_CASE("Haar triangle is a fixed point of the transfer operator") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const CellGeometry geom(t);
  const MatrixMask c = lift_mask(oracle::cm_diag_haar(), t);
  for (int level : {2, 5, 7}) {
    const SampledVectorFunction f = oracle::haar_triangle(level);
    const SampledVectorFunction g = apply_transfer(geom, c, f);
    const SampledVectorFunction exact = oracle::haar_triangle(level + 1);
    double err = 0.0;
    for (size_t k = 0; k < exact.field.box.size(); ++k) {
      for (int i = 0; i < 2; ++i) {
        err = std::max(err, std::abs(exact.field.at(k, i) - g.field.read(exact.field.box.point(k), i)));
      }
    }
    CHECK(err <= 1e-12);
    CHECK(g.field.nonzero_box() == exact.field.box);
    CHECK(refinement_residual(geom, c, f) <= 1e-12);
  }
}

TEST_CASE("polygon indicator reproduces exact triangle averages") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const CellGeometry geom(t);
  std::vector<RealVector> tri(3, RealVector(2));
  tri[0] << 0, 0;
  tri[1] << 1, 0;
  tri[2] << 1, 1;
  const SampledVectorFunction p = polygon_indicator(geom, 6, tri);
  const SampledVectorFunction exact = oracle::haar_triangle(6);
  double err = 0.0;
  for (size_t k = 0; k < exact.field.box.size(); ++k) {
    err = std::max(err, std::abs(std::sqrt(2.0) * p.field.read(exact.field.box.point(k), 0) - exact.field.at(k, 0)));
  }
  CHECK(err < 1e-12);
  const SampledVectorFunction v = intertwine(geom, p);
  CHECK(oracle::intertwining_defect(t, v) < 1e-15);
}

TEST_CASE("restriction inverts piecewise-constant prolongation") {
  const CrystalTriple t = oracle::triple2("p4");
  const CellGeometry geom(t);
  std::mt19937_64 rng(23);
  const SampledVectorFunction f = oracle::random_intertwined(rng, t, 3, IntBox::cube(2, -5, 5));
  const SampledVectorFunction back = restrict_level(geom, prolong_level(geom, f));
  CHECK(back.level == 3);
  CHECK(l2_distance(geom, back, f) < 1e-13);
  CHECK(l2_norm(geom, prolong_level(geom, f)) == doctest::Approx(l2_norm(geom, f)));
}

TEST_CASE("cascade: classical Haar") {
  const CrystalTriple t = oracle::triple2("line");
  const CellGeometry geom(t);
  const MatrixMask c = lift_mask(oracle::line_mask({{0, 1.0}, {1, 1.0}}), t);
  CascadeOptions o;
  o.level = 10;
  o.iterations = 10;
  const CascadeResult r = cascade_solve(geom, c, o);
  CHECK(r.converged);
  CHECK(r.residual < 1e-10);
  for (double d : r.trace) CHECK(d < 1e-10);
  // chi_[0,1) on level-10 cells
  double err = 0.0;
  const IntBox& box = r.solution.field.box;
  for (Int j = box.lo()[0] - 2; j < box.hi()[0] + 2; ++j) {
    const double expect = (j >= 0 && j < 1024) ? 1.0 : 0.0;
    err += std::norm(r.solution.field.read(make_vector({j}), 0) - expect);
  }
  CHECK(std::sqrt(err / 1024.0) < 1e-12);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("cascade: Haar triangle") {
  const CrystalTriple t = oracle::triple2("cm-diag");
  const CellGeometry geom(t);
  const MatrixMask c = lift_mask(oracle::cm_diag_haar(), t);
  CascadeOptions o;
  o.level = 6;
  o.iterations = 6;
  const CascadeResult r = cascade_solve(geom, c, o);
  CHECK(r.converged);
  CHECK(r.residual < 1e-12);
  const SampledVectorFunction exact = oracle::haar_triangle(6);
  CHECK(l2_distance(geom, r.solution, exact) < 1e-12);

  // Start from the exact triangle at level 4: fixed at the first step.
  CascadeOptions tri;
  tri.level = 5;
  tri.iterations = 1;
  tri.init = CascadeInit::Custom;
  tri.custom = oracle::haar_triangle(4);
  const CascadeResult one = cascade_solve(geom, c, tri);
  REQUIRE(one.trace.size() == 1);
  CHECK(one.trace[0] < 1e-12);
}

TEST_CASE("cascade: strict contraction decays geometrically") {
  const CrystalTriple t = oracle::triple2("line");
  const CellGeometry geom(t);
  const ScalarMask d = oracle::line_mask({{0, 0.9}, {1, 0.9}});
  CHECK(check_contraction(d, t).strict);
  CascadeOptions o;
  o.level = 12;
  o.iterations = 12;
  o.tol = 1e-14;
  const CascadeResult r = cascade_solve(geom, lift_mask(d, t), o);
  CHECK(r.warnings.empty());
  CHECK_FALSE(r.non_convergent);
  const double factor = std::sqrt(1.62 / 2.0);
  for (size_t s = 3; s < r.trace.size(); ++s) {
    CHECK(r.trace[s] / r.trace[s - 1] == doctest::Approx(factor).epsilon(1e-9));
  }
}

TEST_CASE("cascade flags divergence") {
  const CrystalTriple t = oracle::triple2("line");
  const CellGeometry geom(t);
  CascadeOptions o;
  o.level = 10;
  o.iterations = 10;
  const CascadeResult r = cascade_solve(geom, lift_mask(oracle::line_mask({{0, 1.5}, {1, 1.5}}), t), o);
  CHECK(r.non_convergent);
  CHECK_FALSE(r.converged);
}
