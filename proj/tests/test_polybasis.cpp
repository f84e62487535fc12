#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vemmhd/exceptions.hpp"
#include "vemmhd/polybasis.hpp"
#include "vemmhd/quadrature.hpp"

using namespace vemmhd;

namespace {

ElementGeometry unit_square_geom() {
  return oracle::polygon_geometry({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

}  // namespace

TEST_CASE("polygon quadrature on the unit square") {
  const ElementGeometry geom = unit_square_geom();
  const QuadRule r = polygon_quadrature(geom, 4);
  CHECK(r.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  double ixy = 0.0;
  for (int q = 0; q < r.size(); ++q)
    ixy += r.weights[q] * r.points(q, 0) * r.points(q, 0) * r.points(q, 1) * r.points(q, 1);
  CHECK(ixy == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("quadrature matches the Green's-theorem oracle on random polygons") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const auto poly = oracle::random_convex_polygon(rng, 5, 5);
    const ElementGeometry geom = oracle::polygon_geometry(poly);
    const int deg = 6;
    const MonomialIntegrals table = monomial_integrals(geom, deg);
    for (const Exp& e : monomial_exponents(deg)) {
      const double ref =
          oracle::greens_monomial(poly, geom.centroid, geom.diameter, e.a, e.b);
      const double scale = std::max(std::abs(ref), geom.area * 1e-3);
      CHECK(std::abs(table.mono(e.a, e.b) - ref) < 1e-12 * scale);
    }
  }
}

TEST_CASE("edge quadrature basics and Legendre orthogonality") {
  const ElementGeometry geom = unit_square_geom();
  const EdgeUse& e = geom.edges[0];
  const EdgeQuadRule r = edge_quadrature(e, 3);
  CHECK(r.weights.sum() == doctest::Approx(e.length).epsilon(1e-14));
  // int_0^1 s^3 ds with s the arclength along the bottom edge
  double s3 = 0.0;
  for (int q = 0; q < r.size(); ++q) s3 += r.weights[q] * std::pow(r.points(q, 0), 3);
  CHECK(s3 == doctest::Approx(0.25).epsilon(1e-14));

  const EdgeQuadRule rr = edge_quadrature(e, 12);
  for (int i = 0; i <= 5; ++i)
    for (int j = 0; j < i; ++j) {
      double dot = 0.0;
      for (int q = 0; q < rr.size(); ++q) {
        const VectorXd leg = legendre_all(rr.t[q], 5);
        dot += rr.weights[q] * leg[i] * leg[j];
      }
      CHECK(std::abs(dot) < 1e-14);
    }
}

TEST_CASE("scaled monomial values and derivatives") {
  const ElementGeometry geom = unit_square_geom();
  Eigen::Matrix<double, 1, 2> pt;
  pt << 0.73, 0.21;

  const ScaledMonomials m0(geom, 0);
  CHECK(m0.eval(pt)(0, 0) == 1.0);

  const ScaledMonomials m1(geom, 1);
  MatrixXd dx, dy;
  m1.eval_grad(pt, dx, dy);
  CHECK(dx(0, monomial_index(1, 0)) == doctest::Approx(1.0 / geom.diameter).epsilon(1e-14));
  CHECK(dy(0, monomial_index(1, 0)) == 0.0);

  const ScaledMonomials m2(geom, 2);
  const MatrixXd lap = m2.laplacian_coeffs();
  CHECK(lap(0, monomial_index(2, 0)) ==
        doctest::Approx(2.0 / (geom.diameter * geom.diameter)).epsilon(1e-14));
}

TEST_CASE("mass matrices are SPD on generated meshes") {
  for (const MeshFamily fam : {MeshFamily::quad, MeshFamily::voronoi, MeshFamily::tri}) {
    const PolyMesh mesh = gen_family(fam, 4, 3);
    const GeomCache geom = build_geometry(mesh);
    for (const auto& elem : geom.elems) {
      const MonomialIntegrals table = monomial_integrals(elem, 8);
      for (int k = 0; k <= 4; ++k) {
        Eigen::LLT<MatrixXd> llt(mass_matrix(table, k));
        CHECK(llt.info() == Eigen::Success);
      }
    }
  }
}

TEST_CASE("vector polynomial decomposition dimensions and round trip") {
  CHECK(dim_Pk(2) - 1 + dim_Pk(0) == 2 * dim_Pk(1));   // k=1: 5 + 1 = 6
  CHECK(dim_Pk(3) - 1 + dim_Pk(1) == 2 * dim_Pk(2));   // k=2: 9 + 3 = 12
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto poly = oracle::random_convex_polygon(rng);
    const ElementGeometry geom = oracle::polygon_geometry(poly);
    for (int k = 1; k <= 4; ++k) {
      const Pk2Decomposition dec = decompose_Pk2(geom, k);
      const MatrixXd round = dec.split_to_mono * dec.mono_to_split;
      worst = std::max(worst,
                       (round - MatrixXd::Identity(round.rows(), round.cols())).norm());
    }
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("constant field (0,1) decomposes into a pure gradient") {
  const ElementGeometry geom = unit_square_geom();
  const int k = 1;
  const Pk2Decomposition dec = decompose_Pk2(geom, k);
  VectorXd e = VectorXd::Zero(2 * dim_Pk(k));
  e[dim_Pk(k) + monomial_index(0, 0)] = 1.0;  // y-component constant
  const VectorXd split = dec.mono_to_split * e;
  for (int i = dec.n_grad; i < split.size(); ++i) CHECK(std::abs(split[i]) < 1e-13);
}

TEST_CASE("analytic L2 projection") {
  const ElementGeometry geom = unit_square_geom();
  const MonomialIntegrals table = monomial_integrals(geom, 8);
  const int k = 2;

  // reproduces polynomials
  const ScaledMonomials mono(geom, k);
  VectorXd coeffs = VectorXd::Zero(dim_Pk(k));
  coeffs[monomial_index(1, 1)] = 2.5;
  coeffs[monomial_index(0, 0)] = -1.0;
  ScalarField f = [&](const Vec2& x) {
    Eigen::Matrix<double, 1, 2> pt;
    pt << x.x(), x.y();
    return (mono.eval(pt) * coeffs).value();
  };
  const VectorXd proj = l2_project_scalar(f, geom, table, k);
  CHECK((proj - coeffs).norm() < 1e-12);

  // residual of a non-polynomial is L2-orthogonal to P_1
  ScalarField sinpx = [](const Vec2& x) { return std::sin(M_PI * x.x()); };
  const VectorXd fit = l2_project_scalar(sinpx, geom, table, 1, 12);
  const QuadRule rule = polygon_quadrature(geom, 12);
  const ScaledMonomials mono1(geom, 1);
  const MatrixXd vals = mono1.eval(rule.points);
  for (int i = 0; i < dim_Pk(1); ++i) {
    double dot = 0.0;
    for (int q = 0; q < rule.size(); ++q)
      dot += rule.weights[q] * vals(q, i) *
             (sinpx(rule.point(q)) - (mono1.eval(rule.points.row(q)) * fit).value());
    CHECK(std::abs(dot) < 1e-12);
  }

  // zero data maps to zero
  const VectorXd z = l2_project_scalar([](const Vec2&) { return 0.0; }, geom, table, 2);
  CHECK(z.norm() == 0.0);
}
