#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vemmhd/experiments.hpp"
#include "vemmhd/magnetic_space.hpp"

using namespace vemmhd;

namespace {

ElementGeometry unit_square_geom() {
  return oracle::polygon_geometry({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

VectorXd random_poly(std::mt19937_64& rng, int dim) {
  VectorXd c(dim);
  for (int i = 0; i < dim; ++i) c[i] = 2.0 * oracle::rng_uniform(rng) - 1.0;
  return c;
}

}  // namespace

TEST_CASE("magnetic dof counts") {
  CHECK(magnetic_dof_count(4, 1) == 8);
  CHECK(magnetic_dof_count(5, 2) == 22);
  CHECK(magnetic_dof_count(3, 1) == 6);
}

TEST_CASE("edge trace: k=1 is linear interpolation of endpoint values") {
  const ElementGeometry geom = unit_square_geom();
  const MagneticElement el = build_magnetic_element(geom, 1);
  VectorXd dofs = VectorXd::Zero(el.n_dofs());
  dofs[el.vertex_dof(0, 0)] = 2.0;  // c1 at vertex (0,0)
  dofs[el.vertex_dof(1, 0)] = 4.0;  // c1 at vertex (1,0)
  const VectorXd tr = el.edge_trace[0] * dofs;  // bottom edge, component 0 coeffs
  // linear between 2 and 4 in the global parameter
  CHECK(tr[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(tr[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(tr[2]) < 1e-15);
  CHECK(std::abs(tr[3]) < 1e-15);
}

TEST_CASE("edge trace: k=2 bubble via a Vandermonde-moment oracle") {
  const ElementGeometry geom = unit_square_geom();
  const MagneticElement el = build_magnetic_element(geom, 2);
  VectorXd dofs = VectorXd::Zero(el.n_dofs());
  dofs[el.edge_dof(0, 0, 0)] = 1.0;  // unit mean moment, zero endpoints
  const VectorXd tr = (el.edge_trace[0] * dofs).head(3);

  // oracle: solve the 3x3 system (values at t=-1, t=1, mean moment)
  Eigen::Matrix3d vm;
  vm << 1, -1, 1,  // P_j(-1)
      1, 1, 1,     // P_j(1)
      1, 0, 0;     // mean over [-1,1] (Legendre orthogonality)
  const Eigen::Vector3d rhs(0.0, 0.0, 1.0);
  const Eigen::Vector3d ref = vm.colPivHouseholderQr().solve(rhs);
  CHECK((tr - ref).norm() < 1e-13);
}

TEST_CASE("traces of a global polynomial match its restriction") {
  std::mt19937_64 rng(3);
  const ElementGeometry geom =
      oracle::polygon_geometry(oracle::random_convex_polygon(rng, 5, 8));
  for (int k = 1; k <= 3; ++k) {
    const MagneticElement el = build_magnetic_element(geom, k);
    const int nk = dim_Pk(k);
    const VectorXd coeffs = random_poly(rng, 2 * nk);
    const VectorXd dofs = el.dof_of_poly * coeffs;
    const ScaledMonomials mono(geom, k);
    for (int s = 0; s < el.n_edges(); ++s) {
      const VectorXd tr = el.edge_trace[s] * dofs;
      const EdgeQuadRule rule = edge_quadrature(geom.edges[s], 2 * k + 2);
      const MatrixXd vals = mono.eval(rule.points);
      for (int q = 0; q < rule.size(); ++q) {
        const VectorXd leg = legendre_all(rule.t[q], k);
        const double c0 = (vals.row(q) * coeffs.head(nk)).value();
        const double c1 = (vals.row(q) * coeffs.tail(nk)).value();
        CHECK(std::abs(leg.dot(tr.head(k + 1)) - c0) < 1e-11 * (1.0 + std::abs(c0)));
        CHECK(std::abs(leg.dot(tr.tail(k + 1)) - c1) < 1e-11 * (1.0 + std::abs(c1)));
      }
    }
  }
}

TEST_CASE("inter-element trace agreement on a shared edge") {
  // two cells of a perturbed mesh share edge; traces from both sides agree
  const PolyMesh mesh = gen_family(MeshFamily::perturbed_quad, 2, 9);
  const GeomCache geom = build_geometry(mesh);
  int shared = -1;
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (!mesh.edges[e].boundary) shared = e;
  REQUIRE(shared >= 0);
  const MeshEdge& me = mesh.edges[shared];
  for (int k = 1; k <= 3; ++k) {
    const MagneticElement left = build_magnetic_element(geom[me.cell_left], k);
    const MagneticElement right = build_magnetic_element(geom[me.cell_right], k);
    // a shared global dof vector: assign deterministic values by global ids
    auto fill = [&](const MagneticElement& el, int cell) {
      VectorXd dofs = VectorXd::Zero(el.n_dofs());
      for (int i = 0; i < el.n_vertices(); ++i) {
        const int gv = mesh.cells[cell][i];
        dofs[el.vertex_dof(i, 0)] = std::sin(1.0 + gv);
        dofs[el.vertex_dof(i, 1)] = std::cos(2.0 + gv);
      }
      for (int s = 0; s < el.n_edges(); ++s) {
        const int ge = mesh.cell_edges[cell][s];
        for (int j = 0; j + 2 <= k; ++j) {
          dofs[el.edge_dof(s, j, 0)] = std::sin(3.0 + ge + j);
          dofs[el.edge_dof(s, j, 1)] = std::cos(4.0 + ge + j);
        }
      }
      return dofs;
    };
    int sl = -1, sr = -1;
    for (int s = 0; s < left.n_edges(); ++s)
      if (geom[me.cell_left].edges[s].edge_id == shared) sl = s;
    for (int s = 0; s < right.n_edges(); ++s)
      if (geom[me.cell_right].edges[s].edge_id == shared) sr = s;
    const VectorXd tl = left.edge_trace[sl] * fill(left, me.cell_left);
    const VectorXd tr = right.edge_trace[sr] * fill(right, me.cell_right);
    CHECK((tl - tr).norm() < 1e-12);
  }
}

TEST_CASE("projection and representation reproduction over random polygons") {
  std::mt19937_64 rng(41);
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const ElementGeometry geom = oracle::polygon_geometry(oracle::random_convex_polygon(rng));
    for (int k = 1; k <= 3; ++k) {
      const MagneticElement el = build_magnetic_element(geom, k);
      const int nk = dim_Pk(k);
      const VectorXd coeffs = random_poly(rng, 2 * nk);
      const VectorXd dofs = el.dof_of_poly * coeffs;
      const double scale = coeffs.norm();
      worst = std::max(worst, (el.pi_nabla * dofs - coeffs).norm() / scale);
      worst = std::max(worst, (el.pi0 * dofs - coeffs).norm() / scale);
      const ScaledMonomials mono(geom, k);
      const MatrixXd d1 = mono.deriv_coeffs(0);
      const MatrixXd d2 = mono.deriv_coeffs(1);
      const VectorXd curl_exact = d1 * coeffs.tail(nk) - d2 * coeffs.head(nk);
      const VectorXd div_exact = d1 * coeffs.head(nk) + d2 * coeffs.tail(nk);
      worst = std::max(worst,
                       (el.curl_rep * dofs - curl_exact).norm() / (1.0 + curl_exact.norm()));
      worst =
          std::max(worst, (el.div_rep * dofs - div_exact).norm() / (1.0 + div_exact.norm()));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("curl and div of reference fields") {
  const ElementGeometry geom = unit_square_geom();
  const MagneticElement el = build_magnetic_element(geom, 1);
  const int nk = dim_Pk(1);
  const double h = geom.diameter;

  VectorXd rot = VectorXd::Zero(2 * nk);  // (x2, -x1)
  rot[monomial_index(0, 1)] = h;
  rot[monomial_index(0, 0)] = geom.centroid.y();
  rot[nk + monomial_index(1, 0)] = -h;
  rot[nk + monomial_index(0, 0)] = -geom.centroid.x();
  VectorXd dofs = el.dof_of_poly * rot;
  CHECK((el.curl_rep * dofs)[0] == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(std::abs((el.div_rep * dofs)[0]) < 1e-13);

  VectorXd lin = VectorXd::Zero(2 * nk);  // (x1, x2)
  lin[monomial_index(1, 0)] = h;
  lin[monomial_index(0, 0)] = geom.centroid.x();
  lin[nk + monomial_index(0, 1)] = h;
  lin[nk + monomial_index(0, 0)] = geom.centroid.y();
  dofs = el.dof_of_poly * lin;
  CHECK((el.div_rep * dofs)[0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::abs((el.curl_rep * dofs)[0]) < 1e-13);
}

TEST_CASE("interpolated manufactured field: div representation decays") {
  const ManufacturedCase mc = example1_case({});
  for (const int k : {1, 2}) {
    std::vector<double> h, divnorm;
    for (const int n : {4, 8, 16}) {
      const PolyMesh mesh = gen_family(MeshFamily::quad, n);
      const GeomCache geom = build_geometry(mesh);
      double acc = 0.0;
      for (int c = 0; c < mesh.n_cells(); ++c) {
        const MagneticElement el = build_magnetic_element(geom[c], k);
        const VectorXd dofs = magnetic_interpolate(mc.exact.b, el);
        const VectorXd div_coeffs = el.div_rep * dofs;
        acc += div_coeffs.dot(mass_matrix(el.table, k - 1) * div_coeffs);
      }
      h.push_back(mesh_size(mesh));
      divnorm.push_back(std::sqrt(acc));
    }
    // exact div b = 0, so the interpolant's divergence must shrink at O(h^k)
    const double rate = std::log(divnorm[1] / divnorm[2]) / std::log(h[1] / h[2]);
    CHECK(rate > k - 0.3);
  }
}

TEST_CASE("interpolation of the manufactured magnetic field converges") {
  const ManufacturedCase mc = example1_case({});
  std::vector<double> h, e0;
  for (const int n : {4, 8, 16}) {
    const PolyMesh mesh = gen_family(MeshFamily::quad, n);
    const GeomCache geom = build_geometry(mesh);
    double l2 = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const MagneticElement el = build_magnetic_element(geom[c], 1);
      const VectorXd pi0 = el.pi0 * magnetic_interpolate(mc.exact.b, el);
      const QuadRule rule = polygon_quadrature(geom[c], 8);
      const ScaledMonomials mono(geom[c], 1);
      const MatrixXd vals = mono.eval(rule.points);
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 bh((vals.row(q) * pi0.head(dim_Pk(1))).value(),
                      (vals.row(q) * pi0.tail(dim_Pk(1))).value());
        l2 += rule.weights[q] * (mc.exact.b(rule.point(q)) - bh).squaredNorm();
      }
    }
    h.push_back(mesh_size(mesh));
    e0.push_back(std::sqrt(l2));
  }
  const double rate = std::log(e0[1] / e0[2]) / std::log(h[1] / h[2]);
  CHECK(rate == doctest::Approx(2.0).epsilon(0.13));

  const MagneticElement el = build_magnetic_element(unit_square_geom(), 2);
  const VectorXd z = magnetic_interpolate([](const Vec2&) { return Vec2::Zero().eval(); }, el);
  CHECK(z.norm() == 0.0);
}
