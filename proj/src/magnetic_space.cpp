#include "vemmhd/magnetic_space.hpp"

#include <cmath>

#include "vemmhd/exceptions.hpp"

namespace vemmhd {

namespace {

MatrixXd legendre_at(const EdgeQuadRule& rule, int deg) {
  MatrixXd out(rule.size(), deg + 1);
  for (int q = 0; q < rule.size(); ++q) out.row(q) = legendre_all(rule.t[q], deg).transpose();
  return out;
}

}  // namespace

int magnetic_dof_count(int n_vertices, int k) {
  return 2 * n_vertices + 2 * (k - 1) * n_vertices + k * (k - 1);
}

MagneticElement build_magnetic_element(const ElementGeometry& geom, int k) {
  if (k < 1) throw RankDeficiency("magnetic element requires k >= 1");
  MagneticElement el;
  el.k = k;
  el.geom = geom;
  el.table = monomial_integrals(geom, 2 * k + 4);

  const int nk = dim_Pk(k);
  const int nkm1 = dim_Pk(k - 1);
  const int nkm2 = dim_Pk(k - 2);
  const int nv = el.n_vertices();
  const int nd = el.n_dofs();
  const double area = geom.area;
  const ScaledMonomials mono_k(geom, k);
  const ScaledMonomials mono_km1(geom, k - 1);
  const auto& exps_k = monomial_exponents(k);

  double perimeter = 0.0;
  for (const auto& eu : geom.edges) perimeter += eu.length;

  // --- Edge traces ---------------------------------------------------------
  // Per component: P_k(e) from its two endpoint values and k-1 moments.
  el.edge_trace.resize(nv);
  for (int s = 0; s < nv; ++s) {
    const EdgeUse& eu = geom.edges[s];
    if (eu.length < 1e-14 * geom.diameter)
      throw IllConditionedTrace("near-zero edge in magnetic trace");
    const int vstart = eu.along_global ? s : (s + 1) % nv;  // global direction start
    const int vend = eu.along_global ? (s + 1) % nv : s;
    MatrixXd tr = MatrixXd::Zero(2 * (k + 1), nd);
    for (int c = 0; c < 2; ++c) {
      MatrixXd rows = MatrixXd::Zero(k + 1, nd);
      Eigen::RowVectorXd sum_end = Eigen::RowVectorXd::Zero(nd);
      Eigen::RowVectorXd sum_start = Eigen::RowVectorXd::Zero(nd);
      for (int j = 0; j + 2 <= k; ++j) {
        rows(j, el.edge_dof(s, j, c)) = 2.0 * j + 1.0;
        sum_end += rows.row(j);
        sum_start += (j % 2 == 0 ? 1.0 : -1.0) * rows.row(j);
      }
      Eigen::RowVectorXd r_end = -sum_end;
      Eigen::RowVectorXd r_start = -sum_start;
      r_end(el.vertex_dof(vend, c)) += 1.0;
      r_start(el.vertex_dof(vstart, c)) += 1.0;
      const double sgn = (k % 2 == 0) ? -1.0 : 1.0;  // (-1)^(k-1)
      rows.row(k - 1) = 0.5 * (r_end + sgn * r_start);
      rows.row(k) = 0.5 * (r_end - sgn * r_start);
      tr.middleRows(c * (k + 1), k + 1) = rows;
    }
    el.edge_trace[s] = std::move(tr);
  }

  // --- DOFs of the vector monomials -----------------------------------
  el.dof_of_poly = MatrixXd::Zero(nd, 2 * nk);
  {
    Eigen::Matrix<double, Eigen::Dynamic, 2> vpts(nv, 2);
    for (int i = 0; i < nv; ++i) vpts.row(i) = geom.edges[i].a.transpose();
    const MatrixXd vvals = mono_k.eval(vpts);
    for (int i = 0; i < nv; ++i)
      for (int m = 0; m < nk; ++m) {
        el.dof_of_poly(el.vertex_dof(i, 0), m) = vvals(i, m);
        el.dof_of_poly(el.vertex_dof(i, 1), nk + m) = vvals(i, m);
      }
    for (int s = 0; s < nv; ++s) {
      const EdgeQuadRule rule = edge_quadrature(geom.edges[s], 2 * k);
      const MatrixXd vals = mono_k.eval(rule.points);
      const MatrixXd leg = legendre_at(rule, std::max(k - 2, 0));
      for (int j = 0; j + 2 <= k; ++j)
        for (int m = 0; m < nk; ++m) {
          double mom = 0.0;
          for (int q = 0; q < rule.size(); ++q) mom += rule.weights[q] * vals(q, m) * leg(q, j);
          mom /= geom.edges[s].length;
          el.dof_of_poly(el.edge_dof(s, j, 0), m) = mom;
          el.dof_of_poly(el.edge_dof(s, j, 1), nk + m) = mom;
        }
    }
    const auto& exps_km2 = monomial_exponents(std::max(k - 2, 0));
    for (int g = 0; g < nkm2; ++g)
      for (int m = 0; m < nk; ++m) {
        const double mom =
            el.table.mono(exps_k[m].a + exps_km2[g].a, exps_k[m].b + exps_km2[g].b) / area;
        el.dof_of_poly(el.interior_dof(g, 0), m) = mom;
        el.dof_of_poly(el.interior_dof(g, 1), nk + m) = mom;
      }
  }

  // --- H1-type projection ----------------------------------------------
  const MatrixXd scal_stiff = stiffness_matrix(el.table, k);
  MatrixXd g_tilde = MatrixXd::Zero(2 * nk, 2 * nk);
  g_tilde.topLeftCorner(nk, nk) = scal_stiff;
  g_tilde.bottomRightCorner(nk, nk) = scal_stiff;

  MatrixXd b_tilde = MatrixXd::Zero(2 * nk, nd);
  const MatrixXd lap = mono_k.laplacian_coeffs();
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < nk; ++i)
      for (int g = 0; g < nkm2; ++g)
        b_tilde(c * nk + i, el.interior_dof(g, c)) -= lap(g, i) * area;
  for (int s = 0; s < nv; ++s) {
    const EdgeUse& eu = geom.edges[s];
    const EdgeQuadRule rule = edge_quadrature(eu, 2 * k);
    MatrixXd dx, dy;
    mono_k.eval_grad(rule.points, dx, dy);
    const MatrixXd leg = legendre_at(rule, k);
    for (int c = 0; c < 2; ++c) {
      const auto trace = el.edge_trace[s].middleRows(c * (k + 1), k + 1);
      for (int i = 0; i < nk; ++i) {
        Eigen::RowVectorXd lw = Eigen::RowVectorXd::Zero(k + 1);
        for (int q = 0; q < rule.size(); ++q)
          lw += rule.weights[q] * (dx(q, i) * eu.normal.x() + dy(q, i) * eu.normal.y()) *
                leg.row(q);
        b_tilde.row(c * nk + i) += lw * trace;
      }
    }
  }
  for (int c = 0; c < 2; ++c) {  // boundary mean fixes the constants
    const int row = c * nk;
    g_tilde.row(row).setZero();
    b_tilde.row(row).setZero();
    for (int s = 0; s < nv; ++s) {
      const EdgeQuadRule rule = edge_quadrature(geom.edges[s], k + 1);
      const MatrixXd vals = mono_k.eval(rule.points);
      for (int i = 0; i < nk; ++i)
        g_tilde(row, c * nk + i) += rule.weights.dot(vals.col(i)) / perimeter;
      // int_e trace = |e| * (Legendre coefficient 0)
      b_tilde.row(row) +=
          (geom.edges[s].length / perimeter) * el.edge_trace[s].row(c * (k + 1));
    }
  }
  Eigen::PartialPivLU<MatrixXd> glu(g_tilde);
  {
    const VectorXd d = glu.matrixLU().diagonal().cwiseAbs();
    if (d.minCoeff() <= 0.0 || d.maxCoeff() / d.minCoeff() > 1e14)
      throw RankDeficiency("H1 projector system is singular (degenerate element?)");
  }
  el.pi_nabla = glu.solve(b_tilde);
  el.dof_pi_nabla = el.dof_of_poly * el.pi_nabla;

  // --- L2 projection ------------------------------------------------------
  // Low moments from the interior dofs, top two degrees from the projection.
  MatrixXd moments = MatrixXd::Zero(2 * nk, nd);
  const MatrixXd mass_k = mass_matrix(el.table, k);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < nk; ++i) {
      if (exps_k[i].degree() <= k - 2) {
        moments(c * nk + i, el.interior_dof(i, c)) = area;
      } else {
        moments.row(c * nk + i) =
            mass_k.row(i) * el.pi_nabla.middleRows(c * nk, nk);
      }
    }
  Eigen::LLT<MatrixXd> llt_k(mass_k);
  if (llt_k.info() != Eigen::Success) throw SingularMass("degree k mass matrix");
  el.pi0.resize(2 * nk, nd);
  el.pi0.topRows(nk) = llt_k.solve(moments.topRows(nk));
  el.pi0.bottomRows(nk) = llt_k.solve(moments.bottomRows(nk));

  // --- curl / div representations ------------------------------------------
  // int curl(c) m = int c . (d2 m, -d1 m) + sum_e int_e m (c . t_ccw)
  // int div(c) m  = -int c . grad(m)     + sum_e int_e m (c . n)
  const MatrixXd d1 = mono_km1.deriv_coeffs(0);
  const MatrixXd d2 = mono_km1.deriv_coeffs(1);
  MatrixXd curl_mom = MatrixXd::Zero(nkm1, nd);
  MatrixXd div_mom = MatrixXd::Zero(nkm1, nd);
  for (int g = 0; g < nkm1; ++g)
    for (int gp = 0; gp < nkm2; ++gp) {
      if (d2(gp, g) != 0.0) curl_mom(g, el.interior_dof(gp, 0)) += d2(gp, g) * area;
      if (d1(gp, g) != 0.0) curl_mom(g, el.interior_dof(gp, 1)) -= d1(gp, g) * area;
      if (d1(gp, g) != 0.0) div_mom(g, el.interior_dof(gp, 0)) -= d1(gp, g) * area;
      if (d2(gp, g) != 0.0) div_mom(g, el.interior_dof(gp, 1)) -= d2(gp, g) * area;
    }
  for (int s = 0; s < nv; ++s) {
    const EdgeUse& eu = geom.edges[s];
    const Vec2 t_ccw = (eu.b - eu.a) / eu.length;  // cell traversal tangent
    const EdgeQuadRule rule = edge_quadrature(eu, 2 * k);
    const MatrixXd vals = mono_km1.eval(rule.points);
    const MatrixXd leg = legendre_at(rule, k);
    const auto tr0 = el.edge_trace[s].topRows(k + 1);
    const auto tr1 = el.edge_trace[s].bottomRows(k + 1);
    for (int g = 0; g < nkm1; ++g) {
      Eigen::RowVectorXd lw = Eigen::RowVectorXd::Zero(k + 1);
      for (int q = 0; q < rule.size(); ++q) lw += rule.weights[q] * vals(q, g) * leg.row(q);
      curl_mom.row(g) += lw * (t_ccw.x() * tr0 + t_ccw.y() * tr1);
      div_mom.row(g) += lw * (eu.normal.x() * tr0 + eu.normal.y() * tr1);
    }
  }
  const MatrixXd mass_km1 = mass_matrix(el.table, k - 1);
  Eigen::LLT<MatrixXd> llt_km1(mass_km1);
  if (llt_km1.info() != Eigen::Success) throw SingularMass("degree k-1 mass matrix");
  el.curl_rep = llt_km1.solve(curl_mom);
  el.div_rep = llt_km1.solve(div_mom);

  return el;
}

VectorXd magnetic_interpolate(const VectorField& f, const MagneticElement& el, int quad_order) {
  const int k = el.k;
  const int order = quad_order < 0 ? 2 * k + 4 : quad_order;
  VectorXd dofs = VectorXd::Zero(el.n_dofs());
  for (int i = 0; i < el.n_vertices(); ++i) {
    const Vec2 v = f(el.geom.edges[i].a);
    dofs[el.vertex_dof(i, 0)] = v.x();
    dofs[el.vertex_dof(i, 1)] = v.y();
  }
  if (k >= 2) {
    for (int s = 0; s < el.n_edges(); ++s) {
      const EdgeUse& eu = el.geom.edges[s];
      const EdgeQuadRule rule = edge_quadrature(eu, order);
      const MatrixXd leg = legendre_at(rule, k - 2);
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 v = f(rule.point(q));
        for (int j = 0; j + 2 <= k; ++j) {
          dofs[el.edge_dof(s, j, 0)] += rule.weights[q] * leg(q, j) * v.x() / eu.length;
          dofs[el.edge_dof(s, j, 1)] += rule.weights[q] * leg(q, j) * v.y() / eu.length;
        }
      }
    }
    const QuadRule rule = polygon_quadrature(el.geom, order);
    const ScaledMonomials mono_km2(el.geom, k - 2);
    const MatrixXd vals = mono_km2.eval(rule.points);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 v = f(rule.point(q));
      for (int g = 0; g < dim_Pk(k - 2); ++g) {
        dofs[el.interior_dof(g, 0)] += rule.weights[q] * vals(q, g) * v.x() / el.geom.area;
        dofs[el.interior_dof(g, 1)] += rule.weights[q] * vals(q, g) * v.y() / el.geom.area;
      }
    }
  }
  return dofs;
}

}  // namespace vemmhd
