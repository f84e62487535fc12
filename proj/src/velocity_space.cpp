#include "vemmhd/velocity_space.hpp"

#include <cmath>

#include "vemmhd/exceptions.hpp"

namespace vemmhd {

namespace {

// Legendre values at the rule's parameters: npts x (deg+1).
MatrixXd legendre_at(const EdgeQuadRule& rule, int deg) {
  MatrixXd out(rule.size(), deg + 1);
  for (int q = 0; q < rule.size(); ++q) out.row(q) = legendre_all(rule.t[q], deg).transpose();
  return out;
}

}  // namespace

int velocity_dof_count(int n_edges, int k) { return 2 * k * n_edges + k * (k - 1); }

VelocityElement build_velocity_element(const ElementGeometry& geom, int k) {
  if (k < 1) throw RankDeficiency("velocity element requires k >= 1");
  VelocityElement el;
  el.k = k;
  el.geom = geom;
  el.table = monomial_integrals(geom, 2 * k + 4);

  const int nk = dim_Pk(k);
  const int nkm1 = dim_Pk(k - 1);
  const int nkm2 = dim_Pk(k - 2);
  const int ne = el.n_edges();
  const int nd = el.n_dofs();
  const double area = geom.area;
  const ScaledMonomials mono_k(geom, k);
  const ScaledMonomials mono_km1(geom, k - 1);
  const auto& exps_k = monomial_exponents(k);
  const auto& exps_km1 = k >= 1 ? monomial_exponents(k - 1) : monomial_exponents(0);

  double perimeter = 0.0;
  for (const auto& eu : geom.edges) perimeter += eu.length;

  // --- DOFs of the vector monomials -----------------------------------
  el.dof_of_poly = MatrixXd::Zero(nd, 2 * nk);
  for (int s = 0; s < ne; ++s) {
    const EdgeQuadRule rule = edge_quadrature(geom.edges[s], 2 * k);
    const MatrixXd vals = mono_k.eval(rule.points);
    const MatrixXd leg = legendre_at(rule, k - 1);
    const double inv_len = 1.0 / geom.edges[s].length;
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < nk; ++i) {
        double m = 0.0;
        for (int q = 0; q < rule.size(); ++q) m += rule.weights[q] * vals(q, i) * leg(q, j);
        m *= inv_len;
        el.dof_of_poly(el.edge_dof(s, j, 0), i) = m;
        el.dof_of_poly(el.edge_dof(s, j, 1), nk + i) = m;
      }
  }
  for (int g = 0; g < nkm2; ++g)
    for (int i = 0; i < nk; ++i) {
      const double m = el.table.mono(exps_k[i].a + monomial_exponents(k - 2)[g].a,
                                     exps_k[i].b + monomial_exponents(k - 2)[g].b) /
                       area;
      el.dof_of_poly(el.interior_dof(g, 0), i) = m;
      el.dof_of_poly(el.interior_dof(g, 1), nk + i) = m;
    }

  // --- H1-type projection ----------------------------------------------
  // Rows: int grad(v) : grad(m_vec) by parts = -int v . lap(m_vec)
  //       + sum_e int_e v . (grad(m_vec) n).
  const MatrixXd scal_stiff = stiffness_matrix(el.table, k);
  MatrixXd g_tilde = MatrixXd::Zero(2 * nk, 2 * nk);
  g_tilde.topLeftCorner(nk, nk) = scal_stiff;
  g_tilde.bottomRightCorner(nk, nk) = scal_stiff;

  MatrixXd b_tilde = MatrixXd::Zero(2 * nk, nd);
  const MatrixXd lap = mono_k.laplacian_coeffs();  // nkm2 x nk
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < nk; ++i)
      for (int g = 0; g < nkm2; ++g)
        b_tilde(c * nk + i, el.interior_dof(g, c)) -= lap(g, i) * area;
  for (int s = 0; s < ne; ++s) {
    const EdgeUse& eu = geom.edges[s];
    const EdgeQuadRule rule = edge_quadrature(eu, 2 * k);
    MatrixXd dx, dy;
    mono_k.eval_grad(rule.points, dx, dy);
    const MatrixXd leg = legendre_at(rule, k - 1);
    for (int i = 0; i < nk; ++i) {
      // g(s) = grad(m_i) . n restricted to the edge, expanded in Legendre
      for (int j = 0; j < k; ++j) {
        double coef = 0.0;
        for (int q = 0; q < rule.size(); ++q)
          coef += rule.weights[q] * leg(q, j) *
                  (dx(q, i) * eu.normal.x() + dy(q, i) * eu.normal.y());
        coef *= (2.0 * j + 1.0) / eu.length;  // Legendre expansion coefficient
        for (int c = 0; c < 2; ++c)
          b_tilde(c * nk + i, el.edge_dof(s, j, c)) += coef * eu.length;
      }
    }
  }
  // Constant kernel fixed by the boundary mean.
  for (int c = 0; c < 2; ++c) {
    const int row = c * nk;  // constant monomial of component c
    g_tilde.row(row).setZero();
    b_tilde.row(row).setZero();
    for (int s = 0; s < ne; ++s) {
      const EdgeQuadRule rule = edge_quadrature(geom.edges[s], k + 1);
      const MatrixXd vals = mono_k.eval(rule.points);
      for (int i = 0; i < nk; ++i)
        g_tilde(row, c * nk + i) += rule.weights.dot(vals.col(i)) / perimeter;
      b_tilde(row, el.edge_dof(s, 0, c)) += geom.edges[s].length / perimeter;
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

  // --- Edge normal traces ------------------------------------------------
  // v.n is in P_k(e); coefficients up to k-1 come straight from the edge
  // moments, the top one from the projection (enhancement constraint).
  el.edge_normal_trace.resize(ne);
  for (int s = 0; s < ne; ++s) {
    const EdgeUse& eu = geom.edges[s];
    MatrixXd ent = MatrixXd::Zero(k + 1, nd);
    for (int j = 0; j < k; ++j) {
      ent(j, el.edge_dof(s, j, 0)) = (2.0 * j + 1.0) * eu.normal.x();
      ent(j, el.edge_dof(s, j, 1)) = (2.0 * j + 1.0) * eu.normal.y();
    }
    const EdgeQuadRule rule = edge_quadrature(eu, 2 * k);
    const MatrixXd vals = mono_k.eval(rule.points);
    const MatrixXd leg = legendre_at(rule, k);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(2 * nk);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * leg(q, k);
      row.head(nk) += w * eu.normal.x() * vals.row(q);
      row.tail(nk) += w * eu.normal.y() * vals.row(q);
    }
    ent.row(k) = ((2.0 * k + 1.0) / eu.length) * (row * el.pi_nabla);
    el.edge_normal_trace[s] = std::move(ent);
  }

  // --- Divergence representation ----------------------------------------
  MatrixXd div_moments = MatrixXd::Zero(nkm1, nd);
  const MatrixXd d1 = mono_km1.deriv_coeffs(0);  // nkm2 x nkm1
  const MatrixXd d2 = mono_km1.deriv_coeffs(1);
  for (int g = 0; g < nkm1; ++g)
    for (int gp = 0; gp < nkm2; ++gp) {
      if (d1(gp, g) != 0.0) div_moments(g, el.interior_dof(gp, 0)) -= d1(gp, g) * area;
      if (d2(gp, g) != 0.0) div_moments(g, el.interior_dof(gp, 1)) -= d2(gp, g) * area;
    }
  for (int s = 0; s < ne; ++s) {
    const EdgeQuadRule rule = edge_quadrature(geom.edges[s], 2 * k);
    const MatrixXd vals = mono_km1.eval(rule.points);
    const MatrixXd leg = legendre_at(rule, k);
    for (int g = 0; g < nkm1; ++g) {
      Eigen::RowVectorXd lw = Eigen::RowVectorXd::Zero(k + 1);
      for (int q = 0; q < rule.size(); ++q) lw += rule.weights[q] * vals(q, g) * leg.row(q);
      div_moments.row(g) += lw * el.edge_normal_trace[s];
    }
  }
  const MatrixXd mass_km1 = mass_matrix(el.table, k - 1);
  Eigen::LLT<MatrixXd> llt_km1(mass_km1);
  if (llt_km1.info() != Eigen::Success) throw SingularMass("degree k-1 mass matrix");
  el.div_rep = llt_km1.solve(div_moments);

  // --- L2 projection ------------------------------------------------------
  // Moments against the split basis, then change of basis to monomials.
  const Pk2Decomposition dec = decompose_Pk2(geom, k);
  MatrixXd f_split = MatrixXd::Zero(2 * nk, nd);
  const auto& exps_kp1 = monomial_exponents(k + 1);
  for (int i = 1; i < dim_Pk(k + 1); ++i) {
    // int v . h grad(m_i) = h ( -int div(v) m_i + sum_e int_e (v.n) m_i )
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nd);
    for (int g = 0; g < nkm1; ++g)
      row -= el.table.mono(exps_km1[g].a + exps_kp1[i].a, exps_km1[g].b + exps_kp1[i].b) *
             el.div_rep.row(g);
    const ScaledMonomials mono_kp1(geom, k + 1);
    for (int s = 0; s < ne; ++s) {
      const EdgeQuadRule rule = edge_quadrature(geom.edges[s], 2 * k + 1);
      const MatrixXd vals = mono_kp1.eval(rule.points);
      const MatrixXd leg = legendre_at(rule, k);
      Eigen::RowVectorXd lw = Eigen::RowVectorXd::Zero(k + 1);
      for (int q = 0; q < rule.size(); ++q) lw += rule.weights[q] * vals(q, i) * leg.row(q);
      row += lw * el.edge_normal_trace[s];
    }
    f_split.row(i - 1) = geom.diameter * row;
  }
  for (int g = 0; g < nkm1; ++g) {
    // w_g = x_perp m_g = (-m_{g+e2}, m_{g+e1})
    const int a = exps_km1[g].a, b = exps_km1[g].b;
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nd);
    if (exps_km1[g].degree() <= k - 3) {
      row(el.interior_dof(monomial_index(a, b + 1), 0)) = -area;
      row(el.interior_dof(monomial_index(a + 1, b), 1)) = area;
    } else {
      // moments of the projection, per the enhanced space definition
      for (int i = 0; i < nk; ++i) {
        const int ia = exps_k[i].a, ib = exps_k[i].b;
        row -= el.table.mono(ia + a, ib + b + 1) * el.pi_nabla.row(i);
        row += el.table.mono(ia + a + 1, ib + b) * el.pi_nabla.row(nk + i);
      }
    }
    f_split.row(dec.n_grad + g) = row;
  }
  const MatrixXd moments = dec.mono_to_split.transpose() * f_split;
  const MatrixXd mass_k = mass_matrix(el.table, k);
  Eigen::LLT<MatrixXd> llt_k(mass_k);
  if (llt_k.info() != Eigen::Success) throw SingularMass("degree k mass matrix");
  el.pi0.resize(2 * nk, nd);
  el.pi0.topRows(nk) = llt_k.solve(moments.topRows(nk));
  el.pi0.bottomRows(nk) = llt_k.solve(moments.bottomRows(nk));

  // --- Gradient L2 projection --------------------------------------------
  // (grad v, m)_rc = -int v_r d_c(m) + sum_e n_c int_e v_r m.
  el.grad_proj.resize(4 * nkm1, nd);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      MatrixXd mom = MatrixXd::Zero(nkm1, nd);
      const MatrixXd& dc = (c == 0) ? d1 : d2;
      for (int g = 0; g < nkm1; ++g)
        for (int gp = 0; gp < nkm2; ++gp)
          if (dc(gp, g) != 0.0) mom(g, el.interior_dof(gp, r)) -= dc(gp, g) * area;
      for (int s = 0; s < ne; ++s) {
        const EdgeUse& eu = geom.edges[s];
        const double nc = (c == 0) ? eu.normal.x() : eu.normal.y();
        const EdgeQuadRule rule = edge_quadrature(eu, 2 * k);
        const MatrixXd vals = mono_km1.eval(rule.points);
        const MatrixXd leg = legendre_at(rule, k - 1);
        for (int g = 0; g < nkm1; ++g)
          for (int j = 0; j < k; ++j) {
            double coef = 0.0;
            for (int q = 0; q < rule.size(); ++q)
              coef += rule.weights[q] * vals(q, g) * leg(q, j);
            mom(g, el.edge_dof(s, j, r)) += nc * coef * (2.0 * j + 1.0);
          }
      }
      el.grad_proj.middleRows((2 * r + c) * nkm1, nkm1) = llt_km1.solve(mom);
    }

  return el;
}

VectorXd velocity_interpolate(const VectorField& f, const VelocityElement& el, int quad_order) {
  const int k = el.k;
  const int order = quad_order < 0 ? 2 * k + 4 : quad_order;
  VectorXd dofs = VectorXd::Zero(el.n_dofs());
  for (int s = 0; s < el.n_edges(); ++s) {
    const EdgeUse& eu = el.geom.edges[s];
    const EdgeQuadRule rule = edge_quadrature(eu, order);
    const MatrixXd leg = legendre_at(rule, k - 1);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 v = f(rule.point(q));
      for (int j = 0; j < k; ++j) {
        dofs[el.edge_dof(s, j, 0)] += rule.weights[q] * leg(q, j) * v.x() / eu.length;
        dofs[el.edge_dof(s, j, 1)] += rule.weights[q] * leg(q, j) * v.y() / eu.length;
      }
    }
  }
  if (k >= 2) {
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
