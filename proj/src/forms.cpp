#include "vemmhd/forms.hpp"

#include "vemmhd/exceptions.hpp"

namespace vemmhd {

void ModelParams::validate() const {
  if (!(Rnu > 0.0) || !(Rm > 0.0) || !(Sc > 0.0))
    throw std::invalid_argument("model parameters must be strictly positive");
}

MatrixXd local_a0(const ModelParams& params, const VelocityElement& el) {
  const int nk = dim_Pk(el.k);
  const MatrixXd stiff = stiffness_matrix(el.table, el.k);
  const auto px = el.pi_nabla.topRows(nk);
  const auto py = el.pi_nabla.bottomRows(nk);
  MatrixXd a0 = px.transpose() * stiff * px + py.transpose() * stiff * py;
  const MatrixXd rem = MatrixXd::Identity(el.n_dofs(), el.n_dofs()) - el.dof_pi_nabla;
  a0 += rem.transpose() * rem;
  return a0 / params.Rnu;
}

MatrixXd local_a1(const ModelParams& params, const MagneticElement& el) {
  const MatrixXd mass_km1 = mass_matrix(el.table, el.k - 1);
  MatrixXd a1 = el.curl_rep.transpose() * mass_km1 * el.curl_rep +
                el.div_rep.transpose() * mass_km1 * el.div_rep;
  const MatrixXd rem = MatrixXd::Identity(el.n_dofs(), el.n_dofs()) - el.dof_pi_nabla;
  a1 += rem.transpose() * rem;
  return (params.Sc / params.Rm) * a1;
}

MatrixXd local_d(const VelocityElement& el) {
  return mass_matrix(el.table, el.k - 1) * el.div_rep;
}

MatrixXd local_c2(const VelocityElement& el, const VectorXd& u_prev_dofs) {
  const int k = el.k;
  const int nk = dim_Pk(k);
  const int nkm1 = dim_Pk(k - 1);
  const int nd = el.n_dofs();
  const VectorXd u_coeffs = el.pi0 * u_prev_dofs;

  const QuadRule rule = polygon_quadrature(el.geom, 3 * k);
  const ScaledMonomials mono_k(el.geom, k);
  const ScaledMonomials mono_km1(el.geom, k - 1);
  const MatrixXd phi = mono_k.eval(rule.points);
  const MatrixXd psi = mono_km1.eval(rule.points);

  MatrixXd m = MatrixXd::Zero(nd, nd);
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::RowVectorXd v0 = phi.row(q) * el.pi0.topRows(nk);
    const Eigen::RowVectorXd v1 = phi.row(q) * el.pi0.bottomRows(nk);
    const double u0 = (phi.row(q) * u_coeffs.head(nk)).value();
    const double u1 = (phi.row(q) * u_coeffs.tail(nk)).value();
    // W_r = row of (grad w_j) applied to the previous velocity value
    const Eigen::RowVectorXd w0 = u0 * (psi.row(q) * el.grad_proj.middleRows(0, nkm1)) +
                                  u1 * (psi.row(q) * el.grad_proj.middleRows(nkm1, nkm1));
    const Eigen::RowVectorXd w1 = u0 * (psi.row(q) * el.grad_proj.middleRows(2 * nkm1, nkm1)) +
                                  u1 * (psi.row(q) * el.grad_proj.middleRows(3 * nkm1, nkm1));
    m += rule.weights[q] * (v0.transpose() * w0 + v1.transpose() * w1);
  }
  return 0.5 * (m - m.transpose());
}

CouplingBlocks local_c3(const ModelParams& params, const VelocityElement& vel,
                        const MagneticElement& mag, const VectorXd& b_prev_dofs) {
  const int k = vel.k;
  const int nk = dim_Pk(k);
  const int nkm1 = dim_Pk(k - 1);
  const VectorXd b_coeffs = mag.pi0 * b_prev_dofs;

  const QuadRule rule = polygon_quadrature(vel.geom, 3 * k);
  const ScaledMonomials mono_k(vel.geom, k);
  const ScaledMonomials mono_km1(vel.geom, k - 1);
  const MatrixXd phi = mono_k.eval(rule.points);
  const MatrixXd psi = mono_km1.eval(rule.points);

  CouplingBlocks blocks;
  blocks.c3a = MatrixXd::Zero(vel.n_dofs(), mag.n_dofs());
  blocks.c3b = MatrixXd::Zero(mag.n_dofs(), vel.n_dofs());
  for (int q = 0; q < rule.size(); ++q) {
    const double b0 = (phi.row(q) * b_coeffs.head(nk)).value();
    const double b1 = (phi.row(q) * b_coeffs.tail(nk)).value();
    const Eigen::RowVectorXd v0 = phi.row(q) * vel.pi0.topRows(nk);
    const Eigen::RowVectorXd v1 = phi.row(q) * vel.pi0.bottomRows(nk);
    const Eigen::RowVectorXd curl_row = psi.row(q) * mag.curl_rep;
    // (s x B) . V = s (B1 V2 - B2 V1) with the scalar-cross convention
    const Eigen::RowVectorXd bv = b0 * v1 - b1 * v0;
    const double w = params.Sc * rule.weights[q];
    blocks.c3a -= w * bv.transpose() * curl_row;
    blocks.c3b += w * curl_row.transpose() * bv;
  }
  return blocks;
}

VectorXd local_rhs_vel(const VectorField& f, const VelocityElement& el) {
  const int nk = dim_Pk(el.k);
  const VectorXd f_coeffs = l2_project_vector(f, el.geom, el.table, el.k);
  const MatrixXd mass = mass_matrix(el.table, el.k);
  VectorXd rhs = el.pi0.topRows(nk).transpose() * (mass * f_coeffs.head(nk));
  rhs += el.pi0.bottomRows(nk).transpose() * (mass * f_coeffs.tail(nk));
  return rhs;
}

VectorXd local_rhs_mag(const VectorField& g, const MagneticElement& el) {
  const int nk = dim_Pk(el.k);
  const VectorXd g_coeffs = l2_project_vector(g, el.geom, el.table, el.k);
  const MatrixXd mass = mass_matrix(el.table, el.k);
  VectorXd rhs = el.pi0.topRows(nk).transpose() * (mass * g_coeffs.head(nk));
  rhs += el.pi0.bottomRows(nk).transpose() * (mass * g_coeffs.tail(nk));
  return rhs;
}

double ExactForms::a0(const ModelParams& p, const VectorXd& u, const VectorXd& v) const {
  const int nk = dim_Pk(k);
  const MatrixXd stiff = stiffness_matrix(table, k);
  return (u.head(nk).dot(stiff * v.head(nk)) + u.tail(nk).dot(stiff * v.tail(nk))) / p.Rnu;
}

double ExactForms::a1(const ModelParams& p, const VectorXd& b, const VectorXd& c) const {
  // curl/div of the polynomial arguments, integrated exactly by quadrature
  const QuadRule rule = polygon_quadrature(geom, 2 * k);
  const ScaledMonomials mono_k(geom, k);
  MatrixXd dx, dy;
  mono_k.eval_grad(rule.points, dx, dy);
  const int nk = dim_Pk(k);
  double acc = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const double curl_b = (dx.row(q) * b.tail(nk)).value() - (dy.row(q) * b.head(nk)).value();
    const double curl_c = (dx.row(q) * c.tail(nk)).value() - (dy.row(q) * c.head(nk)).value();
    const double div_b = (dx.row(q) * b.head(nk)).value() + (dy.row(q) * b.tail(nk)).value();
    const double div_c = (dx.row(q) * c.head(nk)).value() + (dy.row(q) * c.tail(nk)).value();
    acc += rule.weights[q] * (curl_b * curl_c + div_b * div_c);
  }
  return (p.Sc / p.Rm) * acc;
}

double ExactForms::a2(const VectorXd& u, const VectorXd& w, const VectorXd& v) const {
  const QuadRule rule = polygon_quadrature(geom, 3 * k);
  const ScaledMonomials mono_k(geom, k);
  const MatrixXd phi = mono_k.eval(rule.points);
  MatrixXd dx, dy;
  mono_k.eval_grad(rule.points, dx, dy);
  const int nk = dim_Pk(k);
  auto val = [&](const VectorXd& c, int q) {
    return Vec2((phi.row(q) * c.head(nk)).value(), (phi.row(q) * c.tail(nk)).value());
  };
  auto grad_times = [&](const VectorXd& c, int q, const Vec2& a) {
    return Vec2((dx.row(q) * c.head(nk)).value() * a.x() + (dy.row(q) * c.head(nk)).value() * a.y(),
                (dx.row(q) * c.tail(nk)).value() * a.x() + (dy.row(q) * c.tail(nk)).value() * a.y());
  };
  double acc = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 uu = val(u, q), ww = val(w, q), vv = val(v, q);
    acc += rule.weights[q] *
           0.5 * (grad_times(w, q, uu).dot(vv) - grad_times(v, q, uu).dot(ww));
  }
  return acc;
}

double ExactForms::a3(const ModelParams& p, const VectorXd& psi, const VectorXd& b,
                      const VectorXd& v) const {
  const QuadRule rule = polygon_quadrature(geom, 3 * k);
  const ScaledMonomials mono_k(geom, k);
  const MatrixXd phi = mono_k.eval(rule.points);
  MatrixXd dx, dy;
  mono_k.eval_grad(rule.points, dx, dy);
  const int nk = dim_Pk(k);
  double acc = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const double s = (dx.row(q) * psi.tail(nk)).value() - (dy.row(q) * psi.head(nk)).value();
    const Vec2 bb((phi.row(q) * b.head(nk)).value(), (phi.row(q) * b.tail(nk)).value());
    const Vec2 vv((phi.row(q) * v.head(nk)).value(), (phi.row(q) * v.tail(nk)).value());
    acc += rule.weights[q] * s * (bb.x() * vv.y() - bb.y() * vv.x());
  }
  return p.Sc * acc;
}

double ExactForms::d(const VectorXd& v, const VectorXd& q_coeffs) const {
  const QuadRule rule = polygon_quadrature(geom, 2 * k);
  const ScaledMonomials mono_k(geom, k);
  const ScaledMonomials mono_km1(geom, k - 1);
  const MatrixXd psi = mono_km1.eval(rule.points);
  MatrixXd dx, dy;
  mono_k.eval_grad(rule.points, dx, dy);
  const int nk = dim_Pk(k);
  double acc = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const double div_v = (dx.row(q) * v.head(nk)).value() + (dy.row(q) * v.tail(nk)).value();
    acc += rule.weights[q] * div_v * (psi.row(q) * q_coeffs).value();
  }
  return acc;
}

}  // namespace vemmhd
