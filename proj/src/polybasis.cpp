#include "vemmhd/polybasis.hpp"

#include <cmath>
#include <mutex>

#include "vemmhd/exceptions.hpp"

namespace vemmhd {

const std::vector<Exp>& monomial_exponents(int k) {
  static std::vector<std::vector<Exp>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  for (int deg = static_cast<int>(cache.size()); deg <= k; ++deg) {
    std::vector<Exp> exps;
    exps.reserve(dim_Pk(deg));
    for (int d = 0; d <= deg; ++d)
      for (int b = 0; b <= d; ++b) exps.push_back({d - b, b});
    cache.push_back(std::move(exps));
  }
  return cache[k];
}

MatrixXd ScaledMonomials::eval(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const {
  const auto& exps = monomial_exponents(degree);
  const int np = static_cast<int>(pts.rows());
  // powers of the scaled coordinates up to `degree`
  MatrixXd px(np, degree + 1), py(np, degree + 1);
  px.col(0).setOnes();
  py.col(0).setOnes();
  for (int d = 1; d <= degree; ++d) {
    px.col(d) = px.col(d - 1).cwiseProduct((pts.col(0).array() - center.x()).matrix() / h);
    py.col(d) = py.col(d - 1).cwiseProduct((pts.col(1).array() - center.y()).matrix() / h);
  }
  MatrixXd out(np, dim());
  for (int i = 0; i < dim(); ++i) out.col(i) = px.col(exps[i].a).cwiseProduct(py.col(exps[i].b));
  return out;
}

void ScaledMonomials::eval_grad(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts, MatrixXd& dx,
                                MatrixXd& dy) const {
  const auto& exps = monomial_exponents(degree);
  const int np = static_cast<int>(pts.rows());
  MatrixXd px(np, degree + 1), py(np, degree + 1);
  px.col(0).setOnes();
  py.col(0).setOnes();
  for (int d = 1; d <= degree; ++d) {
    px.col(d) = px.col(d - 1).cwiseProduct((pts.col(0).array() - center.x()).matrix() / h);
    py.col(d) = py.col(d - 1).cwiseProduct((pts.col(1).array() - center.y()).matrix() / h);
  }
  dx.resize(np, dim());
  dy.resize(np, dim());
  for (int i = 0; i < dim(); ++i) {
    const int a = exps[i].a, b = exps[i].b;
    dx.col(i) = (a == 0) ? VectorXd::Zero(np).eval()
                         : (a / h) * px.col(a - 1).cwiseProduct(py.col(b));
    dy.col(i) = (b == 0) ? VectorXd::Zero(np).eval()
                         : (b / h) * px.col(a).cwiseProduct(py.col(b - 1));
  }
}

MatrixXd ScaledMonomials::deriv_coeffs(int c) const {
  const auto& exps = monomial_exponents(degree);
  MatrixXd out = MatrixXd::Zero(dim_Pk(degree - 1), dim());
  for (int i = 0; i < dim(); ++i) {
    const int a = exps[i].a, b = exps[i].b;
    if (c == 0 && a > 0) out(monomial_index(a - 1, b), i) = a / h;
    if (c == 1 && b > 0) out(monomial_index(a, b - 1), i) = b / h;
  }
  return out;
}

MatrixXd ScaledMonomials::laplacian_coeffs() const {
  const auto& exps = monomial_exponents(degree);
  MatrixXd out = MatrixXd::Zero(dim_Pk(degree - 2), dim());
  for (int i = 0; i < dim(); ++i) {
    const int a = exps[i].a, b = exps[i].b;
    if (a >= 2) out(monomial_index(a - 2, b), i) += a * (a - 1) / (h * h);
    if (b >= 2) out(monomial_index(a, b - 2), i) += b * (b - 1) / (h * h);
  }
  return out;
}

MonomialIntegrals monomial_integrals(const ElementGeometry& elem, int max_degree) {
  MonomialIntegrals table;
  table.center = elem.centroid;
  table.h = elem.diameter;
  table.area = elem.area;
  table.max_degree = max_degree;
  const QuadRule rule = polygon_quadrature(elem, max_degree);
  ScaledMonomials basis(elem, max_degree);
  const MatrixXd vals = basis.eval(rule.points);
  table.vals = vals.transpose() * rule.weights;
  return table;
}

MatrixXd mass_matrix(const MonomialIntegrals& table, int k) {
  const auto& exps = monomial_exponents(k);
  const int n = dim_Pk(k);
  MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      m(i, j) = table.mono(exps[i].a + exps[j].a, exps[i].b + exps[j].b);
      m(j, i) = m(i, j);
    }
  return m;
}

MatrixXd stiffness_matrix(const MonomialIntegrals& table, int k) {
  const auto& exps = monomial_exponents(k);
  const int n = dim_Pk(k);
  const double h2 = table.h * table.h;
  MatrixXd g = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const int ai = exps[i].a, bi = exps[i].b, aj = exps[j].a, bj = exps[j].b;
      double v = 0.0;
      if (ai > 0 && aj > 0) v += ai * aj * table.mono(ai + aj - 2, bi + bj);
      if (bi > 0 && bj > 0) v += bi * bj * table.mono(ai + aj, bi + bj - 2);
      g(i, j) = v / h2;
      g(j, i) = g(i, j);
    }
  return g;
}

Pk2Decomposition decompose_Pk2(const ElementGeometry& elem, int k) {
  if (k < 1) throw SingularDecomposition("decomposition requires k >= 1");
  Pk2Decomposition dec;
  dec.k = k;
  dec.n_grad = dim_Pk(k + 1) - 1;
  const int nk = dim_Pk(k);
  const int nrot = dim_Pk(k - 1);
  const int n = 2 * nk;
  if (dec.n_grad + nrot != n)
    throw SingularDecomposition("dimension bookkeeping failed");  // cannot happen

  MatrixXd s = MatrixXd::Zero(n, n);
  // gradient members g_b = h grad m_b, 1 <= |b| <= k+1
  const auto& exps_kp1 = monomial_exponents(k + 1);
  for (int i = 1; i < dim_Pk(k + 1); ++i) {
    const int a = exps_kp1[i].a, b = exps_kp1[i].b;
    if (a > 0) s(monomial_index(a - 1, b), i - 1) += a;  // h * a/h
    if (b > 0) s(nk + monomial_index(a, b - 1), i - 1) += b;
  }
  // rotational members w_g = x_perp m_g = (-m_{g+e2}, m_{g+e1})
  const auto& exps_km1 = monomial_exponents(k - 1);
  for (int i = 0; i < nrot; ++i) {
    const int a = exps_km1[i].a, b = exps_km1[i].b;
    s(monomial_index(a, b + 1), dec.n_grad + i) = -1.0;
    s(nk + monomial_index(a + 1, b), dec.n_grad + i) = 1.0;
  }

  Eigen::PartialPivLU<MatrixXd> lu(s);
  const VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
  if (diag.minCoeff() <= 0.0 || diag.maxCoeff() / diag.minCoeff() > 1e12)
    throw SingularDecomposition("split basis is numerically singular");
  dec.split_to_mono = s;
  dec.mono_to_split = lu.inverse();
  return dec;
}

namespace {

VectorXd project_moments(const MonomialIntegrals& table, int k, const VectorXd& moments,
                         int blocks) {
  const MatrixXd m = mass_matrix(table, k);
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw SingularMass("monomial mass matrix is not positive definite");
  const int n = dim_Pk(k);
  VectorXd out(blocks * n);
  for (int c = 0; c < blocks; ++c) out.segment(c * n, n) = llt.solve(moments.segment(c * n, n));
  return out;
}

}  // namespace

VectorXd l2_project_scalar(const ScalarField& f, const ElementGeometry& elem,
                           const MonomialIntegrals& table, int k, int quad_order) {
  const int order = quad_order < 0 ? 2 * k + 2 : quad_order;
  const QuadRule rule = polygon_quadrature(elem, order);
  ScaledMonomials basis(elem, k);
  const MatrixXd vals = basis.eval(rule.points);
  VectorXd fw(rule.size());
  for (int q = 0; q < rule.size(); ++q) fw[q] = f(rule.point(q)) * rule.weights[q];
  const VectorXd moments = vals.transpose() * fw;
  return project_moments(table, k, moments, 1);
}

VectorXd l2_project_vector(const VectorField& f, const ElementGeometry& elem,
                           const MonomialIntegrals& table, int k, int quad_order) {
  const int order = quad_order < 0 ? 2 * k + 2 : quad_order;
  const QuadRule rule = polygon_quadrature(elem, order);
  ScaledMonomials basis(elem, k);
  const MatrixXd vals = basis.eval(rule.points);
  const int n = dim_Pk(k);
  VectorXd moments(2 * n);
  VectorXd f0(rule.size()), f1(rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 v = f(rule.point(q));
    f0[q] = v.x() * rule.weights[q];
    f1[q] = v.y() * rule.weights[q];
  }
  moments.head(n) = vals.transpose() * f0;
  moments.tail(n) = vals.transpose() * f1;
  return project_moments(table, k, moments, 2);
}

VectorXd legendre_all(double t, int deg) {
  VectorXd p(deg + 1);
  p[0] = 1.0;
  if (deg >= 1) p[1] = t;
  for (int j = 2; j <= deg; ++j) p[j] = ((2.0 * j - 1.0) * t * p[j - 1] - (j - 1.0) * p[j - 2]) / j;
  return p;
}

}  // namespace vemmhd
