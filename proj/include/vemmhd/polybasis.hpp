#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "vemmhd/mesh.hpp"
#include "vemmhd/quadrature.hpp"

namespace vemmhd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Scalar monomial exponent pair; bases are ordered degree-lexicographically:
// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
struct Exp {
  int a = 0;
  int b = 0;
  int degree() const { return a + b; }
};

inline int dim_Pk(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }
inline int monomial_index(int a, int b) {
  const int d = a + b;
  return d * (d + 1) / 2 + b;
}
const std::vector<Exp>& monomial_exponents(int k);

// Scaled monomials m_a(x) = ((x - x_b)/h_E)^a on one element; each member
// has sup-norm O(1) independently of h_E.
struct ScaledMonomials {
  Vec2 center = Vec2::Zero();
  double h = 1.0;
  int degree = 0;

  ScaledMonomials() = default;
  ScaledMonomials(const ElementGeometry& elem, int k)
      : center(elem.centroid), h(elem.diameter), degree(k) {}

  int dim() const { return dim_Pk(degree); }

  // npts x dim matrices of values / first derivatives.
  MatrixXd eval(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const;
  void eval_grad(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts, MatrixXd& dx,
                 MatrixXd& dy) const;

  // Coefficients of d/dx_c m_i in the degree-(k-1) basis: dim_P(k-1) x dim.
  MatrixXd deriv_coeffs(int c) const;
  // Coefficients of laplacian(m_i) in the degree-(k-2) basis.
  MatrixXd laplacian_coeffs() const;
};

// Exact integrals of all scaled monomials up to max_degree on one element.
// Every polynomial-times-polynomial integral reduces to lookups here.
struct MonomialIntegrals {
  Vec2 center = Vec2::Zero();
  double h = 1.0;
  double area = 0.0;
  int max_degree = 0;
  VectorXd vals;

  double mono(int a, int b) const { return vals[monomial_index(a, b)]; }
};

MonomialIntegrals monomial_integrals(const ElementGeometry& elem, int max_degree);

// Gram matrix of the scaled monomials of degree <= k; symmetric positive
// definite on non-degenerate elements.
MatrixXd mass_matrix(const MonomialIntegrals& table, int k);
// Gram matrix of their gradients (singular on the constant).
MatrixXd stiffness_matrix(const MonomialIntegrals& table, int k);

// Change of basis realizing [P_k]^2 = grad P_{k+1} (+) x_perp P_{k-1}.
// Vector polynomials use blocked coefficients: first the x-component in the
// scalar basis, then the y-component. Split members are ordered gradient
// part first: g_b = h_E grad m_b for 1 <= |b| <= k+1, then w_g = x_perp m_g
// for |g| <= k-1.
struct Pk2Decomposition {
  int k = 1;
  int n_grad = 0;
  MatrixXd split_to_mono;  // columns are split members in blocked coords
  MatrixXd mono_to_split;  // inverse map
};

Pk2Decomposition decompose_Pk2(const ElementGeometry& elem, int k);

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

// L2 projection of pointwise data onto P_k / [P_k]^2 via the monomial mass
// matrix; quadrature order defaults to 2k+2.
VectorXd l2_project_scalar(const ScalarField& f, const ElementGeometry& elem,
                           const MonomialIntegrals& table, int k, int quad_order = -1);
VectorXd l2_project_vector(const VectorField& f, const ElementGeometry& elem,
                           const MonomialIntegrals& table, int k, int quad_order = -1);

// Legendre values P_0..P_deg at t in [-1,1]; the edge-moment basis is
// q_j(s) = P_j(t(s)) with t affine along the edge's global direction, so
// that int_e q_i q_j ds = |e|/(2i+1) delta_ij.
VectorXd legendre_all(double t, int deg);

}  // namespace vemmhd
