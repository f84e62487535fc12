#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vemmhd/polybasis.hpp"

namespace vemmhd {

// Local operators of the nonconforming velocity element of degree k.
//
// DOF layout on an element with N_e edges (2k*N_e + k(k-1) in total):
//   edge dofs:     per local edge s, Legendre degree j in [0,k), component c:
//                  index = s*2k + 2j + c, value (1/|e|) int_e v_c q_j ds
//   interior dofs: per scalar monomial g of degree <= k-2, component c:
//                  index = 2k*N_e + 2*idx(g) + c, value (1/|E|) int_E v_c m_g dE
//
// Vector polynomial coefficients are blocked (x-part then y-part in the
// scalar monomial basis). All matrices map local DOF vectors to polynomial
// coefficients except dof_pi_nabla / dof_of_poly which live on DOFs.
struct VelocityElement {
  int k = 1;
  ElementGeometry geom;
  MonomialIntegrals table;

  MatrixXd pi_nabla;      // 2*dim_Pk(k) x ndof, H1-type projection
  MatrixXd dof_pi_nabla;  // ndof x ndof, DOFs of the projected polynomial
  MatrixXd pi0;           // 2*dim_Pk(k) x ndof, L2 projection
  MatrixXd grad_proj;     // 4*dim_Pk(k-1) x ndof, block (r,c) at (2r+c)
  MatrixXd div_rep;       // dim_Pk(k-1) x ndof, divergence polynomial
  std::vector<MatrixXd> edge_normal_trace;  // per edge, (k+1) x ndof Legendre coeffs of v.n
  MatrixXd dof_of_poly;   // ndof x 2*dim_Pk(k), DOFs of each vector monomial

  int n_edges() const { return static_cast<int>(geom.edges.size()); }
  int n_dofs() const { return 2 * k * n_edges() + k * (k - 1); }
  int n_edge_dofs() const { return 2 * k * n_edges(); }
  int edge_dof(int s, int j, int c) const { return s * 2 * k + 2 * j + c; }
  int interior_dof(int g, int c) const { return n_edge_dofs() + 2 * g + c; }
};

int velocity_dof_count(int n_edges, int k);

VelocityElement build_velocity_element(const ElementGeometry& geom, int k);

// DOF functionals applied to pointwise data.
VectorXd velocity_interpolate(const VectorField& f, const VelocityElement& el,
                              int quad_order = -1);

}  // namespace vemmhd
