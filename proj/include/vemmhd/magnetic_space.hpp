#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vemmhd/polybasis.hpp"

namespace vemmhd {

// Local operators of the enhanced nodal element of degree k used for the
// magnetic field (each component continuous, H1-conforming).
//
// DOF layout on an element with N_v vertices (= N_e edges):
//   vertex dofs:   local vertex i, component c: index = 2i + c
//   edge dofs:     local edge s, Legendre degree j in [0,k-1), component c:
//                  index = 2N_v + s*2(k-1) + 2j + c, (1/|e|) int_e c q_j ds
//   interior dofs: 2N_v + 2(k-1)N_e + 2*idx(g) + c, (1/|E|) int_E c m_g dE
struct MagneticElement {
  int k = 1;
  ElementGeometry geom;
  MonomialIntegrals table;

  std::vector<MatrixXd> edge_trace;  // per edge, 2(k+1) x ndof: Legendre
                                     // coeffs of both trace components
  MatrixXd pi_nabla;                 // 2*dim_Pk(k) x ndof
  MatrixXd dof_pi_nabla;             // ndof x ndof
  MatrixXd pi0;                      // 2*dim_Pk(k) x ndof
  MatrixXd curl_rep;                 // dim_Pk(k-1) x ndof
  MatrixXd div_rep;                  // dim_Pk(k-1) x ndof
  MatrixXd dof_of_poly;              // ndof x 2*dim_Pk(k)

  int n_vertices() const { return static_cast<int>(geom.edges.size()); }
  int n_edges() const { return n_vertices(); }
  int n_dofs() const { return 2 * n_vertices() + 2 * (k - 1) * n_edges() + k * (k - 1); }
  int vertex_dof(int i, int c) const { return 2 * i + c; }
  int edge_dof(int s, int j, int c) const {
    return 2 * n_vertices() + s * 2 * (k - 1) + 2 * j + c;
  }
  int interior_dof(int g, int c) const {
    return 2 * n_vertices() + 2 * (k - 1) * n_edges() + 2 * g + c;
  }
};

int magnetic_dof_count(int n_vertices, int k);

MagneticElement build_magnetic_element(const ElementGeometry& geom, int k);

VectorXd magnetic_interpolate(const VectorField& f, const MagneticElement& el,
                              int quad_order = -1);

}  // namespace vemmhd
