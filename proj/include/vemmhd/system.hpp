#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <vector>

#include "vemmhd/forms.hpp"
#include "vemmhd/mesh.hpp"

namespace vemmhd {

// Boundary conditions. Velocity: homogeneous Dirichlet everywhere except on
// segments classified natural (traction (pI - Rnu^-1 grad u)n = p_d n, which
// enters as the boundary load -int p_d (v.n)). Magnetic: zero normal
// component and/or prescribed tangential trace n x b = n x b_d.
struct BCSpec {
  std::function<bool(const Vec2&)> velocity_natural;  // classified at edge midpoints
  ScalarField natural_pressure;
  bool magnetic_normal_zero = false;
  VectorField magnetic_tangential;
};

// One local DOF expands into a weighted sum of free unknowns and fixed
// values; boundary pairs constrained along a non-axis direction get a
// rotated frame, everything else a single unit-weight term.
struct DofTerm {
  int free = -1;  // -1: fixed
  double value = 0.0;
  double weight = 1.0;
};

struct DofMap {
  int k = 1;
  int n_cells = 0, n_edges = 0, n_vertices = 0;
  int n_full = 0;  // component-style indices before elimination
  int n_free = 0;
  std::vector<std::vector<DofTerm>> comp;
  std::vector<bool> edge_natural;  // velocity natural segments, per mesh edge
  bool with_multiplier = true;     // pressure mean-zero row (pure Dirichlet)

  // free-space block extents u | b | p | multiplier
  int free_vel = 0, free_mag = 0, free_p = 0;

  int vel_edge_full(int edge, int j, int c) const { return edge * 2 * k + 2 * j + c; }
  int vel_int_full(int cell, int g, int c) const {
    return 2 * k * n_edges + cell * k * (k - 1) + 2 * g + c;
  }
  int mag_vert_full(int v, int c) const { return mag_vert_base + 2 * v + c; }
  int mag_edge_full(int edge, int j, int c) const {
    return mag_edge_base + edge * 2 * (k - 1) + 2 * j + c;
  }
  int mag_int_full(int cell, int g, int c) const {
    return mag_int_base + cell * k * (k - 1) + 2 * g + c;
  }
  int p_full(int cell, int g) const { return p_base + cell * dim_Pk(k - 1) + g; }

  int vel_full_count() const { return mag_vert_base; }
  int mag_full_count() const { return p_base - mag_vert_base; }

  int mag_vert_base = 0, mag_edge_base = 0, mag_int_base = 0, p_base = 0, mult_full = -1;
};

DofMap build_dofmap(const PolyMesh& mesh, const GeomCache& geom, int k, const BCSpec& bc);

// Cached per-element operators; the Oseen-independent blocks are built once.
struct ElementOps {
  VelocityElement vel;
  MagneticElement mag;
  MatrixXd a0, a1, d;
  VectorXd rhs_f, rhs_g;
  VectorXd natural_rhs;  // boundary load from natural velocity segments
  VectorXd p_int;        // int_E m_g, pressure mean row
  MatrixXd vel_h1, mag_h1, p_mass;  // norm matrices for the stopping test
};

struct SystemContext {
  const PolyMesh* mesh = nullptr;
  GeomCache geom;
  int k = 1;
  ModelParams params;
  BCSpec bc;
  VectorField f, g;
  DofMap dofmap;
  std::vector<ElementOps> ops;
};

SystemContext build_context(const PolyMesh& mesh, int k, const ModelParams& params,
                            const BCSpec& bc, const VectorField& f, const VectorField& g,
                            int threads = 1);

struct SparseSystem {
  Eigen::SparseMatrix<double> mat;
  VectorXd rhs;
  int u_offset = 0, b_offset = 0, p_offset = 0, mult_offset = -1;
};

// Discrete fields as expanded component values (constraints substituted),
// plus the nonlinear iteration record.
struct SolverState {
  VectorXd u;  // velocity component dofs, full indexing
  VectorXd b;  // magnetic component dofs
  VectorXd p;  // pressure coefficients per cell
  double multiplier = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_increment = 0.0;
  std::vector<double> increment_history;
};

SolverState zero_state(const SystemContext& ctx);

// Oseen-linearized system at the previous state: the symmetric blocks come
// from the cache, convection/coupling are rebuilt here.
SparseSystem assemble_oseen(const SystemContext& ctx, const SolverState& prev);

VectorXd solve_linear(const SparseSystem& system);

SolverState expand_solution(const SystemContext& ctx, const VectorXd& x);

SolverState oseen_iterate(const SystemContext& ctx, double tol = 1e-7, int max_iter = 100);

// Local DOF values of a state on one element.
VectorXd local_vel_dofs(const SystemContext& ctx, const SolverState& s, int cell);
VectorXd local_mag_dofs(const SystemContext& ctx, const SolverState& s, int cell);
VectorXd local_p_coeffs(const SystemContext& ctx, const SolverState& s, int cell);

}  // namespace vemmhd
