#pragma once

#include <Eigen/Dense>

#include "vemmhd/magnetic_space.hpp"
#include "vemmhd/velocity_space.hpp"

namespace vemmhd {

struct ModelParams {
  double Rnu = 1.0;  // hydrodynamic Reynolds number
  double Rm = 1.0;   // magnetic Reynolds number
  double Sc = 1.0;   // coupling coefficient

  void validate() const;
};

// Velocity-velocity diffusion block: consistency term on the projected
// gradients plus the plain dof-dof stabilizer on the projection remainder.
MatrixXd local_a0(const ModelParams& params, const VelocityElement& el);

// Magnetic-magnetic block: projected curl-curl + div-div plus stabilizer.
MatrixXd local_a1(const ModelParams& params, const MagneticElement& el);

// Divergence block, rows indexed by the P_{k-1} pressure monomials.
MatrixXd local_d(const VelocityElement& el);

// Skew-symmetrized convection linearized at u_prev (local DOF values).
MatrixXd local_c2(const VelocityElement& el, const VectorXd& u_prev_dofs);

// Coupling blocks linearized at b_prev: c3a carries -a3h(b_trial, b_prev,
// v_test) into the momentum rows, c3b carries +a3h(c_test, b_prev, u_trial)
// into the induction rows; c3b = -c3a^T.
struct CouplingBlocks {
  MatrixXd c3a;  // n_vel x n_mag
  MatrixXd c3b;  // n_mag x n_vel
};
CouplingBlocks local_c3(const ModelParams& params, const VelocityElement& vel,
                        const MagneticElement& mag, const VectorXd& b_prev_dofs);

// Load functionals (Pi0 f, v)_E per local DOF.
VectorXd local_rhs_vel(const VectorField& f, const VelocityElement& el);
VectorXd local_rhs_mag(const VectorField& g, const MagneticElement& el);

// Exact forms on polynomials (blocked coefficient vectors), used by the
// consistency tests: a0 = Rnu^-1 (grad u, grad v), a1 = Rm^-1 Sc ((curl b,
// curl c) + (div b, div c)), a2 the skew convection, a3 = Sc (curl psi x b,
// v), d = (div v, q).
struct ExactForms {
  const ElementGeometry& geom;
  const MonomialIntegrals& table;
  int k;

  double a0(const ModelParams& p, const VectorXd& u, const VectorXd& v) const;
  double a1(const ModelParams& p, const VectorXd& b, const VectorXd& c) const;
  double a2(const VectorXd& u, const VectorXd& w, const VectorXd& v) const;
  double a3(const ModelParams& p, const VectorXd& psi, const VectorXd& b,
            const VectorXd& v) const;
  double d(const VectorXd& v, const VectorXd& q) const;
};

}  // namespace vemmhd
