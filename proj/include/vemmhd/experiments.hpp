#pragma once

#include <string>
#include <vector>

#include "vemmhd/system.hpp"

namespace vemmhd {

using Matrix2d = Eigen::Matrix2d;
using TensorField = std::function<Matrix2d(const Vec2&)>;  // rows: component, cols: x1/x2

// Closed-form solution bundle used by the error norms (gradients included).
struct ExactFields {
  VectorField u, b;
  ScalarField p;
  TensorField grad_u, grad_b;
};

// Trigonometric manufactured solution on the unit square with forcing
// derived from the momentum/induction equations.
struct ManufacturedCase {
  ModelParams params;
  ExactFields exact;
  VectorField f, g;
  BCSpec bc;  // velocity Dirichlet, magnetic normal-zero
};

ManufacturedCase example1_case(const ModelParams& params = {});

// Hartmann channel flow on [0,6] x [-1,1]: transverse magnetic field,
// pressure-driven, closed-form profiles u(x2), b(x2).
struct HartmannCase {
  ModelParams params;
  double G = 0.1;
  double Ha = 1.0;
  Vec2 lo{0.0, -1.0}, hi{6.0, 1.0};
  ExactFields exact;
  BCSpec bc;  // walls Dirichlet, inflow/outflow natural, tangential b_d=(0,1)

  double u_profile(double x2) const;
  double b_profile(double x2) const;
};

HartmannCase hartmann_case(const ModelParams& params, double G = 0.1);

struct ErrorRow {
  double h = 0.0;
  double e_u0 = 0.0, e_u1 = 0.0, e_b0 = 0.0, e_b1 = 0.0, e_p0 = 0.0;
  double div_norm = 0.0;
  int iterations = 0;
  bool converged = true;
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
};

// Observed rate between consecutive rows, index i >= 1; NaN on row 0.
std::vector<std::array<double, 5>> observed_rates(const ErrorReport& report);

ErrorRow compute_errors(const SystemContext& ctx, const SolverState& state,
                        const ExactFields& exact);

struct StudyConfig {
  MeshFamily family = MeshFamily::quad;
  std::vector<int> levels;  // subdivision counts
  int k = 1;
  ModelParams params;
  double tol = 1e-7;
  int max_iter = 100;
  std::uint64_t seed = 0;
  int threads = 1;
};

ErrorReport convergence_study(const StudyConfig& config);

struct HartmannResult {
  std::vector<double> x2, u_num, u_ana, b_num, b_ana;
  double max_rel_u = 0.0, max_rel_b = 0.0;  // relative to the profile peak
  ErrorRow errors;
};

HartmannResult run_hartmann(const HartmannCase& hc, int n, int k, double tol = 1e-7,
                            int max_iter = 100, int threads = 1, int n_samples = 41);

void write_report(const ErrorReport& report, const std::string& path);
ErrorReport read_report(const std::string& path);

void write_profiles(const HartmannResult& result, const std::string& path);

}  // namespace vemmhd
