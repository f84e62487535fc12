#include "vemmhd/experiments.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vemmhd/exceptions.hpp"
#include "vemmhd/quadrature.hpp"

namespace vemmhd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ManufacturedCase example1_case(const ModelParams& params) {
  ManufacturedCase mc;
  mc.params = params;

  auto u = [](const Vec2& x) {
    const double s1 = std::sin(kPi * x.x()), c1 = std::cos(kPi * x.x());
    const double s2 = std::sin(kPi * x.y()), c2 = std::cos(kPi * x.y());
    return Vec2(s1 * s1 * s2 * c2, -s1 * c1 * s2 * s2);
  };
  auto grad_u = [](const Vec2& x) {
    const double s1 = std::sin(kPi * x.x());
    const double s2 = std::sin(kPi * x.y());
    const double sx = std::sin(2.0 * kPi * x.x()), cx = std::cos(2.0 * kPi * x.x());
    const double sy = std::sin(2.0 * kPi * x.y()), cy = std::cos(2.0 * kPi * x.y());
    Matrix2d g;
    g(0, 0) = 0.5 * kPi * sx * sy;
    g(0, 1) = kPi * s1 * s1 * cy;
    g(1, 0) = -kPi * cx * s2 * s2;
    g(1, 1) = -0.5 * kPi * sx * sy;
    return g;
  };
  auto lap_u = [](const Vec2& x) {
    const double s1 = std::sin(kPi * x.x());
    const double s2 = std::sin(kPi * x.y());
    const double cx = std::cos(2.0 * kPi * x.x()), cy = std::cos(2.0 * kPi * x.y());
    const double sx = std::sin(2.0 * kPi * x.x()), sy = std::sin(2.0 * kPi * x.y());
    return Vec2(kPi * kPi * sy * (cx - 2.0 * s1 * s1), kPi * kPi * sx * (2.0 * s2 * s2 - cy));
  };
  auto b = [](const Vec2& x) {
    return Vec2(std::sin(kPi * x.x()) * std::cos(kPi * x.y()),
                -std::sin(kPi * x.y()) * std::cos(kPi * x.x()));
  };
  auto grad_b = [](const Vec2& x) {
    const double s1 = std::sin(kPi * x.x()), c1 = std::cos(kPi * x.x());
    const double s2 = std::sin(kPi * x.y()), c2 = std::cos(kPi * x.y());
    Matrix2d g;
    g(0, 0) = kPi * c1 * c2;
    g(0, 1) = -kPi * s1 * s2;
    g(1, 0) = kPi * s1 * s2;
    g(1, 1) = -kPi * c1 * c2;
    return g;
  };
  auto p = [](const Vec2& x) { return std::cos(kPi * x.x()) * std::cos(kPi * x.y()); };
  auto grad_p = [](const Vec2& x) {
    return Vec2(-kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()),
                -kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()));
  };
  auto curl_b = [](const Vec2& x) {
    return 2.0 * kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y());
  };

  mc.exact.u = u;
  mc.exact.b = b;
  mc.exact.p = p;
  mc.exact.grad_u = grad_u;
  mc.exact.grad_b = grad_b;

  const double rnu = params.Rnu, rm = params.Rm, sc = params.Sc;
  mc.f = [=](const Vec2& x) {
    const Vec2 uu = u(x);
    const Matrix2d gu = grad_u(x);
    const Vec2 conv = gu * uu;
    const double w = curl_b(x);
    const Vec2 bb = b(x);
    const Vec2 lorentz(-bb.y() * w, bb.x() * w);  // curl b x b
    return (-lap_u(x) / rnu + conv + grad_p(x) - sc * lorentz).eval();
  };
  // curl(curl b) = 2 pi^2 b for this field, and u x b vanishes identically
  mc.g = [=](const Vec2& x) { return (2.0 * kPi * kPi * (sc / rm) * b(x)).eval(); };

  mc.bc.magnetic_normal_zero = true;
  return mc;
}

double HartmannCase::u_profile(double x2) const {
  return G * params.Rnu / (Ha * std::tanh(Ha)) * (1.0 - std::cosh(x2 * Ha) / std::cosh(Ha));
}

double HartmannCase::b_profile(double x2) const {
  return G / params.Sc * (std::sinh(x2 * Ha) / std::sinh(Ha) - x2);
}

HartmannCase hartmann_case(const ModelParams& params, double G) {
  HartmannCase hc;
  hc.params = params;
  hc.G = G;
  hc.Ha = std::sqrt(params.Rnu * params.Rm * params.Sc);
  const HartmannCase base = hc;  // copies for lambda capture

  hc.exact.u = [base](const Vec2& x) { return Vec2(base.u_profile(x.y()), 0.0); };
  hc.exact.b = [base](const Vec2& x) { return Vec2(base.b_profile(x.y()), 1.0); };
  hc.exact.p = [base](const Vec2& x) {
    const double bp = base.b_profile(x.y());
    return -base.G * x.x() - base.params.Sc * bp * bp / 2.0;
  };
  hc.exact.grad_u = [base](const Vec2& x) {
    Matrix2d g = Matrix2d::Zero();
    g(0, 1) = -base.G * base.params.Rnu * std::sinh(x.y() * base.Ha) /
              (std::tanh(base.Ha) * std::cosh(base.Ha));
    return g;
  };
  hc.exact.grad_b = [base](const Vec2& x) {
    Matrix2d g = Matrix2d::Zero();
    g(0, 1) = base.G / base.params.Sc *
              (base.Ha * std::cosh(x.y() * base.Ha) / std::sinh(base.Ha) - 1.0);
    return g;
  };

  const double x_lo = hc.lo.x(), x_hi = hc.hi.x();
  const double tol = 1e-9 * (x_hi - x_lo);
  hc.bc.velocity_natural = [x_lo, x_hi, tol](const Vec2& mid) {
    return mid.x() < x_lo + tol || mid.x() > x_hi - tol;
  };
  hc.bc.natural_pressure = hc.exact.p;
  hc.bc.magnetic_tangential = [](const Vec2&) { return Vec2(0.0, 1.0); };
  return hc;
}

ErrorRow compute_errors(const SystemContext& ctx, const SolverState& state,
                        const ExactFields& exact) {
  ErrorRow row;
  row.h = mesh_size(ctx.geom);
  row.iterations = state.iterations;
  row.converged = state.converged;
  const int k = ctx.k;
  const int nk = dim_Pk(k);
  double eu0 = 0.0, eu1 = 0.0, eb0 = 0.0, eb1 = 0.0, ep0 = 0.0, dv = 0.0;

  for (int cell = 0; cell < ctx.dofmap.n_cells; ++cell) {
    const ElementOps& ops = ctx.ops[cell];
    const VectorXd ud = local_vel_dofs(ctx, state, cell);
    const VectorXd bd = local_mag_dofs(ctx, state, cell);
    const VectorXd pd = local_p_coeffs(ctx, state, cell);
    const VectorXd u_pi0 = ops.vel.pi0 * ud;
    const VectorXd u_pin = ops.vel.pi_nabla * ud;
    const VectorXd b_pi0 = ops.mag.pi0 * bd;
    const VectorXd b_pin = ops.mag.pi_nabla * bd;

    const QuadRule rule = polygon_quadrature(ctx.geom[cell], 2 * k + 6);
    const ScaledMonomials mono_k(ctx.geom[cell], k);
    const MatrixXd phi = mono_k.eval(rule.points);
    MatrixXd dx, dy;
    mono_k.eval_grad(rule.points, dx, dy);
    const ScaledMonomials mono_km1(ctx.geom[cell], k - 1);
    const MatrixXd psi = mono_km1.eval(rule.points);

    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = rule.point(q);
      const double w = rule.weights[q];
      const Vec2 uh((phi.row(q) * u_pi0.head(nk)).value(), (phi.row(q) * u_pi0.tail(nk)).value());
      const Vec2 bh((phi.row(q) * b_pi0.head(nk)).value(), (phi.row(q) * b_pi0.tail(nk)).value());
      eu0 += w * (exact.u(x) - uh).squaredNorm();
      eb0 += w * (exact.b(x) - bh).squaredNorm();

      Matrix2d guh;
      guh(0, 0) = (dx.row(q) * u_pin.head(nk)).value();
      guh(0, 1) = (dy.row(q) * u_pin.head(nk)).value();
      guh(1, 0) = (dx.row(q) * u_pin.tail(nk)).value();
      guh(1, 1) = (dy.row(q) * u_pin.tail(nk)).value();
      eu1 += w * (exact.grad_u(x) - guh).squaredNorm();

      Matrix2d gbh;
      gbh(0, 0) = (dx.row(q) * b_pin.head(nk)).value();
      gbh(0, 1) = (dy.row(q) * b_pin.head(nk)).value();
      gbh(1, 0) = (dx.row(q) * b_pin.tail(nk)).value();
      gbh(1, 1) = (dy.row(q) * b_pin.tail(nk)).value();
      eb1 += w * (exact.grad_b(x) - gbh).squaredNorm();

      const double ph = (psi.row(q) * pd).value();
      ep0 += w * (exact.p(x) - ph) * (exact.p(x) - ph);
    }
    const VectorXd div_coeffs = ops.vel.div_rep * ud;
    dv += div_coeffs.dot(ops.p_mass * div_coeffs);
  }
  row.e_u0 = std::sqrt(eu0);
  row.e_u1 = std::sqrt(eu1);
  row.e_b0 = std::sqrt(eb0);
  row.e_b1 = std::sqrt(eb0 + eb1);  // full H1 norm for the magnetic error
  row.e_p0 = std::sqrt(ep0);
  row.div_norm = std::sqrt(std::max(dv, 0.0));
  return row;
}

std::vector<std::array<double, 5>> observed_rates(const ErrorReport& report) {
  std::vector<std::array<double, 5>> rates(report.rows.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < report.rows.size(); ++i) {
    if (i == 0) {
      rates[i] = {nan, nan, nan, nan, nan};
      continue;
    }
    const ErrorRow& a = report.rows[i - 1];
    const ErrorRow& b = report.rows[i];
    const double lh = std::log(a.h / b.h);
    auto rate = [&](double ea, double eb) { return std::log(ea / eb) / lh; };
    rates[i] = {rate(a.e_u0, b.e_u0), rate(a.e_u1, b.e_u1), rate(a.e_b0, b.e_b0),
                rate(a.e_b1, b.e_b1), rate(a.e_p0, b.e_p0)};
  }
  return rates;
}

ErrorReport convergence_study(const StudyConfig& config) {
  const ManufacturedCase mc = example1_case(config.params);
  ErrorReport report;
  for (int n : config.levels) {
    const PolyMesh mesh = gen_family(config.family, n, config.seed);
    const SystemContext ctx =
        build_context(mesh, config.k, config.params, mc.bc, mc.f, mc.g, config.threads);
    const SolverState state = oseen_iterate(ctx, config.tol, config.max_iter);
    report.rows.push_back(compute_errors(ctx, state, mc.exact));
  }
  return report;
}

namespace {

bool point_in_cell(const PolyMesh& mesh, int cell, const Vec2& p, double tol) {
  const auto& loop = mesh.cells[cell];
  const int m = static_cast<int>(loop.size());
  // on-edge check, then even-odd crossing
  for (int i = 0; i < m; ++i) {
    const Vec2& a = mesh.vertices[loop[i]];
    const Vec2& b = mesh.vertices[loop[(i + 1) % m]];
    const Vec2 ab = b - a;
    const double len = ab.norm();
    const double cross = ab.x() * (p.y() - a.y()) - ab.y() * (p.x() - a.x());
    const double along = (p - a).dot(ab) / (len * len);
    if (std::abs(cross) < tol * len && along > -tol && along < 1.0 + tol) return true;
  }
  bool inside = false;
  for (int i = 0; i < m; ++i) {
    const Vec2& a = mesh.vertices[loop[i]];
    const Vec2& b = mesh.vertices[loop[(i + 1) % m]];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double xi = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (xi > p.x()) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

HartmannResult run_hartmann(const HartmannCase& hc, int n, int k, double tol, int max_iter,
                            int threads, int n_samples) {
  const PolyMesh mesh = gen_family(MeshFamily::quad, n, 0, hc.lo, hc.hi);
  auto zero_field = [](const Vec2&) { return Vec2::Zero().eval(); };
  const SystemContext ctx =
      build_context(mesh, k, hc.params, hc.bc, zero_field, zero_field, threads);
  const SolverState state = oseen_iterate(ctx, tol, max_iter);

  HartmannResult res;
  res.errors = compute_errors(ctx, state, hc.exact);

  const double x1 = 0.5 * (hc.lo.x() + hc.hi.x());
  const double tol_geo = 1e-9 * (hc.hi - hc.lo).norm();
  const int nk = dim_Pk(k);
  for (int i = 0; i < n_samples; ++i) {
    const double x2 = hc.lo.y() + (hc.hi.y() - hc.lo.y()) * (i + 0.5) / n_samples;
    const Vec2 p(x1, x2);
    int owner = -1;
    for (int c = 0; c < mesh.n_cells() && owner < 0; ++c)
      if (point_in_cell(mesh, c, p, tol_geo)) owner = c;
    if (owner < 0) continue;
    Eigen::Matrix<double, 1, 2> pt;
    pt << p.x(), p.y();
    const ScaledMonomials mono_k(ctx.geom[owner], k);
    const MatrixXd phi = mono_k.eval(pt);
    const VectorXd u_pi0 = ctx.ops[owner].vel.pi0 * local_vel_dofs(ctx, state, owner);
    const VectorXd b_pi0 = ctx.ops[owner].mag.pi0 * local_mag_dofs(ctx, state, owner);
    res.x2.push_back(x2);
    res.u_num.push_back((phi.row(0) * u_pi0.head(nk)).value());
    res.b_num.push_back((phi.row(0) * b_pi0.head(nk)).value());
    res.u_ana.push_back(hc.u_profile(x2));
    res.b_ana.push_back(hc.b_profile(x2));
  }

  double umax = 0.0, bmax = 0.0;
  for (size_t i = 0; i < res.x2.size(); ++i) {
    umax = std::max(umax, std::abs(res.u_ana[i]));
    bmax = std::max(bmax, std::abs(res.b_ana[i]));
  }
  for (size_t i = 0; i < res.x2.size(); ++i) {
    res.max_rel_u = std::max(res.max_rel_u, std::abs(res.u_num[i] - res.u_ana[i]) / umax);
    res.max_rel_b = std::max(res.max_rel_b, std::abs(res.b_num[i] - res.b_ana[i]) / bmax);
  }
  return res;
}

void write_report(const ErrorReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshFileError("cannot open '" + path + "' for writing");
  out << "h,e_u0,rate_u0,e_u1,rate_u1,e_b0,rate_b0,e_b1,rate_b1,e_p0,rate_p0,div_norm\n";
  const auto rates = observed_rates(report);
  out.precision(17);
  for (size_t i = 0; i < report.rows.size(); ++i) {
    const ErrorRow& r = report.rows[i];
    auto rate_cell = [&](int j) {
      if (i == 0) return std::string();
      std::ostringstream os;
      os.precision(17);
      os << rates[i][j];
      return os.str();
    };
    out << r.h << ',' << r.e_u0 << ',' << rate_cell(0) << ',' << r.e_u1 << ',' << rate_cell(1)
        << ',' << r.e_b0 << ',' << rate_cell(2) << ',' << r.e_b1 << ',' << rate_cell(3) << ','
        << r.e_p0 << ',' << rate_cell(4) << ',' << r.div_norm << '\n';
  }
}

ErrorReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshFileError("cannot open '" + path + "'");
  ErrorReport report;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 12) throw MeshFileError("malformed report row: " + line);
    ErrorRow r;
    r.h = std::stod(cells[0]);
    r.e_u0 = std::stod(cells[1]);
    r.e_u1 = std::stod(cells[3]);
    r.e_b0 = std::stod(cells[5]);
    r.e_b1 = std::stod(cells[7]);
    r.e_p0 = std::stod(cells[9]);
    r.div_norm = std::stod(cells[11]);
    report.rows.push_back(r);
  }
  return report;
}

void write_profiles(const HartmannResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshFileError("cannot open '" + path + "' for writing");
  out << "x2,u1_numeric,u1_analytic,b1_numeric,b1_analytic\n";
  out.precision(17);
  for (size_t i = 0; i < result.x2.size(); ++i)
    out << result.x2[i] << ',' << result.u_num[i] << ',' << result.u_ana[i] << ','
        << result.b_num[i] << ',' << result.b_ana[i] << '\n';
}

}  // namespace vemmhd
