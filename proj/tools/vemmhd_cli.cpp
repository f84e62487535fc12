// Command-line front end: convergence studies, the Hartmann benchmark,
// single solves, and mesh inspection. Exit codes: 0 ok, 1 usage/config,
// 2 iteration did not converge, 3 numerical failure.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "vemmhd/exceptions.hpp"
#include "vemmhd/experiments.hpp"
#include "vemmhd/mesh_io.hpp"

using namespace vemmhd;

namespace {

struct CommonOpts {
  int k = 1;
  std::string family = "quad";
  int levels = 3;
  int base_n = 4;
  std::string mesh_file;
  double Rnu = 1.0, Rm = 1.0, Sc = 1.0;
  double tol = 1e-7;
  int max_iter = 100;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
};

void add_model_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--Rnu", o.Rnu, "hydrodynamic Reynolds number");
  cmd->add_option("--Rm", o.Rm, "magnetic Reynolds number");
  cmd->add_option("--Sc", o.Sc, "coupling coefficient");
  cmd->add_option("--tol", o.tol, "Oseen iteration tolerance")->default_val(1e-7);
  cmd->add_option("--max-iter", o.max_iter, "Oseen iteration cap")->default_val(100);
  cmd->add_option("--seed", o.seed, "mesh generator seed");
  cmd->add_option("--threads", o.threads, "element-build parallelism");
}

void validate(const CommonOpts& o) {
  if (o.k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(o.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (o.levels < 1) throw std::invalid_argument("levels must be >= 1");
}

PolyMesh load_or_generate(const CommonOpts& o, int n) {
  if (!o.mesh_file.empty()) return read_mesh_json(o.mesh_file);
  return gen_family(parse_family(o.family), n, o.seed);
}

void print_report(const ErrorReport& rep) {
  const auto rates = observed_rates(rep);
  std::printf("%10s %12s %6s %12s %6s %12s %6s %12s %6s %12s %6s %12s %5s\n", "h", "e_u0",
              "rate", "e_u1", "rate", "e_b0", "rate", "e_b1", "rate", "e_p0", "rate", "div",
              "iter");
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const ErrorRow& r = rep.rows[i];
    auto rs = [&](int j) {
      if (i == 0) return std::string("-");
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", rates[i][j]);
      return std::string(buf);
    };
    std::printf("%10.4g %12.4e %6s %12.4e %6s %12.4e %6s %12.4e %6s %12.4e %6s %12.4e %5d\n",
                r.h, r.e_u0, rs(0).c_str(), r.e_u1, rs(1).c_str(), r.e_b0, rs(2).c_str(),
                r.e_b1, rs(3).c_str(), r.e_p0, rs(4).c_str(), r.div_norm, r.iterations);
  }
}

int cmd_convergence(const CommonOpts& o) {
  validate(o);
  StudyConfig cfg;
  cfg.family = parse_family(o.family);
  for (int i = 0; i < o.levels; ++i) cfg.levels.push_back(o.base_n << i);
  cfg.k = o.k;
  cfg.params = {o.Rnu, o.Rm, o.Sc};
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const ErrorReport rep = convergence_study(cfg);
  print_report(rep);
  if (!o.out.empty()) write_report(rep, o.out);
  for (const auto& r : rep.rows)
    if (!r.converged) {
      std::cerr << "error: NoConvergence: level h=" << r.h << " stopped at increment "
                << r.e_u0 << "\n";
      return 2;
    }
  return 0;
}

int cmd_hartmann(const CommonOpts& o, const std::string& preset, double G, int n) {
  validate(o);
  ModelParams params{o.Rnu, o.Rm, o.Sc};
  if (preset == "ha1") params = {1.0, 0.1, 10.0};
  if (preset == "ha5") params = {5.0, 1.0, 5.0};
  const HartmannCase hc = hartmann_case(params, G);
  std::printf("Hartmann channel: Ha=%.4g G=%.4g (Rnu=%g Rm=%g Sc=%g)\n", hc.Ha, hc.G,
              params.Rnu, params.Rm, params.Sc);
  const HartmannResult res = run_hartmann(hc, n, o.k, o.tol, o.max_iter, o.threads);
  std::printf("h=%.4g  iterations=%d  max_rel_u=%.3e  max_rel_b=%.3e\n", res.errors.h,
              res.errors.iterations, res.max_rel_u, res.max_rel_b);
  if (!o.out.empty()) write_profiles(res, o.out);
  return res.errors.converged ? 0 : 2;
}

int cmd_solve(const CommonOpts& o, int n) {
  validate(o);
  const ModelParams params{o.Rnu, o.Rm, o.Sc};
  const ManufacturedCase mc = example1_case(params);
  const PolyMesh mesh = load_or_generate(o, n);
  const SystemContext ctx = build_context(mesh, o.k, params, mc.bc, mc.f, mc.g, o.threads);
  const SolverState state = oseen_iterate(ctx, o.tol, o.max_iter);
  ErrorReport rep;
  rep.rows.push_back(compute_errors(ctx, state, mc.exact));
  print_report(rep);
  if (!o.out.empty()) write_report(rep, o.out);
  return state.converged ? 0 : 2;
}

int cmd_mesh_info(const CommonOpts& o, int n) {
  validate(o);
  const PolyMesh mesh = load_or_generate(o, n);
  const QualityReport q = quality_report(mesh);
  std::printf("cells=%d vertices=%d edges=%d boundary_edges=%d h=%.6g\n", mesh.n_cells(),
              mesh.n_vertices(), mesh.n_edges(), mesh.n_boundary_edges(), mesh_size(mesh));
  std::printf("min inscribed ratio=%.4g  min vertex-distance ratio=%.4g  flagged=%zu\n",
              q.min_inscribed_ratio, q.min_vertex_dist_ratio, q.flagged_cells.size());
  if (!o.out.empty()) write_mesh_json(mesh, o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divergence-free virtual element solver for stationary incompressible MHD"};
  app.require_subcommand(1);
  CommonOpts o;
  int hart_n = 8;
  int solve_n = 8;
  int info_n = 4;
  std::string preset;
  double G = 0.1;

  auto* conv = app.add_subcommand("convergence", "manufactured-solution rate study");
  conv->add_option("--k", o.k, "polynomial degree (>= 1)");
  conv->add_option("--family", o.family, "tri|quad|perturbed_quad|voronoi");
  conv->add_option("--levels", o.levels, "number of refinement levels");
  conv->add_option("--base-n", o.base_n, "subdivisions at the coarsest level");
  conv->add_option("--out", o.out, "CSV output path");
  add_model_flags(conv, o);

  auto* hart = app.add_subcommand("hartmann", "Hartmann channel benchmark");
  hart->add_option("--k", o.k, "polynomial degree");
  hart->add_option("--preset", preset, "ha1 | ha5 (overrides Rnu/Rm/Sc)");
  hart->add_option("--G", G, "pressure-gradient constant");
  hart->add_option("--n", hart_n, "subdivisions across the channel height");
  hart->add_option("--out", o.out, "profile CSV output path");
  add_model_flags(hart, o);

  auto* solve = app.add_subcommand("solve", "single manufactured-solution solve");
  solve->add_option("--k", o.k, "polynomial degree");
  solve->add_option("--family", o.family, "mesh family");
  solve->add_option("--n", solve_n, "subdivisions");
  solve->add_option("--mesh", o.mesh_file, "mesh JSON file (overrides family)");
  solve->add_option("--out", o.out, "CSV output path");
  add_model_flags(solve, o);

  auto* info = app.add_subcommand("mesh-info", "mesh statistics and quality");
  info->add_option("--family", o.family, "mesh family");
  info->add_option("--n", info_n, "subdivisions");
  info->add_option("--mesh", o.mesh_file, "mesh JSON file");
  info->add_option("--seed", o.seed, "generator seed");
  info->add_option("--out", o.out, "write the mesh back as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: Usage: " << e.what() << "\n";
    return 1;
  }

  try {
    if (conv->parsed()) return cmd_convergence(o);
    if (hart->parsed()) return cmd_hartmann(o, preset, G, hart_n);
    if (solve->parsed()) return cmd_solve(o, solve_n);
    if (info->parsed()) return cmd_mesh_info(o, info_n);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: Config: " << e.what() << "\n";
    return 1;
  } catch (const MeshFileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InconsistentBC& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
