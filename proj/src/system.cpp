#include "vemmhd/system.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "vemmhd/exceptions.hpp"
#include "vemmhd/quadrature.hpp"

namespace vemmhd {

namespace {

struct DirConstraint {
  Vec2 dir;  // unit
  double val = 0.0;
};

struct PairSpec {
  enum Kind { Free, Fixed, Rotated } kind = Free;
  Vec2 fixed_val = Vec2::Zero();
  Vec2 dir = Vec2::Zero();
  double dir_val = 0.0;
};

PairSpec resolve_constraints(const std::vector<DirConstraint>& cs, double scale) {
  PairSpec ps;
  if (cs.empty()) return ps;
  const double tol = 1e-10 * (1.0 + scale);
  // look for two independent directions
  for (size_t i = 1; i < cs.size(); ++i) {
    const double cross = cs[0].dir.x() * cs[i].dir.y() - cs[0].dir.y() * cs[i].dir.x();
    if (std::abs(cross) > 1e-8) {
      Eigen::Matrix2d a;
      a.row(0) = cs[0].dir.transpose();
      a.row(1) = cs[i].dir.transpose();
      const Vec2 v = a.inverse() * Vec2(cs[0].val, cs[i].val);
      for (const auto& c : cs)
        if (std::abs(c.dir.dot(v) - c.val) > tol)
          throw InconsistentBC("conflicting corner constraints on magnetic field");
      ps.kind = PairSpec::Fixed;
      ps.fixed_val = v;
      return ps;
    }
  }
  // all parallel: must agree up to the sign of the direction
  for (size_t i = 1; i < cs.size(); ++i) {
    const double sgn = cs[0].dir.dot(cs[i].dir) > 0.0 ? 1.0 : -1.0;
    if (std::abs(sgn * cs[i].val - cs[0].val) > tol)
      throw InconsistentBC("conflicting parallel constraints on magnetic field");
  }
  ps.kind = PairSpec::Rotated;
  ps.dir = cs[0].dir;
  ps.dir_val = cs[0].val;
  return ps;
}

// Boundary data restricted to one edge: moments of b_d . dir against the
// Legendre basis, matching the edge DOF scaling.
double tangential_moment(const EdgeUse& eu, const VectorField& b_d, const Vec2& dir, int j,
                         int order) {
  const EdgeQuadRule rule = edge_quadrature(eu, order);
  double acc = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const VectorXd leg = legendre_all(rule.t[q], j);
    acc += rule.weights[q] * leg[j] * b_d(rule.point(q)).dot(dir);
  }
  return acc / eu.length;
}

}  // namespace

DofMap build_dofmap(const PolyMesh& mesh, const GeomCache& geom, int k, const BCSpec& bc) {
  DofMap dm;
  dm.k = k;
  dm.n_cells = mesh.n_cells();
  dm.n_edges = mesh.n_edges();
  dm.n_vertices = mesh.n_vertices();
  const int nkm1 = dim_Pk(k - 1);
  const int kint = k * (k - 1);

  dm.mag_vert_base = 2 * k * dm.n_edges + dm.n_cells * kint;
  dm.mag_edge_base = dm.mag_vert_base + 2 * dm.n_vertices;
  dm.mag_int_base = dm.mag_edge_base + 2 * (k - 1) * dm.n_edges;
  dm.p_base = dm.mag_int_base + dm.n_cells * kint;
  const int n_wo_mult = dm.p_base + dm.n_cells * nkm1;

  // classify boundary edges and collect directional magnetic constraints
  dm.edge_natural.assign(dm.n_edges, false);
  bool any_natural = false;
  bool any_boundary = false;
  std::vector<std::vector<DirConstraint>> vert_cons(dm.n_vertices);
  std::vector<std::vector<std::vector<DirConstraint>>> edge_cons(dm.n_edges);
  std::vector<bool> vel_edge_fixed(dm.n_edges, false);

  double bscale = 0.0;
  for (int e = 0; e < dm.n_edges; ++e) {
    const MeshEdge& me = mesh.edges[e];
    if (!me.boundary) continue;
    any_boundary = true;
    // locate the edge use in the owning cell for geometry
    const ElementGeometry& g = geom[me.cell_left];
    const EdgeUse* eu = nullptr;
    for (const auto& u : g.edges)
      if (u.edge_id == e) eu = &u;
    const bool natural = bc.velocity_natural && bc.velocity_natural(eu->midpoint);
    if (natural && !bc.natural_pressure)
      throw InconsistentBC("natural velocity segment without prescribed pressure");
    dm.edge_natural[e] = natural;
    any_natural = any_natural || natural;
    if (!natural) vel_edge_fixed[e] = true;

    if (!bc.magnetic_normal_zero && !bc.magnetic_tangential)
      throw InconsistentBC("boundary edge without a magnetic condition");

    edge_cons[e].resize(std::max(k - 1, 0));
    for (int v : {me.v0, me.v1}) {
      if (bc.magnetic_normal_zero) vert_cons[v].push_back({eu->normal, 0.0});
      if (bc.magnetic_tangential) {
        const double val = bc.magnetic_tangential(mesh.vertices[v]).dot(eu->tangent_global);
        vert_cons[v].push_back({eu->tangent_global, val});
        bscale = std::max(bscale, std::abs(val));
      }
    }
    for (int j = 0; j + 2 <= k; ++j) {
      if (bc.magnetic_normal_zero) edge_cons[e][j].push_back({eu->normal, 0.0});
      if (bc.magnetic_tangential) {
        const double val =
            tangential_moment(*eu, bc.magnetic_tangential, eu->tangent_global, j, 2 * k + 6);
        edge_cons[e][j].push_back({eu->tangent_global, val});
        bscale = std::max(bscale, std::abs(val));
      }
    }
  }
  (void)any_boundary;

  dm.with_multiplier = !any_natural;
  dm.mult_full = dm.with_multiplier ? n_wo_mult : -1;
  dm.n_full = n_wo_mult + (dm.with_multiplier ? 1 : 0);

  // assign free indices in full-index order so the free space stays blocked
  dm.comp.assign(dm.n_full, {});
  int next_free = 0;
  auto emit_single_free = [&](int p) { dm.comp[p] = {DofTerm{next_free++, 0.0, 1.0}}; };
  auto emit_single_fixed = [&](int p, double v) { dm.comp[p] = {DofTerm{-1, v, 1.0}}; };
  auto emit_pair = [&](int p0, int p1, const PairSpec& ps) {
    switch (ps.kind) {
      case PairSpec::Free:
        emit_single_free(p0);
        emit_single_free(p1);
        break;
      case PairSpec::Fixed:
        emit_single_fixed(p0, ps.fixed_val.x());
        emit_single_fixed(p1, ps.fixed_val.y());
        break;
      case PairSpec::Rotated: {
        const int a1 = next_free++;
        const Vec2 d = ps.dir, t = Vec2(-ps.dir.y(), ps.dir.x());
        dm.comp[p0] = {DofTerm{-1, ps.dir_val, d.x()}, DofTerm{a1, 0.0, t.x()}};
        dm.comp[p1] = {DofTerm{-1, ps.dir_val, d.y()}, DofTerm{a1, 0.0, t.y()}};
        break;
      }
    }
  };

  for (int e = 0; e < dm.n_edges; ++e)
    for (int j = 0; j < k; ++j)
      for (int c = 0; c < 2; ++c) {
        const int p = dm.vel_edge_full(e, j, c);
        if (vel_edge_fixed[e] && mesh.edges[e].boundary)
          emit_single_fixed(p, 0.0);
        else
          emit_single_free(p);
      }
  for (int cell = 0; cell < dm.n_cells; ++cell)
    for (int g = 0; g < dim_Pk(k - 2); ++g)
      for (int c = 0; c < 2; ++c) emit_single_free(dm.vel_int_full(cell, g, c));
  dm.free_vel = next_free;

  for (int v = 0; v < dm.n_vertices; ++v)
    emit_pair(dm.mag_vert_full(v, 0), dm.mag_vert_full(v, 1),
              resolve_constraints(vert_cons[v], bscale));
  for (int e = 0; e < dm.n_edges; ++e)
    for (int j = 0; j + 2 <= k; ++j) {
      PairSpec ps;
      if (!edge_cons[e].empty() && !edge_cons[e][j].empty())
        ps = resolve_constraints(edge_cons[e][j], bscale);
      emit_pair(dm.mag_edge_full(e, j, 0), dm.mag_edge_full(e, j, 1), ps);
    }
  for (int cell = 0; cell < dm.n_cells; ++cell)
    for (int g = 0; g < dim_Pk(k - 2); ++g)
      for (int c = 0; c < 2; ++c) emit_single_free(dm.mag_int_full(cell, g, c));
  dm.free_mag = next_free - dm.free_vel;

  for (int cell = 0; cell < dm.n_cells; ++cell)
    for (int g = 0; g < nkm1; ++g) emit_single_free(dm.p_full(cell, g));
  dm.free_p = next_free - dm.free_vel - dm.free_mag;
  if (dm.with_multiplier) emit_single_free(dm.mult_full);

  dm.n_free = next_free;
  return dm;
}

namespace {

std::vector<int> vel_full_indices(const DofMap& dm, const PolyMesh& mesh, int cell) {
  const int k = dm.k;
  std::vector<int> idx;
  idx.reserve(velocity_dof_count(static_cast<int>(mesh.cells[cell].size()), k));
  for (int e : mesh.cell_edges[cell])
    for (int j = 0; j < k; ++j)
      for (int c = 0; c < 2; ++c) idx.push_back(dm.vel_edge_full(e, j, c));
  for (int g = 0; g < dim_Pk(k - 2); ++g)
    for (int c = 0; c < 2; ++c) idx.push_back(dm.vel_int_full(cell, g, c));
  return idx;
}

std::vector<int> mag_full_indices(const DofMap& dm, const PolyMesh& mesh, int cell) {
  const int k = dm.k;
  std::vector<int> idx;
  idx.reserve(magnetic_dof_count(static_cast<int>(mesh.cells[cell].size()), k));
  for (int v : mesh.cells[cell])
    for (int c = 0; c < 2; ++c) idx.push_back(dm.mag_vert_full(v, c));
  for (int e : mesh.cell_edges[cell])
    for (int j = 0; j + 2 <= k; ++j)
      for (int c = 0; c < 2; ++c) idx.push_back(dm.mag_edge_full(e, j, c));
  for (int g = 0; g < dim_Pk(k - 2); ++g)
    for (int c = 0; c < 2; ++c) idx.push_back(dm.mag_int_full(cell, g, c));
  return idx;
}

std::vector<int> p_full_indices(const DofMap& dm, int cell) {
  std::vector<int> idx(dim_Pk(dm.k - 1));
  for (size_t g = 0; g < idx.size(); ++g) idx[g] = dm.p_full(cell, static_cast<int>(g));
  return idx;
}

using Triplet = Eigen::Triplet<double>;

void scatter_block(const MatrixXd& blk, const std::vector<int>& rows,
                   const std::vector<int>& cols, const DofMap& dm, std::vector<Triplet>& trips,
                   VectorXd& rhs) {
  for (int i = 0; i < blk.rows(); ++i) {
    for (const DofTerm& ri : dm.comp[rows[i]]) {
      if (ri.free < 0) continue;
      for (int j = 0; j < blk.cols(); ++j) {
        const double v = blk(i, j);
        if (v == 0.0) continue;
        for (const DofTerm& cj : dm.comp[cols[j]]) {
          const double w = ri.weight * cj.weight * v;
          if (cj.free >= 0)
            trips.emplace_back(ri.free, cj.free, w);
          else
            rhs[ri.free] -= w * cj.value;
        }
      }
    }
  }
}

void scatter_rhs(const VectorXd& loc, const std::vector<int>& rows, const DofMap& dm,
                 VectorXd& rhs) {
  for (int i = 0; i < loc.size(); ++i)
    for (const DofTerm& ri : dm.comp[rows[i]])
      if (ri.free >= 0) rhs[ri.free] += ri.weight * loc[i];
}

ElementOps make_element_ops(const SystemContext& ctx, int cell) {
  const ElementGeometry& geom = ctx.geom[cell];
  ElementOps ops;
  ops.vel = build_velocity_element(geom, ctx.k);
  ops.mag = build_magnetic_element(geom, ctx.k);
  ops.a0 = local_a0(ctx.params, ops.vel);
  ops.a1 = local_a1(ctx.params, ops.mag);
  ops.d = local_d(ops.vel);
  ops.rhs_f = local_rhs_vel(ctx.f, ops.vel);
  ops.rhs_g = local_rhs_mag(ctx.g, ops.mag);

  const int k = ctx.k;
  const int nk = dim_Pk(k);
  const MatrixXd stiff = stiffness_matrix(ops.vel.table, k);
  const MatrixXd mass = mass_matrix(ops.vel.table, k);
  auto h1_of = [&](const MatrixXd& pn) {
    return (pn.topRows(nk).transpose() * stiff * pn.topRows(nk) +
            pn.bottomRows(nk).transpose() * stiff * pn.bottomRows(nk))
        .eval();
  };
  auto l2_of = [&](const MatrixXd& p0) {
    return (p0.topRows(nk).transpose() * mass * p0.topRows(nk) +
            p0.bottomRows(nk).transpose() * mass * p0.bottomRows(nk))
        .eval();
  };
  ops.vel_h1 = h1_of(ops.vel.pi_nabla);
  ops.mag_h1 = h1_of(ops.mag.pi_nabla) + l2_of(ops.mag.pi0);
  ops.p_mass = mass_matrix(ops.vel.table, k - 1);

  const auto& exps = monomial_exponents(k - 1);
  ops.p_int.resize(dim_Pk(k - 1));
  for (int g = 0; g < ops.p_int.size(); ++g)
    ops.p_int[g] = ops.vel.table.mono(exps[g].a, exps[g].b);

  ops.natural_rhs = VectorXd::Zero(ops.vel.n_dofs());
  for (int s = 0; s < ops.vel.n_edges(); ++s) {
    const EdgeUse& eu = geom.edges[s];
    if (!ctx.dofmap.edge_natural[eu.edge_id]) continue;
    const EdgeQuadRule rule = edge_quadrature(eu, 2 * k + 8);
    for (int q = 0; q < rule.size(); ++q) {
      const VectorXd leg = legendre_all(rule.t[q], k);
      const double pd = ctx.bc.natural_pressure(rule.point(q));
      ops.natural_rhs -=
          rule.weights[q] * pd * (leg.transpose() * ops.vel.edge_normal_trace[s]).transpose();
    }
  }
  return ops;
}

}  // namespace

SystemContext build_context(const PolyMesh& mesh, int k, const ModelParams& params,
                            const BCSpec& bc, const VectorField& f, const VectorField& g,
                            int threads) {
  params.validate();
  SystemContext ctx;
  ctx.mesh = &mesh;
  ctx.geom = build_geometry(mesh);
  ctx.k = k;
  ctx.params = params;
  ctx.bc = bc;
  ctx.f = f;
  ctx.g = g;
  ctx.dofmap = build_dofmap(mesh, ctx.geom, k, bc);

  const int nc = mesh.n_cells();
  ctx.ops.resize(nc);
  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    for (int c = 0; c < nc; ++c) ctx.ops[c] = make_element_ops(ctx, c);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&]() {
        for (int c = next.fetch_add(1); c < nc; c = next.fetch_add(1))
          ctx.ops[c] = make_element_ops(ctx, c);
      });
    for (auto& th : pool) th.join();
  }
  return ctx;
}

SolverState zero_state(const SystemContext& ctx) {
  SolverState s;
  s.u = VectorXd::Zero(ctx.dofmap.vel_full_count());
  s.b = VectorXd::Zero(ctx.dofmap.mag_full_count());
  s.p = VectorXd::Zero(ctx.dofmap.n_cells * dim_Pk(ctx.k - 1));
  return s;
}

VectorXd local_vel_dofs(const SystemContext& ctx, const SolverState& s, int cell) {
  const auto idx = vel_full_indices(ctx.dofmap, *ctx.mesh, cell);
  VectorXd loc(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) loc[static_cast<int>(i)] = s.u[idx[i]];
  return loc;
}

VectorXd local_mag_dofs(const SystemContext& ctx, const SolverState& s, int cell) {
  const auto idx = mag_full_indices(ctx.dofmap, *ctx.mesh, cell);
  VectorXd loc(idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    loc[static_cast<int>(i)] = s.b[idx[i] - ctx.dofmap.mag_vert_base];
  return loc;
}

VectorXd local_p_coeffs(const SystemContext& ctx, const SolverState& s, int cell) {
  const int n = dim_Pk(ctx.k - 1);
  return s.p.segment(cell * n, n);
}

SparseSystem assemble_oseen(const SystemContext& ctx, const SolverState& prev) {
  const DofMap& dm = ctx.dofmap;
  SparseSystem sys;
  sys.u_offset = 0;
  sys.b_offset = dm.free_vel;
  sys.p_offset = dm.free_vel + dm.free_mag;
  sys.mult_offset = dm.with_multiplier ? dm.n_free - 1 : -1;
  sys.rhs = VectorXd::Zero(dm.n_free);

  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(dm.n_free) * 40);
  for (int cell = 0; cell < dm.n_cells; ++cell) {
    const ElementOps& ops = ctx.ops[cell];
    const auto rows_v = vel_full_indices(dm, *ctx.mesh, cell);
    const auto rows_m = mag_full_indices(dm, *ctx.mesh, cell);
    const auto rows_p = p_full_indices(dm, cell);

    const VectorXd u_prev = local_vel_dofs(ctx, prev, cell);
    const VectorXd b_prev = local_mag_dofs(ctx, prev, cell);
    const MatrixXd c2 = local_c2(ops.vel, u_prev);
    const CouplingBlocks c3 = local_c3(ctx.params, ops.vel, ops.mag, b_prev);

    scatter_block(ops.a0 + c2, rows_v, rows_v, dm, trips, sys.rhs);
    scatter_block(c3.c3a, rows_v, rows_m, dm, trips, sys.rhs);
    scatter_block(-ops.d.transpose(), rows_v, rows_p, dm, trips, sys.rhs);
    scatter_block(c3.c3b, rows_m, rows_v, dm, trips, sys.rhs);
    scatter_block(ops.a1, rows_m, rows_m, dm, trips, sys.rhs);
    scatter_block(ops.d, rows_p, rows_v, dm, trips, sys.rhs);
    scatter_rhs(ops.rhs_f + ops.natural_rhs, rows_v, dm, sys.rhs);
    scatter_rhs(ops.rhs_g, rows_m, dm, sys.rhs);

    if (dm.with_multiplier) {
      const std::vector<int> mult_row = {dm.mult_full};
      scatter_block(ops.p_int, rows_p, mult_row, dm, trips, sys.rhs);
      scatter_block(ops.p_int.transpose(), mult_row, rows_p, dm, trips, sys.rhs);
    }
  }

  sys.mat.resize(dm.n_free, dm.n_free);
  sys.mat.setFromTriplets(trips.begin(), trips.end());
  sys.mat.makeCompressed();
  return sys;
}

VectorXd solve_linear(const SparseSystem& system) {
  if (system.mat.rows() != system.rhs.size())
    throw SingularSystem("matrix and right-hand side dimensions differ");
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(system.mat);
  lu.factorize(system.mat);
  if (lu.info() != Eigen::Success) throw SingularSystem("sparse LU factorization failed");
  const VectorXd x = lu.solve(system.rhs);
  const double rhs_norm = system.rhs.norm();
  const double res = (system.mat * x - system.rhs).norm();
  if (res > 1e-9 * std::max(rhs_norm, 1e-30))
    throw ResidualTooLarge("relative residual " + std::to_string(res / std::max(rhs_norm, 1e-30)));
  return x;
}

SolverState expand_solution(const SystemContext& ctx, const VectorXd& x) {
  const DofMap& dm = ctx.dofmap;
  auto value_of = [&](int full) {
    double v = 0.0;
    for (const DofTerm& t : dm.comp[full]) v += t.weight * (t.free >= 0 ? x[t.free] : t.value);
    return v;
  };
  SolverState s = zero_state(ctx);
  for (int p = 0; p < dm.vel_full_count(); ++p) s.u[p] = value_of(p);
  for (int p = 0; p < dm.mag_full_count(); ++p) s.b[p] = value_of(dm.mag_vert_base + p);
  for (int p = 0; p < s.p.size(); ++p) s.p[p] = value_of(dm.p_base + p);
  if (dm.with_multiplier) s.multiplier = value_of(dm.mult_full);
  return s;
}

SolverState oseen_iterate(const SystemContext& ctx, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  SolverState prev = zero_state(ctx);
  std::vector<double> history;
  for (int n = 1; n <= max_iter; ++n) {
    const SparseSystem sys = assemble_oseen(ctx, prev);
    const VectorXd x = solve_linear(sys);
    SolverState cur = expand_solution(ctx, x);

    double inc2 = 0.0, cur2 = 0.0;
    for (int cell = 0; cell < ctx.dofmap.n_cells; ++cell) {
      const ElementOps& ops = ctx.ops[cell];
      const VectorXd du = local_vel_dofs(ctx, cur, cell) - local_vel_dofs(ctx, prev, cell);
      const VectorXd db = local_mag_dofs(ctx, cur, cell) - local_mag_dofs(ctx, prev, cell);
      const VectorXd dp = local_p_coeffs(ctx, cur, cell) - local_p_coeffs(ctx, prev, cell);
      inc2 += du.dot(ops.vel_h1 * du) + db.dot(ops.mag_h1 * db) + dp.dot(ops.p_mass * dp);
      const VectorXd cu = local_vel_dofs(ctx, cur, cell);
      const VectorXd cb = local_mag_dofs(ctx, cur, cell);
      const VectorXd cp = local_p_coeffs(ctx, cur, cell);
      cur2 += cu.dot(ops.vel_h1 * cu) + cb.dot(ops.mag_h1 * cb) + cp.dot(ops.p_mass * cp);
    }
    const double rel = std::sqrt(std::max(inc2, 0.0)) / std::max(std::sqrt(std::max(cur2, 0.0)), 1e-300);
    history.push_back(rel);
    cur.iterations = n;
    cur.increment_history = history;
    cur.final_increment = rel;
    if (rel < tol) {
      cur.converged = true;
      return cur;
    }
    prev = std::move(cur);
  }
  prev.converged = false;  // caller decides how to report NoConvergence
  return prev;
}

}  // namespace vemmhd
