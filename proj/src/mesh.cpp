#include "vemmhd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>

#include "vemmhd/exceptions.hpp"

namespace vemmhd {

namespace {

double signed_area(const std::vector<Vec2>& pts) {
  double a = 0.0;
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Vec2 polygon_centroid(const std::vector<Vec2>& pts, double area) {
  Vec2 c = Vec2::Zero();
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % n];
    const double w = p.x() * q.y() - q.x() * p.y();
    c += w * (p + q);
  }
  return c / (6.0 * area);
}

double polygon_diameter(const std::vector<Vec2>& pts) {
  double d2 = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      d2 = std::max(d2, (pts[i] - pts[j]).squaredNorm());
  return std::sqrt(d2);
}

int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  return (v > 0.0) - (v < 0.0);
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orient_sign(a, b, c);
  const int o2 = orient_sign(a, b, d);
  const int o3 = orient_sign(c, d, a);
  const int o4 = orient_sign(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

// Portable uniform in [0,1): std::uniform_real_distribution is
// implementation-defined, which would break cross-platform seeds.
double rng_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<Vec2> cell_points(const PolyMesh& mesh, int c) {
  std::vector<Vec2> pts;
  pts.reserve(mesh.cells[c].size());
  for (int v : mesh.cells[c]) pts.push_back(mesh.vertices[v]);
  return pts;
}

// Sutherland-Hodgman clip of a convex polygon by the half-plane
// (x - m) . dir <= 0.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& m, const Vec2& dir) {
  std::vector<Vec2> out;
  const int n = static_cast<int>(poly.size());
  out.reserve(n + 1);
  for (int i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double sp = (p - m).dot(dir);
    const double sq = (q - m).dot(dir);
    if (sp <= 0.0) out.push_back(p);
    if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
      out.push_back(p + (sp / (sp - sq)) * (q - p));
    }
  }
  return out;
}

struct SeedGrid {
  Vec2 lo;
  double cell = 1.0;
  int nx = 1, ny = 1;
  std::vector<std::vector<int>> buckets;

  SeedGrid(const Vec2& lo_, const Vec2& hi_, double target_cell, const std::vector<Vec2>& seeds)
      : lo(lo_) {
    nx = std::max(1, static_cast<int>(std::floor((hi_.x() - lo_.x()) / target_cell)));
    ny = std::max(1, static_cast<int>(std::floor((hi_.y() - lo_.y()) / target_cell)));
    cell = std::max((hi_.x() - lo_.x()) / nx, (hi_.y() - lo_.y()) / ny);
    buckets.assign(static_cast<size_t>(nx) * ny, {});
    for (int i = 0; i < static_cast<int>(seeds.size()); ++i) buckets[index_of(seeds[i])].push_back(i);
  }

  int index_of(const Vec2& p) const {
    int ix = std::clamp(static_cast<int>((p.x() - lo.x()) / cell), 0, nx - 1);
    int iy = std::clamp(static_cast<int>((p.y() - lo.y()) / cell), 0, ny - 1);
    return iy * nx + ix;
  }
};

// Voronoi cell of seed i clipped to the bounding rectangle. Neighbours are
// visited in expanding grid rings; a ring farther than twice the current
// cell radius cannot cut anymore.
std::vector<Vec2> voronoi_cell(const std::vector<Vec2>& seeds, int i, const SeedGrid& grid,
                               const Vec2& lo, const Vec2& hi) {
  std::vector<Vec2> poly = {Vec2(lo.x(), lo.y()), Vec2(hi.x(), lo.y()), Vec2(hi.x(), hi.y()),
                            Vec2(lo.x(), hi.y())};
  const Vec2 si = seeds[i];
  const int cx = std::clamp(static_cast<int>((si.x() - grid.lo.x()) / grid.cell), 0, grid.nx - 1);
  const int cy = std::clamp(static_cast<int>((si.y() - grid.lo.y()) / grid.cell), 0, grid.ny - 1);
  const int max_ring = std::max(grid.nx, grid.ny);

  double radius = 0.0;
  for (const Vec2& p : poly) radius = std::max(radius, (p - si).norm());

  for (int r = 0; r <= max_ring; ++r) {
    if (r >= 2 && (r - 1) * grid.cell > 2.0 * radius) break;
    for (int iy = cy - r; iy <= cy + r; ++iy) {
      if (iy < 0 || iy >= grid.ny) continue;
      for (int ix = cx - r; ix <= cx + r; ++ix) {
        if (ix < 0 || ix >= grid.nx) continue;
        if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != r) continue;
        for (int j : grid.buckets[static_cast<size_t>(iy) * grid.nx + ix]) {
          if (j == i) continue;
          const Vec2 sj = seeds[j];
          if ((sj - si).norm() > 2.0 * radius) continue;
          poly = clip_halfplane(poly, 0.5 * (si + sj), sj - si);
          radius = 0.0;
          for (const Vec2& p : poly) radius = std::max(radius, (p - si).norm());
        }
      }
    }
  }
  return poly;
}

// Merge near-coincident points coming from independent cell clips into
// shared vertex ids. Tolerance sits far below any CVT feature size.
struct VertexWelder {
  double tol;
  std::vector<Vec2> points;
  std::unordered_map<std::int64_t, std::vector<int>> grid;

  explicit VertexWelder(double tol_) : tol(tol_) {}

  std::int64_t key(double x, double y) const {
    const auto ix = static_cast<std::int64_t>(std::floor(x / tol));
    const auto iy = static_cast<std::int64_t>(std::floor(y / tol));
    return ix * 73856093 ^ iy * 19349663;
  }

  int insert(const Vec2& p) {
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        auto it = grid.find(key(p.x() + dx * tol, p.y() + dy * tol));
        if (it == grid.end()) continue;
        for (int id : it->second)
          if ((points[id] - p).norm() < tol) return id;
      }
    points.push_back(p);
    const int id = static_cast<int>(points.size()) - 1;
    grid[key(p.x(), p.y())].push_back(id);
    return id;
  }
};

PolyMesh mesh_from_polygons(const std::vector<std::vector<Vec2>>& polys, double weld_tol) {
  VertexWelder welder(weld_tol);
  std::vector<std::vector<int>> cells;
  cells.reserve(polys.size());
  for (const auto& poly : polys) {
    std::vector<int> loop;
    loop.reserve(poly.size());
    for (const Vec2& p : poly) {
      const int id = welder.insert(p);
      if (loop.empty() || loop.back() != id) loop.push_back(id);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    if (loop.size() < 3) throw DegenerateCell("voronoi cell collapsed during welding");
    cells.push_back(std::move(loop));
  }
  return build_mesh(welder.points, std::move(cells));
}

void grid_counts(const Vec2& lo, const Vec2& hi, int n, int& nx, int& ny, double& step) {
  const double w = hi.x() - lo.x();
  const double h = hi.y() - lo.y();
  const double short_side = std::min(w, h);
  step = short_side / n;
  nx = static_cast<int>(std::lround(w / step));
  ny = static_cast<int>(std::lround(h / step));
}

}  // namespace

int PolyMesh::n_boundary_edges() const {
  int n = 0;
  for (const auto& e : edges) n += e.boundary ? 1 : 0;
  return n;
}

MeshFamily parse_family(const std::string& name) {
  if (name == "tri") return MeshFamily::tri;
  if (name == "quad") return MeshFamily::quad;
  if (name == "perturbed_quad") return MeshFamily::perturbed_quad;
  if (name == "voronoi") return MeshFamily::voronoi;
  throw MeshFileError("unknown mesh family '" + name + "'");
}

PolyMesh build_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells) {
  PolyMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);

  const int nv = mesh.n_vertices();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    auto& loop = mesh.cells[c];
    if (loop.size() < 3)
      throw DegenerateCell("cell " + std::to_string(c) + " has fewer than 3 vertices");
    std::vector<int> sorted = loop;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= nv)
      throw MeshFileError("cell " + std::to_string(c) + " has vertex index out of range");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw SelfIntersectingCell("cell " + std::to_string(c) + " repeats a vertex");

    const int m = static_cast<int>(loop.size());
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        if (j == i + 1 || (i == 0 && j == m - 1)) continue;  // adjacent sides share a vertex
        const Vec2& a = mesh.vertices[loop[i]];
        const Vec2& b = mesh.vertices[loop[(i + 1) % m]];
        const Vec2& p = mesh.vertices[loop[j]];
        const Vec2& q = mesh.vertices[loop[(j + 1) % m]];
        if (segments_cross(a, b, p, q))
          throw SelfIntersectingCell("cell " + std::to_string(c) + " has crossing sides");
      }
    }

    auto pts = cell_points(mesh, c);
    const double area = signed_area(pts);
    const double diam = polygon_diameter(pts);
    if (std::abs(area) <= 1e-13 * diam * diam)
      throw DegenerateCell("cell " + std::to_string(c) + " has (near) zero area");
    if (area < 0.0) std::reverse(loop.begin(), loop.end());  // forgiving ingestion
  }

  std::map<std::pair<int, int>, int> edge_of;
  mesh.cell_edges.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& loop = mesh.cells[c];
    const int m = static_cast<int>(loop.size());
    mesh.cell_edges[c].resize(m);
    for (int i = 0; i < m; ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % m];
      const auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        MeshEdge e;
        e.v0 = key.first;
        e.v1 = key.second;
        e.cell_left = c;
        mesh.edges.push_back(e);
        it = edge_of.emplace(key, mesh.n_edges() - 1).first;
      } else {
        MeshEdge& e = mesh.edges[it->second];
        if (e.cell_right != -1)
          throw NonManifoldEdge("edge (" + std::to_string(key.first) + "," +
                                std::to_string(key.second) + ") has more than 2 incident cells");
        // Both cells are CCW, so a shared edge must be traversed in
        // opposite directions; same direction means overlapping cells.
        const auto& left_loop = mesh.cells[e.cell_left];
        const int lm = static_cast<int>(left_loop.size());
        bool left_forward = false;
        for (int s = 0; s < lm; ++s)
          if (left_loop[s] == a && left_loop[(s + 1) % lm] == b) left_forward = true;
        if (left_forward)
          throw NonManifoldEdge("edge (" + std::to_string(key.first) + "," +
                                std::to_string(key.second) + ") traversed twice in same direction");
        e.cell_right = c;
      }
      mesh.cell_edges[c][i] = it->second;
    }
  }

  std::vector<int> boundary_valence(nv, 0);
  for (auto& e : mesh.edges) {
    e.boundary = (e.cell_right == -1);
    if (e.boundary) {
      ++boundary_valence[e.v0];
      ++boundary_valence[e.v1];
    }
  }
  for (int v = 0; v < nv; ++v)
    if (boundary_valence[v] != 0 && boundary_valence[v] != 2)
      throw NonManifoldEdge("boundary is not a closed loop at vertex " + std::to_string(v));

  return mesh;
}

PolyMesh gen_family(MeshFamily family, int n, std::uint64_t seed, const Vec2& lo, const Vec2& hi) {
  if (n < 1) throw MeshFileError("mesh subdivision count must be >= 1");
  int nx, ny;
  double step;
  grid_counts(lo, hi, n, nx, ny, step);

  auto grid_vertex = [&](int i, int j) { return j * (nx + 1) + i; };
  auto make_grid_vertices = [&]() {
    std::vector<Vec2> vs;
    vs.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        vs.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny);
    return vs;
  };

  switch (family) {
    case MeshFamily::quad: {
      auto vs = make_grid_vertices();
      std::vector<std::vector<int>> cells;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          cells.push_back({grid_vertex(i, j), grid_vertex(i + 1, j), grid_vertex(i + 1, j + 1),
                           grid_vertex(i, j + 1)});
      return build_mesh(std::move(vs), std::move(cells));
    }
    case MeshFamily::tri: {
      auto vs = make_grid_vertices();
      std::vector<std::vector<int>> cells;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          cells.push_back({grid_vertex(i, j), grid_vertex(i + 1, j), grid_vertex(i + 1, j + 1)});
          cells.push_back({grid_vertex(i, j), grid_vertex(i + 1, j + 1), grid_vertex(i, j + 1)});
        }
      return build_mesh(std::move(vs), std::move(cells));
    }
    case MeshFamily::perturbed_quad: {
      auto vs = make_grid_vertices();
      std::mt19937_64 rng(seed);
      const double amp = 0.25 * step;
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
          const double dx = amp * (2.0 * rng_uniform(rng) - 1.0);
          const double dy = amp * (2.0 * rng_uniform(rng) - 1.0);
          if (i > 0 && i < nx && j > 0 && j < ny) vs[grid_vertex(i, j)] += Vec2(dx, dy);
        }
      std::vector<std::vector<int>> cells;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          cells.push_back({grid_vertex(i, j), grid_vertex(i + 1, j), grid_vertex(i + 1, j + 1),
                           grid_vertex(i, j + 1)});
      return build_mesh(std::move(vs), std::move(cells));
    }
    case MeshFamily::voronoi: {
      std::mt19937_64 rng(seed);
      std::vector<Vec2> seeds;
      seeds.reserve(static_cast<size_t>(nx) * ny);
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const double jx = 0.4 * step * (2.0 * rng_uniform(rng) - 1.0);
          const double jy = 0.4 * step * (2.0 * rng_uniform(rng) - 1.0);
          seeds.emplace_back(lo.x() + (i + 0.5) * step + jx, lo.y() + (j + 0.5) * step + jy);
        }

      const int max_lloyd = 1000;  // movement tolerance is usually hit first
      const double move_tol = 1e-10 * step;
      std::vector<std::vector<Vec2>> cells(seeds.size());
      for (int iter = 0; iter < max_lloyd; ++iter) {
        SeedGrid grid(lo, hi, step, seeds);
        double max_move = 0.0;
        for (int i = 0; i < static_cast<int>(seeds.size()); ++i) {
          cells[i] = voronoi_cell(seeds, i, grid, lo, hi);
          const double a = signed_area(cells[i]);
          const Vec2 c = polygon_centroid(cells[i], a);
          max_move = std::max(max_move, (c - seeds[i]).norm());
          seeds[i] = c;
        }
        if (max_move < move_tol) break;
      }
      {
        SeedGrid grid(lo, hi, step, seeds);
        for (int i = 0; i < static_cast<int>(seeds.size()); ++i)
          cells[i] = voronoi_cell(seeds, i, grid, lo, hi);
      }
      return mesh_from_polygons(cells, 1e-5 * step);
    }
  }
  throw MeshFileError("unreachable mesh family");
}

GeomCache build_geometry(const PolyMesh& mesh) {
  GeomCache geom;
  geom.elems.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    auto pts = cell_points(mesh, c);
    ElementGeometry& g = geom.elems[c];
    g.area = signed_area(pts);
    g.centroid = polygon_centroid(pts, g.area);
    g.diameter = polygon_diameter(pts);
    const int m = static_cast<int>(pts.size());
    g.edges.resize(m);
    for (int i = 0; i < m; ++i) {
      EdgeUse& eu = g.edges[i];
      eu.edge_id = mesh.cell_edges[c][i];
      eu.a = pts[i];
      eu.b = pts[(i + 1) % m];
      eu.length = (eu.b - eu.a).norm();
      const Vec2 t = (eu.b - eu.a) / eu.length;
      eu.normal = Vec2(t.y(), -t.x());
      eu.midpoint = 0.5 * (eu.a + eu.b);
      const MeshEdge& e = mesh.edges[eu.edge_id];
      eu.along_global = (mesh.cells[c][i] == e.v0);
      eu.tangent_global = eu.along_global ? t : Vec2(-t);
    }
  }
  return geom;
}

double mesh_size(const GeomCache& geom) {
  double h = 0.0;
  for (const auto& e : geom.elems) h = std::max(h, e.diameter);
  return h;
}

double mesh_size(const PolyMesh& mesh) { return mesh_size(build_geometry(mesh)); }

QualityReport quality_report(const PolyMesh& mesh, double warn_threshold) {
  QualityReport rep;
  rep.warn_threshold = warn_threshold;
  const GeomCache geom = build_geometry(mesh);
  rep.inscribed_ratio.resize(mesh.n_cells());
  rep.vertex_dist_ratio.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& g = geom[c];
    double rin = g.diameter;
    for (const auto& eu : g.edges) rin = std::min(rin, (g.centroid - eu.a).dot(eu.normal) * -1.0);
    // distance from centroid to the edge line, positive for star-shaped cells
    double dmin = g.diameter;
    const auto pts = cell_points(mesh, c);
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = i + 1; j < pts.size(); ++j)
        dmin = std::min(dmin, (pts[i] - pts[j]).norm());
    rep.inscribed_ratio[c] = rin / g.diameter;
    rep.vertex_dist_ratio[c] = dmin / g.diameter;
    rep.min_inscribed_ratio = std::min(rep.min_inscribed_ratio, rep.inscribed_ratio[c]);
    rep.min_vertex_dist_ratio = std::min(rep.min_vertex_dist_ratio, rep.vertex_dist_ratio[c]);
    if (rep.inscribed_ratio[c] < warn_threshold || rep.vertex_dist_ratio[c] < warn_threshold)
      rep.flagged_cells.push_back(c);
  }
  return rep;
}

}  // namespace vemmhd
