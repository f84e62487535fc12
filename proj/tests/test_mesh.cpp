#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <set>

#include "oracles.hpp"
#include "vemmhd/exceptions.hpp"
#include "vemmhd/mesh.hpp"
#include "vemmhd/mesh_io.hpp"

using namespace vemmhd;

TEST_CASE("single unit square cell") {
  const PolyMesh mesh = build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
  CHECK(mesh.n_cells() == 1);
  CHECK(mesh.n_edges() == 4);
  CHECK(mesh.n_boundary_edges() == 4);
  const GeomCache geom = build_geometry(mesh);
  CHECK(geom[0].area == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mesh_size(mesh) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("2x2 quad grid counts") {
  const PolyMesh mesh = gen_family(MeshFamily::quad, 2);
  CHECK(mesh.n_cells() == 4);
  CHECK(mesh.n_edges() == 12);
  CHECK(mesh.n_boundary_edges() == 8);
}

TEST_CASE("shared reversed edge is interior (brute-force oracle)") {
  // two triangles sharing edge (1,2), traversed oppositely
  const PolyMesh mesh = build_mesh({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{0, 1, 2}, {1, 3, 2}});
  // oracle: count (a,b) side pairs over all cells
  std::map<std::pair<int, int>, int> count;
  for (const auto& loop : mesh.cells)
    for (size_t i = 0; i < loop.size(); ++i) {
      const auto key = std::minmax(loop[i], loop[(i + 1) % loop.size()]);
      ++count[key];
    }
  for (const auto& e : mesh.edges) {
    const int c = count.at({e.v0, e.v1});
    CHECK(c == (e.boundary ? 1 : 2));
  }
  int interior = 0;
  for (const auto& e : mesh.edges) interior += e.boundary ? 0 : 1;
  CHECK(interior == 1);
}

TEST_CASE("CW loops re-oriented, invalid cells rejected") {
  const PolyMesh mesh = build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{3, 2, 1, 0}});  // CW
  const GeomCache geom = build_geometry(mesh);
  CHECK(geom[0].area > 0.0);

  CHECK_THROWS_AS(build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 2, 1, 3}}),
                  SelfIntersectingCell);
  CHECK_THROWS_AS(build_mesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), DegenerateCell);
  // an edge with three incident cells
  CHECK_THROWS_AS(build_mesh({{0, 0}, {1, 0}, {0, 1}, {0, -1}, {-1, 0.5}},
                             {{0, 1, 2}, {0, 3, 1}, {0, 1, 4}}),
                  NonManifoldEdge);
}

TEST_CASE("generator sizes match the reported mesh sizes") {
  CHECK(mesh_size(gen_family(MeshFamily::quad, 4)) == doctest::Approx(0.3536).epsilon(1e-3));
  CHECK(mesh_size(gen_family(MeshFamily::quad, 8)) == doctest::Approx(0.1768).epsilon(1e-3));
  CHECK(mesh_size(gen_family(MeshFamily::quad, 4)) ==
        doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-14));
  const PolyMesh tri1 = gen_family(MeshFamily::tri, 1);
  CHECK(tri1.n_cells() == 2);
  CHECK(mesh_size(tri1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("perturbed_quad is deterministic in the seed") {
  const PolyMesh a = gen_family(MeshFamily::perturbed_quad, 4, 42);
  const PolyMesh b = gen_family(MeshFamily::perturbed_quad, 4, 42);
  const PolyMesh c = gen_family(MeshFamily::perturbed_quad, 4, 43);
  REQUIRE(a.n_vertices() == b.n_vertices());
  double max_diff = 0.0, diff_c = 0.0;
  for (int v = 0; v < a.n_vertices(); ++v) {
    max_diff = std::max(max_diff, (a.vertices[v] - b.vertices[v]).norm());
    diff_c = std::max(diff_c, (a.vertices[v] - c.vertices[v]).norm());
  }
  CHECK(max_diff == 0.0);  // bitwise
  CHECK(diff_c > 0.0);
}

TEST_CASE("generated families: area, Euler formula, outward normals") {
  for (const MeshFamily fam :
       {MeshFamily::tri, MeshFamily::quad, MeshFamily::perturbed_quad, MeshFamily::voronoi}) {
    for (const int n : {2, 5}) {
      const PolyMesh mesh = gen_family(fam, n, 7);
      const GeomCache geom = build_geometry(mesh);
      double area = 0.0;
      for (const auto& e : geom.elems) area += e.area;
      CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(mesh.n_vertices() - mesh.n_edges() + mesh.n_cells() == 1);
      for (int c = 0; c < mesh.n_cells(); ++c) {
        for (const auto& eu : geom[c].edges) {
          // nudge the midpoint along the normal; must land outside the cell
          const Vec2 probe = eu.midpoint + 1e-7 * geom[c].diameter * eu.normal;
          bool inside = false;
          const auto& loop = mesh.cells[c];
          const int m = static_cast<int>(loop.size());
          for (int i = 0; i < m; ++i) {
            const Vec2& a = mesh.vertices[loop[i]];
            const Vec2& b = mesh.vertices[loop[(i + 1) % m]];
            if ((a.y() > probe.y()) != (b.y() > probe.y())) {
              const double xi = a.x() + (probe.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
              if (xi > probe.x()) inside = !inside;
            }
          }
          CHECK_FALSE(inside);
        }
      }
    }
  }
}

TEST_CASE("quality report ratios") {
  const QualityReport quad = quality_report(gen_family(MeshFamily::quad, 3));
  CHECK(quad.min_vertex_dist_ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(quad.flagged_cells.empty());

  const PolyMesh eq = build_mesh({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}}, {{0, 1, 2}});
  const QualityReport qeq = quality_report(eq);
  CHECK(qeq.min_inscribed_ratio == doctest::Approx(1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-12));

  const PolyMesh sliver = build_mesh({{0, 0}, {1, 0}, {0.5, 0.01}}, {{0, 1, 2}});
  const QualityReport qs = quality_report(sliver);
  CHECK(qs.flagged_cells.size() == 1);
  CHECK(qs.min_inscribed_ratio < 0.05);
  for (double r : qs.inscribed_ratio) {
    CHECK(r > 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("voronoi determinism and h scaling") {
  const PolyMesh a = gen_family(MeshFamily::voronoi, 4, 11);
  const PolyMesh b = gen_family(MeshFamily::voronoi, 4, 11);
  REQUIRE(a.n_vertices() == b.n_vertices());
  for (int v = 0; v < a.n_vertices(); ++v) CHECK((a.vertices[v] - b.vertices[v]).norm() == 0.0);
  CHECK(a.n_cells() == 16);
  CHECK(mesh_size(a) < 3.0 / 4.0);  // comparable to the target spacing
}

TEST_CASE("mesh json round trip is exact") {
  const PolyMesh mesh = gen_family(MeshFamily::perturbed_quad, 3, 5);
  const std::string path = "roundtrip_mesh.json";
  write_mesh_json(mesh, path);
  const PolyMesh back = read_mesh_json(path);
  REQUIRE(back.n_vertices() == mesh.n_vertices());
  REQUIRE(back.n_cells() == mesh.n_cells());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    CHECK(back.vertices[v].x() == mesh.vertices[v].x());
    CHECK(back.vertices[v].y() == mesh.vertices[v].y());
  }
  for (int c = 0; c < mesh.n_cells(); ++c) CHECK(back.cells[c] == mesh.cells[c]);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_mesh_json("does_not_exist.json"), MeshFileError);
}
