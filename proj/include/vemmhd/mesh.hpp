#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace vemmhd {

using Vec2 = Eigen::Vector2d;

// Undirected mesh edge. Vertex indices are stored sorted (v0 < v1); the
// "global direction" of an edge runs from v0 to v1 and fixes the sign of
// all edge-polynomial bases independently of which cell looks at it.
struct MeshEdge {
  int v0 = -1;
  int v1 = -1;
  int cell_left = -1;   // first cell that registered the edge
  int cell_right = -1;  // second cell, -1 on the boundary
  bool boundary = false;
};

// Polygonal mesh: vertices + CCW cell loops + derived edge connectivity.
struct PolyMesh {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;       // CCW vertex loops
  std::vector<MeshEdge> edges;               // unique, derived
  std::vector<std::vector<int>> cell_edges;  // per cell, edge id per side i -> (v_i, v_{i+1})

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_boundary_edges() const;
};

// One side of an element boundary, in cell traversal (CCW) order.
struct EdgeUse {
  int edge_id = -1;
  Vec2 a, b;            // endpoints in traversal order
  Vec2 normal;          // unit outward normal of the cell
  Vec2 tangent_global;  // unit tangent in the edge's global direction
  Vec2 midpoint;
  double length = 0.0;
  bool along_global = true;  // traversal a->b matches global v0->v1
};

struct ElementGeometry {
  double area = 0.0;
  double diameter = 0.0;
  Vec2 centroid = Vec2::Zero();
  std::vector<EdgeUse> edges;
};

// Immutable per-element geometry; shareable across threads once built.
struct GeomCache {
  std::vector<ElementGeometry> elems;

  const ElementGeometry& operator[](int c) const { return elems[c]; }
  int size() const { return static_cast<int>(elems.size()); }
};

struct QualityReport {
  std::vector<double> inscribed_ratio;   // per cell, centroid-to-edge distance / h_E
  std::vector<double> vertex_dist_ratio; // per cell, min pairwise vertex distance / h_E
  double min_inscribed_ratio = 1.0;
  double min_vertex_dist_ratio = 1.0;
  std::vector<int> flagged_cells;        // ratios below the warning threshold
  double warn_threshold = 0.05;
};

enum class MeshFamily { tri, quad, perturbed_quad, voronoi };

MeshFamily parse_family(const std::string& name);

// Validates loops, derives edges and boundary flags, re-orients CW cells.
PolyMesh build_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells);

// Generator families on an axis-aligned rectangle (default unit square).
// n is the number of subdivisions per unit of the short side; all families
// are deterministic for a fixed seed.
PolyMesh gen_family(MeshFamily family, int n, std::uint64_t seed = 0,
                    const Vec2& lo = Vec2(0.0, 0.0), const Vec2& hi = Vec2(1.0, 1.0));

GeomCache build_geometry(const PolyMesh& mesh);

double mesh_size(const PolyMesh& mesh);
double mesh_size(const GeomCache& geom);

QualityReport quality_report(const PolyMesh& mesh, double warn_threshold = 0.05);

}  // namespace vemmhd
