#pragma once

#include <Eigen/Dense>

#include "vemmhd/mesh.hpp"

namespace vemmhd {

// Quadrature rule in physical coordinates. Weights carry the measure of
// the integration domain (area or length).
struct QuadRule {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
  Vec2 point(int q) const { return points.row(q).transpose(); }
};

// Edge rule additionally exposes the Legendre parameter t in [-1,1]
// measured along the edge's global direction.
struct EdgeQuadRule : QuadRule {
  Eigen::VectorXd t;
};

// Gauss-Legendre nodes/weights on [-1,1]; exact for degree 2n-1.
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

// Fan rule from the centroid; signed sub-triangles keep it exact on any
// simple polygon, star-shaped or not.
QuadRule polygon_quadrature(const ElementGeometry& elem, int order);

EdgeQuadRule edge_quadrature(const EdgeUse& edge, int order);

}  // namespace vemmhd
