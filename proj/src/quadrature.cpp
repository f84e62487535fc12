#include "vemmhd/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

namespace vemmhd {

namespace {

struct GL {
  Eigen::VectorXd x, w;
};

// Newton iteration on P_n with the usual cosine initial guesses.
GL compute_gauss_legendre(int n) {
  GL gl;
  gl.x.resize(n);
  gl.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pn1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.x[n - 1 - i] = x;
    gl.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

const GL& cached_gauss_legendre(int n) {
  static std::map<int, GL> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

// Tensor rule on the reference triangle {(u,v): u,v >= 0, u+v <= 1} via the
// Duffy map (a,b) in [0,1]^2 -> (a, b(1-a)), Jacobian (1-a). A polynomial of
// degree d pulls back to degree <= d+1 in a and <= d in b.
struct TriRule {
  Eigen::MatrixX2d pts;
  Eigen::VectorXd w;
};

TriRule triangle_reference_rule(int order) {
  const int na = (order + 3) / 2;  // exact to degree order+1 in a
  const int nb = (order + 2) / 2;
  const GL& ga = cached_gauss_legendre(na);
  const GL& gb = cached_gauss_legendre(nb);
  TriRule rule;
  rule.pts.resize(na * nb, 2);
  rule.w.resize(na * nb);
  int q = 0;
  for (int i = 0; i < na; ++i) {
    const double a = 0.5 * (ga.x[i] + 1.0);
    const double wa = 0.5 * ga.w[i];
    for (int j = 0; j < nb; ++j, ++q) {
      const double b = 0.5 * (gb.x[j] + 1.0);
      const double wb = 0.5 * gb.w[j];
      rule.pts(q, 0) = a;
      rule.pts(q, 1) = b * (1.0 - a);
      rule.w[q] = wa * wb * (1.0 - a);
    }
  }
  return rule;
}

}  // namespace

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  const GL& gl = cached_gauss_legendre(n);
  nodes = gl.x;
  weights = gl.w;
}

QuadRule polygon_quadrature(const ElementGeometry& elem, int order) {
  const TriRule ref = triangle_reference_rule(std::max(order, 0));
  const int nt = static_cast<int>(elem.edges.size());
  const int per = ref.w.size();
  QuadRule rule;
  rule.exactness = std::max(order, 0);
  rule.points.resize(nt * per, 2);
  rule.weights.resize(nt * per);
  int q = 0;
  for (int t = 0; t < nt; ++t) {
    const Vec2 p0 = elem.centroid;
    const Vec2 p1 = elem.edges[t].a;
    const Vec2 p2 = elem.edges[t].b;
    const double jac = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
    for (int i = 0; i < per; ++i, ++q) {
      const double u = ref.pts(i, 0), v = ref.pts(i, 1);
      const Vec2 x = p0 + u * (p1 - p0) + v * (p2 - p0);
      rule.points(q, 0) = x.x();
      rule.points(q, 1) = x.y();
      rule.weights[q] = ref.w[i] * jac;  // signed: folds cancel exactly
    }
  }
  return rule;
}

EdgeQuadRule edge_quadrature(const EdgeUse& edge, int order) {
  const int n = std::max(1, (std::max(order, 0) + 2) / 2);
  const GL& gl = cached_gauss_legendre(n);
  EdgeQuadRule rule;
  rule.exactness = 2 * n - 1;
  rule.points.resize(n, 2);
  rule.weights.resize(n);
  rule.t.resize(n);
  const Vec2 ga = edge.along_global ? edge.a : edge.b;  // global start vertex
  const Vec2 gb = edge.along_global ? edge.b : edge.a;
  for (int i = 0; i < n; ++i) {
    const double t = gl.x[i];
    const Vec2 x = 0.5 * (1.0 - t) * ga + 0.5 * (1.0 + t) * gb;
    rule.points(i, 0) = x.x();
    rule.points(i, 1) = x.y();
    rule.weights[i] = 0.5 * edge.length * gl.w[i];
    rule.t[i] = t;
  }
  return rule;
}

}  // namespace vemmhd
