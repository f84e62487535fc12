// Test-only oracles, independent of the library's quadrature/projection
// paths: Green's-theorem monomial integrals, finite differences, and
// deterministic random polygon generators.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "vemmhd/mesh.hpp"
#include "vemmhd/polybasis.hpp"

namespace oracle {

using vemmhd::Vec2;

inline double rng_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// int_E ((x-cx)/h)^a ((y-cy)/h)^b dE via the edge integral of an x-primitive,
// with plain Gauss-Legendre on each edge. Exact for polygons.
inline double greens_monomial(const std::vector<Vec2>& poly, const Vec2& center, double h, int a,
                              int b) {
  const int n = static_cast<int>(poly.size());
  const int npts = a + b + 3;
  Eigen::VectorXd gx, gw;
  vemmhd::gauss_legendre(npts, gx, gw);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % n];
    const Vec2 t = q - p;
    const double len = t.norm();
    const Vec2 normal(t.y() / len, -t.x() / len);
    for (int g = 0; g < gx.size(); ++g) {
      const Vec2 x = p + 0.5 * (gx[g] + 1.0) * t;
      const double sx = (x.x() - center.x()) / h;
      const double sy = (x.y() - center.y()) / h;
      // primitive F = h/(a+1) * m_{a+1,b}, integrated against n_x
      acc += 0.5 * len * gw[g] * (h / (a + 1.0)) * std::pow(sx, a + 1) * std::pow(sy, b) *
             normal.x();
    }
  }
  return acc;
}

// Deterministic random convex polygon, shape-regular in the sense of the
// usual star-shapedness assumptions: jittered equispaced angles on a circle
// keep the inradius-to-diameter ratio bounded away from zero.
inline std::vector<Vec2> random_convex_polygon(std::mt19937_64& rng, int n_min = 3,
                                               int n_max = 9) {
  const int n = n_min + static_cast<int>(rng() % static_cast<std::uint64_t>(n_max - n_min + 1));
  const double cx = 2.0 * rng_uniform(rng) - 1.0;
  const double cy = 2.0 * rng_uniform(rng) - 1.0;
  const double scale = 0.2 + 1.5 * rng_uniform(rng);
  const double phase = 2.0 * M_PI * rng_uniform(rng);
  std::vector<Vec2> poly(n);
  for (int i = 0; i < n; ++i) {
    const double ang =
        phase + 2.0 * M_PI * (i + 0.35 * (2.0 * rng_uniform(rng) - 1.0)) / n;
    const double r = scale * (0.6 + 0.4 * rng_uniform(rng));
    poly[i] = Vec2(cx + r * std::cos(ang), cy + r * std::sin(ang));
  }
  return poly;
}

// Single-polygon element geometry via a one-cell mesh.
inline vemmhd::ElementGeometry polygon_geometry(const std::vector<Vec2>& poly) {
  std::vector<int> loop(poly.size());
  for (size_t i = 0; i < poly.size(); ++i) loop[i] = static_cast<int>(i);
  const vemmhd::PolyMesh mesh = vemmhd::build_mesh(poly, {loop});
  return vemmhd::build_geometry(mesh).elems[0];
}

// Central finite differences for the forcing oracle.
template <typename F>
Vec2 fd_grad(const F& f, const Vec2& x, double h = 1e-5) {
  return Vec2((f(Vec2(x.x() + h, x.y())) - f(Vec2(x.x() - h, x.y()))) / (2 * h),
              (f(Vec2(x.x(), x.y() + h)) - f(Vec2(x.x(), x.y() - h))) / (2 * h));
}

template <typename F>
Eigen::Matrix2d fd_jacobian(const F& f, const Vec2& x, double h = 1e-5) {
  Eigen::Matrix2d j;
  const Vec2 fxp = f(Vec2(x.x() + h, x.y())), fxm = f(Vec2(x.x() - h, x.y()));
  const Vec2 fyp = f(Vec2(x.x(), x.y() + h)), fym = f(Vec2(x.x(), x.y() - h));
  j.col(0) = (fxp - fxm) / (2 * h);
  j.col(1) = (fyp - fym) / (2 * h);
  return j;
}

template <typename F>
Vec2 fd_laplacian(const F& f, const Vec2& x, double h = 1e-4) {
  const Vec2 c = f(x);
  const Vec2 xp = f(Vec2(x.x() + h, x.y())), xm = f(Vec2(x.x() - h, x.y()));
  const Vec2 yp = f(Vec2(x.x(), x.y() + h)), ym = f(Vec2(x.x(), x.y() - h));
  return (xp + xm + yp + ym - 4.0 * c) / (h * h);
}

}  // namespace oracle
