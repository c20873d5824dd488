#pragma once

// Hand-rolled generators shared by the property tests.

#include "tpdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace tpdg::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline VectorXd random_vector(Rng& rng, Index n) {
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = uniform(rng, -1.0, 1.0);
  return v;
}

/// Convex polygon: sorted angles on a rotated, shifted ellipse.
inline std::vector<Point> random_convex_polygon(Rng& rng, int min_vertices = 3, int max_vertices = 9) {
  const int n = std::uniform_int_distribution<int>(min_vertices, max_vertices)(rng);
  std::vector<double> angles(n);
  for (auto& a : angles) a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  std::sort(angles.begin(), angles.end());
  // reject near-duplicate angles, they make degenerate edges
  for (int i = 0; i < n; ++i) {
    const double gap = i + 1 < n ? angles[i + 1] - angles[i] : angles[0] + 2 * std::numbers::pi - angles[i];
    if (gap < 1e-2) return random_convex_polygon(rng, min_vertices, max_vertices);
  }
  const double rx = uniform(rng, 0.2, 3.0), ry = uniform(rng, 0.2, 3.0);
  const double rot = uniform(rng, 0.0, std::numbers::pi);
  const Point shift(uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0));
  std::vector<Point> poly;
  for (const double a : angles) {
    const Point e(rx * std::cos(a), ry * std::sin(a));
    poly.emplace_back(shift + Point(std::cos(rot) * e.x() - std::sin(rot) * e.y(),
                                    std::sin(rot) * e.x() + std::cos(rot) * e.y()));
  }
  if (polygon_area(poly) <= 0.0 || !polygon_is_convex(poly))
    return random_convex_polygon(rng, min_vertices, max_vertices);
  return poly;
}

/// Shoelace area written out independently of the library.
inline double shoelace(const std::vector<Point>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point& a = p[i];
    const Point& b = p[(i + 1) % p.size()];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;
}

/// Bivariate polynomial sum c_ij x^i y^j, i + j <= degree.
struct Polynomial {
  int degree = 0;
  std::vector<double> c;  // graded order

  double operator()(const Point& x) const {
    double s = 0.0;
    std::size_t m = 0;
    for (int d = 0; d <= degree; ++d)
      for (int j = 0; j <= d; ++j) s += c[m++] * std::pow(x.x(), d - j) * std::pow(x.y(), j);
    return s;
  }
};

inline Polynomial random_polynomial(Rng& rng, int degree) {
  Polynomial p;
  p.degree = degree;
  p.c.resize(static_cast<std::size_t>((degree + 1) * (degree + 2) / 2));
  for (auto& c : p.c) c = uniform(rng, -1.0, 1.0);
  return p;
}

/// Cartesian grid with interior vertices jittered by up to `amount` of the spacing.
inline PolyMesh jittered_grid(Rng& rng, Index n, double amount) {
  const PolyMesh base = cartesian_grid(n, n);
  std::vector<Point> v = base.vertices();
  const double h = 1.0 / static_cast<double>(n);
  for (auto& p : v) {
    const bool interior = p.x() > 1e-12 && p.x() < 1 - 1e-12 && p.y() > 1e-12 && p.y() < 1 - 1e-12;
    if (interior) p += Point(uniform(rng, -amount, amount), uniform(rng, -amount, amount)) * h;
  }
  std::vector<std::vector<Index>> cells;
  for (Index k = 0; k < base.num_cells(); ++k) cells.push_back(base.cell(k));
  return PolyMesh(v, cells, base.regions());
}

}  // namespace tpdg::testing
