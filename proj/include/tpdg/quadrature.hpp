#pragma once

#include "tpdg/types.hpp"

#include <array>
#include <vector>

namespace tpdg {

/// Highest polynomial order accepted by the cell and face rules.
inline constexpr int kMaxQuadratureOrder = 60;

struct QuadratureRule1D {
  std::vector<double> points;  // on [-1, 1]
  std::vector<double> weights;
};

struct QuadratureRule2D {
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on [-1,1], exact for polynomials of degree 2n-1.
QuadratureRule1D gauss_legendre(int n);

/// Rule on the reference triangle (0,0),(1,0),(0,1) exact for total degree q.
/// Built by collapsing a tensor Gauss rule onto the triangle.
QuadratureRule2D triangle_rule(int q);

/// Reference triangle rule mapped to the physical triangle t.
QuadratureRule2D map_triangle_rule(const QuadratureRule2D& ref, const std::array<Point, 3>& t);

/// Gauss rule exact for degree q on the segment [a,b]; weights include the length.
QuadratureRule2D segment_rule(int q, const Point& a, const Point& b);

/// Union of mapped triangle rules over all triangles.
QuadratureRule2D polygon_rule(int q, const std::vector<std::array<Point, 3>>& triangles);

}  // namespace tpdg
