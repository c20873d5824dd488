#include "tpdg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace tpdg {

namespace {

QuadratureRule1D compute_gauss_legendre(int n) {
  QuadratureRule1D rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[static_cast<std::size_t>(i)] = -x;
    rule.points[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.points[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

QuadratureRule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  if (n == 1) return {{0.0}, {2.0}};
  static std::mutex mutex;
  static std::map<int, QuadratureRule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

QuadratureRule2D triangle_rule(int q) {
  if (q < 0 || q > kMaxQuadratureOrder)
    throw std::invalid_argument("triangle_rule: order " + std::to_string(q) + " outside [0, " +
                                std::to_string(kMaxQuadratureOrder) + "]");
  // (u,v) in [0,1]^2 -> (x,y) = (u, v(1-u)); Jacobian (1-u), degree one higher in u
  const int n = std::max(1, (q + 2 + 1) / 2);
  const auto g = gauss_legendre(n);
  QuadratureRule2D rule;
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (g.points[static_cast<std::size_t>(i)] + 1.0);
    const double wu = 0.5 * g.weights[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (g.points[static_cast<std::size_t>(j)] + 1.0);
      const double wv = 0.5 * g.weights[static_cast<std::size_t>(j)];
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(wu * wv * (1.0 - u));
    }
  }
  return rule;
}

QuadratureRule2D map_triangle_rule(const QuadratureRule2D& ref, const std::array<Point, 3>& t) {
  const Vec2 e1 = t[1] - t[0];
  const Vec2 e2 = t[2] - t[0];
  const double jac = std::abs(cross(e1, e2));
  QuadratureRule2D out;
  out.points.reserve(ref.size());
  out.weights.reserve(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    out.points.push_back(t[0] + ref.points[i].x() * e1 + ref.points[i].y() * e2);
    out.weights.push_back(ref.weights[i] * jac);
  }
  return out;
}

QuadratureRule2D segment_rule(int q, const Point& a, const Point& b) {
  if (q < 0 || q > kMaxQuadratureOrder)
    throw std::invalid_argument("segment_rule: order " + std::to_string(q) + " outside [0, " +
                                std::to_string(kMaxQuadratureOrder) + "]");
  const int n = std::max(1, (q + 2) / 2);
  const auto g = gauss_legendre(n);
  const double len = (b - a).norm();
  QuadratureRule2D out;
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (g.points[static_cast<std::size_t>(i)] + 1.0);
    out.points.push_back(a + s * (b - a));
    out.weights.push_back(0.5 * len * g.weights[static_cast<std::size_t>(i)]);
  }
  return out;
}

QuadratureRule2D polygon_rule(int q, const std::vector<std::array<Point, 3>>& triangles) {
  const auto ref = triangle_rule(q);
  QuadratureRule2D out;
  for (const auto& t : triangles) {
    const auto m = map_triangle_rule(ref, t);
    out.points.insert(out.points.end(), m.points.begin(), m.points.end());
    out.weights.insert(out.weights.end(), m.weights.begin(), m.weights.end());
  }
  return out;
}

}  // namespace tpdg
