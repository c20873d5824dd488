#pragma once

#include "tpdg/assembly.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace tpdg {

/// Second-order forward-mode jet in two variables: value, gradient, Hessian.
struct Jet2 {
  double v = 0.0;
  Vec2 g = Vec2::Zero();
  Mat2 H = Mat2::Zero();

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT: constants promote implicitly
  Jet2(double value, const Vec2& grad, const Mat2& hess) : v(value), g(grad), H(hess) {}

  /// The coordinate function x_i evaluated at x.
  static Jet2 variable(const Point& x, int i) {
    Jet2 j(x(i));
    j.g(i) = 1.0;
    return j;
  }
  double laplacian() const { return H.trace(); }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.v + b.v, a.g + b.g, a.H + b.H}; }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.v - b.v, a.g - b.g, a.H - b.H}; }
inline Jet2 operator-(const Jet2& a) { return {-a.v, -a.g, -a.H}; }
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v, a.v * b.g + b.v * a.g,
          a.v * b.H + b.v * a.H + a.g * b.g.transpose() + b.g * a.g.transpose()};
}
// chain rule for a scalar function with derivatives f0, f1, f2 at a.v
inline Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
  return {f0, f1 * a.g, f1 * a.H + f2 * a.g * a.g.transpose()};
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  const double r = 1.0 / b.v;
  return a * chain(b, r, -r * r, 2.0 * r * r * r);
}
inline Jet2 sin(const Jet2& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet2 cos(const Jet2& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

using VectorJet = std::array<Jet2, 2>;

/// Time factor with its first two derivatives.
struct TimeFactor {
  std::function<double(double)> f, df, ddf;
};

/// Exact solution u = a(t) U(x), w = aw(t) Wp(x), T = b(t) Theta(x) on a single material.
struct ManufacturedCase {
  MaterialRegion material;
  std::function<VectorJet(const Point&)> U, Wp;
  std::function<Jet2(const Point&)> Theta;
  TimeFactor a, aw, b;

  Vec2 u(const Point& x, double t) const;
  Vec2 w(const Point& x, double t) const;
  double T(const Point& x, double t) const;
  Vec2 u_t(const Point& x, double t) const;
  Vec2 w_t(const Point& x, double t) const;
  double T_t(const Point& x, double t) const;
  Vec2 u_tt(const Point& x, double t) const;
  Vec2 w_tt(const Point& x, double t) const;
  double T_tt(const Point& x, double t) const;
  /// rows: components, columns: derivatives
  Mat2 grad_u(const Point& x, double t) const;
  Mat2 grad_w(const Point& x, double t) const;
  Vec2 grad_T(const Point& x, double t) const;
  /// -(alpha div u + div w - b0 (T - T(., 0))) / c0
  double pressure(const Point& x, double t) const;
  Vec2 grad_pressure(const Point& x, double t) const;

  // Strong-form forcing of the three-field system.
  Vec2 f(const Point& x, double t) const;
  Vec2 g(const Point& x, double t) const;
  double H(const Point& x, double t) const;
};

/// u = (s, s) cos(sqrt2 pi t) with s = x^2 cos(pi x / 2) sin(pi x), w = -u,
/// T = x^2 sin(pi x) sin(pi y) sin(sqrt2 pi t) on the unit square.
ManufacturedCase standard_manufactured_case(const MaterialRegion& material);

/// Load F(t) = sum_m c_m(t) v_m with precomputed spatial vectors.
struct SeparableLoad {
  std::vector<VectorXd> vectors;
  std::vector<std::function<double(double)>> factors;

  VectorXd operator()(double t) const;
};

/// Right-hand side of the discrete system for a manufactured case, including
/// Dirichlet data taken from the exact solution on the whole boundary.
SeparableLoad manufactured_load(const ManufacturedCase& mc, const DGSpace& space,
                                const PenaltyCoefficients& pen, int order = -1);

/// Same right-hand side at one time, assembled pointwise from the strong forcing.
VectorXd manufactured_load_at(const ManufacturedCase& mc, const DGSpace& space,
                              const PenaltyCoefficients& pen, double t, int order = -1);

}  // namespace tpdg
