#include "tpdg/manufactured.hpp"

#include <numbers>

namespace tpdg {

namespace {

Vec2 value(const VectorJet& v) { return {v[0].v, v[1].v}; }
Mat2 gradient(const VectorJet& v) {
  Mat2 G;
  G.row(0) = v[0].g.transpose();
  G.row(1) = v[1].g.transpose();
  return G;
}
double divergence(const VectorJet& v) { return v[0].g(0) + v[1].g(1); }
Vec2 grad_div(const VectorJet& v) {
  return {v[0].H(0, 0) + v[1].H(1, 0), v[0].H(0, 1) + v[1].H(1, 1)};
}
Vec2 laplacian(const VectorJet& v) { return {v[0].laplacian(), v[1].laplacian()}; }

}  // namespace

Vec2 ManufacturedCase::u(const Point& x, double t) const { return a.f(t) * value(U(x)); }
Vec2 ManufacturedCase::w(const Point& x, double t) const { return aw.f(t) * value(Wp(x)); }
double ManufacturedCase::T(const Point& x, double t) const { return b.f(t) * Theta(x).v; }
Vec2 ManufacturedCase::u_t(const Point& x, double t) const { return a.df(t) * value(U(x)); }
Vec2 ManufacturedCase::w_t(const Point& x, double t) const { return aw.df(t) * value(Wp(x)); }
double ManufacturedCase::T_t(const Point& x, double t) const { return b.df(t) * Theta(x).v; }
Vec2 ManufacturedCase::u_tt(const Point& x, double t) const { return a.ddf(t) * value(U(x)); }
Vec2 ManufacturedCase::w_tt(const Point& x, double t) const { return aw.ddf(t) * value(Wp(x)); }
double ManufacturedCase::T_tt(const Point& x, double t) const { return b.ddf(t) * Theta(x).v; }
Mat2 ManufacturedCase::grad_u(const Point& x, double t) const { return a.f(t) * gradient(U(x)); }
Mat2 ManufacturedCase::grad_w(const Point& x, double t) const { return aw.f(t) * gradient(Wp(x)); }
Vec2 ManufacturedCase::grad_T(const Point& x, double t) const { return b.f(t) * Theta(x).g; }

double ManufacturedCase::pressure(const Point& x, double t) const {
  const auto& m = material;
  return -(m.alpha * a.f(t) * divergence(U(x)) + aw.f(t) * divergence(Wp(x)) -
           m.b0 * (b.f(t) - b.f(0.0)) * Theta(x).v) /
         m.c0;
}

Vec2 ManufacturedCase::grad_pressure(const Point& x, double t) const {
  const auto& m = material;
  return -(m.alpha * a.f(t) * grad_div(U(x)) + aw.f(t) * grad_div(Wp(x)) -
           m.b0 * (b.f(t) - b.f(0.0)) * Theta(x).g) /
         m.c0;
}

Vec2 ManufacturedCase::f(const Point& x, double t) const {
  const auto& m = material;
  const auto Uj = U(x);
  const auto Wj = Wp(x);
  const auto Th = Theta(x);
  const Vec2 gdU = grad_div(Uj);
  return m.rho() * a.ddf(t) * value(Uj) + m.rho_f * aw.ddf(t) * value(Wj) +
         a.f(t) * (-m.mu * (laplacian(Uj) + gdU) - (m.lambda + m.alpha * m.alpha / m.c0) * gdU) -
         aw.f(t) * (m.alpha / m.c0) * grad_div(Wj) + b.f(t) * m.coupling_u() * Th.g;
}

Vec2 ManufacturedCase::g(const Point& x, double t) const {
  const auto& m = material;
  const auto Uj = U(x);
  const auto Wj = Wp(x);
  const auto Th = Theta(x);
  return m.rho_f * a.ddf(t) * value(Uj) + m.rho_w() * aw.ddf(t) * value(Wj) +
         aw.df(t) / m.k * value(Wj) - a.f(t) * (m.alpha / m.c0) * grad_div(Uj) -
         aw.f(t) / m.c0 * grad_div(Wj) + b.f(t) * m.coupling_w() * Th.g;
}

double ManufacturedCase::H(const Point& x, double t) const {
  const auto& m = material;
  const auto Th = Theta(x);
  return m.reduced_capacity() * (b.df(t) + m.tau * b.ddf(t)) * Th.v +
         m.coupling_u() * (a.df(t) + m.tau * a.ddf(t)) * divergence(U(x)) +
         m.coupling_w() * (aw.df(t) + m.tau * aw.ddf(t)) * divergence(Wp(x)) -
         m.theta * b.f(t) * Th.laplacian();
}

ManufacturedCase standard_manufactured_case(const MaterialRegion& material) {
  constexpr double pi = std::numbers::pi;
  const double om = std::numbers::sqrt2 * pi;
  ManufacturedCase mc;
  mc.material = material;
  auto profile = [](const Point& p) {
    const Jet2 x = Jet2::variable(p, 0);
    return x * x * cos(x * (pi / 2.0)) * sin(x * pi);
  };
  mc.U = [profile](const Point& p) {
    const Jet2 s = profile(p);
    return VectorJet{s, s};
  };
  mc.Wp = [profile](const Point& p) {
    const Jet2 s = -profile(p);
    return VectorJet{s, s};
  };
  mc.Theta = [](const Point& p) {
    const Jet2 x = Jet2::variable(p, 0);
    const Jet2 y = Jet2::variable(p, 1);
    return x * x * sin(x * pi) * sin(y * pi);
  };
  mc.a = {[om](double t) { return std::cos(om * t); },
          [om](double t) { return -om * std::sin(om * t); },
          [om](double t) { return -om * om * std::cos(om * t); }};
  mc.aw = mc.a;
  mc.b = {[om](double t) { return std::sin(om * t); },
          [om](double t) { return om * std::cos(om * t); },
          [om](double t) { return -om * om * std::sin(om * t); }};
  return mc;
}

VectorXd SeparableLoad::operator()(double t) const {
  VectorXd out = VectorXd::Zero(vectors.empty() ? 0 : vectors.front().size());
  for (std::size_t m = 0; m < vectors.size(); ++m) out += factors[m](t) * vectors[m];
  return out;
}

SeparableLoad manufactured_load(const ManufacturedCase& mc, const DGSpace& space,
                                const PenaltyCoefficients& pen, int order) {
  const auto& m = mc.material;
  const std::vector<MaterialRegion> cells(static_cast<std::size_t>(space.mesh().num_cells()), m);
  const VectorField zero_v = [](const Point&) { return Vec2::Zero().eval(); };
  const ScalarField zero_s = [](const Point&) { return 0.0; };
  auto U = [&](const Point& x) { return value(mc.U(x)); };
  auto W = [&](const Point& x) { return value(mc.Wp(x)); };
  auto Th = [&](const Point& x) { return mc.Theta(x).v; };

  SeparableLoad L;
  auto add = [&](VectorXd v, std::function<double(double)> c) {
    L.vectors.push_back(std::move(v));
    L.factors.push_back(std::move(c));
  };
  auto vol = [&](const VectorField& f, const VectorField& g, const ScalarField& H) {
    return assemble_volume_load(space, &f, &g, &H, order);
  };

  // a(t)
  add(vol([&](const Point& x) {
        const auto j = mc.U(x);
        const Vec2 gd = grad_div(j);
        return Vec2(-m.mu * (laplacian(j) + gd) - (m.lambda + m.alpha * m.alpha / m.c0) * gd);
      },
      [&](const Point& x) { return Vec2(-(m.alpha / m.c0) * grad_div(mc.U(x))); }, zero_s) +
          assemble_dirichlet_lift(space, cells, pen, U, zero_v, zero_s, order),
      mc.a.f);
  // aw(t)
  add(vol([&](const Point& x) { return Vec2(-(m.alpha / m.c0) * grad_div(mc.Wp(x))); },
          [&](const Point& x) { return Vec2(-grad_div(mc.Wp(x)) / m.c0); }, zero_s) +
          assemble_dirichlet_lift(space, cells, pen, zero_v, W, zero_s, order),
      mc.aw.f);
  // b(t)
  add(vol([&](const Point& x) { return Vec2(m.coupling_u() * mc.Theta(x).g); },
          [&](const Point& x) { return Vec2(m.coupling_w() * mc.Theta(x).g); },
          [&](const Point& x) { return -m.theta * mc.Theta(x).laplacian(); }) +
          assemble_dirichlet_lift(space, cells, pen, zero_v, zero_v, Th, order),
      mc.b.f);
  // a'(t), a''(t)
  add(vol(zero_v, zero_v, [&](const Point& x) { return m.coupling_u() * divergence(mc.U(x)); }) +
          assemble_coupling_lift(space, cells, U, zero_v, order),
      mc.a.df);
  add(vol([&](const Point& x) { return Vec2(m.rho() * U(x)); },
          [&](const Point& x) { return Vec2(m.rho_f * U(x)); },
          [&](const Point& x) { return m.tau * m.coupling_u() * divergence(mc.U(x)); }) +
          m.tau * assemble_coupling_lift(space, cells, U, zero_v, order),
      mc.a.ddf);
  // aw'(t), aw''(t)
  add(vol(zero_v, [&](const Point& x) { return Vec2(W(x) / m.k); },
          [&](const Point& x) { return m.coupling_w() * divergence(mc.Wp(x)); }) +
          assemble_coupling_lift(space, cells, zero_v, W, order),
      mc.aw.df);
  add(vol([&](const Point& x) { return Vec2(m.rho_f * W(x)); },
          [&](const Point& x) { return Vec2(m.rho_w() * W(x)); },
          [&](const Point& x) { return m.tau * m.coupling_w() * divergence(mc.Wp(x)); }) +
          m.tau * assemble_coupling_lift(space, cells, zero_v, W, order),
      mc.aw.ddf);
  // b'(t), b''(t)
  add(vol(zero_v, zero_v, [&](const Point& x) { return m.reduced_capacity() * Th(x); }),
      mc.b.df);
  add(vol(zero_v, zero_v, [&](const Point& x) { return m.tau * m.reduced_capacity() * Th(x); }),
      mc.b.ddf);
  return L;
}

VectorXd manufactured_load_at(const ManufacturedCase& mc, const DGSpace& space,
                              const PenaltyCoefficients& pen, double t, int order) {
  const auto& m = mc.material;
  const std::vector<MaterialRegion> cells(static_cast<std::size_t>(space.mesh().num_cells()), m);
  const VectorField f = [&](const Point& x) { return mc.f(x, t); };
  const VectorField g = [&](const Point& x) { return mc.g(x, t); };
  const ScalarField H = [&](const Point& x) { return mc.H(x, t); };
  const VectorField gu = [&](const Point& x) { return mc.u(x, t); };
  const VectorField gw = [&](const Point& x) { return mc.w(x, t); };
  const ScalarField gT = [&](const Point& x) { return mc.T(x, t); };
  const VectorField ru = [&](const Point& x) {
    return Vec2(mc.u_t(x, t) + m.tau * mc.a.ddf(t) * value(mc.U(x)));
  };
  const VectorField rw = [&](const Point& x) {
    return Vec2(mc.w_t(x, t) + m.tau * mc.aw.ddf(t) * value(mc.Wp(x)));
  };
  return assemble_volume_load(space, &f, &g, &H, order) +
         assemble_dirichlet_lift(space, cells, pen, gu, gw, gT, order) +
         assemble_coupling_lift(space, cells, ru, rw, order);
}

}  // namespace tpdg
