#include "tpdg/verification.hpp"

#include <chrono>
#include <cmath>

namespace tpdg {

namespace {

int norm_order(const DGSpace& space, int order) {
  return order < 0 ? 2 * space.max_degree() + 4 : order;
}

// Discrete vector field (values and gradients) of cell k at the rows of a table.
struct VectorSample {
  MatrixXd val;  // np x 2
  MatrixXd dx;   // np x 2, d/dx of each component
  MatrixXd dy;
};

VectorSample sample_vector(const DGSpace& space, Index k, const BasisTable& t, const VectorXd& v) {
  const Index n = space.local_dim(k);
  MatrixXd c(n, 2);
  c.col(0) = v.segment(2 * space.offset(k), n);
  c.col(1) = v.segment(2 * space.offset(k) + n, n);
  return {t.value * c, t.dx * c, t.dy * c};
}

struct ScalarSample {
  VectorXd val, dx, dy;
};

ScalarSample sample_scalar(const DGSpace& space, Index k, const BasisTable& t, const VectorXd& s) {
  const auto c = s.segment(space.offset(k), space.local_dim(k));
  return {t.value * c, t.dx * c, t.dy * c};
}

Mat2 grad_at(const VectorSample& s, Index q) {
  Mat2 G;
  G << s.dx(q, 0), s.dy(q, 0), s.dx(q, 1), s.dy(q, 1);
  return G;
}

// Jumps of (discrete - exact) across every face; fn(face, weight, jump vector)
template <class Fn>
void vector_face_loop(const DGSpace& space, const VectorXd& v, const ExactVector* exact, int order,
                      Fn&& fn) {
  const PolyMesh& mesh = space.mesh();
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const auto tab = tabulate_face(space, f, order);
    const auto so = sample_vector(space, face.owner, tab.owner, v);
    VectorSample sn;
    if (!face.is_boundary()) sn = sample_vector(space, face.neighbor, tab.neighbor, v);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const auto iq = static_cast<Index>(q);
      Vec2 jump = so.val.row(iq).transpose();
      if (face.is_boundary()) {
        if (exact) jump -= exact->value(tab.rule.points[q]);
      } else {
        jump -= sn.val.row(iq).transpose();
      }
      fn(f, face, tab.rule.weights[q], jump);
    }
  }
}

template <class Fn>
void scalar_face_loop(const DGSpace& space, const VectorXd& s, const ExactScalar* exact, int order,
                      Fn&& fn) {
  const PolyMesh& mesh = space.mesh();
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const auto tab = tabulate_face(space, f, order);
    const auto so = sample_scalar(space, face.owner, tab.owner, s);
    ScalarSample sn;
    if (!face.is_boundary()) sn = sample_scalar(space, face.neighbor, tab.neighbor, s);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const auto iq = static_cast<Index>(q);
      double jump = so.val(iq);
      if (face.is_boundary()) {
        if (exact) jump -= exact->value(tab.rule.points[q]);
      } else {
        jump -= sn.val(iq);
      }
      fn(f, tab.rule.weights[q], jump);
    }
  }
}

// Volume loop: fn(cell, weight, point, value error, gradient error)
template <class Fn>
void vector_cell_loop(const DGSpace& space, const VectorXd& v, const ExactVector* exact, int order,
                      Fn&& fn) {
  for (Index k = 0; k < space.mesh().num_cells(); ++k) {
    const auto tab = tabulate_cell(space, k, order);
    const auto s = sample_vector(space, k, tab.basis, v);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const auto iq = static_cast<Index>(q);
      Vec2 e = s.val.row(iq).transpose();
      Mat2 G = grad_at(s, iq);
      if (exact) {
        e -= exact->value(tab.rule.points[q]);
        if (exact->grad) G -= exact->grad(tab.rule.points[q]);
      }
      fn(k, tab.rule.weights[q], e, G);
    }
  }
}

template <class Fn>
void scalar_cell_loop(const DGSpace& space, const VectorXd& s, const ExactScalar* exact, int order,
                      Fn&& fn) {
  for (Index k = 0; k < space.mesh().num_cells(); ++k) {
    const auto tab = tabulate_cell(space, k, order);
    const auto smp = sample_scalar(space, k, tab.basis, s);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const auto iq = static_cast<Index>(q);
      double e = smp.val(iq);
      Vec2 g(smp.dx(iq), smp.dy(iq));
      if (exact) {
        e -= exact->value(tab.rule.points[q]);
        if (exact->grad) g -= exact->grad(tab.rule.points[q]);
      }
      fn(k, tab.rule.weights[q], e, g);
    }
  }
}

}  // namespace

double dg_norm_e(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                 const PenaltyCoefficients& pen, const VectorXd& v, const ExactVector* exact,
                 int order) {
  const int q = norm_order(space, order);
  double sum = 0.0;
  vector_cell_loop(space, v, exact, q, [&](Index k, double w, const Vec2&, const Mat2& G) {
    const Mat2 eps = 0.5 * (G + G.transpose());
    sum += w * 2.0 * cells[static_cast<std::size_t>(k)].mu * eps.squaredNorm();
  });
  vector_face_loop(space, v, exact, q, [&](Index f, const Face&, double w, const Vec2& j) {
    sum += w * pen.sigma[static_cast<std::size_t>(f)] * j.squaredNorm();
  });
  return std::sqrt(sum);
}

double dg_seminorm_p(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                     const PenaltyCoefficients& pen, const VectorXd& z, const ExactVector* exact,
                     int order) {
  const int q = norm_order(space, order);
  double sum = 0.0;
  vector_cell_loop(space, z, exact, q, [&](Index k, double w, const Vec2&, const Mat2& G) {
    const double d = G.trace();
    sum += w * d * d / cells[static_cast<std::size_t>(k)].c0;
  });
  vector_face_loop(space, z, exact, q, [&](Index f, const Face&, double w, const Vec2& j) {
    sum += w * pen.zeta[static_cast<std::size_t>(f)] * j.squaredNorm();
  });
  return std::sqrt(sum);
}

double dg_norm_T(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                 const PenaltyCoefficients& pen, const VectorXd& S, const ExactScalar* exact,
                 int order) {
  const int q = norm_order(space, order);
  double sum = 0.0;
  scalar_cell_loop(space, S, exact, q, [&](Index k, double w, double, const Vec2& g) {
    sum += w * cells[static_cast<std::size_t>(k)].theta * g.squaredNorm();
  });
  scalar_face_loop(space, S, exact, q, [&](Index f, double w, double j) {
    sum += w * pen.rho[static_cast<std::size_t>(f)] * j * j;
  });
  return std::sqrt(sum);
}

double l2_norm_vector(const DGSpace& space, const VectorXd& v, const ExactVector* exact, int order) {
  double sum = 0.0;
  vector_cell_loop(space, v, exact, norm_order(space, order),
                   [&](Index, double w, const Vec2& e, const Mat2&) { sum += w * e.squaredNorm(); });
  return std::sqrt(sum);
}

double l2_norm_scalar(const DGSpace& space, const VectorXd& s, const ExactScalar* exact, int order) {
  double sum = 0.0;
  scalar_cell_loop(space, s, exact, norm_order(space, order),
                   [&](Index, double w, double e, const Vec2&) { sum += w * e * e; });
  return std::sqrt(sum);
}

std::vector<double> pressure_penalty(const DGSpace& space, const std::vector<MaterialRegion>& cells) {
  const PolyMesh& mesh = space.mesh();
  std::vector<double> gamma(static_cast<std::size_t>(mesh.num_faces()));
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    std::vector<PenaltySide> sides;
    for (Index k : {face.owner, face.neighbor})
      if (k != kBoundary)
        sides.push_back({cells[static_cast<std::size_t>(k)].k, space.degree(k),
                         mesh.geometry(k).diameter});
    gamma[static_cast<std::size_t>(f)] = penalty_value(10.0, sides);
  }
  return gamma;
}

double dg_norm_pressure(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                        const std::vector<double>& gamma, const VectorXd& p,
                        const ExactScalar* exact, int order) {
  const int q = norm_order(space, order);
  double sum = 0.0;
  scalar_cell_loop(space, p, exact, q, [&](Index k, double w, double, const Vec2& g) {
    sum += w * cells[static_cast<std::size_t>(k)].k * g.squaredNorm();
  });
  scalar_face_loop(space, p, exact, q, [&](Index f, double w, double j) {
    sum += w * gamma[static_cast<std::size_t>(f)] * j * j;
  });
  return std::sqrt(sum);
}

NormSet dg_norms(const DGSpace& space, const std::vector<MaterialRegion>& cells, const Forms& forms,
                 const SystemState& s) {
  const Index N = space.num_dofs();
  const VectorXd U = s.X.segment(0, 2 * N);
  const VectorXd W = s.X.segment(2 * N, 2 * N);
  const VectorXd T = s.X.segment(4 * N, N);
  const auto& pen = forms.penalties;
  NormSet n;
  n.dg_e = dg_norm_e(space, cells, pen, U);
  n.dg_p = dg_seminorm_p(space, cells, pen, W);
  n.dg_T = dg_norm_T(space, cells, pen, T);
  const VectorXd AW = forms.alpha.cwiseProduct(U) + W;
  const double star2 = n.dg_e * n.dg_e + std::pow(dg_seminorm_p(space, cells, pen, AW), 2) +
                       W.dot(forms.B * W);
  n.dg_star = std::sqrt(star2);
  n.energy = energy_norm(space, cells, forms, s);
  return n;
}

double energy_norm(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                   const Forms& forms, const SystemState& s) {
  const Index N = space.num_dofs();
  const VectorXd U = s.X.segment(0, 2 * N);
  const VectorXd W = s.X.segment(2 * N, 2 * N);
  const VectorXd T = s.X.segment(4 * N, N);
  const VectorXd Ud = s.Y.segment(0, 2 * N);
  const VectorXd Wd = s.Y.segment(2 * N, 2 * N);
  const auto& pen = forms.penalties;
  const double kinetic = Ud.dot(forms.Mrho * Ud) + 2.0 * Ud.dot(forms.Mrhof * Wd) +
                         Wd.dot(forms.Mrhow * Wd);
  const double e = dg_norm_e(space, cells, pen, U);
  const double p = dg_seminorm_p(space, cells, pen, VectorXd(forms.alpha.cwiseProduct(U) + W));
  const double total = kinetic + T.dot(forms.MT * T) + e * e + p * p + W.dot(forms.B * W);
  return std::sqrt(std::max(0.0, total));
}

VectorXd pressure_postprocess(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                              const VectorXd& X, const VectorXd& X0, const ScalarField* p0) {
  const Index N = space.num_dofs();
  if (X0.size() != X.size()) throw ValidationError("pressure: missing initial data");
  VectorXd out = VectorXd::Zero(N);
  for (Index k = 0; k < space.mesh().num_cells(); ++k) {
    const auto& m = cells[static_cast<std::size_t>(k)];
    const auto tab = tabulate_cell(space, k, 2 * space.degree(k) + 2);
    const auto su = sample_vector(space, k, tab.basis, X.segment(0, 2 * N));
    const auto sw = sample_vector(space, k, tab.basis, X.segment(2 * N, 2 * N));
    const auto sT = sample_scalar(space, k, tab.basis, X.segment(4 * N, N));
    const auto su0 = sample_vector(space, k, tab.basis, X0.segment(0, 2 * N));
    const auto sw0 = sample_vector(space, k, tab.basis, X0.segment(2 * N, 2 * N));
    const auto sT0 = sample_scalar(space, k, tab.basis, X0.segment(4 * N, N));
    VectorXd vals(static_cast<Index>(tab.rule.size()));
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const auto iq = static_cast<Index>(q);
      const double du = su.dx(iq, 0) + su.dy(iq, 1);
      const double dw = sw.dx(iq, 0) + sw.dy(iq, 1);
      const double du0 = su0.dx(iq, 0) + su0.dy(iq, 1);
      const double dw0 = sw0.dx(iq, 0) + sw0.dy(iq, 1);
      const double base = p0 ? (*p0)(tab.rule.points[q]) : -(m.alpha * du0 + dw0) / m.c0;
      const double p =
          base - (m.alpha * (du - du0) + (dw - dw0) - m.b0 * (sT.val(iq) - sT0.val(iq))) / m.c0;
      vals(iq) = tab.rule.weights[q] * p;
    }
    out.segment(space.offset(k), space.local_dim(k)) = tab.basis.value.transpose() * vals;
  }
  return out;
}

ErrorReport manufactured_errors(const DGSpace& space, const Forms& forms, const ManufacturedCase& mc,
                                const SystemState& s, const VectorXd& X0) {
  const Index N = space.num_dofs();
  const double t = s.t;
  const std::vector<MaterialRegion> cells(static_cast<std::size_t>(space.mesh().num_cells()),
                                          mc.material);
  const ExactVector u{[&](const Point& x) { return mc.u(x, t); },
                      [&](const Point& x) { return mc.grad_u(x, t); }};
  const ExactVector w{[&](const Point& x) { return mc.w(x, t); },
                      [&](const Point& x) { return mc.grad_w(x, t); }};
  const ExactScalar T{[&](const Point& x) { return mc.T(x, t); },
                      [&](const Point& x) { return mc.grad_T(x, t); }};
  const ExactScalar p{[&](const Point& x) { return mc.pressure(x, t); },
                      [&](const Point& x) { return mc.grad_pressure(x, t); }};
  const auto& pen = forms.penalties;
  const VectorXd U = s.X.segment(0, 2 * N);
  const VectorXd W = s.X.segment(2 * N, 2 * N);
  const VectorXd Th = s.X.segment(4 * N, N);
  const VectorXd P = pressure_postprocess(space, cells, s.X, X0);

  ErrorReport r;
  r.h = space.mesh().max_diameter();
  r.degree = space.max_degree();
  r.dofs = 5 * N;
  r.l2_u = l2_norm_vector(space, U, &u);
  r.dg_u = dg_norm_e(space, cells, pen, U, &u);
  r.l2_w = l2_norm_vector(space, W, &w);
  r.dg_w = dg_seminorm_p(space, cells, pen, W, &w);
  r.l2_T = l2_norm_scalar(space, Th, &T);
  r.dg_T = dg_norm_T(space, cells, pen, Th, &T);
  r.l2_p = l2_norm_scalar(space, P, &p);
  r.dg_p = dg_norm_pressure(space, cells, pressure_penalty(space, cells), P, &p);
  return r;
}

ManufacturedRun solve_manufactured(const ManufacturedCase& mc, const PolyMesh& mesh, int degree,
                                   const NewmarkConfig& cfg, const PenaltyParameters& params,
                                   const AssemblyOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const DGSpace space(mesh, degree);
  MaterialMap mats;
  for (const int tag : mesh.regions()) mats.set(tag, mc.material);
  const Forms forms = assemble_forms(space, mats, params, options);
  const BlockSystem sys = build_block_system(forms);
  const NewmarkIntegrator integ(sys, cfg);
  const SeparableLoad load = manufactured_load(mc, space, forms.penalties);
  const auto t1 = clock::now();

  const double ts = 0.0;
  auto vec = [&](auto f) { return l2_project(space, VectorField(f)); };
  auto sca = [&](auto f) { return l2_project(space, ScalarField(f)); };
  const Index n = sys.size();
  VectorXd X(n), Y(n), A(n);
  X << vec([&](const Point& x) { return mc.u(x, ts); }), vec([&](const Point& x) { return mc.w(x, ts); }),
      sca([&](const Point& x) { return mc.T(x, ts); });
  Y << vec([&](const Point& x) { return mc.u_t(x, ts); }),
      vec([&](const Point& x) { return mc.w_t(x, ts); }),
      sca([&](const Point& x) { return mc.T_t(x, ts); });
  A << vec([&](const Point& x) { return mc.u_tt(x, ts); }),
      vec([&](const Point& x) { return mc.w_tt(x, ts); }),
      sca([&](const Point& x) { return mc.T_tt(x, ts); });
  const VectorXd F0 = load(ts);
  X = ritz_initial_displacement(sys, F0, X, Y, A, cfg.solver);
  SystemState s = integ.initial_state(ts, X, Y, F0);
  const VectorXd X0 = s.X;

  ManufacturedRun run;
  s = integrate(integ, sys, s, load, [&](const StepReport& r, const SystemState&) {
    run.energy.push_back(r.energy);
  });
  run.steps = cfg.num_steps();
  run.errors = manufactured_errors(space, forms, mc, s, X0);
  run.assembly_seconds = std::chrono::duration<double>(t1 - t0).count();
  run.solve_seconds = std::chrono::duration<double>(clock::now() - t1).count();
  return run;
}

std::array<double, kErrorColumns> error_columns(const ErrorReport& r) {
  return {r.l2_u, r.dg_u, r.l2_w, r.dg_w, r.l2_T, r.dg_T, r.l2_p, r.dg_p};
}

const std::array<std::string, kErrorColumns>& error_column_names() {
  static const std::array<std::string, kErrorColumns> names{"L2_u", "dG_u", "L2_w", "dG_w",
                                                           "L2_T", "dG_T", "L2_p", "dG_p"};
  return names;
}

std::optional<double> observed_rate(double e0, double e1, double h0, double h1) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) return std::nullopt;
  return std::log(e0 / e1) / std::log(h0 / h1);
}

std::vector<std::array<std::optional<double>, kErrorColumns>> convergence_rates(
    const std::vector<ErrorReport>& reports, bool by_degree) {
  if (reports.size() < 2) throw std::invalid_argument("convergence_rates: need at least two reports");
  std::vector<std::array<std::optional<double>, kErrorColumns>> out;
  for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
    const auto e0 = error_columns(reports[i]);
    const auto e1 = error_columns(reports[i + 1]);
    std::array<std::optional<double>, kErrorColumns> row;
    for (int c = 0; c < kErrorColumns; ++c) {
      const auto cs = static_cast<std::size_t>(c);
      if (by_degree) {
        if (e0[cs] > 0.0 && e1[cs] > 0.0)
          row[cs] = std::log(e1[cs] / e0[cs]) / (reports[i + 1].degree - reports[i].degree);
      } else {
        row[cs] = observed_rate(e0[cs], e1[cs], reports[i].h, reports[i + 1].h);
      }
    }
    out.push_back(row);
  }
  return out;
}

EnergyVerdict check_energy_trace(const std::vector<double>& energy, double tol) {
  EnergyVerdict v;
  for (std::size_t k = 0; k + 1 < energy.size(); ++k) {
    const double inc = energy[k] > 0.0 ? (energy[k + 1] - energy[k]) / energy[k]
                                       : (energy[k + 1] > 0.0 ? INFINITY : 0.0);
    if (inc > v.worst_relative_increase) {
      v.worst_relative_increase = inc;
      v.worst_step = static_cast<Index>(k + 1);
    }
    if (energy[k + 1] > energy[k] * (1.0 + tol)) v.monotone = false;
  }
  return v;
}

}  // namespace tpdg
