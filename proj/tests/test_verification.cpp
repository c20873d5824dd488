#include "doctest.h"
#include "test_support.hpp"

#include "tpdg/verification.hpp"

using namespace tpdg;
using namespace tpdg::testing;

namespace {

std::vector<MaterialRegion> cells_of(const PolyMesh& m, const MaterialRegion& r) {
  return std::vector<MaterialRegion>(static_cast<std::size_t>(m.num_cells()), r);
}

PolyMesh two_triangles() {
  return PolyMesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}}, {1, 1});
}

}  // namespace

TEST_CASE("dG norms of zero and of continuous fields") {
  const PolyMesh m = two_triangles();
  const DGSpace space(m, 4);
  MaterialRegion r = manufactured_material();
  r.mu = 1.0;
  const auto cells = cells_of(m, r);
  const auto pen = compute_penalties(space, cells, {});
  const Index N = space.num_dofs();

  CHECK(dg_norm_e(space, cells, pen, VectorXd::Zero(2 * N)) == 0.0);
  CHECK(dg_seminorm_p(space, cells, pen, VectorXd::Zero(2 * N)) == 0.0);
  CHECK(dg_norm_T(space, cells, pen, VectorXd::Zero(N)) == 0.0);

  // u = (x(1-x)y(1-y), 0): continuous, zero trace, in the l = 4 space.
  // int 2|eps(u)|^2 = 2 (int s_x^2 + int s_y^2 / 2) = 2 (1/90 + 1/180) = 1/30
  const VectorXd U = l2_project(space, VectorField([](const Point& x) {
    return Vec2(x.x() * (1 - x.x()) * x.y() * (1 - x.y()), 0.0);
  }));
  CHECK(std::pow(dg_norm_e(space, cells, pen, U), 2) == doctest::Approx(1.0 / 30.0).epsilon(1e-10));
  // c0^-1 int (div u)^2 = c0^-1 int s_x^2 = 1 / (90 c0)
  CHECK(std::pow(dg_seminorm_p(space, cells, pen, U), 2) == doctest::Approx(1.0 / (90.0 * r.c0)).epsilon(1e-10));
  // theta int |grad s|^2 = theta (1/90 + 1/90)
  const VectorXd S = l2_project(space, ScalarField([](const Point& x) { return x.x() * (1 - x.x()) * x.y() * (1 - x.y()); }));
  CHECK(std::pow(dg_norm_T(space, cells, pen, S), 2) == doctest::Approx(r.theta / 45.0).epsilon(1e-10));
}

TEST_CASE("jump terms: a cellwise constant field is measured by its penalties") {
  const PolyMesh m = cartesian_grid(2, 1);
  const DGSpace space(m, 1);
  const auto cells = cells_of(m, manufactured_material());
  const auto pen = compute_penalties(space, cells, {});
  // S = 1 on cell 0, 0 on cell 1
  const VectorXd S = l2_project(space, ScalarField([](const Point& x) { return x.x() < 0.5 ? 1.0 : 0.0; }));
  double expect = 0.0;
  for (Index f = 0; f < m.num_faces(); ++f) {
    const Face& face = m.face(f);
    const bool touches0 = face.owner == 0 || face.neighbor == 0;
    if (touches0) expect += pen.rho[static_cast<std::size_t>(f)] * face.measure;
  }
  CHECK(std::pow(dg_norm_T(space, cells, pen, S), 2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("property: norms are absolutely homogeneous, the pressure seminorm has the expected kernel") {
  const PolyMesh m = load_mesh(TPDG_TEST_DATA "/voronoi_75.mesh");
  const DGSpace space(m, 2);
  const auto cells = cells_of(m, manufactured_material());
  const Forms forms = assemble_forms(space, uniform_material(manufactured_material()));
  const auto& pen = forms.penalties;
  const Index N = space.num_dofs();
  Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    const VectorXd v = random_vector(rng, 2 * N), s = random_vector(rng, N);
    const double c = uniform(rng, -5, 5);
    CHECK(dg_norm_e(space, cells, pen, c * v) == doctest::Approx(std::abs(c) * dg_norm_e(space, cells, pen, v)).epsilon(1e-12));
    CHECK(dg_seminorm_p(space, cells, pen, c * v) == doctest::Approx(std::abs(c) * dg_seminorm_p(space, cells, pen, v)).epsilon(1e-12));
    CHECK(dg_norm_T(space, cells, pen, c * s) == doctest::Approx(std::abs(c) * dg_norm_T(space, cells, pen, s)).epsilon(1e-12));

    // w = -alpha v: the |alpha v + w|_p part of the starred norm vanishes
    SystemState st{0.0, VectorXd::Zero(5 * N), VectorXd::Zero(5 * N), VectorXd::Zero(5 * N)};
    st.X.head(2 * N) = v;
    st.X.segment(2 * N, 2 * N) = -forms.alpha.cwiseProduct(v);
    const NormSet ns = dg_norms(space, cells, forms, st);
    const VectorXd W = st.X.segment(2 * N, 2 * N);
    const double expect = std::sqrt(ns.dg_e * ns.dg_e + W.dot(forms.B * W));
    CHECK(ns.dg_star == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("energy norm") {
  const PolyMesh m = cartesian_grid(3, 3);
  const DGSpace space(m, 2);
  const auto cells = cells_of(m, manufactured_material());
  const Forms forms = assemble_forms(space, uniform_material(manufactured_material()));
  const Index N = space.num_dofs();
  SystemState zero{0.0, VectorXd::Zero(5 * N), VectorXd::Zero(5 * N), VectorXd::Zero(5 * N)};
  CHECK(energy_norm(space, cells, forms, zero) == 0.0);

  Rng rng(2);
  SystemState s = zero;
  s.Y.segment(2 * N, 2 * N) = random_vector(rng, 2 * N);
  const VectorXd Wd = s.Y.segment(2 * N, 2 * N);
  // orthonormal basis: the rho_w mass is rho_w times the identity
  CHECK(std::pow(energy_norm(space, cells, forms, s), 2) == doctest::Approx(0.06 * Wd.squaredNorm()).epsilon(1e-12));

  // projected manufactured data on a 100-cell mesh: the energy is insensitive to a finer
  // projection rule
  const PolyMesh fine = cartesian_grid(10, 10);
  const DGSpace fs(fine, 2);
  const auto fine_cells = cells_of(fine, manufactured_material());
  const Forms fine_forms = assemble_forms(fs, uniform_material(manufactured_material()));
  const Index NF = fs.num_dofs();
  const auto mc = standard_manufactured_case(manufactured_material());
  auto state = [&](int order) {
    SystemState st{0.0, VectorXd::Zero(5 * NF), VectorXd::Zero(5 * NF), VectorXd::Zero(5 * NF)};
    st.X << l2_project(fs, VectorField([&](const Point& x) { return mc.u(x, 0); }), order),
        l2_project(fs, VectorField([&](const Point& x) { return mc.w(x, 0); }), order),
        l2_project(fs, ScalarField([&](const Point& x) { return mc.T(x, 0); }), order);
    st.Y << l2_project(fs, VectorField([&](const Point& x) { return mc.u_t(x, 0); }), order),
        l2_project(fs, VectorField([&](const Point& x) { return mc.w_t(x, 0); }), order),
        l2_project(fs, ScalarField([&](const Point& x) { return mc.T_t(x, 0); }), order);
    return st;
  };
  const double e1 = energy_norm(fs, fine_cells, fine_forms, state(8));
  const double e2 = energy_norm(fs, fine_cells, fine_forms, state(16));
  CHECK(e1 == doctest::Approx(e2).epsilon(1e-10));
}

TEST_CASE("pressure post-processing") {
  const PolyMesh m = cartesian_grid(3, 3);
  const DGSpace space(m, 2);
  const Index N = space.num_dofs();
  const VectorXd zero = VectorXd::Zero(5 * N);
  const ScalarField p_zero = [](const Point&) { return 0.0; };

  SUBCASE("zero state") {
    const auto cells = cells_of(m, manufactured_material());
    CHECK(pressure_postprocess(space, cells, zero, zero, &p_zero).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("b0 = 0 decouples temperature") {
    MaterialRegion r = manufactured_material();
    r.b0 = 0.0;
    const auto cells = cells_of(m, r);
    Rng rng(3);
    VectorXd X = zero;
    X.tail(N) = random_vector(rng, N);
    const ScalarField p0 = [](const Point& x) { return 2.0 + x.x() - x.y(); };
    const VectorXd p = pressure_postprocess(space, cells, X, zero, &p0);
    CHECK((p - l2_project(space, p0)).cwiseAbs().maxCoeff() <= 1e-13);
  }
  SUBCASE("exact for fields whose pressure is a polynomial of degree <= l") {
    const MaterialRegion r = manufactured_material();
    const auto cells = cells_of(m, r);
    // u = (x^2 y, x y^2), div = 4xy; w = (y^3, x^2), div = 0; T = x + y^2; cubic fields need l = 3
    const DGSpace s3(m, 3);
    const Index N3 = s3.num_dofs();
    VectorXd X3(5 * N3);
    X3 << l2_project(s3, VectorField([](const Point& x) { return Vec2(x.x() * x.x() * x.y(), x.x() * x.y() * x.y()); })),
        l2_project(s3, VectorField([](const Point& x) { return Vec2(std::pow(x.y(), 3), x.x() * x.x()); })),
        l2_project(s3, ScalarField([](const Point& x) { return x.x() + x.y() * x.y(); }));
    const VectorXd p = pressure_postprocess(s3, cells, X3, VectorXd::Zero(5 * N3), &p_zero);
    const VectorXd exact = l2_project(s3, ScalarField([&](const Point& x) {
      return -(r.alpha * 4 * x.x() * x.y() - r.b0 * (x.x() + x.y() * x.y())) / r.c0;
    }));
    CHECK((p - exact).cwiseAbs().maxCoeff() <= 1e-10 * exact.cwiseAbs().maxCoeff());
  }
  CHECK_THROWS_AS(pressure_postprocess(space, cells_of(m, manufactured_material()), zero, VectorXd::Zero(3)),
                  ValidationError);
}

TEST_CASE("convergence rates") {
  CHECK(*observed_rate(0.1, 0.0125, 0.2, 0.1) == doctest::Approx(3.0));
  CHECK(*observed_rate(0.1, 0.1, 0.2, 0.1) == doctest::Approx(0.0));
  CHECK_FALSE(observed_rate(0.1, 0.0, 0.2, 0.1).has_value());

  std::vector<ErrorReport> reps(3);
  for (int i = 0; i < 3; ++i) {
    reps[i].h = 0.4 / std::pow(2, i);
    reps[i].degree = 2;
    reps[i].l2_u = std::pow(reps[i].h, 3);
    reps[i].dg_u = std::pow(reps[i].h, 2);
  }
  const auto rates = convergence_rates(reps);
  REQUIRE(rates.size() == 2);
  for (const auto& r : rates) {
    CHECK(*r[0] == doctest::Approx(3.0));
    CHECK(*r[1] == doctest::Approx(2.0));
    CHECK_FALSE(r[2].has_value());
  }
  // degree ladder: slope of log(error) against the degree
  std::vector<ErrorReport> deg(4);
  for (int l = 1; l <= 4; ++l) {
    deg[l - 1].degree = l;
    deg[l - 1].dg_u = std::exp(-1.5 * l);
  }
  const auto dr = convergence_rates(deg, true);
  CHECK(*dr[0][1] == doctest::Approx(-1.5));
}

TEST_CASE("energy traces") {
  CHECK(check_energy_trace(std::vector<double>(10, 0.0)).monotone);
  const auto bad = check_energy_trace({1.0, 0.9, 0.95, 0.8});
  CHECK_FALSE(bad.monotone);
  CHECK(bad.worst_step == 2);

  SUBCASE("conservative limit: no drag, no conduction, no coupling") {
    MaterialRegion r = without_thermal_coupling(manufactured_material());
    r.k = 1e30;
    r.theta = 1e-30;
    r.tau = 0.0;
    const PolyMesh m = cartesian_grid(4, 4);
    const DGSpace space(m, 2);
    const BlockSystem sys = build_block_system(assemble_forms(space, uniform_material(r)));
    NewmarkConfig cfg;
    cfg.dt = 1e-3;
    cfg.final_time = 0.2;
    const NewmarkIntegrator integ(sys, cfg);
    Rng rng(12);
    const VectorXd zero = VectorXd::Zero(sys.size());
    std::vector<double> e;
    integrate(integ, sys, integ.initial_state(0, random_vector(rng, sys.size()), random_vector(rng, sys.size()), zero),
              [&](double) { return zero; }, [&](const StepReport& s, const SystemState&) { e.push_back(s.energy); });
    CHECK(e.size() == 201);
    double drift = 0.0;
    for (const double x : e) drift = std::max(drift, std::abs(x - e[0]) / e[0]);
    CHECK(drift <= 1e-8);
  }
}

TEST_CASE("manufactured run: small errors, all non-negative") {
  const auto mc = standard_manufactured_case(manufactured_material());
  const PolyMesh m = cartesian_grid(4, 4);
  NewmarkConfig cfg;
  cfg.dt = 1e-3;
  cfg.final_time = 0.01;
  const auto run = solve_manufactured(mc, m, 2, cfg);
  CHECK(run.steps == 10);
  CHECK(run.energy.size() == 11);
  for (const double e : error_columns(run.errors)) {
    CHECK(e >= 0.0);
    CHECK(std::isfinite(e));
  }
  CHECK(run.errors.l2_u < 0.05);
  CHECK(run.errors.dofs == 5 * 16 * 6);
}

TEST_CASE("manufactured forcing is consistent with the discrete operator") {
  // residual of the projected exact solution, in the orthonormal coefficient norm,
  // shrinks under refinement
  const auto mc = standard_manufactured_case(manufactured_material());
  std::vector<double> res;
  for (const Index n : {4, 8, 16}) {
    const PolyMesh m = cartesian_grid(n, n);
    const DGSpace space(m, 3);
    const Forms forms = assemble_forms(space, uniform_material(mc.material));
    const BlockSystem sys = build_block_system(forms);
    const double t = 0.05;
    const VectorXd F = manufactured_load_at(mc, space, forms.penalties, t);
    VectorXd X(sys.size()), Y(sys.size()), A(sys.size());
    X << l2_project(space, VectorField([&](const Point& x) { return mc.u(x, t); })),
        l2_project(space, VectorField([&](const Point& x) { return mc.w(x, t); })),
        l2_project(space, ScalarField([&](const Point& x) { return mc.T(x, t); }));
    Y << l2_project(space, VectorField([&](const Point& x) { return mc.u_t(x, t); })),
        l2_project(space, VectorField([&](const Point& x) { return mc.w_t(x, t); })),
        l2_project(space, ScalarField([&](const Point& x) { return mc.T_t(x, t); }));
    A << l2_project(space, VectorField([&](const Point& x) { return mc.u_tt(x, t); })),
        l2_project(space, VectorField([&](const Point& x) { return mc.w_tt(x, t); })),
        l2_project(space, ScalarField([&](const Point& x) { return mc.T_tt(x, t); }));
    res.push_back((sys.A * A + sys.B * Y + sys.C * X - F).norm() / F.norm());
  }
  CHECK(res[1] < 0.5 * res[0]);
  CHECK(res[2] < 0.5 * res[1]);
  // separable assembly agrees with pointwise assembly
  const PolyMesh m = load_mesh(TPDG_TEST_DATA "/voronoi_100.mesh");
  const DGSpace space(m, 3);
  const Forms forms = assemble_forms(space, uniform_material(mc.material));
  const auto load = manufactured_load(mc, space, forms.penalties);
  const VectorXd a = load(0.037), b = manufactured_load_at(mc, space, forms.penalties, 0.037);
  CHECK((a - b).norm() <= 1e-12 * b.norm());
  // doubling the load quadrature order changes nothing at the 1e-10 level
  const VectorXd c = manufactured_load_at(mc, space, forms.penalties, 0.0, 2 * (2 * 3 + 4));
  const VectorXd d = manufactured_load_at(mc, space, forms.penalties, 0.0);
  CHECK((c - d).cwiseAbs().maxCoeff() <= 1e-10 * d.cwiseAbs().maxCoeff());
}
