#include "doctest.h"
#include "test_support.hpp"

#include "tpdg/assembly.hpp"

using namespace tpdg;
using namespace tpdg::testing;

namespace {

MatrixXd dense_block(const SparseMatrix& M, Index r0, Index c0, Index nr, Index nc) {
  return MatrixXd(M).block(r0, c0, nr, nc);
}

double rel_max_diff(const MatrixXd& a, const MatrixXd& b) {
  const double s = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return s > 0 ? (a - b).cwiseAbs().maxCoeff() / s : 0.0;
}

}  // namespace

TEST_CASE("penalty formula") {
  CHECK(penalty_value(10, {{1.0, 3, 0.1}}) == doctest::Approx(900.0).epsilon(1e-14));
  CHECK(penalty_value(10, {{1.0, 2, 0.5}, {2.0, 3, 0.25}}) == doctest::Approx(720.0).epsilon(1e-14));
  CHECK_THROWS_AS(penalty_value(10, {{0.0, 2, 0.5}}), ValidationError);

  // zeta with c0 = 1 against varrho with theta = 1 on the same faces
  const PolyMesh m = load_mesh(TPDG_TEST_DATA "/voronoi_75.mesh");
  const DGSpace space(m, 2);
  MaterialRegion r = manufactured_material();
  r.c0 = 1.0;
  r.theta = 1.0;
  r.b0 = 0.0;
  const std::vector<MaterialRegion> cells(static_cast<std::size_t>(m.num_cells()), r);
  const PenaltyParameters p;
  for (Index f = 0; f < m.num_faces(); ++f) {
    CHECK(penalty_on_face(space, cells, p, f, PenaltyKind::Zeta) ==
          penalty_on_face(space, cells, p, f, PenaltyKind::Rho));
    // one-sided on the boundary, max over both cells inside
    const Face& face = m.face(f);
    double expect = 4.0 * r.mu / m.geometry(face.owner).diameter;
    if (!face.is_boundary()) expect = std::max(expect, 4.0 * r.mu / m.geometry(face.neighbor).diameter);
    CHECK(penalty_on_face(space, cells, p, f, PenaltyKind::Sigma) == doctest::Approx(10.0 * expect).epsilon(1e-14));
  }
}

TEST_CASE("constant temperature mode: A_T energy is the boundary penalty alone") {
  for (const PolyMesh& m : {cartesian_grid(1, 1), cartesian_grid(3, 2)}) {
    const DGSpace space(m, 2);
    const Forms forms = assemble_forms(space, uniform_material(manufactured_material()));
    const VectorXd one = l2_project(space, ScalarField([](const Point&) { return 1.0; }));
    double boundary = 0.0;
    for (Index f = 0; f < m.num_faces(); ++f)
      if (m.face(f).is_boundary()) boundary += forms.penalties.rho[static_cast<std::size_t>(f)] * m.face(f).measure;
    CHECK(one.dot(forms.AT * one) == doctest::Approx(boundary).epsilon(1e-12));
  }
}

TEST_CASE("continuous piecewise-linear field: face terms vanish in A_e") {
  // four triangles around the centre of the unit square, hat function at the centre
  const PolyMesh m({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}}, {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}},
                   {1, 1, 1, 1});
  const DGSpace space(m, 1);
  MaterialRegion r = manufactured_material();
  r.mu = 1.3;
  r.lambda = 2.1;
  const Forms forms = assemble_forms(space, uniform_material(r));
  const double a = 0.7, b = -1.9;
  auto hat = [](const Point& x) { return 1.0 - 2.0 * std::max(std::abs(x.x() - 0.5), std::abs(x.y() - 0.5)); };
  const VectorXd U = l2_project(space, VectorField([&](const Point& x) { return Vec2(a * hat(x), b * hat(x)); }));
  // hat gradients: bottom, right, top, left triangles, each of area 1/4
  const Vec2 grads[4] = {{0, 2}, {-2, 0}, {0, -2}, {2, 0}};
  double energy = 0.0;
  for (const Vec2& g : grads) {
    Mat2 G;
    G << a * g.x(), a * g.y(), b * g.x(), b * g.y();
    const Mat2 eps = 0.5 * (G + G.transpose());
    energy += 0.25 * (2 * r.mu * eps.squaredNorm() + r.lambda * std::pow(G.trace(), 2));
  }
  CHECK(U.dot(forms.Ae * U) == doctest::Approx(energy).epsilon(1e-12));
}

TEST_CASE("block structure") {
  const PolyMesh m = cartesian_grid(3, 3);
  const DGSpace space(m, 2);
  const Index N = space.num_dofs();

  SUBCASE("coupling appears as C in the damping rows and -C^T in the stiffness columns") {
    const Forms forms = assemble_forms(space, uniform_material(manufactured_material()));
    const BlockSystem sys = build_block_system(forms);
    const MatrixXd B_Tuw = dense_block(sys.B, 4 * N, 0, N, 4 * N);
    const MatrixXd C_uwT = dense_block(sys.C, 0, 4 * N, 4 * N, N);
    CHECK((C_uwT + B_Tuw.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dense_block(sys.C, 4 * N, 0, N, 4 * N).cwiseAbs().maxCoeff() == 0.0);
    CHECK(rel_max_diff(dense_block(sys.C, 4 * N, 4 * N, N, N), MatrixXd(forms.AT)) == 0.0);
    CHECK(rel_max_diff(dense_block(sys.B, 4 * N, 4 * N, N, N), MatrixXd(forms.MT)) == 0.0);
    CHECK(rel_max_diff(dense_block(sys.B, 2 * N, 2 * N, 2 * N, 2 * N), MatrixXd(forms.B)) == 0.0);
    // tau > 0: the temperature row of A is tau times the damping row
    const MatrixXd A_T = dense_block(sys.A, 4 * N, 0, N, 5 * N);
    const MatrixXd B_T = dense_block(sys.B, 4 * N, 0, N, 5 * N);
    CHECK(rel_max_diff(A_T, 0.01 * B_T) <= 1e-15);
    CHECK_FALSE(sys.first_order_temperature);

    // alpha = 1: the (u,u) and (u,w) stiffness blocks differ exactly by A_e
    const MatrixXd diff = dense_block(sys.C, 0, 0, 2 * N, 2 * N) - dense_block(sys.C, 0, 2 * N, 2 * N, 2 * N);
    CHECK(rel_max_diff(diff, MatrixXd(forms.Ae)) <= 1e-14);  // rounding of (Ae + Ap) - Ap
  }
  SUBCASE("tau = 0 leaves the temperature row of A empty") {
    MaterialRegion r = manufactured_material();
    r.tau = 0.0;
    const BlockSystem sys = build_block_system(assemble_forms(space, uniform_material(r)));
    CHECK(sys.first_order_temperature);
    CHECK(dense_block(sys.A, 4 * N, 0, N, 5 * N).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("mixed relaxation times are rejected") {
    const PolyMesh two = with_regions(cartesian_grid(2, 1), {1, 2});
    const DGSpace s2(two, 1);
    MaterialRegion r0 = manufactured_material();
    r0.tau = 0.0;
    MaterialMap map;
    map.set(1, manufactured_material());
    map.set(2, r0);
    CHECK_THROWS_AS(build_block_system(assemble_forms(s2, map)), ValidationError);
  }
}

TEST_CASE("mass blocks: symmetric, positive, and the (u,w) mass is SPD for the reference rock") {
  const PolyMesh m = load_mesh(TPDG_TEST_DATA "/voronoi_75.mesh");
  const DGSpace space(m, 2);
  const Forms forms = assemble_forms(space, uniform_material(reference_rock()));
  const BlockSystem sys = build_block_system(forms);
  for (const SparseMatrix* X : {&forms.Mrho, &forms.Mrhof, &forms.Mrhow, &forms.B, &forms.MT, &forms.Ae, &forms.Ap, &forms.AT})
    CHECK(symmetry_defect(*X) <= 1e-12);
  const Index n = sys.n_u + sys.n_w;
  const SparseMatrix Muw = sys.A.topLeftCorner(n, n);
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const VectorXd v = random_vector(rng, n);
    REQUIRE(v.dot(Muw * v) > 0.0);
    const VectorXd z = random_vector(rng, sys.n_w);
    REQUIRE(z.dot(forms.B * z) > 0.0);
    const VectorXd s = random_vector(rng, sys.n_T);
    REQUIRE(s.dot(forms.MT * s) > 0.0);
  }
}

TEST_CASE("load vectors") {
  const PolyMesh m = load_mesh(TPDG_TEST_DATA "/voronoi_75.mesh");
  const DGSpace space(m, 2);
  const Index N = space.num_dofs();
  CHECK(assemble_volume_load(space, nullptr, nullptr, nullptr).cwiseAbs().maxCoeff() == 0.0);

  const VectorField f = [](const Point&) { return Vec2(1.0, 0.0); };
  const VectorXd F = assemble_volume_load(space, &f, nullptr, nullptr);
  for (Index k = 0; k < m.num_cells(); ++k) {
    const auto r = element_quadrature(m, k, 4);
    const auto t = space.eval(k, r.points);
    for (Index i = 0; i < space.local_dim(k); ++i) {
      double integral = 0.0;
      for (std::size_t q = 0; q < r.size(); ++q) integral += r.weights[q] * t.value(static_cast<Index>(q), i);
      CHECK(std::abs(F(vector_dof(space, k, 0, i)) - integral) <= 1e-12);
      CHECK(F(vector_dof(space, k, 1, i)) == 0.0);
    }
  }
  CHECK(F.tail(3 * N).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("property: symmetry and coercivity on random jittered meshes") {
  Rng rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    const PolyMesh m = jittered_grid(rng, 3, 0.25);
    const int l = 1 + trial;
    const DGSpace space(m, l);
    MaterialRegion r = manufactured_material();
    r.mu = uniform(rng, 0.5, 2.0);
    r.lambda = uniform(rng, 0.5, 5.0);
    const Forms forms = assemble_forms(space, uniform_material(r));
    for (const SparseMatrix* X : {&forms.Ae, &forms.Ap, &forms.AT}) {
      CHECK(symmetry_defect(*X) <= 1e-12);
      const Eigen::SelfAdjointEigenSolver<MatrixXd> es{MatrixXd(*X)};
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
    }
  }
}

TEST_CASE("property: coupling contributions to the energy balance cancel") {
  const PolyMesh m = load_mesh(TPDG_TEST_DATA "/voronoi_75.mesh");
  const DGSpace space(m, 2);
  const BlockSystem sys = build_block_system(assemble_forms(space, uniform_material(manufactured_material())));
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    VectorXd Z = random_vector(rng, sys.size());
    Z.tail(sys.n_T).setZero();
    VectorXd S = VectorXd::Zero(sys.size());
    S.tail(sys.n_T) = random_vector(rng, sys.n_T);
    const double damping = S.dot(sys.B * Z);   // T~' C (U', W')
    const double stiffness = Z.dot(sys.C * S);  // (U', W')' (-C^T) T~
    REQUIRE(std::abs(damping + stiffness) <= 1e-12 * (std::abs(damping) + std::abs(stiffness)));
  }
}

TEST_CASE("polynomial solutions with zero trace satisfy the discrete elliptic problems") {
  // s = x(1-x)y(1-y), degree 4: exactly representable with l = 4
  const PolyMesh m = cartesian_grid(3, 3);
  const DGSpace space(m, 4);
  const Index N = space.num_dofs();
  const MaterialRegion r = manufactured_material();
  const Forms forms = assemble_forms(space, uniform_material(r));

  auto s = [](const Point& x) { return x.x() * (1 - x.x()) * x.y() * (1 - x.y()); };
  auto sxx = [](const Point& x) { return -2 * x.y() * (1 - x.y()); };
  auto syy = [](const Point& x) { return -2 * x.x() * (1 - x.x()); };
  auto sxy = [](const Point& x) { return (1 - 2 * x.x()) * (1 - 2 * x.y()); };

  const VectorXd U = l2_project(space, VectorField([&](const Point& x) { return Vec2(s(x), 0.0); }));
  const VectorXd S = l2_project(space, ScalarField(s));
  // -div sigma(u) for u = (s, 0)
  const VectorField f = [&](const Point& x) {
    return Vec2(-((2 * r.mu + r.lambda) * sxx(x) + r.mu * syy(x)), -(r.lambda + r.mu) * sxy(x));
  };
  // -grad(c0^-1 div z) for z = (s, 0)
  const VectorField g = [&](const Point& x) { return Vec2(-sxx(x) / r.c0, -sxy(x) / r.c0); };
  const ScalarField H = [&](const Point& x) { return -r.theta * (sxx(x) + syy(x)); };
  const VectorXd L = assemble_volume_load(space, &f, &g, &H);

  const VectorXd Fe = L.head(2 * N), Gp = L.segment(2 * N, 2 * N), HT = L.tail(N);
  CHECK((forms.Ae * U - Fe).norm() <= 1e-9 * Fe.norm());
  CHECK((forms.Ap * U - Gp).norm() <= 1e-9 * Gp.norm());
  CHECK((forms.AT * S - HT).norm() <= 1e-9 * HT.norm());
}

TEST_CASE("assembly is bitwise identical across worker counts") {
  const PolyMesh m = load_mesh(TPDG_TEST_DATA "/voronoi_100.mesh");
  const DGSpace space(m, 2);
  const auto map = uniform_material(manufactured_material());
  AssemblyOptions one, four;
  four.workers = 4;
  const Forms a = assemble_forms(space, map, {}, one);
  const Forms b = assemble_forms(space, map, {}, four);
  auto same = [](const SparseMatrix& x, const SparseMatrix& y) {
    if (x.nonZeros() != y.nonZeros()) return false;
    for (Index i = 0; i < x.nonZeros(); ++i)
      if (x.valuePtr()[i] != y.valuePtr()[i] || x.innerIndexPtr()[i] != y.innerIndexPtr()[i]) return false;
    return true;
  };
  CHECK(same(a.Ae, b.Ae));
  CHECK(same(a.Ap, b.Ap));
  CHECK(same(a.AT, b.AT));
  CHECK(same(a.Cu, b.Cu));
  CHECK(same(a.Cw, b.Cw));
  CHECK(same(a.Mrho, b.Mrho));
}

TEST_CASE("quadrature order check: doubling the order leaves the forms unchanged") {
  const PolyMesh m = load_mesh(TPDG_TEST_DATA "/voronoi_75.mesh");
  const DGSpace space(m, 3);
  const auto map = uniform_material(manufactured_material());
  AssemblyOptions hi;
  hi.volume_order = 12;
  hi.face_order = 14;
  const Forms a = assemble_forms(space, map);
  const Forms b = assemble_forms(space, map, {}, hi);
  for (auto [x, y] : {std::pair{&a.Ae, &b.Ae}, {&a.Ap, &b.Ap}, {&a.AT, &b.AT}, {&a.Cu, &b.Cu}, {&a.Mrho, &b.Mrho}})
    CHECK(rel_max_diff(MatrixXd(*x), MatrixXd(*y)) <= 1e-10);
}
