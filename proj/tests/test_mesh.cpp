#include "doctest.h"
#include "test_support.hpp"

#include "tpdg/mesh.hpp"

#include <map>
#include <sstream>

using namespace tpdg;
using namespace tpdg::testing;

namespace {

PolyMesh two_triangles() {
  return PolyMesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}}, {1, 1});
}

PolyMesh single_cell(const std::vector<Point>& poly) {
  std::vector<Index> ids;
  for (std::size_t i = 0; i < poly.size(); ++i) ids.push_back(static_cast<Index>(i));
  return PolyMesh(poly, {ids}, {1});
}

std::vector<Point> regular_polygon(int n, double r) {
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    p.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return p;
}

}  // namespace

TEST_CASE("two triangles: one internal face, four boundary faces") {
  const PolyMesh m = two_triangles();
  CHECK(m.num_cells() == 2);
  CHECK(m.num_faces() == 5);
  CHECK(m.num_internal_faces() == 1);
  CHECK(m.num_boundary_faces() == 4);
}

TEST_CASE("single quad cell has only boundary faces") {
  const PolyMesh m = single_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(m.num_cells() == 1);
  CHECK(m.num_faces() == 4);
  CHECK(m.num_internal_faces() == 0);
  for (const Face& f : m.faces()) CHECK(f.is_boundary());
}

TEST_CASE("voronoi_300 file: cell count and total area") {
  const PolyMesh m = load_mesh(TPDG_TEST_DATA "/voronoi_300.mesh");
  CHECK(m.num_cells() == 300);
  double area = 0.0;
  for (Index k = 0; k < m.num_cells(); ++k) {
    std::vector<Point> poly;
    for (const Index v : m.cell(k)) poly.push_back(m.vertex(v));
    area += shoelace(poly);
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("element geometry") {
  SUBCASE("unit square") {
    const auto g = element_geometry(single_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 0);
    CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(g.area == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.centroid.x() == doctest::Approx(0.5));
    CHECK(g.centroid.y() == doctest::Approx(0.5));
    CHECK(g.bbox.min.isApprox(Point(0, 0)));
    CHECK(g.bbox.max.isApprox(Point(1, 1)));
  }
  SUBCASE("right triangle") {
    const auto g = element_geometry(single_cell({{0, 0}, {1, 0}, {0, 1}}), 0);
    CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)));
    CHECK(g.area == doctest::Approx(0.5));
  }
  SUBCASE("regular hexagon") {
    const auto hex = regular_polygon(6, 1.0);
    const auto g = element_geometry(single_cell(hex), 0);
    CHECK(g.diameter == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g.area == doctest::Approx(shoelace(hex)).epsilon(1e-14));
    CHECK(g.area == doctest::Approx(2.598076).epsilon(1e-6));
  }
  CHECK_THROWS_AS(element_geometry(two_triangles(), 5), std::out_of_range);
}

TEST_CASE("sub-triangulation") {
  SUBCASE("triangle is its own triangulation") {
    const auto st = sub_triangulate(single_cell({{0, 0}, {1, 0}, {0, 1}}), 0);
    CHECK(st.triangles.size() == 1);
    CHECK(st.area() == doctest::Approx(0.5));
  }
  SUBCASE("convex quad") {
    const std::vector<Point> q{{0, 0}, {2, 0}, {2.5, 1}, {0.2, 1.5}};
    const auto st = sub_triangulate(single_cell(q), 0);
    CHECK(st.triangles.size() == 2);
    CHECK(st.area() == doctest::Approx(shoelace(q)).epsilon(1e-14));
  }
  SUBCASE("L-shaped hexagon") {
    const std::vector<Point> L{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    CHECK_FALSE(polygon_is_convex(L));
    const auto st = sub_triangulate(single_cell(L), 0);
    CHECK(st.triangles.size() >= 4);
    CHECK(std::abs(st.area() - shoelace(L)) <= 1e-12 * shoelace(L));
    for (const auto& t : st.triangles) CHECK(cross(t[1] - t[0], t[2] - t[0]) > 0.0);
  }
  SUBCASE("collinear polygon is rejected") {
    CHECK_THROWS_AS(triangulate_polygon({{0, 0}, {1, 0}, {2, 0}}), ValidationError);
  }
}

TEST_CASE("regularity diagnostic") {
  SUBCASE("unit square") {
    const auto rep = regularity_report(single_cell({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    // face-fan simplex of area 1/4, d = 2
    CHECK(rep.cell_ratio[0] == doctest::Approx(2.0 * 0.25 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(rep.flagged.empty());
  }
  SUBCASE("equilateral triangle: same ratio on every face") {
    const auto tri = regular_polygon(3, 1.0);
    const PolyMesh m = single_cell(tri);
    const auto rep = regularity_report(m);
    const Point c = m.geometry(0).centroid;
    const double h = m.geometry(0).diameter;
    for (const Index f : m.cell_faces(0)) {
      const Face& face = m.face(f);
      const double s = 0.5 * std::abs(cross(m.vertex(face.vertices[0]) - c, m.vertex(face.vertices[1]) - c));
      CHECK(2.0 * s / (h * face.measure) == doctest::Approx(rep.cell_ratio[0]).epsilon(1e-12));
    }
  }
  SUBCASE("100:1 sliver is flagged") {
    const auto rep = regularity_report(single_cell({{0, 0}, {100, 0}, {100, 1}, {0, 1}}));
    // long face: fan triangle area 25, h = sqrt(100^2 + 1)
    CHECK(rep.cell_ratio[0] == doctest::Approx(50.0 / (std::sqrt(10001.0) * 100.0)).epsilon(1e-12));
    CHECK(rep.cell_ratio[0] < 0.01);
    CHECK(rep.flagged == std::vector<Index>{0});
  }
}

TEST_CASE("internal face normals are antiparallel and unit") {
  for (const char* name : {"/voronoi_100.mesh", "/voronoi_300.mesh"}) {
    const PolyMesh m = load_mesh(std::string(TPDG_TEST_DATA) + name);
    for (const Face& f : m.faces()) {
      CHECK(std::abs(f.normal.norm() - 1.0) <= 1e-14);
      CHECK(f.measure > 0.0);
      // outward from the owner: points away from its centroid
      const Point mid = 0.5 * (m.vertex(f.vertices[0]) + m.vertex(f.vertices[1]));
      CHECK(f.normal.dot(mid - m.geometry(f.owner).centroid) > 0.0);
      if (f.is_boundary()) continue;
      // the neighbour's own face normal, rebuilt from its ccw edge
      const auto& cell = m.cell(f.neighbor);
      bool found = false;
      for (std::size_t i = 0; i < cell.size(); ++i) {
        const Index a = cell[i], b = cell[(i + 1) % cell.size()];
        if (a == f.vertices[1] && b == f.vertices[0]) {
          const Vec2 e = m.vertex(b) - m.vertex(a);
          const Vec2 n_nb = Vec2(e.y(), -e.x()).normalized();
          CHECK((n_nb + f.normal).norm() <= 1e-14);
          found = true;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("property: sub-triangulation of random convex polygons preserves area") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto poly = random_convex_polygon(rng);
    double s = 0.0;
    for (const auto& t : triangulate_polygon(poly)) s += 0.5 * cross(t[1] - t[0], t[2] - t[0]);
    const double a = shoelace(poly);
    REQUIRE(std::abs(s - a) <= 1e-12 * a);
  }
}

TEST_CASE("property: every edge belongs to at most two cells") {
  Rng rng(5);
  for (const PolyMesh& m : {load_mesh(TPDG_TEST_DATA "/voronoi_300.mesh"), jittered_grid(rng, 7, 0.3)}) {
    std::map<std::pair<Index, Index>, int> uses;
    for (Index k = 0; k < m.num_cells(); ++k) {
      const auto& c = m.cell(k);
      for (std::size_t i = 0; i < c.size(); ++i) {
        const Index a = c[i], b = c[(i + 1) % c.size()];
        ++uses[{std::min(a, b), std::max(a, b)}];
      }
    }
    for (const auto& [edge, n] : uses) CHECK(n <= 2);
    CHECK(static_cast<Index>(uses.size()) == m.num_faces());
  }
}

TEST_CASE("mesh errors") {
  SUBCASE("parse failure") {
    std::istringstream in("vertices 3\n0 0\n1 0\n");
    CHECK_THROWS_AS(read_mesh(in), ParseError);
    std::istringstream bad("points 1\n0 0\n");
    CHECK_THROWS_AS(read_mesh(bad), ParseError);
    CHECK_THROWS_AS(load_mesh("does/not/exist.mesh"), ParseError);
  }
  SUBCASE("edge shared by three cells") {
    CHECK_THROWS_AS(PolyMesh({{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.5, 2}},
                             {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}, {1, 1, 1}),
                    ValidationError);
  }
  SUBCASE("zero-area cell") {
    CHECK_THROWS_AS(PolyMesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}, {1}), ValidationError);
  }
  SUBCASE("clockwise cell") {
    CHECK_THROWS_AS(PolyMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}}, {1}), ValidationError);
  }
}

TEST_CASE("text format round trip") {
  const PolyMesh m = with_regions(cartesian_grid(3, 2, 0, 3, 0, 1), {1, 2, 3, 1, 2, 3});
  std::stringstream s;
  write_mesh(s, m);
  const PolyMesh r = read_mesh(s);
  CHECK(r.num_cells() == 6);
  CHECK(r.num_vertices() == m.num_vertices());
  CHECK(r.regions() == m.regions());
  CHECK(r.total_area() == doctest::Approx(3.0));
}

TEST_CASE("cartesian grid and point location") {
  const PolyMesh m = cartesian_grid(4, 4);
  CHECK(m.num_cells() == 16);
  CHECK(m.num_internal_faces() == 24);
  CHECK(m.max_diameter() == doctest::Approx(std::sqrt(2.0) / 4));
  const CellLocator loc(m);
  for (Index k = 0; k < m.num_cells(); ++k) CHECK(loc.locate(m.geometry(k).centroid) == k);
  // shared vertex: lowest index wins, all four reported
  const auto all = loc.locate_all(Point(0.5, 0.5));
  CHECK(all.size() == 4);
  CHECK(loc.locate(Point(0.5, 0.5)) == all.front());
  CHECK_FALSE(loc.locate(Point(1.5, 0.5)).has_value());
}
