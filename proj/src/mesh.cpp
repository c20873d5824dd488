#include "tpdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace tpdg {

namespace {

double triangle_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * cross(b - a, c - a);
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](const Point& a, const Point& b, const Point& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
  };
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

std::string expect_keyword(std::istream& in, const std::string& keyword) {
  std::string word;
  if (!(in >> word) || word != keyword)
    throw ParseError("mesh: expected section '" + keyword + "', got '" + word + "'");
  return word;
}

}  // namespace

double SubTriangulation::area() const {
  double a = 0.0;
  for (const auto& t : triangles) a += triangle_area(t[0], t[1], t[2]);
  return a;
}

double polygon_area(const std::vector<Point>& polygon) {
  double a = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * a;
}

Point polygon_centroid(const std::vector<Point>& polygon) {
  // shift to the first vertex to limit cancellation on far-from-origin cells
  const Point origin = polygon.front();
  Point c = Point::Zero();
  double a = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = polygon[i] - origin;
    const Point q = polygon[(i + 1) % n] - origin;
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return origin + c / (3.0 * a);
}

double polygon_diameter(const std::vector<Point>& polygon) {
  double h = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i)
    for (std::size_t j = i + 1; j < polygon.size(); ++j)
      h = std::max(h, (polygon[i] - polygon[j]).norm());
  return h;
}

bool polygon_is_simple(const std::vector<Point>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if ((polygon[i] - polygon[(i + 1) % n]).norm() == 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      // skip adjacent edges
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

bool polygon_is_convex(const std::vector<Point>& polygon) {
  const std::size_t n = polygon.size();
  const double scale = std::max(polygon_diameter(polygon), 1e-300);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = polygon[i];
    const Point& b = polygon[(i + 1) % n];
    const Point& c = polygon[(i + 2) % n];
    if (cross(b - a, c - b) < -1e-14 * scale * scale) return false;
  }
  return true;
}

bool point_in_polygon(const Point& p, const std::vector<Point>& polygon, double tol) {
  const std::size_t n = polygon.size();
  // on-boundary test first
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = polygon[i];
    const Point& b = polygon[(i + 1) % n];
    const Vec2 e = b - a;
    const double len2 = e.squaredNorm();
    const double s = std::clamp((p - a).dot(e) / len2, 0.0, 1.0);
    if ((a + s * e - p).norm() <= tol) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = polygon[i];
    const Point& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

std::vector<std::array<Point, 3>> triangulate_polygon(const std::vector<Point>& polygon) {
  const std::size_t n = polygon.size();
  const double area = polygon_area(polygon);
  if (n < 3 || !(area > 0.0)) throw ValidationError("triangulate: degenerate polygon");
  const double drop = 1e-14 * area;

  std::vector<std::array<Point, 3>> tris;
  if (polygon_is_convex(polygon)) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      std::array<Point, 3> t{polygon[0], polygon[i], polygon[i + 1]};
      if (triangle_area(t[0], t[1], t[2]) > drop) tris.push_back(t);
    }
    return tris;
  }

  // ear clipping
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t guard = 0;
  while (idx.size() > 3) {
    bool clipped = false;
    const std::size_t m = idx.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Point& a = polygon[idx[(i + m - 1) % m]];
      const Point& b = polygon[idx[i]];
      const Point& c = polygon[idx[(i + 1) % m]];
      const double ta = triangle_area(a, b, c);
      if (ta <= 0.0) {
        // collinear vertex: remove without emitting
        if (std::abs(ta) <= drop) {
          idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
          clipped = true;
          break;
        }
        continue;
      }
      bool empty = true;
      for (std::size_t j = 0; j < m && empty; ++j) {
        if (j == i || j == (i + 1) % m || j == (i + m - 1) % m) continue;
        const Point& p = polygon[idx[j]];
        if (triangle_area(a, b, p) >= 0 && triangle_area(b, c, p) >= 0 &&
            triangle_area(c, a, p) >= 0)
          empty = false;
      }
      if (!empty) continue;
      tris.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped || ++guard > 4 * n) throw ValidationError("triangulate: ear clipping failed");
  }
  std::array<Point, 3> last{polygon[idx[0]], polygon[idx[1]], polygon[idx[2]]};
  if (triangle_area(last[0], last[1], last[2]) > drop) tris.push_back(last);
  return tris;
}

PolyMesh::PolyMesh(std::vector<Point> vertices, std::vector<std::vector<Index>> cells,
                   std::vector<int> regions)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), regions_(std::move(regions)) {
  if (regions_.size() != cells_.size())
    throw ValidationError("mesh: region count does not match cell count");

  std::map<std::pair<Index, Index>, std::vector<std::pair<Index, Index>>> edges;
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const auto& loop = cells_[k];
    if (loop.size() < 3)
      throw ValidationError("mesh: cell " + std::to_string(k) + " has fewer than 3 vertices");
    for (Index v : loop)
      if (v < 0 || v >= num_vertices())
        throw ValidationError("mesh: cell " + std::to_string(k) + " references vertex " +
                              std::to_string(v) + " out of range");
    const auto poly = cell_polygon(static_cast<Index>(k));
    if (!(polygon_area(poly) > 0.0))
      throw ValidationError("mesh: degenerate cell " + std::to_string(k) +
                            " (area <= 0 or clockwise orientation)");
    if (!polygon_is_simple(poly))
      throw ValidationError("mesh: cell " + std::to_string(k) + " is not a simple polygon");
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Index a = loop[i];
      const Index b = loop[(i + 1) % loop.size()];
      edges[{std::min(a, b), std::max(a, b)}].emplace_back(static_cast<Index>(k),
                                                           static_cast<Index>(i));
    }
  }

  cell_faces_.assign(cells_.size(), {});
  for (std::size_t k = 0; k < cells_.size(); ++k) cell_faces_[k].assign(cells_[k].size(), -1);

  // Faces are numbered by the first cell edge that introduces them.
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const auto& loop = cells_[k];
    for (std::size_t i = 0; i < loop.size(); ++i) {
      if (cell_faces_[k][i] >= 0) continue;
      const Index a = loop[i];
      const Index b = loop[(i + 1) % loop.size()];
      const auto& users = edges.at({std::min(a, b), std::max(a, b)});
      if (users.size() > 2)
        throw ValidationError("mesh: non-manifold edge (" + std::to_string(a) + "," +
                              std::to_string(b) + ") shared by " + std::to_string(users.size()) +
                              " cells");
      Face f;
      f.vertices = {a, b};
      f.owner = static_cast<Index>(k);
      const Vec2 e = vertices_[static_cast<std::size_t>(b)] - vertices_[static_cast<std::size_t>(a)];
      f.measure = e.norm();
      f.normal = Vec2(e.y(), -e.x()) / f.measure;
      const Index fid = static_cast<Index>(faces_.size());
      for (const auto& [cell, edge] : users) {
        if (cell != f.owner) {
          f.neighbor = cell;
          const auto& nloop = cells_[static_cast<std::size_t>(cell)];
          if (nloop[static_cast<std::size_t>(edge)] != b)
            throw ValidationError("mesh: inconsistent orientation between cells " +
                                  std::to_string(k) + " and " + std::to_string(cell));
        } else if (edge != static_cast<Index>(i)) {
          throw ValidationError("mesh: cell " + std::to_string(k) + " repeats an edge");
        }
        cell_faces_[static_cast<std::size_t>(cell)][static_cast<std::size_t>(edge)] = fid;
      }
      faces_.push_back(f);
    }
  }

  geometry_.reserve(cells_.size());
  triangulations_.reserve(cells_.size());
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const auto poly = cell_polygon(static_cast<Index>(k));
    ElementGeometry g;
    g.area = polygon_area(poly);
    g.centroid = polygon_centroid(poly);
    g.diameter = polygon_diameter(poly);
    g.bbox.min = g.bbox.max = poly.front();
    for (const auto& p : poly) {
      g.bbox.min = g.bbox.min.cwiseMin(p);
      g.bbox.max = g.bbox.max.cwiseMax(p);
    }
    geometry_.push_back(g);
    triangulations_.push_back({static_cast<Index>(k), triangulate_polygon(poly)});
  }
}

Index PolyMesh::num_internal_faces() const {
  return static_cast<Index>(
      std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return !f.is_boundary(); }));
}

std::vector<Point> PolyMesh::cell_polygon(Index k) const {
  std::vector<Point> poly;
  for (Index v : cell(k)) poly.push_back(vertex(v));
  return poly;
}

double PolyMesh::total_area() const {
  double a = 0.0;
  for (const auto& g : geometry_) a += g.area;
  return a;
}

double PolyMesh::max_diameter() const {
  double h = 0.0;
  for (const auto& g : geometry_) h = std::max(h, g.diameter);
  return h;
}

BoundingBox PolyMesh::bounding_box() const {
  BoundingBox b;
  b.min = b.max = vertices_.front();
  for (const auto& p : vertices_) {
    b.min = b.min.cwiseMin(p);
    b.max = b.max.cwiseMax(p);
  }
  return b;
}

PolyMesh read_mesh(std::istream& in) {
  std::size_t nv = 0, nc = 0;
  expect_keyword(in, "vertices");
  if (!(in >> nv)) throw ParseError("mesh: missing vertex count");
  std::vector<Point> vertices(nv);
  for (auto& p : vertices)
    if (!(in >> p.x() >> p.y())) throw ParseError("mesh: truncated vertex list");

  expect_keyword(in, "cells");
  if (!(in >> nc)) throw ParseError("mesh: missing cell count");
  std::vector<std::vector<Index>> cells(nc);
  for (auto& c : cells) {
    std::size_t k = 0;
    if (!(in >> k)) throw ParseError("mesh: truncated cell list");
    c.resize(k);
    for (auto& v : c)
      if (!(in >> v)) throw ParseError("mesh: truncated cell vertex list");
  }

  expect_keyword(in, "regions");
  std::vector<int> regions(nc);
  for (auto& r : regions)
    if (!(in >> r)) throw ParseError("mesh: truncated region list");
  std::string trailing;
  if (in >> trailing) throw ParseError("mesh: unexpected trailing content '" + trailing + "'");
  return PolyMesh(std::move(vertices), std::move(cells), std::move(regions));
}

PolyMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  if (format != MeshFormat::Text) throw ParseError("mesh: unsupported format");
  std::ifstream in(path);
  if (!in) throw ParseError("mesh: cannot open " + path.string());
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const PolyMesh& mesh) {
  out << std::setprecision(17);
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << '\n';
  out << "cells " << mesh.num_cells() << '\n';
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    out << mesh.cell(k).size();
    for (Index v : mesh.cell(k)) out << ' ' << v;
    out << '\n';
  }
  out << "regions\n";
  for (int r : mesh.regions()) out << r << '\n';
}

void save_mesh(const std::filesystem::path& path, const PolyMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw ParseError("mesh: cannot write " + path.string());
  write_mesh(out, mesh);
}

PolyMesh cartesian_grid(Index nx, Index ny, double x0, double x1, double y0, double y1,
                        int region) {
  if (nx < 1 || ny < 1) throw ValidationError("cartesian_grid: need at least one cell per axis");
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (Index j = 0; j <= ny; ++j)
    for (Index i = 0; i <= nx; ++i)
      vertices.emplace_back(x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(nx),
                            y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(ny));
  std::vector<std::vector<Index>> cells;
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i) {
      const Index v = j * (nx + 1) + i;
      cells.push_back({v, v + 1, v + nx + 2, v + nx + 1});
    }
  std::vector<int> regions(cells.size(), region);
  return PolyMesh(std::move(vertices), std::move(cells), std::move(regions));
}

PolyMesh with_regions(const PolyMesh& mesh, std::vector<int> regions) {
  std::vector<std::vector<Index>> cells;
  for (Index k = 0; k < mesh.num_cells(); ++k) cells.push_back(mesh.cell(k));
  return PolyMesh(mesh.vertices(), std::move(cells), std::move(regions));
}

ElementGeometry element_geometry(const PolyMesh& mesh, Index cell) {
  if (cell < 0 || cell >= mesh.num_cells())
    throw std::out_of_range("element_geometry: invalid cell index " + std::to_string(cell));
  return mesh.geometry(cell);
}

SubTriangulation sub_triangulate(const PolyMesh& mesh, Index cell) {
  if (cell < 0 || cell >= mesh.num_cells())
    throw std::out_of_range("sub_triangulate: invalid cell index " + std::to_string(cell));
  return {cell, triangulate_polygon(mesh.cell_polygon(cell))};
}

RegularityReport regularity_report(const PolyMesh& mesh, double threshold) {
  constexpr double d = 2.0;
  RegularityReport rep;
  rep.threshold = threshold;
  rep.cell_ratio.resize(static_cast<std::size_t>(mesh.num_cells()));
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    const auto& g = mesh.geometry(k);
    double worst = std::numeric_limits<double>::infinity();
    for (Index fid : mesh.cell_faces(k)) {
      const Face& f = mesh.face(fid);
      // face-fan simplex from the centroid; a non-positive area means the
      // fan is not admissible for this cell
      Point a = mesh.vertex(f.vertices[0]);
      Point b = mesh.vertex(f.vertices[1]);
      if (f.owner != k) std::swap(a, b);
      const double s = std::max(0.0, triangle_area(g.centroid, a, b));
      worst = std::min(worst, d * s / (g.diameter * f.measure));
    }
    rep.cell_ratio[static_cast<std::size_t>(k)] = worst;
    if (worst < threshold) rep.flagged.push_back(k);
  }
  auto sorted = rep.cell_ratio;
  std::sort(sorted.begin(), sorted.end());
  rep.min = sorted.front();
  const std::size_t n = sorted.size();
  rep.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return rep;
}

CellLocator::CellLocator(const PolyMesh& mesh) : mesh_(&mesh), box_(mesh.bounding_box()) {
  const double n = std::max<double>(1.0, std::sqrt(static_cast<double>(mesh.num_cells())));
  nx_ = ny_ = static_cast<Index>(std::ceil(n));
  const Vec2 ext = box_.extent();
  tol_ = 1e-12 * std::max(ext.x(), ext.y());
  buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
  auto cell_of = [&](double v, double lo, double len, Index m) {
    const Index i = static_cast<Index>(std::floor((v - lo) / len * static_cast<double>(m)));
    return std::clamp<Index>(i, 0, m - 1);
  };
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    const auto& bb = mesh.geometry(k).bbox;
    const Index i0 = cell_of(bb.min.x() - tol_, box_.min.x(), ext.x(), nx_);
    const Index i1 = cell_of(bb.max.x() + tol_, box_.min.x(), ext.x(), nx_);
    const Index j0 = cell_of(bb.min.y() - tol_, box_.min.y(), ext.y(), ny_);
    const Index j1 = cell_of(bb.max.y() + tol_, box_.min.y(), ext.y(), ny_);
    for (Index j = j0; j <= j1; ++j)
      for (Index i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j * nx_ + i)].push_back(k);
  }
}

std::vector<Index> CellLocator::locate_all(const Point& p) const {
  std::vector<Index> hits;
  if (!box_.contains(p, tol_)) return hits;
  const Vec2 ext = box_.extent();
  const Index i = std::clamp<Index>(
      static_cast<Index>(std::floor((p.x() - box_.min.x()) / ext.x() * static_cast<double>(nx_))),
      0, nx_ - 1);
  const Index j = std::clamp<Index>(
      static_cast<Index>(std::floor((p.y() - box_.min.y()) / ext.y() * static_cast<double>(ny_))),
      0, ny_ - 1);
  for (Index k : buckets_[static_cast<std::size_t>(j * nx_ + i)]) {
    if (!mesh_->geometry(k).bbox.contains(p, tol_)) continue;
    if (point_in_polygon(p, mesh_->cell_polygon(k), tol_)) hits.push_back(k);
  }
  std::sort(hits.begin(), hits.end());
  return hits;
}

std::optional<Index> CellLocator::locate(const Point& p) const {
  const auto hits = locate_all(p);
  if (hits.empty()) return std::nullopt;
  return hits.front();
}

}  // namespace tpdg
