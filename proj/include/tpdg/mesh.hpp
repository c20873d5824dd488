#pragma once

#include "tpdg/types.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace tpdg {

inline constexpr Index kBoundary = -1;

struct Face {
  std::array<Index, 2> vertices{};  // ordered counter-clockwise with respect to the owner
  Index owner = 0;
  Index neighbor = kBoundary;
  Vec2 normal = Vec2::Zero();  // unit, outward from the owner
  double measure = 0.0;

  bool is_boundary() const { return neighbor == kBoundary; }
};

struct BoundingBox {
  Point min = Point::Zero();
  Point max = Point::Zero();

  Point center() const { return 0.5 * (min + max); }
  Vec2 extent() const { return max - min; }
  bool contains(const Point& p, double tol = 0.0) const {
    return p.x() >= min.x() - tol && p.x() <= max.x() + tol && p.y() >= min.y() - tol &&
           p.y() <= max.y() + tol;
  }
};

struct ElementGeometry {
  double diameter = 0.0;
  double area = 0.0;
  Point centroid = Point::Zero();
  BoundingBox bbox;
};

struct SubTriangulation {
  Index cell = 0;
  std::vector<std::array<Point, 3>> triangles;

  double area() const;
};

/// Polygonal mesh of a planar domain. Immutable once built.
class PolyMesh {
 public:
  PolyMesh() = default;

  /// Builds faces, adjacency and per-cell geometry. Throws ValidationError
  /// on degenerate cells or non-manifold edges.
  PolyMesh(std::vector<Point> vertices, std::vector<std::vector<Index>> cells,
           std::vector<int> regions);

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_cells() const { return static_cast<Index>(cells_.size()); }
  Index num_faces() const { return static_cast<Index>(faces_.size()); }
  Index num_internal_faces() const;
  Index num_boundary_faces() const { return num_faces() - num_internal_faces(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(Index i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const std::vector<Index>& cell(Index k) const { return cells_.at(static_cast<std::size_t>(k)); }
  int region(Index k) const { return regions_.at(static_cast<std::size_t>(k)); }
  const std::vector<int>& regions() const { return regions_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(Index f) const { return faces_.at(static_cast<std::size_t>(f)); }
  /// Faces bounding cell k, in the order of the cell's edges.
  const std::vector<Index>& cell_faces(Index k) const {
    return cell_faces_.at(static_cast<std::size_t>(k));
  }
  const ElementGeometry& geometry(Index k) const {
    return geometry_.at(static_cast<std::size_t>(k));
  }
  const SubTriangulation& sub_triangulation(Index k) const {
    return triangulations_.at(static_cast<std::size_t>(k));
  }

  std::vector<Point> cell_polygon(Index k) const;
  double total_area() const;
  /// max over cells of the element diameter
  double max_diameter() const;
  BoundingBox bounding_box() const;

 private:
  std::vector<Point> vertices_;
  std::vector<std::vector<Index>> cells_;
  std::vector<int> regions_;
  std::vector<Face> faces_;
  std::vector<std::vector<Index>> cell_faces_;
  std::vector<ElementGeometry> geometry_;
  std::vector<SubTriangulation> triangulations_;
};

enum class MeshFormat { Text };

PolyMesh load_mesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::Text);
PolyMesh read_mesh(std::istream& in);
void write_mesh(std::ostream& out, const PolyMesh& mesh);
void save_mesh(const std::filesystem::path& path, const PolyMesh& mesh);

/// Structured nx-by-ny quadrilateral grid of [x0,x1]x[y0,y1], all cells tagged `region`.
PolyMesh cartesian_grid(Index nx, Index ny, double x0 = 0.0, double x1 = 1.0, double y0 = 0.0,
                        double y1 = 1.0, int region = 1);

/// Same mesh with region tags replaced.
PolyMesh with_regions(const PolyMesh& mesh, std::vector<int> regions);

ElementGeometry element_geometry(const PolyMesh& mesh, Index cell);

// Polygon utilities, exposed for testing.
double polygon_area(const std::vector<Point>& polygon);
Point polygon_centroid(const std::vector<Point>& polygon);
double polygon_diameter(const std::vector<Point>& polygon);
bool polygon_is_simple(const std::vector<Point>& polygon);
bool polygon_is_convex(const std::vector<Point>& polygon);
bool point_in_polygon(const Point& p, const std::vector<Point>& polygon, double tol = 1e-12);
/// Fan triangulation for convex polygons, ear clipping otherwise.
std::vector<std::array<Point, 3>> triangulate_polygon(const std::vector<Point>& polygon);

SubTriangulation sub_triangulate(const PolyMesh& mesh, Index cell);

struct RegularityReport {
  std::vector<double> cell_ratio;  // min over faces of d*|S_F|/(h*|F|)
  double min = 0.0;
  double median = 0.0;
  std::vector<Index> flagged;  // cells with ratio below the threshold
  double threshold = 0.01;
};

/// Polytopic-regularity diagnostic using the centroid fan, one simplex per face.
RegularityReport regularity_report(const PolyMesh& mesh, double threshold = 0.01);

/// Point location by bucketing cell bounding boxes on a uniform grid.
class CellLocator {
 public:
  explicit CellLocator(const PolyMesh& mesh);

  /// Lowest-index cell containing p (boundary inclusive); nullopt outside the mesh.
  std::optional<Index> locate(const Point& p) const;
  /// All cells whose closure contains p, ascending.
  std::vector<Index> locate_all(const Point& p) const;

 private:
  const PolyMesh* mesh_;
  BoundingBox box_;
  Index nx_ = 1;
  Index ny_ = 1;
  std::vector<std::vector<Index>> buckets_;
  double tol_ = 0.0;
};

}  // namespace tpdg
