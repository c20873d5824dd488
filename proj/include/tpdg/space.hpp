#pragma once

#include "tpdg/mesh.hpp"
#include "tpdg/quadrature.hpp"
#include "tpdg/types.hpp"

#include <functional>
#include <vector>

namespace tpdg {

/// Values and gradients of a cell's basis at a set of points; rows are points.
struct BasisTable {
  MatrixXd value;
  MatrixXd dx;
  MatrixXd dy;
};

/// Broken polynomial space with an orthonormal modal basis on every cell.
///
/// Basis functions are monomials in bounding-box coordinates, orthonormalized
/// against the cell's own quadrature. The local mass matrix is the identity.
class DGSpace {
 public:
  DGSpace(const PolyMesh& mesh, int degree);
  DGSpace(const PolyMesh& mesh, std::vector<int> degrees);

  const PolyMesh& mesh() const { return *mesh_; }
  int degree(Index k) const { return degrees_.at(static_cast<std::size_t>(k)); }
  int max_degree() const;
  Index local_dim(Index k) const { return dims_.at(static_cast<std::size_t>(k)); }
  Index offset(Index k) const { return offsets_.at(static_cast<std::size_t>(k)); }
  /// scalar dofs
  Index num_dofs() const { return offsets_.back(); }

  /// Coefficients of the basis in the scaled monomials (row i = function i).
  const MatrixXd& coefficients(Index k) const { return coeffs_.at(static_cast<std::size_t>(k)); }
  /// Monomial exponents (px, py) in graded order.
  const std::vector<std::array<int, 2>>& exponents(Index k) const;

  BasisTable eval(Index k, const std::vector<Point>& points) const;
  /// Single point convenience; vectors of length local_dim.
  void eval(Index k, const Point& x, VectorXd& value, VectorXd& dx, VectorXd& dy) const;

 private:
  void build();

  const PolyMesh* mesh_;
  std::vector<int> degrees_;
  std::vector<Index> dims_;
  std::vector<Index> offsets_;
  std::vector<MatrixXd> coeffs_;
  std::vector<std::vector<std::array<int, 2>>> exponents_;
};

inline constexpr Index local_dimension(int degree) {
  return static_cast<Index>((degree + 1) * (degree + 2) / 2);
}

/// Quadrature on cell k exact for total degree `order`, composed over the sub-triangulation.
QuadratureRule2D element_quadrature(const PolyMesh& mesh, Index k, int order);
QuadratureRule2D face_quadrature(const PolyMesh& mesh, const Face& face, int order);

/// Basis data of one cell tabulated at its quadrature points.
struct CellTabulation {
  QuadratureRule2D rule;
  BasisTable basis;
};

/// Face quadrature with the basis of the owner (and neighbor, if any) at the same points.
struct FaceTabulation {
  QuadratureRule2D rule;
  BasisTable owner;
  BasisTable neighbor;
};

CellTabulation tabulate_cell(const DGSpace& space, Index k, int order);
FaceTabulation tabulate_face(const DGSpace& space, Index f, int order);

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Vec2(const Point&)>;

// Vector dofs of cell k, component a, function i live at 2*offset(k) + a*local_dim(k) + i.
inline Index vector_dof(const DGSpace& space, Index k, int a, Index i) {
  return 2 * space.offset(k) + a * space.local_dim(k) + i;
}

/// Element-wise L2 projection; order < 0 selects 2*degree + 4.
VectorXd l2_project(const DGSpace& space, const ScalarField& f, int order = -1);
VectorXd l2_project(const DGSpace& space, const VectorField& f, int order = -1);

/// Largest coefficient change when a projection is evaluated and projected again.
double reprojection_defect(const DGSpace& space, const VectorXd& coeffs);

double evaluate_scalar(const DGSpace& space, const VectorXd& coeffs, Index k, const Point& x);
Vec2 evaluate_vector(const DGSpace& space, const VectorXd& coeffs, Index k, const Point& x);
Vec2 evaluate_gradient(const DGSpace& space, const VectorXd& coeffs, Index k, const Point& x);
/// Divergence of a vector field in cell k.
double evaluate_divergence(const DGSpace& space, const VectorXd& coeffs, Index k, const Point& x);

}  // namespace tpdg
