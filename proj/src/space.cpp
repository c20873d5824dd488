#include "tpdg/space.hpp"

#include <algorithm>
#include <cmath>

namespace tpdg {

namespace {

std::vector<std::array<int, 2>> graded_exponents(int degree) {
  std::vector<std::array<int, 2>> e;
  for (int d = 0; d <= degree; ++d)
    for (int py = 0; py <= d; ++py) e.push_back({d - py, py});
  return e;
}

struct Scaling {
  Point center;
  Vec2 half;
};

Scaling cell_scaling(const PolyMesh& mesh, Index k) {
  const auto& bb = mesh.geometry(k).bbox;
  return {bb.center(), 0.5 * bb.extent()};
}

// Monomials and their x/y derivatives at one point.
void monomials(const std::vector<std::array<int, 2>>& exps, const Scaling& s, const Point& x,
               double* m, double* mx, double* my) {
  const double xi = (x.x() - s.center.x()) / s.half.x();
  const double eta = (x.y() - s.center.y()) / s.half.y();
  int maxp = 0;
  for (const auto& e : exps) maxp = std::max({maxp, e[0], e[1]});
  std::vector<double> px(static_cast<std::size_t>(maxp + 1)), py(px.size());
  px[0] = py[0] = 1.0;
  for (int p = 1; p <= maxp; ++p) {
    px[static_cast<std::size_t>(p)] = px[static_cast<std::size_t>(p - 1)] * xi;
    py[static_cast<std::size_t>(p)] = py[static_cast<std::size_t>(p - 1)] * eta;
  }
  for (std::size_t j = 0; j < exps.size(); ++j) {
    const auto a = static_cast<std::size_t>(exps[j][0]);
    const auto b = static_cast<std::size_t>(exps[j][1]);
    m[j] = px[a] * py[b];
    mx[j] = a ? static_cast<double>(a) * px[a - 1] * py[b] / s.half.x() : 0.0;
    my[j] = b ? static_cast<double>(b) * px[a] * py[b - 1] / s.half.y() : 0.0;
  }
}

}  // namespace

DGSpace::DGSpace(const PolyMesh& mesh, int degree)
    : DGSpace(mesh, std::vector<int>(static_cast<std::size_t>(mesh.num_cells()), degree)) {}

DGSpace::DGSpace(const PolyMesh& mesh, std::vector<int> degrees)
    : mesh_(&mesh), degrees_(std::move(degrees)) {
  if (static_cast<Index>(degrees_.size()) != mesh.num_cells())
    throw ValidationError("space: one degree per cell required");
  for (int d : degrees_)
    if (d < 0) throw ValidationError("space: negative polynomial degree");
  build();
}

int DGSpace::max_degree() const { return *std::max_element(degrees_.begin(), degrees_.end()); }

const std::vector<std::array<int, 2>>& DGSpace::exponents(Index k) const {
  return exponents_.at(static_cast<std::size_t>(k));
}

void DGSpace::build() {
  const Index nc = mesh_->num_cells();
  dims_.resize(static_cast<std::size_t>(nc));
  offsets_.assign(static_cast<std::size_t>(nc + 1), 0);
  coeffs_.resize(static_cast<std::size_t>(nc));
  exponents_.resize(static_cast<std::size_t>(nc));
  for (Index k = 0; k < nc; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const int deg = degrees_[ks];
    dims_[ks] = local_dimension(deg);
    offsets_[ks + 1] = offsets_[ks] + dims_[ks];
    exponents_[ks] = graded_exponents(deg);

    const auto rule = element_quadrature(*mesh_, k, 2 * deg);
    const auto s = cell_scaling(*mesh_, k);
    const Index n = dims_[ks];
    const Index nq = static_cast<Index>(rule.size());
    MatrixXd V(nq, n);
    std::vector<double> m(static_cast<std::size_t>(n)), mx(m.size()), my(m.size());
    for (Index q = 0; q < nq; ++q) {
      monomials(exponents_[ks], s, rule.points[static_cast<std::size_t>(q)], m.data(), mx.data(),
                my.data());
      const double sw = std::sqrt(rule.weights[static_cast<std::size_t>(q)]);
      for (Index j = 0; j < n; ++j) V(q, j) = sw * m[static_cast<std::size_t>(j)];
    }
    // modified Gram-Schmidt, two passes; C holds monomial coefficients of each column
    MatrixXd C = MatrixXd::Identity(n, n);
    for (Index j = 0; j < n; ++j) {
      for (int pass = 0; pass < 2; ++pass)
        for (Index i = 0; i < j; ++i) {
          const double r = V.col(i).dot(V.col(j));
          V.col(j) -= r * V.col(i);
          C.col(j) -= r * C.col(i);
        }
      const double nrm = V.col(j).norm();
      if (!(nrm > 0.0)) throw ValidationError("space: rank-deficient basis on cell " + std::to_string(k));
      V.col(j) /= nrm;
      C.col(j) /= nrm;
    }
    coeffs_[ks] = C.transpose();
  }
}

BasisTable DGSpace::eval(Index k, const std::vector<Point>& points) const {
  if (k < 0 || k >= mesh_->num_cells())
    throw std::out_of_range("basis_eval: unknown cell " + std::to_string(k));
  const auto ks = static_cast<std::size_t>(k);
  const Index n = dims_[ks];
  const Index np = static_cast<Index>(points.size());
  const auto s = cell_scaling(*mesh_, k);
  MatrixXd M(np, n), Mx(np, n), My(np, n);
  std::vector<double> m(static_cast<std::size_t>(n)), mx(m.size()), my(m.size());
  for (Index p = 0; p < np; ++p) {
    monomials(exponents_[ks], s, points[static_cast<std::size_t>(p)], m.data(), mx.data(),
              my.data());
    for (Index j = 0; j < n; ++j) {
      M(p, j) = m[static_cast<std::size_t>(j)];
      Mx(p, j) = mx[static_cast<std::size_t>(j)];
      My(p, j) = my[static_cast<std::size_t>(j)];
    }
  }
  const MatrixXd Lt = coeffs_[ks].transpose();
  return {M * Lt, Mx * Lt, My * Lt};
}

void DGSpace::eval(Index k, const Point& x, VectorXd& value, VectorXd& dx, VectorXd& dy) const {
  const auto t = eval(k, std::vector<Point>{x});
  value = t.value.row(0).transpose();
  dx = t.dx.row(0).transpose();
  dy = t.dy.row(0).transpose();
}

QuadratureRule2D element_quadrature(const PolyMesh& mesh, Index k, int order) {
  return polygon_rule(order, mesh.sub_triangulation(k).triangles);
}

QuadratureRule2D face_quadrature(const PolyMesh& mesh, const Face& face, int order) {
  return segment_rule(order, mesh.vertex(face.vertices[0]), mesh.vertex(face.vertices[1]));
}

CellTabulation tabulate_cell(const DGSpace& space, Index k, int order) {
  CellTabulation t;
  t.rule = element_quadrature(space.mesh(), k, order);
  t.basis = space.eval(k, t.rule.points);
  return t;
}

FaceTabulation tabulate_face(const DGSpace& space, Index f, int order) {
  const Face& face = space.mesh().face(f);
  FaceTabulation t;
  t.rule = face_quadrature(space.mesh(), face, order);
  t.owner = space.eval(face.owner, t.rule.points);
  if (!face.is_boundary()) t.neighbor = space.eval(face.neighbor, t.rule.points);
  return t;
}

VectorXd l2_project(const DGSpace& space, const ScalarField& f, int order) {
  VectorXd out = VectorXd::Zero(space.num_dofs());
  for (Index k = 0; k < space.mesh().num_cells(); ++k) {
    const auto tab = tabulate_cell(space, k, order < 0 ? 2 * space.degree(k) + 4 : order);
    VectorXd fw(static_cast<Index>(tab.rule.size()));
    for (std::size_t q = 0; q < tab.rule.size(); ++q)
      fw(static_cast<Index>(q)) = tab.rule.weights[q] * f(tab.rule.points[q]);
    out.segment(space.offset(k), space.local_dim(k)) = tab.basis.value.transpose() * fw;
  }
  return out;
}

VectorXd l2_project(const DGSpace& space, const VectorField& f, int order) {
  VectorXd out = VectorXd::Zero(2 * space.num_dofs());
  for (Index k = 0; k < space.mesh().num_cells(); ++k) {
    const auto tab = tabulate_cell(space, k, order < 0 ? 2 * space.degree(k) + 4 : order);
    const Index nq = static_cast<Index>(tab.rule.size());
    MatrixXd fw(nq, 2);
    for (Index q = 0; q < nq; ++q) {
      const auto qs = static_cast<std::size_t>(q);
      fw.row(q) = tab.rule.weights[qs] * f(tab.rule.points[qs]).transpose();
    }
    const Index n = space.local_dim(k);
    const MatrixXd c = tab.basis.value.transpose() * fw;
    out.segment(2 * space.offset(k), n) = c.col(0);
    out.segment(2 * space.offset(k) + n, n) = c.col(1);
  }
  return out;
}

double reprojection_defect(const DGSpace& space, const VectorXd& coeffs) {
  VectorXd again;
  if (coeffs.size() == space.num_dofs()) {
    again = VectorXd::Zero(coeffs.size());
    for (Index k = 0; k < space.mesh().num_cells(); ++k) {
      const auto tab = tabulate_cell(space, k, 2 * space.degree(k));
      const VectorXd c = coeffs.segment(space.offset(k), space.local_dim(k));
      const VectorXd vals = tab.basis.value * c;
      VectorXd fw(vals.size());
      for (Index q = 0; q < vals.size(); ++q)
        fw(q) = tab.rule.weights[static_cast<std::size_t>(q)] * vals(q);
      again.segment(space.offset(k), space.local_dim(k)) = tab.basis.value.transpose() * fw;
    }
  } else if (coeffs.size() == 2 * space.num_dofs()) {
    again = VectorXd::Zero(coeffs.size());
    for (Index k = 0; k < space.mesh().num_cells(); ++k) {
      const auto tab = tabulate_cell(space, k, 2 * space.degree(k));
      const Index n = space.local_dim(k);
      for (int a = 0; a < 2; ++a) {
        const Index o = 2 * space.offset(k) + a * n;
        const VectorXd vals = tab.basis.value * coeffs.segment(o, n);
        VectorXd fw(vals.size());
        for (Index q = 0; q < vals.size(); ++q)
          fw(q) = tab.rule.weights[static_cast<std::size_t>(q)] * vals(q);
        again.segment(o, n) = tab.basis.value.transpose() * fw;
      }
    }
  } else {
    throw std::invalid_argument("reprojection_defect: coefficient vector has the wrong length");
  }
  return (again - coeffs).cwiseAbs().maxCoeff();
}

double evaluate_scalar(const DGSpace& space, const VectorXd& coeffs, Index k, const Point& x) {
  VectorXd v, dx, dy;
  space.eval(k, x, v, dx, dy);
  return v.dot(coeffs.segment(space.offset(k), space.local_dim(k)));
}

Vec2 evaluate_gradient(const DGSpace& space, const VectorXd& coeffs, Index k, const Point& x) {
  VectorXd v, dx, dy;
  space.eval(k, x, v, dx, dy);
  const auto c = coeffs.segment(space.offset(k), space.local_dim(k));
  return {dx.dot(c), dy.dot(c)};
}

Vec2 evaluate_vector(const DGSpace& space, const VectorXd& coeffs, Index k, const Point& x) {
  VectorXd v, dx, dy;
  space.eval(k, x, v, dx, dy);
  const Index n = space.local_dim(k);
  return {v.dot(coeffs.segment(2 * space.offset(k), n)),
          v.dot(coeffs.segment(2 * space.offset(k) + n, n))};
}

double evaluate_divergence(const DGSpace& space, const VectorXd& coeffs, Index k, const Point& x) {
  VectorXd v, dx, dy;
  space.eval(k, x, v, dx, dy);
  const Index n = space.local_dim(k);
  return dx.dot(coeffs.segment(2 * space.offset(k), n)) +
         dy.dot(coeffs.segment(2 * space.offset(k) + n, n));
}

}  // namespace tpdg
