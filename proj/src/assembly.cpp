#include "tpdg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace tpdg {

namespace {

struct TripletSet {
  std::vector<Triplet> Ae, Ap, AT, Cu, Cw;
};

void add_block(std::vector<Triplet>& out, Index row0, Index col0, const MatrixXd& M) {
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i)
      if (M(i, j) != 0.0) out.emplace_back(row0 + i, col0 + j, M(i, j));
}

// Runs fn(begin, end, chunk) over contiguous chunks; results are merged by chunk index
// so the outcome does not depend on the worker count.
template <class Fn>
void for_chunks(Index n, int workers, Fn&& fn) {
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(std::max<Index>(n, 1))));
  if (w == 1) {
    fn(Index{0}, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  for (int c = 0; c < w; ++c) {
    const Index b = n * c / w;
    const Index e = n * (c + 1) / w;
    pool.emplace_back([&fn, b, e, c] { fn(b, e, c); });
  }
  for (auto& t : pool) t.join();
}

SparseMatrix from_chunks(Index rows, Index cols, const std::vector<TripletSet>& chunks,
                         std::vector<Triplet> TripletSet::*member) {
  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto& c : chunks) total += (c.*member).size();
  all.reserve(total);
  for (const auto& c : chunks) all.insert(all.end(), (c.*member).begin(), (c.*member).end());
  SparseMatrix M(rows, cols);
  M.setFromTriplets(all.begin(), all.end());
  M.makeCompressed();
  return M;
}

SparseMatrix diagonal(const VectorXd& d) {
  SparseMatrix M(d.size(), d.size());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(d.size()));
  for (Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d(i));
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

double kind_coefficient(const MaterialRegion& m, PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Sigma: return m.mu;
    case PenaltyKind::Xi: return m.lambda;
    case PenaltyKind::Zeta: return 1.0 / m.c0;
    case PenaltyKind::Rho: return m.theta;
  }
  return 0.0;
}

double kind_alpha(const PenaltyParameters& p, PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Sigma: return p.alpha1;
    case PenaltyKind::Xi: return p.alpha2;
    case PenaltyKind::Zeta: return p.alpha3;
    case PenaltyKind::Rho: return p.alpha4;
  }
  return 0.0;
}

struct Side {
  Index cell;
  double sign;
  const BasisTable* tab;
  MatrixXd Dn;
};

void cell_kernel(const DGSpace& space, const std::vector<MaterialRegion>& cells, Index k,
                 int order, TripletSet& out) {
  const auto tab = tabulate_cell(space, k, order);
  const auto& m = cells[static_cast<std::size_t>(k)];
  const Eigen::Map<const VectorXd> w(tab.rule.weights.data(),
                                     static_cast<Index>(tab.rule.weights.size()));
  const MatrixXd& P = tab.basis.value;
  const MatrixXd* D[2] = {&tab.basis.dx, &tab.basis.dy};
  const MatrixXd WP = w.asDiagonal() * P;
  MatrixXd WD[2] = {w.asDiagonal() * *D[0], w.asDiagonal() * *D[1]};
  MatrixXd G[2][2];  // G[a][b] = D_a^T W D_b
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) G[a][b] = D[a]->transpose() * WD[b];
  const MatrixXd lap = G[0][0] + G[1][1];

  const Index n = space.local_dim(k);
  const Index sv = 2 * space.offset(k);
  const Index ss = space.offset(k);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      MatrixXd e = m.mu * G[b][a] + m.lambda * G[a][b];
      if (a == b) e += m.mu * lap;
      add_block(out.Ae, sv + a * n, sv + b * n, e);
      add_block(out.Ap, sv + a * n, sv + b * n, G[a][b] / m.c0);
    }
  add_block(out.AT, ss, ss, m.theta * lap);
  for (int b = 0; b < 2; ++b) {
    const MatrixXd PD = WP.transpose() * *D[b];
    add_block(out.Cu, ss, sv + b * n, m.coupling_u() * PD);
    add_block(out.Cw, ss, sv + b * n, m.coupling_w() * PD);
  }
}

void face_kernel(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                 const PenaltyCoefficients& pen, Index f, int order, TripletSet& out) {
  const Face& face = space.mesh().face(f);
  const auto tab = tabulate_face(space, f, order);
  const Eigen::Map<const VectorXd> w(tab.rule.weights.data(),
                                     static_cast<Index>(tab.rule.weights.size()));
  const Vec2 nrm = face.normal;
  const double omega = face.is_boundary() ? 1.0 : 0.5;
  const auto fs = static_cast<std::size_t>(f);

  std::vector<Side> sides;
  sides.push_back({face.owner, 1.0, &tab.owner, nrm.x() * tab.owner.dx + nrm.y() * tab.owner.dy});
  if (!face.is_boundary())
    sides.push_back(
        {face.neighbor, -1.0, &tab.neighbor, nrm.x() * tab.neighbor.dx + nrm.y() * tab.neighbor.dy});

  for (const Side& s : sides) {
    const auto& ms = cells[static_cast<std::size_t>(s.cell)];
    const MatrixXd WPs = w.asDiagonal() * s.tab->value;
    const MatrixXd* Ds[2] = {&s.tab->dx, &s.tab->dy};
    const Index ns = space.local_dim(s.cell);
    for (const Side& t : sides) {
      const auto& mt = cells[static_cast<std::size_t>(t.cell)];
      const MatrixXd* Dt[2] = {&t.tab->dx, &t.tab->dy};
      const Index nt = space.local_dim(t.cell);
      const double ss = s.sign * t.sign;

      const MatrixXd Mst = WPs.transpose() * t.tab->value;
      const MatrixXd PDn = WPs.transpose() * t.Dn;        // phi_s, d_n phi_t
      const MatrixXd DnP = s.Dn.transpose() * w.asDiagonal() * t.tab->value;
      MatrixXd PD[2], DP[2];
      for (int a = 0; a < 2; ++a) {
        PD[a] = WPs.transpose() * *Dt[a];                  // phi_s, d_a phi_t
        DP[a] = Ds[a]->transpose() * w.asDiagonal() * t.tab->value;  // d_a phi_s, phi_t
      }

      const Index rv = 2 * space.offset(s.cell);
      const Index cv = 2 * space.offset(t.cell);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          MatrixXd e = -omega * mt.mu * s.sign * nrm(b) * PD[a] -
                       omega * ms.mu * t.sign * nrm(a) * DP[b];
          if (a == b)
            e += -omega * mt.mu * s.sign * PDn - omega * ms.mu * t.sign * DnP +
                 pen.sigma[fs] * ss * Mst;
          e += -omega * mt.lambda * s.sign * nrm(a) * PD[b] -
               omega * ms.lambda * t.sign * nrm(b) * DP[a] +
               pen.xi[fs] * ss * nrm(a) * nrm(b) * Mst;
          add_block(out.Ae, rv + a * ns, cv + b * nt, e);

          const MatrixXd p = -omega / mt.c0 * s.sign * nrm(a) * PD[b] -
                             omega / ms.c0 * t.sign * nrm(b) * DP[a] +
                             pen.zeta[fs] * ss * nrm(a) * nrm(b) * Mst;
          add_block(out.Ap, rv + a * ns, cv + b * nt, p);
        }

      const Index rs = space.offset(s.cell);
      const Index cs = space.offset(t.cell);
      add_block(out.AT, rs, cs,
                -omega * mt.theta * s.sign * PDn - omega * ms.theta * t.sign * DnP +
                    pen.rho[fs] * ss * Mst);
      for (int b = 0; b < 2; ++b) {
        add_block(out.Cu, rs, cv + b * nt, -omega * ms.coupling_u() * t.sign * nrm(b) * Mst);
        add_block(out.Cw, rs, cv + b * nt, -omega * ms.coupling_w() * t.sign * nrm(b) * Mst);
      }
    }
  }
}

int default_load_order(const DGSpace& space, int order) {
  return order < 0 ? 2 * space.max_degree() + 4 : order;
}

}  // namespace

double penalty_value(double alpha, const std::vector<PenaltySide>& sides) {
  double v = 0.0;
  for (const auto& s : sides) {
    if (!(s.coefficient > 0.0)) throw ValidationError("penalty: non-positive coefficient");
    if (!(s.diameter > 0.0)) throw ValidationError("penalty: non-positive element diameter");
    v = std::max(v, s.coefficient * s.degree * s.degree / s.diameter);
  }
  return alpha * v;
}

double penalty_on_face(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                       const PenaltyParameters& params, Index f, PenaltyKind kind) {
  const Face& face = space.mesh().face(f);
  std::vector<PenaltySide> sides;
  for (Index k : {face.owner, face.neighbor}) {
    if (k == kBoundary) continue;
    sides.push_back({kind_coefficient(cells[static_cast<std::size_t>(k)], kind), space.degree(k),
                     space.mesh().geometry(k).diameter});
  }
  return penalty_value(kind_alpha(params, kind), sides);
}

PenaltyCoefficients compute_penalties(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                                      const PenaltyParameters& params) {
  PenaltyCoefficients p;
  p.params = params;
  const auto nf = static_cast<std::size_t>(space.mesh().num_faces());
  p.sigma.resize(nf);
  p.xi.resize(nf);
  p.zeta.resize(nf);
  p.rho.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto fi = static_cast<Index>(f);
    p.sigma[f] = penalty_on_face(space, cells, params, fi, PenaltyKind::Sigma);
    p.xi[f] = penalty_on_face(space, cells, params, fi, PenaltyKind::Xi);
    p.zeta[f] = penalty_on_face(space, cells, params, fi, PenaltyKind::Zeta);
    p.rho[f] = penalty_on_face(space, cells, params, fi, PenaltyKind::Rho);
  }
  return p;
}

Forms assemble_forms(const DGSpace& space, const MaterialMap& materials,
                     const PenaltyParameters& params, const AssemblyOptions& options) {
  const PolyMesh& mesh = space.mesh();
  const auto cells = materials.per_cell(mesh);
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    const auto rep = validate(cells[static_cast<std::size_t>(k)]);
    if (!rep.ok())
      throw ValidationError("materials of region " + std::to_string(mesh.region(k)) + ": " +
                            rep.errors.front());
  }
  const int vol_order = options.volume_order < 0 ? 2 * space.max_degree() : options.volume_order;
  const int face_order = options.face_order < 0 ? 2 * space.max_degree() + 1 : options.face_order;

  Forms F;
  const Index N = space.num_dofs();
  F.n_scalar = N;
  F.penalties = compute_penalties(space, cells, params);

  const int workers = std::max(1, options.workers);
  std::vector<TripletSet> cell_chunks(static_cast<std::size_t>(workers));
  std::vector<TripletSet> face_chunks(static_cast<std::size_t>(workers));
  for_chunks(mesh.num_cells(), workers, [&](Index b, Index e, int c) {
    for (Index k = b; k < e; ++k)
      cell_kernel(space, cells, k, vol_order, cell_chunks[static_cast<std::size_t>(c)]);
  });
  for_chunks(mesh.num_faces(), workers, [&](Index b, Index e, int c) {
    for (Index f = b; f < e; ++f)
      face_kernel(space, cells, F.penalties, f, face_order, face_chunks[static_cast<std::size_t>(c)]);
  });
  std::vector<TripletSet> chunks = std::move(cell_chunks);
  chunks.insert(chunks.end(), face_chunks.begin(), face_chunks.end());

  F.Ae = from_chunks(2 * N, 2 * N, chunks, &TripletSet::Ae);
  F.Ap = from_chunks(2 * N, 2 * N, chunks, &TripletSet::Ap);
  F.AT = from_chunks(N, N, chunks, &TripletSet::AT);
  F.Cu = from_chunks(N, 2 * N, chunks, &TripletSet::Cu);
  F.Cw = from_chunks(N, 2 * N, chunks, &TripletSet::Cw);

  // orthonormal basis: weighted masses are diagonal
  VectorXd rho(2 * N), rhof(2 * N), rhow(2 * N), kinv(2 * N), cap(N);
  F.alpha.resize(2 * N);
  F.tau.resize(N);
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    const auto& m = cells[static_cast<std::size_t>(k)];
    const Index n = space.local_dim(k);
    const Index o = space.offset(k);
    rho.segment(2 * o, 2 * n).setConstant(m.rho());
    rhof.segment(2 * o, 2 * n).setConstant(m.rho_f);
    rhow.segment(2 * o, 2 * n).setConstant(m.rho_w());
    kinv.segment(2 * o, 2 * n).setConstant(1.0 / m.k);
    F.alpha.segment(2 * o, 2 * n).setConstant(m.alpha);
    cap.segment(o, n).setConstant(m.reduced_capacity());
    F.tau.segment(o, n).setConstant(m.tau);
  }
  F.Mrho = diagonal(rho);
  F.Mrhof = diagonal(rhof);
  F.Mrhow = diagonal(rhow);
  F.B = diagonal(kinv);
  F.MT = diagonal(cap);
  return F;
}

namespace {

void place(std::vector<Triplet>& out, const SparseMatrix& M, Index r0, Index c0) {
  for (Index j = 0; j < M.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(M, j); it; ++it)
      out.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
}

}  // namespace

BlockSystem build_block_system(const Forms& forms) {
  const Index N = forms.n_scalar;
  if (forms.Ae.rows() != 2 * N || forms.Ap.rows() != 2 * N || forms.AT.rows() != N ||
      forms.Cu.rows() != N || forms.Cu.cols() != 2 * N || forms.Cw.cols() != 2 * N ||
      forms.MT.rows() != N || forms.alpha.size() != 2 * N || forms.tau.size() != N)
    throw ValidationError("block system: inconsistent dof layouts");

  BlockSystem S;
  S.n_u = S.n_w = 2 * N;
  S.n_T = N;
  const bool any_zero = (forms.tau.array() == 0.0).any();
  const bool any_pos = (forms.tau.array() > 0.0).any();
  if (any_zero && any_pos)
    throw ValidationError("block system: relaxation time must be zero everywhere or nowhere");
  S.first_order_temperature = N > 0 && !any_pos;

  const SparseMatrix Da = diagonal(forms.alpha);
  const SparseMatrix Dt = diagonal(forms.tau);
  const Index ow = S.offset_w();
  const Index oT = S.offset_T();
  const Index n = S.size();

  std::vector<Triplet> a, b, c;
  place(a, forms.Mrho, 0, 0);
  place(a, forms.Mrhof, 0, ow);
  place(a, forms.Mrhof, ow, 0);
  place(a, forms.Mrhow, ow, ow);
  if (!S.first_order_temperature) {
    place(a, SparseMatrix(Dt * forms.Cu), oT, 0);
    place(a, SparseMatrix(Dt * forms.Cw), oT, ow);
    place(a, SparseMatrix(Dt * forms.MT), oT, oT);
  }

  place(b, forms.B, ow, ow);
  place(b, forms.Cu, oT, 0);
  place(b, forms.Cw, oT, ow);
  place(b, forms.MT, oT, oT);

  const SparseMatrix ApDa = forms.Ap * Da;
  place(c, forms.Ae, 0, 0);
  place(c, SparseMatrix(Da * ApDa), 0, 0);
  place(c, SparseMatrix(Da * forms.Ap), 0, ow);
  place(c, ApDa, ow, 0);
  place(c, forms.Ap, ow, ow);
  place(c, SparseMatrix(-SparseMatrix(forms.Cu.transpose())), 0, oT);
  place(c, SparseMatrix(-SparseMatrix(forms.Cw.transpose())), ow, oT);
  place(c, forms.AT, oT, oT);

  S.A.resize(n, n);
  S.B.resize(n, n);
  S.C.resize(n, n);
  S.A.setFromTriplets(a.begin(), a.end());
  S.B.setFromTriplets(b.begin(), b.end());
  S.C.setFromTriplets(c.begin(), c.end());
  S.A.makeCompressed();
  S.B.makeCompressed();
  S.C.makeCompressed();
  return S;
}

VectorXd assemble_volume_load(const DGSpace& space, const VectorField* f, const VectorField* g,
                              const ScalarField* H, int order) {
  const Index N = space.num_dofs();
  VectorXd out = VectorXd::Zero(5 * N);
  if (!f && !g && !H) return out;
  const int q = default_load_order(space, order);
  for (Index k = 0; k < space.mesh().num_cells(); ++k) {
    const auto tab = tabulate_cell(space, k, q);
    const Index nq = static_cast<Index>(tab.rule.size());
    const Index n = space.local_dim(k);
    const Index o = space.offset(k);
    MatrixXd vals(nq, 5);
    vals.setZero();
    for (Index i = 0; i < nq; ++i) {
      const auto is = static_cast<std::size_t>(i);
      const Point& x = tab.rule.points[is];
      if (f) vals.block(i, 0, 1, 2) = (*f)(x).transpose();
      if (g) vals.block(i, 2, 1, 2) = (*g)(x).transpose();
      if (H) vals(i, 4) = (*H)(x);
      vals.row(i) *= tab.rule.weights[is];
    }
    const MatrixXd c = tab.basis.value.transpose() * vals;
    out.segment(2 * o, n) += c.col(0);
    out.segment(2 * o + n, n) += c.col(1);
    out.segment(2 * N + 2 * o, n) += c.col(2);
    out.segment(2 * N + 2 * o + n, n) += c.col(3);
    out.segment(4 * N + o, n) += c.col(4);
  }
  return out;
}

VectorXd assemble_dirichlet_lift(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                                 const PenaltyCoefficients& pen, const VectorField& gu,
                                 const VectorField& gw, const ScalarField& gT, int order) {
  const Index N = space.num_dofs();
  VectorXd out = VectorXd::Zero(5 * N);
  const int q = default_load_order(space, order);
  const PolyMesh& mesh = space.mesh();
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_boundary()) continue;
    const auto fs = static_cast<std::size_t>(f);
    const Index k = face.owner;
    const auto& m = cells[static_cast<std::size_t>(k)];
    const auto tab = tabulate_face(space, f, q);
    const Vec2 nv = face.normal;
    const Index n = space.local_dim(k);
    const Index o = space.offset(k);
    for (std::size_t p = 0; p < tab.rule.size(); ++p) {
      const double w = tab.rule.weights[p];
      const Point& x = tab.rule.points[p];
      const auto ip = static_cast<Index>(p);
      const VectorXd phi = tab.owner.value.row(ip).transpose();
      const VectorXd dx = tab.owner.dx.row(ip).transpose();
      const VectorXd dy = tab.owner.dy.row(ip).transpose();
      const VectorXd dn = nv.x() * dx + nv.y() * dy;
      const VectorXd* d[2] = {&dx, &dy};

      const Vec2 u = gu(x);
      const Vec2 h = m.alpha * u + gw(x);
      const double un = u.dot(nv);
      const double hn = h.dot(nv);
      const double T = gT(x);
      for (int a = 0; a < 2; ++a) {
        const VectorXd e = -m.mu * (u(a) * dn + (u.x() * dx + u.y() * dy) * nv(a)) +
                           pen.sigma[fs] * u(a) * phi - m.lambda * un * *d[a] +
                           pen.xi[fs] * un * nv(a) * phi;
        const VectorXd p_ = -hn / m.c0 * *d[a] + pen.zeta[fs] * hn * nv(a) * phi;
        out.segment(2 * o + a * n, n) += w * (e + m.alpha * p_);
        out.segment(2 * N + 2 * o + a * n, n) += w * p_;
      }
      out.segment(4 * N + o, n) += w * (-T * m.theta * dn + pen.rho[fs] * T * phi);
    }
  }
  return out;
}

VectorXd assemble_coupling_lift(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                                const VectorField& gu, const VectorField& gw, int order) {
  const Index N = space.num_dofs();
  VectorXd out = VectorXd::Zero(5 * N);
  const int q = default_load_order(space, order);
  const PolyMesh& mesh = space.mesh();
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_boundary()) continue;
    const Index k = face.owner;
    const auto& m = cells[static_cast<std::size_t>(k)];
    const auto tab = tabulate_face(space, f, q);
    const Index n = space.local_dim(k);
    const Index o = space.offset(k);
    for (std::size_t p = 0; p < tab.rule.size(); ++p) {
      const Point& x = tab.rule.points[p];
      const double s = m.coupling_u() * gu(x).dot(face.normal) + m.coupling_w() * gw(x).dot(face.normal);
      out.segment(4 * N + o, n) -=
          tab.rule.weights[p] * s * tab.owner.value.row(static_cast<Index>(p)).transpose();
    }
  }
  return out;
}

double symmetry_defect(const SparseMatrix& X) {
  const SparseMatrix D = X - SparseMatrix(X.transpose());
  double dmax = 0.0, xmax = 0.0;
  for (Index j = 0; j < D.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(D, j); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
  for (Index j = 0; j < X.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(X, j); it; ++it) xmax = std::max(xmax, std::abs(it.value()));
  return xmax > 0.0 ? dmax / xmax : 0.0;
}

}  // namespace tpdg
