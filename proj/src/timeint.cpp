#include "tpdg/timeint.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <cmath>

namespace tpdg {

void NewmarkConfig::check() const {
  if (!(dt > 0.0)) throw ValidationError("newmark: dt must be positive");
  if (!(beta >= 0.0 && 2.0 * beta <= 1.0)) throw ValidationError("newmark: need 0 <= 2 beta <= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("newmark: need 0 <= gamma <= 1");
  if (!(final_time >= 0.0)) throw ValidationError("newmark: final time must be non-negative");
}

Index NewmarkConfig::num_steps() const {
  const double r = final_time / dt;
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-9 * std::max(1.0, n))
    throw ValidationError("newmark: dt does not divide the final time");
  return static_cast<Index>(n);
}

struct LinearSolver::Impl {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> krylov;
  SparseMatrix matrix;
};

LinearSolver::LinearSolver(SolverKind kind, double tolerance)
    : kind_(kind), tol_(tolerance), impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::factorize(const SparseMatrix& M) {
  impl_->matrix = M;
  impl_->matrix.makeCompressed();
  if (kind_ == SolverKind::Direct) {
    impl_->lu.analyzePattern(impl_->matrix);
    impl_->lu.factorize(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success)
      throw SolverError("linear solver: factorization failed (" + impl_->lu.lastErrorMessage() + ")");
  } else {
    impl_->krylov.setTolerance(tol_);
    impl_->krylov.setMaxIterations(std::max<Index>(1000, 10 * M.rows()));
    impl_->krylov.preconditioner().setDroptol(1e-6);
    impl_->krylov.preconditioner().setFillfactor(20);
    impl_->krylov.compute(impl_->matrix);
    if (impl_->krylov.info() != Eigen::Success)
      throw SolverError("linear solver: preconditioner setup failed");
  }
}

VectorXd LinearSolver::solve(const VectorXd& b) const {
  if (kind_ == SolverKind::Direct) {
    VectorXd x = impl_->lu.solve(b);
    if (impl_->lu.info() != Eigen::Success) throw SolverError("linear solver: solve failed");
    return x;
  }
  VectorXd x = impl_->krylov.solve(b);
  if (impl_->krylov.info() != Eigen::Success)
    throw SolverError("linear solver: iterative solve did not converge (error " +
                      std::to_string(impl_->krylov.error()) + ")");
  return x;
}

namespace {

SparseMatrix sub(const SparseMatrix& M, Index r, Index c, Index nr, Index nc) {
  return SparseMatrix(M.block(r, c, nr, nc));
}

SparseMatrix stack(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c,
                   const SparseMatrix& d) {
  const Index n1 = a.rows(), n2 = d.rows();
  std::vector<Triplet> t;
  auto put = [&](const SparseMatrix& M, Index r0, Index c0) {
    for (Index j = 0; j < M.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(M, j); it; ++it)
        t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
  };
  put(a, 0, 0);
  put(b, 0, n1);
  put(c, n1, 0);
  put(d, n1, n1);
  SparseMatrix M(n1 + n2, n1 + n2);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  return M;
}

}  // namespace

NewmarkIntegrator::NewmarkIntegrator(const BlockSystem& system, const NewmarkConfig& config)
    : sys_(&system),
      config_(config),
      partitioned_(system.first_order_temperature),
      solver_(config.solver, config.solver_tolerance),
      mass_uw_(config.solver, config.solver_tolerance) {
  config_.check();
  const double dt = config_.dt;
  const double b = config_.beta;
  const double g = config_.gamma;
  if (!partitioned_) {
    K_ = SparseMatrix(system.A + (g * dt) * system.B + (b * dt * dt) * system.C);
    solver_.factorize(K_);
    mass_uw_.factorize(system.A);
    return;
  }
  n_uw_ = system.n_u + system.n_w;
  const Index nT = system.n_T;
  Muw_ = sub(system.A, 0, 0, n_uw_, n_uw_);
  Buw_ = sub(system.B, 0, 0, n_uw_, n_uw_);
  Kuw_ = sub(system.C, 0, 0, n_uw_, n_uw_);
  G_ = sub(system.C, 0, n_uw_, n_uw_, nT);
  Cc_ = sub(system.B, n_uw_, 0, nT, n_uw_);
  MT_ = sub(system.B, n_uw_, n_uw_, nT, nT);
  AT_ = sub(system.C, n_uw_, n_uw_, nT, nT);
  const SparseMatrix K11 = Muw_ + (g * dt) * Buw_ + (b * dt * dt) * Kuw_;
  const SparseMatrix K21 = (0.5 * g * dt * dt) * Cc_;
  const SparseMatrix K22 = MT_ + (0.5 * dt) * AT_;
  K_ = stack(K11, G_, K21, K22);
  solver_.factorize(K_);
  mass_uw_.factorize(Muw_);
  MT_inv_ = Eigen::DiagonalMatrix<double, Eigen::Dynamic>(nT);
  VectorXd d = MT_.diagonal();
  for (Index j = 0; j < MT_.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(MT_, j); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0)
        throw ValidationError("newmark: temperature mass must be diagonal for the partitioned scheme");
  MT_inv_.diagonal() = d.cwiseInverse();
}

SystemState NewmarkIntegrator::initial_state(double t, const VectorXd& X, const VectorXd& Y,
                                             const VectorXd& F) const {
  const BlockSystem& S = *sys_;
  SystemState s{t, X, Y, VectorXd::Zero(X.size())};
  if (!partitioned_) {
    s.A = mass_uw_.solve(F - S.B * Y - S.C * X);
    return s;
  }
  const Index nT = S.n_T;
  const VectorXd r = F.head(n_uw_) - Buw_ * Y.head(n_uw_) - Kuw_ * X.head(n_uw_) - G_ * X.tail(nT);
  s.A.head(n_uw_) = mass_uw_.solve(r);
  s.Y.tail(nT) = MT_inv_ * (F.tail(nT) - Cc_ * Y.head(n_uw_) - AT_ * X.tail(nT));
  return s;
}

SystemState NewmarkIntegrator::step(const SystemState& s, const VectorXd& F_next,
                                    const VectorXd& F_now) const {
  const BlockSystem& S = *sys_;
  const double dt = config_.dt;
  const double b = config_.beta;
  const double g = config_.gamma;
  SystemState out;
  out.t = s.t + dt;
  if (!partitioned_) {
    const VectorXd Xp = s.X + dt * s.Y + ((0.5 - b) * dt * dt) * s.A;
    const VectorXd Yp = s.Y + ((1.0 - g) * dt) * s.A;
    out.A = solver_.solve(F_next - S.B * Yp - S.C * Xp);
    out.X = Xp + (b * dt * dt) * out.A;
    out.Y = Yp + (g * dt) * out.A;
    return out;
  }
  const Index nT = S.n_T;
  const auto Xu = s.X.head(n_uw_);
  const auto Yu = s.Y.head(n_uw_);
  const auto Au = s.A.head(n_uw_);
  const VectorXd T = s.X.tail(nT);
  const VectorXd Xp = Xu + dt * Yu + ((0.5 - b) * dt * dt) * Au;
  const VectorXd Yp = Yu + ((1.0 - g) * dt) * Au;

  VectorXd rhs(n_uw_ + nT);
  rhs.head(n_uw_) = F_next.head(n_uw_) - Buw_ * Yp - Kuw_ * Xp;
  rhs.tail(nT) = (0.5 * dt) * (F_next.tail(nT) + F_now.tail(nT)) + MT_ * T -
                 (0.5 * dt) * (AT_ * T) - (0.5 * dt) * (Cc_ * (Yp + Yu));
  const VectorXd sol = solver_.solve(rhs);

  out.X.resize(s.X.size());
  out.Y.resize(s.Y.size());
  out.A.resize(s.A.size());
  out.A.head(n_uw_) = sol.head(n_uw_);
  out.X.head(n_uw_) = Xp + (b * dt * dt) * sol.head(n_uw_);
  out.Y.head(n_uw_) = Yp + (g * dt) * sol.head(n_uw_);
  out.X.tail(nT) = sol.tail(nT);
  out.Y.tail(nT) =
      MT_inv_ * (F_next.tail(nT) - Cc_ * out.Y.head(n_uw_) - AT_ * out.X.tail(nT));
  out.A.tail(nT) = (out.Y.tail(nT) - s.Y.tail(nT)) / dt;
  return out;
}

VectorXd NewmarkIntegrator::residual(const SystemState& s, const VectorXd& F) const {
  const BlockSystem& S = *sys_;
  VectorXd r = S.A * s.A + S.B * s.Y + S.C * s.X - F;
  if (partitioned_) r.tail(S.n_T).setZero();
  return r;
}

VectorXd ritz_initial_displacement(const BlockSystem& sys, const VectorXd& F, const VectorXd& X_guess,
                                   const VectorXd& Y, const VectorXd& acc, SolverKind solver) {
  const Index n = sys.n_u + sys.n_w;
  std::vector<Triplet> t;
  for (Index j = 0; j < sys.A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(sys.A, j); it; ++it)
      if (it.row() < n && it.col() < n) t.emplace_back(it.row(), it.col(), it.value());
  for (Index j = 0; j < sys.B.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(sys.B, j); it; ++it)
      if (it.row() >= n && it.col() >= n) t.emplace_back(it.row(), it.col(), it.value());
  SparseMatrix S(sys.size(), sys.size());
  S.setFromTriplets(t.begin(), t.end());
  LinearSolver ls(solver);
  ls.factorize(SparseMatrix(sys.C + S));
  return ls.solve(F - sys.A * acc - sys.B * Y + S * X_guess);
}

double discrete_energy(const BlockSystem& S, const SystemState& s) {
  const Index n = S.n_u + S.n_w;
  const auto Y = s.Y.head(n);
  const auto X = s.X.head(n);
  double e = 0.5 * Y.dot(sub(S.A, 0, 0, n, n) * Y) + 0.5 * X.dot(sub(S.C, 0, 0, n, n) * X);
  if (S.n_T > 0) {
    const auto T = s.X.tail(S.n_T);
    e += 0.5 * T.dot(sub(S.B, n, n, S.n_T, S.n_T) * T);
  }
  return e;
}

SystemState integrate(const NewmarkIntegrator& integrator, const BlockSystem& sys,
                      SystemState state, const LoadFunction& load, const ProgressHook& hook) {
  const auto& cfg = integrator.config();
  const Index steps = cfg.num_steps();
  const double t0 = state.t;
  VectorXd F_now = load(state.t);
  if (hook) hook({0, state.t, discrete_energy(sys, state)}, state);
  for (Index k = 1; k <= steps; ++k) {
    const double t = t0 + static_cast<double>(k) * cfg.dt;
    VectorXd F_next = load(t);
    state = integrator.step(state, F_next, F_now);
    state.t = t;
    if (!state.X.allFinite() || !state.Y.allFinite())
      throw SolverError("time loop: non-finite state at step " + std::to_string(k));
    if (hook) hook({k, t, discrete_energy(sys, state)}, state);
    F_now = std::move(F_next);
  }
  return state;
}

}  // namespace tpdg
