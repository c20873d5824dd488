#pragma once

#include "tpdg/assembly.hpp"

#include <functional>
#include <memory>

namespace tpdg {

enum class SolverKind { Direct, Iterative };

struct NewmarkConfig {
  double dt = 1e-3;
  double beta = 0.25;
  double gamma = 0.5;
  double final_time = 1.0;
  double solver_tolerance = 1e-10;  // iterative solver only
  SolverKind solver = SolverKind::Direct;

  /// Throws ValidationError when the parameters violate the scheme's constraints.
  void check() const;
  /// Number of steps to reach final_time; throws if dt does not divide it.
  Index num_steps() const;
};

struct SystemState {
  double t = 0.0;
  VectorXd X;  // [U; W; T]
  VectorXd Y;  // first time derivative
  VectorXd A;  // second time derivative
};

/// Sparse factorization (or preconditioned Krylov solver) behind one handle.
class LinearSolver {
 public:
  explicit LinearSolver(SolverKind kind = SolverKind::Direct, double tolerance = 1e-10);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  void factorize(const SparseMatrix& M);
  VectorXd solve(const VectorXd& b) const;
  SolverKind kind() const { return kind_; }

 private:
  struct Impl;
  SolverKind kind_;
  double tol_;
  std::unique_ptr<Impl> impl_;
};

/// Load vector at time t.
using LoadFunction = std::function<VectorXd(double)>;

/// Implicit Newmark integrator for A X'' + B X' + C X = F(t).
///
/// When the system has a first-order temperature row (A's temperature rows are
/// empty), the displacement rows are advanced by Newmark and the temperature by
/// Crank-Nicolson in one monolithic solve.
class NewmarkIntegrator {
 public:
  NewmarkIntegrator(const BlockSystem& system, const NewmarkConfig& config);

  const NewmarkConfig& config() const { return config_; }
  bool partitioned() const { return partitioned_; }
  /// A + gamma dt B + beta dt^2 C, or the coupled matrix of the partitioned scheme.
  const SparseMatrix& effective_matrix() const { return K_; }

  /// State with the given X, Y at time t and an acceleration consistent with F.
  SystemState initial_state(double t, const VectorXd& X, const VectorXd& Y, const VectorXd& F) const;

  /// Advances one step. F_next is the load at t + dt, F_now the load at t.
  SystemState step(const SystemState& s, const VectorXd& F_next, const VectorXd& F_now) const;

  /// Residual of A Acc + B Y + C X - F (displacement rows only in the partitioned case).
  VectorXd residual(const SystemState& s, const VectorXd& F) const;

 private:
  const BlockSystem* sys_;
  NewmarkConfig config_;
  bool partitioned_;
  Index n_uw_ = 0;
  SparseMatrix K_;
  LinearSolver solver_;
  // partitioned scheme only
  SparseMatrix Muw_, Buw_, Kuw_, G_, Cc_, MT_, AT_;
  LinearSolver mass_uw_;
  Eigen::DiagonalMatrix<double, Eigen::Dynamic> MT_inv_;
};

/// Displacement X solving (C + S) X = F - A acc - B Y + S X_guess, with S the
/// mass of the (u, w) rows and the temperature mass. With acc, Y and X_guess the
/// projections of exact data this is a shifted elliptic projection: the acceleration
/// recovered from F is then acc itself instead of an O(h^l / h^2) spurious layer.
VectorXd ritz_initial_displacement(const BlockSystem& sys, const VectorXd& F, const VectorXd& X_guess,
                                   const VectorXd& Y, const VectorXd& acc,
                                   SolverKind solver = SolverKind::Direct);

/// ½ Y'A Y + ½ X'C X for a system without temperature coupling in A's off-diagonal.
/// For the block system: kinetic energy of (u, w), elastic/storage energy, thermal energy.
double discrete_energy(const BlockSystem& sys, const SystemState& s);

struct StepReport {
  Index step;
  double t;
  double energy;
};

using ProgressHook = std::function<void(const StepReport&, const SystemState&)>;

/// Runs from the initial state to config.final_time. The hook (optional) sees every state,
/// including the initial one with step 0.
SystemState integrate(const NewmarkIntegrator& integrator, const BlockSystem& sys,
                      SystemState state, const LoadFunction& load, const ProgressHook& hook = {});

}  // namespace tpdg
