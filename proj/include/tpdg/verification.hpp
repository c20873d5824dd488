#pragma once

#include "tpdg/assembly.hpp"
#include "tpdg/manufactured.hpp"
#include "tpdg/timeint.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tpdg {

/// Exact field with its gradient (rows = components for vectors).
struct ExactVector {
  std::function<Vec2(const Point&)> value;
  std::function<Mat2(const Point&)> grad;
};
struct ExactScalar {
  std::function<double(const Point&)> value;
  std::function<Vec2(const Point&)> grad;
};

// dG norms computed from their definitions. With `exact` set they measure
// exact - discrete; otherwise the discrete field itself. order < 0: 2 max degree + 4.

/// ||sqrt(2 mu) eps_h(v)||^2 + ||sqrt(sigma) [[v]]||_F^2, square-rooted.
double dg_norm_e(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                 const PenaltyCoefficients& pen, const VectorXd& v,
                 const ExactVector* exact = nullptr, int order = -1);
/// Seminorm: (c0^-1 div_h z, div_h z) + ||sqrt(zeta) [[z]]||_F^2, square-rooted.
double dg_seminorm_p(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                     const PenaltyCoefficients& pen, const VectorXd& z,
                     const ExactVector* exact = nullptr, int order = -1);
/// ||sqrt(theta) grad_h S||^2 + ||sqrt(varrho) [[S]]||_F^2, square-rooted.
double dg_norm_T(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                 const PenaltyCoefficients& pen, const VectorXd& S,
                 const ExactScalar* exact = nullptr, int order = -1);

double l2_norm_vector(const DGSpace& space, const VectorXd& v, const ExactVector* exact = nullptr,
                      int order = -1);
double l2_norm_scalar(const DGSpace& space, const VectorXd& s, const ExactScalar* exact = nullptr,
                      int order = -1);

/// gamma per face: 10 max over the adjacent cells of k degree^2 / h.
std::vector<double> pressure_penalty(const DGSpace& space, const std::vector<MaterialRegion>& cells);

/// ||sqrt(k) grad_h p||^2 + ||sqrt(gamma) [[p]]||_F^2, square-rooted.
double dg_norm_pressure(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                        const std::vector<double>& gamma, const VectorXd& p,
                        const ExactScalar* exact = nullptr, int order = -1);

struct NormSet {
  double dg_e = 0.0;
  double dg_p = 0.0;
  double dg_T = 0.0;
  double dg_star = 0.0;  // (||v||_e^2 + |alpha v + z|_p^2 + B(z,z))^1/2
  double energy = 0.0;   // ||.||_E
};

/// Norms of a state X = [U; W; T] with rates Y.
NormSet dg_norms(const DGSpace& space, const std::vector<MaterialRegion>& cells, const Forms& forms,
                 const SystemState& s);

/// ||(v, z, S)||_E from definitions.
double energy_norm(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                   const Forms& forms, const SystemState& s);

/// Pressure coefficients in the scalar space:
/// p_h = p0 - (alpha div(u_h - u_h0) + div(w_h - w_h0) - b0 (T_h - T_h0)) / c0,
/// with p0 = -(alpha div u_h0 + div w_h0) / c0 unless given.
VectorXd pressure_postprocess(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                              const VectorXd& X, const VectorXd& X0,
                              const ScalarField* p0 = nullptr);

struct ErrorReport {
  double h = 0.0;
  int degree = 0;
  Index dofs = 0;
  double l2_u = 0.0, dg_u = 0.0;
  double l2_w = 0.0, dg_w = 0.0;
  double l2_T = 0.0, dg_T = 0.0;
  double l2_p = 0.0, dg_p = 0.0;
};

/// Errors of state s against the manufactured solution at time s.t.
ErrorReport manufactured_errors(const DGSpace& space, const Forms& forms, const ManufacturedCase& mc,
                                const SystemState& s, const VectorXd& X0);

struct ManufacturedRun {
  ErrorReport errors;
  Index steps = 0;
  std::vector<double> energy;  // discrete energy per step, initial state first
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// Assembles and integrates the manufactured case on one mesh up to cfg.final_time
/// (every cell gets mc.material). Initial velocities are L2 projections of the exact
/// rates; displacements come from ritz_initial_displacement so that the start is
/// free of the spurious acceleration layer.
ManufacturedRun solve_manufactured(const ManufacturedCase& mc, const PolyMesh& mesh, int degree,
                                   const NewmarkConfig& cfg, const PenaltyParameters& params = {},
                                   const AssemblyOptions& options = {});

inline constexpr int kErrorColumns = 8;
/// Error columns in table order: L2_u, dG_u, L2_w, dG_w, L2_T, dG_T, L2_p, dG_p.
std::array<double, kErrorColumns> error_columns(const ErrorReport& r);
const std::array<std::string, kErrorColumns>& error_column_names();

/// Rates between consecutive reports. With by_degree, the slope of log(error)
/// against the degree is returned instead. A zero error yields nullopt ("exact").
std::vector<std::array<std::optional<double>, kErrorColumns>> convergence_rates(
    const std::vector<ErrorReport>& reports, bool by_degree = false);

/// log(e0/e1)/log(h0/h1); nullopt if an error is zero.
std::optional<double> observed_rate(double e0, double e1, double h0, double h1);

struct EnergyVerdict {
  bool monotone = true;
  double worst_relative_increase = 0.0;
  Index worst_step = -1;
};

/// PASS if E[k+1] <= E[k] (1 + tol) for all k.
EnergyVerdict check_energy_trace(const std::vector<double>& energy, double tol = 1e-8);

}  // namespace tpdg
