#pragma once

#include "tpdg/materials.hpp"
#include "tpdg/space.hpp"

#include <vector>

namespace tpdg {

struct PenaltyParameters {
  double alpha1 = 10.0;  // elastic shear, sigma
  double alpha2 = 10.0;  // elastic divergence, xi
  double alpha3 = 10.0;  // storage, zeta
  double alpha4 = 10.0;  // heat conduction, varrho
};

enum class PenaltyKind { Sigma, Xi, Zeta, Rho };

/// One side of a face as seen by the penalty formula.
struct PenaltySide {
  double coefficient;  // mu, lambda, 1/c0 or theta
  int degree;
  double diameter;
};

/// alpha * max over sides of coefficient * degree^2 / diameter.
double penalty_value(double alpha, const std::vector<PenaltySide>& sides);

double penalty_on_face(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                       const PenaltyParameters& params, Index face, PenaltyKind kind);

struct PenaltyCoefficients {
  PenaltyParameters params;
  std::vector<double> sigma, xi, zeta, rho;  // per face
};

PenaltyCoefficients compute_penalties(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                                      const PenaltyParameters& params);

struct AssemblyOptions {
  int workers = 1;
  int volume_order = -1;  // < 0: 2 * max degree
  int face_order = -1;    // < 0: 2 * max degree + 1
};

/// Discrete bilinear forms on a fixed space. Vector blocks use the layout of vector_dof.
struct Forms {
  Index n_scalar = 0;   // N
  SparseMatrix Ae;      // 2N x 2N, elasticity
  SparseMatrix Ap;      // 2N x 2N, storage (1/c0) divergence form
  SparseMatrix AT;      // N x N, heat conduction
  SparseMatrix Cu;      // N x 2N, coupling with solid displacement
  SparseMatrix Cw;      // N x 2N, coupling with filtration displacement
  SparseMatrix Mrho;    // 2N, weighted by rho
  SparseMatrix Mrhof;   // 2N, weighted by rho_f
  SparseMatrix Mrhow;   // 2N, weighted by rho_w
  SparseMatrix B;       // 2N, weighted by 1/k
  SparseMatrix MT;      // N, weighted by a0 - b0^2/c0
  VectorXd alpha;       // Biot-Willis coefficient per vector dof (2N)
  VectorXd tau;         // relaxation time per scalar dof (N)
  PenaltyCoefficients penalties;
};

Forms assemble_forms(const DGSpace& space, const MaterialMap& materials,
                     const PenaltyParameters& params = {}, const AssemblyOptions& options = {});

/// Second-order system  A X'' + B X' + C X = F  on X = [U; W; T].
struct BlockSystem {
  Index n_u = 0;
  Index n_w = 0;
  Index n_T = 0;
  SparseMatrix A;
  SparseMatrix B;
  SparseMatrix C;
  /// every region has tau == 0: the temperature row of A vanishes
  bool first_order_temperature = false;

  Index size() const { return n_u + n_w + n_T; }
  Index offset_w() const { return n_u; }
  Index offset_T() const { return n_u + n_w; }
};

/// Throws ValidationError if tau is zero in some regions and positive in others.
BlockSystem build_block_system(const Forms& forms);

// Right-hand side contributions. All return vectors of length 5N ([F; G; H]).

/// L2 pairings of volume sources; null callables contribute nothing.
VectorXd assemble_volume_load(const DGSpace& space, const VectorField* f, const VectorField* g,
                              const ScalarField* H, int order = -1);

/// Boundary-face terms carrying non-homogeneous Dirichlet data for u, w and T
/// through the consistency and penalty terms of the stiffness forms.
VectorXd assemble_dirichlet_lift(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                                 const PenaltyCoefficients& pen, const VectorField& gu,
                                 const VectorField& gw, const ScalarField& gT, int order = -1);

/// Boundary terms of the coupling form for Dirichlet data of the rates (u', w'), temperature rows only.
VectorXd assemble_coupling_lift(const DGSpace& space, const std::vector<MaterialRegion>& cells,
                                const VectorField& gu, const VectorField& gw, int order = -1);

/// max |X - X^T| / max |X|
double symmetry_defect(const SparseMatrix& X);

}  // namespace tpdg
