#pragma once

#include "tpdg/config.hpp"
#include "tpdg/verification.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tpdg {

/// Discrete fields at one point, taken from the lowest-index cell containing it.
struct FieldSample {
  Vec2 u = Vec2::Zero();
  Vec2 w = Vec2::Zero();
  double T = 0.0;
  Vec2 v = Vec2::Zero();  // u'
  Vec2 q = Vec2::Zero();  // w'
};

/// Throws ValidationError for a point outside the mesh.
std::vector<FieldSample> sample_field(const DGSpace& space, const CellLocator& locator,
                                      const SystemState& state, const std::vector<Point>& points);

struct ReceiverTrace {
  std::string name;
  Point location = Point::Zero();
  std::vector<double> t, vmag, vx, vy, qy, T;  // vx is kept in memory only
};

struct ConvergenceResult {
  std::vector<ErrorReport> reports;
  std::vector<std::array<std::optional<double>, kErrorColumns>> rates;
  bool by_degree = false;
  /// dG rates (u, w, T) of the last rung pair below degree - 0.25
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

/// Runs the manufactured ladder, writing rates.csv and run.meta into cfg.output.
/// Mesh ladders fail when a last-pair dG rate of u, w or T falls below degree - 0.25.
ConvergenceResult run_convergence(const RunConfig& cfg, std::ostream* log = nullptr);

/// Rate table: ladder column (h or degree), dofs, the eight errors, then their rates.
void write_rates_csv(const std::filesystem::path& path, const ConvergenceResult& result);

struct SimulationResult {
  Index steps = 0;
  Index dofs = 0;
  std::vector<ReceiverTrace> traces;
  std::vector<Index> snapshot_steps;
  double max_energy = 0.0;
  std::vector<std::string> warnings;
};

/// Time loop with point sources, receivers and snapshots under cfg.output.
/// Aborts with SolverError on a non-finite state or when the energy jumps by
/// more than 1e3 over its running maximum in one step.
SimulationResult run_simulate(const RunConfig& cfg, std::ostream* log = nullptr);

/// Legacy VTK unstructured grid with per-cell values sampled at the centroids.
void write_vtk(const std::filesystem::path& path, const DGSpace& space, const SystemState& state);

/// Raster over the mesh bounding box (cell-centred points); points outside the mesh get nan.
void write_raster_csv(const std::filesystem::path& path, const DGSpace& space,
                      const CellLocator& locator, const SystemState& state, int nx, int ny);

struct RasterRow {
  double x, y, vx, vy, vmag, qx, qy, T;
};
std::vector<RasterRow> read_raster_csv(const std::filesystem::path& path);

struct ComparisonSummary {
  std::string snapshot;
  double max_difference = 0.0;   // max |v_A - v_B|
  double max_magnitude = 0.0;    // max over both runs of |v|
  double mean_cosine = 0.0;      // mean cos of the angle between v_A and v_B
};

/// Compares every raster_<k>.csv present in both snapshot directories. Per-point
/// fields (|v_A - v_B|, cos angle, |v_A| - |v_B|) go to out_dir/diff_<k>.csv.
std::vector<ComparisonSummary> compare_snapshots(const std::filesystem::path& dir_a,
                                                 const std::filesystem::path& dir_b,
                                                 const std::filesystem::path& out_dir);

/// ||R f - f|| / ||f|| for the |v| column of a square raster, R the reflection
/// across the main (anti = false) or the anti diagonal.
double diagonal_asymmetry(const std::vector<RasterRow>& raster, int n, bool anti);

}  // namespace tpdg
