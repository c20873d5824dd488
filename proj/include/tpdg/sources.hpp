#pragma once

#include "tpdg/space.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tpdg {

/// A0 cos(2 pi (t - t0) f0) exp(-2 (t - t0)^2 f0^2)
struct TimeHistory {
  double A0 = 10.0;
  double f0 = 5.0;
  double t0 = 0.3;

  double operator()(double t) const;
};

/// Sampled history, linearly interpolated; constant beyond the first and last samples.
struct TabulatedHistory {
  std::vector<double> times;
  std::vector<double> values;

  double operator()(double t) const;
};

enum class SourceTarget { Solid, Fluid, Both };

/// Point source -M div(delta(x - xs)) h(t).
struct MomentTensorSource {
  Point location = Point::Zero();
  Mat2 moment = Mat2::Zero();
  std::function<double(double)> history;
  SourceTarget target = SourceTarget::Solid;
};

/// Spatial part of a point source: load(t) = history(t) * spatial.
struct PointSourceLoad {
  VectorXd spatial;  // length 5N
  std::function<double(double)> history;
  Index cell = -1;

  VectorXd operator()(double t) const { return history(t) * spatial; }
};

/// Weak form of the delta-derivative source: entry (a, i) of the containing cell
/// receives sum_b M_ab d_b phi_i(xs). Throws ValidationError outside the mesh.
/// When xs lies on the boundary of several cells the lowest index wins and a
/// warning is appended.
PointSourceLoad moment_rhs(const DGSpace& space, const CellLocator& locator,
                           const MomentTensorSource& src, std::vector<std::string>* warnings = nullptr);

/// Convenience: full load vector at time t.
VectorXd moment_rhs(const DGSpace& space, const CellLocator& locator, const MomentTensorSource& src,
                    double t);

}  // namespace tpdg
