#include "tpdg/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tpdg {

double TimeHistory::operator()(double t) const {
  const double s = t - t0;
  return A0 * std::cos(2.0 * std::numbers::pi * s * f0) * std::exp(-2.0 * s * s * f0 * f0);
}

double TabulatedHistory::operator()(double t) const {
  if (times.empty()) return 0.0;
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto j = static_cast<std::size_t>(it - times.begin());
  const double s = (t - times[j - 1]) / (times[j] - times[j - 1]);
  return (1.0 - s) * values[j - 1] + s * values[j];
}

PointSourceLoad moment_rhs(const DGSpace& space, const CellLocator& locator,
                           const MomentTensorSource& src, std::vector<std::string>* warnings) {
  const auto hits = locator.locate_all(src.location);
  if (hits.empty()) {
    std::ostringstream os;
    os << "source at (" << src.location.x() << ", " << src.location.y() << ") lies outside the mesh";
    throw ValidationError(os.str());
  }
  if (hits.size() > 1 && warnings) {
    std::ostringstream os;
    os << "source at (" << src.location.x() << ", " << src.location.y() << ") touches "
       << hits.size() << " cells; assigned to cell " << hits.front();
    warnings->push_back(os.str());
  }
  const Index k = hits.front();
  const Index N = space.num_dofs();
  PointSourceLoad load;
  load.cell = k;
  load.history = src.history ? src.history : std::function<double(double)>(TimeHistory{});
  load.spatial = VectorXd::Zero(5 * N);
  VectorXd v, dx, dy;
  space.eval(k, src.location, v, dx, dy);
  const Index n = space.local_dim(k);
  for (int a = 0; a < 2; ++a) {
    const VectorXd c = src.moment(a, 0) * dx + src.moment(a, 1) * dy;
    const Index r = 2 * space.offset(k) + a * n;
    if (src.target != SourceTarget::Fluid) load.spatial.segment(r, n) += c;
    if (src.target != SourceTarget::Solid) load.spatial.segment(2 * N + r, n) += c;
  }
  return load;
}

VectorXd moment_rhs(const DGSpace& space, const CellLocator& locator, const MomentTensorSource& src,
                    double t) {
  return moment_rhs(space, locator, src, nullptr)(t);
}

}  // namespace tpdg
