#include "tpdg/materials.hpp"

#include <cmath>
#include <numbers>

namespace tpdg {

Densities derived_densities(const MaterialRegion& r) {
  if (!(r.phi > 0.0 && r.phi < 1.0))
    throw ValidationError("densities: porosity must lie in (0,1)");
  return {r.rho(), r.rho_w()};
}

ValidityReport validate(const MaterialRegion& r) {
  ValidityReport rep;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) rep.errors.push_back(std::string(name) + " must be positive");
  };
  positive(r.c0, "c0");
  positive(r.mu, "mu");
  positive(r.lambda, "lambda");
  positive(r.k, "k");
  positive(r.theta, "theta");
  positive(r.rho_f, "rho_f");
  positive(r.rho_s, "rho_s");
  if (r.b0 < 0.0) rep.errors.push_back("b0 must be non-negative");
  if (r.tau < 0.0) rep.errors.push_back("tau must be non-negative");
  if (r.beta < 0.0) rep.errors.push_back("beta must be non-negative");
  else if (r.beta == 0.0) rep.warnings.push_back("beta = 0: thermal stress coupling disabled");
  if (!(r.phi > 0.0 && r.phi < 1.0)) rep.errors.push_back("phi must lie in (0,1)");
  if (r.a < 1.0) rep.errors.push_back("a must be at least 1");
  else if (r.a == 1.0) rep.warnings.push_back("a = 1: tortuosity at its lower bound");
  if (!(r.alpha > r.phi && r.alpha <= 1.0))
    rep.warnings.push_back("alpha outside (phi, 1]");
  if (r.c0 > 0.0) {
    rep.reduced_capacity = r.reduced_capacity();
    if (!(rep.reduced_capacity > 0.0)) rep.errors.push_back("a0 - b0^2/c0 must be positive");
  }
  return rep;
}

double critical_frequency(const MaterialRegion& r) {
  return r.phi / (2.0 * std::numbers::pi * r.a * r.k * r.rho_f);
}

MaterialRegion manufactured_material() {
  MaterialRegion r;
  r.a0 = 0.02;
  r.b0 = 0.01;
  r.c0 = 0.03;
  r.alpha = 1.0;
  r.beta = 0.8;
  r.mu = 1.0;
  r.lambda = 5.0;
  r.k = 0.2;
  r.theta = 0.05;
  r.rho_f = 0.03;
  r.rho_s = 0.03;
  r.phi = 0.5;
  r.a = 1.0;
  r.tau = 0.01;
  return r;
}

MaterialRegion reference_rock() {
  MaterialRegion r;
  r.a0 = 4.1695;
  r.b0 = 1.4361e-5;
  r.c0 = 1.4361e-10;
  r.alpha = 0.9514;
  r.beta = 2.4857e4;
  r.mu = 1.885e9;
  r.lambda = 4.433e8;
  r.k = 1e-9;
  r.theta = 1.5e4;
  r.rho_f = 1000.0;
  r.rho_s = 2650.0;
  r.phi = 0.3;
  r.a = 2.0;
  r.tau = 1.5e-2;
  return r;
}

MaterialRegion stiff_layer_rock() {
  MaterialRegion r = reference_rock();
  r.a0 = 4.1017;
  r.b0 = 1.3684e-5;
  r.c0 = 1.3684e-10;
  r.alpha = 0.7143;
  r.beta = 4.8571e4;
  r.mu = 9e9;
  r.lambda = 4e9;
  return r;
}

MaterialRegion without_thermal_coupling(MaterialRegion r) {
  r.b0 = 0.0;
  r.beta = 0.0;
  return r;
}

const MaterialRegion& MaterialMap::at(int tag) const {
  auto it = regions_.find(tag);
  if (it == regions_.end())
    throw ValidationError("materials: no material for region " + std::to_string(tag));
  return it->second;
}

std::vector<MaterialRegion> MaterialMap::per_cell(const PolyMesh& mesh) const {
  std::vector<MaterialRegion> out;
  out.reserve(static_cast<std::size_t>(mesh.num_cells()));
  for (Index k = 0; k < mesh.num_cells(); ++k) out.push_back(at(mesh.region(k)));
  return out;
}

MaterialMap uniform_material(const MaterialRegion& r, int tag) {
  return MaterialMap({{tag, r}});
}

}  // namespace tpdg
