#pragma once

#include "tpdg/mesh.hpp"

#include <map>
#include <string>
#include <vector>

namespace tpdg {

/// Thermo-poroelastic coefficients of one region. Units are not enforced.
struct MaterialRegion {
  double a0 = 0.0;      // thermal capacity, Pa/K^2
  double b0 = 0.0;      // thermal dilatation, 1/K
  double c0 = 0.0;      // specific storage, 1/Pa
  double alpha = 0.0;   // Biot-Willis coefficient
  double beta = 0.0;    // thermal stress coefficient, Pa/K
  double mu = 0.0;      // Pa
  double lambda = 0.0;  // Pa
  double k = 0.0;       // permeability over viscosity, m^2/(Pa s)
  double theta = 0.0;   // heat conductivity, m^2 Pa/(K^2 s)
  double rho_f = 0.0;
  double rho_s = 0.0;
  double phi = 0.0;     // porosity
  double a = 0.0;       // tortuosity
  double tau = 0.0;     // thermal relaxation time, s

  double rho() const { return phi * rho_f + (1.0 - phi) * rho_s; }
  double rho_w() const { return a / phi * rho_f; }
  /// a0 - b0^2/c0
  double reduced_capacity() const { return a0 - b0 * b0 / c0; }
  /// weight of the solid-displacement coupling, (alpha b0 + beta c0)/c0
  double coupling_u() const { return (alpha * b0 + beta * c0) / c0; }
  /// weight of the filtration coupling, b0/c0
  double coupling_w() const { return b0 / c0; }
};

struct Densities {
  double rho = 0.0;
  double rho_w = 0.0;
};

Densities derived_densities(const MaterialRegion& r);

struct ValidityReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  double reduced_capacity = 0.0;

  bool ok() const { return errors.empty(); }
};

ValidityReport validate(const MaterialRegion& r);

/// phi / (2 pi a k rho_f), in Hz
double critical_frequency(const MaterialRegion& r);

// Parameter sets used by the examples and tests.
MaterialRegion manufactured_material();  // convergence studies, scaled units
MaterialRegion reference_rock();         // wave tests, SI units
MaterialRegion stiff_layer_rock();       // second layer of the two-layer test

/// Same material with thermal coupling removed (b0 = beta = 0).
MaterialRegion without_thermal_coupling(MaterialRegion r);

/// Region tag -> material.
class MaterialMap {
 public:
  MaterialMap() = default;
  explicit MaterialMap(std::map<int, MaterialRegion> regions) : regions_(std::move(regions)) {}

  void set(int tag, const MaterialRegion& r) { regions_[tag] = r; }
  const MaterialRegion& at(int tag) const;
  bool contains(int tag) const { return regions_.count(tag) > 0; }
  const std::map<int, MaterialRegion>& regions() const { return regions_; }

  /// Material of every cell; throws ValidationError for an unmapped tag.
  std::vector<MaterialRegion> per_cell(const PolyMesh& mesh) const;

 private:
  std::map<int, MaterialRegion> regions_;
};

MaterialMap uniform_material(const MaterialRegion& r, int tag = 1);

}  // namespace tpdg
