#pragma once

#include "tpdg/assembly.hpp"
#include "tpdg/sources.hpp"
#include "tpdg/timeint.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tpdg {

struct GridSpec {
  int nx = 10;
  int ny = 10;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

/// Either a mesh file or a built-in Cartesian grid.
struct MeshSpec {
  std::filesystem::path file;
  std::optional<GridSpec> grid;
};

/// Cells whose centroid lies in the box get the tag. Later boxes win.
struct RegionBox {
  int tag = 1;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
};

enum class LadderKind { Mesh, Degree };

struct LadderSpec {
  LadderKind kind = LadderKind::Mesh;
  std::vector<MeshSpec> meshes;  // Mesh ladder, coarse to fine
  std::vector<int> degrees;      // Degree ladder, on `RunConfig::mesh`
};

struct Receiver {
  std::string name;
  Point location = Point::Zero();
};

struct SnapshotSpec {
  int every = 0;  // 0: no snapshots
  int raster_nx = 0;
  int raster_ny = 0;
  bool vtk = true;
};

enum class RunMode { Convergence, Simulate };

struct RunConfig {
  RunMode mode = RunMode::Simulate;
  MeshSpec mesh;
  std::vector<RegionBox> regions;
  std::map<int, MaterialRegion> materials;
  int degree = 2;
  PenaltyParameters penalties;
  NewmarkConfig time;
  std::vector<MomentTensorSource> sources;
  std::vector<Receiver> receivers;
  std::filesystem::path output = "out";
  SnapshotSpec snapshots;
  int workers = 1;
  bool thermal_coupling = true;
  // convergence mode
  std::string manufactured_case = "standard";
  LadderSpec ladder;
  // bookkeeping
  std::string source_text;
};

/// Parses a JSON document. Relative paths are resolved against base_dir.
/// Throws ParseError on malformed input or unknown keys and presets.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Semantic checks: referenced files exist, materials valid, receivers and sources
/// inside the domain, dt divides the final time. Returns warnings; throws
/// ValidationError listing every error found.
std::vector<std::string> validate_config(const RunConfig& cfg);

/// 64-bit FNV-1a of the configuration text.
std::uint64_t config_hash(const std::string& text);

/// Mesh of a spec, with region boxes applied.
PolyMesh build_mesh(const MeshSpec& spec, const std::vector<RegionBox>& regions);

/// Materials of cfg with thermal coupling removed when cfg.thermal_coupling is false.
MaterialMap effective_materials(const RunConfig& cfg);

/// Named material preset: "manufactured", "reference_rock" or "stiff_layer".
MaterialRegion material_preset(const std::string& name);

}  // namespace tpdg
