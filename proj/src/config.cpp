#include "tpdg/config.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace tpdg {

using nlohmann::json;

namespace {

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ParseError(where + ": unknown key '" + k + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + "." + key + ": wrong type");
  }
}

Point get_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(where + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

GridSpec parse_grid(const json& j, const std::string& where) {
  allow_keys(j, where, {"nx", "ny", "x0", "x1", "y0", "y1"});
  GridSpec g;
  g.nx = get(j, "nx", where, g.nx);
  g.ny = get(j, "ny", where, g.ny);
  g.x0 = get(j, "x0", where, g.x0);
  g.x1 = get(j, "x1", where, g.x1);
  g.y0 = get(j, "y0", where, g.y0);
  g.y1 = get(j, "y1", where, g.y1);
  return g;
}

MeshSpec parse_mesh(const json& j, const std::filesystem::path& base) {
  if (j.is_string()) return {base / j.get<std::string>(), std::nullopt};
  allow_keys(j, "mesh", {"file", "grid"});
  MeshSpec m;
  if (j.contains("file") == j.contains("grid")) throw ParseError("mesh: give exactly one of file, grid");
  if (j.contains("file")) m.file = base / get<std::string>(j, "file", "mesh", "");
  else m.grid = parse_grid(j.at("grid"), "mesh.grid");
  return m;
}

MaterialRegion parse_material(const json& j, const std::string& where) {
  allow_keys(j, where, {"tag", "preset", "a0", "b0", "c0", "alpha", "beta", "mu", "lambda", "k",
                        "theta", "rho_f", "rho_s", "phi", "a", "tau"});
  MaterialRegion r = j.contains("preset") ? material_preset(get<std::string>(j, "preset", where, ""))
                                          : MaterialRegion{};
  const std::pair<const char*, double MaterialRegion::*> fields[] = {
      {"a0", &MaterialRegion::a0},       {"b0", &MaterialRegion::b0},
      {"c0", &MaterialRegion::c0},       {"alpha", &MaterialRegion::alpha},
      {"beta", &MaterialRegion::beta},   {"mu", &MaterialRegion::mu},
      {"lambda", &MaterialRegion::lambda}, {"k", &MaterialRegion::k},
      {"theta", &MaterialRegion::theta}, {"rho_f", &MaterialRegion::rho_f},
      {"rho_s", &MaterialRegion::rho_s}, {"phi", &MaterialRegion::phi},
      {"a", &MaterialRegion::a},         {"tau", &MaterialRegion::tau}};
  for (const auto& [key, member] : fields) r.*member = get(j, key, where, r.*member);
  return r;
}

MomentTensorSource parse_source(const json& j, const std::string& where) {
  allow_keys(j, where, {"location", "moment", "A0", "f0", "t0", "target", "history"});
  MomentTensorSource s;
  if (!j.contains("location")) throw ParseError(where + ": missing location");
  s.location = get_point(j.at("location"), where + ".location");
  if (j.contains("moment")) {
    const json& m = j.at("moment");
    allow_keys(m, where + ".moment", {"xx", "yy", "xy"});
    const double xy = get(m, "xy", where + ".moment", 0.0);
    s.moment << get(m, "xx", where + ".moment", 0.0), xy, xy, get(m, "yy", where + ".moment", 0.0);
  }
  if (j.contains("history")) {
    const json& h = j.at("history");
    allow_keys(h, where + ".history", {"times", "values"});
    TabulatedHistory tab;
    tab.times = get<std::vector<double>>(h, "times", where + ".history", {});
    tab.values = get<std::vector<double>>(h, "values", where + ".history", {});
    if (tab.times.empty() || tab.times.size() != tab.values.size())
      throw ParseError(where + ".history: times and values must be non-empty and of equal length");
    for (std::size_t i = 1; i < tab.times.size(); ++i)
      if (!(tab.times[i] > tab.times[i - 1])) throw ParseError(where + ".history: times must increase");
    s.history = tab;
  } else {
    TimeHistory th;
    th.A0 = get(j, "A0", where, th.A0);
    th.f0 = get(j, "f0", where, th.f0);
    th.t0 = get(j, "t0", where, th.t0);
    if (!(th.f0 > 0.0)) throw ParseError(where + ": f0 must be positive");
    s.history = th;
  }
  const std::string target = get<std::string>(j, "target", where, "solid");
  if (target == "solid") s.target = SourceTarget::Solid;
  else if (target == "fluid") s.target = SourceTarget::Fluid;
  else if (target == "both") s.target = SourceTarget::Both;
  else throw ParseError(where + ": target must be solid, fluid or both");
  return s;
}

}  // namespace

MaterialRegion material_preset(const std::string& name) {
  if (name == "manufactured") return manufactured_material();
  if (name == "reference_rock") return reference_rock();
  if (name == "stiff_layer") return stiff_layer_rock();
  throw ParseError("unknown material preset '" + name + "'");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  allow_keys(j, "config", {"mode", "mesh", "regions", "materials", "degree", "penalties", "time",
                           "sources", "receivers", "output", "snapshots", "workers",
                           "thermal_coupling", "convergence"});
  RunConfig c;
  c.source_text = text;

  const std::string mode = get<std::string>(j, "mode", "config", "simulate");
  if (mode == "simulate") c.mode = RunMode::Simulate;
  else if (mode == "convergence") c.mode = RunMode::Convergence;
  else throw ParseError("config.mode: expected simulate or convergence");

  if (j.contains("mesh")) c.mesh = parse_mesh(j.at("mesh"), base_dir);
  else c.mesh.grid = GridSpec{};

  if (j.contains("regions")) {
    for (const auto& r : j.at("regions")) {
      allow_keys(r, "regions[]", {"tag", "x0", "x1", "y0", "y1"});
      c.regions.push_back({get(r, "tag", "regions[]", 1), get(r, "x0", "regions[]", 0.0),
                           get(r, "x1", "regions[]", 0.0), get(r, "y0", "regions[]", 0.0),
                           get(r, "y1", "regions[]", 0.0)});
    }
  }

  if (j.contains("materials")) {
    for (const auto& m : j.at("materials")) {
      const int tag = get(m, "tag", "materials[]", 1);
      if (c.materials.count(tag)) throw ParseError("materials: duplicate tag " + std::to_string(tag));
      c.materials[tag] = parse_material(m, "materials[" + std::to_string(tag) + "]");
    }
  }

  c.degree = get(j, "degree", "config", c.degree);
  if (j.contains("penalties")) {
    const json& p = j.at("penalties");
    allow_keys(p, "penalties", {"alpha1", "alpha2", "alpha3", "alpha4"});
    c.penalties.alpha1 = get(p, "alpha1", "penalties", c.penalties.alpha1);
    c.penalties.alpha2 = get(p, "alpha2", "penalties", c.penalties.alpha2);
    c.penalties.alpha3 = get(p, "alpha3", "penalties", c.penalties.alpha3);
    c.penalties.alpha4 = get(p, "alpha4", "penalties", c.penalties.alpha4);
  }

  if (j.contains("time")) {
    const json& t = j.at("time");
    allow_keys(t, "time", {"dt", "final_time", "beta", "gamma", "solver", "tolerance"});
    c.time.dt = get(t, "dt", "time", c.time.dt);
    c.time.final_time = get(t, "final_time", "time", c.time.final_time);
    c.time.beta = get(t, "beta", "time", c.time.beta);
    c.time.gamma = get(t, "gamma", "time", c.time.gamma);
    c.time.solver_tolerance = get(t, "tolerance", "time", c.time.solver_tolerance);
    const std::string solver = get<std::string>(t, "solver", "time", "direct");
    if (solver == "direct") c.time.solver = SolverKind::Direct;
    else if (solver == "iterative") c.time.solver = SolverKind::Iterative;
    else throw ParseError("time.solver: expected direct or iterative");
  }

  if (j.contains("sources")) {
    int i = 0;
    for (const auto& s : j.at("sources")) c.sources.push_back(parse_source(s, "sources[" + std::to_string(i++) + "]"));
  }
  if (j.contains("receivers")) {
    int i = 0;
    for (const auto& r : j.at("receivers")) {
      const std::string where = "receivers[" + std::to_string(i++) + "]";
      allow_keys(r, where, {"name", "location"});
      Receiver rec;
      rec.name = get<std::string>(r, "name", where, "r" + std::to_string(i - 1));
      if (!r.contains("location")) throw ParseError(where + ": missing location");
      rec.location = get_point(r.at("location"), where + ".location");
      c.receivers.push_back(rec);
    }
  }

  if (j.contains("output")) c.output = base_dir / get<std::string>(j, "output", "config", "out");
  else c.output = base_dir / "out";

  if (j.contains("snapshots")) {
    const json& s = j.at("snapshots");
    allow_keys(s, "snapshots", {"every", "raster", "vtk"});
    c.snapshots.every = get(s, "every", "snapshots", 0);
    c.snapshots.vtk = get(s, "vtk", "snapshots", true);
    if (s.contains("raster")) {
      const json& r = s.at("raster");
      allow_keys(r, "snapshots.raster", {"nx", "ny"});
      c.snapshots.raster_nx = get(r, "nx", "snapshots.raster", 0);
      c.snapshots.raster_ny = get(r, "ny", "snapshots.raster", 0);
    }
  }
  c.workers = get(j, "workers", "config", 1);
  c.thermal_coupling = get(j, "thermal_coupling", "config", true);

  if (j.contains("convergence")) {
    const json& cv = j.at("convergence");
    allow_keys(cv, "convergence", {"case", "ladder"});
    c.manufactured_case = get<std::string>(cv, "case", "convergence", "standard");
    if (cv.contains("ladder")) {
      const json& l = cv.at("ladder");
      allow_keys(l, "convergence.ladder", {"grids", "meshes", "degrees"});
      if (l.size() != 1) throw ParseError("convergence.ladder: give exactly one of grids, meshes, degrees");
      if (l.contains("degrees")) {
        c.ladder.kind = LadderKind::Degree;
        c.ladder.degrees = get<std::vector<int>>(l, "degrees", "convergence.ladder", {});
      } else if (l.contains("grids")) {
        const GridSpec base = c.mesh.grid.value_or(GridSpec{});
        for (const int n : get<std::vector<int>>(l, "grids", "convergence.ladder", {})) {
          GridSpec g = base;
          g.nx = g.ny = n;
          c.ladder.meshes.push_back({{}, g});
        }
      } else {
        for (const auto& f : get<std::vector<std::string>>(l, "meshes", "convergence.ladder", {}))
          c.ladder.meshes.push_back({base_dir / f, std::nullopt});
      }
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

std::uint64_t config_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

PolyMesh build_mesh(const MeshSpec& spec, const std::vector<RegionBox>& regions) {
  PolyMesh mesh;
  if (spec.grid) {
    const GridSpec& g = *spec.grid;
    mesh = cartesian_grid(g.nx, g.ny, g.x0, g.x1, g.y0, g.y1);
  } else {
    mesh = load_mesh(spec.file);
  }
  if (regions.empty()) return mesh;
  std::vector<int> tags = mesh.regions();
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    const Point c = mesh.geometry(k).centroid;
    for (const auto& b : regions)
      if (c.x() >= b.x0 && c.x() <= b.x1 && c.y() >= b.y0 && c.y() <= b.y1)
        tags[static_cast<std::size_t>(k)] = b.tag;
  }
  return with_regions(mesh, std::move(tags));
}

MaterialMap effective_materials(const RunConfig& cfg) {
  MaterialMap m;
  for (const auto& [tag, r] : cfg.materials)
    m.set(tag, cfg.thermal_coupling ? r : without_thermal_coupling(r));
  return m;
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> errors, warnings;
  auto check_mesh_spec = [&](const MeshSpec& m) {
    if (m.grid) {
      const GridSpec& g = *m.grid;
      if (g.nx < 1 || g.ny < 1) errors.push_back("grid: nx and ny must be positive");
      if (!(g.x1 > g.x0) || !(g.y1 > g.y0)) errors.push_back("grid: empty extent");
    } else if (!std::filesystem::exists(m.file)) {
      errors.push_back("mesh file not found: " + m.file.string());
    }
  };
  check_mesh_spec(cfg.mesh);
  const bool mesh_ok = errors.empty();
  for (const auto& m : cfg.ladder.meshes) check_mesh_spec(m);

  if (cfg.materials.empty()) errors.push_back("no materials given");
  for (const auto& [tag, r] : cfg.materials) {
    const auto rep = validate(r);
    for (const auto& e : rep.errors) errors.push_back("material " + std::to_string(tag) + ": " + e);
    for (const auto& w : rep.warnings) warnings.push_back("material " + std::to_string(tag) + ": " + w);
  }
  try {
    cfg.time.check();
    cfg.time.num_steps();
  } catch (const ValidationError& e) {
    errors.push_back(e.what());
  }
  if (cfg.degree < 0) errors.push_back("degree must be non-negative");
  if (cfg.workers < 1) errors.push_back("workers must be at least 1");
  if (cfg.snapshots.every < 0) errors.push_back("snapshots.every must be non-negative");
  if (cfg.mode == RunMode::Convergence) {
    if (cfg.manufactured_case != "standard")
      errors.push_back("unknown manufactured case '" + cfg.manufactured_case + "'");
    const std::size_t rungs = cfg.ladder.kind == LadderKind::Degree ? cfg.ladder.degrees.size()
                                                                    : cfg.ladder.meshes.size();
    if (rungs < 2) errors.push_back("convergence ladder needs at least two rungs");
    if (cfg.materials.size() != 1) errors.push_back("convergence mode takes exactly one material");
    for (const int d : cfg.ladder.degrees)
      if (d < 1) errors.push_back("ladder degrees must be at least 1");
  }

  if (mesh_ok && cfg.mode == RunMode::Simulate) {
    try {
      const PolyMesh mesh = build_mesh(cfg.mesh, cfg.regions);
      for (const int tag : std::set<int>(mesh.regions().begin(), mesh.regions().end()))
        if (!cfg.materials.count(tag)) errors.push_back("no material for region tag " + std::to_string(tag));
      const CellLocator loc(mesh);
      for (const auto& r : cfg.receivers)
        if (!loc.locate(r.location)) errors.push_back("receiver '" + r.name + "' lies outside the mesh");
      for (const auto& s : cfg.sources) {
        if (!loc.locate(s.location)) errors.push_back("source lies outside the mesh");
        const auto* th = s.history.target<TimeHistory>();
        if (!th) continue;
        for (const auto& [tag, r] : cfg.materials) {
          const double fc = critical_frequency(r);
          if (th->f0 >= fc) {
            std::ostringstream os;
            os << "source peak frequency " << th->f0 << " Hz is not below the critical frequency "
               << fc << " Hz of material " << tag;
            warnings.push_back(os.str());
          }
        }
      }
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return warnings;
}

}  // namespace tpdg
