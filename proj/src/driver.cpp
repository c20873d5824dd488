#include "tpdg/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

namespace tpdg {

namespace fs = std::filesystem;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(12);
  return out;
}

FieldSample sample_in_cell(const DGSpace& space, const SystemState& s, Index k, const Point& x) {
  const Index N = space.num_dofs();
  VectorXd v, dx, dy;
  space.eval(k, x, v, dx, dy);
  const Index n = space.local_dim(k);
  const Index o = space.offset(k);
  auto vec = [&](const VectorXd& c, Index base) {
    return Vec2(v.dot(c.segment(base + 2 * o, n)), v.dot(c.segment(base + 2 * o + n, n)));
  };
  FieldSample f;
  f.u = vec(s.X, 0);
  f.w = vec(s.X, 2 * N);
  f.T = v.dot(s.X.segment(4 * N + o, n));
  f.v = vec(s.Y, 0);
  f.q = vec(s.Y, 2 * N);
  return f;
}

std::string meta_line(const std::string& key, const std::string& value) { return key + " = " + value + "\n"; }

template <class T>
std::string str(const T& v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace

std::vector<FieldSample> sample_field(const DGSpace& space, const CellLocator& locator,
                                      const SystemState& state, const std::vector<Point>& points) {
  std::vector<FieldSample> out;
  out.reserve(points.size());
  for (const Point& p : points) {
    const auto k = locator.locate(p);
    if (!k) {
      std::ostringstream os;
      os << "sample point (" << p.x() << ", " << p.y() << ") lies outside the mesh";
      throw ValidationError(os.str());
    }
    out.push_back(sample_in_cell(space, state, *k, p));
  }
  return out;
}

ConvergenceResult run_convergence(const RunConfig& cfg, std::ostream* log) {
  validate_config(cfg);
  const auto t0 = clock_type::now();
  MaterialRegion mat = cfg.materials.begin()->second;
  if (!cfg.thermal_coupling) mat = without_thermal_coupling(mat);
  const ManufacturedCase mc = standard_manufactured_case(mat);
  AssemblyOptions opts;
  opts.workers = cfg.workers;

  ConvergenceResult res;
  res.by_degree = cfg.ladder.kind == LadderKind::Degree;
  const std::size_t rungs = res.by_degree ? cfg.ladder.degrees.size() : cfg.ladder.meshes.size();
  double assembly = 0.0, solve = 0.0;
  for (std::size_t r = 0; r < rungs; ++r) {
    const MeshSpec& ms = res.by_degree ? cfg.mesh : cfg.ladder.meshes[r];
    const int degree = res.by_degree ? cfg.ladder.degrees[r] : cfg.degree;
    ManufacturedRun run;
    try {
      const PolyMesh mesh = build_mesh(ms, cfg.regions);
      run = solve_manufactured(mc, mesh, degree, cfg.time, cfg.penalties, opts);
    } catch (const SolverError& e) {
      throw SolverError("rung " + std::to_string(r) + ": " + e.what());
    }
    assembly += run.assembly_seconds;
    solve += run.solve_seconds;
    if (log) {
      *log << "rung " << r << ": h = " << run.errors.h << ", degree = " << degree
           << ", dofs = " << run.errors.dofs;
      const auto cols = error_columns(run.errors);
      for (int c = 0; c < kErrorColumns; ++c)
        *log << ", " << error_column_names()[static_cast<std::size_t>(c)] << " = " << cols[static_cast<std::size_t>(c)];
      *log << "\n";
    }
    res.reports.push_back(run.errors);
  }
  res.rates = convergence_rates(res.reports, res.by_degree);

  for (const int c : {1, 3, 5}) {
    const auto name = error_column_names()[static_cast<std::size_t>(c)];
    if (res.by_degree) {
      for (std::size_t r = 0; r + 1 < res.reports.size(); ++r)
        if (!(error_columns(res.reports[r + 1])[c] < error_columns(res.reports[r])[c]))
          res.failures.push_back(name + " does not decrease from degree " +
                                 std::to_string(res.reports[r].degree));
    } else {
      const auto& last = res.rates.back()[static_cast<std::size_t>(c)];
      if (last && *last < cfg.degree - 0.25)
        res.failures.push_back(name + " rate " + str(*last) + " below " + str(cfg.degree - 0.25));
    }
  }

  fs::create_directories(cfg.output);
  write_rates_csv(cfg.output / "rates.csv", res);
  auto meta = open_out(cfg.output / "run.meta");
  meta << meta_line("mode", "convergence") << meta_line("config_hash", hex(config_hash(cfg.source_text)))
       << meta_line("rungs", str(rungs));
  for (std::size_t r = 0; r < rungs; ++r)
    meta << meta_line("dofs_" + std::to_string(r), str(res.reports[r].dofs));
  meta << meta_line("assembly_seconds", str(assembly)) << meta_line("solve_seconds", str(solve))
       << meta_line("total_seconds", str(seconds_since(t0)))
       << meta_line("status", res.passed() ? "pass" : "fail");
  return res;
}

void write_rates_csv(const fs::path& path, const ConvergenceResult& result) {
  auto out = open_out(path);
  const auto& names = error_column_names();
  out << (result.by_degree ? "degree" : "h") << ",dofs";
  for (const auto& n : names) out << "," << n;
  for (const auto& n : names) out << ",rate_" << n;
  out << "\n";
  for (std::size_t r = 0; r < result.reports.size(); ++r) {
    const auto& rep = result.reports[r];
    if (result.by_degree) out << rep.degree;
    else out << rep.h;
    out << "," << rep.dofs;
    for (const double e : error_columns(rep)) out << "," << e;
    for (int c = 0; c < kErrorColumns; ++c) {
      out << ",";
      if (r == 0) continue;
      const auto& v = result.rates[r - 1][static_cast<std::size_t>(c)];
      if (v) out << *v;
      else out << "exact";
    }
    out << "\n";
  }
}

SimulationResult run_simulate(const RunConfig& cfg, std::ostream* log) {
  SimulationResult res;
  res.warnings = validate_config(cfg);
  const auto t0 = clock_type::now();
  const PolyMesh mesh = build_mesh(cfg.mesh, cfg.regions);
  const DGSpace space(mesh, cfg.degree);
  const CellLocator locator(mesh);
  AssemblyOptions opts;
  opts.workers = cfg.workers;
  const Forms forms = assemble_forms(space, effective_materials(cfg), cfg.penalties, opts);
  const BlockSystem sys = build_block_system(forms);
  const NewmarkIntegrator integ(sys, cfg.time);

  std::vector<PointSourceLoad> loads;
  for (const auto& s : cfg.sources) loads.push_back(moment_rhs(space, locator, s, &res.warnings));
  const Index n = sys.size();
  const LoadFunction load = [&](double t) {
    VectorXd F = VectorXd::Zero(n);
    for (const auto& l : loads) F += l.history(t) * l.spatial;
    return F;
  };
  const double assembly_seconds = seconds_since(t0);
  if (log)
    for (const auto& w : res.warnings) *log << "warning: " << w << "\n";

  std::vector<Index> receiver_cells;
  for (const auto& r : cfg.receivers) {
    receiver_cells.push_back(*locator.locate(r.location));
    res.traces.push_back({r.name, r.location, {}, {}, {}, {}, {}, {}});
  }

  const fs::path snap_dir = cfg.output / "snapshots";
  if (cfg.snapshots.every > 0) fs::create_directories(snap_dir);
  double running_max = 0.0;
  double output_seconds = 0.0;
  auto hook = [&](const StepReport& r, const SystemState& s) {
    if (!std::isfinite(r.energy))
      throw SolverError("instability: non-finite energy at step " + std::to_string(r.step));
    if (running_max > 0.0 && r.energy > 1e3 * running_max) {
      std::ostringstream os;
      os << "instability: energy jumped from " << running_max << " to " << r.energy << " at step "
         << r.step << " (t = " << r.t << ")";
      throw SolverError(os.str());
    }
    running_max = std::max(running_max, r.energy);
    const auto to = clock_type::now();
    for (std::size_t i = 0; i < res.traces.size(); ++i) {
      const FieldSample f = sample_in_cell(space, s, receiver_cells[i], res.traces[i].location);
      auto& tr = res.traces[i];
      tr.t.push_back(r.t);
      tr.vmag.push_back(f.v.norm());
      tr.vx.push_back(f.v.x());
      tr.vy.push_back(f.v.y());
      tr.qy.push_back(f.q.y());
      tr.T.push_back(f.T);
    }
    if (cfg.snapshots.every > 0 && r.step % cfg.snapshots.every == 0) {
      const std::string k = std::to_string(r.step);
      if (cfg.snapshots.vtk) write_vtk(snap_dir / ("step_" + k + ".vtk"), space, s);
      if (cfg.snapshots.raster_nx > 0 && cfg.snapshots.raster_ny > 0)
        write_raster_csv(snap_dir / ("raster_" + k + ".csv"), space, locator, s,
                         cfg.snapshots.raster_nx, cfg.snapshots.raster_ny);
      res.snapshot_steps.push_back(r.step);
    }
    output_seconds += seconds_since(to);
    if (log && cfg.time.num_steps() >= 10 && r.step % (cfg.time.num_steps() / 10) == 0)
      *log << "step " << r.step << ", t = " << r.t << ", energy = " << r.energy << "\n";
  };

  const auto ts = clock_type::now();
  SystemState s = integ.initial_state(0.0, VectorXd::Zero(n), VectorXd::Zero(n), load(0.0));
  integrate(integ, sys, s, load, hook);
  const double solve_seconds = seconds_since(ts) - output_seconds;

  res.steps = cfg.time.num_steps();
  res.dofs = n;
  res.max_energy = running_max;
  for (const auto& tr : res.traces) {
    auto out = open_out(cfg.output / "receivers" / (tr.name + ".csv"));
    out << "t,vmag,vy,qy,T\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i)
      out << tr.t[i] << "," << tr.vmag[i] << "," << tr.vy[i] << "," << tr.qy[i] << "," << tr.T[i] << "\n";
  }
  auto meta = open_out(cfg.output / "run.meta");
  meta << meta_line("mode", "simulate") << meta_line("config_hash", hex(config_hash(cfg.source_text)))
       << meta_line("cells", str(mesh.num_cells())) << meta_line("dofs", str(n))
       << meta_line("steps", str(res.steps)) << meta_line("max_energy", str(res.max_energy))
       << meta_line("assembly_seconds", str(assembly_seconds))
       << meta_line("solve_seconds", str(solve_seconds))
       << meta_line("output_seconds", str(output_seconds));
  for (const auto& w : res.warnings) meta << meta_line("warning", w);
  return res;
}

void write_vtk(const fs::path& path, const DGSpace& space, const SystemState& state) {
  const PolyMesh& mesh = space.mesh();
  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\ntpdg snapshot t=" << state.t << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (Index i = 0; i < mesh.num_vertices(); ++i) out << mesh.vertex(i).x() << " " << mesh.vertex(i).y() << " 0\n";
  Index total = 0;
  for (Index k = 0; k < mesh.num_cells(); ++k) total += static_cast<Index>(mesh.cell(k).size()) + 1;
  out << "CELLS " << mesh.num_cells() << " " << total << "\n";
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    out << mesh.cell(k).size();
    for (const Index v : mesh.cell(k)) out << " " << v;
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.num_cells() << "\n";
  for (Index k = 0; k < mesh.num_cells(); ++k) out << "7\n";
  std::vector<FieldSample> f;
  for (Index k = 0; k < mesh.num_cells(); ++k)
    f.push_back(sample_in_cell(space, state, k, mesh.geometry(k).centroid));
  out << "CELL_DATA " << mesh.num_cells() << "\n";
  auto scalar = [&](const char* name, auto get) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (const auto& s : f) out << get(s) << "\n";
  };
  scalar("vmag", [](const FieldSample& s) { return s.v.norm(); });
  scalar("vy", [](const FieldSample& s) { return s.v.y(); });
  scalar("qy", [](const FieldSample& s) { return s.q.y(); });
  scalar("T", [](const FieldSample& s) { return s.T; });
  scalar("region", [&, k = Index{0}](const FieldSample&) mutable { return mesh.region(k++); });
}

void write_raster_csv(const fs::path& path, const DGSpace& space, const CellLocator& locator,
                      const SystemState& state, int nx, int ny) {
  const BoundingBox box = space.mesh().bounding_box();
  auto out = open_out(path);
  out << "x,y,vx,vy,vmag,qx,qy,T\n";
  const double dx = (box.max.x() - box.min.x()) / nx;
  const double dy = (box.max.y() - box.min.y()) / ny;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Point p(box.min.x() + (i + 0.5) * dx, box.min.y() + (j + 0.5) * dy);
      out << p.x() << "," << p.y() << ",";
      const auto k = locator.locate(p);
      if (!k) {
        out << "nan,nan,nan,nan,nan,nan\n";
        continue;
      }
      const FieldSample f = sample_in_cell(space, state, *k, p);
      out << f.v.x() << "," << f.v.y() << "," << f.v.norm() << "," << f.q.x() << "," << f.q.y()
          << "," << f.T << "\n";
    }
}

std::vector<RasterRow> read_raster_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open raster " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "x,y,vx,vy,vmag,qx,qy,T") throw ParseError(path.string() + ": unexpected header");
  std::vector<RasterRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::array<std::string, 8> tok;
    for (auto& t : tok) ls >> t;
    if (!ls) throw ParseError(path.string() + ": malformed row");
    std::array<double, 8> v{};
    for (std::size_t i = 0; i < 8; ++i)
      v[i] = tok[i] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(tok[i]);
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
  }
  return rows;
}

std::vector<ComparisonSummary> compare_snapshots(const fs::path& dir_a, const fs::path& dir_b,
                                                 const fs::path& out_dir) {
  const std::regex pat("raster_([0-9]+)\\.csv");
  std::map<long, std::string> files;
  for (const auto& e : fs::directory_iterator(dir_a)) {
    std::smatch m;
    const std::string name = e.path().filename().string();
    if (std::regex_match(name, m, pat) && fs::exists(dir_b / name)) files[std::stol(m[1])] = name;
  }
  if (files.empty()) throw ValidationError("compare: no common raster snapshots");
  fs::create_directories(out_dir);
  std::vector<ComparisonSummary> out;
  for (const auto& [step, name] : files) {
    const auto a = read_raster_csv(dir_a / name);
    const auto b = read_raster_csv(dir_b / name);
    if (a.size() != b.size()) throw ValidationError("compare: " + name + " sizes differ");
    ComparisonSummary s;
    s.snapshot = name;
    auto diff = open_out(out_dir / ("diff_" + std::to_string(step) + ".csv"));
    diff << "x,y,dmag,cosine,dnorm\n";
    double cos_sum = 0.0;
    std::size_t cos_n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i].x - b[i].x) > 1e-9 * (1.0 + std::abs(a[i].x)) ||
          std::abs(a[i].y - b[i].y) > 1e-9 * (1.0 + std::abs(a[i].y)))
        throw ValidationError("compare: " + name + " raster points differ");
      const Vec2 va(a[i].vx, a[i].vy), vb(b[i].vx, b[i].vy);
      const double dmag = (va - vb).norm();
      const double den = va.norm() * vb.norm();
      const double c = den > 0.0 ? va.dot(vb) / den : 1.0;
      diff << a[i].x << "," << a[i].y << "," << dmag << "," << c << "," << va.norm() - vb.norm() << "\n";
      if (!std::isfinite(dmag)) continue;
      s.max_difference = std::max(s.max_difference, dmag);
      s.max_magnitude = std::max({s.max_magnitude, va.norm(), vb.norm()});
      cos_sum += c;
      ++cos_n;
    }
    s.mean_cosine = cos_n ? cos_sum / static_cast<double>(cos_n) : 1.0;
    out.push_back(s);
  }
  return out;
}

double diagonal_asymmetry(const std::vector<RasterRow>& raster, int n, bool anti) {
  if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != raster.size())
    throw ValidationError("diagonal_asymmetry: raster is not n x n");
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int ri = anti ? n - 1 - j : j;
      const int rj = anti ? n - 1 - i : i;
      const double f = raster[static_cast<std::size_t>(j * n + i)].vmag;
      const double g = raster[static_cast<std::size_t>(rj * n + ri)].vmag;
      num += (g - f) * (g - f);
      den += f * f;
    }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace tpdg
