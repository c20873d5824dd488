// Command-line front end: convergence studies, wave simulations, snapshot comparison.

#include "tpdg/driver.hpp"

#include "CLI11.hpp"

#include <iomanip>
#include <iostream>

using namespace tpdg;

namespace {

void print_rates(const ConvergenceResult& res) {
  const auto& names = error_column_names();
  std::cout << std::setw(10) << (res.by_degree ? "degree" : "h");
  for (const auto& n : names) std::cout << std::setw(12) << n;
  std::cout << "\n" << std::scientific << std::setprecision(3);
  for (std::size_t r = 0; r < res.reports.size(); ++r) {
    const auto& rep = res.reports[r];
    if (res.by_degree) std::cout << std::setw(10) << rep.degree;
    else std::cout << std::setw(10) << rep.h;
    for (const double e : error_columns(rep)) std::cout << std::setw(12) << e;
    std::cout << "\n";
    if (r + 1 == res.reports.size()) break;
    std::cout << std::setw(10) << "rate" << std::fixed << std::setprecision(2);
    for (const auto& v : res.rates[r]) {
      if (v) std::cout << std::setw(12) << *v;
      else std::cout << std::setw(12) << "exact";
    }
    std::cout << "\n" << std::scientific << std::setprecision(3);
  }
  std::cout << std::defaultfloat;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polytopal dG solver for thermo-poroelastic waves"};
  app.require_subcommand(1);

  std::string config_path;
  auto* conv = app.add_subcommand("convergence", "manufactured-solution convergence study");
  conv->add_option("config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);

  auto* sim = app.add_subcommand("simulate", "wave propagation run with point sources");
  sim->add_option("config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);

  std::string dir_a, dir_b, out_dir = "compare";
  auto* cmp = app.add_subcommand("compare", "difference fields of two snapshot directories");
  cmp->add_option("snapshots-A", dir_a)->required()->check(CLI::ExistingDirectory);
  cmp->add_option("snapshots-B", dir_b)->required()->check(CLI::ExistingDirectory);
  cmp->add_option("-o,--output", out_dir, "directory for diff_<k>.csv");

  auto* val = app.add_subcommand("validate-config", "parse and check a configuration");
  val->add_option("config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*val) {
      const RunConfig cfg = load_config(config_path);
      for (const auto& w : validate_config(cfg)) std::cout << "warning: " << w << "\n";
      std::cout << "ok\n";
      return 0;
    }
    if (*conv) {
      const RunConfig cfg = load_config(config_path);
      if (cfg.mode != RunMode::Convergence) throw ValidationError("config mode is not convergence");
      const auto res = run_convergence(cfg, &std::cerr);
      print_rates(res);
      for (const auto& f : res.failures) std::cout << "FAIL: " << f << "\n";
      std::cout << (res.passed() ? "PASS" : "FAIL") << " (" << (cfg.output / "rates.csv").string() << ")\n";
      return res.passed() ? 0 : 1;
    }
    if (*sim) {
      const RunConfig cfg = load_config(config_path);
      if (cfg.mode != RunMode::Simulate) throw ValidationError("config mode is not simulate");
      const auto res = run_simulate(cfg, &std::cerr);
      std::cout << "steps " << res.steps << ", dofs " << res.dofs << ", snapshots "
                << res.snapshot_steps.size() << ", receivers " << res.traces.size() << " -> "
                << cfg.output.string() << "\n";
      return 0;
    }
    if (*cmp) {
      for (const auto& s : compare_snapshots(dir_a, dir_b, out_dir))
        std::cout << s.snapshot << ": max |dv| = " << s.max_difference << ", max |v| = " << s.max_magnitude
                  << ", ratio = " << (s.max_magnitude > 0 ? s.max_difference / s.max_magnitude : 0.0)
                  << ", mean cos = " << s.mean_cosine << "\n";
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
