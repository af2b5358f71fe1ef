#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "adaptflow/driver.hpp"
#include "adaptflow/snapshot.hpp"
#include "adaptflow/unigrid.hpp"

namespace {

using namespace adaptflow;

void add_run_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path,
                     std::string& method) {
  cmd->add_option("--config", config_path, "key=value configuration file");
  cmd->add_option("--case", cfg.case_name, "benchmark case name");
  cmd->add_option("--method", method, "fv|mr|mrlt|amr|amrlt");
  cmd->add_option("--level", cfg.level, "target resolution level (2^L cells per axis)");
  cmd->add_option("--ni", cfg.n_steps, "time step count override");
  cmd->add_option("--eps", cfg.eps, "multiresolution detail threshold");
  cmd->add_option("--eps-rho", cfg.eps_rho, "density gradient threshold");
  cmd->add_option("--eps-p", cfg.eps_p, "pressure gradient threshold");
  cmd->add_option("--eta-tol", cfg.eta_tol, "clustering efficiency threshold");
  cmd->add_option("--ref-level", cfg.ref_level,
                  "reference level for error evaluation (-1: case default)");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--cache-dir", cfg.cache_dir, "reference snapshot cache directory");
  cmd->add_option("--dump-every", cfg.dump_every,
                  "mesh structure dump cadence in finest steps");
  cmd->add_option("--flux", cfg.flux, "ausm_plus|ausmdv");
  cmd->add_option("--limiter", cfg.limiter, "van_albada|minmod");
  cmd->add_option("--integrator", cfg.integrator, "rk2|muscl_hancock");
  cmd->add_option("--lt-level-gap", cfg.lt_level_gap,
                  "max substep depth of mr local time stepping");
  cmd->add_flag("--no-flux-correction,!--flux-correction", cfg.flux_correction,
                "disable conservative coarse-fine flux replacement")
      ->default_val(true);
}

RunConfig finalize_config(const CLI::App* cmd, RunConfig cli_values,
                          const std::string& config_path, const std::string& method) {
  RunConfig cfg = cli_values;
  if (!config_path.empty()) {
    cfg = parse_config_file(config_path);
    // Command line wins over the file for every option that was given.
    RunConfig defaults;
    auto given = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (given("--case")) cfg.case_name = cli_values.case_name;
    if (given("--level")) cfg.level = cli_values.level;
    if (given("--ni")) cfg.n_steps = cli_values.n_steps;
    if (given("--eps")) cfg.eps = cli_values.eps;
    if (given("--eps-rho")) cfg.eps_rho = cli_values.eps_rho;
    if (given("--eps-p")) cfg.eps_p = cli_values.eps_p;
    if (given("--eta-tol")) cfg.eta_tol = cli_values.eta_tol;
    if (given("--ref-level")) cfg.ref_level = cli_values.ref_level;
    if (given("--out")) cfg.out_dir = cli_values.out_dir;
    if (given("--cache-dir")) cfg.cache_dir = cli_values.cache_dir;
    if (given("--dump-every")) cfg.dump_every = cli_values.dump_every;
    if (given("--flux")) cfg.flux = cli_values.flux;
    if (given("--limiter")) cfg.limiter = cli_values.limiter;
    if (given("--integrator")) cfg.integrator = cli_values.integrator;
    if (given("--lt-level-gap")) cfg.lt_level_gap = cli_values.lt_level_gap;
    if (given("--no-flux-correction") || given("--flux-correction"))
      cfg.flux_correction = cli_values.flux_correction;
  }
  if (!method.empty() || config_path.empty()) {
    if (!method.empty()) cfg.method = method_from_string(method);
  }
  if (cfg.cache_dir.empty())
    if (const char* env = std::getenv("ADAPTFLOW_CACHE_DIR")) cfg.cache_dir = env;
  return cfg;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const NonPhysicalState*>(&e)) return 3;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const BadDomain*>(&e))
    return 2;
  return 4;
}

std::vector<Method> parse_methods(const std::string& csv) {
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(method_from_string(item));
  if (out.empty()) throw ConfigError("empty method list");
  return out;
}

std::vector<int> parse_levels(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  if (out.empty()) throw ConfigError("empty level list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptflow: adaptive finite volume solvers for the compressible "
               "Euler equations"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  std::string run_config_path, run_method;
  CLI::App* run_cmd = app.add_subcommand("run", "execute a single solver run");
  add_run_options(run_cmd, run_cfg, run_config_path, run_method);

  RunConfig sweep_cfg;
  std::string sweep_config_path, sweep_method_unused;
  std::string sweep_methods = "fv,mr,mrlt,amr,amrlt";
  std::string sweep_levels = "5,6,7";
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run a method x level matrix and tabulate rates");
  add_run_options(sweep_cmd, sweep_cfg, sweep_config_path, sweep_method_unused);
  sweep_cmd->add_option("--methods", sweep_methods, "comma separated method list");
  sweep_cmd->add_option("--levels", sweep_levels, "comma separated level list");

  std::string ref_case = "lax_liu_6", ref_preset = "mr", ref_cache;
  int ref_level = -1;
  CLI::App* ref_cmd =
      app.add_subcommand("reference", "build (and cache) a uniform reference solution");
  ref_cmd->add_option("--case", ref_case, "benchmark case name");
  ref_cmd->add_option("--level", ref_level, "reference level (-1: case default)");
  ref_cmd->add_option("--preset", ref_preset, "scheme family preset: mr|amr");
  ref_cmd->add_option("--cache-dir", ref_cache, "cache directory");

  std::string cmp_a, cmp_b;
  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "L1 difference table of two snapshots");
  cmp_cmd->add_option("a", cmp_a, "snapshot file")->required();
  cmp_cmd->add_option("b", cmp_b, "snapshot file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const RunConfig cfg =
          finalize_config(run_cmd, run_cfg, run_config_path, run_method);
      const RunOutcome out = run_single(cfg);
      std::cout << report_csv_header() << '\n'
                << report_csv_row(out.report, out.rates ? &*out.rates : nullptr)
                << '\n';
      return 0;
    }
    if (sweep_cmd->parsed()) {
      RunConfig cfg =
          finalize_config(sweep_cmd, sweep_cfg, sweep_config_path, sweep_method_unused);
      const SweepResult result =
          run_sweep(cfg, parse_methods(sweep_methods), parse_levels(sweep_levels));
      std::cout << result.table;
      if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        write_text_file(cfg.out_dir + "/sweep.csv", result.csv);
        write_text_file(cfg.out_dir + "/sweep_table.txt", result.table);
      } else {
        std::cout << result.csv;
      }
      return result.all_ok ? 0 : 3;
    }
    if (ref_cmd->parsed()) {
      const CaseSpec& spec = find_case(ref_case);
      if (ref_cache.empty())
        if (const char* env = std::getenv("ADAPTFLOW_CACHE_DIR")) ref_cache = env;
      if (ref_cache.empty()) ref_cache = ".adaptflow_cache";
      const int level = ref_level > 0 ? ref_level : spec.default_reference_level;
      const SchemeConfig scheme =
          ref_preset == "amr" ? SchemeConfig::amr_preset() : SchemeConfig::mr_preset();
      reference_solution(spec, level, scheme, ref_cache);
      std::cout << "reference ready: "
                << reference_cache_path(spec, level, scheme, ref_cache) << '\n';
      return 0;
    }
    if (cmp_cmd->parsed()) {
      Snapshot a = read_snapshot(cmp_a);
      Snapshot b = read_snapshot(cmp_b);
      if (a.grid.level() < b.grid.level()) std::swap(a, b);
      const ConservedState d = l1_error(b.grid, a.grid);
      std::cout << "component,l1\n";
      std::cout << "rho," << d.rho << '\n';
      for (int c = 0; c < b.grid.dim(); ++c)
        std::cout << "mom" << c << ',' << d.mom[c] << '\n';
      std::cout << "rhoE," << d.rhoE << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 2;
}
