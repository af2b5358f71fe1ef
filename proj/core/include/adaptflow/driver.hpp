#ifndef ADAPTFLOW_DRIVER_HPP
#define ADAPTFLOW_DRIVER_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adaptflow/metrics.hpp"
#include "adaptflow/scheme.hpp"

namespace adaptflow {

/// One run's configuration: the plain-text key=value config file maps to
/// these fields one to one; command line flags override.
struct RunConfig {
  std::string case_name = "lax_liu_6";
  Method method = Method::FV;
  int level = 5;
  long n_steps = 0;  // 0: use the case schedule for the level
  double eps = -1.0;  // MR threshold; < 0: case default
  double eps_rho = -1.0;
  double eps_p = -1.0;
  double eta_tol = -1.0;
  int ref_level = 0;  // 0: no error evaluation, < 0: case default
  int lt_level_gap = 3;
  bool flux_correction = true;
  std::string out_dir;      // empty: no artifacts written
  std::string cache_dir;    // empty: reference caching disabled
  long dump_every = 0;      // mesh structure dumps every n finest steps
  // Scheme overrides; empty string keeps the method family's preset.
  std::string flux, limiter, integrator;
};

RunConfig parse_config_file(const std::string& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);
std::string config_to_string(const RunConfig& cfg);

/// The scheme a config resolves to: the family preset of the method with any
/// explicit overrides applied.
SchemeConfig resolve_scheme(const RunConfig& cfg);

struct RunOutcome {
  RunReport report;
  std::optional<Rates> rates;  // set when a baseline was supplied or computed
};

/// Executes one run. Writes (into out_dir, when set) the report row
/// `report.csv`, the final snapshot `final.snap`, and mesh structure dumps
/// `mesh_NNNNNNN.txt` per the dump cadence. When ref_level is set the L1
/// errors against the (cached) reference solution are computed; rates
/// additionally need `baseline`.
RunOutcome run_single(const RunConfig& cfg, const RunReport* baseline = nullptr);

struct SweepResult {
  std::vector<RunOutcome> rows;
  std::string csv;    // combined report rows
  std::string table;  // human-readable accuracy/compression/time table
  bool all_ok = true;
};

/// Runs method x level combinations of one case sequentially, computing the
/// rates of every adaptive run against the uniform baseline of its scheme
/// family at the same level. Failed runs are marked and skipped.
SweepResult run_sweep(const RunConfig& base, const std::vector<Method>& methods,
                      const std::vector<int>& levels);

}  // namespace adaptflow

#endif  // ADAPTFLOW_DRIVER_HPP
