#ifndef ADAPTFLOW_CASES_HPP
#define ADAPTFLOW_CASES_HPP

#include <map>
#include <string>
#include <vector>

#include "adaptflow/grid.hpp"
#include "adaptflow/scheme.hpp"

namespace adaptflow {

/// One benchmark configuration: domain, initial data, boundary conditions,
/// final time, the per-level step schedule and the default thresholds of the
/// adaptive methods.
struct CaseSpec {
  std::string name;
  int dim = 2;
  double origin = 0.0;
  double extent = 1.0;
  double t_end = 0.0;
  BoundaryCondition bc;
  GasModel gas;

  /// Steps to reach t_end per resolution level; levels outside the table
  /// extrapolate by halving/doubling per level.
  std::map<int, long> steps_per_level;

  /// Defaults for the adaptive solvers.
  double mr_epsilon = 0.0;
  double amr_eps_rho = 0.0;
  double amr_eps_p = 0.0;
  double cluster_efficiency = 0.8;

  /// Desk-scale default reference level.
  int default_reference_level = 0;

  long steps_for_level(int level) const;

  /// Initial condition as exact cell averages where the data is piecewise
  /// constant on cell-aligned interfaces; center sampling otherwise.
  ConservedState initial_state(double x, double y, double z) const;
};

/// Fills the interior of a grid with the case's initial data (cell-center
/// evaluation). Throws BadDomain when grid geometry and case disagree.
void init_case(const CaseSpec& spec, UniformGrid& grid);

/// The registered benchmark cases: "lax_liu_6" (2D four-quadrant Riemann
/// problem) and "ellipsoid3d" (rotated ellipsoidal shock).
const CaseSpec& find_case(const std::string& name);
std::vector<std::string> case_names();

/// Rotated-ellipsoid radius of the 3D case; exposed for tests.
double ellipsoid_radius(double x1, double x2, double x3);

/// Computes (or loads from the cache directory) the uniform reference
/// solution of a case at the given level with the given scheme. Cached
/// snapshots are validated against a configuration hash; a mismatch throws
/// CacheCorrupt. An empty cache_dir disables caching.
UniformGrid reference_solution(const CaseSpec& spec, int ref_level,
                               const SchemeConfig& scheme, const std::string& cache_dir);

/// Cache key/location helpers (exposed for the CLI and tests).
std::string reference_cache_path(const CaseSpec& spec, int ref_level,
                                 const SchemeConfig& scheme, const std::string& cache_dir);
std::string reference_config_string(const CaseSpec& spec, int ref_level,
                                    const SchemeConfig& scheme);

}  // namespace adaptflow

#endif  // ADAPTFLOW_CASES_HPP
