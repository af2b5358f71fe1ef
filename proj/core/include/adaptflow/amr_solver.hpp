#ifndef ADAPTFLOW_AMR_SOLVER_HPP
#define ADAPTFLOW_AMR_SOLVER_HPP

#include <functional>
#include <memory>

#include "adaptflow/amr.hpp"
#include "adaptflow/cases.hpp"
#include "adaptflow/metrics.hpp"

namespace adaptflow {

struct AmrRunResult {
  std::unique_ptr<PatchHierarchy> hierarchy;
  RunReport report;
};

struct AmrRunOptions {
  bool time_refine = true;      // AMRLT; false advances every level with dt
  bool flux_correction = true;  // disable only for the conservation ablation
  double eps_rho = -1.0;        // < 0: take the case defaults
  double eps_p = -1.0;
  double eta_tol = -1.0;
  std::function<void(long fine_steps_done, const PatchHierarchy&)> on_sample;
};

/// Base mesh exponent used for a target resolution level: the paper
/// configuration (64^2 in 2D, 8^3 in 3D) once the level allows it, and one
/// refinement level below the target otherwise.
int amr_base_exp(int dim, int level);

/// Full adaptive mesh refinement run to t_end in n_steps finest-level steps.
AmrRunResult run_amr(const CaseSpec& spec, int level, long n_steps,
                     const SchemeConfig& scheme, const AmrRunOptions& options);

}  // namespace adaptflow

#endif  // ADAPTFLOW_AMR_SOLVER_HPP
