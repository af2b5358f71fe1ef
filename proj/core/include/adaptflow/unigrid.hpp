#ifndef ADAPTFLOW_UNIGRID_HPP
#define ADAPTFLOW_UNIGRID_HPP

#include <functional>

#include "adaptflow/cases.hpp"
#include "adaptflow/metrics.hpp"
#include "adaptflow/step.hpp"

namespace adaptflow {

struct UniformRunResult {
  UniformGrid grid;
  RunReport report;
};

/// Invoked after each completed step; time spent here is excluded from the
/// reported wall time.
using StepCallback = std::function<void(long step, const UniformGrid&)>;

/// Advances the case on a uniform mesh of the given level by exactly
/// n_steps steps of size t_end / n_steps. Throws NonPhysicalState (annotated
/// with the step index) when an update produces an invalid state.
UniformRunResult run_uniform(const CaseSpec& spec, int level, long n_steps,
                             const SchemeConfig& scheme,
                             const StepCallback& on_step = nullptr);

}  // namespace adaptflow

#endif  // ADAPTFLOW_UNIGRID_HPP
