#include "adaptflow/unigrid.hpp"

#include <chrono>

namespace adaptflow {

UniformRunResult run_uniform(const CaseSpec& spec, int level, long n_steps,
                             const SchemeConfig& scheme, const StepCallback& on_step) {
  UniformRunResult out;
  out.grid = UniformGrid(spec.dim, level, spec.origin, spec.extent);
  init_case(spec, out.grid);

  RunReport& rep = out.report;
  rep.method = Method::FV;
  rep.case_name = spec.name;
  rep.level = level;
  rep.n_steps = n_steps;
  rep.preset_scheme = scheme.is_preset();

  const double dt = spec.t_end / static_cast<double>(n_steps);
  const double dx = out.grid.dx();
  const long n_c = out.grid.block().interior_cells();
  rep.cells_per_step.assign(static_cast<size_t>(n_steps), n_c);
  rep.leaves_per_step.assign(static_cast<size_t>(n_steps), n_c);

  auto refill = [&](BlockData& b) {
    TaskTimers::Scope t(rep.timers, TaskGroup::Ghost);
    fill_ghosts(b, spec.bc);
  };

  using clock = std::chrono::steady_clock;
  double wall = 0.0;
  for (long step = 0; step < n_steps; ++step) {
    const auto t0 = clock::now();
    refill(out.grid.block());
    StepDiag diag;
    try {
      TaskTimers::Scope t(rep.timers, TaskGroup::Numerics);
      diag = step_block(out.grid.block(), dx, dt, scheme, spec.gas, refill, nullptr);
    } catch (const NonPhysicalState& e) {
      throw NonPhysicalState("step " + std::to_string(step) + ": " + e.what());
    }
    rep.max_cfl = std::max(rep.max_cfl, diag.max_wave_speed * dt / dx);
    rep.fallbacks += diag.fallbacks;
    wall += std::chrono::duration<double>(clock::now() - t0).count();
    if (on_step) on_step(step, out.grid);
  }
  rep.wall_seconds = wall;
  return out;
}

}  // namespace adaptflow
