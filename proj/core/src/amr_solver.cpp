#include "adaptflow/amr_solver.hpp"

#include <chrono>
#include <cmath>

namespace adaptflow {

int amr_base_exp(int dim, int level) {
  const int paper_base = dim == 3 ? 3 : 6;
  return std::min(paper_base, level - 1);
}

namespace {

class AmrDriver {
 public:
  AmrDriver(PatchHierarchy& h, const SchemeConfig& scheme, RunReport& rep,
            double dt_finest)
      : h_(h), scheme_(scheme), rep_(rep), dt_finest_(dt_finest) {}

  void advance(int l, double dt) {
    const bool lt = h_.options().time_refine;
    const int r = (lt && l > 0) ? 2 : 1;
    for (int sub = 0; sub < r; ++sub) {
      {
        TaskTimers::Scope ts(rep_.timers, TaskGroup::Ghost);
        h_.sync_ghosts(l, h_.level(l).t);
      }
      if ((sub > 0 || l == 0) && l < h_.options().max_levels) {
        TaskTimers::Scope ts(rep_.timers, TaskGroup::Adaptation);
        h_.remesh(l);
      }
      StepDiag diag;
      {
        TaskTimers::Scope ts(rep_.timers, TaskGroup::Numerics);
        diag = h_.update_level(l, dt, scheme_);
      }
      rep_.max_cfl = std::max(rep_.max_cfl, diag.max_wave_speed * dt / h_.dx(l));
      rep_.fallbacks += diag.fallbacks;
      if (l == h_.n_levels() - 1) sample();
      if (l + 1 < h_.n_levels()) {
        {
          TaskTimers::Scope ts(rep_.timers, TaskGroup::Ghost);
          h_.sync_ghosts(l, h_.level(l).t);
        }
        advance(l + 1, lt ? 0.5 * dt : dt);
        TaskTimers::Scope ts(rep_.timers, TaskGroup::Transfer);
        h_.average_down(l);
        h_.flux_correct(l);
      }
    }
  }

  void sample() {
    rep_.cells_per_step.push_back(h_.total_cells());
    rep_.leaves_per_step.push_back(h_.composite_cells());
  }

  void pad_samples(long expected) {
    while (static_cast<long>(rep_.cells_per_step.size()) < expected) sample();
  }

 private:
  PatchHierarchy& h_;
  SchemeConfig scheme_;
  RunReport& rep_;
  double dt_finest_;
};

}  // namespace

AmrRunResult run_amr(const CaseSpec& spec, int level, long n_steps,
                     const SchemeConfig& scheme, const AmrRunOptions& options) {
  const int base_exp = amr_base_exp(spec.dim, level);
  if (base_exp < 0)
    throw ConfigError("amr needs level >= 1, got " + std::to_string(level));

  AmrOptions opts;
  opts.max_levels = level - base_exp;
  opts.time_refine = options.time_refine;
  opts.flux_correction = options.flux_correction;
  opts.eps_rho = options.eps_rho >= 0.0 ? options.eps_rho : spec.amr_eps_rho;
  opts.eps_p = options.eps_p >= 0.0 ? options.eps_p : spec.amr_eps_p;
  opts.cluster_efficiency =
      options.eta_tol >= 0.0 ? options.eta_tol : spec.cluster_efficiency;

  AmrRunResult out;
  out.hierarchy = std::make_unique<PatchHierarchy>(spec.dim, base_exp, spec.origin,
                                                   spec.extent, spec.bc, spec.gas, opts);
  PatchHierarchy& h = *out.hierarchy;

  RunReport& rep = out.report;
  rep.method = options.time_refine ? Method::AMRLT : Method::AMR;
  rep.case_name = spec.name;
  rep.level = level;
  rep.n_steps = n_steps;
  rep.preset_scheme = scheme.is_preset();

  const double dt_finest = spec.t_end / static_cast<double>(n_steps);
  const long per_cycle = options.time_refine ? (1l << opts.max_levels) : 1;
  if (n_steps % per_cycle != 0)
    throw ConfigError("n_steps=" + std::to_string(n_steps) +
                      " is not a multiple of the " + std::to_string(per_cycle) +
                      " substeps of one time-refined cycle");
  const long cycles = n_steps / per_cycle;
  const double dt0 = options.time_refine
                         ? dt_finest * static_cast<double>(per_cycle)
                         : dt_finest;

  {
    TaskTimers::Scope ts(rep.timers, TaskGroup::Adaptation);
    h.initialize([&spec](double x, double y, double z) {
      return spec.initial_state(x, y, z);
    });
  }

  AmrDriver driver(h, scheme, rep, dt_finest);
  using clock = std::chrono::steady_clock;
  double wall = 0.0;
  for (long cycle = 0; cycle < cycles; ++cycle) {
    const auto t0 = clock::now();
    try {
      driver.advance(0, dt0);
    } catch (const NonPhysicalState& e) {
      throw NonPhysicalState("cycle " + std::to_string(cycle) + ": " + e.what());
    }
    driver.pad_samples((cycle + 1) * per_cycle);
    wall += std::chrono::duration<double>(clock::now() - t0).count();
    if (options.on_sample) options.on_sample((cycle + 1) * per_cycle, h);
  }
  rep.wall_seconds = wall;
  return out;
}

}  // namespace adaptflow
