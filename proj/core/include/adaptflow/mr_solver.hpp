#ifndef ADAPTFLOW_MR_SOLVER_HPP
#define ADAPTFLOW_MR_SOLVER_HPP

#include <functional>

#include "adaptflow/cases.hpp"
#include "adaptflow/metrics.hpp"
#include "adaptflow/mr_tree.hpp"
#include "adaptflow/scheme.hpp"

namespace adaptflow {

/// Evolves a graded multiresolution tree. One instance drives one run; the
/// tree is single-writer during evolution.
class MRSolver {
 public:
  MRSolver(MRTree& tree, const SchemeConfig& scheme, const GasModel& gas);

  /// Advances every real leaf by dt with the second-order midpoint scheme.
  /// Virtual leaves must be present; they are re-predicted per stage.
  /// Interface fluxes are evaluated on the fine side; the adjacent coarse
  /// cell receives the averaged fine flux.
  void evolve_global(double dt);

  /// One local-time-stepping macro cycle: levels [0, top_level] advance by
  /// dt together, each finer level substeps twice per parent step. Fluxes at
  /// the boundary to finer levels are replaced by the accumulated fine
  /// fluxes after the substeps.
  void advance_local(int top_level, double t, double dt);

  double max_cfl() const { return max_cfl_; }
  long fallbacks() const { return fallbacks_; }

 private:
  struct Register {
    FluxVector coarse, fine;
    bool has_coarse = false, has_fine = false;
  };

  void step_levels(int lo, int hi, double t, double dt);
  void stage(int lo, int hi, const std::vector<NodeKey>& leaves, double tau,
             double stage_dt, bool register_stage, double step_dt);
  ConservedState resolve(const NodeId& pos, double tau, int lo) const;
  FluxVector face_flux_at(const NodeId& cell, int axis, int dir, double tau, int lo,
                          int hi, bool register_stage, double step_dt);
  FluxVector fine_face_average(const NodeId& cell, int axis, int dir, double tau,
                               int lo);
  void refresh_virtuals(const std::vector<NodeKey>& parents);
  void apply_registers(int coarse_level);

  MRTree& tree_;
  SchemeConfig cfg_;
  GasModel gas_;
  double max_cfl_ = 0.0;
  long fallbacks_ = 0;
  std::vector<double> t_old_, t_new_;
  std::unordered_map<uint64_t, Register> registers_;
};

struct MRRunResult {
  MRTree tree;
  RunReport report;
};

struct MROptions {
  double epsilon = 0.0;
  bool local_time = false;
  /// Bounds the substep depth of local time stepping: leaves are kept at or
  /// above level L - gap so one macro cycle spans at most 2^gap fine steps.
  int local_time_level_gap = 3;
  /// Called after adaptation, once per macro cycle (time spent excluded from
  /// the reported wall time).
  std::function<void(long fine_steps_done, const MRTree&)> on_sample;
};

/// Full adaptive run: build the initial tree from the case data, then per
/// cycle refine -> evolve -> coarsen for exactly n_steps finest-level steps.
MRRunResult run_mr(const CaseSpec& spec, int level, long n_steps,
                   const SchemeConfig& scheme, const MROptions& options);

}  // namespace adaptflow

#endif  // ADAPTFLOW_MR_SOLVER_HPP
