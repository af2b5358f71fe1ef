#ifndef ADAPTFLOW_METRICS_HPP
#define ADAPTFLOW_METRICS_HPP

#include <array>
#include <chrono>
#include <string>
#include <vector>

#include "adaptflow/errors.hpp"
#include "adaptflow/grid.hpp"

namespace adaptflow {

class MRTree;
class PatchHierarchy;

enum class Method { FV, MR, MRLT, AMR, AMRLT };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
bool method_is_adaptive(Method m);

/// Coarse task groups for the per-run CPU time breakdown.
enum class TaskGroup { Numerics, Adaptation, Ghost, Transfer, Other };
inline constexpr int kTaskGroupCount = 5;
std::string to_string(TaskGroup g);

/// Accumulates wall time per task group. start/stop must come in matched
/// pairs per group; Scope is the RAII form.
class TaskTimers {
 public:
  void start(TaskGroup g);
  void stop(TaskGroup g);
  double seconds(TaskGroup g) const;
  double total() const;
  /// Shares of the groups in percent of the accumulated total.
  std::array<double, kTaskGroupCount> percentages() const;
  /// Throws UnbalancedTimer if any group is still running.
  void check_balanced() const;

  class Scope {
   public:
    Scope(TaskTimers& t, TaskGroup g) : timers_(&t), group_(g) { t.start(g); }
    ~Scope() {
      if (timers_) timers_->stop(group_);
    }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    TaskTimers* timers_;
    TaskGroup group_;
  };
  Scope scope(TaskGroup g) { return Scope(*this, g); }

 private:
  struct Slot {
    double accum = 0.0;
    int open = 0;
    std::chrono::steady_clock::time_point started;
  };
  std::array<Slot, kTaskGroupCount> slots_;
};

/// Everything measured during one solver run.
struct RunReport {
  Method method = Method::FV;
  std::string case_name;
  int level = 0;  // finest resolution level L (cells per axis = 2^L)
  long n_steps = 0;
  double wall_seconds = 0.0;  // compute time, snapshot I/O excluded
  double max_cfl = 0.0;
  long fallbacks = 0;
  bool preset_scheme = true;
  std::string scheme_desc;

  /// Per finest-level step: all stored cells and leaf (finest-data) cells.
  std::vector<long> cells_per_step;
  std::vector<long> leaves_per_step;

  /// L1 errors per conserved component against the reference solution
  /// (filled when a reference was supplied).
  ConservedState l1;
  bool has_l1 = false;

  TaskTimers timers;

  double sum_cells() const;
  double sum_leaves() const;
};

/// The derived performance measures of a run pair (adaptive vs uniform).
struct Rates {
  double cpu_compression = 0.0;
  double memory_compression = 0.0;
  double mesh_compression = 0.0;
  double perturbation = 0.0;
  double overhead = 0.0;
};

/// Individual rate formulas. n_c is the cell count of the finest uniform
/// mesh, fv_cell_steps = N_I * N_C of the uniform run.
double memory_compression(double sum_cells, long n_steps, double n_c);
double mesh_compression(double sum_leaves, long n_steps, double n_c);
double cpu_compression(double cpu_adaptive, double cpu_fv);
double accuracy_perturbation(double l1_fv, double l1_adaptive);
double overhead(double cpu_adaptive, double sum_leaves, double cpu_fv,
                double fv_cell_steps);

/// All five rates for an adaptive run against its uniform baseline.
Rates rates(const RunReport& adaptive, const RunReport& fv, double n_c);

/// Discrete L1 difference per component: sum over cells of |a - ref| times
/// the cell volume of `a`. The reference is restricted to a's level first
/// and must not be coarser.
ConservedState l1_error(const UniformGrid& a, const UniformGrid& reference);

/// L1 error of an adaptive tree solution: the tree is projected onto the
/// uniform mesh of the given level, the reference restricted to it.
ConservedState l1_error_mr(const MRTree& tree, const UniformGrid& reference, int level);

/// L1 error of a patch hierarchy: per-level sums over the cells not covered
/// by the next finer level, each scaled by that level's cell volume.
ConservedState l1_error_amr(const PatchHierarchy& hierarchy,
                            const UniformGrid& reference);

/// CSV serialization. The column schema is stable and documented in the
/// README; rate columns are empty when no baseline was supplied.
std::string report_csv_header();
std::string report_csv_row(const RunReport& report, const Rates* r = nullptr);

}  // namespace adaptflow

#endif  // ADAPTFLOW_METRICS_HPP
