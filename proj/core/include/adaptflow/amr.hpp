#ifndef ADAPTFLOW_AMR_HPP
#define ADAPTFLOW_AMR_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "adaptflow/grid.hpp"
#include "adaptflow/scheme.hpp"
#include "adaptflow/step.hpp"

namespace adaptflow {

/// Half-open axis-aligned cell index range [lo, hi). The z axis is [0, 1)
/// in 2D.
struct Box {
  std::array<int, 3> lo = {0, 0, 0};
  std::array<int, 3> hi = {0, 0, 1};

  bool empty() const {
    return hi[0] <= lo[0] || hi[1] <= lo[1] || hi[2] <= lo[2];
  }
  long volume() const {
    if (empty()) return 0;
    return static_cast<long>(hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  }
  int extent(int axis) const { return hi[axis] - lo[axis]; }
  bool contains(int i, int j, int k) const {
    return i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] &&
           k < hi[2];
  }
  bool contains(const Box& o) const {
    return o.lo[0] >= lo[0] && o.hi[0] <= hi[0] && o.lo[1] >= lo[1] &&
           o.hi[1] <= hi[1] && o.lo[2] >= lo[2] && o.hi[2] <= hi[2];
  }
  Box intersect(const Box& o) const {
    Box r;
    for (int a = 0; a < 3; ++a) {
      r.lo[a] = std::max(lo[a], o.lo[a]);
      r.hi[a] = std::min(hi[a], o.hi[a]);
    }
    return r;
  }
  /// Index range one level finer (factor-2 refinement).
  Box refined(int dim) const {
    Box r;
    for (int a = 0; a < dim; ++a) {
      r.lo[a] = 2 * lo[a];
      r.hi[a] = 2 * hi[a];
    }
    if (dim == 2) {
      r.lo[2] = 0;
      r.hi[2] = 1;
    } else {
      r.lo[2] = 2 * lo[2];
      r.hi[2] = 2 * hi[2];
    }
    return r;
  }
  bool operator==(const Box& o) const { return lo == o.lo && hi == o.hi; }
};

/// Dense cell mask over one level's full index space.
class IndexMask {
 public:
  IndexMask() = default;
  IndexMask(int dim, int n_per_axis)
      : dim_(dim), n_{n_per_axis, n_per_axis, dim == 3 ? n_per_axis : 1} {
    bits_.assign(static_cast<size_t>(n_[0]) * n_[1] * n_[2], 0);
  }
  int dim() const { return dim_; }
  int n(int axis) const { return n_[axis]; }
  bool get(int i, int j, int k) const { return bits_[idx(i, j, k)] != 0; }
  void set(int i, int j, int k, bool v = true) { bits_[idx(i, j, k)] = v ? 1 : 0; }
  long count() const;
  bool any() const;
  void set_box(const Box& b);
  /// Grows the set region by `radius` cells (Chebyshev metric), wrapping
  /// periodic axes and clipping at non-periodic boundaries.
  IndexMask dilated(int radius, const BoundaryCondition& bc) const;

 private:
  size_t idx(int i, int j, int k) const {
    return static_cast<size_t>(i) +
           static_cast<size_t>(n_[0]) * (j + static_cast<size_t>(n_[1]) * k);
  }
  int dim_ = 2;
  std::array<int, 3> n_ = {0, 0, 1};
  std::vector<uint8_t> bits_;
};

/// Scaled-gradient refinement flags: a cell is flagged when any forward
/// difference of density or pressure over the 2^d-1 forward offsets exceeds
/// its threshold; the mask is then dilated by one buffer cell.
/// `data` must have its ghosts filled; flags are written for the cells of
/// `box` (level index space) into `mask`.
void flag_cells(const BlockData& data, const Box& box, const GasModel& gas,
                double eps_rho, double eps_p, IndexMask& mask);

/// Signature-based recursive bisection clustering. Produces disjoint boxes
/// covering every set cell, each with flagged/total >= efficiency (single
/// flagged cells are always accepted). Boxes never cross cells outside
/// `allowed` when that mask is given.
std::vector<Box> cluster(const IndexMask& flags, double efficiency,
                         const IndexMask* allowed = nullptr);

/// One rectangular block of same-level cells with ghost layers plus the
/// previous own-step state for time interpolation.
struct Patch {
  Box box;
  BlockData data;      // current state, ghosts as of the last sync
  BlockData data_old;  // state at the level's previous step (with ghosts)

  ConservedState& at(int i, int j, int k) {
    return data.at(i - box.lo[0], j - box.lo[1], k - box.lo[2]);
  }
  const ConservedState& at(int i, int j, int k) const {
    return data.at(i - box.lo[0], j - box.lo[1], k - box.lo[2]);
  }
};

struct AmrLevel {
  std::vector<Patch> patches;  // sorted by box corner, deterministic
  IndexMask domain;            // union of patch interiors
  double t = 0.0;
  double t_old = 0.0;
};

struct AmrOptions {
  double eps_rho = 0.05;
  double eps_p = 0.05;
  double cluster_efficiency = 0.8;
  bool time_refine = true;       // halve dt per level (AMRLT) vs global steps
  bool flux_correction = true;   // conservative coarse-fine flux replacement
  int max_levels = 0;            // refinement levels above the base mesh
};

/// Block-structured patch hierarchy with factor-2 refinement. Level l has
/// 2^(base_exp + l) cells per axis; `base_exp + max_levels` is the finest
/// resolution level.
class PatchHierarchy {
 public:
  PatchHierarchy() = default;
  PatchHierarchy(int dim, int base_exp, double origin, double extent,
                 const BoundaryCondition& bc, const GasModel& gas,
                 const AmrOptions& opts);

  int dim() const { return dim_; }
  int base_exp() const { return base_exp_; }
  int max_levels() const { return opts_.max_levels; }
  int n_levels() const { return static_cast<int>(levels_.size()); }
  int cells_per_axis(int level) const { return 1 << (base_exp_ + level); }
  double dx(int level) const { return extent_ / cells_per_axis(level); }
  double origin() const { return origin_; }
  double extent() const { return extent_; }
  const AmrOptions& options() const { return opts_; }
  const BoundaryCondition& bc() const { return bc_; }

  AmrLevel& level(int l) { return levels_[l]; }
  const AmrLevel& level(int l) const { return levels_[l]; }

  /// Builds level 0 from the initializer and refines level by level (the
  /// initializer fills new cells exactly) until the hierarchy is stable or
  /// fully deep.
  void initialize(const std::function<ConservedState(double, double, double)>& ic);

  /// Fills every ghost cell of every patch of the level for time `tau`:
  /// same-level copy first, then physical boundary mapping, then
  /// conservative interpolation from the coarser level's time bracket.
  void sync_ghosts(int l, double tau);

  /// Rebuilds levels l+1 .. from refinement flags, top-down for proper
  /// nesting. Level l itself is unmodified. Data is copied from previous
  /// patches where available, otherwise interpolated from level l.
  void remesh(int l);

  /// Advances every patch of the level by dt, saving the time bracket and
  /// accumulating the flux registers on both sides of coarse-fine
  /// boundaries.
  StepDiag update_level(int l, double dt, const SchemeConfig& scheme);

  /// Overwrites coarse cells covered by level l+1 with the mean of their
  /// fine children. Throws TimeMismatch when the levels are not
  /// synchronized.
  void average_down(int l);

  /// Replaces the coarse flux at refinement boundaries with the accumulated
  /// fine flux sums (no-op when flux correction is disabled).
  void flux_correct(int l);

  /// Sum of conserved quantities over the composite mesh (cells not covered
  /// by a finer level), weighted by cell volume.
  ConservedState total_conserved() const;

  long total_cells() const;
  long composite_cells() const;  // cells not covered by the next finer level

  /// True when every level's domain is contained in the coarser domain.
  bool properly_nested() const;

  /// Deterministic per-level box list with patch payload sizes.
  std::string dump_boxes() const;

  /// Copies one level, which must cover the whole domain, into a uniform
  /// grid (resolution level base_exp + l).
  UniformGrid assemble_level(int l) const;

 private:
  friend class AmrDriver;
  friend ConservedState l1_error_amr(const PatchHierarchy&, const UniformGrid&);

  struct FaceReg {
    FluxVector coarse, fine;
    bool has_coarse = false, has_fine = false;
  };

  const Patch* find_patch(int l, int i, int j, int k) const;
  Patch* find_patch(int l, int i, int j, int k);
  ConservedState coarse_interp(int l, int i, int j, int k, double theta) const;
  void rebuild_domain(int l);
  void accumulate_registers(int l, const Patch& patch, const FluxField& flux,
                            double dt, bool fine_side);
  bool map_point(int level_n, std::array<int, 3>& p, std::array<bool, 3>& flip) const;

  int dim_ = 2;
  int base_exp_ = 0;
  double origin_ = 0.0;
  double extent_ = 1.0;
  BoundaryCondition bc_;
  GasModel gas_;
  AmrOptions opts_;
  std::vector<AmrLevel> levels_;
  // registers_[l]: faces between level l (coarse) and l+1, keyed by coarse
  // cell and face.
  std::vector<std::unordered_map<uint64_t, FaceReg>> registers_;
};

ConservedState l1_error_amr(const PatchHierarchy& hierarchy,
                            const UniformGrid& reference);

}  // namespace adaptflow

#endif  // ADAPTFLOW_AMR_HPP
