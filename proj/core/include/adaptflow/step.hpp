#ifndef ADAPTFLOW_STEP_HPP
#define ADAPTFLOW_STEP_HPP

#include <array>
#include <functional>
#include <vector>

#include "adaptflow/grid.hpp"
#include "adaptflow/scheme.hpp"

namespace adaptflow {

/// Per-face numerical fluxes of one block, one array per axis. Face i along
/// an axis separates cells i-1 and i; valid face indices run 0..n_axis.
/// Interior faces carry exactly one stored flux shared by both cells.
class FluxField {
 public:
  FluxField() = default;
  FluxField(int dim, const std::array<int, 3>& n) : dim_(dim), n_(n) {
    if (dim == 2) n_[2] = 1;
    for (int a = 0; a < 3; ++a) {
      std::array<int, 3> fn = n_;
      fn[a] += 1;
      size_[a] = fn;
      stride_[a] = {1, fn[0], fn[0] * fn[1]};
      flux_[a].assign(static_cast<size_t>(fn[0]) * fn[1] * fn[2], FluxVector{});
    }
  }

  int dim() const { return dim_; }
  const std::array<int, 3>& cells() const { return n_; }

  FluxVector& face(int axis, int i, int j, int k = 0) {
    return flux_[axis][idx(axis, i, j, k)];
  }
  const FluxVector& face(int axis, int i, int j, int k = 0) const {
    return flux_[axis][idx(axis, i, j, k)];
  }

 private:
  size_t idx(int axis, int i, int j, int k) const {
    return static_cast<size_t>(i) + static_cast<size_t>(j) * stride_[axis][1] +
           static_cast<size_t>(k) * stride_[axis][2];
  }
  int dim_ = 2;
  std::array<int, 3> n_ = {0, 0, 1};
  std::array<std::array<int, 3>, 3> size_ = {};
  std::array<std::array<long, 3>, 3> stride_ = {};
  std::array<std::vector<FluxVector>, 3> flux_;
};

struct StepDiag {
  double max_wave_speed = 0.0;  // max over cells and axes of |v_a| + c at stage entry
  long fallbacks = 0;           // first-order reconstruction fallbacks
};

/// One Runge-Kutta stage of the semi-discrete finite volume form:
/// out = base + stage_dt * rhs(eval). Ghosts of `eval` must be filled.
/// With `capture` set the stage's numerical fluxes are stored.
/// The explicit midpoint scheme is stage(base, base, mid, dt/2) followed by
/// stage(base, mid, out, dt) after refilling mid's ghosts.
StepDiag rk2_stage(const BlockData& base, const BlockData& eval, BlockData& out, double dx,
                   double stage_dt, const SchemeConfig& cfg, const GasModel& gas,
                   FluxField* capture = nullptr);

/// MUSCL-Hancock step: cell-local half-step predictor using physical fluxes
/// of the reconstructed face states, then a full conservative corrector with
/// the configured numerical flux. Needs one ghost fill on entry only.
/// `in` and `out` may alias. Captured fluxes are the corrector fluxes.
StepDiag muscl_hancock_step(const BlockData& in, BlockData& out, double dx, double dt,
                            const SchemeConfig& cfg, const GasModel& gas,
                            FluxField* capture = nullptr);

/// Advances one block by dt with the configured integrator. `refill` is
/// invoked to fill the ghost layers of intermediate stage states (RK2 only).
/// Ghosts of `u` must be filled on entry; they are stale on exit.
StepDiag step_block(BlockData& u, double dx, double dt, const SchemeConfig& cfg,
                    const GasModel& gas, const std::function<void(BlockData&)>& refill,
                    FluxField* capture = nullptr);

}  // namespace adaptflow

#endif  // ADAPTFLOW_STEP_HPP
