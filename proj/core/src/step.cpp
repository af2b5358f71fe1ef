#include "adaptflow/step.hpp"

#include <cmath>
#include <string>

namespace adaptflow {

namespace {

std::string cell_str(int i, int j, int k, int dim) {
  std::string s = "(" + std::to_string(i) + "," + std::to_string(j);
  if (dim == 3) s += "," + std::to_string(k);
  return s + ")";
}

// Decomposes every cell (ghosts included) into primitives, checking
// positivity. Returns the max signal speed over interior cells.
double build_primitives(const BlockData& b, const GasModel& gas,
                        std::vector<Primitives>& w) {
  w.resize(static_cast<size_t>(b.size()));
  const int g = b.ghost();
  const int gz = b.ghost_along(2);
  const auto& n = b.n();
  double max_speed = 0.0;
  for (int k = -gz; k < n[2] + gz; ++k)
    for (int j = -g; j < n[1] + g; ++j)
      for (int i = -g; i < n[0] + g; ++i) {
        const long idx = b.index(i, j, k);
        const ConservedState& q = b.data()[idx];
        const Primitives p = primitives_unguarded(q, gas);
        if (!(q.rho > kPositivityTol) || !physical(p)) {
          const bool ghost =
              i < 0 || i >= n[0] || j < 0 || j >= n[1] || k < 0 || k >= n[2];
          throw NonPhysicalState("cell " + cell_str(i, j, k, b.dim()) +
                                 (ghost ? " (ghost)" : "") +
                                 ": rho=" + std::to_string(q.rho) +
                                 " p=" + std::to_string(p.p));
        }
        w[idx] = p;
        const bool interior =
            i >= 0 && i < n[0] && j >= 0 && j < n[1] && k >= 0 && k < n[2];
        if (interior) {
          const double c = sound_speed(p, gas);
          for (int a = 0; a < b.dim(); ++a)
            max_speed = std::max(max_speed, std::abs(p.v[a]) + c);
        }
      }
  return max_speed;
}

inline void transverse_axes(int axis, int& t1, int& t2) {
  t1 = axis == 0 ? 1 : 0;
  t2 = axis == 2 ? 1 : 2;
}

// Axis-summed flux differences: rhs_i = sum_axis (F_minus - F_plus) / dx.
void accumulate_rhs(const BlockData& eval, const std::vector<Primitives>& w, double dx,
                    const SchemeConfig& cfg, const GasModel& gas,
                    std::vector<ConservedState>& rhs, FluxField* capture,
                    long* fallbacks) {
  const auto& n = eval.n();
  const double inv_dx = 1.0 / dx;
  rhs.assign(static_cast<size_t>(eval.size()), ConservedState{});
  const ConservedState* q = eval.data();

  for (int axis = 0; axis < eval.dim(); ++axis) {
    const long s = eval.stride(axis);
    int t1, t2;
    transverse_axes(axis, t1, t2);
    std::array<int, 3> c;
    for (c[t2] = 0; c[t2] < n[t2]; ++c[t2])
      for (c[t1] = 0; c[t1] < n[t1]; ++c[t1]) {
        c[axis] = 0;
        const long base = eval.index(c[0], c[1], c[2]);
        for (int f = 0; f <= n[axis]; ++f) {
          const long cell = base + static_cast<long>(f) * s;
          const FluxVector flux =
              detail::face_flux_w(q[cell - s], q[cell], w[cell - 2 * s], w[cell - s],
                                  w[cell], w[cell + s], axis, cfg, gas, fallbacks);
          if (f > 0) rhs[cell - s] -= flux * inv_dx;
          if (f < n[axis]) rhs[cell] += flux * inv_dx;
          if (capture) {
            c[axis] = f;
            capture->face(axis, c[0], c[1], c[2]) = flux;
          }
        }
      }
  }
}

}  // namespace

StepDiag rk2_stage(const BlockData& base, const BlockData& eval, BlockData& out, double dx,
                   double stage_dt, const SchemeConfig& cfg, const GasModel& gas,
                   FluxField* capture) {
  StepDiag diag;
  std::vector<Primitives> w;
  diag.max_wave_speed = build_primitives(eval, gas, w);
  std::vector<ConservedState> rhs;
  accumulate_rhs(eval, w, dx, cfg, gas, rhs, capture, &diag.fallbacks);
  const auto& n = base.n();
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const long idx = base.index(i, j, k);
        out.data()[idx] = base.data()[idx] + rhs[idx] * stage_dt;
      }
  return diag;
}

namespace {

// Limited per-axis face extrapolations of one cell in primitive variables.
struct AxisRecon {
  Primitives minus, plus;
  bool fallback = false;
};

inline AxisRecon recon_cell_axis(const Primitives& wm, const Primitives& w0,
                                 const Primitives& wp, LimiterKind kind) {
  AxisRecon r;
  auto half_slope = [&](double a, double b) { return 0.5 * limiter(kind, a, b); };
  const double sr = half_slope(w0.rho - wm.rho, wp.rho - w0.rho);
  const double sp = half_slope(w0.p - wm.p, wp.p - w0.p);
  r.minus.rho = w0.rho - sr;
  r.plus.rho = w0.rho + sr;
  r.minus.p = w0.p - sp;
  r.plus.p = w0.p + sp;
  for (int a = 0; a < 3; ++a) {
    const double sv = half_slope(w0.v[a] - wm.v[a], wp.v[a] - w0.v[a]);
    r.minus.v[a] = w0.v[a] - sv;
    r.plus.v[a] = w0.v[a] + sv;
  }
  if (!physical(r.minus) || !physical(r.plus)) {
    r.minus = w0;
    r.plus = w0;
    r.fallback = true;
  }
  return r;
}

inline bool physical_state(const ConservedState& q, const GasModel& gas) {
  if (!(q.rho > kPositivityTol)) return false;
  return physical(primitives_unguarded(q, gas));
}

}  // namespace

StepDiag muscl_hancock_step(const BlockData& in, BlockData& out, double dx, double dt,
                            const SchemeConfig& cfg, const GasModel& gas,
                            FluxField* capture) {
  StepDiag diag;
  std::vector<Primitives> w;
  diag.max_wave_speed = build_primitives(in, gas, w);

  const auto& n = in.n();
  const int dim = in.dim();
  const double half_dt_dx = 0.5 * dt / dx;
  const int ez = dim == 3 ? 1 : 0;  // predictor halo along active axes only
  const ConservedState* q = in.data();

  // Half-step predictor: cell-local update from the physical fluxes of the
  // reconstructed face states, over interior plus one halo layer.
  std::vector<ConservedState> du(static_cast<size_t>(in.size()), ConservedState{});
  for (int k = -ez; k < n[2] + ez; ++k)
    for (int j = -1; j < n[1] + 1; ++j)
      for (int i = -1; i < n[0] + 1; ++i) {
        const long c = in.index(i, j, k);
        ConservedState acc{};
        for (int axis = 0; axis < dim; ++axis) {
          const long s = in.stride(axis);
          const AxisRecon r = recon_cell_axis(w[c - s], w[c], w[c + s], cfg.limiter);
          if (r.fallback) {
            ++diag.fallbacks;
            continue;  // zero slopes: no predictor contribution on this axis
          }
          const ConservedState um = conserved(r.minus, gas);
          const ConservedState up = conserved(r.plus, gas);
          acc -= (physical_flux(up, r.plus, axis) - physical_flux(um, r.minus, axis)) *
                 half_dt_dx;
        }
        du[c] = acc;
      }

  // Corrector: numerical fluxes of the time-advanced face states, full step.
  std::vector<ConservedState> rhs(static_cast<size_t>(in.size()), ConservedState{});
  const double inv_dx = 1.0 / dx;
  for (int axis = 0; axis < dim; ++axis) {
    const long s = in.stride(axis);
    int t1, t2;
    transverse_axes(axis, t1, t2);
    std::array<int, 3> c;
    for (c[t2] = 0; c[t2] < n[t2]; ++c[t2])
      for (c[t1] = 0; c[t1] < n[t1]; ++c[t1]) {
        c[axis] = 0;
        const long base = in.index(c[0], c[1], c[2]);
        for (int f = 0; f <= n[axis]; ++f) {
          const long cl = base + static_cast<long>(f - 1) * s;
          const long cr = cl + s;
          const AxisRecon rl = recon_cell_axis(w[cl - s], w[cl], w[cl + s], cfg.limiter);
          const AxisRecon rr = recon_cell_axis(w[cr - s], w[cr], w[cr + s], cfg.limiter);

          ConservedState ul = conserved(rl.plus, gas) + du[cl];
          ConservedState ur = conserved(rr.minus, gas) + du[cr];
          if (!physical_state(ul, gas)) {
            ul = q[cl] + du[cl];
            if (!physical_state(ul, gas)) ul = q[cl];
            ++diag.fallbacks;
          }
          if (!physical_state(ur, gas)) {
            ur = q[cr] + du[cr];
            if (!physical_state(ur, gas)) ur = q[cr];
            ++diag.fallbacks;
          }
          const FluxVector flux =
              detail::numerical_flux_w(cfg.flux, ul, primitives_unguarded(ul, gas), ur,
                                       primitives_unguarded(ur, gas), axis, gas);
          if (f > 0) rhs[cl] -= flux * inv_dx;
          if (f < n[axis]) rhs[cr] += flux * inv_dx;
          if (capture) {
            c[axis] = f;
            capture->face(axis, c[0], c[1], c[2]) = flux;
          }
        }
      }
  }

  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const long idx = in.index(i, j, k);
        out.data()[idx] = in.data()[idx] + rhs[idx] * dt;
      }
  return diag;
}

StepDiag step_block(BlockData& u, double dx, double dt, const SchemeConfig& cfg,
                    const GasModel& gas, const std::function<void(BlockData&)>& refill,
                    FluxField* capture) {
  if (cfg.integrator == IntegratorKind::MusclHancock)
    return muscl_hancock_step(u, u, dx, dt, cfg, gas, capture);

  BlockData mid = u;
  StepDiag d1 = rk2_stage(u, u, mid, dx, 0.5 * dt, cfg, gas, nullptr);
  refill(mid);
  StepDiag d2 = rk2_stage(u, mid, u, dx, dt, cfg, gas, capture);
  StepDiag diag;
  diag.max_wave_speed = std::max(d1.max_wave_speed, d2.max_wave_speed);
  diag.fallbacks = d1.fallbacks + d2.fallbacks;
  return diag;
}

}  // namespace adaptflow
