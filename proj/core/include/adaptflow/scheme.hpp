#ifndef ADAPTFLOW_SCHEME_HPP
#define ADAPTFLOW_SCHEME_HPP

#include <array>
#include <cmath>
#include <string>

#include "adaptflow/euler.hpp"

namespace adaptflow {

enum class FluxKind { AusmPlus, Ausmdv };
enum class LimiterKind { VanAlbada, Minmod };
enum class IntegratorKind { RK2, MusclHancock };

/// Numerical scheme selection for one run. The two presets below are the
/// combinations used by the benchmark families; arbitrary mixes are allowed
/// but are flagged as non-standard in reports.
struct SchemeConfig {
  FluxKind flux = FluxKind::AusmPlus;
  LimiterKind limiter = LimiterKind::VanAlbada;
  IntegratorKind integrator = IntegratorKind::RK2;

  static SchemeConfig mr_preset() {
    return {FluxKind::AusmPlus, LimiterKind::VanAlbada, IntegratorKind::RK2};
  }
  static SchemeConfig amr_preset() {
    return {FluxKind::Ausmdv, LimiterKind::Minmod, IntegratorKind::MusclHancock};
  }
  bool is_preset() const {
    return (flux == FluxKind::AusmPlus && limiter == LimiterKind::VanAlbada &&
            integrator == IntegratorKind::RK2) ||
           (flux == FluxKind::Ausmdv && limiter == LimiterKind::Minmod &&
            integrator == IntegratorKind::MusclHancock);
  }
};

std::string to_string(FluxKind k);
std::string to_string(LimiterKind k);
std::string to_string(IntegratorKind k);

/// Limited slope from the two one-sided differences a and b.
inline double limiter(LimiterKind kind, double a, double b) {
  if (kind == LimiterKind::Minmod) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
  }
  // van Albada; the regularizer avoids 0/0 on flat data and is far below
  // truncation error.
  if (a * b <= 0.0) return 0.0;
  constexpr double delta = 1e-12;
  return a * b * (a + b) / (a * a + b * b + delta);
}

/// MUSCL face reconstruction in primitive variables. Takes the four cells
/// straddling a face (qm1, q0 | qp1, qp2) and produces the left/right face
/// states. When a reconstructed state loses positivity the face falls back
/// to the first-order pair (q0, qp1) and `fallback` is set.
struct FaceStates {
  ConservedState left;
  ConservedState right;
  bool fallback = false;
};

FaceStates muscl_states(const ConservedState& qm1, const ConservedState& q0,
                        const ConservedState& qp1, const ConservedState& qp2,
                        LimiterKind kind, const GasModel& gas);

/// AUSM+ flux vector splitting (split Mach number / pressure polynomials,
/// alpha = 3/16, beta = 1/8).
FluxVector ausm_plus(const ConservedState& ql, const ConservedState& qr, int axis,
                     const GasModel& gas);

/// AUSMDV flux vector splitting: AUSMD/AUSMV blend in the normal momentum
/// flux with the pressure-gradient based switch.
FluxVector ausmdv(const ConservedState& ql, const ConservedState& qr, int axis,
                  const GasModel& gas);

inline FluxVector numerical_flux(FluxKind kind, const ConservedState& ql,
                                 const ConservedState& qr, int axis, const GasModel& gas) {
  return kind == FluxKind::AusmPlus ? ausm_plus(ql, qr, axis, gas)
                                    : ausmdv(ql, qr, axis, gas);
}

/// Second-order face flux from a four-cell stencil: MUSCL reconstruction
/// followed by the configured numerical flux. Increments *fallback_count when
/// the reconstruction dropped to first order.
FluxVector face_flux(const ConservedState& qm1, const ConservedState& q0,
                     const ConservedState& qp1, const ConservedState& qp2, int axis,
                     const SchemeConfig& cfg, const GasModel& gas,
                     long* fallback_count = nullptr);

namespace detail {

// Hot-path variants working on pre-decomposed primitive states. Callers are
// responsible for positivity of the inputs.

struct ReconResult {
  Primitives left, right;
  bool fallback = false;
};

ReconResult muscl_recon(const Primitives& wm1, const Primitives& w0, const Primitives& wp1,
                        const Primitives& wp2, LimiterKind kind);

FluxVector ausm_plus_w(const ConservedState& ql, const Primitives& wl,
                       const ConservedState& qr, const Primitives& wr, int axis,
                       const GasModel& gas);

FluxVector ausmdv_w(const ConservedState& ql, const Primitives& wl, const ConservedState& qr,
                    const Primitives& wr, int axis, const GasModel& gas);

inline FluxVector numerical_flux_w(FluxKind kind, const ConservedState& ql,
                                   const Primitives& wl, const ConservedState& qr,
                                   const Primitives& wr, int axis, const GasModel& gas) {
  return kind == FluxKind::AusmPlus ? ausm_plus_w(ql, wl, qr, wr, axis, gas)
                                    : ausmdv_w(ql, wl, qr, wr, axis, gas);
}

/// Face flux from cached primitives. q0/qp1 are the conserved inner cells,
/// used verbatim when the reconstruction falls back to first order.
FluxVector face_flux_w(const ConservedState& q0, const ConservedState& qp1,
                       const Primitives& wm1, const Primitives& w0, const Primitives& wp1,
                       const Primitives& wp2, int axis, const SchemeConfig& cfg,
                       const GasModel& gas, long* fallback_count);

}  // namespace detail

}  // namespace adaptflow

#endif  // ADAPTFLOW_SCHEME_HPP
