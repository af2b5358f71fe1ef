#include "adaptflow/scheme.hpp"

#include <algorithm>

namespace adaptflow {

std::string to_string(FluxKind k) {
  return k == FluxKind::AusmPlus ? "ausm_plus" : "ausmdv";
}
std::string to_string(LimiterKind k) {
  return k == LimiterKind::VanAlbada ? "van_albada" : "minmod";
}
std::string to_string(IntegratorKind k) {
  return k == IntegratorKind::RK2 ? "rk2" : "muscl_hancock";
}

namespace detail {

ReconResult muscl_recon(const Primitives& wm1, const Primitives& w0, const Primitives& wp1,
                        const Primitives& wp2, LimiterKind kind) {
  ReconResult r;
  r.left.rho = w0.rho + 0.5 * limiter(kind, w0.rho - wm1.rho, wp1.rho - w0.rho);
  r.right.rho = wp1.rho - 0.5 * limiter(kind, wp1.rho - w0.rho, wp2.rho - wp1.rho);
  r.left.p = w0.p + 0.5 * limiter(kind, w0.p - wm1.p, wp1.p - w0.p);
  r.right.p = wp1.p - 0.5 * limiter(kind, wp1.p - w0.p, wp2.p - wp1.p);
  for (int a = 0; a < 3; ++a) {
    r.left.v[a] = w0.v[a] + 0.5 * limiter(kind, w0.v[a] - wm1.v[a], wp1.v[a] - w0.v[a]);
    r.right.v[a] = wp1.v[a] - 0.5 * limiter(kind, wp1.v[a] - w0.v[a], wp2.v[a] - wp1.v[a]);
  }
  r.fallback = !physical(r.left) || !physical(r.right);
  return r;
}

namespace {

// AUSM+ split polynomials (degree 4 Mach, degree 5 pressure).
constexpr double kAusmAlpha = 3.0 / 16.0;
constexpr double kAusmBeta = 1.0 / 8.0;

inline double mach_plus(double m) {
  if (std::abs(m) >= 1.0) return 0.5 * (m + std::abs(m));
  const double a = 0.25 * (m + 1.0) * (m + 1.0);
  const double b = (m * m - 1.0);
  return a + kAusmBeta * b * b;
}

inline double mach_minus(double m) {
  if (std::abs(m) >= 1.0) return 0.5 * (m - std::abs(m));
  const double a = -0.25 * (m - 1.0) * (m - 1.0);
  const double b = (m * m - 1.0);
  return a - kAusmBeta * b * b;
}

inline double pressure_plus(double m) {
  if (std::abs(m) >= 1.0) return m > 0.0 ? 1.0 : 0.0;
  const double b = (m * m - 1.0);
  return 0.25 * (m + 1.0) * (m + 1.0) * (2.0 - m) + kAusmAlpha * m * b * b;
}

inline double pressure_minus(double m) {
  if (std::abs(m) >= 1.0) return m < 0.0 ? 1.0 : 0.0;
  const double b = (m * m - 1.0);
  return 0.25 * (m - 1.0) * (m - 1.0) * (2.0 + m) - kAusmAlpha * m * b * b;
}

}  // namespace

FluxVector ausm_plus_w(const ConservedState& ql, const Primitives& wl,
                       const ConservedState& qr, const Primitives& wr, int axis,
                       const GasModel& gas) {
  const double al = sound_speed(wl, gas);
  const double ar = sound_speed(wr, gas);
  const double a_half = 0.5 * (al + ar);

  const double ml = wl.v[axis] / a_half;
  const double mr = wr.v[axis] / a_half;
  const double m_half = mach_plus(ml) + mach_minus(mr);
  const double p_half = pressure_plus(ml) * wl.p + pressure_minus(mr) * wr.p;

  const double mdot = a_half * (m_half > 0.0 ? m_half * wl.rho : m_half * wr.rho);

  const Primitives& wu = m_half > 0.0 ? wl : wr;
  const ConservedState& qu = m_half > 0.0 ? ql : qr;
  const double enthalpy = (qu.rhoE + wu.p) / wu.rho;

  FluxVector f;
  f.rho = mdot;
  f.mom[0] = mdot * wu.v[0];
  f.mom[1] = mdot * wu.v[1];
  f.mom[2] = mdot * wu.v[2];
  f.mom[axis] += p_half;
  f.rhoE = mdot * enthalpy;
  return f;
}

FluxVector ausmdv_w(const ConservedState& ql, const Primitives& wl, const ConservedState& qr,
                    const Primitives& wr, int axis, const GasModel& gas) {
  const double ul = wl.v[axis];
  const double ur = wr.v[axis];
  const double am = std::max(sound_speed(wl, gas), sound_speed(wr, gas));

  // Weights biased toward the side with the lower p/rho.
  const double pol = wl.p / wl.rho;
  const double por = wr.p / wr.rho;
  const double alpha_l = 2.0 * pol / (pol + por);
  const double alpha_r = 2.0 * por / (pol + por);

  double u_plus, u_minus;  // split normal velocities (mass flux)
  double p_plus, p_minus;  // split pressures
  if (std::abs(ul) <= am) {
    const double t = (ul + am) / (2.0 * am);
    u_plus = alpha_l * ((ul + am) * (ul + am) / (4.0 * am) - 0.5 * (ul + std::abs(ul))) +
             0.5 * (ul + std::abs(ul));
    p_plus = wl.p * t * t * (2.0 - ul / am);
  } else {
    u_plus = 0.5 * (ul + std::abs(ul));
    p_plus = ul > 0.0 ? wl.p : 0.0;
  }
  if (std::abs(ur) <= am) {
    const double t = (ur - am) / (2.0 * am);
    u_minus = alpha_r * (-(ur - am) * (ur - am) / (4.0 * am) - 0.5 * (ur - std::abs(ur))) +
              0.5 * (ur - std::abs(ur));
    p_minus = wr.p * t * t * (2.0 + ur / am);
  } else {
    u_minus = 0.5 * (ur - std::abs(ur));
    p_minus = ur < 0.0 ? wr.p : 0.0;
  }

  const double mdot = u_plus * wl.rho + u_minus * wr.rho;
  const double p_half = p_plus + p_minus;

  // Normal momentum: blend of AUSMV and AUSMD driven by the pressure jump.
  constexpr double kSwitch = 10.0;
  const double s =
      0.5 * std::min(1.0, kSwitch * std::abs(wr.p - wl.p) / std::min(wl.p, wr.p));
  const double mom_v = u_plus * ql.mom[axis] + u_minus * qr.mom[axis];
  const double mom_d = 0.5 * (mdot * (ul + ur) - std::abs(mdot) * (ur - ul));
  const double mom_n = (0.5 + s) * mom_v + (0.5 - s) * mom_d;

  auto upwind = [&](double a, double b) {
    return 0.5 * (mdot * (a + b) - std::abs(mdot) * (b - a));
  };

  const double hl = (ql.rhoE + wl.p) / wl.rho;
  const double hr = (qr.rhoE + wr.p) / wr.rho;

  FluxVector f;
  f.rho = mdot;
  for (int a = 0; a < 3; ++a) f.mom[a] = upwind(wl.v[a], wr.v[a]);
  f.mom[axis] = mom_n + p_half;
  f.rhoE = upwind(hl, hr);
  return f;
}

FluxVector face_flux_w(const ConservedState& q0, const ConservedState& qp1,
                       const Primitives& wm1, const Primitives& w0, const Primitives& wp1,
                       const Primitives& wp2, int axis, const SchemeConfig& cfg,
                       const GasModel& gas, long* fallback_count) {
  const ReconResult r = muscl_recon(wm1, w0, wp1, wp2, cfg.limiter);
  if (r.fallback) {
    if (fallback_count) ++(*fallback_count);
    return numerical_flux_w(cfg.flux, q0, w0, qp1, wp1, axis, gas);
  }
  const ConservedState ql = conserved(r.left, gas);
  const ConservedState qr = conserved(r.right, gas);
  return numerical_flux_w(cfg.flux, ql, r.left, qr, r.right, axis, gas);
}

}  // namespace detail

FaceStates muscl_states(const ConservedState& qm1, const ConservedState& q0,
                        const ConservedState& qp1, const ConservedState& qp2,
                        LimiterKind kind, const GasModel& gas) {
  const Primitives w0 = primitives(q0, gas);
  const Primitives w1 = primitives(qp1, gas);
  const Primitives wm = primitives_unguarded(qm1, gas);
  const Primitives wp = primitives_unguarded(qp2, gas);
  const detail::ReconResult r = detail::muscl_recon(wm, w0, w1, wp, kind);

  FaceStates out;
  if (r.fallback) {
    out.left = q0;
    out.right = qp1;
    out.fallback = true;
    return out;
  }
  out.left = conserved(r.left, gas);
  out.right = conserved(r.right, gas);
  return out;
}

FluxVector ausm_plus(const ConservedState& ql, const ConservedState& qr, int axis,
                     const GasModel& gas) {
  return detail::ausm_plus_w(ql, primitives(ql, gas), qr, primitives(qr, gas), axis, gas);
}

FluxVector ausmdv(const ConservedState& ql, const ConservedState& qr, int axis,
                  const GasModel& gas) {
  return detail::ausmdv_w(ql, primitives(ql, gas), qr, primitives(qr, gas), axis, gas);
}

FluxVector face_flux(const ConservedState& qm1, const ConservedState& q0,
                     const ConservedState& qp1, const ConservedState& qp2, int axis,
                     const SchemeConfig& cfg, const GasModel& gas, long* fallback_count) {
  const Primitives w0 = primitives(q0, gas);
  const Primitives w1 = primitives(qp1, gas);
  const Primitives wm = primitives_unguarded(qm1, gas);
  const Primitives wp = primitives_unguarded(qp2, gas);
  return detail::face_flux_w(q0, qp1, wm, w0, w1, wp, axis, cfg, gas, fallback_count);
}

}  // namespace adaptflow
