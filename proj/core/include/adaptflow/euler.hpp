#ifndef ADAPTFLOW_EULER_HPP
#define ADAPTFLOW_EULER_HPP

#include <array>
#include <cmath>

#include "adaptflow/errors.hpp"

namespace adaptflow {

/// Smallest density/pressure accepted as physical. States below are rejected
/// rather than clipped.
inline constexpr double kPositivityTol = 1e-12;

/// Ideal-gas model. Only the (gamma - 1) form of the equation of state is
/// ever used; temperature and the gas constant are never materialized.
struct GasModel {
  double gamma = 1.4;
};

/// Conserved variables of one cell: density, momentum density and total
/// energy density. The momentum vector always has three slots; in 2D runs
/// the third component is identically zero.
struct ConservedState {
  double rho = 0.0;
  std::array<double, 3> mom = {0.0, 0.0, 0.0};
  double rhoE = 0.0;

  ConservedState& operator+=(const ConservedState& o) {
    rho += o.rho;
    mom[0] += o.mom[0];
    mom[1] += o.mom[1];
    mom[2] += o.mom[2];
    rhoE += o.rhoE;
    return *this;
  }
  ConservedState& operator-=(const ConservedState& o) {
    rho -= o.rho;
    mom[0] -= o.mom[0];
    mom[1] -= o.mom[1];
    mom[2] -= o.mom[2];
    rhoE -= o.rhoE;
    return *this;
  }
  ConservedState& operator*=(double s) {
    rho *= s;
    mom[0] *= s;
    mom[1] *= s;
    mom[2] *= s;
    rhoE *= s;
    return *this;
  }
};

inline ConservedState operator+(ConservedState a, const ConservedState& b) { return a += b; }
inline ConservedState operator-(ConservedState a, const ConservedState& b) { return a -= b; }
inline ConservedState operator*(ConservedState a, double s) { return a *= s; }
inline ConservedState operator*(double s, ConservedState a) { return a *= s; }

/// A numerical or physical flux vector has the same component layout as a
/// conserved state.
using FluxVector = ConservedState;

/// Primitive variables (density, velocity, pressure).
struct Primitives {
  double rho = 0.0;
  std::array<double, 3> v = {0.0, 0.0, 0.0};
  double p = 0.0;
};

/// Decomposes a conserved state into primitive variables.
/// Throws NonPhysicalState when density or derived pressure fall below the
/// positivity tolerance.
inline Primitives primitives(const ConservedState& q, const GasModel& gas) {
  if (!(q.rho > kPositivityTol))
    throw NonPhysicalState("non-positive density " + std::to_string(q.rho));
  const double inv_rho = 1.0 / q.rho;
  Primitives w;
  w.rho = q.rho;
  w.v = {q.mom[0] * inv_rho, q.mom[1] * inv_rho, q.mom[2] * inv_rho};
  const double kin =
      0.5 * (q.mom[0] * q.mom[0] + q.mom[1] * q.mom[1] + q.mom[2] * q.mom[2]) * inv_rho;
  w.p = (gas.gamma - 1.0) * (q.rhoE - kin);
  if (!(w.p > kPositivityTol))
    throw NonPhysicalState("non-positive pressure " + std::to_string(w.p));
  return w;
}

/// Same decomposition without the positivity check; used where the caller
/// wants to test validity itself (e.g. reconstruction fallback).
inline Primitives primitives_unguarded(const ConservedState& q, const GasModel& gas) {
  const double inv_rho = 1.0 / q.rho;
  Primitives w;
  w.rho = q.rho;
  w.v = {q.mom[0] * inv_rho, q.mom[1] * inv_rho, q.mom[2] * inv_rho};
  const double kin =
      0.5 * (q.mom[0] * q.mom[0] + q.mom[1] * q.mom[1] + q.mom[2] * q.mom[2]) * inv_rho;
  w.p = (gas.gamma - 1.0) * (q.rhoE - kin);
  return w;
}

inline bool physical(const Primitives& w) {
  return w.rho > kPositivityTol && w.p > kPositivityTol;
}

/// Assembles a conserved state from primitive variables.
inline ConservedState conserved(const Primitives& w, const GasModel& gas) {
  ConservedState q;
  q.rho = w.rho;
  q.mom = {w.rho * w.v[0], w.rho * w.v[1], w.rho * w.v[2]};
  const double kin = 0.5 * w.rho * (w.v[0] * w.v[0] + w.v[1] * w.v[1] + w.v[2] * w.v[2]);
  q.rhoE = w.p / (gas.gamma - 1.0) + kin;
  return q;
}

/// Physical flux of the Euler equations along one axis, evaluated from a
/// precomputed primitive decomposition.
inline FluxVector physical_flux(const ConservedState& q, const Primitives& w, int axis) {
  const double un = w.v[axis];
  FluxVector f;
  f.rho = q.rho * un;
  f.mom[0] = q.mom[0] * un;
  f.mom[1] = q.mom[1] * un;
  f.mom[2] = q.mom[2] * un;
  f.mom[axis] += w.p;
  f.rhoE = (q.rhoE + w.p) * un;
  return f;
}

inline FluxVector physical_flux(const ConservedState& q, int axis, const GasModel& gas) {
  return physical_flux(q, primitives(q, gas), axis);
}

inline double sound_speed(const Primitives& w, const GasModel& gas) {
  return std::sqrt(gas.gamma * w.p / w.rho);
}

/// |v_axis| + c, the fastest signal speed along an axis. Used by the CFL
/// monitor.
inline double max_wave_speed(const ConservedState& q, int axis, const GasModel& gas) {
  const Primitives w = primitives(q, gas);
  return std::abs(w.v[axis]) + sound_speed(w, gas);
}

}  // namespace adaptflow

#endif  // ADAPTFLOW_EULER_HPP
