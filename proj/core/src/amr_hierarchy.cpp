#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "adaptflow/amr.hpp"
#include "adaptflow/metrics.hpp"

namespace adaptflow {

namespace {

inline uint64_t face_key(int i, int j, int k, int axis, int side_bit) {
  // 16 bits per index are ample at desk scale.
  return (static_cast<uint64_t>(i) << 40) | (static_cast<uint64_t>(j) << 24) |
         (static_cast<uint64_t>(k) << 8) | (static_cast<uint64_t>(axis) << 1) |
         static_cast<uint64_t>(side_bit);
}

inline std::array<int, 3> face_key_cell(uint64_t key) {
  return {static_cast<int>((key >> 40) & 0xffff), static_cast<int>((key >> 24) & 0xffff),
          static_cast<int>((key >> 8) & 0xffff)};
}

double minmod2(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

PatchHierarchy::PatchHierarchy(int dim, int base_exp, double origin, double extent,
                               const BoundaryCondition& bc, const GasModel& gas,
                               const AmrOptions& opts)
    : dim_(dim),
      base_exp_(base_exp),
      origin_(origin),
      extent_(extent),
      bc_(bc),
      gas_(gas),
      opts_(opts) {
  AmrLevel base;
  Box all;
  const int n = cells_per_axis(0);
  all.lo = {0, 0, 0};
  all.hi = {n, n, dim == 3 ? n : 1};
  Patch p;
  p.box = all;
  p.data = BlockData(dim, {all.extent(0), all.extent(1), all.extent(2)}, 2);
  p.data_old = p.data;
  base.patches.push_back(std::move(p));
  levels_.push_back(std::move(base));
  rebuild_domain(0);
  registers_.resize(1);
}

void PatchHierarchy::rebuild_domain(int l) {
  AmrLevel& lvl = levels_[l];
  lvl.domain = IndexMask(dim_, cells_per_axis(l));
  for (const Patch& p : lvl.patches) lvl.domain.set_box(p.box);
}

const Patch* PatchHierarchy::find_patch(int l, int i, int j, int k) const {
  for (const Patch& p : levels_[l].patches)
    if (p.box.contains(i, j, k)) return &p;
  return nullptr;
}

Patch* PatchHierarchy::find_patch(int l, int i, int j, int k) {
  for (Patch& p : levels_[l].patches)
    if (p.box.contains(i, j, k)) return &p;
  return nullptr;
}

bool PatchHierarchy::map_point(int n, std::array<int, 3>& p,
                               std::array<bool, 3>& flip) const {
  flip = {false, false, false};
  for (int a = 0; a < dim_; ++a) {
    int& c = p[a];
    if (c >= 0 && c < n) continue;
    if (bc_.periodic(a)) {
      c = ((c % n) + n) % n;
      continue;
    }
    const BcKind kind = c < 0 ? bc_.low(a) : bc_.high(a);
    if (kind == BcKind::Outflow) {
      c = std::clamp(c, 0, n - 1);
    } else if (kind == BcKind::Reflective) {
      while (c < 0 || c >= n) {
        if (c < 0) c = -1 - c;
        if (c >= n) c = 2 * n - 1 - c;
        flip[a] = !flip[a];
      }
    }
  }
  return true;
}

void PatchHierarchy::initialize(
    const std::function<ConservedState(double, double, double)>& ic) {
  auto fill_from_ic = [&](int l) {
    const double h = dx(l);
    for (Patch& p : levels_[l].patches) {
      const Box& b = p.box;
      for (int k = b.lo[2]; k < b.hi[2]; ++k)
        for (int j = b.lo[1]; j < b.hi[1]; ++j)
          for (int i = b.lo[0]; i < b.hi[0]; ++i)
            p.at(i, j, k) = ic(origin_ + (i + 0.5) * h, origin_ + (j + 0.5) * h,
                               dim_ == 3 ? origin_ + (k + 0.5) * h : 0.0);
      p.data_old = p.data;
    }
  };
  fill_from_ic(0);
  for (int pass = 0; pass < opts_.max_levels + 2; ++pass) {
    remesh(0);
    for (int l = 1; l < n_levels(); ++l) fill_from_ic(l);
    if (n_levels() == opts_.max_levels + 1 && pass > 0) break;
  }
  for (int l = 0; l < n_levels(); ++l) {
    sync_ghosts(l, 0.0);
    for (Patch& p : levels_[l].patches) p.data_old = p.data;
  }
}

ConservedState PatchHierarchy::coarse_interp(int l, int i, int j, int k,
                                             double theta) const {
  // Conservative slope-limited interpolation from level l-1 at interpolation
  // weight theta between the coarse time bracket states.
  const int ci = i >> 1, cj = j >> 1, ck = dim_ == 3 ? k >> 1 : 0;
  const Patch* donor = find_patch(l - 1, ci, cj, ck);
  if (!donor)
    throw MissingBracketingStates("no coarse donor under level " + std::to_string(l) +
                                  " cell (" + std::to_string(i) + "," +
                                  std::to_string(j) + "," + std::to_string(k) + ")");

  auto value = [&](int a, int b, int c) {
    const int li = a - donor->box.lo[0], lj = b - donor->box.lo[1],
              lk = c - donor->box.lo[2];
    const ConservedState& now = donor->data.at(li, lj, lk);
    if (theta >= 1.0) return now;
    const ConservedState& old = donor->data_old.at(li, lj, lk);
    return old * (1.0 - theta) + now * theta;
  };

  const ConservedState q0 = value(ci, cj, ck);
  ConservedState out = q0;
  const std::array<int, 3> parity = {i & 1, j & 1, dim_ == 3 ? (k & 1) : 0};
  const std::array<int, 3> cc = {ci, cj, ck};
  for (int a = 0; a < dim_; ++a) {
    std::array<int, 3> m = cc, p = cc;
    m[a] -= 1;
    p[a] += 1;
    const ConservedState qm = value(m[0], m[1], m[2]);
    const ConservedState qp = value(p[0], p[1], p[2]);
    const double s = parity[a] ? 0.25 : -0.25;
    ConservedState slope;
    slope.rho = minmod2(qp.rho - q0.rho, q0.rho - qm.rho);
    for (int c = 0; c < 3; ++c)
      slope.mom[c] = minmod2(qp.mom[c] - q0.mom[c], q0.mom[c] - qm.mom[c]);
    slope.rhoE = minmod2(qp.rhoE - q0.rhoE, q0.rhoE - qm.rhoE);
    out += slope * s;
  }
  // Keep the interpolant physical; fall back to the donor average.
  if (!(out.rho > kPositivityTol) || !physical(primitives_unguarded(out, gas_)))
    out = q0;
  return out;
}

void PatchHierarchy::sync_ghosts(int l, double tau) {
  AmrLevel& lvl = levels_[l];
  const int n = cells_per_axis(l);
  double theta = 1.0;
  if (l > 0) {
    const AmrLevel& coarse = levels_[l - 1];
    const double denom = coarse.t - coarse.t_old;
    theta = denom > 0.0 ? std::clamp((tau - coarse.t_old) / denom, 0.0, 1.0) : 1.0;
  }

  for (Patch& patch : lvl.patches) {
    const Box& b = patch.box;
    const int g = patch.data.ghost();
    const int gz = patch.data.ghost_along(2);
    for (int k = b.lo[2] - gz; k < b.hi[2] + gz; ++k)
      for (int j = b.lo[1] - g; j < b.hi[1] + g; ++j)
        for (int i = b.lo[0] - g; i < b.hi[0] + g; ++i) {
          if (b.contains(i, j, k)) continue;
          std::array<int, 3> p = {i, j, k};
          std::array<bool, 3> flip;
          map_point(n, p, flip);
          ConservedState q;
          if (const Patch* donor = find_patch(l, p[0], p[1], p[2])) {
            q = donor->at(p[0], p[1], p[2]);
          } else if (l > 0) {
            q = coarse_interp(l, p[0], p[1], p[2], theta);
          } else {
            throw MissingBracketingStates("level 0 ghost outside domain coverage");
          }
          for (int a = 0; a < 3; ++a)
            if (flip[a]) q.mom[a] = -q.mom[a];
          patch.data.at(i - b.lo[0], j - b.lo[1], k - b.lo[2]) = q;
        }
  }
}

void PatchHierarchy::remesh(int l) {
  const int deepest_existing = n_levels() - 1;
  const int top = std::min(deepest_existing + 1, opts_.max_levels);

  // New box sets per level, built top-down for proper nesting.
  std::vector<std::vector<Box>> new_boxes(static_cast<size_t>(top) + 1);
  for (int m = top; m >= l + 1; --m) {
    const int src = m - 1;  // flags on this level define level m boxes
    if (src > deepest_existing) continue;
    sync_ghosts(src, levels_[src].t);
    IndexMask flags(dim_, cells_per_axis(src));
    for (const Patch& p : levels_[src].patches)
      flag_cells(p.data, p.box, gas_, opts_.eps_rho, opts_.eps_p, flags);
    flags = flags.dilated(1, bc_);

    // Nesting flags: the next finer level's new boxes, coarsened twice and
    // dilated, must be covered.
    if (m + 1 <= top)
      for (const Box& fb : new_boxes[m + 1]) {
        Box cb;
        for (int a = 0; a < 3; ++a) {
          cb.lo[a] = fb.lo[a] >> 2;
          cb.hi[a] = (fb.hi[a] + 3) >> 2;
        }
        if (dim_ == 2) {
          cb.lo[2] = 0;
          cb.hi[2] = 1;
        }
        IndexMask nest(dim_, cells_per_axis(src));
        nest.set_box(cb);
        nest = nest.dilated(1, bc_);
        for (int k = 0; k < nest.n(2); ++k)
          for (int j = 0; j < nest.n(1); ++j)
            for (int i = 0; i < nest.n(0); ++i)
              if (nest.get(i, j, k)) flags.set(i, j, k);
      }

    // Boxes must keep one cell distance to the coarse domain edge so fine
    // ghosts always have a same-level-or-coarser donor (except at physical
    // boundaries).
    IndexMask allowed(dim_, cells_per_axis(src));
    const IndexMask& dom = levels_[src].domain;
    const int nsrc = cells_per_axis(src);
    for (int k = 0; k < allowed.n(2); ++k)
      for (int j = 0; j < allowed.n(1); ++j)
        for (int i = 0; i < allowed.n(0); ++i) {
          if (!dom.get(i, j, k)) continue;
          bool ok = true;
          const int rz = dim_ == 3 ? 1 : 0;
          for (int dk = -rz; dk <= rz && ok; ++dk)
            for (int dj = -1; dj <= 1 && ok; ++dj)
              for (int di = -1; di <= 1 && ok; ++di) {
                std::array<int, 3> p = {i + di, j + dj, k + dk};
                bool in = true;
                for (int a = 0; a < dim_; ++a) {
                  if (p[a] >= 0 && p[a] < nsrc) continue;
                  if (bc_.periodic(a))
                    p[a] = ((p[a] % nsrc) + nsrc) % nsrc;
                  else
                    in = false;  // beyond a physical boundary: no constraint
                }
                if (in && !dom.get(p[0], p[1], p[2])) ok = false;
              }
          if (ok) allowed.set(i, j, k);
        }

    IndexMask masked(dim_, cells_per_axis(src));
    bool any = false;
    for (int k = 0; k < flags.n(2); ++k)
      for (int j = 0; j < flags.n(1); ++j)
        for (int i = 0; i < flags.n(0); ++i)
          if (flags.get(i, j, k) && allowed.get(i, j, k)) {
            masked.set(i, j, k);
            any = true;
          }
    if (!any) continue;
    for (const Box& cb : cluster(masked, opts_.cluster_efficiency, &allowed))
      new_boxes[m].push_back(cb.refined(dim_));
  }

  // Build the new patch levels bottom-up, copying where previously refined
  // and interpolating from the next coarser level elsewhere.
  int new_top = l;
  for (int m = l + 1; m <= top && !new_boxes[m].empty(); ++m) {
    AmrLevel lvl;
    lvl.t = levels_[l].t;
    lvl.t_old = levels_[l].t;
    const bool had = m <= deepest_existing;
    for (const Box& b : new_boxes[m]) {
      Patch p;
      p.box = b;
      p.data = BlockData(dim_, {b.extent(0), b.extent(1), b.extent(2)}, 2);
      for (int k = b.lo[2]; k < b.hi[2]; ++k)
        for (int j = b.lo[1]; j < b.hi[1]; ++j)
          for (int i = b.lo[0]; i < b.hi[0]; ++i) {
            const Patch* old =
                had && levels_[m].domain.get(i, j, k) ? find_patch(m, i, j, k) : nullptr;
            p.at(i, j, k) = old ? old->at(i, j, k) : coarse_interp(m, i, j, k, 1.0);
          }
      p.data_old = p.data;
      lvl.patches.push_back(std::move(p));
    }
    // Finer levels interpolate from this one during their build, so install
    // it with fresh domain and ghosts right away.
    if (m < n_levels())
      levels_[m] = std::move(lvl);
    else
      levels_.push_back(std::move(lvl));
    rebuild_domain(m);
    sync_ghosts(m, levels_[m].t);
    for (Patch& p : levels_[m].patches) p.data_old = p.data;
    new_top = m;
  }

  while (n_levels() - 1 > new_top) levels_.pop_back();
  registers_.resize(static_cast<size_t>(n_levels()));
  // Registers of the rebuilt levels restart; pairs below l keep accumulating.
  for (int m = l; m < static_cast<int>(registers_.size()); ++m) registers_[m].clear();

  if (!properly_nested())
    throw NestingViolation("remesh produced an improperly nested hierarchy");
}

bool PatchHierarchy::properly_nested() const {
  for (int l = 1; l < n_levels(); ++l) {
    const IndexMask& fine = levels_[l].domain;
    const IndexMask& coarse = levels_[l - 1].domain;
    for (int k = 0; k < fine.n(2); ++k)
      for (int j = 0; j < fine.n(1); ++j)
        for (int i = 0; i < fine.n(0); ++i)
          if (fine.get(i, j, k) &&
              !coarse.get(i >> 1, j >> 1, dim_ == 3 ? k >> 1 : 0))
            return false;
  }
  return true;
}

void PatchHierarchy::accumulate_registers(int l, const Patch& patch,
                                          const FluxField& flux, double dt,
                                          bool fine_side) {
  const Box& b = patch.box;
  const int n = cells_per_axis(l);
  if (fine_side) {
    // Faces of this level's domain boundary accumulate onto the coarse cell
    // they border.
    if (l == 0) return;
    auto& regs = registers_[l - 1];
    const double share = dim_ == 3 ? 0.25 : 0.5;
    const IndexMask& dom = levels_[l].domain;
    for (int axis = 0; axis < dim_; ++axis) {
      const int b1 = axis == 0 ? 1 : 0;
      const int b2 = axis == 2 ? 1 : 2;
      for (int c2 = b.lo[b2]; c2 < b.hi[b2]; ++c2)
        for (int c1 = b.lo[b1]; c1 < b.hi[b1]; ++c1)
          for (int side = 0; side < 2; ++side) {
            std::array<int, 3> inside;
            inside[axis] = side == 0 ? b.lo[axis] : b.hi[axis] - 1;
            inside[b1] = c1;
            inside[b2] = c2;
            std::array<int, 3> outside = inside;
            outside[axis] += side == 0 ? -1 : 1;
            std::array<bool, 3> flip;
            std::array<int, 3> mapped = outside;
            bool phys = false;
            for (int a = 0; a < dim_; ++a)
              if (mapped[a] < 0 || mapped[a] >= n) {
                if (bc_.periodic(a))
                  mapped[a] = ((mapped[a] % n) + n) % n;
                else
                  phys = true;
              }
            (void)flip;
            if (phys) continue;  // physical boundary face: nothing to correct
            if (dom.get(mapped[0], mapped[1], mapped[2])) continue;  // patch seam
            const std::array<int, 3> coarse = {mapped[0] >> 1, mapped[1] >> 1,
                                               dim_ == 3 ? mapped[2] >> 1 : 0};
            // Face seen from the coarse cell: fine region on its low side
            // when the fine cells sit below it.
            const int side_bit = side == 0 ? 1 : 0;
            FaceReg& reg =
                regs[face_key(coarse[0], coarse[1], coarse[2], axis, side_bit)];
            std::array<int, 3> fidx = {inside[0] - b.lo[0], inside[1] - b.lo[1],
                                       inside[2] - b.lo[2]};
            fidx[axis] = side == 0 ? 0 : b.extent(axis);
            reg.fine += flux.face(axis, fidx[0], fidx[1], fidx[2]) * (dt * share);
            reg.has_fine = true;
          }
    }
    return;
  }

  // Coarse side: faces between a cell covered by level l+1 and an uncovered
  // one store the provisional coarse flux.
  if (l + 1 >= n_levels()) return;
  auto& regs = registers_[l];
  const IndexMask& fine_dom = levels_[l + 1].domain;
  auto covered = [&](const std::array<int, 3>& c) {
    return fine_dom.get(2 * c[0], 2 * c[1], dim_ == 3 ? 2 * c[2] : 0);
  };
  for (int axis = 0; axis < dim_; ++axis) {
    const int b1 = axis == 0 ? 1 : 0;
    const int b2 = axis == 2 ? 1 : 2;
    for (int c2 = b.lo[b2]; c2 < b.hi[b2]; ++c2)
      for (int c1 = b.lo[b1]; c1 < b.hi[b1]; ++c1)
        for (int f = 1; f <= b.extent(axis); ++f) {
          // Low cell of the face is interior: this patch owns the face.
          std::array<int, 3> lo_cell;
          lo_cell[axis] = b.lo[axis] + f - 1;
          lo_cell[b1] = c1;
          lo_cell[b2] = c2;
          std::array<int, 3> hi_cell = lo_cell;
          hi_cell[axis] += 1;
          std::array<int, 3> hi_mapped = hi_cell;
          bool phys = false;
          for (int a = 0; a < dim_; ++a)
            if (hi_mapped[a] < 0 || hi_mapped[a] >= n) {
              if (bc_.periodic(a))
                hi_mapped[a] = ((hi_mapped[a] % n) + n) % n;
              else
                phys = true;
            }
          if (phys) continue;
          if (!levels_[l].domain.get(hi_mapped[0], hi_mapped[1], hi_mapped[2]))
            continue;  // face to the coarser level, not ours
          const bool cov_lo = covered(lo_cell);
          const bool cov_hi = covered(hi_mapped);
          if (cov_lo == cov_hi) continue;
          const std::array<int, 3>& u = cov_lo ? hi_mapped : lo_cell;
          const int side_bit = cov_lo ? 0 : 1;  // uncovered cell faces the fine side
          FaceReg& reg = regs[face_key(u[0], u[1], u[2], axis, side_bit)];
          std::array<int, 3> fidx = {lo_cell[0] - b.lo[0], lo_cell[1] - b.lo[1],
                                     lo_cell[2] - b.lo[2]};
          fidx[axis] = f;
          reg.coarse += flux.face(axis, fidx[0], fidx[1], fidx[2]) * dt;
          reg.has_coarse = true;
        }
  }
}

StepDiag PatchHierarchy::update_level(int l, double dt, const SchemeConfig& scheme) {
  AmrLevel& lvl = levels_[l];
  lvl.t_old = lvl.t;
  for (Patch& p : lvl.patches) p.data_old = p.data;

  StepDiag total;
  const double h = dx(l);

  if (scheme.integrator == IntegratorKind::MusclHancock) {
    for (size_t pi = 0; pi < lvl.patches.size(); ++pi) {
      Patch& p = lvl.patches[pi];
      FluxField flux(dim_, p.data.n());
      StepDiag diag;
      try {
        diag = muscl_hancock_step(p.data, p.data, h, dt, scheme, gas_, &flux);
      } catch (const NonPhysicalState& e) {
        throw NonPhysicalState("level " + std::to_string(l) + " patch " +
                               std::to_string(pi) + ": " + e.what());
      }
      total.max_wave_speed = std::max(total.max_wave_speed, diag.max_wave_speed);
      total.fallbacks += diag.fallbacks;
      accumulate_registers(l, p, flux, dt, /*fine_side=*/true);
      accumulate_registers(l, p, flux, dt, /*fine_side=*/false);
    }
  } else {
    // Two-stage midpoint: stage all patches, synchronize the midpoint ghosts
    // across the level, then run the final stage.
    std::vector<BlockData> saved;
    saved.reserve(lvl.patches.size());
    for (Patch& p : lvl.patches) {
      saved.push_back(p.data);  // state at t with ghosts
      BlockData mid = p.data;
      StepDiag diag = rk2_stage(p.data, p.data, mid, h, 0.5 * dt, scheme, gas_, nullptr);
      total.max_wave_speed = std::max(total.max_wave_speed, diag.max_wave_speed);
      total.fallbacks += diag.fallbacks;
      p.data = std::move(mid);
    }
    sync_ghosts(l, lvl.t + 0.5 * dt);
    for (size_t pi = 0; pi < lvl.patches.size(); ++pi) {
      Patch& p = lvl.patches[pi];
      FluxField flux(dim_, p.data.n());
      BlockData out = saved[pi];
      StepDiag diag;
      try {
        diag = rk2_stage(saved[pi], p.data, out, h, dt, scheme, gas_, &flux);
      } catch (const NonPhysicalState& e) {
        throw NonPhysicalState("level " + std::to_string(l) + " patch " +
                               std::to_string(pi) + ": " + e.what());
      }
      total.max_wave_speed = std::max(total.max_wave_speed, diag.max_wave_speed);
      total.fallbacks += diag.fallbacks;
      p.data = std::move(out);
      accumulate_registers(l, p, flux, dt, /*fine_side=*/true);
      accumulate_registers(l, p, flux, dt, /*fine_side=*/false);
    }
  }
  lvl.t += dt;
  return total;
}

void PatchHierarchy::average_down(int l) {
  if (l + 1 >= n_levels()) return;
  const AmrLevel& fine = levels_[l + 1];
  AmrLevel& coarse = levels_[l];
  if (std::abs(fine.t - coarse.t) > 1e-12 * std::max(1.0, std::abs(coarse.t)))
    throw TimeMismatch("average_down: levels at t=" + std::to_string(coarse.t) +
                       " and t=" + std::to_string(fine.t));
  const int zc = dim_ == 3 ? 2 : 1;
  const double w = dim_ == 3 ? 0.125 : 0.25;
  for (Patch& cp : coarse.patches) {
    const Box& b = cp.box;
    for (int k = b.lo[2]; k < b.hi[2]; ++k)
      for (int j = b.lo[1]; j < b.hi[1]; ++j)
        for (int i = b.lo[0]; i < b.hi[0]; ++i) {
          const int fi = 2 * i, fj = 2 * j, fk = dim_ == 3 ? 2 * k : 0;
          if (!fine.domain.get(fi, fj, fk)) continue;
          const Patch* fp = find_patch(l + 1, fi, fj, fk);
          assert(fp);
          ConservedState sum;
          for (int dk = 0; dk < zc; ++dk)
            for (int dj = 0; dj < 2; ++dj)
              for (int di = 0; di < 2; ++di)
                sum += fp->at(fi + di, fj + dj, fk + dk);
          cp.at(i, j, k) = sum * w;
        }
  }
}

void PatchHierarchy::flux_correct(int l) {
  if (l >= static_cast<int>(registers_.size())) return;
  auto& regs = registers_[l];
  if (!opts_.flux_correction) {
    regs.clear();
    return;
  }
  std::vector<uint64_t> keys;
  keys.reserve(regs.size());
  for (const auto& [k, reg] : regs) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  const double inv_h = 1.0 / dx(l);
  for (uint64_t key : keys) {
    const FaceReg& reg = regs.at(key);
    const std::array<int, 3> c = face_key_cell(key);
    if (!reg.has_coarse || !reg.has_fine)
      throw RegisterMismatch("flux register at level " + std::to_string(l) + " cell (" +
                             std::to_string(c[0]) + "," + std::to_string(c[1]) + "," +
                             std::to_string(c[2]) + ") is missing a side");
    Patch* p = find_patch(l, c[0], c[1], c[2]);
    if (!p)
      throw RegisterMismatch("flux register names an uncovered coarse cell");
    const int side_bit = static_cast<int>(key & 1);
    const double sign = side_bit == 1 ? 1.0 : -1.0;
    p->at(c[0], c[1], c[2]) += (reg.coarse - reg.fine) * (sign * inv_h);
  }
  regs.clear();
}

ConservedState PatchHierarchy::total_conserved() const {
  ConservedState sum;
  for (int l = 0; l < n_levels(); ++l) {
    const double vol = dim_ == 3 ? dx(l) * dx(l) * dx(l) : dx(l) * dx(l);
    const IndexMask* fine = l + 1 < n_levels() ? &levels_[l + 1].domain : nullptr;
    ConservedState lvl_sum;
    for (const Patch& p : levels_[l].patches) {
      const Box& b = p.box;
      for (int k = b.lo[2]; k < b.hi[2]; ++k)
        for (int j = b.lo[1]; j < b.hi[1]; ++j)
          for (int i = b.lo[0]; i < b.hi[0]; ++i) {
            if (fine && fine->get(2 * i, 2 * j, dim_ == 3 ? 2 * k : 0)) continue;
            lvl_sum += p.at(i, j, k);
          }
    }
    sum += lvl_sum * vol;
  }
  return sum;
}

long PatchHierarchy::total_cells() const {
  long c = 0;
  for (const AmrLevel& lvl : levels_)
    for (const Patch& p : lvl.patches) c += p.box.volume();
  return c;
}

long PatchHierarchy::composite_cells() const {
  long c = 0;
  for (int l = 0; l < n_levels(); ++l) {
    const long covered =
        l + 1 < n_levels() ? levels_[l + 1].domain.count() / (1 << dim_) : 0;
    c += levels_[l].domain.count() - covered;
  }
  return c;
}

UniformGrid PatchHierarchy::assemble_level(int l) const {
  const int n = cells_per_axis(l);
  if (levels_[l].domain.count() !=
      static_cast<long>(n) * n * (dim_ == 3 ? n : 1))
    throw LevelMismatch("assemble_level: level " + std::to_string(l) +
                        " does not cover the domain");
  UniformGrid grid(dim_, base_exp_ + l, origin_, extent_);
  for (const Patch& p : levels_[l].patches) {
    const Box& b = p.box;
    for (int k = b.lo[2]; k < b.hi[2]; ++k)
      for (int j = b.lo[1]; j < b.hi[1]; ++j)
        for (int i = b.lo[0]; i < b.hi[0]; ++i)
          grid.block().at(i, j, k) = p.at(i, j, k);
  }
  return grid;
}

std::string PatchHierarchy::dump_boxes() const {
  std::ostringstream os;
  for (int l = 0; l < n_levels(); ++l) {
    for (const Patch& p : levels_[l].patches) {
      os << l;
      for (int a = 0; a < dim_; ++a) os << ' ' << p.box.lo[a];
      for (int a = 0; a < dim_; ++a) os << ' ' << p.box.hi[a];
      os << '\n';
    }
  }
  return os.str();
}

ConservedState l1_error_amr(const PatchHierarchy& h, const UniformGrid& reference) {
  ConservedState sum;
  for (int l = 0; l < h.n_levels(); ++l) {
    const int res_level = h.base_exp() + l;
    if (reference.level() < res_level)
      throw LevelMismatch("reference too coarse for hierarchy level " +
                          std::to_string(l));
    const UniformGrid ref = restrict_to_level(reference, res_level);
    const double vol = h.dim() == 3 ? h.dx(l) * h.dx(l) * h.dx(l) : h.dx(l) * h.dx(l);
    const IndexMask* fine = l + 1 < h.n_levels() ? &h.level(l + 1).domain : nullptr;
    ConservedState lvl_sum;
    for (const Patch& p : h.level(l).patches) {
      const Box& b = p.box;
      for (int k = b.lo[2]; k < b.hi[2]; ++k)
        for (int j = b.lo[1]; j < b.hi[1]; ++j)
          for (int i = b.lo[0]; i < b.hi[0]; ++i) {
            if (fine && fine->get(2 * i, 2 * j, h.dim() == 3 ? 2 * k : 0)) continue;
            const ConservedState d = p.at(i, j, k) - ref.block().at(i, j, k);
            lvl_sum.rho += std::abs(d.rho);
            for (int c = 0; c < 3; ++c) lvl_sum.mom[c] += std::abs(d.mom[c]);
            lvl_sum.rhoE += std::abs(d.rhoE);
          }
    }
    sum += lvl_sum * vol;
  }
  return sum;
}

}  // namespace adaptflow
