#include "adaptflow/mr_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace adaptflow {

namespace {

std::string node_str(const NodeId& id) {
  return "level " + std::to_string(id.level) + " (" + std::to_string(id.idx[0]) + "," +
         std::to_string(id.idx[1]) + "," + std::to_string(id.idx[2]) + ")";
}

// Register key: coarse cell key plus face (axis, side bit).
inline uint64_t face_key(NodeKey cell, int axis, int side_bit) {
  return (cell << 3) | (static_cast<uint64_t>(axis) << 1) |
         static_cast<uint64_t>(side_bit);
}

}  // namespace

MRSolver::MRSolver(MRTree& tree, const SchemeConfig& scheme, const GasModel& gas)
    : tree_(tree), cfg_(scheme), gas_(gas) {
  t_old_.assign(tree.max_level() + 1, 0.0);
  t_new_.assign(tree.max_level() + 1, 0.0);
}

void MRSolver::evolve_global(double dt) { step_levels(0, tree_.max_level(), 0.0, dt); }

void MRSolver::advance_local(int top_level, double t, double dt) {
  step_levels(0, top_level, t, dt);
}

ConservedState MRSolver::resolve(const NodeId& pos, double tau, int lo) const {
  std::array<bool, 3> flip;
  const NodeId mapped = tree_.map_position(pos, flip);
  const MRNode* node = tree_.find(pack_key(mapped));
  ConservedState q;
  if (!node) {
    q = tree_.predict_single(mapped);
  } else if (node->status == NodeStatus::VirtualLeaf && mapped.level - 1 < lo) {
    // Virtual over an already-advanced coarser leaf: interpolate in time
    // between the coarse step's start and end states.
    const int lv = mapped.level - 1;
    const double denom = t_new_[lv] - t_old_[lv];
    const double theta =
        denom > 0.0 ? std::clamp((tau - t_old_[lv]) / denom, 0.0, 1.0) : 1.0;
    q = node->q_old * (1.0 - theta) + node->q * theta;
  } else {
    q = node->q;
  }
  for (int a = 0; a < 3; ++a)
    if (flip[a]) q.mom[a] = -q.mom[a];
  return q;
}

FluxVector MRSolver::fine_face_average(const NodeId& cell, int axis, int dir, double tau,
                                       int lo) {
  // Average of the 2^(d-1) sub-face fluxes at the next finer level. The
  // sub-face stencils read this cell's virtual children on the near side and
  // the neighbor's real children on the far side, so the values match the
  // fine side's own computation exactly.
  const int dim = tree_.dim();
  const int fl = cell.level + 1;
  const int tzn = dim == 3 ? 2 : 1;
  const int b1 = axis == 0 ? 1 : 0;
  const int b2 = axis == 2 ? 1 : 2;
  FluxVector sum;
  for (int t2 = 0; t2 < tzn; ++t2)
    for (int t1 = 0; t1 < 2; ++t1) {
      NodeId p;  // near-side fine cell touching the face
      p.level = fl;
      p.idx[axis] = 2 * cell.idx[axis] + (dir > 0 ? 1 : 0);
      p.idx[b1] = 2 * cell.idx[b1] + t1;
      p.idx[b2] = 2 * cell.idx[b2] + (dim == 3 ? t2 : 0);

      NodeId s0 = p, s1 = p, s2 = p, s3 = p;
      s0.idx[axis] += dir > 0 ? -1 : 2;
      s2.idx[axis] += dir;
      s3.idx[axis] += 2 * dir;
      // Stencil ordered in +axis direction: (m1, q0 | q1, p2).
      const ConservedState qa = resolve(dir > 0 ? s0 : s3, tau, lo);
      const ConservedState qb = resolve(dir > 0 ? s1 : s2, tau, lo);
      const ConservedState qc = resolve(dir > 0 ? s2 : s1, tau, lo);
      const ConservedState qd = resolve(dir > 0 ? s3 : s0, tau, lo);
      sum += detail::face_flux_w(qb, qc, primitives_unguarded(qa, gas_),
                                 primitives_unguarded(qb, gas_),
                                 primitives_unguarded(qc, gas_),
                                 primitives_unguarded(qd, gas_), axis, cfg_, gas_,
                                 &fallbacks_);
    }
  return sum * (1.0 / static_cast<double>(tzn * 2));
}

FluxVector MRSolver::face_flux_at(const NodeId& cell, int axis, int dir, double tau,
                                  int lo, int hi, bool register_stage, double step_dt) {
  // Neighbor across the face, at this cell's level.
  NodeId npos = cell;
  npos.idx[axis] += dir;
  std::array<bool, 3> flip;
  const NodeId mapped = tree_.map_position(npos, flip);
  const MRNode* nb = tree_.find(pack_key(mapped));

  if (nb && nb->status == NodeStatus::Internal) {
    if (mapped.level + 1 <= hi) {
      // Finer neighbor inside the stepping set: use the summed fine fluxes.
      return fine_face_average(cell, axis, dir, tau, lo);
    }
    // Finer neighbor advancing later (local time stepping): provisional flux
    // from the projected neighbor value; replaced via the flux register.
    NodeId s0 = cell, s2 = cell, s3 = cell;
    s0.idx[axis] -= dir;
    s2.idx[axis] += dir;
    s3.idx[axis] += 2 * dir;
    const ConservedState qa = resolve(dir > 0 ? s0 : s3, tau, lo);
    const ConservedState qb = resolve(dir > 0 ? NodeId(cell) : s2, tau, lo);
    const ConservedState qc = resolve(dir > 0 ? s2 : NodeId(cell), tau, lo);
    const ConservedState qd = resolve(dir > 0 ? s3 : s0, tau, lo);
    const FluxVector f = detail::face_flux_w(
        qb, qc, primitives_unguarded(qa, gas_), primitives_unguarded(qb, gas_),
        primitives_unguarded(qc, gas_), primitives_unguarded(qd, gas_), axis, cfg_,
        gas_, &fallbacks_);
    if (register_stage) {
      Register& reg = registers_[face_key(pack_key(cell), axis, dir > 0 ? 1 : 0)];
      reg.coarse += f * step_dt;
      reg.has_coarse = true;
    }
    return f;
  }

  // Same-level (real or virtual) neighbor, or boundary-mapped data.
  NodeId s0 = cell, s2 = cell, s3 = cell;
  s0.idx[axis] -= dir;
  s2.idx[axis] += dir;
  s3.idx[axis] += 2 * dir;
  const ConservedState qa = resolve(dir > 0 ? s0 : s3, tau, lo);
  const ConservedState qb = resolve(dir > 0 ? NodeId(cell) : s2, tau, lo);
  const ConservedState qc = resolve(dir > 0 ? s2 : NodeId(cell), tau, lo);
  const ConservedState qd = resolve(dir > 0 ? s3 : s0, tau, lo);
  const FluxVector f = detail::face_flux_w(
      qb, qc, primitives_unguarded(qa, gas_), primitives_unguarded(qb, gas_),
      primitives_unguarded(qc, gas_), primitives_unguarded(qd, gas_), axis, cfg_, gas_,
      &fallbacks_);

  if (register_stage && nb && nb->status == NodeStatus::VirtualLeaf &&
      mapped.level - 1 < lo) {
    // Face into an already-advanced coarser cell: accumulate the fine flux
    // share that replaces the coarse provisional flux.
    NodeId parent;
    parent.level = mapped.level - 1;
    parent.idx = {mapped.idx[0] >> 1, mapped.idx[1] >> 1, mapped.idx[2] >> 1};
    const int side_bit = dir > 0 ? 0 : 1;  // face seen from the coarse cell
    Register& reg = registers_[face_key(pack_key(parent), axis, side_bit)];
    const double share = tree_.dim() == 3 ? 0.25 : 0.5;
    reg.fine += f * (step_dt * share);
    reg.has_fine = true;
  }
  return f;
}

void MRSolver::stage(int lo, int hi, const std::vector<NodeKey>& leaves, double tau,
                     double stage_dt, bool register_stage, double step_dt) {
  // Pass 1: flux differences per leaf (pull form: every leaf evaluates all
  // of its faces; interior faces are therefore computed once per side with
  // identical values).
  for (NodeKey k : leaves) {
    const NodeId id = unpack_key(k);
    MRNode& node = *tree_.find(k);
    const Primitives w = primitives_unguarded(node.q, gas_);
    if (!(node.q.rho > kPositivityTol) || !physical(w))
      throw NonPhysicalState(node_str(id) + ": rho=" + std::to_string(node.q.rho) +
                             " p=" + std::to_string(w.p));
    const double dx = tree_.dx(id.level);
    const double c = sound_speed(w, gas_);
    for (int a = 0; a < tree_.dim(); ++a)
      max_cfl_ = std::max(max_cfl_, (std::abs(w.v[a]) + c) * step_dt / dx);

    ConservedState rhs;
    const double inv_dx = 1.0 / dx;
    for (int a = 0; a < tree_.dim(); ++a) {
      rhs += face_flux_at(id, a, -1, tau, lo, hi, register_stage, step_dt) * inv_dx;
      rhs -= face_flux_at(id, a, +1, tau, lo, hi, register_stage, step_dt) * inv_dx;
    }
    node.rhs = rhs;
  }
  // Pass 2: apply.
  for (NodeKey k : leaves) {
    MRNode& node = *tree_.find(k);
    node.q = node.q_old + node.rhs * stage_dt;
  }
}

void MRSolver::refresh_virtuals(const std::vector<NodeKey>& parents) {
  const int children = 1 << tree_.dim();
  for (NodeKey pk : parents) {
    const NodeId pid = unpack_key(pk);
    const std::vector<ConservedState> pred = tree_.predict_children(pid);
    for (int c = 0; c < children; ++c) {
      const NodeKey ck = pack_key(pid.level + 1, 2 * pid.idx[0] + (c & 1),
                                  2 * pid.idx[1] + ((c >> 1) & 1),
                                  2 * pid.idx[2] + ((c >> 2) & 1));
      MRNode* child = tree_.find(ck);
      if (child && child->status == NodeStatus::VirtualLeaf) child->q = pred[c];
    }
  }
}

void MRSolver::apply_registers(int coarse_level) {
  std::vector<uint64_t> keys;
  keys.reserve(registers_.size());
  for (const auto& [k, reg] : registers_)
    if (unpack_key(k >> 3).level == coarse_level) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (uint64_t k : keys) {
    const Register& reg = registers_.at(k);
    const NodeId cid = unpack_key(k >> 3);
    if (!reg.has_coarse || !reg.has_fine)
      throw RegisterMismatch("interface flux register at " + node_str(cid) +
                             " is missing a side");
    MRNode* node = tree_.find(k >> 3);
    if (!node || node->status != NodeStatus::Leaf)
      throw RegisterMismatch("flux register target is not a leaf: " + node_str(cid));
    const int side_bit = static_cast<int>(k & 1);
    const double sign = side_bit == 1 ? 1.0 : -1.0;
    node->q += (reg.coarse - reg.fine) * (sign / tree_.dx(cid.level));
    registers_.erase(k);
  }
}

void MRSolver::step_levels(int lo, int hi, double t, double dt) {
  std::vector<NodeKey> leaves;
  std::vector<NodeKey> virtual_parents;
  for (NodeKey k : tree_.leaves()) {
    const NodeId id = unpack_key(k);
    if (id.level < lo || id.level > hi) continue;
    leaves.push_back(k);
  }
  // Save step-start states and set the time bracket of these levels.
  const int children = 1 << tree_.dim();
  for (NodeKey k : leaves) {
    MRNode& node = *tree_.find(k);
    node.q_old = node.q;
    const NodeId id = unpack_key(k);
    // Virtual children (if any) serve finer levels as time brackets.
    const NodeKey c0 = pack_key(id.level + 1, 2 * id.idx[0], 2 * id.idx[1],
                                2 * id.idx[2]);
    const MRNode* child = tree_.find(c0);
    if (child && child->status == NodeStatus::VirtualLeaf) virtual_parents.push_back(k);
  }
  for (int l = lo; l <= hi && l <= tree_.max_level(); ++l) {
    t_old_[l] = t;
    t_new_[l] = t + dt;
  }
  // Entry prediction becomes both bracket ends until the step completes.
  refresh_virtuals(virtual_parents);
  for (NodeKey pk : virtual_parents) {
    const NodeId pid = unpack_key(pk);
    for (int c = 0; c < children; ++c) {
      MRNode* child = tree_.find(pack_key(pid.level + 1, 2 * pid.idx[0] + (c & 1),
                                          2 * pid.idx[1] + ((c >> 1) & 1),
                                          2 * pid.idx[2] + ((c >> 2) & 1)));
      if (child && child->status == NodeStatus::VirtualLeaf) child->q_old = child->q;
    }
  }

  auto project_range = [&](int top) {
    // Refresh internal nodes with children inside [lo, top] (finest first).
    std::vector<NodeKey> internals;
    for (NodeKey k : tree_.internal_keys(lo, top - 1)) internals.push_back(k);
    for (NodeKey k : internals) {
      const NodeId id = unpack_key(k);
      ConservedState sum;
      for (int c = 0; c < children; ++c)
        sum += tree_.find(pack_key(id.level + 1, 2 * id.idx[0] + (c & 1),
                                   2 * id.idx[1] + ((c >> 1) & 1),
                                   2 * id.idx[2] + ((c >> 2) & 1)))
                   ->q;
      tree_.find(k)->q = sum * (1.0 / static_cast<double>(children));
    }
  };

  // Midpoint scheme; only the second stage's fluxes are conserved quantities
  // of the update and enter the interface registers.
  stage(lo, hi, leaves, t, 0.5 * dt, false, dt);
  project_range(hi);
  refresh_virtuals(virtual_parents);

  stage(lo, hi, leaves, t + 0.5 * dt, dt, true, dt);
  // Positivity of the completed step.
  for (NodeKey k : leaves) {
    MRNode& node = *tree_.find(k);
    if (!(node.q.rho > kPositivityTol) ||
        !physical(primitives_unguarded(node.q, gas_)))
      throw NonPhysicalState("post-step " + node_str(unpack_key(k)));
  }
  project_range(hi);
  refresh_virtuals(virtual_parents);

  // Finer levels substep twice, then their summed fluxes replace the
  // provisional coarse fluxes at the interface.
  bool deeper = false;
  for (NodeKey k : tree_.leaves())
    if (unpack_key(k).level > hi) {
      deeper = true;
      break;
    }
  if (deeper) {
    step_levels(hi + 1, hi + 1, t, 0.5 * dt);
    step_levels(hi + 1, hi + 1, t + 0.5 * dt, 0.5 * dt);
    apply_registers(hi);
    // Re-project the levels covering the now-finished finer data.
    project_range(hi + 1);
  }
}

MRRunResult run_mr(const CaseSpec& spec, int level, long n_steps,
                   const SchemeConfig& scheme, const MROptions& options) {
  UniformGrid init(spec.dim, level, spec.origin, spec.extent);
  init_case(spec, init);

  MRRunResult out{MRTree::from_uniform(init, 0.0, spec.bc), RunReport{}};
  MRTree& tree = out.tree;
  if (options.local_time)
    tree.set_min_leaf_level(std::max(0, level - options.local_time_level_gap));
  tree.coarsen(options.epsilon);

  RunReport& rep = out.report;
  rep.method = options.local_time ? Method::MRLT : Method::MR;
  rep.case_name = spec.name;
  rep.level = level;
  rep.n_steps = n_steps;
  rep.preset_scheme = scheme.is_preset();

  const double dt_fine = spec.t_end / static_cast<double>(n_steps);
  MRSolver solver(tree, scheme, spec.gas);

  using clock = std::chrono::steady_clock;
  double wall = 0.0;
  long done = 0;
  while (done < n_steps) {
    const auto t0 = clock::now();
    long sub = 1;
    int top = level;
    if (options.local_time) {
      top = std::max(tree.coarsest_leaf_level(), tree.min_leaf_level());
      long span = 1l << (level - top);
      while (span > n_steps - done) {
        span >>= 1;
        ++top;
      }
      sub = span;
    }

    {
      TaskTimers::Scope ts(rep.timers, TaskGroup::Adaptation);
      if (options.local_time) {
        std::vector<int> buffer(static_cast<size_t>(level) + 1, 1);
        for (int l = 0; l <= level; ++l)
          if (l > top + 1) buffer[l] = 1 << (l - top - 1);
        tree.refine(options.epsilon, buffer);
      } else {
        tree.refine(options.epsilon);
      }
      tree.add_virtual_leaves();
    }

    const long cells = tree.node_count();
    const long leaves = tree.leaf_count();
    for (long s = 0; s < sub; ++s) {
      rep.cells_per_step.push_back(cells);
      rep.leaves_per_step.push_back(leaves);
    }

    try {
      TaskTimers::Scope ts(rep.timers, TaskGroup::Numerics);
      if (options.local_time)
        solver.advance_local(top, static_cast<double>(done) * dt_fine,
                             static_cast<double>(sub) * dt_fine);
      else
        solver.evolve_global(dt_fine);
    } catch (const NonPhysicalState& e) {
      throw NonPhysicalState("step " + std::to_string(done) + ": " + e.what());
    }

    {
      TaskTimers::Scope ts(rep.timers, TaskGroup::Adaptation);
      tree.remove_virtual_leaves();
      tree.coarsen(options.epsilon);
    }
    done += sub;
    wall += std::chrono::duration<double>(clock::now() - t0).count();
    if (options.on_sample) options.on_sample(done, tree);
  }
  rep.max_cfl = solver.max_cfl();
  rep.fallbacks = solver.fallbacks();
  rep.wall_seconds = wall;
  return out;
}

ConservedState l1_error_mr(const MRTree& tree, const UniformGrid& reference, int level) {
  return l1_error(tree.to_uniform(level), reference);
}

}  // namespace adaptflow
