#include "adaptflow/mr_tree.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>
#include <sstream>

namespace adaptflow {

namespace {

inline NodeKey parent_of(NodeKey key) {
  NodeId id = unpack_key(key);
  return pack_key(id.level - 1, id.idx[0] >> 1, id.idx[1] >> 1, id.idx[2] >> 1);
}

}  // namespace

MRTree::MRTree(int dim, int max_level, double origin, double extent,
               const BoundaryCondition& bc)
    : dim_(dim), max_level_(max_level), origin_(origin), extent_(extent), bc_(bc) {
  assert(max_level <= kKeyIndexBits);
  MRNode root;
  root.status = NodeStatus::Leaf;
  nodes_.emplace(pack_key(0, 0, 0, 0), root);
}

MRTree MRTree::from_uniform(const UniformGrid& grid, double eps,
                            const BoundaryCondition& bc) {
  MRTree tree(grid.dim(), grid.level(), grid.origin(), grid.extent(), bc);
  tree.nodes_.clear();

  const int L = grid.level();
  const int nz = grid.dim() == 3 ? grid.n() : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < grid.n(); ++j)
      for (int i = 0; i < grid.n(); ++i) {
        MRNode node;
        node.q = grid.block().at(i, j, k);
        node.q_old = node.q;
        node.status = NodeStatus::Leaf;
        tree.nodes_.emplace(pack_key(L, i, j, k), node);
      }
  // Internal levels bottom-up as exact projections.
  for (int l = L - 1; l >= 0; --l) {
    const int n = 1 << l;
    const int nzl = grid.dim() == 3 ? n : 1;
    const int zc = grid.dim() == 3 ? 2 : 1;
    const double w = grid.dim() == 3 ? 0.125 : 0.25;
    for (int k = 0; k < nzl; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          ConservedState sum;
          for (int dk = 0; dk < zc; ++dk)
            for (int dj = 0; dj < 2; ++dj)
              for (int di = 0; di < 2; ++di)
                sum += tree.nodes_.at(pack_key(l + 1, 2 * i + di, 2 * j + dj,
                                               2 * k + dk))
                           .q;
          MRNode node;
          node.q = sum * w;
          node.q_old = node.q;
          node.status = NodeStatus::Internal;
          tree.nodes_.emplace(pack_key(l, i, j, k), node);
        }
  }
  tree.set_norms_from(grid);
  tree.coarsen(eps);
  return tree;
}

void MRTree::set_norms_from(const UniformGrid& grid) {
  std::array<double, 5> n = {0, 0, 0, 0, 0};
  grid.block().for_interior([&](int i, int j, int k) {
    const ConservedState& q = grid.block().at(i, j, k);
    n[0] = std::max(n[0], std::abs(q.rho));
    for (int c = 0; c < 3; ++c) n[1 + c] = std::max(n[1 + c], std::abs(q.mom[c]));
    n[4] = std::max(n[4], std::abs(q.rhoE));
  });
  // Components that vanish at t=0 (e.g. momentum of an initially static
  // field) fall back to the largest component scale.
  const double global = std::max({n[0], n[1], n[2], n[3], n[4], 1e-300});
  for (double& v : n)
    if (v < 1e-12 * global) v = global;
  norms_ = n;
}

long MRTree::leaf_count() const {
  long c = 0;
  for (const auto& [k, node] : nodes_)
    if (node.status == NodeStatus::Leaf) ++c;
  return c;
}

long MRTree::virtual_count() const {
  long c = 0;
  for (const auto& [k, node] : nodes_)
    if (node.status == NodeStatus::VirtualLeaf) ++c;
  return c;
}

std::vector<NodeKey> MRTree::leaves() const {
  std::vector<NodeKey> out;
  out.reserve(nodes_.size());
  for (const auto& [k, node] : nodes_)
    if (node.status == NodeStatus::Leaf) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeKey> MRTree::leaves_at(int level) const {
  std::vector<NodeKey> out;
  for (const auto& [k, node] : nodes_)
    if (node.status == NodeStatus::Leaf && unpack_key(k).level == level)
      out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeKey> MRTree::internal_keys(int lo, int hi) const {
  std::vector<NodeKey> out;
  for (const auto& [k, node] : nodes_) {
    if (node.status != NodeStatus::Internal) continue;
    const int l = unpack_key(k).level;
    if (l >= lo && l <= hi) out.push_back(k);
  }
  std::sort(out.begin(), out.end(), std::greater<NodeKey>());
  return out;
}

int MRTree::coarsest_leaf_level() const {
  int l = max_level_;
  for (const auto& [k, node] : nodes_)
    if (node.status == NodeStatus::Leaf) l = std::min(l, unpack_key(k).level);
  return l;
}

int MRTree::finest_leaf_level() const {
  int l = 0;
  for (const auto& [k, node] : nodes_)
    if (node.status == NodeStatus::Leaf) l = std::max(l, unpack_key(k).level);
  return l;
}

NodeId MRTree::map_position(const NodeId& pos, std::array<bool, 3>& flip) const {
  NodeId out = pos;
  flip = {false, false, false};
  const int n = 1 << pos.level;
  for (int a = 0; a < dim_; ++a) {
    int& c = out.idx[a];
    if (c >= 0 && c < n) continue;
    if (bc_.periodic(a)) {
      c = ((c % n) + n) % n;
      continue;
    }
    const BcKind kind = c < 0 ? bc_.low(a) : bc_.high(a);
    if (kind == BcKind::Outflow) {
      c = std::clamp(c, 0, n - 1);
    } else {  // reflective: fold until inside
      while (c < 0 || c >= n) {
        if (c < 0) c = -1 - c;
        if (c >= n) c = 2 * n - 1 - c;
        flip[a] = !flip[a];
      }
    }
  }
  return out;
}

ConservedState MRTree::value_at(const NodeId& pos) const {
  NodeId p = pos;
  // Wrap periodic axes; callers keep non-periodic positions in-domain.
  const int n = 1 << pos.level;
  for (int a = 0; a < dim_; ++a)
    if (bc_.periodic(a)) p.idx[a] = ((p.idx[a] % n) + n) % n;
  const MRNode* node = find(pack_key(p));
  if (node) return node->q;
  return predict_single(p);
}

ConservedState MRTree::stencil_value(const NodeId& pos) const {
  std::array<bool, 3> flip;
  const NodeId mapped = map_position(pos, flip);
  ConservedState q;
  const MRNode* node = find(pack_key(mapped));
  q = node ? node->q : predict_single(mapped);
  for (int a = 0; a < 3; ++a)
    if (flip[a]) q.mom[a] = -q.mom[a];
  return q;
}

ConservedState MRTree::project(const std::vector<ConservedState>& children) {
  ConservedState sum;
  for (const ConservedState& c : children) sum += c;
  return sum * (1.0 / static_cast<double>(children.size()));
}

MRTree::AxisStencil MRTree::axis_stencil(int level, int coord, int axis) const {
  const int n = 1 << level;
  AxisStencil s;
  if (bc_.periodic(axis) || (coord > 0 && coord < n - 1)) {
    s.pos = {coord - 1, coord, coord + 1};
    s.w_low = {1.0 / 8.0, 1.0, -1.0 / 8.0};
    s.w_high = {-1.0 / 8.0, 1.0, 1.0 / 8.0};
    return s;
  }
  if (n == 1) {
    s.pos = {0, 0, 0};
    s.w_low = {1.0, 0.0, 0.0};
    s.w_high = {1.0, 0.0, 0.0};
    return s;
  }
  if (n == 2) {
    // Two cells: linear (slope) prediction.
    s.pos = {0, 1, 1};
    if (coord == 0) {
      s.w_low = {5.0 / 4.0, -1.0 / 4.0, 0.0};
      s.w_high = {3.0 / 4.0, 1.0 / 4.0, 0.0};
    } else {
      s.w_low = {1.0 / 4.0, 3.0 / 4.0, 0.0};
      s.w_high = {-1.0 / 4.0, 5.0 / 4.0, 0.0};
    }
    return s;
  }
  if (coord == 0) {
    s.pos = {0, 1, 2};
    s.w_low = {11.0 / 8.0, -4.0 / 8.0, 1.0 / 8.0};
    s.w_high = {5.0 / 8.0, 4.0 / 8.0, -1.0 / 8.0};
  } else {  // coord == n - 1
    s.pos = {n - 3, n - 2, n - 1};
    s.w_low = {-1.0 / 8.0, 4.0 / 8.0, 5.0 / 8.0};
    s.w_high = {1.0 / 8.0, -4.0 / 8.0, 11.0 / 8.0};
  }
  return s;
}

std::vector<ConservedState> MRTree::predict_children(const NodeId& parent) const {
  std::array<AxisStencil, 3> st;
  for (int a = 0; a < dim_; ++a) st[a] = axis_stencil(parent.level, parent.idx[a], a);

  // Gather the 3^d neighborhood.
  const int nz = dim_ == 3 ? 3 : 1;
  std::array<ConservedState, 27> nb;
  for (int ck = 0; ck < nz; ++ck)
    for (int cj = 0; cj < 3; ++cj)
      for (int ci = 0; ci < 3; ++ci) {
        NodeId pos;
        pos.level = parent.level;
        pos.idx = {st[0].pos[ci], st[1].pos[cj],
                   dim_ == 3 ? st[2].pos[ck] : parent.idx[2]};
        nb[ci + 3 * cj + 9 * ck] = value_at(pos);
      }

  const int children = 1 << dim_;
  std::vector<ConservedState> out(children);
  for (int c = 0; c < children; ++c) {
    const int sx = c & 1, sy = (c >> 1) & 1, sz = (c >> 2) & 1;
    const auto& wx = sx ? st[0].w_high : st[0].w_low;
    const auto& wy = sy ? st[1].w_high : st[1].w_low;
    const auto& wz = sz ? st[2].w_high : st[2].w_low;
    ConservedState acc;
    for (int ck = 0; ck < nz; ++ck) {
      const double wk = dim_ == 3 ? wz[ck] : 1.0;
      if (wk == 0.0) continue;
      for (int cj = 0; cj < 3; ++cj) {
        const double wjk = wy[cj] * wk;
        if (wjk == 0.0) continue;
        for (int ci = 0; ci < 3; ++ci) {
          const double w = wx[ci] * wjk;
          if (w == 0.0) continue;
          acc += nb[ci + 3 * cj + 9 * ck] * w;
        }
      }
    }
    out[c] = acc;
  }
  return out;
}

ConservedState MRTree::predict_single(const NodeId& child) const {
  assert(child.level > 0);
  NodeId parent;
  parent.level = child.level - 1;
  parent.idx = {child.idx[0] >> 1, child.idx[1] >> 1, child.idx[2] >> 1};
  const int c = (child.idx[0] & 1) | ((child.idx[1] & 1) << 1) |
                ((child.idx[2] & 1) << 2);
  return predict_children(parent)[c];
}

double MRTree::detail_between(const NodeId& parent,
                              const std::vector<ConservedState>& actual) const {
  const std::vector<ConservedState> pred = predict_children(parent);
  double mag = 0.0;
  for (size_t c = 0; c < actual.size(); ++c) {
    const ConservedState d = actual[c] - pred[c];
    mag = std::max(mag, std::abs(d.rho) / norms_[0]);
    for (int a = 0; a < 3; ++a)
      mag = std::max(mag, std::abs(d.mom[a]) / norms_[1 + a]);
    mag = std::max(mag, std::abs(d.rhoE) / norms_[4]);
  }
  return mag;
}

double MRTree::detail(const NodeId& node) const {
  const int children = 1 << dim_;
  std::vector<ConservedState> actual(children);
  for (int c = 0; c < children; ++c) {
    const NodeKey ck = pack_key(node.level + 1, 2 * node.idx[0] + (c & 1),
                                2 * node.idx[1] + ((c >> 1) & 1),
                                2 * node.idx[2] + ((c >> 2) & 1));
    const MRNode* child = find(ck);
    assert(child);
    actual[c] = child->q;
  }
  return detail_between(node, actual);
}

void MRTree::project_internals() {
  std::vector<NodeKey> internals;
  internals.reserve(nodes_.size() / 3);
  for (const auto& [k, node] : nodes_)
    if (node.status == NodeStatus::Internal) internals.push_back(k);
  // Finest first so parents see refreshed children.
  std::sort(internals.begin(), internals.end(), std::greater<NodeKey>());
  const int children = 1 << dim_;
  const double w = 1.0 / static_cast<double>(children);
  for (NodeKey k : internals) {
    const NodeId id = unpack_key(k);
    ConservedState sum;
    for (int c = 0; c < children; ++c)
      sum += nodes_.at(pack_key(id.level + 1, 2 * id.idx[0] + (c & 1),
                                2 * id.idx[1] + ((c >> 1) & 1),
                                2 * id.idx[2] + ((c >> 2) & 1)))
                 .q;
    nodes_.at(k).q = sum * w;
  }
}

void MRTree::split_leaf(NodeKey key) {
  MRNode& node = nodes_.at(key);
  assert(node.status == NodeStatus::Leaf);
  const NodeId id = unpack_key(key);
  assert(id.level < max_level_);
  const std::vector<ConservedState> pred = predict_children(id);
  const int children = 1 << dim_;
  for (int c = 0; c < children; ++c) {
    const NodeKey ck = pack_key(id.level + 1, 2 * id.idx[0] + (c & 1),
                                2 * id.idx[1] + ((c >> 1) & 1),
                                2 * id.idx[2] + ((c >> 2) & 1));
    assert(!contains(ck));
    MRNode child;
    child.q = pred[c];
    child.q_old = pred[c];
    child.status = NodeStatus::Leaf;
    nodes_.emplace(ck, child);
  }
  nodes_.at(key).status = NodeStatus::Internal;
}

void MRTree::refine(double eps, const std::vector<int>& buffer_radius_per_level) {
  std::vector<NodeKey> split;
  std::unordered_map<NodeKey, double> parent_detail;
  for (NodeKey k : leaves()) {
    const NodeId id = unpack_key(k);
    if (id.level >= max_level_ || id.level == 0) continue;
    const NodeKey pk = parent_of(k);
    auto it = parent_detail.find(pk);
    if (it == parent_detail.end())
      it = parent_detail.emplace(pk, detail(unpack_key(pk))).first;
    if (it->second >= eps) split.push_back(k);
  }

  if (!buffer_radius_per_level.empty() && !split.empty()) {
    std::set<NodeKey> extended(split.begin(), split.end());
    for (NodeKey k : split) {
      const NodeId id = unpack_key(k);
      const int r = id.level < static_cast<int>(buffer_radius_per_level.size())
                        ? buffer_radius_per_level[id.level]
                        : 0;
      if (r <= 0) continue;
      const int rz = dim_ == 3 ? r : 0;
      for (int dk = -rz; dk <= rz; ++dk)
        for (int dj = -r; dj <= r; ++dj)
          for (int di = -r; di <= r; ++di) {
            if (di == 0 && dj == 0 && dk == 0) continue;
            NodeId pos = id;
            pos.idx = {id.idx[0] + di, id.idx[1] + dj, id.idx[2] + dk};
            std::array<bool, 3> flip;
            const NodeId mapped = map_position(pos, flip);
            const MRNode* nb = find(pack_key(mapped));
            if (nb && nb->status == NodeStatus::Leaf) extended.insert(pack_key(mapped));
          }
    }
    split.assign(extended.begin(), extended.end());
  }

  std::sort(split.begin(), split.end());
  for (NodeKey k : split)
    if (nodes_.at(k).status == NodeStatus::Leaf) split_leaf(k);
  enforce_gradedness();
}

void MRTree::enforce_gradedness() {
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeKey k : leaves()) {
      const NodeId id = unpack_key(k);
      if (id.level >= max_level_) continue;
      bool need_split = false;
      for (int a = 0; a < dim_ && !need_split; ++a)
        for (int dir = -1; dir <= 1 && !need_split; dir += 2) {
          NodeId npos = id;
          npos.idx[a] += dir;
          const int n = 1 << id.level;
          if (!bc_.periodic(a) && (npos.idx[a] < 0 || npos.idx[a] >= n)) continue;
          std::array<bool, 3> flip;
          const NodeId mapped = map_position(npos, flip);
          const MRNode* nb = find(pack_key(mapped));
          if (!nb || nb->status != NodeStatus::Internal) continue;
          // Children of the neighbor that touch the shared face.
          const int face_bit = dir > 0 ? 0 : 1;
          const int tzn = dim_ == 3 ? 2 : 1;
          for (int t2 = 0; t2 < tzn && !need_split; ++t2)
            for (int t1 = 0; t1 < 2 && !need_split; ++t1) {
              std::array<int, 3> cidx;
              cidx[a] = 2 * mapped.idx[a] + face_bit;
              const int b1 = a == 0 ? 1 : 0;
              const int b2 = a == 2 ? 1 : 2;
              cidx[b1] = 2 * mapped.idx[b1] + t1;
              cidx[b2] = 2 * mapped.idx[b2] + (dim_ == 3 ? t2 : 0);
              const MRNode* child =
                  find(pack_key(mapped.level + 1, cidx[0], cidx[1], cidx[2]));
              if (child && child->status == NodeStatus::Internal) need_split = true;
            }
        }
      if (need_split) {
        split_leaf(k);
        changed = true;
      }
    }
  }
}

bool MRTree::merge_allowed(const NodeId& parent) const {
  // Merging turns `parent` into a leaf; no face-adjacent leaf may then be
  // more than one level finer. Check the fine ring around the block.
  const int fl = parent.level + 1;
  const int nf = 1 << fl;
  for (int a = 0; a < dim_; ++a)
    for (int dir = -1; dir <= 1; dir += 2) {
      const int tzn = dim_ == 3 ? 2 : 1;
      for (int t2 = 0; t2 < tzn; ++t2)
        for (int t1 = 0; t1 < 2; ++t1) {
          NodeId ring;
          ring.level = fl;
          ring.idx[a] = dir > 0 ? 2 * parent.idx[a] + 2 : 2 * parent.idx[a] - 1;
          const int b1 = a == 0 ? 1 : 0;
          const int b2 = a == 2 ? 1 : 2;
          ring.idx[b1] = 2 * parent.idx[b1] + t1;
          ring.idx[b2] = 2 * parent.idx[b2] + (dim_ == 3 ? t2 : 0);
          if (!bc_.periodic(a) && (ring.idx[a] < 0 || ring.idx[a] >= nf)) continue;
          std::array<bool, 3> flip;
          const NodeId mapped = map_position(ring, flip);
          const MRNode* nb = find(pack_key(mapped));
          if (nb && nb->status == NodeStatus::Internal) return false;
        }
    }
  return true;
}

void MRTree::coarsen(double eps) {
  bool merged = true;
  while (merged) {
    merged = false;
    std::vector<NodeKey> internals;
    for (const auto& [k, node] : nodes_)
      if (node.status == NodeStatus::Internal) internals.push_back(k);
    std::sort(internals.begin(), internals.end(), std::greater<NodeKey>());

    const int children = 1 << dim_;
    for (NodeKey k : internals) {
      const NodeId id = unpack_key(k);
      if (id.level < min_leaf_level_) continue;
      std::array<NodeKey, 8> ck;
      bool all_leaves = true;
      for (int c = 0; c < children; ++c) {
        ck[c] = pack_key(id.level + 1, 2 * id.idx[0] + (c & 1),
                         2 * id.idx[1] + ((c >> 1) & 1), 2 * id.idx[2] + ((c >> 2) & 1));
        const MRNode* child = find(ck[c]);
        if (!child || child->status != NodeStatus::Leaf) {
          all_leaves = false;
          break;
        }
      }
      if (!all_leaves) continue;
      if (!(detail(id) < eps)) continue;
      if (!merge_allowed(id)) continue;

      ConservedState sum;
      for (int c = 0; c < children; ++c) sum += nodes_.at(ck[c]).q;
      MRNode& p = nodes_.at(k);
      p.q = sum * (1.0 / static_cast<double>(children));
      p.q_old = p.q;
      p.status = NodeStatus::Leaf;
      for (int c = 0; c < children; ++c) nodes_.erase(ck[c]);
      merged = true;
    }
  }
}

void MRTree::add_virtual_leaves() {
  const int children = 1 << dim_;
  for (NodeKey k : leaves()) {
    const NodeId id = unpack_key(k);
    const int n = 1 << id.level;
    for (int a = 0; a < dim_; ++a)
      for (int off : {-2, -1, 1, 2}) {
        NodeId pos = id;
        pos.idx[a] += off;
        if (!bc_.periodic(a) && (pos.idx[a] < 0 || pos.idx[a] >= n))
          continue;  // physical boundary: resolved via the bc mapping
        std::array<bool, 3> flip;
        const NodeId mapped = map_position(pos, flip);
        if (contains(pack_key(mapped))) continue;

        // Covering node must be a real leaf one level up (gradedness).
        NodeId parent;
        parent.level = mapped.level - 1;
        parent.idx = {mapped.idx[0] >> 1, mapped.idx[1] >> 1, mapped.idx[2] >> 1};
        MRNode* pnode = find(pack_key(parent));
        assert(pnode && pnode->status == NodeStatus::Leaf);
        if (!pnode || pnode->status != NodeStatus::Leaf) continue;

        const std::vector<ConservedState> pred = predict_children(parent);
        for (int c = 0; c < children; ++c) {
          const NodeKey ckey =
              pack_key(parent.level + 1, 2 * parent.idx[0] + (c & 1),
                       2 * parent.idx[1] + ((c >> 1) & 1),
                       2 * parent.idx[2] + ((c >> 2) & 1));
          if (contains(ckey)) continue;
          MRNode v;
          v.q = pred[c];
          v.q_old = pred[c];
          v.status = NodeStatus::VirtualLeaf;
          nodes_.emplace(ckey, v);
        }
      }
  }
}

void MRTree::remove_virtual_leaves() {
  for (auto it = nodes_.begin(); it != nodes_.end();) {
    if (it->second.status == NodeStatus::VirtualLeaf)
      it = nodes_.erase(it);
    else
      ++it;
  }
}

bool MRTree::graded() const {
  for (NodeKey k : leaves()) {
    const NodeId id = unpack_key(k);
    const int n = 1 << id.level;
    for (int a = 0; a < dim_; ++a)
      for (int dir = -1; dir <= 1; dir += 2) {
        NodeId npos = id;
        npos.idx[a] += dir;
        if (!bc_.periodic(a) && (npos.idx[a] < 0 || npos.idx[a] >= n)) continue;
        std::array<bool, 3> flip;
        const NodeId mapped = map_position(npos, flip);
        const MRNode* nb = find(pack_key(mapped));
        if (!nb) {
          // Covered by coarser data; must be exactly one level up.
          NodeId up;
          up.level = mapped.level - 1;
          up.idx = {mapped.idx[0] >> 1, mapped.idx[1] >> 1, mapped.idx[2] >> 1};
          const MRNode* cover = find(pack_key(up));
          if (!cover || cover->status == NodeStatus::VirtualLeaf) return false;
          continue;
        }
        if (nb->status == NodeStatus::VirtualLeaf) {
          continue;  // virtual ring over a one-level-up leaf
        }
        if (nb->status == NodeStatus::Internal) {
          // Children adjacent to the shared face must themselves be leaves.
          const int face_bit = dir > 0 ? 0 : 1;
          const int tzn = dim_ == 3 ? 2 : 1;
          for (int t2 = 0; t2 < tzn; ++t2)
            for (int t1 = 0; t1 < 2; ++t1) {
              std::array<int, 3> cidx;
              cidx[a] = 2 * mapped.idx[a] + face_bit;
              const int b1 = a == 0 ? 1 : 0;
              const int b2 = a == 2 ? 1 : 2;
              cidx[b1] = 2 * mapped.idx[b1] + t1;
              cidx[b2] = 2 * mapped.idx[b2] + (dim_ == 3 ? t2 : 0);
              const MRNode* child =
                  find(pack_key(mapped.level + 1, cidx[0], cidx[1], cidx[2]));
              if (child && child->status == NodeStatus::Internal) return false;
            }
        }
      }
  }
  return true;
}

UniformGrid MRTree::to_uniform(int target_level) const {
  UniformGrid grid(dim_, target_level, origin_, extent_);
  const int n = grid.n();
  const int nz = dim_ == 3 ? n : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        NodeId pos;
        pos.level = target_level;
        pos.idx = {i, j, k};
        grid.block().at(i, j, k) = value_at(pos);
      }
  return grid;
}

std::string MRTree::dump() const {
  std::vector<NodeKey> keys;
  keys.reserve(nodes_.size());
  for (const auto& [k, node] : nodes_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  std::ostringstream os;
  os.precision(17);
  for (NodeKey k : keys) {
    const NodeId id = unpack_key(k);
    const MRNode& node = nodes_.at(k);
    const char* st = node.status == NodeStatus::Leaf ? "leaf"
                     : node.status == NodeStatus::Internal ? "internal"
                                                           : "virtual";
    os << id.level << ' ' << id.idx[0] << ' ' << id.idx[1] << ' ' << id.idx[2] << ' '
       << st << ' ' << node.q.rho << ' ' << node.q.mom[0] << ' ' << node.q.mom[1] << ' '
       << node.q.mom[2] << ' ' << node.q.rhoE << '\n';
  }
  return os.str();
}

}  // namespace adaptflow
