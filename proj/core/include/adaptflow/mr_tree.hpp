#ifndef ADAPTFLOW_MR_TREE_HPP
#define ADAPTFLOW_MR_TREE_HPP

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "adaptflow/grid.hpp"

namespace adaptflow {

/// Node address: level plus index vector within the level. Level l covers
/// the domain with 2^l cells per axis.
struct NodeId {
  int level = 0;
  std::array<int, 3> idx = {0, 0, 0};
};

/// Packed node key. 15 bits per index component bounds the resolution at
/// level 15 per axis, far beyond desk scale.
using NodeKey = uint64_t;

inline constexpr int kKeyIndexBits = 15;

inline NodeKey pack_key(int level, int i, int j, int k) {
  return (static_cast<NodeKey>(level) << (3 * kKeyIndexBits)) |
         (static_cast<NodeKey>(i) << (2 * kKeyIndexBits)) |
         (static_cast<NodeKey>(j) << kKeyIndexBits) | static_cast<NodeKey>(k);
}
inline NodeKey pack_key(const NodeId& id) {
  return pack_key(id.level, id.idx[0], id.idx[1], id.idx[2]);
}
inline NodeId unpack_key(NodeKey key) {
  constexpr NodeKey mask = (NodeKey(1) << kKeyIndexBits) - 1;
  NodeId id;
  id.idx[2] = static_cast<int>(key & mask);
  id.idx[1] = static_cast<int>((key >> kKeyIndexBits) & mask);
  id.idx[0] = static_cast<int>((key >> (2 * kKeyIndexBits)) & mask);
  id.level = static_cast<int>(key >> (3 * kKeyIndexBits));
  return id;
}

enum class NodeStatus : uint8_t { Leaf, Internal, VirtualLeaf };

struct MRNode {
  ConservedState q;      // current cell average
  ConservedState q_old;  // state at the node's last step start (time brackets)
  ConservedState rhs;    // stage scratch
  NodeStatus status = NodeStatus::Leaf;
};

/// Graded tree of cell averages over a square/cubic domain. Leaves carry the
/// evolved solution; internal nodes hold the projection (mean) of their
/// children; virtual leaves are temporary same-level neighbors materialized
/// for flux stencils and never time-evolved.
class MRTree {
 public:
  MRTree() = default;
  MRTree(int dim, int max_level, double origin, double extent,
         const BoundaryCondition& bc);

  /// Builds the fully refined tree from a uniform grid (whose level becomes
  /// the tree's max level), sets the per-component detail normalization from
  /// the grid data, then coarsens by thresholding with eps.
  static MRTree from_uniform(const UniformGrid& grid, double eps,
                             const BoundaryCondition& bc);

  int dim() const { return dim_; }
  int max_level() const { return max_level_; }
  double origin() const { return origin_; }
  double extent() const { return extent_; }
  double dx(int level) const { return extent_ / static_cast<double>(1 << level); }
  const BoundaryCondition& bc() const { return bc_; }

  /// Leaves may not be coarsened below this level (used by local time
  /// stepping to bound the substep depth).
  void set_min_leaf_level(int level) { min_leaf_level_ = level; }
  int min_leaf_level() const { return min_leaf_level_; }

  const std::array<double, 5>& detail_norms() const { return norms_; }

  // --- node access -------------------------------------------------------

  bool contains(NodeKey key) const { return nodes_.count(key) != 0; }
  const MRNode* find(NodeKey key) const {
    auto it = nodes_.find(key);
    return it == nodes_.end() ? nullptr : &it->second;
  }
  MRNode* find(NodeKey key) {
    auto it = nodes_.find(key);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  long node_count() const { return static_cast<long>(nodes_.size()); }
  long leaf_count() const;
  long virtual_count() const;

  /// Sorted keys of all real leaves (optionally restricted to one level).
  std::vector<NodeKey> leaves() const;
  std::vector<NodeKey> leaves_at(int level) const;
  /// Keys of internal nodes with level in [lo, hi], finest level first.
  std::vector<NodeKey> internal_keys(int lo, int hi) const;
  /// Coarsest and finest level currently holding real leaves.
  int coarsest_leaf_level() const;
  int finest_leaf_level() const;

  /// Cell-average value at an in-domain position: the node value when the
  /// position is materialized, otherwise the recursive prediction from the
  /// covering coarser data. Periodic axes wrap.
  ConservedState value_at(const NodeId& pos) const;

  /// Stencil lookup for flux assembly: applies the physical boundary mapping
  /// (wrap, clamp, or mirror with momentum flip) before resolving.
  ConservedState stencil_value(const NodeId& pos) const;

  // --- multiresolution transform -----------------------------------------

  /// Mean of 2^d child averages (exact conservative projection).
  static ConservedState project(const std::vector<ConservedState>& children);

  /// Third-order prediction of the 2^d children of a node from its
  /// level-neighborhood, tensor product of quadratic cell-average
  /// interpolation. One-sided stencils at non-periodic domain boundaries.
  std::vector<ConservedState> predict_children(const NodeId& parent) const;

  /// Max-norm prediction error of a node's children, per component scaled by
  /// the detail normalization. The node must be internal.
  double detail(const NodeId& node) const;

  /// Refreshes every internal node as the mean of its children, bottom-up.
  void project_internals();

  // --- adaptation --------------------------------------------------------

  /// Splits every leaf whose parent detail is >= eps (one preventive level),
  /// optionally dilating the split set by a per-level buffer of leaves
  /// within the given Chebyshev radius, then restores gradedness. New
  /// children are initialized by prediction. Refinement is capped at the
  /// max level.
  void refine(double eps, const std::vector<int>& buffer_radius_per_level = {});

  /// Merges sibling groups of leaves whose detail is < eps, bottom-up until
  /// stable, skipping merges that would violate gradedness or go below the
  /// min leaf level.
  void coarsen(double eps);

  /// Materializes virtual children of coarser leaves so every real leaf has
  /// two same-level neighbor layers along each axis for flux stencils.
  /// Values are predictions from the covering leaf's neighborhood.
  void add_virtual_leaves();
  void remove_virtual_leaves();

  /// True when every real leaf's face neighbors differ by at most one level.
  bool graded() const;

  /// Projects the adaptive solution onto the uniform mesh of the target
  /// level: finer data is averaged down, coarser data filled by recursive
  /// prediction.
  UniformGrid to_uniform(int target_level) const;

  /// Writes one deterministic record per node: level, index, status, state.
  std::string dump() const;

 private:
  friend class MRSolver;

  struct AxisStencil {
    std::array<int, 3> pos;       // absolute positions along the axis
    std::array<double, 3> w_low;  // weights of the low child
    std::array<double, 3> w_high;
  };
  AxisStencil axis_stencil(int level, int coord, int axis) const;

  ConservedState predict_single(const NodeId& child) const;
  double detail_between(const NodeId& parent,
                        const std::vector<ConservedState>& actual) const;
  bool merge_allowed(const NodeId& parent) const;
  void split_leaf(NodeKey key);
  void enforce_gradedness();
  void set_norms_from(const UniformGrid& grid);

  /// Maps a possibly out-of-domain position through the boundary conditions.
  /// Returns false when the mapped position needs a momentum flip recorded
  /// in `flip`.
  NodeId map_position(const NodeId& pos, std::array<bool, 3>& flip) const;

  int dim_ = 2;
  int max_level_ = 0;
  double origin_ = 0.0;
  double extent_ = 1.0;
  BoundaryCondition bc_;
  int min_leaf_level_ = 0;
  std::array<double, 5> norms_ = {1, 1, 1, 1, 1};
  std::unordered_map<NodeKey, MRNode> nodes_;
};

}  // namespace adaptflow

#endif  // ADAPTFLOW_MR_TREE_HPP
