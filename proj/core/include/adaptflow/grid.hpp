#ifndef ADAPTFLOW_GRID_HPP
#define ADAPTFLOW_GRID_HPP

#include <array>
#include <cassert>
#include <vector>

#include "adaptflow/errors.hpp"
#include "adaptflow/euler.hpp"

namespace adaptflow {

/// Rectangular block of cell states with ghost layers. The z axis is
/// degenerate (one cell, no ghosts) in 2D.
class BlockData {
 public:
  BlockData() = default;
  BlockData(int dim, std::array<int, 3> n, int ghost)
      : dim_(dim), ghost_(ghost), n_(n) {
    assert(dim == 2 || dim == 3);
    if (dim == 2) n_[2] = 1;
    gz_ = dim == 3 ? ghost : 0;
    sx_ = 1;
    sy_ = n_[0] + 2 * ghost_;
    sz_ = sy_ * (n_[1] + 2 * ghost_);
    total_ = sz_ * (n_[2] + 2 * gz_);
    data_.assign(static_cast<size_t>(total_), ConservedState{});
  }

  int dim() const { return dim_; }
  int ghost() const { return ghost_; }
  const std::array<int, 3>& n() const { return n_; }
  int n(int axis) const { return n_[axis]; }
  long size() const { return total_; }
  long interior_cells() const {
    return static_cast<long>(n_[0]) * n_[1] * n_[2];
  }

  long index(int i, int j, int k) const {
    return (i + ghost_) * sx_ + (j + ghost_) * static_cast<long>(sy_) +
           (k + gz_) * static_cast<long>(sz_);
  }
  long stride(int axis) const { return axis == 0 ? sx_ : axis == 1 ? sy_ : sz_; }

  ConservedState& at(int i, int j, int k = 0) { return data_[index(i, j, k)]; }
  const ConservedState& at(int i, int j, int k = 0) const { return data_[index(i, j, k)]; }
  ConservedState* data() { return data_.data(); }
  const ConservedState* data() const { return data_.data(); }

  /// Ghost extent along an axis (zero for the degenerate z axis in 2D).
  int ghost_along(int axis) const { return axis == 2 ? gz_ : ghost_; }

  template <typename F>
  void for_interior(F&& f) const {
    for (int k = 0; k < n_[2]; ++k)
      for (int j = 0; j < n_[1]; ++j)
        for (int i = 0; i < n_[0]; ++i) f(i, j, k);
  }

 private:
  int dim_ = 2;
  int ghost_ = 0;
  int gz_ = 0;
  std::array<int, 3> n_ = {0, 0, 1};
  int sx_ = 1, sy_ = 0, sz_ = 0;
  long total_ = 0;
  std::vector<ConservedState> data_;
};

enum class BcKind { Outflow, Periodic, Reflective };

/// Boundary condition per domain face; face index 2*axis (low) and
/// 2*axis + 1 (high). Periodic faces must come in matching pairs.
struct BoundaryCondition {
  std::array<BcKind, 6> faces = {BcKind::Outflow, BcKind::Outflow, BcKind::Outflow,
                                 BcKind::Outflow, BcKind::Outflow, BcKind::Outflow};

  static BoundaryCondition all(BcKind k) {
    BoundaryCondition bc;
    bc.faces.fill(k);
    return bc;
  }
  BcKind low(int axis) const { return faces[2 * axis]; }
  BcKind high(int axis) const { return faces[2 * axis + 1]; }
  bool periodic(int axis) const { return faces[2 * axis] == BcKind::Periodic; }
};

/// Uniform Cartesian grid covering a square/cubic domain at resolution
/// 2^level cells per axis, with ghost layers for the update stencil.
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(int dim, int level, double origin, double extent, int ghost = 2)
      : level_(level),
        origin_(origin),
        extent_(extent),
        block_(dim, {1 << level, 1 << level, 1 << level}, ghost) {
    dx_ = extent / static_cast<double>(1 << level);
  }

  int dim() const { return block_.dim(); }
  int level() const { return level_; }
  int n() const { return block_.n(0); }
  double dx() const { return dx_; }
  double origin() const { return origin_; }
  double extent() const { return extent_; }
  double cell_volume() const {
    double v = dx_ * dx_;
    return dim() == 3 ? v * dx_ : v;
  }
  /// Center coordinate of cell index along one axis.
  double center(int idx) const { return origin_ + (idx + 0.5) * dx_; }

  BlockData& block() { return block_; }
  const BlockData& block() const { return block_; }

 private:
  int level_ = 0;
  double origin_ = 0.0;
  double extent_ = 1.0;
  double dx_ = 1.0;
  BlockData block_;
};

/// Fills the ghost layers of a block from the physical boundary conditions.
/// Outflow copies the nearest interior cell, periodic wraps around,
/// reflective mirrors with the normal momentum negated.
void fill_ghosts(BlockData& block, const BoundaryCondition& bc);

inline void fill_ghosts(UniformGrid& grid, const BoundaryCondition& bc) {
  fill_ghosts(grid.block(), bc);
}

/// Conservative restriction: repeated one-level 2^d averaging down to the
/// target level. Throws LevelMismatch when the target is finer than the input.
UniformGrid restrict_to_level(const UniformGrid& fine, int target_level);

/// Sum of conserved quantities weighted by cell volume.
ConservedState total_conserved(const UniformGrid& grid);

}  // namespace adaptflow

#endif  // ADAPTFLOW_GRID_HPP
