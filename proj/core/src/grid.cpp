#include "adaptflow/grid.hpp"

namespace adaptflow {

namespace {

// Fills the ghosts of one axis over the full (already filled) extent of the
// other axes, so corner ghosts become consistent after sequential passes.
void fill_axis(BlockData& b, int axis, const BoundaryCondition& bc) {
  const int g = b.ghost_along(axis);
  if (g == 0) return;
  const int n = b.n(axis);

  // Extents of the transverse axes include their ghosts when already filled.
  std::array<int, 3> lo = {0, 0, 0}, hi = {b.n(0), b.n(1), b.n(2)};
  for (int a = 0; a < 3; ++a) {
    if (a == axis) continue;
    const int ga = a < axis ? b.ghost_along(a) : 0;
    lo[a] = -ga;
    hi[a] = b.n(a) + ga;
  }

  auto set_ghost = [&](int side) {
    const BcKind kind = side == 0 ? bc.low(axis) : bc.high(axis);
    for (int layer = 1; layer <= g; ++layer) {
      const int gi = side == 0 ? -layer : n - 1 + layer;
      int src = 0;
      bool flip = false;
      switch (kind) {
        case BcKind::Outflow:
          src = side == 0 ? 0 : n - 1;
          break;
        case BcKind::Periodic:
          src = side == 0 ? n - layer : layer - 1;
          break;
        case BcKind::Reflective:
          src = side == 0 ? layer - 1 : n - layer;
          flip = true;
          break;
      }
      std::array<int, 3> c;
      for (c[2] = (axis == 2 ? 0 : lo[2]); c[2] < (axis == 2 ? 1 : hi[2]); ++c[2])
        for (c[1] = (axis == 1 ? 0 : lo[1]); c[1] < (axis == 1 ? 1 : hi[1]); ++c[1])
          for (c[0] = (axis == 0 ? 0 : lo[0]); c[0] < (axis == 0 ? 1 : hi[0]); ++c[0]) {
            std::array<int, 3> dst = c, from = c;
            dst[axis] = gi;
            from[axis] = src;
            ConservedState q = b.at(from[0], from[1], from[2]);
            if (flip) q.mom[axis] = -q.mom[axis];
            b.at(dst[0], dst[1], dst[2]) = q;
          }
    }
  };
  set_ghost(0);
  set_ghost(1);
}

}  // namespace

void fill_ghosts(BlockData& block, const BoundaryCondition& bc) {
  for (int axis = 0; axis < block.dim(); ++axis) fill_axis(block, axis, bc);
}

UniformGrid restrict_to_level(const UniformGrid& fine, int target_level) {
  if (target_level > fine.level())
    throw LevelMismatch("restrict_to_level: target " + std::to_string(target_level) +
                        " finer than input level " + std::to_string(fine.level()));
  if (target_level == fine.level()) return fine;

  UniformGrid src = fine;
  while (src.level() > target_level) {
    UniformGrid coarse(src.dim(), src.level() - 1, src.origin(), src.extent(),
                       src.block().ghost());
    const int nc = coarse.n();
    const int dim = src.dim();
    const double w = dim == 3 ? 0.125 : 0.25;
    const int kzn = dim == 3 ? nc : 1;
    for (int k = 0; k < kzn; ++k)
      for (int j = 0; j < nc; ++j)
        for (int i = 0; i < nc; ++i) {
          ConservedState s;
          const int koff = dim == 3 ? 2 * k : 0;
          const int kcnt = dim == 3 ? 2 : 1;
          for (int dk = 0; dk < kcnt; ++dk)
            for (int dj = 0; dj < 2; ++dj)
              for (int di = 0; di < 2; ++di)
                s += src.block().at(2 * i + di, 2 * j + dj, koff + dk);
          coarse.block().at(i, j, k) = s * w;
        }
    src = std::move(coarse);
  }
  return src;
}

ConservedState total_conserved(const UniformGrid& grid) {
  ConservedState sum;
  grid.block().for_interior([&](int i, int j, int k) { sum += grid.block().at(i, j, k); });
  return sum * grid.cell_volume();
}

}  // namespace adaptflow
