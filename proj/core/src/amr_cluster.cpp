#include <algorithm>
#include <cmath>

#include "adaptflow/amr.hpp"

namespace adaptflow {

long IndexMask::count() const {
  long c = 0;
  for (uint8_t b : bits_) c += b;
  return c;
}

bool IndexMask::any() const {
  for (uint8_t b : bits_)
    if (b) return true;
  return false;
}

void IndexMask::set_box(const Box& b) {
  for (int k = std::max(0, b.lo[2]); k < std::min(n_[2], b.hi[2]); ++k)
    for (int j = std::max(0, b.lo[1]); j < std::min(n_[1], b.hi[1]); ++j)
      for (int i = std::max(0, b.lo[0]); i < std::min(n_[0], b.hi[0]); ++i)
        set(i, j, k);
}

IndexMask IndexMask::dilated(int radius, const BoundaryCondition& bc) const {
  IndexMask out(dim_, n_[0]);
  const int rz = dim_ == 3 ? radius : 0;
  for (int k = 0; k < n_[2]; ++k)
    for (int j = 0; j < n_[1]; ++j)
      for (int i = 0; i < n_[0]; ++i) {
        if (!get(i, j, k)) continue;
        for (int dk = -rz; dk <= rz; ++dk)
          for (int dj = -radius; dj <= radius; ++dj)
            for (int di = -radius; di <= radius; ++di) {
              std::array<int, 3> p = {i + di, j + dj, k + dk};
              bool ok = true;
              for (int a = 0; a < dim_; ++a) {
                if (p[a] >= 0 && p[a] < n_[a]) continue;
                if (bc.periodic(a))
                  p[a] = ((p[a] % n_[a]) + n_[a]) % n_[a];
                else
                  ok = false;
              }
              if (ok) out.set(p[0], p[1], p[2]);
            }
      }
  return out;
}

void flag_cells(const BlockData& data, const Box& box, const GasModel& gas,
                double eps_rho, double eps_p, IndexMask& mask) {
  const int dim = data.dim();
  const int nx = box.extent(0), ny = box.extent(1);
  const int nz = dim == 3 ? box.extent(2) : 1;

  auto w_of = [&](int i, int j, int k) {
    const Primitives w = primitives_unguarded(data.at(i, j, k), gas);
    return std::array<double, 2>{w.rho, w.p};
  };

  const int an = dim == 3 ? 8 : 4;  // forward offsets alpha in {0,1}^d
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const auto w0 = w_of(i, j, k);
        bool flag = false;
        for (int a = 1; a < an && !flag; ++a) {
          const int ai = a & 1, aj = (a >> 1) & 1, ak = (a >> 2) & 1;
          const auto w1 = w_of(i + ai, j + aj, k + ak);
          if (std::abs(w1[0] - w0[0]) > eps_rho || std::abs(w1[1] - w0[1]) > eps_p)
            flag = true;
        }
        if (flag) mask.set(box.lo[0] + i, box.lo[1] + j, box.lo[2] + k);
      }
}

namespace {

struct ClusterCtx {
  const IndexMask* flags;
  const IndexMask* allowed;
  double efficiency;
  int dim;
  std::vector<Box>* out;
};

Box bounding_box(const ClusterCtx& ctx, const Box& region, long& flagged) {
  Box b;
  b.lo = {INT32_MAX, INT32_MAX, INT32_MAX};
  b.hi = {INT32_MIN, INT32_MIN, INT32_MIN};
  flagged = 0;
  for (int k = region.lo[2]; k < region.hi[2]; ++k)
    for (int j = region.lo[1]; j < region.hi[1]; ++j)
      for (int i = region.lo[0]; i < region.hi[0]; ++i) {
        if (!ctx.flags->get(i, j, k)) continue;
        ++flagged;
        b.lo = {std::min(b.lo[0], i), std::min(b.lo[1], j), std::min(b.lo[2], k)};
        b.hi = {std::max(b.hi[0], i + 1), std::max(b.hi[1], j + 1),
                std::max(b.hi[2], k + 1)};
      }
  return b;
}

bool fully_allowed(const ClusterCtx& ctx, const Box& b) {
  if (!ctx.allowed) return true;
  for (int k = b.lo[2]; k < b.hi[2]; ++k)
    for (int j = b.lo[1]; j < b.hi[1]; ++j)
      for (int i = b.lo[0]; i < b.hi[0]; ++i)
        if (!ctx.allowed->get(i, j, k)) return false;
  return true;
}

std::vector<long> signature(const ClusterCtx& ctx, const Box& b, int axis) {
  std::vector<long> sig(static_cast<size_t>(b.extent(axis)), 0);
  for (int k = b.lo[2]; k < b.hi[2]; ++k)
    for (int j = b.lo[1]; j < b.hi[1]; ++j)
      for (int i = b.lo[0]; i < b.hi[0]; ++i)
        if (ctx.flags->get(i, j, k)) {
          const int c = axis == 0 ? i : axis == 1 ? j : k;
          ++sig[static_cast<size_t>(c - b.lo[axis])];
        }
  return sig;
}

// Split plane (absolute index along axis) or -1: largest interior run of
// zero signature, else the steepest Laplacian sign change.
int signature_split(const std::vector<long>& sig, int lo, int* quality) {
  const int n = static_cast<int>(sig.size());
  // Zero gaps.
  int best_len = 0, best_mid = -1;
  int run = 0;
  for (int i = 0; i < n; ++i) {
    if (sig[i] == 0) {
      ++run;
    } else {
      if (run > 0 && i - run > 0) {  // interior gap [i-run, i)
        if (run > best_len) {
          best_len = run;
          best_mid = i - run + run / 2;
        }
      }
      run = 0;
    }
  }
  if (best_mid > 0) {
    *quality = 1000000 + best_len;
    return lo + best_mid;
  }
  // Laplacian sign change with the steepest jump.
  if (n >= 4) {
    std::vector<long> lap(static_cast<size_t>(n), 0);
    for (int i = 1; i < n - 1; ++i) lap[i] = sig[i - 1] - 2 * sig[i] + sig[i + 1];
    long best_jump = 0;
    int best_pos = -1;
    for (int i = 1; i < n - 2; ++i) {
      if ((lap[i] < 0 && lap[i + 1] > 0) || (lap[i] > 0 && lap[i + 1] < 0)) {
        const long jump = std::abs(lap[i] - lap[i + 1]);
        if (jump > best_jump) {
          best_jump = jump;
          best_pos = i + 1;
        }
      }
    }
    if (best_pos > 0) {
      *quality = static_cast<int>(std::min<long>(best_jump, 999999));
      return lo + best_pos;
    }
  }
  *quality = 0;
  return -1;
}

void cluster_recurse(const ClusterCtx& ctx, const Box& region) {
  long flagged = 0;
  const Box b = bounding_box(ctx, region, flagged);
  if (flagged == 0) return;
  const double eff = static_cast<double>(flagged) / static_cast<double>(b.volume());
  const bool allowed_ok = fully_allowed(ctx, b);
  if ((eff >= ctx.efficiency && allowed_ok) || b.volume() == 1) {
    ctx.out->push_back(b);
    return;
  }

  // Choose the best signature split over the axes; fall back to halving the
  // longest axis.
  int split_axis = -1, split_pos = -1, best_quality = -1;
  for (int a = 0; a < ctx.dim; ++a) {
    if (b.extent(a) < 2) continue;
    const std::vector<long> sig = signature(ctx, b, a);
    int quality = 0;
    const int pos = signature_split(sig, b.lo[a], &quality);
    if (pos > b.lo[a] && pos < b.hi[a] && quality > best_quality) {
      best_quality = quality;
      split_axis = a;
      split_pos = pos;
    }
  }
  if (split_axis < 0) {
    for (int a = 0; a < ctx.dim; ++a)
      if (split_axis < 0 || b.extent(a) > b.extent(split_axis)) split_axis = a;
    if (b.extent(split_axis) < 2) {
      // Cannot split further; accept (flagged cells must be covered).
      ctx.out->push_back(b);
      return;
    }
    split_pos = b.lo[split_axis] + b.extent(split_axis) / 2;
  }

  Box left = b, right = b;
  left.hi[split_axis] = split_pos;
  right.lo[split_axis] = split_pos;
  cluster_recurse(ctx, left);
  cluster_recurse(ctx, right);
}

}  // namespace

std::vector<Box> cluster(const IndexMask& flags, double efficiency,
                         const IndexMask* allowed) {
  std::vector<Box> out;
  ClusterCtx ctx{&flags, allowed, efficiency, flags.dim(), &out};
  Box all;
  all.lo = {0, 0, 0};
  all.hi = {flags.n(0), flags.n(1), flags.n(2)};
  cluster_recurse(ctx, all);
  std::sort(out.begin(), out.end(), [](const Box& a, const Box& b) {
    return std::tie(a.lo[2], a.lo[1], a.lo[0]) < std::tie(b.lo[2], b.lo[1], b.lo[0]);
  });
  return out;
}

}  // namespace adaptflow
