#include "adaptflow/cases.hpp"

#include <cmath>
#include <filesystem>

#include "adaptflow/snapshot.hpp"
#include "adaptflow/unigrid.hpp"

namespace adaptflow {

namespace {

// Rotation and stretching of the 3D ellipsoid case.
constexpr double kEllipsoidRc = 3.0 / 5.0;
constexpr double kStretchA = 1.0 / 3.0;
constexpr double kStretchB = 1.0;
constexpr double kStretchC = 3.0;
const double kTheta = M_PI / 3.0;
const double kPhi = M_PI / 4.0;

ConservedState lax_liu6_state(double x, double y, const GasModel& gas) {
  // Quadrants: I (+,+), II (-,+), III (-,-), IV (+,-) around (1/2, 1/2).
  Primitives w;
  w.p = 1.0;
  const bool right = x > 0.5;
  const bool top = y > 0.5;
  if (right && top) {  // I
    w.rho = 1.0;
    w.v = {0.75, -0.5, 0.0};
  } else if (!right && top) {  // II
    w.rho = 2.0;
    w.v = {0.75, 0.5, 0.0};
  } else if (!right && !top) {  // III
    w.rho = 1.0;
    w.v = {-0.75, 0.5, 0.0};
  } else {  // IV
    w.rho = 3.0;
    w.v = {-0.75, -0.5, 0.0};
  }
  return conserved(w, gas);
}

ConservedState ellipsoid_state(double x, double y, double z) {
  ConservedState q;
  const double r = ellipsoid_radius(x, y, z);
  if (r < kEllipsoidRc) {
    q.rho = 0.125;
    q.rhoE = 0.25;
  } else {
    q.rho = 1.0;
    q.rhoE = 2.5;
  }
  return q;
}

CaseSpec make_lax_liu6() {
  CaseSpec c;
  c.name = "lax_liu_6";
  c.dim = 2;
  c.origin = 0.0;
  c.extent = 1.0;
  c.t_end = 0.25;
  c.bc = BoundaryCondition::all(BcKind::Outflow);
  c.steps_per_level = {{7, 160}, {8, 320}, {9, 640}, {10, 1280}};
  c.mr_epsilon = 0.0023;
  c.amr_eps_rho = 0.05;
  c.amr_eps_p = 0.05;
  c.cluster_efficiency = 0.8;
  c.default_reference_level = 10;
  return c;
}

CaseSpec make_ellipsoid3d() {
  CaseSpec c;
  c.name = "ellipsoid3d";
  c.dim = 3;
  c.origin = -2.0;
  c.extent = 4.0;
  c.t_end = 0.28;
  c.bc = BoundaryCondition::all(BcKind::Outflow);
  c.steps_per_level = {{4, 4}, {5, 8}, {6, 32}, {7, 64}, {8, 128}};
  c.mr_epsilon = 0.013;
  c.amr_eps_rho = 0.05;
  c.amr_eps_p = 0.05;
  c.cluster_efficiency = 0.8;
  c.default_reference_level = 8;
  return c;
}

}  // namespace

double ellipsoid_radius(double x1, double x2, double x3) {
  const double ct = std::cos(kTheta), st = std::sin(kTheta);
  const double cp = std::cos(kPhi), sp = std::sin(kPhi);
  const double x1r = x1 * ct - x2 * st;
  const double x2r = (x1 * st + x2 * ct) * cp - x3 * sp;
  const double x3r = (x1 * st + x2 * ct) * sp + x3 * cp;
  const double a = x1r / kStretchA;
  const double b = x2r / kStretchB;
  const double c = x3r / kStretchC;
  return std::sqrt(a * a + b * b + c * c);
}

long CaseSpec::steps_for_level(int level) const {
  if (steps_per_level.empty()) throw ConfigError("case has no step schedule");
  auto it = steps_per_level.find(level);
  if (it != steps_per_level.end()) return it->second;
  // Extrapolate: halve below the table, double above it.
  const auto lo = steps_per_level.begin();
  const auto hi = std::prev(steps_per_level.end());
  if (level < lo->first) {
    const int shift = lo->first - level;
    return std::max<long>(1, lo->second >> shift);
  }
  const int shift = level - hi->first;
  return hi->second << shift;
}

ConservedState CaseSpec::initial_state(double x, double y, double z) const {
  if (name == "lax_liu_6") return lax_liu6_state(x, y, gas);
  if (name == "ellipsoid3d") return ellipsoid_state(x, y, z);
  throw ConfigError("case '" + name + "' has no initializer");
}

void init_case(const CaseSpec& spec, UniformGrid& grid) {
  if (grid.dim() != spec.dim)
    throw BadDomain("grid dimension " + std::to_string(grid.dim()) +
                    " does not match case " + spec.name);
  if (grid.origin() != spec.origin || grid.extent() != spec.extent)
    throw BadDomain("grid geometry does not match case " + spec.name);
  grid.block().for_interior([&](int i, int j, int k) {
    grid.block().at(i, j, k) =
        spec.initial_state(grid.center(i), grid.center(j), grid.center(k));
  });
}

const CaseSpec& find_case(const std::string& name) {
  static const CaseSpec lax = make_lax_liu6();
  static const CaseSpec ell = make_ellipsoid3d();
  if (name == lax.name) return lax;
  if (name == ell.name) return ell;
  std::string known;
  for (const auto& n : case_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown case '" + name + "' (registered: " + known + ")");
}

std::vector<std::string> case_names() { return {"lax_liu_6", "ellipsoid3d"}; }

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string reference_config_string(const CaseSpec& spec, int ref_level,
                                    const SchemeConfig& scheme) {
  std::string s;
  s += "case=" + spec.name;
  s += ";level=" + std::to_string(ref_level);
  s += ";n_steps=" + std::to_string(spec.steps_for_level(ref_level));
  s += ";flux=" + to_string(scheme.flux);
  s += ";limiter=" + to_string(scheme.limiter);
  s += ";integrator=" + to_string(scheme.integrator);
  s += ";gamma=" + std::to_string(spec.gas.gamma);
  return s;
}

std::string reference_cache_path(const CaseSpec& spec, int ref_level,
                                 const SchemeConfig& scheme,
                                 const std::string& cache_dir) {
  return cache_dir + "/" + spec.name + "_L" + std::to_string(ref_level) + "_" +
         to_string(scheme.flux) + ".snap";
}

UniformGrid reference_solution(const CaseSpec& spec, int ref_level,
                               const SchemeConfig& scheme, const std::string& cache_dir) {
  const std::string config = reference_config_string(spec, ref_level, scheme);
  const std::string key = "hash=" + std::to_string(fnv1a(config)) + "\n" + config + "\n";

  std::string path, meta_path;
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    path = reference_cache_path(spec, ref_level, scheme, cache_dir);
    meta_path = path + ".meta";
    if (std::filesystem::exists(path)) {
      if (!std::filesystem::exists(meta_path) || read_text_file(meta_path) != key)
        throw CacheCorrupt("cached reference " + path +
                           " does not match the requested configuration");
      Snapshot snap = read_snapshot(path);
      if (snap.grid.level() != ref_level || snap.grid.dim() != spec.dim)
        throw CacheCorrupt("cached reference " + path + " has wrong geometry");
      return std::move(snap.grid);
    }
  }

  UniformRunResult res =
      run_uniform(spec, ref_level, spec.steps_for_level(ref_level), scheme);
  if (!cache_dir.empty()) {
    write_snapshot(path, res.grid, spec.gas.gamma, spec.t_end);
    write_text_file(meta_path, key);
  }
  return std::move(res.grid);
}

}  // namespace adaptflow
