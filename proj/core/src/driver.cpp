#include "adaptflow/driver.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "adaptflow/amr_solver.hpp"
#include "adaptflow/mr_solver.hpp"
#include "adaptflow/snapshot.hpp"
#include "adaptflow/unigrid.hpp"

namespace adaptflow {

namespace {

FluxKind flux_from_string(const std::string& s) {
  if (s == "ausm_plus") return FluxKind::AusmPlus;
  if (s == "ausmdv") return FluxKind::Ausmdv;
  throw ConfigError("unknown flux '" + s + "' (ausm_plus|ausmdv)");
}

LimiterKind limiter_from_string(const std::string& s) {
  if (s == "van_albada") return LimiterKind::VanAlbada;
  if (s == "minmod") return LimiterKind::Minmod;
  throw ConfigError("unknown limiter '" + s + "' (van_albada|minmod)");
}

IntegratorKind integrator_from_string(const std::string& s) {
  if (s == "rk2") return IntegratorKind::RK2;
  if (s == "muscl_hancock") return IntegratorKind::MusclHancock;
  throw ConfigError("unknown integrator '" + s + "' (rk2|muscl_hancock)");
}

std::string scheme_desc(const SchemeConfig& s) {
  return to_string(s.flux) + "+" + to_string(s.limiter) + "+" + to_string(s.integrator);
}

std::string mesh_dump_path(const std::string& out_dir, long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "mesh_%07ld.txt", step);
  return out_dir + "/" + buf;
}

void dump_tree_mesh(const MRTree& tree, const std::string& path) {
  std::ostringstream os;
  os.precision(12);
  for (NodeKey k : tree.leaves()) {
    const NodeId id = unpack_key(k);
    const double h = tree.dx(id.level);
    os << id.level;
    for (int a = 0; a < tree.dim(); ++a) os << ' ' << tree.origin() + id.idx[a] * h;
    for (int a = 0; a < tree.dim(); ++a)
      os << ' ' << tree.origin() + (id.idx[a] + 1) * h;
    os << '\n';
  }
  write_text_file(path, os.str());
}

void dump_hierarchy_mesh(const PatchHierarchy& h, const std::string& path) {
  std::ostringstream os;
  os.precision(12);
  for (int l = 0; l < h.n_levels(); ++l) {
    const double hx = h.dx(l);
    for (const Patch& p : h.level(l).patches) {
      os << l;
      for (int a = 0; a < h.dim(); ++a) os << ' ' << h.origin() + p.box.lo[a] * hx;
      for (int a = 0; a < h.dim(); ++a) os << ' ' << h.origin() + p.box.hi[a] * hx;
      os << '\n';
    }
  }
  write_text_file(path, os.str());
}

// Piecewise-constant injection of the composite hierarchy data onto the
// uniform mesh of the finest resolution.
UniformGrid hierarchy_to_uniform(const PatchHierarchy& h, int target_level) {
  UniformGrid grid(h.dim(), target_level, h.origin(), h.extent());
  for (int l = 0; l < h.n_levels(); ++l) {
    const int shift = target_level - (h.base_exp() + l);
    if (shift < 0) throw LevelMismatch("hierarchy finer than requested projection");
    const int rep = 1 << shift;
    for (const Patch& p : h.level(l).patches) {
      const Box& b = p.box;
      for (int k = b.lo[2]; k < b.hi[2]; ++k)
        for (int j = b.lo[1]; j < b.hi[1]; ++j)
          for (int i = b.lo[0]; i < b.hi[0]; ++i) {
            const ConservedState& q = p.at(i, j, k);
            const int kz = h.dim() == 3 ? rep : 1;
            for (int dk = 0; dk < kz; ++dk)
              for (int dj = 0; dj < rep; ++dj)
                for (int di = 0; di < rep; ++di)
                  grid.block().at(i * rep + di, j * rep + dj,
                                  h.dim() == 3 ? k * rep + dk : 0) = q;
          }
    }
  }
  return grid;
}

}  // namespace

SchemeConfig resolve_scheme(const RunConfig& cfg) {
  SchemeConfig s = (cfg.method == Method::AMR || cfg.method == Method::AMRLT)
                       ? SchemeConfig::amr_preset()
                       : SchemeConfig::mr_preset();
  if (!cfg.flux.empty()) s.flux = flux_from_string(cfg.flux);
  if (!cfg.limiter.empty()) s.limiter = limiter_from_string(cfg.limiter);
  if (!cfg.integrator.empty()) s.integrator = integrator_from_string(cfg.integrator);
  return s;
}

void apply_config_line(RunConfig& cfg, const std::string& key,
                       const std::string& value) {
  try {
    if (key == "case")
      cfg.case_name = value;
    else if (key == "method")
      cfg.method = method_from_string(value);
    else if (key == "level")
      cfg.level = std::stoi(value);
    else if (key == "n_steps")
      cfg.n_steps = std::stol(value);
    else if (key == "eps")
      cfg.eps = std::stod(value);
    else if (key == "eps_rho")
      cfg.eps_rho = std::stod(value);
    else if (key == "eps_p")
      cfg.eps_p = std::stod(value);
    else if (key == "eta_tol")
      cfg.eta_tol = std::stod(value);
    else if (key == "ref_level")
      cfg.ref_level = std::stoi(value);
    else if (key == "lt_level_gap")
      cfg.lt_level_gap = std::stoi(value);
    else if (key == "flux_correction")
      cfg.flux_correction = value == "1" || value == "true" || value == "on";
    else if (key == "out_dir")
      cfg.out_dir = value;
    else if (key == "cache_dir")
      cfg.cache_dir = value;
    else if (key == "dump_every")
      cfg.dump_every = std::stol(value);
    else if (key == "flux")
      cfg.flux = value;
    else if (key == "limiter")
      cfg.limiter = value;
    else if (key == "integrator")
      cfg.integrator = value;
    else
      throw ConfigError("unknown config key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad value '" + value + "' for config key '" + key + "'");
  } catch (const std::out_of_range&) {
    throw ConfigError("bad value '" + value + "' for config key '" + key + "'");
  }
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const size_t eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      const size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

std::string config_to_string(const RunConfig& cfg) {
  std::ostringstream os;
  os << "case=" << cfg.case_name << '\n';
  os << "method=" << to_string(cfg.method) << '\n';
  os << "level=" << cfg.level << '\n';
  os << "n_steps=" << cfg.n_steps << '\n';
  os << "eps=" << cfg.eps << '\n';
  os << "eps_rho=" << cfg.eps_rho << '\n';
  os << "eps_p=" << cfg.eps_p << '\n';
  os << "eta_tol=" << cfg.eta_tol << '\n';
  os << "ref_level=" << cfg.ref_level << '\n';
  os << "lt_level_gap=" << cfg.lt_level_gap << '\n';
  os << "flux_correction=" << (cfg.flux_correction ? 1 : 0) << '\n';
  os << "dump_every=" << cfg.dump_every << '\n';
  os << "scheme=" << scheme_desc(resolve_scheme(cfg)) << '\n';
  return os.str();
}

RunOutcome run_single(const RunConfig& cfg, const RunReport* baseline) {
  const CaseSpec& spec = find_case(cfg.case_name);
  const SchemeConfig scheme = resolve_scheme(cfg);
  const long n_steps = cfg.n_steps > 0 ? cfg.n_steps : spec.steps_for_level(cfg.level);
  const double eps = cfg.eps >= 0.0 ? cfg.eps : spec.mr_epsilon;

  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
  const bool dumps = !cfg.out_dir.empty() && cfg.dump_every > 0;

  RunOutcome out;
  UniformGrid final_grid;
  switch (cfg.method) {
    case Method::FV: {
      UniformRunResult r = run_uniform(spec, cfg.level, n_steps, scheme);
      out.report = std::move(r.report);
      final_grid = std::move(r.grid);
      break;
    }
    case Method::MR:
    case Method::MRLT: {
      MROptions opt;
      opt.epsilon = eps;
      opt.local_time = cfg.method == Method::MRLT;
      opt.local_time_level_gap = cfg.lt_level_gap;
      long next_dump = 0;
      if (dumps)
        opt.on_sample = [&](long steps, const MRTree& tree) {
          if (steps >= next_dump) {
            dump_tree_mesh(tree, mesh_dump_path(cfg.out_dir, steps));
            next_dump += cfg.dump_every;
          }
        };
      MRRunResult r = run_mr(spec, cfg.level, n_steps, scheme, opt);
      out.report = std::move(r.report);
      final_grid = r.tree.to_uniform(cfg.level);
      if (dumps) dump_tree_mesh(r.tree, mesh_dump_path(cfg.out_dir, n_steps));
      break;
    }
    case Method::AMR:
    case Method::AMRLT: {
      AmrRunOptions opt;
      opt.time_refine = cfg.method == Method::AMRLT;
      opt.flux_correction = cfg.flux_correction;
      opt.eps_rho = cfg.eps_rho;
      opt.eps_p = cfg.eps_p;
      opt.eta_tol = cfg.eta_tol;
      long next_dump = 0;
      if (dumps)
        opt.on_sample = [&](long steps, const PatchHierarchy& h) {
          if (steps >= next_dump) {
            dump_hierarchy_mesh(h, mesh_dump_path(cfg.out_dir, steps));
            next_dump += cfg.dump_every;
          }
        };
      AmrRunResult r = run_amr(spec, cfg.level, n_steps, scheme, opt);
      out.report = std::move(r.report);
      if (cfg.ref_level != 0) {
        const int ref_level =
            cfg.ref_level > 0 ? cfg.ref_level : spec.default_reference_level;
        if (ref_level <= cfg.level)
          throw ConfigError("ref_level must exceed the run level");
        const UniformGrid ref =
            reference_solution(spec, ref_level, scheme, cfg.cache_dir);
        out.report.l1 = l1_error_amr(*r.hierarchy, ref);
        out.report.has_l1 = true;
      }
      final_grid = hierarchy_to_uniform(*r.hierarchy, cfg.level);
      if (dumps) dump_hierarchy_mesh(*r.hierarchy, mesh_dump_path(cfg.out_dir, n_steps));
      break;
    }
  }
  out.report.scheme_desc = scheme_desc(scheme);

  // Uniform-mesh error evaluation for the grid-valued methods.
  if (cfg.ref_level != 0 && !out.report.has_l1) {
    const int ref_level =
        cfg.ref_level > 0 ? cfg.ref_level : spec.default_reference_level;
    if (ref_level <= cfg.level)
      throw ConfigError("ref_level must exceed the run level");
    const UniformGrid ref = reference_solution(spec, ref_level, scheme, cfg.cache_dir);
    out.report.l1 = l1_error(final_grid, ref);
    out.report.has_l1 = true;
  }

  if (baseline) {
    const double n_c = std::pow(2.0, spec.dim * cfg.level);
    out.rates = rates(out.report, *baseline, n_c);
  }

  if (!cfg.out_dir.empty()) {
    write_snapshot(cfg.out_dir + "/final.snap", final_grid, spec.gas.gamma, spec.t_end);
    write_text_file(cfg.out_dir + "/final.snap.txt", config_to_string(cfg));
    std::string csv = report_csv_header() + "\n" +
                      report_csv_row(out.report, out.rates ? &*out.rates : nullptr) +
                      "\n";
    write_text_file(cfg.out_dir + "/report.csv", csv);
  }
  return out;
}

namespace {

struct SweepRow {
  Method method;
  int level;
  bool failed = false;
  std::string error;
  RunOutcome outcome;
};

bool family_is_amr(Method m) { return m == Method::AMR || m == Method::AMRLT; }

}  // namespace

SweepResult run_sweep(const RunConfig& base, const std::vector<Method>& methods,
                      const std::vector<int>& levels) {
  SweepResult result;
  std::vector<SweepRow> rows;

  // Family uniform baselines, keyed by (amr_family, level).
  std::map<std::pair<bool, int>, RunOutcome> baselines;
  auto baseline_for = [&](bool amr_family, int level) -> RunOutcome& {
    const auto key = std::make_pair(amr_family, level);
    auto it = baselines.find(key);
    if (it == baselines.end()) {
      RunConfig fv = base;
      fv.method = Method::FV;
      fv.level = level;
      fv.out_dir.clear();
      const SchemeConfig preset =
          amr_family ? SchemeConfig::amr_preset() : SchemeConfig::mr_preset();
      fv.flux = to_string(preset.flux);
      fv.limiter = to_string(preset.limiter);
      fv.integrator = to_string(preset.integrator);
      it = baselines.emplace(key, run_single(fv)).first;
    }
    return it->second;
  };

  for (int level : levels) {
    for (Method m : methods) {
      if (m == Method::FV) continue;  // baselines are emitted separately
      SweepRow row;
      row.method = m;
      row.level = level;
      try {
        RunConfig cfg = base;
        cfg.method = m;
        cfg.level = level;
        cfg.out_dir.clear();
        const RunOutcome& fv = baseline_for(family_is_amr(m), level);
        row.outcome = run_single(cfg, &fv.report);
      } catch (const Error& e) {
        row.failed = true;
        row.error = e.what();
        result.all_ok = false;
      }
      rows.push_back(std::move(row));
    }
  }

  const bool want_fv =
      std::find(methods.begin(), methods.end(), Method::FV) != methods.end();

  std::ostringstream csv;
  csv << report_csv_header() << '\n';
  if (want_fv)
    for (const auto& [key, outcome] : baselines)
      csv << report_csv_row(outcome.report) << '\n';
  for (const SweepRow& row : rows) {
    if (row.failed) {
      csv << to_string(row.method) << ',' << base.case_name << ',' << row.level
          << ",FAILED: " << row.error << '\n';
      continue;
    }
    csv << report_csv_row(row.outcome.report,
                          row.outcome.rates ? &*row.outcome.rates : nullptr)
        << '\n';
  }
  result.csv = csv.str();

  // Human-readable tables in the layout of the benchmark write-up: accuracy
  // (error, rate, perturbation), counts/compression, and timing.
  std::ostringstream tab;
  tab << std::fixed;
  auto rate_of = [&](double coarse, double fine) {
    return std::log2(coarse / fine);
  };
  for (bool amr_family : {false, true}) {
    std::vector<const SweepRow*> fam;
    for (const SweepRow& row : rows)
      if (!row.failed && family_is_amr(row.method) == amr_family)
        fam.push_back(&row);
    const bool have_baselines = [&] {
      for (int level : levels)
        if (baselines.count({amr_family, level})) return true;
      return false;
    }();
    if (fam.empty() && !have_baselines) continue;

    tab << "== scheme family: " << (amr_family ? "ausmdv" : "ausm_plus") << " ==\n";
    tab << "accuracy (L1 density vs reference)\n";
    tab << std::setw(4) << "L" << std::setw(14) << "FV" << std::setw(8) << "rate";
    for (Method m : methods)
      if (m != Method::FV && family_is_amr(m) == amr_family)
        tab << std::setw(14) << to_string(m) << std::setw(8) << "rate" << std::setw(9)
            << "pert%";
    tab << '\n';
    double prev_fv = 0.0;
    std::map<Method, double> prev_m;
    for (int level : levels) {
      auto bit = baselines.find({amr_family, level});
      if (bit == baselines.end()) continue;
      const RunReport& fv = bit->second.report;
      tab << std::setw(4) << level << std::setprecision(7) << std::setw(14)
          << fv.l1.rho;
      tab << std::setprecision(3);
      if (prev_fv > 0.0)
        tab << std::setw(8) << rate_of(prev_fv, fv.l1.rho);
      else
        tab << std::setw(8) << "";
      prev_fv = fv.l1.rho;
      for (Method m : methods) {
        if (m == Method::FV || family_is_amr(m) != amr_family) continue;
        const SweepRow* row = nullptr;
        for (const SweepRow* r : fam)
          if (r->method == m && r->level == level) row = r;
        if (!row) {
          tab << std::setw(14) << "-" << std::setw(8) << "-" << std::setw(9) << "-";
          continue;
        }
        const RunReport& rep = row->outcome.report;
        tab << std::setprecision(7) << std::setw(14) << rep.l1.rho
            << std::setprecision(3);
        if (prev_m.count(m))
          tab << std::setw(8) << rate_of(prev_m[m], rep.l1.rho);
        else
          tab << std::setw(8) << "";
        prev_m[m] = rep.l1.rho;
        tab << std::setw(9) << 100.0 * row->outcome.rates->perturbation;
      }
      tab << '\n';
    }
    tab << "counts and compression\n";
    tab << std::setw(4) << "L";
    for (Method m : methods)
      if (m != Method::FV && family_is_amr(m) == amr_family)
        tab << std::setw(12) << (to_string(m) + " sumC") << std::setw(8) << "mem%"
            << std::setw(12) << "sumL" << std::setw(8) << "mesh%";
    tab << '\n';
    for (int level : levels) {
      tab << std::setw(4) << level;
      for (Method m : methods) {
        if (m == Method::FV || family_is_amr(m) != amr_family) continue;
        const SweepRow* row = nullptr;
        for (const SweepRow* r : fam)
          if (r->method == m && r->level == level) row = r;
        if (!row) {
          tab << std::setw(12) << "-" << std::setw(8) << "-" << std::setw(12) << "-"
              << std::setw(8) << "-";
          continue;
        }
        const Rates& rr = *row->outcome.rates;
        tab << std::setprecision(0) << std::setw(12) << row->outcome.report.sum_cells()
            << std::setprecision(1) << std::setw(8) << 100.0 * rr.memory_compression
            << std::setprecision(0) << std::setw(12) << row->outcome.report.sum_leaves()
            << std::setprecision(1) << std::setw(8) << 100.0 * rr.mesh_compression;
      }
      tab << '\n';
    }
    tab << "computing time\n";
    tab << std::setw(4) << "L" << std::setw(12) << "FV[s]";
    for (Method m : methods)
      if (m != Method::FV && family_is_amr(m) == amr_family)
        tab << std::setw(12) << (to_string(m) + "[s]") << std::setw(8) << "cpu%"
            << std::setw(10) << "ovhd%";
    tab << '\n';
    for (int level : levels) {
      auto bit = baselines.find({amr_family, level});
      if (bit == baselines.end()) continue;
      tab << std::setw(4) << level << std::setprecision(3) << std::setw(12)
          << bit->second.report.wall_seconds;
      for (Method m : methods) {
        if (m == Method::FV || family_is_amr(m) != amr_family) continue;
        const SweepRow* row = nullptr;
        for (const SweepRow* r : fam)
          if (r->method == m && r->level == level) row = r;
        if (!row) {
          tab << std::setw(12) << "-" << std::setw(8) << "-" << std::setw(10) << "-";
          continue;
        }
        const Rates& rr = *row->outcome.rates;
        tab << std::setw(12) << row->outcome.report.wall_seconds << std::setprecision(1)
            << std::setw(8) << 100.0 * rr.cpu_compression << std::setw(10)
            << 100.0 * rr.overhead << std::setprecision(3);
      }
      tab << '\n';
    }
  }
  result.table = tab.str();

  for (SweepRow& row : rows) result.rows.push_back(std::move(row.outcome));
  return result;
}

}  // namespace adaptflow
