#include "adaptflow/metrics.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace adaptflow {

std::string to_string(Method m) {
  switch (m) {
    case Method::FV: return "fv";
    case Method::MR: return "mr";
    case Method::MRLT: return "mrlt";
    case Method::AMR: return "amr";
    case Method::AMRLT: return "amrlt";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "fv") return Method::FV;
  if (s == "mr") return Method::MR;
  if (s == "mrlt") return Method::MRLT;
  if (s == "amr") return Method::AMR;
  if (s == "amrlt") return Method::AMRLT;
  throw ConfigError("unknown method '" + s + "' (expected fv|mr|mrlt|amr|amrlt)");
}

bool method_is_adaptive(Method m) { return m != Method::FV; }

std::string to_string(TaskGroup g) {
  switch (g) {
    case TaskGroup::Numerics: return "numerics";
    case TaskGroup::Adaptation: return "adaptation";
    case TaskGroup::Ghost: return "ghost";
    case TaskGroup::Transfer: return "transfer";
    case TaskGroup::Other: return "other";
  }
  return "?";
}

void TaskTimers::start(TaskGroup g) {
  Slot& s = slots_[static_cast<int>(g)];
  if (s.open != 0)
    throw UnbalancedTimer("timer group " + to_string(g) + " started twice");
  s.open = 1;
  s.started = std::chrono::steady_clock::now();
}

void TaskTimers::stop(TaskGroup g) {
  Slot& s = slots_[static_cast<int>(g)];
  if (s.open != 1)
    throw UnbalancedTimer("timer group " + to_string(g) + " stopped without start");
  s.open = 0;
  s.accum += std::chrono::duration<double>(std::chrono::steady_clock::now() - s.started)
                 .count();
}

double TaskTimers::seconds(TaskGroup g) const { return slots_[static_cast<int>(g)].accum; }

double TaskTimers::total() const {
  double t = 0.0;
  for (const Slot& s : slots_) t += s.accum;
  return t;
}

std::array<double, kTaskGroupCount> TaskTimers::percentages() const {
  check_balanced();
  std::array<double, kTaskGroupCount> out{};
  const double t = total();
  if (t <= 0.0) return out;
  for (int i = 0; i < kTaskGroupCount; ++i) out[i] = 100.0 * slots_[i].accum / t;
  return out;
}

void TaskTimers::check_balanced() const {
  for (int i = 0; i < kTaskGroupCount; ++i)
    if (slots_[i].open != 0)
      throw UnbalancedTimer("timer group " + to_string(static_cast<TaskGroup>(i)) +
                            " still running");
}

double RunReport::sum_cells() const {
  return std::accumulate(cells_per_step.begin(), cells_per_step.end(), 0.0);
}

double RunReport::sum_leaves() const {
  return std::accumulate(leaves_per_step.begin(), leaves_per_step.end(), 0.0);
}

double memory_compression(double sum_cells, long n_steps, double n_c) {
  if (n_steps == 0 || n_c == 0.0)
    throw DivisionDomain("memory_compression: zero step or cell count");
  return sum_cells / static_cast<double>(n_steps) / n_c;
}

double mesh_compression(double sum_leaves, long n_steps, double n_c) {
  if (n_steps == 0 || n_c == 0.0)
    throw DivisionDomain("mesh_compression: zero step or cell count");
  return sum_leaves / static_cast<double>(n_steps) / n_c;
}

double cpu_compression(double cpu_adaptive, double cpu_fv) {
  if (cpu_fv == 0.0) throw DivisionDomain("cpu_compression: zero baseline time");
  return cpu_adaptive / cpu_fv;
}

double accuracy_perturbation(double l1_fv, double l1_adaptive) {
  if (l1_fv == 0.0) throw DivisionDomain("accuracy_perturbation: zero baseline error");
  return std::abs(l1_fv - l1_adaptive) / l1_fv;
}

double overhead(double cpu_adaptive, double sum_leaves, double cpu_fv,
                double fv_cell_steps) {
  if (sum_leaves == 0.0 || cpu_fv == 0.0 || fv_cell_steps == 0.0)
    throw DivisionDomain("overhead: zero denominator");
  const double gamma_a = cpu_adaptive / sum_leaves;
  const double gamma_fv = cpu_fv / fv_cell_steps;
  return gamma_a / gamma_fv - 1.0;
}

Rates rates(const RunReport& adaptive, const RunReport& fv, double n_c) {
  if (fv.n_steps == 0 || n_c == 0.0) throw DivisionDomain("rates: zero baseline size");
  Rates r;
  r.cpu_compression = cpu_compression(adaptive.wall_seconds, fv.wall_seconds);
  r.memory_compression = memory_compression(adaptive.sum_cells(), adaptive.n_steps, n_c);
  r.mesh_compression = mesh_compression(adaptive.sum_leaves(), adaptive.n_steps, n_c);
  r.perturbation = accuracy_perturbation(fv.l1.rho, adaptive.l1.rho);
  r.overhead = overhead(adaptive.wall_seconds, adaptive.sum_leaves(), fv.wall_seconds,
                        static_cast<double>(fv.n_steps) * n_c);
  return r;
}

ConservedState l1_error(const UniformGrid& a, const UniformGrid& reference) {
  if (reference.level() < a.level())
    throw LevelMismatch("l1_error: reference level " + std::to_string(reference.level()) +
                        " coarser than solution level " + std::to_string(a.level()));
  const UniformGrid ref = restrict_to_level(reference, a.level());
  ConservedState sum;
  a.block().for_interior([&](int i, int j, int k) {
    const ConservedState& qa = a.block().at(i, j, k);
    const ConservedState& qr = ref.block().at(i, j, k);
    sum.rho += std::abs(qa.rho - qr.rho);
    for (int c = 0; c < 3; ++c) sum.mom[c] += std::abs(qa.mom[c] - qr.mom[c]);
    sum.rhoE += std::abs(qa.rhoE - qr.rhoE);
  });
  return sum * a.cell_volume();
}

std::string report_csv_header() {
  return "method,case,level,n_steps,wall_s,sum_cells,sum_leaves,l1_rho,"
         "cpu_compression,memory_compression,mesh_compression,perturbation,overhead,"
         "max_cfl,fallbacks,scheme";
}

std::string report_csv_row(const RunReport& report, const Rates* r) {
  std::ostringstream os;
  os.precision(12);
  os << to_string(report.method) << ',' << report.case_name << ',' << report.level << ','
     << report.n_steps << ',' << report.wall_seconds << ',' << report.sum_cells() << ','
     << report.sum_leaves() << ',';
  if (report.has_l1) os << report.l1.rho;
  os << ',';
  if (r)
    os << r->cpu_compression << ',' << r->memory_compression << ','
       << r->mesh_compression << ',' << r->perturbation << ',' << r->overhead;
  else
    os << ",,,,";
  os << ',' << report.max_cfl << ',' << report.fallbacks << ',' << report.scheme_desc;
  return os.str();
}

}  // namespace adaptflow
