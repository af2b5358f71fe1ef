#include "adaptflow/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace adaptflow {

namespace {

constexpr char kMagic[4] = {'A', 'F', 'S', 'N'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value;
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(const std::string& path, const UniformGrid& grid, double gamma,
                    double time) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open snapshot for writing: " + path);
  os.write(kMagic, 4);
  put<uint32_t>(os, kVersion);
  put<uint32_t>(os, static_cast<uint32_t>(grid.dim()));
  put<int32_t>(os, grid.level());
  put<uint64_t>(os, static_cast<uint64_t>(grid.n()));
  put<double>(os, gamma);
  put<double>(os, time);
  put<double>(os, grid.origin());
  put<double>(os, grid.extent());

  const int dim = grid.dim();
  const int n = grid.n();
  const int nz = dim == 3 ? n : 1;
  std::vector<double> row(static_cast<size_t>(n) * (dim + 2));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j) {
      size_t w = 0;
      for (int i = 0; i < n; ++i) {
        const ConservedState& q = grid.block().at(i, j, k);
        row[w++] = q.rho;
        for (int c = 0; c < dim; ++c) row[w++] = q.mom[c];
        row[w++] = q.rhoE;
      }
      os.write(reinterpret_cast<const char*>(row.data()),
               static_cast<std::streamsize>(w * sizeof(double)));
    }
  if (!os) throw IoError("short write on snapshot: " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open snapshot: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("not a snapshot file: " + path);
  const uint32_t version = get<uint32_t>(is);
  if (version != kVersion)
    throw IoError("unsupported snapshot version " + std::to_string(version));
  const uint32_t dim = get<uint32_t>(is);
  const int32_t level = get<int32_t>(is);
  const uint64_t n = get<uint64_t>(is);
  const double gamma = get<double>(is);
  const double time = get<double>(is);
  const double origin = get<double>(is);
  const double extent = get<double>(is);
  if ((dim != 2 && dim != 3) || n != (uint64_t(1) << level))
    throw IoError("inconsistent snapshot header: " + path);

  Snapshot snap;
  snap.gamma = gamma;
  snap.time = time;
  snap.grid = UniformGrid(static_cast<int>(dim), level, origin, extent);
  const int nn = static_cast<int>(n);
  const int nz = dim == 3 ? nn : 1;
  std::vector<double> row(static_cast<size_t>(nn) * (dim + 2));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < nn; ++j) {
      is.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
      if (!is) throw IoError("truncated snapshot payload: " + path);
      size_t r = 0;
      for (int i = 0; i < nn; ++i) {
        ConservedState q;
        q.rho = row[r++];
        for (uint32_t c = 0; c < dim; ++c) q.mom[c] = row[r++];
        q.rhoE = row[r++];
        snap.grid.block().at(i, j, k) = q;
      }
    }
  return snap;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open file for writing: " + path);
  os << content;
  if (!os) throw IoError("short write: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace adaptflow
