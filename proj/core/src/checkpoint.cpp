#include "bvpb/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace bvpb {

namespace {

constexpr char kMagic[8] = {'B', 'V', 'P', 'B', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kEndianTag = 0x01020304u;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw NumericsError("checkpoint: truncated file");
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const SimulationState& state,
                      const SpaceGrid& space, const VelocityGrid& velocity) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("checkpoint: cannot open " + path + " for writing");
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, kEndianTag);
  put(out, std::int32_t(space.cells));
  put(out, space.x_lo);
  put(out, space.x_hi);
  put(out, std::int32_t(space.periodic ? 1 : 0));
  for (int a = 0; a < 3; ++a) {
    put(out, std::int32_t(velocity.axis(a).count));
    put(out, velocity.axis(a).center);
    put(out, velocity.axis(a).halfwidth);
  }
  put(out, state.field.time);
  put(out, std::int64_t(state.step));
  const auto dump = [&](const Tensor4& t) {
    put(out, std::uint64_t(t.size()));
    out.write(reinterpret_cast<const char*>(t.raw().data()),
              std::streamsize(t.size() * sizeof(double)));
  };
  dump(state.field.f1);
  dump(state.field.f2);
  if (!out) throw NumericsError("checkpoint: write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw NumericsError("checkpoint: bad magic in " + path);
  if (get<std::uint32_t>(in) != kVersion) throw NumericsError("checkpoint: unsupported version");
  if (get<std::uint32_t>(in) != kEndianTag)
    throw NumericsError("checkpoint: endianness mismatch");
  Checkpoint ck;
  const int cells = get<std::int32_t>(in);
  const double x_lo = get<double>(in);
  const double x_hi = get<double>(in);
  const bool periodic = get<std::int32_t>(in) != 0;
  ck.space = SpaceGrid::make(cells, x_lo, x_hi, periodic);
  for (int a = 0; a < 3; ++a) {
    ck.v_counts[a] = get<std::int32_t>(in);
    ck.v_center[a] = get<double>(in);
    ck.v_halfwidth = get<double>(in);
  }
  ck.time = get<double>(in);
  ck.step = long(get<std::int64_t>(in));
  const auto load = [&](Tensor4& t) {
    const std::uint64_t n = get<std::uint64_t>(in);
    t = Tensor4(cells, ck.v_counts[0], ck.v_counts[1], ck.v_counts[2]);
    if (n != t.size()) throw NumericsError("checkpoint: tensor size mismatch");
    in.read(reinterpret_cast<char*>(t.raw().data()), std::streamsize(n * sizeof(double)));
    if (!in) throw NumericsError("checkpoint: truncated tensor data");
  };
  load(ck.f1);
  load(ck.f2);
  return ck;
}

}  // namespace bvpb
