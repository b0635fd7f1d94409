#include "cryf/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace cryf {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'R', 'Y', 'F'};
constexpr std::size_t kHeaderBytes = 4 + 4 * 4 + 8 * 2;

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const auto bits = std::bit_cast<Bits>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
}

template <typename T>
T get_le(const unsigned char* in) {
  using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  Bits bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) bits |= static_cast<Bits>(in[b]) << (8 * b);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const SnapshotData& data) {
  if (data.u.size() != data.grid.points()) {
    std::ostringstream msg;
    msg << "snapshot: field has " << data.u.size() << " values, grid has " << data.grid.points();
    throw SnapshotError(SnapshotError::Kind::Shape, msg.str());
  }
  std::vector<unsigned char> bytes(kMagic.begin(), kMagic.end());
  bytes.reserve(kHeaderBytes + 8 * data.u.size());
  put_le(bytes, kSnapshotVersion);
  put_le(bytes, static_cast<std::uint32_t>(data.grid.nx));
  put_le(bytes, static_cast<std::uint32_t>(data.grid.ny));
  put_le(bytes, static_cast<std::uint32_t>(data.grid.nz));
  put_le(bytes, data.t);
  put_le(bytes, data.n);
  for (double v : data.u) put_le(bytes, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError(SnapshotError::Kind::Io, "snapshot: cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw SnapshotError(SnapshotError::Kind::Io, "snapshot: write failed for " + path.string());
}

SnapshotData read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError(SnapshotError::Kind::Io, "snapshot: cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw SnapshotError(SnapshotError::Kind::Magic, "snapshot: " + path.string() + " does not start with CRYF");
  }
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kSnapshotVersion) {
    std::ostringstream msg;
    msg << "snapshot: " << path.string() << " has format version " << version
        << ", this reader supports version " << kSnapshotVersion;
    throw SnapshotError(SnapshotError::Kind::Version, msg.str());
  }
  if (bytes.size() < kHeaderBytes) {
    throw SnapshotError(SnapshotError::Kind::Shape, "snapshot: truncated header in " + path.string());
  }
  SnapshotData data;
  data.grid.nx = static_cast<int>(get_le<std::uint32_t>(bytes.data() + 8));
  data.grid.ny = static_cast<int>(get_le<std::uint32_t>(bytes.data() + 12));
  data.grid.nz = static_cast<int>(get_le<std::uint32_t>(bytes.data() + 16));
  data.t = get_le<double>(bytes.data() + 20);
  data.n = get_le<double>(bytes.data() + 28);
  const std::size_t expected = kHeaderBytes + 8 * data.grid.points();
  if (bytes.size() != expected) {
    std::ostringstream msg;
    msg << "snapshot: " << path.string() << " has " << bytes.size() << " bytes, shape ("
        << data.grid.nx << "," << data.grid.ny << "," << data.grid.nz << ") needs " << expected;
    throw SnapshotError(SnapshotError::Kind::Shape, msg.str());
  }
  data.u = ScalarField(data.grid.points());
  for (std::size_t p = 0; p < data.u.size(); ++p) {
    data.u[p] = get_le<double>(bytes.data() + kHeaderBytes + 8 * p);
  }
  return data;
}

}  // namespace cryf
