#pragma once

// Binary field snapshots, little-endian:
//   "CRYF" | u32 version (1) | u32 N_x | u32 N_y | u32 N_z | f64 t | f64 n | N_x·N_y·N_z f64 (k fastest)

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "cryf/field.hpp"
#include "cryf/geometry.hpp"

namespace cryf {

inline constexpr std::uint32_t kSnapshotVersion = 1;

class SnapshotError : public std::runtime_error {
 public:
  enum class Kind { Io, Magic, Version, Shape };
  SnapshotError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct SnapshotData {
  GridSpec grid;
  double t = 0.0;
  double n = 1.0;
  ScalarField u;
};

void write_snapshot(const std::filesystem::path& path, const SnapshotData& data);
SnapshotData read_snapshot(const std::filesystem::path& path);

}  // namespace cryf
