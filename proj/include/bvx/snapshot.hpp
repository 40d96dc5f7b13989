#pragma once

#include <cstdint>
#include <string>

#include "bvx/dynamics.hpp"

namespace bvx {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotHeader {
  std::uint32_t version = kSnapshotVersion;
  GridSpec grid;
  PhysParams physics;
  double t = 0.0;
  FrameTag frame = FrameTag::stationary;
  Formulation formulation = Formulation::full;
  VortexParams background;
  std::uint64_t entries = 0;
};

/// Little-endian file: "BVXL", u32 version, header, u64 entry count, then the
/// full spectrum of the 4-component state (component, n, k2, k1 ascending
/// signed), each entry as (re, im) f64.
void save_snapshot(const SimState& s, const std::string& path);

/// Throws corrupt-file (bad magic, truncated or oversized payload, bad header
/// values) or version-mismatch.
SimState load_snapshot(const std::string& path);

SnapshotHeader read_snapshot_header(const std::string& path);

}  // namespace bvx
