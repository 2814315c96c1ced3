#pragma once

#include <cstdint>
#include <filesystem>

#include "bnls/field.hpp"
#include "bnls/params.hpp"

namespace bnls::io {

/// Binary snapshot: 64-byte little-endian header followed by interleaved (re, im) doubles
/// in row-major order.
///
///   offset  0  char[4]  magic "BNLS"
///   offset  4  uint32   format version
///   offset  8  int64    dim
///   offset 16  int64    points per axis
///   offset 24  float64  half width L
///   offset 32  float64  gamma
///   offset 40  float64  mu
///   offset 48  float64  omega
///   offset 56  float64  sigma
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 64;

struct Snapshot {
    Field field;
    PhysicalParams params;
};

void write_snapshot(const Field& f, const PhysicalParams& p, const std::filesystem::path& path);
/// Parameters default to PhysicalParams{} with dim taken from the grid.
void write_snapshot(const Field& f, const std::filesystem::path& path);

/// FormatError on bad magic, version or size; IoError when the file cannot be read.
Snapshot read_snapshot_with_params(const std::filesystem::path& path);
Field read_snapshot(const std::filesystem::path& path);

}  // namespace bnls::io
