#pragma once

// Trajectory checkpoints: one binary record per stored time plus a JSON
// manifest. Record layout (little endian):
//   char[8]  "KPLABF01"
//   uint32   version
//   int32    nx, ny, scheme id
//   float64  lx, ly, t
//   float64  (re, im) pairs, column-major nx-by-ny

#include "kplab/kolmogorov.hpp"

#include <filesystem>
#include <string>

namespace kplab {

constexpr std::uint32_t kCheckpointVersion = 1;

void write_record(const std::filesystem::path& file, const Field& f, Scheme scheme);
Field read_record(const std::filesystem::path& file, Scheme* scheme = nullptr);

/// Writes records r000000.bin ... and manifest.json into dir (created if needed).
void write_checkpoint(const std::filesystem::path& dir, const Trajectory& traj, const std::string& config_hash);

/// Reads a checkpoint back; coefficients, times and step diagnostics are bit exact.
Trajectory read_checkpoint(const std::filesystem::path& dir, std::string* config_hash = nullptr);

}  // namespace kplab
