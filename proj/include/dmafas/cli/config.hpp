#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmafas/channel.hpp"
#include "dmafas/designs.hpp"

namespace dmafas::cli {

struct CodebookBlock {
  int n_active = 10;
  int phi_points = 181;
  double far_radius_m = 0.0; // <= 0: 1000 wavelengths
  int reduced_count = 10;
};

struct ChannelBlock {
  AngularModel model;
  double sigma_alpha_sq = 1.0;
  std::filesystem::path plane_waves_file;
};

struct FamaBlock {
  int users = 3;
  std::int64_t trials = 100000;
  std::vector<double> thresholds_db;
  std::uint64_t seed = 1;
  int ideal_positions = 0; // 0: size of the dense codebook
  bool full_aperture = false;
};

struct CalibrationBlock {
  std::string configuration; // key into the configurations map
};

struct ExperimentConfig {
  LinearDmaParams design;
  std::map<std::string, std::vector<int>> configurations; // active slots, 1-based
  CodebookBlock codebook;
  ChannelBlock channel;
  FamaBlock fama;
  CalibrationBlock calibration;
  int field_points = 400;
  std::filesystem::path output_dir = "out";
  std::filesystem::path source;
  std::string hash; // FNV-1a of the file bytes, hex

  DmaDesign build_design() const;
  /// Termination override: "short", "matched" or "load".
  DmaDesign build_design(const std::string &termination) const;
};

/// Strict YAML parse: unknown keys, wrong types and bad values raise ConfigError
/// carrying the line and column.
ExperimentConfig load_config(const std::filesystem::path &path);
ExperimentConfig parse_config(const std::string &text, const std::string &name = "<config>");

std::string fnv1a_hex(const std::string &bytes);

} // namespace dmafas::cli
