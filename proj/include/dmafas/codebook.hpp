#pragma once

#include <filesystem>
#include <vector>

#include "dmafas/circuit.hpp"

namespace dmafas {

struct CodebookEntry {
  DiodeConfig config;
  double target_phi = 0.0;          // centre of the first run of won angles
  std::vector<double> won_angles;   // grid angles for which this mask is the argmax
  double field_strength = 0.0;      // largest |h_z| over the won angles (unit generator current)
  Complex gamma;
  double radiation_efficiency = 0.0; // P_rad / P_s
};

struct Codebook {
  std::vector<CodebookEntry> entries;
  std::uint64_t masks_visited = 0;
  std::uint64_t masks_skipped = 0; // singular configurations

  std::size_t size() const { return entries.size(); }
};

struct CodebookOptions {
  std::vector<double> phi_grid;  // empty: 181 points i*pi/181
  int n_active = 10;
  double far_radius = 0.0;       // <= 0: 1000 free-space wavelengths
  unsigned threads = 0;          // 0: hardware concurrency
};

std::vector<double> default_phi_grid(int count = 181);

/// Exhaustive search over every mask with `n_active` radiating slots. For each grid
/// angle the mask maximizing |h_z| at (theta = pi/2, phi, far_radius) is kept; ties
/// within 1e-12 relative go to the lexicographically smallest bit string. Entries are
/// deduplicated by mask in order of first appearance along the grid.
Codebook design_codebook(const DmaDesign &design, const AdmittanceSet &set,
                         const CodebookOptions &opts);

/// Keep the entries nearest to `count` equally spaced angles (i + 1/2) pi / count.
Codebook reduce_codebook(const Codebook &book, std::size_t count);

void write_codebook_csv(const std::filesystem::path &path, const Codebook &book);
Codebook read_codebook_csv(const std::filesystem::path &path);

} // namespace dmafas
