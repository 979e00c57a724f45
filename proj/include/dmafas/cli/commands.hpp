#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dmafas::cli {

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::string conf;
  std::string termination;
  std::string cut; // azimuth (default) or 3d
  std::filesystem::path samples;
  std::filesystem::path codebook;
  std::filesystem::path manifest; // replay: fills options not given explicitly
  unsigned threads = 0;
};

const std::vector<std::string> &verbs();

/// Runs one verb and returns the process exit code: 0 success, 1 user error,
/// 2 numerical failure. Diagnostics go to `err`, summaries to `out`.
int run(const std::string &verb, RunOptions opts, std::ostream &out, std::ostream &err);

} // namespace dmafas::cli
