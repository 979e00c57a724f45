#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace dmafas::csv {

/// Parsed table: header fields (may be empty) and rows of raw fields.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers; // source line of each row
};

/// Reads a comma separated file. Blank lines and lines starting with '#' are skipped;
/// the first remaining line is a header if its first field is not numeric.
Table read(const std::filesystem::path &path);

double to_double(const std::string &field, const std::filesystem::path &path, int line);
long to_long(const std::string &field, const std::filesystem::path &path, int line);

/// Shortest round-trip representation, locale independent.
std::string format(double v);

/// Writer that emits rows with a fixed header and deterministic number formatting.
class Writer {
public:
  Writer(const std::filesystem::path &path, const std::vector<std::string> &header);

  template <typename... Fields> void row(const Fields &...fields) {
    bool first = true;
    ((emit(fields, first)), ...);
    out_ << '\n';
  }

private:
  void emit(double v, bool &first) { sep(first); out_ << format(v); }
  void emit(int v, bool &first) { sep(first); out_ << v; }
  void emit(long v, bool &first) { sep(first); out_ << v; }
  void emit(unsigned long v, bool &first) { sep(first); out_ << v; }
  void emit(const std::string &v, bool &first) { sep(first); out_ << v; }
  void emit(const char *v, bool &first) { sep(first); out_ << v; }
  void sep(bool &first) {
    if (!first)
      out_ << ',';
    first = false;
  }
  std::ofstream out_;
};

} // namespace dmafas::csv
