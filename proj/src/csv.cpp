#include "dmafas/csv.hpp"

#include <charconv>
#include <sstream>

#include "dmafas/errors.hpp"

namespace dmafas::csv {

namespace {

std::string trim(const std::string &s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos)
    return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ','))
    fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',')
    fields.emplace_back();
  return fields;
}

bool looks_numeric(const std::string &s) {
  double v = 0.0;
  const auto *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && ptr == end;
}

std::string where(const std::filesystem::path &path, int line) {
  return path.string() + ":" + std::to_string(line);
}

} // namespace

Table read(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open " + path.string());
  Table t;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#')
      continue;
    auto fields = split(s);
    if (first) {
      first = false;
      if (!looks_numeric(fields.front())) {
        t.header = std::move(fields);
        continue;
      }
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  return t;
}

double to_double(const std::string &field, const std::filesystem::path &path, int line) {
  double v = 0.0;
  const auto *end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw InputError(where(path, line) + ": expected a number, got '" + field + "'");
  return v;
}

long to_long(const std::string &field, const std::filesystem::path &path, int line) {
  long v = 0;
  const auto *end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw InputError(where(path, line) + ": expected an integer, got '" + field + "'");
  return v;
}

std::string format(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc())
    return "nan";
  return std::string(buf, ptr);
}

Writer::Writer(const std::filesystem::path &path, const std::vector<std::string> &header)
    : out_(path) {
  if (!out_)
    throw InputError("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

} // namespace dmafas::csv
