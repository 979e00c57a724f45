#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dmafas/cli/commands.hpp"
#include "dmafas/cli/config.hpp"
#include "dmafas/csv.hpp"
#include "dmafas/errors.hpp"

using namespace dmafas;
namespace fs = std::filesystem;

namespace {

const char *kConfig = R"(design:
  frequency_ghz: 2.4
  rel_permittivity: 3.55
  a_mm: 58
  b_mm: 23.2
  length_mm: 475
  num_slots: 16
  first_slot_mm: 50
  slot_spacing_mm: 25
  y_rad: [3.7e-5, -0.0037]
  termination: matched
configurations:
  conf1: [2, 3, 5, 6, 10, 11, 14, 15]
field:
  points: 50
)";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string &name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const fs::path &dir, const std::string &text) {
  const auto p = dir / "cfg.yaml";
  std::ofstream(p) << text;
  return p;
}

int run(const std::string &verb, const cli::RunOptions &o, std::string *err = nullptr) {
  std::ostringstream out, e;
  const int code = cli::run(verb, o, out, e);
  if (err)
    *err = e.str();
  return code;
}

std::string slurp(const fs::path &p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

} // namespace

TEST_CASE("unknown keys are reported with line and column") {
  try {
    cli::parse_config("design:\n  frequency_ghz: 2.4\n  bogus: 1\n", "x.yaml");
    FAIL("expected ConfigError");
  } catch (const ConfigError &e) {
    const std::string m = e.what();
    CHECK(m.find("x.yaml:3:3") != std::string::npos);
    CHECK(m.find("bogus") != std::string::npos);
  }
}

TEST_CASE("validate: exit codes") {
  TempDir t("dmafas_cli_validate");
  cli::RunOptions o;
  o.config = write_config(t.path, kConfig);
  CHECK(run("validate", o) == 0);

  std::string bad = kConfig;
  bad.replace(bad.find("3.55"), 4, "-1");
  o.config = write_config(t.path, bad);
  std::string err;
  CHECK(run("validate", o, &err) == 1);
  CHECK_FALSE(err.empty());

  cli::RunOptions missing;
  missing.config = t.path / "nope.yaml";
  CHECK(run("validate", missing) == 1);
  CHECK(run("nonsense", o) == 1);
}

TEST_CASE("field and pattern outputs") {
  TempDir t("dmafas_cli_field");
  cli::RunOptions o;
  o.config = write_config(t.path, kConfig);
  o.out = t.path / "out";
  o.conf = "conf1";
  REQUIRE(run("field", o) == 0);
  const auto f = csv::read(t.path / "out" / "field.csv");
  REQUIRE(f.rows.size() == 50);
  double prev = -1;
  for (const auto &r : f.rows) {
    const double x = std::stod(r[0]);
    CHECK(x > prev);
    prev = x;
  }
  CHECK(fs::exists(t.path / "out" / "field.manifest.json"));

  REQUIRE(run("pattern", o) == 0);
  const auto p = csv::read(t.path / "out" / "pattern.csv");
  double mx = -1e9;
  const std::size_t col = p.header.size() - 1;
  for (const auto &r : p.rows)
    mx = std::max(mx, std::stod(r[col]));
  CHECK(mx == doctest::Approx(0.0).epsilon(1e-9));

  o.conf = "conf9";
  CHECK(run("field", o) == 1);
}

TEST_CASE("reruns are byte-identical and manifests replay") {
  TempDir t("dmafas_cli_rerun");
  cli::RunOptions o;
  o.config = write_config(t.path, kConfig);
  o.conf = "conf1";
  o.out = t.path / "a";
  REQUIRE(run("field", o) == 0);
  o.out = t.path / "b";
  REQUIRE(run("field", o) == 0);
  CHECK(slurp(t.path / "a" / "field.csv") == slurp(t.path / "b" / "field.csv"));

  cli::RunOptions replay;
  replay.manifest = t.path / "a" / "field.manifest.json";
  replay.out = t.path / "c";
  REQUIRE(run("field", replay) == 0);
  CHECK(slurp(t.path / "a" / "field.csv") == slurp(t.path / "c" / "field.csv"));

  // A changed config is still replayed but flagged.
  std::ofstream(o.config, std::ios::app) << "# edited\n";
  std::string err;
  replay.out = t.path / "d";
  REQUIRE(run("field", replay, &err) == 0);
  CHECK(err.find("hash") != std::string::npos);
}

TEST_CASE("config hash is the FNV-1a digest") {
  CHECK(cli::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(cli::fnv1a_hex("a") == "af63dc4c8601ec8c");
}
