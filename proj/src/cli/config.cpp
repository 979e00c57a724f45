#include "dmafas/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dmafas/errors.hpp"

namespace dmafas::cli {

namespace {

std::string where(const YAML::Node &n, const std::string &name) {
  const auto m = n.Mark();
  if (m.is_null())
    return name;
  return name + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

struct Reader {
  std::string name;

  [[noreturn]] void fail(const YAML::Node &n, const std::string &msg) const {
    throw ConfigError(where(n, name) + ": " + msg);
  }

  void require_map(const YAML::Node &n, const std::string &what) const {
    if (!n.IsMap())
      fail(n, what + " must be a mapping");
  }

  void check_keys(const YAML::Node &n, const std::set<std::string> &allowed,
                  const std::string &what) const {
    require_map(n, what);
    for (const auto &kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key))
        fail(kv.first, "unknown key '" + key + "' in " + what);
    }
  }

  template <typename T> T scalar(const YAML::Node &n, const std::string &key) const {
    if (!n.IsScalar())
      fail(n, "'" + key + "' must be a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion &) {
      fail(n, "'" + key + "' has an invalid value '" + n.Scalar() + "'");
    }
  }

  double number(const YAML::Node &n, const std::string &key) const {
    const double v = scalar<double>(n, key);
    if (!std::isfinite(v))
      fail(n, "'" + key + "' must be finite");
    return v;
  }

  Complex complex(const YAML::Node &n, const std::string &key) const {
    if (!n.IsSequence() || n.size() != 2)
      fail(n, "'" + key + "' must be a [re, im] pair");
    return {number(n[0], key), number(n[1], key)};
  }

  template <typename Fn> void optional(const YAML::Node &n, const char *key, Fn &&fn) const {
    if (const auto v = n[key])
      fn(v);
  }
};

TerminationKind parse_termination(const Reader &r, const YAML::Node &n) {
  const auto s = r.scalar<std::string>(n, "termination");
  if (s == "short")
    return TerminationKind::Short;
  if (s == "matched")
    return TerminationKind::Matched;
  if (s == "load")
    return TerminationKind::Custom;
  r.fail(n, "termination must be short, matched or load");
}

void parse_design(const Reader &r, const YAML::Node &n, LinearDmaParams &p) {
  r.check_keys(n,
               {"frequency_ghz", "rel_permittivity", "a_mm", "b_mm", "length_mm", "num_slots",
                "first_slot_mm", "slot_spacing_mm", "y_rad", "y0_reference", "dipole_length_mm",
                "y_generator", "termination", "load_admittance"},
               "design");
  r.optional(n, "frequency_ghz", [&](auto v) { p.frequency_hz = r.number(v, "frequency_ghz") * 1e9; });
  r.optional(n, "rel_permittivity",
             [&](auto v) { p.rel_permittivity = r.number(v, "rel_permittivity"); });
  r.optional(n, "a_mm", [&](auto v) { p.a = r.number(v, "a_mm") * 1e-3; });
  r.optional(n, "b_mm", [&](auto v) { p.b = r.number(v, "b_mm") * 1e-3; });
  r.optional(n, "length_mm", [&](auto v) { p.length = r.number(v, "length_mm") * 1e-3; });
  r.optional(n, "num_slots", [&](auto v) { p.num_slots = r.scalar<int>(v, "num_slots"); });
  r.optional(n, "first_slot_mm",
             [&](auto v) { p.first_slot_x = r.number(v, "first_slot_mm") * 1e-3; });
  r.optional(n, "slot_spacing_mm",
             [&](auto v) { p.slot_spacing = r.number(v, "slot_spacing_mm") * 1e-3; });
  r.optional(n, "y_rad", [&](auto v) { p.y_rad = r.complex(v, "y_rad"); });
  r.optional(n, "y0_reference", [&](auto v) { p.y0_reference = r.complex(v, "y0_reference"); });
  r.optional(n, "dipole_length_mm",
             [&](auto v) { p.dipole_length = r.number(v, "dipole_length_mm") * 1e-3; });
  r.optional(n, "y_generator", [&](auto v) { p.y_generator = r.complex(v, "y_generator"); });
  r.optional(n, "termination", [&](auto v) { p.termination = parse_termination(r, v); });
  r.optional(n, "load_admittance",
             [&](auto v) { p.custom_load = r.complex(v, "load_admittance"); });
  if (p.termination == TerminationKind::Custom && !n["load_admittance"])
    r.fail(n, "termination 'load' needs load_admittance");
}

std::vector<double> parse_thresholds(const Reader &r, const YAML::Node &n) {
  std::vector<double> out;
  if (n.IsSequence()) {
    for (const auto &v : n)
      out.push_back(r.number(v, "thresholds_db"));
  } else {
    r.check_keys(n, {"start", "stop", "step"}, "thresholds_db");
    for (const char *k : {"start", "stop", "step"})
      if (!n[k])
        r.fail(n, std::string("thresholds_db needs '") + k + "'");
    const double start = r.number(n["start"], "start");
    const double stop = r.number(n["stop"], "stop");
    const double step = r.number(n["step"], "step");
    if (!(step > 0.0) || stop < start)
      r.fail(n, "thresholds_db needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i)
      out.push_back(start + static_cast<double>(i) * step);
  }
  if (out.empty())
    r.fail(n, "thresholds_db is empty");
  if (!std::is_sorted(out.begin(), out.end()))
    r.fail(n, "thresholds_db must be ascending");
  return out;
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 80; ++i)
    t.push_back(-10.0 + 0.5 * i);
  return t;
}

} // namespace

std::string fnv1a_hex(const std::string &bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DmaDesign ExperimentConfig::build_design() const { return make_linear_dma(design); }

DmaDesign ExperimentConfig::build_design(const std::string &termination) const {
  LinearDmaParams p = design;
  if (termination == "short")
    p.termination = TerminationKind::Short;
  else if (termination == "matched")
    p.termination = TerminationKind::Matched;
  else if (termination == "load")
    p.termination = TerminationKind::Custom;
  else if (!termination.empty())
    throw ConfigError("termination must be short, matched or load, got '" + termination + "'");
  return make_linear_dma(p);
}

ExperimentConfig parse_config(const std::string &text, const std::string &name) {
  const Reader r{name};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException &e) {
    throw ConfigError(name + ":" + std::to_string(e.mark.line + 1) + ":" +
                      std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  ExperimentConfig c;
  c.hash = fnv1a_hex(text);
  c.fama.thresholds_db = default_thresholds();
  if (root.IsNull())
    return c;
  r.check_keys(root,
               {"design", "configurations", "codebook", "channel", "fama", "calibration", "field",
                "output_dir"},
               "top level");

  if (const auto d = root["design"])
    parse_design(r, d, c.design);

  if (const auto confs = root["configurations"]) {
    r.require_map(confs, "configurations");
    for (const auto &kv : confs) {
      const auto key = kv.first.as<std::string>();
      if (!kv.second.IsSequence() || kv.second.size() == 0)
        r.fail(kv.second, "configuration '" + key + "' must be a non-empty list of slot numbers");
      std::vector<int> slots;
      for (const auto &s : kv.second) {
        const int v = r.scalar<int>(s, key);
        if (v < 1 || v > c.design.num_slots)
          r.fail(s, "slot " + std::to_string(v) + " outside 1.." +
                        std::to_string(c.design.num_slots));
        slots.push_back(v);
      }
      c.configurations[key] = slots;
    }
  }

  if (const auto cb = root["codebook"]) {
    r.check_keys(cb, {"n_active", "phi_points", "far_radius_m", "reduced_count"}, "codebook");
    r.optional(cb, "n_active", [&](auto v) { c.codebook.n_active = r.scalar<int>(v, "n_active"); });
    r.optional(cb, "phi_points",
               [&](auto v) { c.codebook.phi_points = r.scalar<int>(v, "phi_points"); });
    r.optional(cb, "far_radius_m",
               [&](auto v) { c.codebook.far_radius_m = r.number(v, "far_radius_m"); });
    r.optional(cb, "reduced_count",
               [&](auto v) { c.codebook.reduced_count = r.scalar<int>(v, "reduced_count"); });
    if (c.codebook.n_active < 1 || c.codebook.phi_points < 1 || c.codebook.reduced_count < 1)
      r.fail(cb, "codebook counts must be positive");
  }

  if (const auto ch = root["channel"]) {
    r.check_keys(ch, {"model", "pattern", "sigma_alpha_sq", "plane_waves_file"}, "channel");
    r.optional(ch, "model", [&](auto v) {
      const auto s = r.scalar<std::string>(v, "model");
      if (s == "isotropic3d")
        c.channel.model.kind = ScatteringKind::Isotropic3D;
      else if (s == "isotropic2d")
        c.channel.model.kind = ScatteringKind::Isotropic2D;
      else if (s == "planewaves")
        c.channel.model.kind = ScatteringKind::PlaneWaveList;
      else
        r.fail(v, "model must be isotropic3d, isotropic2d or planewaves");
    });
    r.optional(ch, "pattern", [&](auto v) {
      const auto s = r.scalar<std::string>(v, "pattern");
      if (s == "dipole")
        c.channel.model.pattern = ElementPattern::Dipole;
      else if (s == "isotropic")
        c.channel.model.pattern = ElementPattern::Isotropic;
      else
        r.fail(v, "pattern must be dipole or isotropic");
    });
    r.optional(ch, "sigma_alpha_sq", [&](auto v) {
      c.channel.sigma_alpha_sq = r.number(v, "sigma_alpha_sq");
      if (!(c.channel.sigma_alpha_sq > 0.0))
        r.fail(v, "sigma_alpha_sq must be positive");
    });
    r.optional(ch, "plane_waves_file", [&](auto v) {
      c.channel.plane_waves_file = r.scalar<std::string>(v, "plane_waves_file");
    });
    if (c.channel.model.kind == ScatteringKind::PlaneWaveList && c.channel.plane_waves_file.empty())
      r.fail(ch, "model 'planewaves' needs plane_waves_file");
  }

  if (const auto f = root["fama"]) {
    r.check_keys(f, {"users", "trials", "thresholds_db", "seed", "ideal_positions", "aperture"},
                 "fama");
    r.optional(f, "users", [&](auto v) { c.fama.users = r.scalar<int>(v, "users"); });
    r.optional(f, "trials", [&](auto v) { c.fama.trials = r.scalar<std::int64_t>(v, "trials"); });
    r.optional(f, "thresholds_db", [&](auto v) { c.fama.thresholds_db = parse_thresholds(r, v); });
    r.optional(f, "seed", [&](auto v) { c.fama.seed = r.scalar<std::uint64_t>(v, "seed"); });
    r.optional(f, "ideal_positions",
               [&](auto v) { c.fama.ideal_positions = r.scalar<int>(v, "ideal_positions"); });
    r.optional(f, "aperture", [&](auto v) {
      const auto s = r.scalar<std::string>(v, "aperture");
      if (s == "slots")
        c.fama.full_aperture = false;
      else if (s == "full")
        c.fama.full_aperture = true;
      else
        r.fail(v, "aperture must be slots or full");
    });
    if (c.fama.users < 2)
      r.fail(f, "fama needs at least two users");
    if (c.fama.trials < 1)
      r.fail(f, "trials must be positive");
  }

  if (const auto cal = root["calibration"]) {
    r.check_keys(cal, {"configuration"}, "calibration");
    r.optional(cal, "configuration", [&](auto v) {
      c.calibration.configuration = r.scalar<std::string>(v, "configuration");
    });
  }

  if (const auto fld = root["field"]) {
    r.check_keys(fld, {"points"}, "field");
    r.optional(fld, "points", [&](auto v) {
      c.field_points = r.scalar<int>(v, "points");
      if (c.field_points < 2)
        r.fail(v, "field points must be >= 2");
    });
  }

  r.optional(root, "output_dir",
             [&](auto v) { c.output_dir = r.scalar<std::string>(v, "output_dir"); });
  return c;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c = parse_config(ss.str(), path.string());
  c.source = path;
  if (!c.channel.plane_waves_file.empty() && c.channel.plane_waves_file.is_relative())
    c.channel.plane_waves_file = path.parent_path() / c.channel.plane_waves_file;
  return c;
}

} // namespace dmafas::cli
