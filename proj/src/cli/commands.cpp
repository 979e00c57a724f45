#include "dmafas/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "dmafas/calibration.hpp"
#include "dmafas/channel.hpp"
#include "dmafas/cli/config.hpp"
#include "dmafas/codebook.hpp"
#include "dmafas/csv.hpp"
#include "dmafas/errors.hpp"
#include "dmafas/fama.hpp"
#include "dmafas/fas.hpp"

#ifndef DMAFAS_VERSION
#define DMAFAS_VERSION "unknown"
#endif

namespace dmafas::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using constants::pi;

namespace {

struct Context {
  RunOptions opts;
  ExperimentConfig config;
  fs::path out_dir;
  std::uint64_t seed = 1;
  std::vector<std::string> outputs;
  std::ostream *out = nullptr;
  std::ostream *err = nullptr;

  fs::path output(const std::string &name) {
    outputs.push_back(name);
    return out_dir / name;
  }
};

DiodeConfig resolve_configuration(const Context &ctx, const std::string &name, std::size_t n) {
  if (name.empty() || name == "all")
    return DiodeConfig::all_radiating(n);
  const auto it = ctx.config.configurations.find(name);
  if (it != ctx.config.configurations.end())
    return DiodeConfig::from_active_slots(it->second, n);
  if (name.size() == n && name.find_first_not_of("01") == std::string::npos)
    return DiodeConfig::from_bits(name);
  throw ConfigError("unknown configuration '" + name + "'");
}

std::vector<double> grid(int count) { return default_phi_grid(count); }

Codebook obtain_codebook(Context &ctx, const DmaDesign &design, const AdmittanceSet &set) {
  if (!ctx.opts.codebook.empty()) {
    Codebook book = read_codebook_csv(ctx.opts.codebook);
    for (const auto &e : book.entries)
      if (e.config.size() != design.num_slots())
        throw DimensionMismatch("codebook masks do not match the design slot count");
    return book;
  }
  CodebookOptions o;
  o.phi_grid = grid(ctx.config.codebook.phi_points);
  o.n_active = ctx.config.codebook.n_active;
  o.far_radius = ctx.config.codebook.far_radius_m;
  o.threads = ctx.opts.threads;
  return design_codebook(design, set, o);
}

CMat channel_covariance(const Context &ctx, const DmaDesign &design) {
  const auto &ch = ctx.config.channel;
  const double k0 = design.medium.k0();
  if (ch.model.kind == ScatteringKind::Isotropic3D && ch.model.pattern == ElementPattern::Dipole)
    return covariance_isotropic(design.slots.positions, k0, ch.sigma_alpha_sq).covariance;
  AngularModel model = ch.model;
  if (model.kind == ScatteringKind::PlaneWaveList)
    model.waves = read_plane_waves_csv(ch.plane_waves_file);
  return covariance_numeric(model, design.slots.positions, k0, ch.sigma_alpha_sq).covariance;
}

std::vector<ConfigResponse> responses_for(const Codebook &book, const DmaDesign &design,
                                          const AdmittanceSet &set) {
  std::vector<ConfigResponse> r;
  for (const auto &e : book.entries)
    r.push_back(dma_response(design, set, e.config));
  return r;
}

void summarize_codebook(Context &ctx, const Codebook &book) {
  double eff = 0.0;
  std::size_t matched = 0;
  for (const auto &e : book.entries) {
    eff += e.radiation_efficiency;
    if (std::norm(e.gamma) < 0.1)
      ++matched;
  }
  const double u = static_cast<double>(book.size());
  *ctx.out << "unique configurations: " << book.size() << "\n"
           << "masks visited: " << book.masks_visited << " (skipped " << book.masks_skipped
           << ")\n"
           << "fraction with S11 < -10 dB: " << matched / u << "\n"
           << "mean radiation efficiency: " << eff / u << "\n";
}

int cmd_validate(Context &ctx) {
  const DmaDesign design = ctx.config.build_design(ctx.opts.termination);
  const auto modes = validate_single_mode(design);
  const auto set = assemble(design);
  const auto issues = audit(set, design);
  const auto wn = derive_wavenumbers(design.medium, design.geometry);
  *ctx.out << "slots: " << design.num_slots() << "\n"
           << "k0 = " << wn.k0 << " rad/m, k = " << wn.k << " rad/m, kx = " << wn.kx << " rad/m\n"
           << "dipole length = " << design.slots.dipole_length << " m\n";
  for (const auto &v : modes.violations)
    *ctx.err << "mode check: " << v.message << "\n";
  for (const auto &s : issues)
    *ctx.err << "audit: " << s << "\n";
  const bool ok = modes.ok && issues.empty();
  *ctx.out << (ok ? "design valid" : "design invalid") << "\n";
  return ok ? 0 : 1;
}

int cmd_field(Context &ctx) {
  const DmaDesign design = ctx.config.build_design(ctx.opts.termination);
  const auto set = assemble(design);
  const auto config = resolve_configuration(ctx, ctx.opts.conf, design.num_slots());
  std::vector<double> xs(ctx.config.field_points);
  for (int i = 0; i < ctx.config.field_points; ++i)
    xs[i] = design.geometry.length * i / (ctx.config.field_points - 1);
  const auto field = synthesize_axis_field(design, set, config, xs);
  csv::Writer w(ctx.output("field.csv"), {"x_m", "mag", "phase_rad"});
  for (std::size_t i = 0; i < xs.size(); ++i)
    w.row(field.points[i].x(), std::abs(field.values[i]), std::arg(field.values[i]));
  return 0;
}

int cmd_pattern(Context &ctx) {
  const DmaDesign design = ctx.config.build_design(ctx.opts.termination);
  const auto set = assemble(design);
  const auto config = resolve_configuration(ctx, ctx.opts.conf, design.num_slots());
  const auto net = configure(set, config, design);
  CVec jg(1);
  jg[0] = 1.0;
  const auto sol = solve_tx(net, jg);
  const double radius = 1000.0 * design.medium.wavelength();
  const std::string cut = ctx.opts.cut.empty() ? "azimuth" : ctx.opts.cut;
  auto point = [&](double theta, double phi) {
    return Vec3(radius * std::sin(theta) * std::cos(phi), radius * std::sin(theta) * std::sin(phi),
                radius * std::cos(theta));
  };
  std::vector<std::array<double, 3>> rows; // phi, theta, D
  if (cut == "azimuth") {
    for (int i = 0; i < 360; ++i) {
      const double phi = i * pi / 360.0;
      rows.push_back({phi, pi / 2.0, directivity(net, sol, point(pi / 2.0, phi))});
    }
  } else if (cut == "3d") {
    for (int j = 0; j < 90; ++j)
      for (int i = 0; i < 90; ++i) {
        const double theta = j * pi / 90.0, phi = i * pi / 90.0;
        rows.push_back({phi, theta, directivity(net, sol, point(theta, phi))});
      }
  } else {
    throw ConfigError("cut must be azimuth or 3d, got '" + cut + "'");
  }
  double dmax = 0.0;
  for (const auto &r : rows)
    dmax = std::max(dmax, r[2]);
  auto db = [&](double d) { return 10.0 * std::log10(std::max(d / dmax, 1e-300)); };
  if (cut == "azimuth") {
    csv::Writer w(ctx.output("pattern.csv"), {"phi_deg", "d_db"});
    for (const auto &r : rows)
      w.row(r[0] * 180.0 / pi, db(r[2]));
  } else {
    csv::Writer w(ctx.output("pattern.csv"), {"phi_deg", "theta_deg", "d_db"});
    for (const auto &r : rows)
      w.row(r[0] * 180.0 / pi, r[1] * 180.0 / pi, db(r[2]));
  }
  *ctx.out << "peak directivity: " << 10.0 * std::log10(dmax) << " dBi\n";
  return 0;
}

int cmd_codebook(Context &ctx) {
  const DmaDesign design = ctx.config.build_design(ctx.opts.termination);
  const auto set = assemble(design);
  const Codebook book = obtain_codebook(ctx, design, set);
  write_codebook_csv(ctx.output("codebook.csv"), book);
  const auto reduced =
      reduce_codebook(book, static_cast<std::size_t>(ctx.config.codebook.reduced_count));
  write_codebook_csv(ctx.output("codebook_reduced.csv"), reduced);
  summarize_codebook(ctx, book);
  return 0;
}

int cmd_covariance(Context &ctx, bool eigen_only) {
  const DmaDesign design = ctx.config.build_design(ctx.opts.termination);
  const auto set = assemble(design);
  const Codebook book = obtain_codebook(ctx, design, set);
  const CMat sigma_y = channel_covariance(ctx, design);
  const auto cov = fas_covariance(responses_for(book, design, set), sigma_y);
  if (!eigen_only) {
    write_matrix_csv(ctx.output("covariance.csv"), cov.sigma);
    write_matrix_csv(ctx.output("correlation.csv"), cov.rho);
    *ctx.out << "codebook size: " << book.size() << "\n";
    return 0;
  }
  const RVec ey = eigen_spectrum(sigma_y);
  write_eigen_csv(ctx.output("eigen_fas.csv"), cov.eigenvalues);
  write_eigen_csv(ctx.output("eigen_channel.csv"), ey);
  *ctx.out << "eigenvalues above 1% of the largest: FAS " << dominant_count(cov.eigenvalues)
           << ", channel " << dominant_count(ey) << "\n";
  return 0;
}

int cmd_outage(Context &ctx) {
  const DmaDesign design = ctx.config.build_design(ctx.opts.termination);
  const auto set = assemble(design);
  const Codebook book = obtain_codebook(ctx, design, set);
  const auto reduced =
      reduce_codebook(book, static_cast<std::size_t>(ctx.config.codebook.reduced_count));
  const CMat sigma_y = channel_covariance(ctx, design);
  const auto &f = ctx.config.fama;

  FamaScenario base;
  base.num_users = f.users;
  base.seed = ctx.seed;
  base.num_trials = f.trials;
  base.thresholds_db = f.thresholds_db;
  base.sigma_y = sigma_y;

  FamaScenario dense = base;
  dense.label = "dense";
  dense.g = response_matrix(responses_for(book, design, set));
  FamaScenario small = base;
  small.label = "reduced";
  small.g = response_matrix(responses_for(reduced, design, set));
  const int count = f.ideal_positions > 0 ? f.ideal_positions : static_cast<int>(book.size());
  FamaScenario ideal = ideal_fas_baseline(aperture_positions(design, count, f.full_aperture),
                                          design.medium.k0(), ctx.config.channel.sigma_alpha_sq,
                                          base);
  ideal.label = "ideal";

  std::vector<OutageCurve> curves;
  for (const auto *sc : {&dense, &small, &ideal})
    curves.push_back(outage_curve(*sc));
  write_outage_csv(ctx.output("outage.csv"), curves);
  for (const auto &c : curves)
    *ctx.out << c.label << ": SIR at 1% outage = " << c.threshold_at(0.01) << " dB\n";
  return 0;
}

int cmd_calibrate(Context &ctx) {
  if (ctx.opts.samples.empty())
    throw ConfigError("calibrate needs --samples FILE");
  const DmaDesign design = ctx.config.build_design(ctx.opts.termination);
  const auto set = assemble(design);
  const std::string name =
      ctx.opts.conf.empty() ? ctx.config.calibration.configuration : ctx.opts.conf;
  const auto config = resolve_configuration(ctx, name, design.num_slots());
  const auto samples = read_field_samples_csv(ctx.opts.samples, design.geometry);
  const Complex y0 = reference_admittance(ctx.config.design);
  const double lm = fit_lm(y0, design);
  const auto fit = fit_yrad(samples, design, set, config);
  csv::Writer w(ctx.output("calibration.csv"), {"parameter", "re", "im"});
  w.row("y0_reference", y0.real(), y0.imag());
  w.row("dipole_length_m", lm, 0.0);
  w.row("y_rad", fit.y_rad.real(), fit.y_rad.imag());
  w.row("mean_abs_error", fit.objective, 0.0);
  *ctx.out << "l_m = " << lm << " m\n"
           << "Y_rad = " << fit.y_rad.real() << (fit.y_rad.imag() < 0 ? " - i" : " + i")
           << std::abs(fit.y_rad.imag()) << " S\n"
           << "mean |error| = " << fit.objective << " (" << fit.converged_starts << "/"
           << fit.starts << " starts converged)\n";
  return 0;
}

void apply_manifest(RunOptions &o, const std::string &verb, std::ostream &err) {
  std::ifstream in(o.manifest);
  if (!in)
    throw ConfigError("cannot open manifest " + o.manifest.string());
  json m;
  try {
    in >> m;
  } catch (const json::exception &e) {
    throw ConfigError(o.manifest.string() + ": " + e.what());
  }
  if (m.value("command", "") != verb)
    throw ConfigError("manifest records command '" + m.value("command", "") + "', not '" + verb +
                      "'");
  const auto &opt = m.at("options");
  auto fill = [&](std::string &dst, const char *key) {
    if (dst.empty() && opt.contains(key))
      dst = opt.at(key).get<std::string>();
  };
  auto fill_path = [&](fs::path &dst, const char *key) {
    if (dst.empty() && opt.contains(key))
      dst = opt.at(key).get<std::string>();
  };
  if (o.config.empty())
    o.config = m.at("config").get<std::string>();
  if (!o.seed)
    o.seed = m.at("seed").get<std::uint64_t>();
  fill(o.conf, "conf");
  fill(o.termination, "termination");
  fill(o.cut, "cut");
  fill_path(o.samples, "samples");
  fill_path(o.codebook, "codebook");
  if (m.contains("config_hash")) {
    std::ifstream cf(o.config, std::ios::binary);
    std::ostringstream ss;
    ss << cf.rdbuf();
    if (fnv1a_hex(ss.str()) != m.at("config_hash").get<std::string>())
      err << "warning: config " << o.config << " differs from the manifest (hash mismatch)\n";
  }
}

void write_manifest(const Context &ctx, const std::string &verb, double seconds) {
  json m;
  m["command"] = verb;
  m["version"] = DMAFAS_VERSION;
  m["config"] = ctx.opts.config.string();
  m["config_hash"] = ctx.config.hash;
  m["seed"] = ctx.seed;
  m["options"] = {{"conf", ctx.opts.conf},
                  {"termination", ctx.opts.termination},
                  {"cut", ctx.opts.cut},
                  {"samples", ctx.opts.samples.string()},
                  {"codebook", ctx.opts.codebook.string()}};
  m["outputs"] = ctx.outputs;
  m["wall_time_s"] = seconds;
  std::ofstream(ctx.out_dir / (verb + ".manifest.json")) << m.dump(2) << "\n";
}

} // namespace

const std::vector<std::string> &verbs() {
  static const std::vector<std::string> v{"validate", "field",   "pattern", "covariance",
                                          "eigen",    "codebook", "outage", "calibrate"};
  return v;
}

int run(const std::string &verb, RunOptions opts, std::ostream &out, std::ostream &err) {
  try {
    if (!opts.manifest.empty())
      apply_manifest(opts, verb, err);
    if (opts.config.empty())
      throw ConfigError("--config FILE is required");
    const auto start = std::chrono::steady_clock::now();
    Context ctx;
    ctx.opts = opts;
    ctx.out = &out;
    ctx.err = &err;
    ctx.config = load_config(opts.config);
    ctx.seed = opts.seed ? *opts.seed : ctx.config.fama.seed;
    if (verb == "validate")
      return cmd_validate(ctx);

    ctx.out_dir = opts.out ? *opts.out : ctx.config.output_dir;
    fs::create_directories(ctx.out_dir);
    int code = 0;
    if (verb == "field")
      code = cmd_field(ctx);
    else if (verb == "pattern")
      code = cmd_pattern(ctx);
    else if (verb == "covariance")
      code = cmd_covariance(ctx, false);
    else if (verb == "eigen")
      code = cmd_covariance(ctx, true);
    else if (verb == "codebook")
      code = cmd_codebook(ctx);
    else if (verb == "outage")
      code = cmd_outage(ctx);
    else if (verb == "calibrate")
      code = cmd_calibrate(ctx);
    else
      throw ConfigError("unknown command '" + verb + "'");
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    write_manifest(ctx, verb, dt.count());
    for (const auto &o : ctx.outputs)
      out << "wrote " << (ctx.out_dir / o).string() << "\n";
    return code;
  } catch (const InputError &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError &e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

} // namespace dmafas::cli
