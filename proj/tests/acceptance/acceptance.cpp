// Acceptance gate: one PASS/FAIL line per criterion. `--only N` runs a single one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dmafas/calibration.hpp"
#include "dmafas/channel.hpp"
#include "dmafas/cli/commands.hpp"
#include "dmafas/cli/config.hpp"
#include "dmafas/codebook.hpp"
#include "dmafas/fama.hpp"
#include "dmafas/fas.hpp"
#include "dmafas/quadrature.hpp"

using namespace dmafas;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(const CMat &a, const CMat &b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }
double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

DiodeConfig random_config(std::size_t n, std::mt19937_64 &rng) {
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    std::vector<bool> r(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      any |= (r[i] = coin(rng));
    if (any)
      return DiodeConfig(r);
  }
}

CVec unit_current() { return CVec::Ones(1); }

DmaDesign table1(TerminationKind t) {
  auto p = table1_params();
  p.termination = t;
  return make_linear_dma(p);
}

AdmittanceSet with_devices(const DmaDesign &d, std::mt19937_64 &rng, int m) {
  std::uniform_real_distribution<double> u(-3, 3);
  DeviceLayout dev;
  for (int i = 0; i < m; ++i)
    dev.positions.emplace_back(u(rng), 2 + std::abs(u(rng)), u(rng));
  return assemble(d, dev, CMat::Random(m, static_cast<Index>(d.num_slots())) * 1e-4);
}

fs::path source_dir() { return DMAFAS_SOURCE_DIR; }

// Steering design, codebook and channel shared by criteria 9 to 12.
struct Steering {
  cli::ExperimentConfig cfg = cli::load_config(source_dir() / "configs" / "steering.yaml");
  DmaDesign design = cfg.build_design();
  AdmittanceSet set = assemble(design);
  Codebook book;
  double codebook_seconds = 0;

  Steering() {
    CodebookOptions o;
    o.phi_grid = default_phi_grid(cfg.codebook.phi_points);
    o.n_active = cfg.codebook.n_active;
    const auto t0 = Clock::now();
    book = design_codebook(design, set, o);
    codebook_seconds = seconds_since(t0);
  }

  CMat sigma_y() const {
    return covariance_isotropic(design.slots.positions, design.medium.k0(), cfg.channel.sigma_alpha_sq)
        .covariance;
  }

  std::vector<ConfigResponse> responses(const Codebook &b) const {
    std::vector<ConfigResponse> r;
    for (const auto &e : b.entries)
      r.push_back(dma_response(design, set, e.config));
    return r;
  }
};

Outcome power_sweep(bool reflection) {
  std::mt19937_64 rng(2024);
  double worst = 0;
  const auto t0 = Clock::now();
  for (auto t : {TerminationKind::Matched, TerminationKind::Short}) {
    const auto d = table1(t);
    const auto set = assemble(d);
    for (int i = 0; i < 50; ++i) {
      const auto sol = solve_tx(configure(set, random_config(16, rng), d), unit_current());
      const auto &p = sol.powers;
      const double e = reflection ? rel(p.transmitted, (1 - std::norm(sol.gamma)) * p.supplied)
                                  : std::abs(p.transmitted - (p.radiated + p.slot + p.load)) / p.transmitted;
      worst = std::max(worst, e);
    }
  }
  const double secs = seconds_since(t0);
  const double tol = reflection ? 1e-12 : 1e-10;
  return {worst < tol && secs < 10, fmt("max relative error %.2e (tol %.0e), %.2f s", worst, tol, secs)};
}

Outcome c1() { return power_sweep(false); }
Outcome c2() { return power_sweep(true); }

Outcome c3() {
  std::mt19937_64 rng(3);
  const auto t0 = Clock::now();
  const auto d = table1(TerminationKind::Short);
  double worst_a = 0, worst_b = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = with_devices(d, rng, 3);
    const auto cfg = random_config(16, rng);
    const auto ref = solve_tx(configure(set, cfg, d), unit_current());

    LoadSpec big = design_loads(d);
    big.termination = Load{Complex(1e12, 0)};
    const auto a = solve_tx(configure(set, cfg, d, big), unit_current());
    worst_a = std::max(worst_a, rel(CMat(a.j_d), CMat(ref.j_d)));

    LoadSpec on = design_loads(d);
    for (Index n = 0; n < 16; ++n)
      if (!cfg.radiating(n))
        on.ys[n] = 1e9;
    const auto b = solve_tx(configure(set, DiodeConfig::all_radiating(16), d, on), unit_current());
    worst_b = std::max(worst_b, rel(CMat(b.j_d), CMat(ref.j_d)));
  }
  const double secs = seconds_since(t0);
  return {worst_a < 1e-6 && worst_b < 1e-6 && secs < 5,
          fmt("short vs Y_l=1e12 %.2e, ON vs Y_s=1e9 %.2e, %.2f s", worst_a, worst_b, secs)};
}

Outcome c4() {
  std::mt19937_64 rng(4);
  double worst = 0;
  for (auto t : {TerminationKind::Matched, TerminationKind::Short}) {
    const auto d = table1(t);
    DmaDesign s = d;
    s.slots.dipole_length *= 3;
    s.slots.y_rad *= 9.0;
    s.ports.y_generator *= 9.0;
    if (auto *l = std::get_if<Load>(&s.ports.termination))
      l->admittance *= 9.0;
    const auto set_d = assemble(d), set_s = assemble(s);
    for (int trial = 0; trial < 10; ++trial) {
      const auto cfg = random_config(16, rng);
      const auto nd = configure(set_d, cfg, d), ns = configure(set_s, cfg, s);
      const auto sd = solve_tx(nd, unit_current()), ss = solve_tx(ns, unit_current());
      worst = std::max(worst, rel(ss.gamma, sd.gamma));
      for (auto f : {&TxPowers::radiated, &TxPowers::slot, &TxPowers::load, &TxPowers::transmitted})
        worst = std::max(worst, std::abs(ss.powers.*f / ss.powers.supplied - sd.powers.*f / sd.powers.supplied));
      const double R = 50.0;
      std::vector<CVec3> hd, hs;
      for (double phi : {0.2, 0.9, 1.6, 2.4})
        for (double theta : {0.4, 1.2, 1.5707963267948966}) {
          const Vec3 r(R * std::sin(theta) * std::cos(phi), R * std::sin(theta) * std::sin(phi),
                       R * std::cos(theta));
          hd.push_back(radiated_field(nd, sd, r));
          hs.push_back(radiated_field(ns, ss, r));
          worst = std::max(worst, rel(directivity(ns, ss, r), directivity(nd, sd, r)));
        }
      const auto peak = [](const std::vector<CVec3> &v) {
        double m = 0;
        for (const auto &h : v)
          m = std::max(m, h.norm());
        return m;
      };
      const double pd = peak(hd), ps = peak(hs);
      for (std::size_t i = 0; i < hd.size(); ++i)
        worst = std::max(worst, (hs[i] / ps - hd[i] / pd).norm());
    }
  }
  return {worst < 1e-12, fmt("max deviation %.2e (tol 1e-12)", worst)};
}

Outcome c5() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> nd(1, 20), md(1, 4);
  double worst = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = nd(rng), m = md(rng);
    auto p = table1_params();
    p.num_slots = n;
    p.length = p.first_slot_x + p.slot_spacing * n + 0.02;
    p.termination = trial % 2 ? TerminationKind::Short : TerminationKind::Matched;
    const auto d = make_linear_dma(p);
    // Random reciprocal system: symmetric self blocks, arbitrary couplings.
    AdmittanceSet s;
    auto sym = [](Index k) {
      CMat a = CMat::Random(k, k);
      return CMat(a + a.transpose());
    };
    s.yrr = sym(1);
    s.yll = sym(1);
    s.ylr = CMat::Random(1, 1);
    s.ysr = CMat::Random(n, 1);
    s.ysl = CMat::Random(n, 1);
    s.yss = sym(n);
    s.ydd = sym(m);
    s.yds = CMat::Random(m, n);
    const auto net = configure(s, random_config(n, rng), d);
    worst = std::max(worst, rel(receive_transfer(net), CMat(transmit_transfer(net).transpose())));
  }
  return {worst < 1e-12, fmt("max |T_rx - T_tx^T| / |T_tx| = %.2e over 40 systems", worst)};
}

Outcome c6() {
  const auto t0 = Clock::now();
  const auto d = table1(TerminationKind::Matched);
  const auto &pos = d.slots.positions;
  const double k0 = d.medium.k0();
  const double s2 = 1.0;
  const CMat exact = covariance_isotropic(pos, k0, s2).covariance;
  const double quad = rel(covariance_numeric(AngularModel{}, pos, k0, s2).covariance, exact);

  Rng rng(6);
  const int draws = 100000;
  CMat acc = CMat::Zero(exact.rows(), exact.cols());
  for (int t = 0; t < draws; ++t) {
    const CVec y = sample_planewave_channel(AngularModel{}, pos, 20, k0, s2, rng);
    acc.noalias() += y * y.adjoint();
  }
  const double mc = rel(CMat(acc / draws), exact);
  double diag = 0;
  for (Index i = 0; i < exact.rows(); ++i)
    diag = std::max(diag, std::abs(exact(i, i) - 4.0 * s2 / 9.0));
  const double secs = seconds_since(t0);
  return {quad < 1e-3 && mc < 0.02 && diag < 1e-6 && secs < 60,
          fmt("quadrature %.2e, Monte Carlo %.4f, diagonal error %.1e, %.1f s", quad, mc, diag, secs)};
}

Outcome c7() {
  const double k0 = table1(TerminationKind::Matched).medium.k0();
  const double lambda = 2 * constants::pi / k0;
  std::vector<Vec3> pos;
  for (int i = 0; i <= 60; ++i)
    pos.emplace_back(i * 0.05 * lambda, 0.0, 0.0);
  const auto c2 = covariance_numeric({ScatteringKind::Isotropic2D, ElementPattern::Isotropic, {}}, pos, k0, 1.0)
                      .covariance;
  const auto c3 = covariance_numeric({ScatteringKind::Isotropic3D, ElementPattern::Isotropic, {}}, pos, k0, 1.0)
                      .covariance;
  double e2 = 0, e3 = 0;
  for (std::size_t j = 0; j < pos.size(); ++j) {
    const double kd = k0 * pos[j].x();
    e2 = std::max(e2, std::abs(c2(0, j) / c2(0, 0) - std::cyl_bessel_j(0.0, kd)));
    e3 = std::max(e3, std::abs(c3(0, j) / c3(0, 0) - (kd == 0 ? 1.0 : std::sin(kd) / kd)));
  }
  return {e2 < 1e-3 && e3 < 1e-3, fmt("max error vs J0 %.2e, vs sinc %.2e over d in [0, 3 lambda]", e2, e3)};
}

Outcome c8() {
  std::mt19937_64 rng(8);
  const auto d = table1(TerminationKind::Short);
  const auto set = assemble(d);
  const double R = 1e4 * 2 * constants::pi / d.medium.k0();
  const auto th = gauss_legendre(96, 0.0, constants::pi);
  const auto ph = gauss_legendre(96, 0.0, constants::pi);
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto net = configure(set, random_config(16, rng), d);
    const auto sol = solve_tx(net, unit_current());
    double sum = 0;
    for (int i = 0; i < 96; ++i) {
      const double t = th.nodes[i];
      for (int j = 0; j < 96; ++j) {
        const double p = ph.nodes[j];
        const Vec3 r(R * std::sin(t) * std::cos(p), R * std::sin(t) * std::sin(p), R * std::cos(t));
        sum += th.weights[i] * ph.weights[j] * std::sin(t) * directivity(net, sol, r);
      }
    }
    worst = std::max(worst, rel(sum, 4 * constants::pi));
  }
  return {worst < 0.01, fmt("max relative deviation of the half-sphere integral from 4 pi: %.2e", worst)};
}

Outcome c9() {
  const Steering s;
  std::size_t matched = 0;
  double eff = 0;
  for (const auto &e : s.book.entries) {
    matched += 20 * std::log10(std::abs(e.gamma)) < -10;
    eff += e.radiation_efficiency;
  }
  const std::size_t U = s.book.size();
  const double frac = U ? double(matched) / U : 0, mean_eff = U ? eff / U : 0;
  const bool pass = U >= 35 && U <= 60 && frac >= 0.6 && mean_eff >= 0.55 && mean_eff <= 0.85 &&
                    s.codebook_seconds <= 600;
  return {pass, fmt("U = %zu, S11 < -10 dB for %.0f%%, mean efficiency %.3f, %llu masks in %.1f s", U,
                    100 * frac, mean_eff, static_cast<unsigned long long>(s.book.masks_visited),
                    s.codebook_seconds)};
}

Outcome c10() {
  const Steering s;
  std::vector<std::size_t> order(s.book.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return s.book.entries[a].target_phi < s.book.entries[b].target_phi;
  });
  Codebook sorted;
  for (auto i : order)
    sorted.entries.push_back(s.book.entries[i]);
  const auto fc = fas_covariance(s.responses(sorted), s.sigma_y());
  const Index U = fc.rho.rows();
  double asym = 0;
  for (Index u = 0; u < U; ++u)
    for (Index v = 0; v < U; ++v)
      asym = std::max(asym, std::abs(std::abs(fc.rho(u, v)) - std::abs(fc.rho(U - 1 - u, U - 1 - v))));
  const RVec diag = fc.sigma.diagonal().real();
  const double spread = (diag.maxCoeff() - diag.minCoeff()) / diag.mean();
  return {asym < 0.05 && spread > 1e-3,
          fmt("max |rho| mirror asymmetry %.3f (tol 0.05); diagonal spread %.3f of the mean", asym, spread)};
}

Outcome c11() {
  const Steering s;
  const CMat sy = s.sigma_y();
  const auto fc = fas_covariance(s.responses(s.book), sy);
  const int nf = dominant_count(fc.eigenvalues), ny = dominant_count(eigen_spectrum(sy));
  return {std::abs(nf - ny) <= 2, fmt("eigenvalues above 1%%: FAS %d, channel %d", nf, ny)};
}

Outcome c12() {
  const Steering s;
  const auto &f = s.cfg.fama;
  const auto t0 = Clock::now();
  FamaScenario base;
  base.num_users = f.users;
  base.seed = f.seed;
  base.num_trials = f.trials;
  base.thresholds_db = f.thresholds_db;
  base.sigma_y = s.sigma_y();
  FamaScenario dense = base, reduced = base;
  dense.g = response_matrix(s.responses(s.book));
  reduced.g = response_matrix(
      s.responses(reduce_codebook(s.book, static_cast<std::size_t>(s.cfg.codebook.reduced_count))));
  const int count = f.ideal_positions > 0 ? f.ideal_positions : static_cast<int>(s.book.size());
  const auto ideal = ideal_fas_baseline(aperture_positions(s.design, count, f.full_aperture),
                                        s.design.medium.k0(), s.cfg.channel.sigma_alpha_sq, base);
  const auto cd = outage_curve(dense), cr = outage_curve(reduced), ci = outage_curve(ideal);
  const double secs = seconds_since(t0) + s.codebook_seconds;

  bool monotone = true;
  for (const auto *c : {&cd, &cr, &ci})
    for (std::size_t i = 1; i < c->outage.size(); ++i)
      monotone &= c->outage[i] >= c->outage[i - 1];
  bool dominated = true;
  for (std::size_t i = 0; i < cd.outage.size(); ++i)
    dominated &= cd.outage[i] <= cr.outage[i] + 3 * std::hypot(cd.std_error[i], cr.std_error[i]);
  const double td = cd.threshold_at(0.01), ti = ci.threshold_at(0.01), tr = cr.threshold_at(0.01);
  const bool close = std::abs(td - ti) <= 3.0;
  return {monotone && dominated && close && secs < 120,
          fmt("monotone %s, dense <= reduced %s, SIR at 1%% outage: dense %.2f, reduced %.2f, ideal %.2f dB, "
              "%.1f s",
              monotone ? "yes" : "no", dominated ? "yes" : "no", td, tr, ti, secs)};
}

Outcome c13() {
  const auto d = table1(TerminationKind::Matched);
  const auto set = assemble(d);
  const Complex truth(3.7e-5, -0.0037);
  DmaDesign dt = d;
  dt.slots.y_rad = truth;
  const auto xs = axis_positions(d.geometry, 64);
  const auto conf = [](int i) { return DiodeConfig::from_active_slots(table1_configuration(i), 16); };
  const auto samples = synthesize_axis_field(dt, set, conf(3), xs);
  const auto fit = fit_yrad(samples, d, set, conf(3));
  const double er = rel(fit.y_rad.real(), truth.real()), ei = rel(fit.y_rad.imag(), truth.imag());
  double worst = 0;
  for (int c : {1, 2}) {
    const auto other = synthesize_axis_field(dt, set, conf(c), xs);
    double peak = 0;
    for (auto v : other.values)
      peak = std::max(peak, std::abs(v));
    worst = std::max(worst, field_error(other, d, set, conf(c), fit.y_rad) / peak);
  }
  return {er < 0.01 && ei < 0.01 && worst < 0.01,
          fmt("fitted %.4e %+.4ei (errors %.1e, %.1e); transfer MAE %.1e of peak", fit.y_rad.real(),
              fit.y_rad.imag(), er, ei, worst)};
}

std::string slurp(const fs::path &p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

Outcome c14() {
  const fs::path root = fs::temp_directory_path() / "dmafas_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostringstream sink;
  std::vector<std::string> failures;
  int compared = 0;

  const auto table = source_dir() / "configs" / "table1.yaml";
  const auto steer = source_dir() / "configs" / "steering.yaml";

  // Field samples for the calibration run.
  {
    const auto d = table1(TerminationKind::Matched);
    const auto set = assemble(d);
    const auto samples = synthesize_axis_field(
        d, set, DiodeConfig::from_active_slots(table1_configuration(3), 16), axis_positions(d.geometry, 64));
    write_field_samples_csv(root / "samples.csv", samples);
  }

  struct Job {
    std::string verb;
    cli::RunOptions opts;
  };
  std::vector<Job> jobs;
  auto add = [&](const std::string &verb, const fs::path &cfg, auto tweak) {
    cli::RunOptions o;
    o.config = cfg;
    o.out = root / ("a_" + verb);
    tweak(o);
    jobs.push_back({verb, o});
  };
  add("codebook", steer, [](auto &) {});
  add("field", table, [](auto &o) { o.conf = "conf1"; });
  add("pattern", table, [](auto &o) { o.conf = "conf2"; });
  add("calibrate", table, [&](auto &o) { o.samples = root / "samples.csv"; });
  const auto book = root / "a_codebook" / "codebook.csv";
  add("covariance", steer, [&](auto &o) { o.codebook = book; });
  add("eigen", steer, [&](auto &o) { o.codebook = book; });
  add("outage", steer, [&](auto &o) {
    o.codebook = book;
    o.seed = 7;
  });

  for (auto &j : jobs) {
    if (cli::run(j.verb, j.opts, sink, sink) != 0) {
      failures.push_back(j.verb + " (first run)");
      continue;
    }
    cli::RunOptions replay;
    replay.manifest = *j.opts.out / (j.verb + ".manifest.json");
    replay.out = root / ("b_" + j.verb);
    if (cli::run(j.verb, replay, sink, sink) != 0) {
      failures.push_back(j.verb + " (replay)");
      continue;
    }
    for (const auto &e : fs::directory_iterator(*j.opts.out)) {
      if (e.path().extension() != ".csv")
        continue;
      ++compared;
      if (slurp(e.path()) != slurp(*replay.out / e.path().filename()))
        failures.push_back(j.verb + "/" + e.path().filename().string());
    }
  }
  fs::remove_all(root);
  std::string detail = fmt("%d CSV files compared across %zu commands", compared, jobs.size());
  for (const auto &f : failures)
    detail += "; differs: " + f;
  return {failures.empty() && compared > 0, detail};
}

} // namespace

int main(int argc, char **argv) {
  const std::vector<std::function<Outcome()>> criteria{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14};
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc)
      only = std::stoi(argv[++i]);
    else {
      std::cerr << "usage: acceptance [--only N]\n";
      return 2;
    }
  }
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only && static_cast<int>(k + 1) != only)
      continue;
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << (k + 1) << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
