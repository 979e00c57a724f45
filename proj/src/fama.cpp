#include "dmafas/fama.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dmafas/channel.hpp"
#include "dmafas/csv.hpp"

namespace dmafas {

namespace {

constexpr std::int64_t block_trials = 2048;

double to_db(double v) { return v > 0.0 ? 10.0 * std::log10(v) : -INFINITY; }

} // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RVec sir(const CMat &g, const CVec &y_desired, const std::vector<CVec> &y_interferers) {
  if (y_interferers.empty())
    throw NoInterferers("SIR needs at least one interfering channel");
  if (y_desired.size() != g.cols())
    throw DimensionMismatch("desired channel length does not match the response matrix");
  RVec num = (g * y_desired).cwiseAbs2();
  RVec den = RVec::Zero(g.rows());
  for (const auto &y : y_interferers) {
    if (y.size() != g.cols())
      throw DimensionMismatch("interfering channel length does not match the response matrix");
    den += (g * y).cwiseAbs2();
  }
  RVec out(g.rows());
  for (Index u = 0; u < out.size(); ++u)
    out[u] = den[u] > 0.0 ? num[u] / den[u] : (num[u] > 0.0 ? INFINITY : 0.0);
  return out;
}

Index select_port(const RVec &sir_values) {
  if (sir_values.size() == 0)
    throw InputError("cannot select from an empty SIR vector");
  Index arg = 0;
  for (Index u = 1; u < sir_values.size(); ++u)
    if (sir_values[u] > sir_values[arg])
      arg = u;
  return arg;
}

double OutageCurve::threshold_at(double p) const {
  if (sorted_sir_db.empty())
    throw InputError("empty outage curve");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted_sir_db.size());
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), sorted_sir_db.size() - 1);
  return sorted_sir_db[i];
}

OutageCurve outage_curve(const FamaScenario &sc) {
  const int m = sc.num_users;
  if (m < 2)
    throw NoInterferers("FAMA needs at least two users");
  if (sc.num_trials < 1)
    throw InputError("number of trials must be positive");
  if (sc.g.cols() != sc.sigma_y.rows())
    throw DimensionMismatch("response matrix and channel covariance disagree in size");

  // Effective channels h = G y with y = F w; sample through B = G F directly.
  const GaussianSampler sampler(sc.sigma_y);
  const CMat b = sc.g * sampler.factor();
  const Index n = b.cols();
  const Index u = b.rows();

  const std::int64_t num_blocks = (sc.num_trials + block_trials - 1) / block_trials;
  std::vector<double> selected(static_cast<std::size_t>(sc.num_trials) * m);
  auto run_block = [&](std::int64_t blk) {
    Rng rng(splitmix64(sc.seed ^ splitmix64(static_cast<std::uint64_t>(blk))));
    CMat w(n, m * m), h(u, m * m);
    RVec power(u), interference(u);
    const std::int64_t t0 = blk * block_trials;
    const std::int64_t t1 = std::min(sc.num_trials, t0 + block_trials);
    for (std::int64_t t = t0; t < t1; ++t) {
      for (Index c = 0; c < w.cols(); ++c)
        for (Index r = 0; r < n; ++r)
          w(r, c) = standard_complex_normal(rng);
      h.noalias() = b * w;
      // Column user*m + k holds the channel from BS antenna k to `user`.
      for (int user = 0; user < m; ++user) {
        power = h.col(user * m + user).cwiseAbs2();
        interference.setZero();
        for (int k = 0; k < m; ++k)
          if (k != user)
            interference += h.col(user * m + k).cwiseAbs2();
        double best = -1.0;
        for (Index i = 0; i < u; ++i) {
          const double g = interference[i] > 0.0 ? power[i] / interference[i] : INFINITY;
          if (g > best)
            best = g;
        }
        selected[static_cast<std::size_t>(t * m + user)] = best;
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::int64_t>(
      num_blocks, std::max(1u, std::thread::hardware_concurrency())));
  if (threads <= 1) {
    for (std::int64_t blk = 0; blk < num_blocks; ++blk)
      run_block(blk);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::int64_t blk = t; blk < num_blocks; blk += threads)
          run_block(blk);
      });
  }

  std::sort(selected.begin(), selected.end());
  OutageCurve c;
  c.label = sc.label;
  c.thresholds_db = sc.thresholds_db;
  c.samples = static_cast<std::int64_t>(selected.size());
  const double total = static_cast<double>(selected.size());
  for (double th_db : sc.thresholds_db) {
    const double th = std::pow(10.0, th_db / 10.0);
    const auto below = std::lower_bound(selected.begin(), selected.end(), th) - selected.begin();
    const double p = static_cast<double>(below) / total;
    const double se = std::sqrt(p * (1.0 - p) / total);
    c.outage.push_back(p);
    c.std_error.push_back(se);
    c.ci_halfwidth.push_back(1.96 * se);
  }
  c.sorted_sir_db.reserve(selected.size());
  for (double v : selected)
    c.sorted_sir_db.push_back(to_db(v));
  return c;
}

std::vector<Vec3> aperture_positions(const DmaDesign &design, int count, bool full_length) {
  if (count < 1)
    throw InputError("number of aperture positions must be positive");
  const auto &pos = design.slots.positions;
  if (pos.empty())
    throw InvalidDesign("design has no slots");
  double x0 = pos.front().x(), x1 = pos.back().x();
  if (full_length) {
    x0 = 0.0;
    x1 = design.geometry.length;
  }
  std::vector<Vec3> out(count);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
    out[i] = Vec3(x0 + t * (x1 - x0), pos.front().y(), pos.front().z());
  }
  return out;
}

FamaScenario ideal_fas_baseline(const std::vector<Vec3> &positions, double k0,
                                double sigma_alpha_sq, const FamaScenario &base) {
  FamaScenario sc = base;
  const Index u = static_cast<Index>(positions.size());
  sc.g = CMat::Identity(u, u);
  sc.sigma_y = covariance_isotropic(positions, k0, sigma_alpha_sq).covariance;
  return sc;
}

void write_outage_csv(const std::filesystem::path &path, const std::vector<OutageCurve> &curves) {
  csv::Writer w(path, {"gamma_th_db", "outage", "ci_halfwidth", "baseline_label"});
  for (const auto &c : curves)
    for (std::size_t i = 0; i < c.thresholds_db.size(); ++i)
      w.row(c.thresholds_db[i], c.outage[i], c.ci_halfwidth[i], c.label);
}

} // namespace dmafas
