#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dmafas/core.hpp"

namespace dmafas {

/// gamma_u = |g_u^T y_m|^2 / sum over interferers of |g_u^T y_i|^2.
RVec sir(const CMat &g, const CVec &y_desired, const std::vector<CVec> &y_interferers);

/// Smallest index attaining the maximum.
Index select_port(const RVec &sir_values);

struct FamaScenario {
  std::string label;
  int num_users = 3;
  CMat g;       // U x N, rows g_u^T
  CMat sigma_y; // N x N
  std::uint64_t seed = 1;
  std::int64_t num_trials = 100000;
  std::vector<double> thresholds_db;
};

struct OutageCurve {
  std::string label;
  std::vector<double> thresholds_db;
  std::vector<double> outage;
  std::vector<double> std_error;     // binomial standard error
  std::vector<double> ci_halfwidth;  // 95% normal approximation
  std::vector<double> sorted_sir_db; // every selected SIR, ascending
  std::int64_t samples = 0;

  /// SIR (dB) at which the empirical outage reaches p.
  double threshold_at(double p) const;
};

/// Monte Carlo: each trial draws M x M independent channels from CN(0, Sigma_y); every
/// user picks the configuration with the largest SIR. Selected SIRs of all users are pooled.
OutageCurve outage_curve(const FamaScenario &scenario);

/// `count` points equally spaced on the slot line, from the first to the last slot or,
/// with `full_length`, across the whole waveguide.
std::vector<Vec3> aperture_positions(const DmaDesign &design, int count, bool full_length = false);

/// Ideal fluid antenna: raw channel entries at the given positions (G = I) with the
/// closed-form isotropic covariance.
FamaScenario ideal_fas_baseline(const std::vector<Vec3> &positions, double k0,
                                double sigma_alpha_sq, const FamaScenario &base);

void write_outage_csv(const std::filesystem::path &path, const std::vector<OutageCurve> &curves);

/// Deterministic 64-bit mixer used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace dmafas
