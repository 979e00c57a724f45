#include "dmafas/channel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dmafas/csv.hpp"
#include "dmafas/greens.hpp"
#include "dmafas/quadrature.hpp"

namespace dmafas {

using constants::pi;

namespace {

double uniform01(Rng &rng) {
  // 53 random bits mapped to (0, 1].
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double departure_factor(ElementPattern p) {
  // E[sin^2(vartheta)] with pdf sin(vartheta)/2 on [0, pi).
  return p == ElementPattern::Dipole ? 2.0 / 3.0 : 1.0;
}

void accumulate_outer(CMat &acc, const CVec &a, double w) {
  acc.noalias() += w * a * a.adjoint();
}

CMat angular_average(const AngularModel &model, const std::vector<Vec3> &positions, double k0,
                     int order) {
  const Index n = static_cast<Index>(positions.size());
  CMat acc = CMat::Zero(n, n);
  const bool dipole = model.pattern == ElementPattern::Dipole;
  const auto phi_rule = gauss_legendre(order, 0.0, pi);
  if (model.kind == ScatteringKind::Isotropic2D) {
    for (int j = 0; j < order; ++j)
      accumulate_outer(acc, steering_vector(pi / 2.0, phi_rule.nodes[j], positions, k0),
                       phi_rule.weights[j] / pi);
    return acc;
  }
  const auto theta_rule = gauss_legendre(order, 0.0, pi);
  for (int i = 0; i < order; ++i) {
    const double theta = theta_rule.nodes[i];
    const double s = std::sin(theta);
    const double w_theta = theta_rule.weights[i] * s / (2.0 * pi) * (dipole ? s * s : 1.0);
    for (int j = 0; j < order; ++j)
      accumulate_outer(acc, steering_vector(theta, phi_rule.nodes[j], positions, k0),
                       w_theta * phi_rule.weights[j]);
  }
  return acc;
}

} // namespace

Complex standard_complex_normal(Rng &rng) {
  const double r = std::sqrt(-std::log(uniform01(rng)));
  const double t = 2.0 * pi * uniform01(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

CVec steering_vector(double theta, double phi, const std::vector<Vec3> &positions, double k0) {
  const Vec3 kv = k0 * Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                            std::cos(theta));
  CVec a(static_cast<Index>(positions.size()));
  for (std::size_t n = 0; n < positions.size(); ++n)
    a[n] = std::exp(Complex(0.0, kv.dot(positions[n])));
  return a;
}

CVec sample_planewave_channel(const AngularModel &model, const std::vector<Vec3> &positions,
                              int num_paths, double k0, double sigma_alpha_sq, Rng &rng) {
  const bool dipole = model.pattern == ElementPattern::Dipole;
  CVec y = CVec::Zero(static_cast<Index>(positions.size()));
  if (model.kind == ScatteringKind::PlaneWaveList) {
    if (model.waves.empty())
      throw InputError("plane-wave list is empty");
    const double P = static_cast<double>(model.waves.size());
    for (const auto &w : model.waves) {
      const double g = dipole ? std::sin(w.theta) * std::sin(w.vartheta) : 1.0;
      y += (w.alpha / P * g) * steering_vector(w.theta, w.phi, positions, k0);
    }
    return y;
  }
  if (num_paths < 1)
    throw InputError("number of plane waves must be >= 1");
  const double P = num_paths;
  const double amp = std::sqrt(P * sigma_alpha_sq);
  for (int p = 0; p < num_paths; ++p) {
    const double theta = model.kind == ScatteringKind::Isotropic2D
                             ? pi / 2.0
                             : std::acos(1.0 - 2.0 * uniform01(rng));
    const double phi = pi * uniform01(rng);
    const double vartheta = std::acos(1.0 - 2.0 * uniform01(rng));
    const Complex alpha = amp * standard_complex_normal(rng);
    const double g = dipole ? std::sin(theta) * std::sin(vartheta) : 1.0;
    y += (alpha / P * g) * steering_vector(theta, phi, positions, k0);
  }
  return y;
}

ChannelStats covariance_isotropic(const std::vector<Vec3> &positions, double k0,
                                  double sigma_alpha_sq) {
  const Index n = static_cast<Index>(positions.size());
  const double scale = -8.0 * pi * sigma_alpha_sq / (3.0 * k0);
  ChannelStats s{sigma_alpha_sq, CMat(n, n)};
  for (Index i = 0; i < n; ++i) {
    s.covariance(i, i) = scale * ga_zz_imag_coincident(k0);
    for (Index j = 0; j < i; ++j) {
      const double v = scale * ga_zz(positions[i], positions[j], k0).imag();
      s.covariance(i, j) = v;
      s.covariance(j, i) = v;
    }
  }
  return s;
}

ChannelStats covariance_numeric(const AngularModel &model, const std::vector<Vec3> &positions,
                                double k0, double sigma_alpha_sq, const QuadratureOptions &opts) {
  const Index n = static_cast<Index>(positions.size());
  ChannelStats s{sigma_alpha_sq, CMat::Zero(n, n)};
  if (model.kind == ScatteringKind::PlaneWaveList) {
    if (model.waves.empty())
      throw InputError("plane-wave list is empty");
    const double P = static_cast<double>(model.waves.size());
    const bool dipole = model.pattern == ElementPattern::Dipole;
    for (const auto &w : model.waves) {
      const double g = dipole ? std::sin(w.theta) * std::sin(w.vartheta) : 1.0;
      accumulate_outer(s.covariance, steering_vector(w.theta, w.phi, positions, k0),
                       std::norm(w.alpha) * g * g / (P * P));
    }
    return s;
  }
  const double factor = sigma_alpha_sq * departure_factor(model.pattern);
  CMat prev = angular_average(model, positions, k0, opts.initial_order);
  for (int order = 2 * opts.initial_order; order <= opts.max_order; order *= 2) {
    CMat next = angular_average(model, positions, k0, order);
    const double change = (next - prev).norm() / std::max(next.norm(), 1e-300);
    prev = std::move(next);
    if (change < opts.tolerance) {
      s.covariance = factor * prev;
      return s;
    }
  }
  throw QuadratureNotConverged("angular quadrature did not converge by order " +
                               std::to_string(opts.max_order));
}

void check_psd(const CMat &cov, const char *what) {
  if (cov.rows() != cov.cols())
    throw NotPSD(std::string(what) + " is not square");
  const double scale = std::max(cov.norm(), 1e-300);
  if ((cov - cov.adjoint()).norm() > 1e-10 * scale)
    throw NotPSD(std::string(what) + " is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(cov, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(lmax, 0.0))
    throw NotPSD(std::string(what) + " has a negative eigenvalue");
}

GaussianSampler::GaussianSampler(const CMat &covariance) {
  check_psd(covariance, "channel covariance");
  Eigen::SelfAdjointEigenSolver<CMat> es(covariance);
  RVec lambda = es.eigenvalues().cwiseMax(0.0);
  factor_ = es.eigenvectors() * lambda.cwiseSqrt().cast<Complex>().asDiagonal();
}

CVec GaussianSampler::draw(Rng &rng) const {
  CVec white(factor_.cols()), out(factor_.rows());
  draw(rng, white, out);
  return out;
}

void GaussianSampler::draw(Rng &rng, CVec &white, CVec &out) const {
  white.resize(factor_.cols());
  for (Index i = 0; i < white.size(); ++i)
    white[i] = standard_complex_normal(rng);
  out.noalias() = factor_ * white;
}

CVec sample_gaussian_channel(const ChannelStats &stats, Rng &rng) {
  return GaussianSampler(stats.covariance).draw(rng);
}

ChannelStats weight_by_dipole_length(ChannelStats stats, double dipole_length) {
  const double l2 = dipole_length * dipole_length;
  stats.covariance *= l2 * l2;
  return stats;
}

std::vector<PlaneWave> read_plane_waves_csv(const std::filesystem::path &path) {
  const auto t = csv::read(path);
  std::vector<PlaneWave> waves;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto &r = t.rows[i];
    const int line = t.line_numbers[i];
    if (r.size() != 5)
      throw InputError(path.string() + ":" + std::to_string(line) +
                       ": expected alpha_re,alpha_im,theta,phi,vartheta");
    waves.push_back({Complex(csv::to_double(r[0], path, line), csv::to_double(r[1], path, line)),
                     csv::to_double(r[2], path, line), csv::to_double(r[3], path, line),
                     csv::to_double(r[4], path, line)});
  }
  if (waves.empty())
    throw InputError(path.string() + ": no plane waves");
  return waves;
}

} // namespace dmafas
