#pragma once

#include <filesystem>
#include <random>
#include <vector>

#include "dmafas/core.hpp"

namespace dmafas {

using Rng = std::mt19937_64;

enum class ScatteringKind { Isotropic3D, Isotropic2D, PlaneWaveList };

/// Dipole keeps the sin(theta) sin(vartheta) element factors; Isotropic drops them.
enum class ElementPattern { Dipole, Isotropic };

struct PlaneWave {
  Complex alpha;
  double theta;
  double phi;
  double vartheta;
};

/// Angular statistics of the incoming plane waves. Isotropic3D draws theta with pdf
/// sin(theta)/2 and phi uniform over [0, pi); Isotropic2D fixes theta = pi/2.
struct AngularModel {
  ScatteringKind kind = ScatteringKind::Isotropic3D;
  ElementPattern pattern = ElementPattern::Dipole;
  std::vector<PlaneWave> waves; // PlaneWaveList only
};

struct ChannelStats {
  double sigma_alpha_sq = 1.0;
  CMat covariance;
};

CVec steering_vector(double theta, double phi, const std::vector<Vec3> &positions, double k0);

/// One realization of the plane-wave superposition. For PlaneWaveList the listed
/// waves are used as given (sum of alpha_p / P terms). For the statistical models
/// each gain is drawn from CN(0, P sigma^2), so the covariance equals sigma^2 E[...]
/// for any number of paths.
CVec sample_planewave_channel(const AngularModel &model, const std::vector<Vec3> &positions,
                              int num_paths, double k0, double sigma_alpha_sq, Rng &rng);

/// Closed form for 3D isotropic scattering with dipole elements:
/// -(8 pi sigma^2 / (3 k0)) Im{ga_zz}; diagonal 4 sigma^2 / 9.
ChannelStats covariance_isotropic(const std::vector<Vec3> &positions, double k0,
                                  double sigma_alpha_sq);

struct QuadratureOptions {
  int initial_order = 16;
  int max_order = 1024;
  double tolerance = 1e-6; // relative Frobenius change between refinements
};

/// Angular average of the covariance by tensor Gauss-Legendre quadrature,
/// doubling the order until successive results agree.
ChannelStats covariance_numeric(const AngularModel &model, const std::vector<Vec3> &positions,
                                double k0, double sigma_alpha_sq,
                                const QuadratureOptions &opts = {});

/// Hermitian square-root sampler. Eigenvalues in [-1e-10 lambda_max, 0) are clipped;
/// anything more negative raises NotPSD.
class GaussianSampler {
public:
  explicit GaussianSampler(const CMat &covariance);

  CVec draw(Rng &rng) const;
  /// Fills `out` with a draw using caller-provided scratch for the white vector.
  void draw(Rng &rng, CVec &white, CVec &out) const;
  const CMat &factor() const { return factor_; }
  Index dimension() const { return factor_.rows(); }

private:
  CMat factor_;
};

CVec sample_gaussian_channel(const ChannelStats &stats, Rng &rng);

/// Draw from CN(0, 1).
Complex standard_complex_normal(Rng &rng);

/// Throws NotPSD if `cov` is not Hermitian or has eigenvalues below -1e-10 lambda_max.
void check_psd(const CMat &cov, const char *what);

/// Optional dipole-length weighting of the channel: y -> l^2 y, i.e. covariance * l^4.
ChannelStats weight_by_dipole_length(ChannelStats stats, double dipole_length);

/// Plane-wave list CSV: alpha_re,alpha_im,theta,phi,vartheta (radians).
std::vector<PlaneWave> read_plane_waves_csv(const std::filesystem::path &path);

} // namespace dmafas
