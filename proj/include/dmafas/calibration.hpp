#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dmafas/circuit.hpp"

namespace dmafas {

/// Dipole length that reproduces a reference waveguide self-admittance.
double fit_lm(Complex y0_reference, const DmaDesign &design);

/// Port self-admittance of a semi-infinite guide for dipole length l.
Complex semi_infinite_self_admittance(double dipole_length, const DmaDesign &design);

/// Samples of h_z on the guide axis (y = b/2, z = a/2), local coordinates.
struct FieldSampleSet {
  std::vector<Vec3> points;
  std::vector<Complex> values;
  std::string source;

  /// Throws InputError unless there are >= 8 samples with strictly increasing x.
  void validate() const;
};

/// CSV `x_m,hz_re,hz_im`; `#` comments allowed.
FieldSampleSet read_field_samples_csv(const std::filesystem::path &path,
                                      const WaveguideGeometry &geometry);
void write_field_samples_csv(const std::filesystem::path &path, const FieldSampleSet &samples);

/// Model h_z on the axis at the given x positions for unit generator current.
FieldSampleSet synthesize_axis_field(const DmaDesign &design, const AdmittanceSet &set,
                                     const DiodeConfig &config, const std::vector<double> &xs);

/// `count` axis positions spread over (0, L).
std::vector<double> axis_positions(const WaveguideGeometry &geometry, int count);

struct YradFitOptions {
  int grid = 5; // per axis, log-spaced
  double re_min = 1e-6, re_max = 1e-2;
  double im_min = 1e-4, im_max = 1e-1;
  std::vector<Complex> extra_starts; // tried after the grid
};

struct YradFit {
  Complex y_rad;
  double objective = 0.0; // mean |h_model - h_sample|
  int best_start = -1;
  int starts = 0;
  int converged_starts = 0;
};

/// Minimizes the mean absolute field error over Y_rad by multi-start Nelder-Mead.
/// The sample values are referenced to a unit generator current at Port 1.
YradFit fit_yrad(const FieldSampleSet &samples, const DmaDesign &design, const AdmittanceSet &set,
                 const DiodeConfig &config, const YradFitOptions &opts = {});

/// Mean absolute error of the model with slot admittance y_rad against the samples.
double field_error(const FieldSampleSet &samples, const DmaDesign &design,
                   const AdmittanceSet &set, const DiodeConfig &config, Complex y_rad);

/// Y_s scaled by (l_new / l_old)^2.
Complex rescale_ys(double l_new, double l_old, Complex y_s);

} // namespace dmafas
