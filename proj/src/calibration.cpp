#include "dmafas/calibration.hpp"

#include <cmath>

#include "dmafas/csv.hpp"
#include "dmafas/designs.hpp"
#include "dmafas/greens.hpp"
#include "dmafas/nelder_mead.hpp"

namespace dmafas {

namespace {

constexpr Complex I(0.0, 1.0);

// Field at the sample points as a linear map of [j_r, j_l, j_s (all slots)].
class AxisModel {
public:
  AxisModel(const FieldSampleSet &samples, const DmaDesign &design, const AdmittanceSet &set,
            const DiodeConfig &config)
      : design_(design), set_(set), config_(config) {
    if (set.num_waveguides() != 1)
      throw DimensionMismatch("field calibration needs a single waveguide");
    const GreensContext ctx(design.medium, design.geometry);
    const Index n = set.num_slots();
    const Index q = static_cast<Index>(samples.points.size());
    kernel_.resize(q, n + 2);
    for (Index i = 0; i < q; ++i) {
      const Vec3 &r = samples.points[i];
      kernel_(i, 0) = gw_finite(r, port1_local(design.geometry), ctx);
      kernel_(i, 1) = gw_finite(r, port2_local(design.geometry), ctx);
      for (Index s = 0; s < n; ++s)
        kernel_(i, s + 2) = gw_finite(r, local_coords(design.slots.positions[s], 0, design), ctx);
    }
    kernel_ *= -I * design.slots.dipole_length * design.medium.omega() *
               design.medium.permittivity();
    target_ = CVec::Zero(q);
    if (samples.values.size() == samples.points.size())
      target_ = Eigen::Map<const CVec>(samples.values.data(), q);
    loads_ = design_loads(design);
  }

  CVec field(Complex y_rad) const {
    LoadSpec loads = loads_;
    loads.ys.setConstant(y_rad);
    const auto net = configure(set_, config_, design_, loads);
    CVec jg(1);
    jg[0] = 1.0;
    const auto sol = solve_tx(net, jg);
    CVec src(kernel_.cols());
    src[0] = sol.j_r[0];
    src[1] = sol.j_l.size() ? sol.j_l[0] : Complex(0.0);
    src.tail(kernel_.cols() - 2) = sol.j_s_full;
    return kernel_ * src;
  }

  double error(Complex y_rad) const {
    try {
      return (field(y_rad) - target_).cwiseAbs().mean();
    } catch (const NumericalError &) {
      return INFINITY;
    }
  }

private:
  const DmaDesign &design_;
  const AdmittanceSet &set_;
  const DiodeConfig &config_;
  LoadSpec loads_;
  CMat kernel_;
  CVec target_;
};

} // namespace

double fit_lm(Complex y0_reference, const DmaDesign &design) {
  return dipole_length_for_reference(y0_reference, design.medium, design.geometry);
}

Complex semi_infinite_self_admittance(double dipole_length, const DmaDesign &design) {
  const GreensContext ctx(design.medium, design.geometry);
  const Vec3 p1 = port1_local(design.geometry);
  return I * dipole_length * dipole_length * design.medium.omega() *
         design.medium.permittivity() * gw_semi_infinite(p1, p1, ctx);
}

void FieldSampleSet::validate() const {
  if (points.size() != values.size())
    throw InputError("field samples: point and value counts differ");
  if (points.size() < 8)
    throw InputError("field samples: at least 8 samples are required, got " +
                     std::to_string(points.size()));
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].x() > points[i - 1].x()))
      throw InputError("field samples: x must be strictly increasing (sample " +
                       std::to_string(i + 1) + ")");
}

FieldSampleSet read_field_samples_csv(const std::filesystem::path &path,
                                      const WaveguideGeometry &geometry) {
  const auto t = csv::read(path);
  FieldSampleSet s;
  s.source = path.string();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto &r = t.rows[i];
    const int line = t.line_numbers[i];
    if (r.size() != 3)
      throw InputError(path.string() + ":" + std::to_string(line) + ": expected x_m,hz_re,hz_im");
    s.points.emplace_back(csv::to_double(r[0], path, line), geometry.b / 2.0, geometry.a / 2.0);
    s.values.emplace_back(csv::to_double(r[1], path, line), csv::to_double(r[2], path, line));
  }
  s.validate();
  return s;
}

void write_field_samples_csv(const std::filesystem::path &path, const FieldSampleSet &samples) {
  csv::Writer w(path, {"x_m", "hz_re", "hz_im"});
  for (std::size_t i = 0; i < samples.points.size(); ++i)
    w.row(samples.points[i].x(), samples.values[i].real(), samples.values[i].imag());
}

std::vector<double> axis_positions(const WaveguideGeometry &geometry, int count) {
  if (count < 1)
    throw InputError("number of axis positions must be positive");
  std::vector<double> xs(count);
  for (int i = 0; i < count; ++i)
    xs[i] = (i + 0.5) * geometry.length / count;
  return xs;
}

FieldSampleSet synthesize_axis_field(const DmaDesign &design, const AdmittanceSet &set,
                                     const DiodeConfig &config, const std::vector<double> &xs) {
  FieldSampleSet s;
  s.source = "model";
  for (double x : xs)
    s.points.emplace_back(x, design.geometry.b / 2.0, design.geometry.a / 2.0);
  const AxisModel model(s, design, set, config);
  const CVec h = model.field(design.slots.y_rad);
  s.values.assign(h.data(), h.data() + h.size());
  return s;
}

double field_error(const FieldSampleSet &samples, const DmaDesign &design,
                   const AdmittanceSet &set, const DiodeConfig &config, Complex y_rad) {
  samples.validate();
  return AxisModel(samples, design, set, config).error(y_rad);
}

YradFit fit_yrad(const FieldSampleSet &samples, const DmaDesign &design, const AdmittanceSet &set,
                 const DiodeConfig &config, const YradFitOptions &opts) {
  samples.validate();
  if (opts.grid < 1)
    throw InputError("multi-start grid must have at least one point per axis");
  const AxisModel model(samples, design, set, config);

  std::vector<Complex> starts;
  auto logspace = [&](double lo, double hi, int i) {
    return opts.grid == 1 ? std::sqrt(lo * hi)
                          : lo * std::pow(hi / lo, static_cast<double>(i) / (opts.grid - 1));
  };
  for (int i = 0; i < opts.grid; ++i)
    for (int j = 0; j < opts.grid; ++j)
      for (double sign : {-1.0, 1.0})
        starts.emplace_back(logspace(opts.re_min, opts.re_max, i),
                            sign * logspace(opts.im_min, opts.im_max, j));
  starts.insert(starts.end(), opts.extra_starts.begin(), opts.extra_starts.end());

  YradFit fit;
  fit.starts = static_cast<int>(starts.size());
  NelderMeadResult best;
  best.value = INFINITY;
  Complex best_scale;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    // Each start works in coordinates scaled by its own magnitudes.
    const double sr = std::max(std::abs(starts[s].real()), 1e-12);
    const double si = std::max(std::abs(starts[s].imag()), 1e-12);
    auto objective = [&](const std::array<double, 2> &p) {
      return model.error(Complex(p[0] * sr, p[1] * si));
    };
    const auto r = nelder_mead_2d(objective, {starts[s].real() / sr, starts[s].imag() / si});
    if (r.converged)
      ++fit.converged_starts;
    if (r.value < best.value) {
      best = r;
      best_scale = Complex(sr, si);
      fit.best_start = static_cast<int>(s);
    }
  }
  if (fit.best_start < 0 || !std::isfinite(best.value))
    throw OptimizerStalled("no start produced a finite field error");
  if (!best.converged)
    throw OptimizerStalled("Y_rad fit stalled at objective " + std::to_string(best.value));
  fit.y_rad = Complex(best.x[0] * best_scale.real(), best.x[1] * best_scale.imag());
  fit.objective = best.value;
  return fit;
}

Complex rescale_ys(double l_new, double l_old, Complex y_s) {
  if (!(l_new > 0.0) || !(l_old > 0.0))
    throw InputError("dipole lengths must be positive");
  const double r = l_new / l_old;
  return r * r * y_s;
}

} // namespace dmafas
