#include "dmafas/core.hpp"

#include <cmath>
#include <sstream>

namespace dmafas {

namespace {
constexpr double kCoordTol = 1e-12; // metres
}

Medium::Medium(double frequency_hz, double rel_permittivity)
    : frequency_hz_(frequency_hz), rel_permittivity_(rel_permittivity) {
  if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
    throw InvalidDesign("frequency must be positive and finite");
  if (!(rel_permittivity >= 1.0) || !std::isfinite(rel_permittivity))
    throw InvalidDesign("relative permittivity must be >= 1");
}

Wavenumbers derive_wavenumbers(const Medium &medium, const WaveguideGeometry &geometry) {
  if (!(geometry.a > 0.0))
    throw InvalidDesign("waveguide height a must be positive");
  const double k = medium.k();
  const double kc = constants::pi / geometry.a;
  const double kx2 = k * k - kc * kc;
  // kx = 0 within rounding is treated as cut off as well.
  if (kx2 <= 1e-12 * k * k) {
    std::ostringstream os;
    os << "TE10 is below cutoff: k = " << k << " rad/m, pi/a = " << kc << " rad/m";
    throw CutoffError(os.str());
  }
  return {medium.omega(), medium.k0(), k, std::sqrt(kx2)};
}

Vec3 port1_local(const WaveguideGeometry &g) { return Vec3(0.0, g.b / 2.0, g.a / 2.0); }
Vec3 port2_local(const WaveguideGeometry &g) { return Vec3(g.length, g.b / 2.0, g.a / 2.0); }

Vec3 local_coords(const Vec3 &global, int waveguide, const DmaDesign &design) {
  if (waveguide < 0 || waveguide >= design.num_waveguides)
    throw OutOfWaveguide("waveguide index " + std::to_string(waveguide) + " out of range");
  const Vec3 local = global - design.waveguide_origin(waveguide);
  const auto &g = design.geometry;
  const bool inside = local.x() > kCoordTol && local.x() <= g.length + kCoordTol &&
                      local.y() > kCoordTol && local.y() <= g.b + kCoordTol &&
                      local.z() > kCoordTol && local.z() <= g.a + kCoordTol;
  if (!inside) {
    std::ostringstream os;
    os << "point (" << global.x() << ", " << global.y() << ", " << global.z()
       << ") lies outside waveguide " << waveguide;
    throw OutOfWaveguide(os.str());
  }
  return local;
}

Vec3 global_coords(const Vec3 &local, int waveguide, const DmaDesign &design) {
  return local + design.waveguide_origin(waveguide);
}

void DmaDesign::validate() const {
  const auto &g = geometry;
  if (!(g.a > 0.0 && g.b > 0.0 && g.length > 0.0))
    throw InvalidDesign("waveguide dimensions must be positive");
  if (num_waveguides < 1)
    throw InvalidDesign("at least one waveguide is required");
  if (slots.positions.empty())
    throw InvalidDesign("the design has no slots");
  if (slots.waveguide_index.size() != slots.positions.size())
    throw InvalidDesign("every slot needs a waveguide index");
  if (!(slots.dipole_length > 0.0) || !std::isfinite(slots.dipole_length))
    throw InvalidDesign("dipole length must be positive");
  if (!(ports.y_generator.real() > 0.0))
    throw InvalidDesign("generator admittance must have a positive real part");
  if (const auto *load = std::get_if<Load>(&ports.termination)) {
    if (!std::isfinite(load->admittance.real()) || !std::isfinite(load->admittance.imag()))
      throw InvalidDesign("load admittance must be finite");
  }
  for (std::size_t n = 0; n < slots.size(); ++n) {
    const int w = slots.waveguide_index[n];
    if (w < 0 || w >= num_waveguides)
      throw InvalidDesign("slot " + std::to_string(n + 1) + " refers to a missing waveguide");
    try {
      (void)local_coords(slots.positions[n], w, *this);
    } catch (const OutOfWaveguide &e) {
      throw InvalidDesign("slot " + std::to_string(n + 1) + ": " + e.what());
    }
    for (std::size_t m = 0; m < n; ++m) {
      if ((slots.positions[n] - slots.positions[m]).norm() < 1e-9)
        throw InvalidDesign("slots " + std::to_string(m + 1) + " and " + std::to_string(n + 1) +
                            " coincide");
    }
  }
}

SingleModeReport validate_single_mode(const DmaDesign &design) {
  const auto wn = derive_wavenumbers(design.medium, design.geometry);
  const auto &g = design.geometry;
  SingleModeReport report;
  auto check = [&](const char *mode, double cutoff) {
    if (wn.k >= cutoff) {
      std::ostringstream os;
      os << mode << " propagates: k = " << wn.k << " rad/m >= cutoff " << cutoff << " rad/m";
      report.violations.push_back({mode, cutoff, wn.k, os.str()});
    }
  };
  check("TE20", 2.0 * constants::pi / g.a);
  check("TE01", constants::pi / g.b);
  report.ok = report.violations.empty();
  return report;
}

} // namespace dmafas
