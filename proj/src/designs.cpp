#include "dmafas/designs.hpp"

#include <cmath>

namespace dmafas {

double te10_wave_admittance(const Medium &medium, const WaveguideGeometry &geometry) {
  const auto wn = derive_wavenumbers(medium, geometry);
  return wn.kx / (wn.omega * constants::mu0);
}

double dipole_length_for_reference(Complex y0, const Medium &medium,
                                   const WaveguideGeometry &geometry) {
  const auto wn = derive_wavenumbers(medium, geometry);
  const double scale = geometry.a * geometry.b * wn.k * wn.k /
                       (2.0 * wn.omega * medium.permittivity() * wn.kx);
  const double arg = y0.real() * scale;
  if (!(arg > 0.0) || !std::isfinite(arg))
    throw NonPhysicalReference("reference self-admittance must have a positive real part");
  return std::sqrt(arg);
}

Complex reference_admittance(const LinearDmaParams &p) {
  if (p.y0_reference)
    return *p.y0_reference;
  const Medium medium(p.frequency_hz, p.rel_permittivity);
  return te10_wave_admittance(medium, {p.a, p.b, p.length});
}

DmaDesign make_linear_dma(const LinearDmaParams &p) {
  DmaDesign d;
  d.medium = Medium(p.frequency_hz, p.rel_permittivity);
  d.geometry = {p.a, p.b, p.length};
  d.num_waveguides = 1;

  const Complex y0 = reference_admittance(p);
  d.slots.dipole_length =
      p.dipole_length ? *p.dipole_length : dipole_length_for_reference(y0, d.medium, d.geometry);
  d.slots.y_rad = p.y_rad;
  if (p.num_slots < 1)
    throw InvalidDesign("num_slots must be >= 1");
  for (int n = 0; n < p.num_slots; ++n) {
    d.slots.positions.emplace_back(p.first_slot_x + n * p.slot_spacing, p.b, p.a / 2.0);
    d.slots.waveguide_index.push_back(0);
  }

  d.ports.y_generator = p.y_generator ? *p.y_generator : y0;
  switch (p.termination) {
  case TerminationKind::Short:
    d.ports.termination = Short{};
    break;
  case TerminationKind::Matched:
    d.ports.termination = Load{y0};
    break;
  case TerminationKind::Custom:
    d.ports.termination = Load{p.custom_load};
    break;
  }
  d.validate();
  return d;
}

LinearDmaParams table1_params() { return LinearDmaParams{}; }

LinearDmaParams steering_params() {
  LinearDmaParams p;
  p.num_slots = 20;
  p.first_slot_x = 0.060;
  p.length = 0.595;
  p.termination = TerminationKind::Short;
  return p;
}

std::vector<int> table1_configuration(int which) {
  switch (which) {
  case 1:
    return {2, 3, 5, 6, 10, 11, 14, 15};
  case 2:
    return {1, 2, 3, 7, 8, 13, 14, 15};
  case 3:
    return {1, 4, 5, 8, 11, 12, 14, 15};
  default:
    throw InputError("prototype configurations are numbered 1 to 3");
  }
}

} // namespace dmafas
