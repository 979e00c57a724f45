#pragma once

#include <optional>
#include <vector>

#include "dmafas/core.hpp"

namespace dmafas {

/// Admittance of the TE10 wave, kx / (omega mu0). Used as the default reference
/// port admittance when no measured waveguide self-admittance is available.
double te10_wave_admittance(const Medium &medium, const WaveguideGeometry &geometry);

/// Dipole length that makes the semi-infinite port self-admittance equal `y0`.
/// Throws NonPhysicalReference unless Re{y0} > 0.
double dipole_length_for_reference(Complex y0, const Medium &medium,
                                   const WaveguideGeometry &geometry);

enum class TerminationKind { Short, Matched, Custom };

/// Single-waveguide DMA with equally spaced slots on the waveguide axis (z = a/2).
struct LinearDmaParams {
  double frequency_hz = 2.4e9;
  double rel_permittivity = 3.55;
  double a = 0.058;
  double b = 0.0232;
  double length = 0.475;
  int num_slots = 16;
  double first_slot_x = 0.050;
  double slot_spacing = 0.025;
  Complex y_rad{3.7e-5, -0.0037};
  /// Reference waveguide self-admittance; the TE10 wave admittance when unset.
  std::optional<Complex> y0_reference;
  /// Explicit dipole length; derived from y0_reference when unset.
  std::optional<double> dipole_length;
  /// Generator admittance; y0_reference when unset.
  std::optional<Complex> y_generator;
  TerminationKind termination = TerminationKind::Matched;
  Complex custom_load{0.0, 0.0};
};

/// Reference admittance that `p` resolves to.
Complex reference_admittance(const LinearDmaParams &p);

DmaDesign make_linear_dma(const LinearDmaParams &p);

/// 16-slot prototype (2.4 GHz, eps_r 3.55, 58 x 23.2 x 475 mm, slots from 50 mm every 25 mm).
LinearDmaParams table1_params();

/// 20-slot steering design: first slot at 60 mm, L = 595 mm, short termination.
LinearDmaParams steering_params();

/// Active (1-based) slots of the three prototype configurations, index 1..3.
std::vector<int> table1_configuration(int which);

} // namespace dmafas
