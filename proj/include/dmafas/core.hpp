#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "dmafas/errors.hpp"

namespace dmafas {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double c0 = 299792458.0;          // m/s
inline constexpr double eps0 = 8.8541878128e-12;   // F/m
inline constexpr double mu0 = 1.0 / (eps0 * c0 * c0); // H/m
inline constexpr double eta = 120.0 * pi;          // used by the directivity
} // namespace constants

/// Lossless filling of the waveguides at a single operating frequency.
class Medium {
public:
  Medium(double frequency_hz, double rel_permittivity);

  double frequency_hz() const { return frequency_hz_; }
  double rel_permittivity() const { return rel_permittivity_; }
  double omega() const { return 2.0 * constants::pi * frequency_hz_; }
  double k0() const { return omega() / constants::c0; }
  double k() const { return k0() * std::sqrt(rel_permittivity_); }
  double permittivity() const { return rel_permittivity_ * constants::eps0; }
  double wavelength() const { return constants::c0 / frequency_hz_; }

private:
  double frequency_hz_;
  double rel_permittivity_;
};

/// Rectangular guide: `a` along z (height), `b` along y (width), `length` along x.
struct WaveguideGeometry {
  double a = 0.0;
  double b = 0.0;
  double length = 0.0;
};

struct Wavenumbers {
  double omega;
  double k0;
  double k;
  double kx; // TE10 propagation constant
};

/// Throws CutoffError when TE10 does not propagate.
Wavenumbers derive_wavenumbers(const Medium &medium, const WaveguideGeometry &geometry);

struct SlotLayout {
  std::vector<Vec3> positions; // global coordinates, metres
  std::vector<int> waveguide_index;
  double dipole_length = 1.0;
  Complex y_rad{0.0, 0.0};

  std::size_t size() const { return positions.size(); }
};

struct Load {
  Complex admittance;
};
struct Short {};
using Termination = std::variant<Load, Short>;

inline bool is_short(const Termination &t) { return std::holds_alternative<Short>(t); }

struct PortSpec {
  Complex y_generator{1.0, 0.0};
  Termination termination = Short{};
};

struct DeviceLayout {
  std::vector<Vec3> positions;
  Complex y_device{1.0, 0.0};

  std::size_t size() const { return positions.size(); }
};

struct DmaDesign {
  Medium medium{2.4e9, 1.0};
  WaveguideGeometry geometry;
  SlotLayout slots;
  PortSpec ports;
  int num_waveguides = 1;

  /// Throws InvalidDesign on the first violated invariant.
  void validate() const;

  std::size_t num_slots() const { return slots.size(); }
  /// Global position of the local origin of waveguide `w`. Guides are stacked along z.
  Vec3 waveguide_origin(int w) const { return Vec3(0.0, 0.0, w * geometry.a); }
};

Vec3 port1_local(const WaveguideGeometry &g);
Vec3 port2_local(const WaveguideGeometry &g);

/// Maps a global point into the frame of waveguide `w`; throws OutOfWaveguide if the
/// result leaves 0 < x <= L, 0 < y <= b, 0 < z <= a.
Vec3 local_coords(const Vec3 &global, int waveguide, const DmaDesign &design);
Vec3 global_coords(const Vec3 &local, int waveguide, const DmaDesign &design);

struct ModeDiagnostic {
  std::string mode;  // "TE10", "TE20", "TE01"
  double cutoff_k;   // rad/m
  double k;          // rad/m
  std::string message;
};

struct SingleModeReport {
  bool ok = true;
  std::vector<ModeDiagnostic> violations;
};

/// ok iff TE10 propagates and TE20 / TE01 are evanescent. A cut-off TE10 raises
/// CutoffError (the design cannot be evaluated at all).
SingleModeReport validate_single_mode(const DmaDesign &design);

} // namespace dmafas
