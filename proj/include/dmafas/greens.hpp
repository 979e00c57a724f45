#pragma once

#include "dmafas/core.hpp"

namespace dmafas {

/// Cached wavenumbers and dimensions for the TE10 waveguide kernels.
class GreensContext {
public:
  GreensContext(const Medium &medium, const WaveguideGeometry &geometry);

  double k() const { return k_; }
  double kx() const { return kx_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double length() const { return length_; }

  /// |sin(kx L)| below this makes the finite-guide kernel singular.
  static constexpr double resonance_tolerance = 1e-9;

private:
  double k_, kx_, a_, b_, length_;
};

/// Separation below which two dipoles are treated as the same point (metres).
inline constexpr double coincidence_tolerance = 1e-9;

/// z-to-z TE10 kernel of a guide closed by metallic walls at x = 0 and x = L.
/// Arguments are local coordinates. Real for a propagating mode.
double gw_finite(const Vec3 &rn, const Vec3 &rp, const GreensContext &ctx);

/// Same kernel for a guide closed at x = 0 and matched (outgoing waves only) towards
/// +x. Independent of the guide length.
Complex gw_semi_infinite(const Vec3 &rn, const Vec3 &rp, const GreensContext &ctx);

/// z-to-z component of the free-space dyadic Green's function.
Complex ga_zz(const Vec3 &r, const Vec3 &rp, double k0);

/// lim Im{ga_zz(r, r')} as r' -> r, i.e. -k0 / (6 pi).
double ga_zz_imag_coincident(double k0);

/// Full free-space dyadic applied to z-hat, (I + grad grad^T / k0^2) e^{-ik0R}/(4 pi R) z.
CVec3 ga_dyadic_z(const Vec3 &r, const Vec3 &rp, double k0);

/// Leading 1/R term of ga_zz: obliquity (R^2 - dz^2)/R^2 times e^{-ik0R}/(4 pi R).
Complex ga_zz_far(const Vec3 &r, const Vec3 &rp, double k0);

} // namespace dmafas
