#include "dmafas/greens.hpp"

#include <cmath>
#include <sstream>

namespace dmafas {

using constants::pi;

GreensContext::GreensContext(const Medium &medium, const WaveguideGeometry &geometry)
    : a_(geometry.a), b_(geometry.b), length_(geometry.length) {
  const auto wn = derive_wavenumbers(medium, geometry);
  k_ = wn.k;
  kx_ = wn.kx;
}

double gw_finite(const Vec3 &rn, const Vec3 &rp, const GreensContext &ctx) {
  const double kx = ctx.kx();
  const double L = ctx.length();
  const double s = std::sin(kx * L);
  if (std::abs(s) < GreensContext::resonance_tolerance) {
    std::ostringstream os;
    os << "waveguide resonance: sin(kx L) = " << s << " (kx L = " << kx * L << ")";
    throw ResonanceError(os.str());
  }
  const double transverse = std::sin(pi * rn.z() / ctx.a()) * std::sin(pi * rp.z() / ctx.a());
  const double k2 = ctx.k() * ctx.k();
  const double scale = -kx * transverse / (ctx.a() * ctx.b() * k2 * s);
  return scale * (std::cos(kx * (rp.x() + rn.x() - L)) +
                  std::cos(kx * (L - std::abs(rn.x() - rp.x()))));
}

Complex gw_semi_infinite(const Vec3 &rn, const Vec3 &rp, const GreensContext &ctx) {
  const double kx = ctx.kx();
  const double transverse = std::sin(pi * rn.z() / ctx.a()) * std::sin(pi * rp.z() / ctx.a());
  const double k2 = ctx.k() * ctx.k();
  // Wall image plus direct outgoing wave.
  const Complex waves = std::exp(Complex(0.0, -kx * (rn.x() + rp.x()))) +
                        std::exp(Complex(0.0, -kx * std::abs(rn.x() - rp.x())));
  return Complex(0.0, -kx * transverse / (ctx.a() * ctx.b() * k2)) * waves;
}

Complex ga_zz(const Vec3 &r, const Vec3 &rp, double k0) {
  const Vec3 d = r - rp;
  const double R = d.norm();
  if (R < coincidence_tolerance)
    throw CoincidentPoints("free-space kernel evaluated at coincident points");
  const double R2 = R * R;
  const double dz2 = d.z() * d.z();
  const double p = R2 - 3.0 * dz2;
  const Complex poly((R2 - dz2) / R2 - p / (R2 * R2 * k0 * k0), -p / (R2 * R * k0));
  return poly * std::exp(Complex(0.0, -k0 * R)) / (4.0 * pi * R);
}

double ga_zz_imag_coincident(double k0) { return -k0 / (6.0 * pi); }

CVec3 ga_dyadic_z(const Vec3 &r, const Vec3 &rp, double k0) {
  const Vec3 d = r - rp;
  const double R = d.norm();
  if (R < coincidence_tolerance)
    throw CoincidentPoints("free-space dyadic evaluated at coincident points");
  const Vec3 u = d / R;
  const double kr = k0 * R;
  // grad grad^T (e^{-ikR}/R) / k0^2 = g [ (-1 + 3i/kr + 3/kr^2) u u^T + (-i/kr - 1/kr^2) I ]
  const Complex c_identity(1.0 - 1.0 / (kr * kr), -1.0 / kr);
  const Complex c_radial(-1.0 + 3.0 / (kr * kr), 3.0 / kr);
  const Complex g = std::exp(Complex(0.0, -kr)) / (4.0 * pi * R);
  CVec3 out;
  for (int i = 0; i < 3; ++i) {
    const double delta = (i == 2) ? 1.0 : 0.0;
    out[i] = g * (c_identity * delta + c_radial * u[i] * u.z());
  }
  return out;
}

Complex ga_zz_far(const Vec3 &r, const Vec3 &rp, double k0) {
  const Vec3 d = r - rp;
  const double R = d.norm();
  if (R < coincidence_tolerance)
    throw CoincidentPoints("free-space kernel evaluated at coincident points");
  const double obliquity = (R * R - d.z() * d.z()) / (R * R);
  return obliquity * std::exp(Complex(0.0, -k0 * R)) / (4.0 * pi * R);
}

} // namespace dmafas
