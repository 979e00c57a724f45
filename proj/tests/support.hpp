#pragma once

// Independent transcriptions of the model formulas used as test oracles.

#include <cmath>
#include <complex>
#include <random>

#include "dmafas/admittance.hpp"
#include "dmafas/circuit.hpp"
#include "dmafas/designs.hpp"

namespace oracle {

using C = std::complex<double>;
constexpr double PI = 3.14159265358979323846;
constexpr double C0 = 299792458.0;
constexpr double EPS0 = 8.8541878128e-12;

struct Guide {
  double f, er, a, b, L;
  double om() const { return 2 * PI * f; }
  double k0() const { return om() / C0; }
  double k() const { return k0() * std::sqrt(er); }
  double kx() const { return std::sqrt(k() * k() - PI * PI / (a * a)); }
  double eps() const { return er * EPS0; }
};

inline Guide table1() { return {2.4e9, 3.55, 0.058, 0.0232, 0.475}; }

// Waveguide z-to-z kernel between (xn, zn) and (xp, zp).
inline double gw(const Guide &g, double xn, double zn, double xp, double zp) {
  const double kx = g.kx();
  return -kx * std::sin(PI * zn / g.a) * std::sin(PI * zp / g.a) /
         (g.a * g.b * g.k() * g.k() * std::sin(kx * g.L)) *
         (std::cos(kx * (xp + xn - g.L)) + std::cos(kx * (g.L - std::abs(xn - xp))));
}

// Same expression with a complex propagation constant, for damped-limit checks.
inline C gw_complex(double a, double b, double k, C kx, double L, double xn, double zn, double xp,
                    double zp) {
  return -kx * std::sin(PI * zn / a) * std::sin(PI * zp / a) / (a * b * k * k * std::sin(kx * L)) *
         (std::cos(kx * (xp + xn - L)) + std::cos(kx * (L - std::abs(xn - xp))));
}

// Free-space z-to-z kernel written from the polynomial form.
inline C ga(const double *r, const double *rp, double k0) {
  const double dx = r[0] - rp[0], dy = r[1] - rp[1], dz = r[2] - rp[2];
  const double R2 = dx * dx + dy * dy + dz * dz, R = std::sqrt(R2);
  const C j(0, 1);
  const C poly = (R2 - dz * dz) / R2 - j * (R2 - 3 * dz * dz) / (R2 * R * k0) -
                 (R2 - 3 * dz * dz) / (R2 * R2 * k0 * k0);
  return poly * std::exp(-j * k0 * R) / (4 * PI * R);
}

} // namespace oracle

namespace testing_support {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
inline double rel(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}
inline double rel(const dmafas::CMat &a, const dmafas::CMat &b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

inline dmafas::DiodeConfig random_config(std::size_t n, std::mt19937_64 &rng, int min_active = 1) {
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    std::vector<bool> r(n);
    int c = 0;
    for (std::size_t i = 0; i < n; ++i)
      c += (r[i] = coin(rng));
    if (c >= min_active)
      return dmafas::DiodeConfig(r);
  }
}

inline dmafas::CVec unit_current() {
  dmafas::CVec j(1);
  j[0] = 1.0;
  return j;
}

} // namespace testing_support
