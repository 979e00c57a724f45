#pragma once

#include <array>
#include <cmath>
#include <functional>

namespace dmafas {

struct NelderMeadResult {
  std::array<double, 2> x{};
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
};

struct NelderMeadOptions {
  double initial_step = 0.5;
  double x_tolerance = 1e-10; // simplex diameter relative to max(1, |x|)
  int max_iterations = 4000;
  int stall_window = 200;
  double stall_improvement = 1e-10;
};

/// Two-parameter Nelder-Mead with the standard reflection, expansion,
/// contraction and shrink coefficients (1, 2, 1/2, 1/2).
inline NelderMeadResult nelder_mead_2d(const std::function<double(const std::array<double, 2> &)> &f,
                                       std::array<double, 2> start,
                                       const NelderMeadOptions &opt = {}) {
  using P = std::array<double, 2>;
  std::array<P, 3> s{start, start, start};
  s[1][0] += opt.initial_step;
  s[2][1] += opt.initial_step;
  std::array<double, 3> v{f(s[0]), f(s[1]), f(s[2])};
  auto lerp = [](const P &a, const P &b, double t) {
    return P{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };
  NelderMeadResult r;
  double window_best = INFINITY;
  int window_start = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    r.iterations = it;
    // Order best to worst.
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2 - i; ++j)
        if (v[j + 1] < v[j]) {
          std::swap(v[j], v[j + 1]);
          std::swap(s[j], s[j + 1]);
        }
    double diam = 0.0;
    for (int i = 1; i < 3; ++i)
      diam = std::max(diam, std::hypot(s[i][0] - s[0][0], s[i][1] - s[0][1]));
    const double scale = std::max(1.0, std::hypot(s[0][0], s[0][1]));
    if (diam <= opt.x_tolerance * scale) {
      r.converged = true;
      break;
    }
    if (it - window_start >= opt.stall_window) {
      if (window_best - v[0] <= opt.stall_improvement * std::abs(window_best)) {
        r.stalled = true;
        break;
      }
      window_best = v[0];
      window_start = it;
    }
    if (it == 0)
      window_best = v[0];

    const P c = lerp(s[0], s[1], 0.5);
    const P xr = lerp(c, s[2], -1.0);
    const double fr = f(xr);
    if (fr < v[0]) {
      const P xe = lerp(c, s[2], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        s[2] = xe;
        v[2] = fe;
      } else {
        s[2] = xr;
        v[2] = fr;
      }
    } else if (fr < v[1]) {
      s[2] = xr;
      v[2] = fr;
    } else {
      const bool outside = fr < v[2];
      const P xc = outside ? lerp(c, xr, 0.5) : lerp(c, s[2], 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : v[2])) {
        s[2] = xc;
        v[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          s[i] = lerp(s[0], s[i], 0.5);
          v[i] = f(s[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (v[i] < v[best])
      best = i;
  r.x = s[best];
  r.value = v[best];
  return r;
}

} // namespace dmafas
