#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dmafas/fama.hpp"
#include "support.hpp"

using namespace dmafas;

namespace {

FamaScenario scenario(const CMat &g, const CMat &sy, int users, std::int64_t trials) {
  FamaScenario s;
  s.label = "t";
  s.g = g;
  s.sigma_y = sy;
  s.num_users = users;
  s.num_trials = trials;
  s.seed = 99;
  s.thresholds_db = {-10, -5, 0, 5, 10, 15};
  return s;
}

// P(|a|^2 < t sum_{i<M-1} |b_i|^2) for independent unit exponentials.
double single_port_outage(double t, int users) { return 1.0 - std::pow(1.0 + t, -(users - 1)); }

} // namespace

TEST_CASE("SIR of a hand-computed case") {
  CMat g(2, 2);
  g << 1, 0, 0, 1;
  CVec yd(2), y1(2), y2(2);
  yd << 2, 1;
  y1 << 1, 0;
  y2 << 0, Complex(0, 2);
  const RVec s = sir(g, yd, {y1, y2});
  CHECK(s[0] == doctest::Approx(4.0));
  CHECK(s[1] == doctest::Approx(0.25));
  CHECK_THROWS_AS(sir(g, yd, {}), NoInterferers);
}

TEST_CASE("port selection breaks ties toward the smallest index") {
  RVec v(4);
  v << 1, 3, 3, 2;
  CHECK(select_port(v) == 1);
}

TEST_CASE("one configuration: outage equals the exponential-ratio law") {
  CMat g(1, 2);
  g << Complex(0.3, 0.1), Complex(-0.2, 0.5);
  const CMat sy = CMat::Identity(2, 2) * 3.0;
  for (int users : {2, 3}) {
    const auto c = outage_curve(scenario(g, sy, users, 20000));
    CHECK(c.samples == 20000 * users);
    for (std::size_t i = 0; i < c.thresholds_db.size(); ++i) {
      const double t = std::pow(10.0, c.thresholds_db[i] / 10.0);
      const double expect = single_port_outage(t, users);
      CHECK(std::abs(c.outage[i] - expect) <= 4 * std::max(c.std_error[i], 1e-4));
    }
  }
}

TEST_CASE("independent ports: outage is the single-port law to the power U") {
  const int U = 4;
  const auto c = outage_curve(scenario(CMat::Identity(U, U), CMat::Identity(U, U), 3, 20000));
  for (std::size_t i = 0; i < c.thresholds_db.size(); ++i) {
    const double t = std::pow(10.0, c.thresholds_db[i] / 10.0);
    const double expect = std::pow(single_port_outage(t, 3), U);
    CHECK(std::abs(c.outage[i] - expect) <= 4 * std::max(c.std_error[i], 1e-4));
  }
}

TEST_CASE("fully correlated ports behave like a single port") {
  CMat g = CMat::Ones(3, 1);
  const auto c = outage_curve(scenario(g, CMat::Identity(1, 1), 3, 20000));
  for (std::size_t i = 0; i < c.thresholds_db.size(); ++i) {
    const double t = std::pow(10.0, c.thresholds_db[i] / 10.0);
    CHECK(std::abs(c.outage[i] - single_port_outage(t, 3)) <= 4 * std::max(c.std_error[i], 1e-4));
  }
}

TEST_CASE("seed reproducibility and scale invariance") {
  const CMat g = CMat::Random(3, 4);
  const CMat sy = CMat::Identity(4, 4);
  const auto a = outage_curve(scenario(g, sy, 3, 5000));
  const auto b = outage_curve(scenario(g, sy, 3, 5000));
  CHECK(a.outage == b.outage);
  CHECK(a.sorted_sir_db == b.sorted_sir_db);
  auto s = scenario(g, sy, 3, 5000);
  s.seed = 100;
  CHECK(outage_curve(s).sorted_sir_db != a.sorted_sir_db);
  const auto scaled = outage_curve(scenario(g * 5.0, sy * 7.0, 3, 5000));
  for (std::size_t i = 0; i < a.outage.size(); ++i)
    CHECK(scaled.outage[i] == doctest::Approx(a.outage[i]));
}

TEST_CASE("outage curve statistics") {
  const auto c = outage_curve(scenario(CMat::Identity(2, 2), CMat::Identity(2, 2), 3, 4000));
  for (std::size_t i = 0; i < c.outage.size(); ++i) {
    if (i)
      CHECK(c.outage[i] >= c.outage[i - 1]);
    const double p = c.outage[i];
    CHECK(c.std_error[i] == doctest::Approx(std::sqrt(p * (1 - p) / c.samples)));
    CHECK(c.ci_halfwidth[i] == doctest::Approx(1.96 * c.std_error[i]));
  }
  CHECK(std::is_sorted(c.sorted_sir_db.begin(), c.sorted_sir_db.end()));
  const double t50 = c.threshold_at(0.5);
  const auto below = std::lower_bound(c.sorted_sir_db.begin(), c.sorted_sir_db.end(), t50) -
                     c.sorted_sir_db.begin();
  CHECK(std::abs(double(below) / c.samples - 0.5) < 0.01);
}

TEST_CASE("aperture positions and ideal baseline") {
  const auto d = make_linear_dma(steering_params());
  const auto p = aperture_positions(d, 5);
  REQUIRE(p.size() == 5);
  CHECK(p.front().x() == doctest::Approx(d.slots.positions.front().x()));
  CHECK(p.back().x() == doctest::Approx(d.slots.positions.back().x()));
  const auto full = aperture_positions(d, 3, true);
  CHECK(full.front().x() == doctest::Approx(0.0));
  CHECK(full.back().x() == doctest::Approx(d.geometry.length));
  FamaScenario base;
  base.seed = 4;
  const auto s = ideal_fas_baseline(p, d.medium.k0(), 1.0, base);
  CHECK(s.g.isApprox(CMat::Identity(5, 5)));
  CHECK(s.sigma_y(2, 2).real() == doctest::Approx(4.0 / 9.0));
  CHECK(s.seed == 4);
}

TEST_CASE("outage CSV layout") {
  const auto c = outage_curve(scenario(CMat::Identity(2, 2), CMat::Identity(2, 2), 2, 500));
  const auto path = std::filesystem::temp_directory_path() / "dmafas_outage.csv";
  write_outage_csv(path, {c});
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "gamma_th_db,outage,ci_halfwidth,baseline_label");
  std::filesystem::remove(path);
}
