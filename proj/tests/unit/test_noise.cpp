#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "dsqw/noise.hpp"

using namespace dsqw;
using noise::TrigMoment;

namespace {

noise::NoiseSpec spec(noise::Distribution d, double sigma, noise::Schedule sch,
                      std::uint64_t seed = 0) {
  noise::NoiseSpec s;
  s.distribution = d;
  s.sigma = sigma;
  s.schedule = sch;
  s.master_seed = seed;
  return s;
}

}  // namespace

TEST_CASE("sampling is reproducible and independent across trajectories") {
  const auto s = spec(noise::Distribution::Gaussian, 0.3, noise::Schedule::PerStep, 42);
  const auto a = noise::sample_sequence(s, 16, 7);
  const auto b = noise::sample_sequence(s, 16, 7);
  CHECK(a == b);
  CHECK(a.size() == 16);
  const auto c = noise::sample_sequence(s, 16, 8);
  CHECK(a != c);
  auto s2 = s;
  s2.master_seed = 43;
  CHECK(noise::sample_sequence(s2, 16, 7) != a);
}

TEST_CASE("stroboscopic scheduling repeats one draw across each period") {
  const auto s = spec(noise::Distribution::Uniform, 0.5, noise::Schedule::Stroboscopic, 9);
  const auto taus = noise::sample_sequence(s, 20, 3);
  REQUIRE(taus.size() == 20);
  for (int m = 0; m < 20; m += 2) {
    CHECK(taus[static_cast<size_t>(m)] == taus[static_cast<size_t>(m + 1)]);
    if (m > 0) CHECK(taus[static_cast<size_t>(m)] != taus[static_cast<size_t>(m - 1)]);
  }
}

TEST_CASE("no schedule means zero displacements") {
  const auto s = spec(noise::Distribution::Gaussian, 0.7, noise::Schedule::None, 1);
  for (const double t : noise::sample_sequence(s, 12, 5)) CHECK(t == 0.0);
}

TEST_CASE("sample statistics follow the requested distribution") {
  const long n = 4000;
  const auto sg = spec(noise::Distribution::Gaussian, 0.5, noise::Schedule::PerStep, 2024);
  double sum = 0.0, sq = 0.0;
  for (long t = 0; t < n; ++t)
    for (const double x : noise::sample_sequence(sg, 8, static_cast<std::uint64_t>(t))) {
      sum += x;
      sq += x * x;
    }
  const double m = sum / (8 * n), v = sq / (8 * n) - m * m;
  CHECK(std::abs(m) < 3.0 * 0.5 / std::sqrt(8.0 * n));
  CHECK(std::abs(v / 0.25 - 1.0) < 0.05);

  const auto su = spec(noise::Distribution::Uniform, 0.8, noise::Schedule::PerStep, 2025);
  double lo = 1e9, hi = -1e9, usq = 0.0;
  for (long t = 0; t < n; ++t)
    for (const double x : noise::sample_sequence(su, 8, static_cast<std::uint64_t>(t))) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      usq += x * x;
    }
  CHECK(lo >= -0.4);
  CHECK(hi <= 0.4);
  CHECK(std::abs(usq / (8 * n) / (0.8 * 0.8 / 12.0) - 1.0) < 0.05);
}

TEST_CASE("gaussian closed forms and their limits") {
  const auto c0 = noise::gamma_coefficients(0.0);
  CHECK(c0.moment(TrigMoment::Cos) == 1.0);
  CHECK(c0.moment(TrigMoment::Cos4) == 1.0);
  CHECK(c0.moment(TrigMoment::Sin2) == 0.0);
  CHECK(c0.gamma_plus == 0.0);

  const auto c = noise::gamma_coefficients(0.3);
  CHECK(std::abs(c.moment(TrigMoment::Cos) - 0.95599748183309991) < 1e-15);
  CHECK(std::abs(c.moment(TrigMoment::Sin2Cos2) - 0.064155968005003544) < 1e-15);
  CHECK(c.moment(TrigMoment::Sin) == 0.0);
  CHECK(c.moment(TrigMoment::SinCos) == 0.0);
  CHECK(c.gamma_plus == c.moment(TrigMoment::Sin2));
  CHECK(c.gamma_pp == c.moment(TrigMoment::Sin4));
  CHECK(c.gamma_mm == c.moment(TrigMoment::Sin2Cos2));
}

TEST_CASE("moment identities hold for both distributions") {
  for (const auto d : {noise::Distribution::Gaussian, noise::Distribution::Uniform}) {
    for (const double sigma : {0.1, 0.4, 1.1}) {
      const auto c = noise::coefficients_for(spec(d, sigma, noise::Schedule::PerStep));
      CHECK(std::abs(c.moment(TrigMoment::Cos2) + c.moment(TrigMoment::Sin2) - 1.0) < 1e-12);
      CHECK(std::abs(c.moment(TrigMoment::Cos4) + 2.0 * c.moment(TrigMoment::Sin2Cos2) +
                     c.moment(TrigMoment::Sin4) - 1.0) < 1e-12);
      CHECK(std::abs(c.moment(TrigMoment::Cos2) - c.moment(TrigMoment::Cos4) -
                     c.moment(TrigMoment::Sin2Cos2)) < 1e-12);
      CHECK(std::abs(c.moment(TrigMoment::Sin)) < 1e-12);
      CHECK(std::abs(c.moment(TrigMoment::SinCos)) < 1e-12);
    }
  }
}

TEST_CASE("uniform moments match the sinc forms") {
  const double s = 0.4 * pi;
  const auto c = noise::coefficients_for(spec(noise::Distribution::Uniform, s,
                                              noise::Schedule::Stroboscopic));
  CHECK(std::abs(c.moment(TrigMoment::Cos) - 0.93548928378863903) < 1e-10);
  CHECK(std::abs(c.moment(TrigMoment::Cos2) - 0.87841336432032849) < 1e-10);
  CHECK(std::abs(c.moment(TrigMoment::Sin2) - 0.12158663567967151) < 1e-10);
  CHECK(std::abs(c.moment(TrigMoment::Sin4) - 0.02582067579806648) < 1e-10);
}

TEST_CASE("quadrature agrees with the gaussian closed forms") {
  const auto s = spec(noise::Distribution::Gaussian, 0.3, noise::Schedule::PerStep);
  const auto c = noise::gamma_coefficients(0.3);
  for (int m = 0; m < noise::kNumMoments; ++m)
    CHECK(std::abs(c.moments[static_cast<size_t>(m)] -
                   noise::moment_quadrature(s, TrigMoment(m))) < 1e-10);
}

TEST_CASE("counter generator output lies in the unit interval and varies") {
  double lo = 1e9, hi = -1e9;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = noise::detail::uniform01(5, 7, i);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(hi - lo > 0.9);
  CHECK(noise::detail::counter_mix(1, 2, 3) != noise::detail::counter_mix(1, 2, 4));
  CHECK(noise::detail::counter_mix(1, 2, 3) != noise::detail::counter_mix(1, 3, 3));
}

TEST_CASE("negative width is rejected") {
  CHECK_THROWS_AS(noise::validate(spec(noise::Distribution::Gaussian, -0.1,
                                       noise::Schedule::PerStep)),
                  std::invalid_argument);
}
