#include "dsqw/noise.hpp"

#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dsqw::noise {

namespace detail {

namespace {
inline std::uint64_t mix64(std::uint64_t z) {
  // Stafford variant 13 finalizer.
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t counter_mix(std::uint64_t master_seed, std::uint64_t trajectory_id,
                          std::uint64_t counter) {
  std::uint64_t z = mix64(master_seed + 0x9E3779B97F4A7C15ull);
  z = mix64(z ^ (trajectory_id + 0xD1B54A32D192ED03ull));
  z = mix64(z ^ (counter + 0x8CB92BA72F3D8DD7ull));
  return z;
}

double uniform01(std::uint64_t master_seed, std::uint64_t trajectory_id, std::uint64_t counter) {
  // 53-bit mantissa, shifted into (0, 1] so log() stays finite.
  const std::uint64_t bits = counter_mix(master_seed, trajectory_id, counter) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace detail

namespace {

double draw(const NoiseSpec& spec, std::uint64_t trajectory_id, std::uint64_t sample_idx) {
  if (spec.distribution == Distribution::Uniform) {
    const double u = detail::uniform01(spec.master_seed, trajectory_id, 2 * sample_idx);
    return spec.sigma * (u - 0.5);
  }
  const double u1 = detail::uniform01(spec.master_seed, trajectory_id, 2 * sample_idx);
  const double u2 = detail::uniform01(spec.master_seed, trajectory_id, 2 * sample_idx + 1);
  return spec.sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

double moment_integrand(TrigMoment which, double t) {
  const double c = std::cos(t), s = std::sin(t);
  switch (which) {
    case TrigMoment::Cos: return c;
    case TrigMoment::Sin: return s;
    case TrigMoment::Cos2: return c * c;
    case TrigMoment::Sin2: return s * s;
    case TrigMoment::SinCos: return s * c;
    case TrigMoment::Cos3: return c * c * c;
    case TrigMoment::CosSin2: return c * s * s;
    case TrigMoment::Cos4: return c * c * c * c;
    case TrigMoment::Sin4: return s * s * s * s;
    case TrigMoment::Sin2Cos2: return s * s * c * c;
  }
  throw std::invalid_argument("unknown moment");
}

void fill_derived(CoefficientSet& c) {
  c.gamma_plus = c.moment(TrigMoment::Sin2);
  c.gamma_pp = c.moment(TrigMoment::Sin4);
  c.gamma_mm = c.moment(TrigMoment::Sin2Cos2);
}

}  // namespace

std::vector<double> sample_sequence(const NoiseSpec& spec, int n_steps,
                                    std::uint64_t trajectory_id) {
  validate(spec);
  if (n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
  std::vector<double> taus(static_cast<size_t>(n_steps), 0.0);
  if (spec.schedule == Schedule::None || spec.sigma == 0.0) return taus;
  for (int m = 0; m < n_steps; ++m) {
    const std::uint64_t idx = spec.schedule == Schedule::Stroboscopic
                                  ? static_cast<std::uint64_t>(m / 2)
                                  : static_cast<std::uint64_t>(m);
    if (spec.schedule == Schedule::Stroboscopic && (m % 2) == 1)
      taus[static_cast<size_t>(m)] = taus[static_cast<size_t>(m - 1)];
    else
      taus[static_cast<size_t>(m)] = draw(spec, trajectory_id, idx);
  }
  return taus;
}

CoefficientSet gamma_coefficients(double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  CoefficientSet c;
  c.sigma = sigma;
  c.distribution = Distribution::Gaussian;
  const double s2 = sigma * sigma;
  const double g1 = std::exp(-0.5 * s2);   // E[cos tau]
  const double g2 = std::exp(-2.0 * s2);   // E[cos 2tau]
  const double g3 = std::exp(-4.5 * s2);   // E[cos 3tau]
  const double g4 = std::exp(-8.0 * s2);   // E[cos 4tau]
  auto& m = c.moments;
  m[static_cast<int>(TrigMoment::Cos)] = g1;
  m[static_cast<int>(TrigMoment::Sin)] = 0.0;
  m[static_cast<int>(TrigMoment::Cos2)] = 0.5 * (1.0 + g2);
  m[static_cast<int>(TrigMoment::Sin2)] = 0.5 * (1.0 - g2);
  m[static_cast<int>(TrigMoment::SinCos)] = 0.0;
  m[static_cast<int>(TrigMoment::Cos3)] = 0.25 * (3.0 * g1 + g3);
  m[static_cast<int>(TrigMoment::CosSin2)] = 0.25 * (g1 - g3);
  m[static_cast<int>(TrigMoment::Cos4)] = 0.125 * (3.0 + 4.0 * g2 + g4);
  m[static_cast<int>(TrigMoment::Sin4)] = 0.125 * (3.0 - 4.0 * g2 + g4);
  m[static_cast<int>(TrigMoment::Sin2Cos2)] = 0.125 * (1.0 - g4);
  fill_derived(c);
  return c;
}

CoefficientSet coefficients_for(const NoiseSpec& spec) {
  validate(spec);
  if (spec.distribution == Distribution::Gaussian) return gamma_coefficients(spec.sigma);
  CoefficientSet c;
  c.sigma = spec.sigma;
  c.distribution = spec.distribution;
  for (int i = 0; i < kNumMoments; ++i)
    c.moments[static_cast<size_t>(i)] = moment_quadrature(spec, static_cast<TrigMoment>(i));
  fill_derived(c);
  return c;
}

double moment_quadrature(const NoiseSpec& spec, TrigMoment which) {
  validate(spec);
  constexpr double tol = 1e-12;
  constexpr double max_abs_err = 1e-10;
  if (spec.sigma == 0.0) return moment_integrand(which, 0.0);

  double lo, hi;
  std::function<double(double)> density;
  if (spec.distribution == Distribution::Uniform) {
    lo = -0.5 * spec.sigma;
    hi = 0.5 * spec.sigma;
    const double inv = 1.0 / spec.sigma;
    density = [inv](double) { return inv; };
  } else {
    // Integrand decays as exp(-t^2/(2 sigma^2)); 12 sigma leaves < 1e-31 mass.
    lo = -12.0 * spec.sigma;
    hi = 12.0 * spec.sigma;
    const double inv = 1.0 / (std::sqrt(2.0 * pi) * spec.sigma);
    const double s2 = spec.sigma * spec.sigma;
    density = [inv, s2](double t) { return inv * std::exp(-0.5 * t * t / s2); };
  }
  const auto f = [&](double t) { return density(t) * moment_integrand(which, t); };
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 12, tol, &err);
  if (!(err <= max_abs_err))
    throw std::runtime_error("moment quadrature did not reach 1e-10 absolute error");
  return value;
}

}  // namespace dsqw::noise
