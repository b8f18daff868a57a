#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dsqw/common.hpp"

namespace dsqw::noise {

enum class Distribution { Gaussian, Uniform };
enum class Schedule { None, PerStep, Stroboscopic };

// Gaussian sigma is the standard deviation; Uniform sigma is the full width,
// samples drawn from [-sigma/2, +sigma/2].
struct NoiseSpec {
  Distribution distribution = Distribution::Gaussian;
  double sigma = 0.0;
  Schedule schedule = Schedule::None;
  std::uint64_t master_seed = 0;
};

inline void validate(const NoiseSpec& s) {
  if (!(s.sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
}

// Per-step angle displacements tau_m for one trajectory, derived from
// (master_seed, trajectory_id, sample counter) alone so that any trajectory can
// be generated independently and in any order. Stroboscopic scheduling repeats
// one fresh sample across both steps of each period.
std::vector<double> sample_sequence(const NoiseSpec& spec, int n_steps,
                                    std::uint64_t trajectory_id);

enum class TrigMoment : int {
  Cos = 0,      // E[cos tau]
  Sin,          // E[sin tau]
  Cos2,         // E[cos^2 tau]
  Sin2,         // E[sin^2 tau]
  SinCos,       // E[sin tau cos tau]
  Cos3,         // E[cos^3 tau]
  CosSin2,      // E[cos tau sin^2 tau]
  Cos4,         // E[cos^4 tau]
  Sin4,         // E[sin^4 tau]
  Sin2Cos2,     // E[sin^2 tau cos^2 tau]
};
inline constexpr int kNumMoments = 10;

// Noise-averaged trigonometric moments plus the derived master-equation rates:
//   gamma_plus  = E[sin^2 tau]
//   gamma_pp    = E[sin^4 tau]
//   gamma_mm    = E[sin^2 tau cos^2 tau]
struct CoefficientSet {
  double sigma = 0.0;
  Distribution distribution = Distribution::Gaussian;
  std::array<double, kNumMoments> moments{};
  double gamma_plus = 0.0;
  double gamma_pp = 0.0;
  double gamma_mm = 0.0;

  double moment(TrigMoment m) const { return moments[static_cast<size_t>(static_cast<int>(m))]; }
};

// Gaussian closed forms, e.g. E[cos a*tau] = exp(-a^2 sigma^2 / 2).
CoefficientSet gamma_coefficients(double sigma);

// Closed forms for Gaussian noise, adaptive quadrature otherwise.
CoefficientSet coefficients_for(const NoiseSpec& spec);

// Single moment by adaptive quadrature against the spec's density
// (absolute error <= 1e-10, throws on non-convergence).
double moment_quadrature(const NoiseSpec& spec, TrigMoment which);

namespace detail {
// Counter-based generator used by sample_sequence; exposed for statistical tests.
std::uint64_t counter_mix(std::uint64_t master_seed, std::uint64_t trajectory_id,
                          std::uint64_t counter);
double uniform01(std::uint64_t master_seed, std::uint64_t trajectory_id, std::uint64_t counter);
}  // namespace detail

}  // namespace dsqw::noise
