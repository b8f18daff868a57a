#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dsqw {

using complexd = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector2cd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr complexd iunit{0.0, 1.0};

// Fold an angle into the principal zone (-pi, pi].
inline double fold_angle(double x) {
  double y = std::remainder(x, 2.0 * pi);
  if (y <= -pi) y += 2.0 * pi;
  return y;
}

enum class Boundary { Open, Periodic };

// Protocol parameters for the two-step walk: odd steps apply (theta1, +phi),
// even steps apply (theta2, -phi), with the phase acting on the alpha row only.
// n_sites counts coarse (one per period displacement) lattice sites; the real
// operators below act on 2*n_sites amplitudes ordered (alpha_0, beta_0, alpha_1, ...).
struct ProtocolParams {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double phi = 0.0;
  int n_sites = 2;
  Boundary boundary = Boundary::Open;
};

inline void validate_lattice(const ProtocolParams& p) {
  if (p.n_sites < 2)
    throw std::invalid_argument("n_sites must be >= 2, got " + std::to_string(p.n_sites));
}

// Thrown when a request would exceed the supported resource envelope; the CLI
// maps it to its own exit code rather than a generic failure.
struct ResourceRefusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dsqw
