#pragma once

#include <utility>
#include <vector>

#include "dsqw/common.hpp"

namespace dsqw::lattice {

// Quasienergy pair at one momentum; e_plus = -e_minus in (-pi, pi].
struct BandPair {
  double k = 0.0;
  double e_minus = 0.0;
  double e_plus = 0.0;
};

// Single-step Bloch operator with the half-step gauge:
//   [ cos(theta) e^{i(phi_m - k/2)}   i sin(theta) e^{i(phi_m - k/2)} ]
//   [ i sin(theta) e^{i k/2}          cos(theta) e^{i k/2}            ]
Matrix2cd step_operator_k(double theta, double phi_m, double k);

// Two-step Bloch operator U_2(theta2, -phi) * U_1(theta1, +phi).
Matrix2cd floquet_operator_k(const ProtocolParams& p, double k);

// Closed-form quasienergies E = +-acos[cos(theta1)cos(theta2)cos(k)
// - sin(theta1)sin(theta2)cos(phi)], argument clamped to [-1, 1] within 1e-12.
BandPair quasienergies(const ProtocolParams& p, double k);

// Decoherence-free momenta k = phi + (2p+1)pi folded into (-pi, pi].
// There is exactly one such momentum per zone.
std::vector<double> dfs_momenta(double phi);

// Block-tridiagonal operator on 2*n coarse amplitudes (2x2 blocks).
// Periodic operators carry wrap blocks (0, n-1) and (n-1, 0).
class BlockTridiagonal {
 public:
  BlockTridiagonal() = default;
  BlockTridiagonal(int n_blocks, bool periodic);

  int blocks() const { return n_; }
  int dim() const { return 2 * n_; }
  bool periodic() const { return periodic_; }

  // Block (j, j).
  Matrix2cd& diag(int j) { return diag_[static_cast<size_t>(j)]; }
  const Matrix2cd& diag(int j) const { return diag_[static_cast<size_t>(j)]; }
  // Block (j, j+1); for periodic operators j = n-1 addresses the wrap block (n-1, 0).
  Matrix2cd& upper(int j) { return upper_[static_cast<size_t>(j)]; }
  const Matrix2cd& upper(int j) const { return upper_[static_cast<size_t>(j)]; }
  // Block (j+1, j); for periodic operators j = n-1 addresses the wrap block (0, n-1).
  Matrix2cd& lower(int j) { return lower_[static_cast<size_t>(j)]; }
  const Matrix2cd& lower(int j) const { return lower_[static_cast<size_t>(j)]; }

  int n_offdiag() const { return periodic_ ? n_ : n_ - 1; }

  MatrixXcd dense() const;
  VectorXcd apply(const VectorXcd& x) const;          // this * x
  MatrixXcd apply_left(const MatrixXcd& m) const;     // this * m
  MatrixXcd apply_right_adjoint(const MatrixXcd& m) const;  // m * this^dagger
  double max_abs() const;

  BlockTridiagonal& operator+=(const BlockTridiagonal& other);
  BlockTridiagonal& operator*=(complexd s);

 private:
  int n_ = 0;
  bool periodic_ = false;
  std::vector<Matrix2cd> diag_, upper_, lower_;
};

// Composed one-period operator in the coarse real-space basis. Open boundaries
// terminate with total-reflection mirrors (see step_operators_real).
BlockTridiagonal floquet_operator_real(const ProtocolParams& p);

// Single-step operators (U1, U2) with U2 * U1 == floquet_operator_real.
// Register convention: the step-1 coin is block diagonal (the beta register of
// the intermediate state holds the pulse one fine position to the left); step 2
// pairs (alpha_j, beta_{j+1}) and carries the block shifts. At open boundaries
// the unpaired registers reflect with factor i (a theta = pi/2 mirror coin),
// picking up the alpha-row phase where the alpha slot is written.
std::pair<BlockTridiagonal, BlockTridiagonal> step_operators_real(const ProtocolParams& p);

// Same operators with the step angle displaced by tau (noise realization).
BlockTridiagonal noisy_floquet_real(const ProtocolParams& p, double tau1, double tau2);
BlockTridiagonal noisy_step_real(const ProtocolParams& p, int which, double tau);

// Unitary DFT on the coarse lattice, F (2n x 2n), mapping site blocks to
// momentum blocks at k_q = fold(2 pi q / n): (F psi)_{q} = sum_j e^{-i k_q j} psi_j / sqrt(n).
MatrixXcd block_dft_matrix(int n_blocks);
double grid_momentum(int n_blocks, int q);

}  // namespace dsqw::lattice
