#include "dsqw/lattice.hpp"

#include <cmath>

namespace dsqw::lattice {

namespace {

// Coin applied at one fine-lattice position: alpha row carries the phase.
Matrix2cd coin(double theta, double phi_m) {
  const complexd ph = std::exp(iunit * phi_m);
  Matrix2cd c;
  c << std::cos(theta) * ph, iunit * std::sin(theta) * ph,
       iunit * std::sin(theta), std::cos(theta);
  return c;
}

// Step-2 skeleton: shifts plus mirror terminations, before composing with the
// step-1 coin. Entries depend on (theta2 + tau) except the two mirror entries.
BlockTridiagonal step2_skeleton(const ProtocolParams& p, double theta2) {
  const int n = p.n_sites;
  const bool per = p.boundary == Boundary::Periodic;
  BlockTridiagonal u(n, per);
  const double c2 = std::cos(theta2), s2 = std::sin(theta2);
  const complexd phm = std::exp(-iunit * p.phi);
  for (int j = 0; j < n; ++j) {
    u.diag(j)(0, 1) = iunit * s2 * phm;  // alpha_j <- beta_j
    u.diag(j)(1, 0) = iunit * s2;        // beta_j <- alpha_j
  }
  for (int j = 0; j < u.n_offdiag(); ++j) {
    u.lower(j)(0, 0) = c2 * phm;  // alpha_{j+1} <- alpha_j
    u.upper(j)(1, 1) = c2;        // beta_j <- beta_{j+1}
  }
  if (!per) {
    // Total-reflection mirrors: the unpaired edge registers cross with factor i
    // independent of the coin angle (and hence of the noise).
    u.diag(0)(0, 1) = iunit * phm;
    u.diag(n - 1)(1, 0) = iunit;
  }
  return u;
}

BlockTridiagonal compose_with_coin(BlockTridiagonal u2, const Matrix2cd& c1) {
  // Step 1 is block diagonal, so right-multiplying every stored block keeps
  // the tridiagonal structure.
  for (int j = 0; j < u2.blocks(); ++j) u2.diag(j) = u2.diag(j) * c1;
  for (int j = 0; j < u2.n_offdiag(); ++j) {
    u2.upper(j) = u2.upper(j) * c1;
    u2.lower(j) = u2.lower(j) * c1;
  }
  return u2;
}

}  // namespace

Matrix2cd step_operator_k(double theta, double phi_m, double k) {
  const complexd a = std::exp(iunit * (phi_m - 0.5 * k));
  const complexd b = std::exp(iunit * (0.5 * k));
  Matrix2cd u;
  u << std::cos(theta) * a, iunit * std::sin(theta) * a,
       iunit * std::sin(theta) * b, std::cos(theta) * b;
  return u;
}

Matrix2cd floquet_operator_k(const ProtocolParams& p, double k) {
  return step_operator_k(p.theta2, -p.phi, k) * step_operator_k(p.theta1, p.phi, k);
}

BandPair quasienergies(const ProtocolParams& p, double k) {
  double c = std::cos(p.theta1) * std::cos(p.theta2) * std::cos(k) -
             std::sin(p.theta1) * std::sin(p.theta2) * std::cos(p.phi);
  if (std::abs(c) > 1.0 + 1e-12)
    throw std::runtime_error("quasienergy argument outside [-1,1]: " + std::to_string(c));
  c = std::clamp(c, -1.0, 1.0);
  BandPair b;
  b.k = k;
  b.e_plus = std::acos(c);
  b.e_minus = -b.e_plus;
  return b;
}

std::vector<double> dfs_momenta(double phi) {
  // k = phi + (2p+1)pi collapses to a single momentum per zone.
  return {fold_angle(phi + pi)};
}

BlockTridiagonal::BlockTridiagonal(int n_blocks, bool periodic)
    : n_(n_blocks), periodic_(periodic) {
  if (n_blocks < 2) throw std::invalid_argument("BlockTridiagonal needs >= 2 blocks");
  diag_.assign(static_cast<size_t>(n_), Matrix2cd::Zero());
  const size_t m = static_cast<size_t>(periodic_ ? n_ : n_ - 1);
  upper_.assign(m, Matrix2cd::Zero());
  lower_.assign(m, Matrix2cd::Zero());
}

MatrixXcd BlockTridiagonal::dense() const {
  MatrixXcd m = MatrixXcd::Zero(dim(), dim());
  for (int j = 0; j < n_; ++j) m.block<2, 2>(2 * j, 2 * j) = diag_[static_cast<size_t>(j)];
  for (int j = 0; j < n_offdiag(); ++j) {
    const int jn = (j + 1) % n_;
    m.block<2, 2>(2 * j, 2 * jn) += upper_[static_cast<size_t>(j)];
    m.block<2, 2>(2 * jn, 2 * j) += lower_[static_cast<size_t>(j)];
  }
  return m;
}

VectorXcd BlockTridiagonal::apply(const VectorXcd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("BlockTridiagonal::apply size mismatch");
  VectorXcd y = VectorXcd::Zero(dim());
  for (int j = 0; j < n_; ++j)
    y.segment<2>(2 * j) = diag_[static_cast<size_t>(j)] * x.segment<2>(2 * j);
  for (int j = 0; j < n_offdiag(); ++j) {
    const int jn = (j + 1) % n_;
    y.segment<2>(2 * j) += upper_[static_cast<size_t>(j)] * x.segment<2>(2 * jn);
    y.segment<2>(2 * jn) += lower_[static_cast<size_t>(j)] * x.segment<2>(2 * j);
  }
  return y;
}

MatrixXcd BlockTridiagonal::apply_left(const MatrixXcd& m) const {
  if (m.rows() != dim()) throw std::invalid_argument("BlockTridiagonal::apply_left size mismatch");
  MatrixXcd y = MatrixXcd::Zero(m.rows(), m.cols());
  for (int j = 0; j < n_; ++j)
    y.middleRows<2>(2 * j) = diag_[static_cast<size_t>(j)] * m.middleRows<2>(2 * j);
  for (int j = 0; j < n_offdiag(); ++j) {
    const int jn = (j + 1) % n_;
    y.middleRows<2>(2 * j) += upper_[static_cast<size_t>(j)] * m.middleRows<2>(2 * jn);
    y.middleRows<2>(2 * jn) += lower_[static_cast<size_t>(j)] * m.middleRows<2>(2 * j);
  }
  return y;
}

MatrixXcd BlockTridiagonal::apply_right_adjoint(const MatrixXcd& m) const {
  if (m.cols() != dim())
    throw std::invalid_argument("BlockTridiagonal::apply_right_adjoint size mismatch");
  MatrixXcd y = MatrixXcd::Zero(m.rows(), m.cols());
  // (m * U^dagger) column block r collects every stored block U_{r,c}.
  for (int j = 0; j < n_; ++j)
    y.middleCols<2>(2 * j) = m.middleCols<2>(2 * j) * diag_[static_cast<size_t>(j)].adjoint();
  for (int j = 0; j < n_offdiag(); ++j) {
    const int jn = (j + 1) % n_;
    y.middleCols<2>(2 * j) += m.middleCols<2>(2 * jn) * upper_[static_cast<size_t>(j)].adjoint();
    y.middleCols<2>(2 * jn) += m.middleCols<2>(2 * j) * lower_[static_cast<size_t>(j)].adjoint();
  }
  return y;
}

double BlockTridiagonal::max_abs() const {
  double m = 0.0;
  for (const auto& b : diag_) m = std::max(m, b.cwiseAbs().maxCoeff());
  for (const auto& b : upper_) m = std::max(m, b.cwiseAbs().maxCoeff());
  for (const auto& b : lower_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

BlockTridiagonal& BlockTridiagonal::operator+=(const BlockTridiagonal& other) {
  if (other.n_ != n_ || other.periodic_ != periodic_)
    throw std::invalid_argument("BlockTridiagonal shape mismatch");
  for (size_t i = 0; i < diag_.size(); ++i) diag_[i] += other.diag_[i];
  for (size_t i = 0; i < upper_.size(); ++i) upper_[i] += other.upper_[i];
  for (size_t i = 0; i < lower_.size(); ++i) lower_[i] += other.lower_[i];
  return *this;
}

BlockTridiagonal& BlockTridiagonal::operator*=(complexd s) {
  for (auto& b : diag_) b *= s;
  for (auto& b : upper_) b *= s;
  for (auto& b : lower_) b *= s;
  return *this;
}

BlockTridiagonal floquet_operator_real(const ProtocolParams& p) {
  return noisy_floquet_real(p, 0.0, 0.0);
}

std::pair<BlockTridiagonal, BlockTridiagonal> step_operators_real(const ProtocolParams& p) {
  validate_lattice(p);
  const int n = p.n_sites;
  const bool per = p.boundary == Boundary::Periodic;
  BlockTridiagonal u1(n, per);
  const Matrix2cd c1 = coin(p.theta1, p.phi);
  for (int j = 0; j < n; ++j) u1.diag(j) = c1;
  return {u1, step2_skeleton(p, p.theta2)};
}

BlockTridiagonal noisy_floquet_real(const ProtocolParams& p, double tau1, double tau2) {
  validate_lattice(p);
  return compose_with_coin(step2_skeleton(p, p.theta2 + tau2), coin(p.theta1 + tau1, p.phi));
}

BlockTridiagonal noisy_step_real(const ProtocolParams& p, int which, double tau) {
  validate_lattice(p);
  if (which == 1) {
    BlockTridiagonal u1(p.n_sites, p.boundary == Boundary::Periodic);
    const Matrix2cd c1 = coin(p.theta1 + tau, p.phi);
    for (int j = 0; j < p.n_sites; ++j) u1.diag(j) = c1;
    return u1;
  }
  if (which == 2) return step2_skeleton(p, p.theta2 + tau);
  throw std::invalid_argument("step index must be 1 or 2");
}

MatrixXcd block_dft_matrix(int n_blocks) {
  MatrixXcd f = MatrixXcd::Zero(2 * n_blocks, 2 * n_blocks);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n_blocks));
  for (int q = 0; q < n_blocks; ++q) {
    const double k = grid_momentum(n_blocks, q);
    for (int j = 0; j < n_blocks; ++j) {
      const complexd w = norm * std::exp(-iunit * (k * static_cast<double>(j)));
      f(2 * q, 2 * j) = w;
      f(2 * q + 1, 2 * j + 1) = w;
    }
  }
  return f;
}

double grid_momentum(int n_blocks, int q) {
  return fold_angle(2.0 * pi * static_cast<double>(q) / static_cast<double>(n_blocks));
}

}  // namespace dsqw::lattice
