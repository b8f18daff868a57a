#pragma once

#include <span>
#include <vector>

#include "dsqw/common.hpp"
#include "dsqw/noise.hpp"

namespace dsqw::traj {

// Pulse amplitudes over the fine lattice (one position per walk step of
// displacement). A protocol with N coarse sites uses 2N fine positions on a
// ring and 2N+1 with open boundaries (mirror positions at both extremes);
// coarse site j sits at fine position 2j+1.
struct StateVector {
  VectorXcd alpha, beta;
  int sites() const { return static_cast<int>(alpha.size()); }
  double norm2() const { return alpha.squaredNorm() + beta.squaredNorm(); }
};

enum class Ring { Alpha, Beta };
enum class RecordMode { Every, Stroboscopic };

int fine_sites(const ProtocolParams& p);
inline int coarse_to_fine(int j) { return 2 * j + 1; }

// Embed a coarse 2N-amplitude vector (alpha_0, beta_0, alpha_1, ...) on the
// fine lattice, and extract it back (exact at period boundaries).
StateVector embed_coarse(const ProtocolParams& p, const VectorXcd& coarse);
VectorXcd extract_coarse(const ProtocolParams& p, const StateVector& state);

// coarse_site = -1 selects the center site n_sites/2.
StateVector single_site_state(const ProtocolParams& p, int coarse_site, Ring ring);
// Plane wave over coarse sites (periodic boundary only).
StateVector bloch_state(const ProtocolParams& p, double k, const Vector2cd& spinor);

// One walk step: alpha moves right, beta moves left, mixed by the coin
//   alpha'_n = e^{i phi_m} [cos(theta) alpha_{n-1} + i sin(theta) beta_{n-1}]
//   beta'_n  = i sin(theta) alpha_{n+1} + cos(theta) beta_{n+1}
// Open boundaries terminate with exact total-reflection mirror coins at the
// first and last fine position.
StateVector apply_step(const StateVector& state, double theta, double phi_m, Boundary boundary);

struct Record {
  RecordMode mode = RecordMode::Every;
  std::vector<int> steps;  // walk step index of each snapshot row
  MatrixXcd alpha, beta;   // (n_records x fine_sites)
};

// Steps m = 1..n_steps: odd m applies (theta1 + tau_m, +phi), even m applies
// (theta2 + tau_m, -phi). Stroboscopic records keep one snapshot per completed
// period (m = 2, 4, ...); Every keeps the initial state plus every step.
Record evolve_trajectory(const StateVector& initial, const ProtocolParams& p,
                         std::span<const double> taus, int n_steps, RecordMode mode);

struct EnsembleOptions {
  RecordMode record = RecordMode::Stroboscopic;
  bool amplitude_stats = true;
  bool density = false;                 // averaged coarse density per period
  std::vector<VectorXcd> projections;   // coarse-basis targets, |<v|psi>|^2 per period
  int threads = 0;                      // 0 = hardware concurrency
};

// Streaming ensemble statistics. Accumulation runs over a fixed binary merge
// tree, so results are bit-identical for any worker count.
struct EnsembleStats {
  long n = 0;
  RecordMode mode = RecordMode::Stroboscopic;
  std::vector<int> steps;

  // Per (record, fine site). Coherent intensity is |mean amplitude|^2;
  // incoherent intensity is the mean of |amplitude|^2.
  MatrixXcd mean_alpha, mean_beta;
  MatrixXd incoherent_alpha, incoherent_beta;
  MatrixXd se_incoherent_alpha, se_incoherent_beta;  // standard error of the mean
  MatrixXd se_mean_alpha, se_mean_beta;  // SE of the complex mean (re+im combined)

  MatrixXd coherent_alpha() const { return mean_alpha.cwiseAbs2(); }
  MatrixXd coherent_beta() const { return mean_beta.cwiseAbs2(); }

  // Per period boundary 0..n_steps/2 (when requested).
  std::vector<MatrixXcd> mean_density;
  std::vector<MatrixXd> se_density;
  MatrixXd projection_mean, projection_se;  // (n_periods+1 x n_targets)
};

EnsembleStats run_ensemble(const StateVector& initial, const ProtocolParams& p,
                           const noise::NoiseSpec& spec, long n_realizations, int n_steps,
                           const EnsembleOptions& opts = {});

// Momentum-space trajectory average: rho0 conjugated by sampled one-period
// Bloch operators, recorded at period boundaries 0..n_periods.
struct BulkMcSeries {
  long n = 0;
  std::vector<Matrix2cd> mean;
  std::vector<Eigen::Matrix2d> se;  // entrywise SE of the complex mean
};

BulkMcSeries bulk_density_mc(const ProtocolParams& p, double k, const noise::NoiseSpec& spec,
                             long n_realizations, int n_periods, const Matrix2cd& rho0,
                             int threads = 0);

}  // namespace dsqw::traj
