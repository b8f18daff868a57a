#pragma once

#include <string>
#include <vector>

#include "dsqw/common.hpp"
#include "dsqw/noise.hpp"
#include "dsqw/trajectory.hpp"

namespace dsqw::analysis {

// Quasimomentum x quasienergy intensity map, both axes folded to (-pi, pi]
// and sorted ascending. Rows index k, columns index E.
struct BandData {
  VectorXd k;
  VectorXd e;
  MatrixXd intensity;
};

enum class Window { None, Hann };

// 2D Fourier transform of a stroboscopic record: the occupied stride-2
// sublattice is transformed over space, record rows over time, and the ring
// intensities added (|alpha~|^2 + |beta~|^2). Rejects non-stroboscopic records.
BandData band_structure(const traj::Record& rec, Window window = Window::None);

// Mean per-realization band intensity over a noise ensemble (deterministic
// merge order, independent of thread count).
BandData ensemble_band(const traj::StateVector& initial, const ProtocolParams& p,
                       const noise::NoiseSpec& spec, long n_realizations, int n_steps,
                       int threads = 1, Window window = Window::None);

enum class Band { Upper, Lower };

struct FWHMPoint {
  double k = 0.0;
  double center = 0.0;    // fitted quasienergy
  double fwhm = 0.0;      // 2 sqrt(2 ln 2) * fitted sigma
  double residual = 0.0;  // rms misfit relative to peak height
  bool valid = false;     // false: fit did not converge; value not fabricated
};

struct FWHMProfile {
  std::vector<FWHMPoint> points;
};

// Per-k Gaussian least-squares fit of the selected band's quasienergy ridge.
// The fit window is the quarter-zone |E - E_peak| <= pi/4 clipped to the
// band's half-plane (E > 0 for upper, E < 0 for lower).
FWHMProfile fwhm_profile(const BandData& band, Band which);

struct EdgeState {
  VectorXcd vec;            // 2N coarse components, normalized
  double quasienergy = 0.0;
  std::string gap;          // "zero" or "pi"
  double ipr = 0.0;         // sum |psi_i|^4
  std::string side;         // "left" or "right"
};

struct EdgeReport {
  std::vector<EdgeState> states;
  double band_min = 0.0, band_max = 0.0;  // upper-band quasienergy range
  bool zero_gap_open = false, pi_gap_open = false;
  std::string diagnostic;  // set when a gap is closed / no states found
};

// Full diagonalization of the open-boundary period operator; returns
// eigenpairs inside a bulk gap with IPR above 4/N, labeled by gap and side.
EdgeReport extract_edge_states(const ProtocolParams& p);

struct ReturnProbSeries {
  std::vector<double> p;   // one value per period, 0..M
  std::vector<double> se;  // standard errors (zero for deterministic sources)
  std::string provenance;  // "mc" | "master" | "analytic" | "recurrence"
};

ReturnProbSeries return_from_ensemble(const traj::EnsembleStats& stats, int column);
ReturnProbSeries return_from_projection_series(const MatrixXd& projections, int column,
                                               const std::string& provenance);

// One step of the edge-population recurrence
//   p_L(M+1) = ((1+e^{-2 sigma^2})/2) p_L(M) + Gamma_+ p_nb(M),
// with the Gaussian closed-form coefficients.
double recurrence_return(double p_edge, double p_neighbor, double sigma);

// p(M) = p0 e^{-M Gamma_+} + Gamma_+ * neighbor(M), evaluated literally.
ReturnProbSeries analytic_return(double p0, double gamma_plus,
                                 const ReturnProbSeries& neighbor);

struct DecayReport {
  double exp_rate = 0.0;       // early-window log-linear slope per period
  int early_lo = 0, early_hi = 0;
  double early_residual = 0.0;
  double tail_exponent = 0.0;  // late-window log-log slope
  int late_lo = 0, late_hi = 0;
  double late_residual = 0.0;
  double crossover = 0.0;      // intersection of the two fitted laws
  bool has_crossover = false;
  double log_curvature = 0.0;  // quadratic coefficient of log p over the tail
  bool monotone = true;
  bool saturated = false;      // tail flat: power-law fields not meaningful
};

// Two-window piecewise fit: log-linear early for the exponential rate,
// log-log late for the polynomial tail, crossover at the intersection.
// Requires at least 20 periods.
DecayReport fit_decay(const std::vector<double>& p);

}  // namespace dsqw::analysis
