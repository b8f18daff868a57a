#pragma once

#include <functional>
#include <vector>

#include "dsqw/common.hpp"
#include "dsqw/noise.hpp"

namespace dsqw::master {

// Throws std::invalid_argument unless rho is Hermitian (1e-12), unit trace
// (1e-10) and positive semidefinite (eigenvalues >= -1e-10).
void validate_density(const MatrixXcd& rho);

// --- momentum space -------------------------------------------------------

// U_F(k,tau) = u_f + f_+(tau) u_plus + f_-(tau) u_minus with
// f_+ = -sin^2(tau), f_- = -sin(tau)cos(tau); entries of u_± carry
// s_±(k,phi) = e^{±ik} + e^{±iphi}, so both vanish at the decoherence-free
// momenta k = phi + pi (mod 2pi).
struct BulkDecomposition {
  Matrix2cd u_f, u_plus, u_minus;
};
BulkDecomposition decompose_bulk(const ProtocolParams& p, double k);

// Direct construction of the noisy period operator (oracle for the
// decompositions): step angles theta_m + tau_m, phases +phi / -phi.
Matrix2cd noisy_floquet_k(const ProtocolParams& p, double k, double tau1, double tau2);

// Single-step split U_m(k,tau) = cos(tau) uc + sin(tau) us.
struct StepDecompositionK {
  Matrix2cd uc, us;
};
StepDecompositionK decompose_step_k(const ProtocolParams& p, int which_step, double k);

// One period of the stroboscopic-noise master equation,
// rho' = U rho U+  - G+ (u+ rho U+ + U rho u+^) + G++ u+ rho u+^ + G-- u- rho u-^.
MatrixXcd master_step_bulk_strobo(const MatrixXcd& rho, const BulkDecomposition& dec,
                                  const noise::CoefficientSet& coeffs);

// One noise-averaged single step, rho' = E[cos^2] U rho U+ + E[sin^2] U' rho U'+.
MatrixXcd master_step_bulk_random(const MatrixXcd& rho, const StepDecompositionK& dec,
                                  const noise::CoefficientSet& coeffs);

// Literal four-term two-step form; equals composing master_step_bulk_random
// over step 1 then step 2.
MatrixXcd master_two_step_bulk_random(const MatrixXcd& rho, const StepDecompositionK& dec1,
                                      const StepDecompositionK& dec2,
                                      const noise::CoefficientSet& coeffs);

// --- real space ------------------------------------------------------------

// U_F(tau) = u0 + cos(tau) uc + sin(tau) us + cos^2 ucc + sin cos usc + sin^2 uss.
// Coefficients are collected per entry from the trig addition formulas:
// boundary-mirror paths carry one noisy factor (uc/us rows), bulk paths two
// (ucc/usc/uss); u0 comes out identically zero for the composed operator.
struct RealDecomposition {
  MatrixXcd u0, uc, us, ucc, usc, uss;
};
RealDecomposition decompose_real_strobo(const ProtocolParams& p);

// Single real-space step, U_m(tau) = u0 + cos(tau) uc + sin(tau) us; u0 holds
// the tau-independent mirror entries (step 2, open boundary only).
struct RealStepDecomposition {
  MatrixXcd u0, uc, us;
};
RealStepDecomposition decompose_step_real(const ProtocolParams& p, int which_step);

MatrixXcd master_step_real_strobo(const MatrixXcd& rho, const RealDecomposition& dec,
                                  const noise::CoefficientSet& coeffs);

MatrixXcd master_step_real_random(const MatrixXcd& rho, const RealStepDecomposition& dec,
                                  const noise::CoefficientSet& coeffs);

// --- propagation -----------------------------------------------------------

using MasterStep = std::function<MatrixXcd(const MatrixXcd&)>;

struct PropagationSeries {
  std::vector<MatrixXcd> rho;  // one density matrix per period, 0..n_periods
  MatrixXd projections;        // (n_periods+1) x targets, <v|rho|v>
  double max_trace_error = 0.0;
  double min_eigenvalue = 1.0;
};

PropagationSeries propagate(const MatrixXcd& rho0, const MasterStep& step, int n_periods,
                            const std::vector<VectorXcd>& projections = {},
                            bool keep_density = true);

}  // namespace dsqw::master
