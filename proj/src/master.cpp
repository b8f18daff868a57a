#include "dsqw/master.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>

#include "dsqw/lattice.hpp"

namespace dsqw::master {

namespace {

using TM = noise::TrigMoment;

// Nonzero second moments E[g_mu g_nu] over the decomposition basis
// {1, cos, sin, cos^2, sin cos, sin^2}; products odd in sin average to zero
// for the symmetric distributions used here. The (1,1) pair is handled
// separately (unit weight).
struct PairMoment {
  int mu, nu;
  TM moment;
};
constexpr PairMoment kPairs[] = {
    {0, 1, TM::Cos},     {0, 3, TM::Cos2},     {0, 5, TM::Sin2},
    {1, 1, TM::Cos2},    {1, 3, TM::Cos3},     {1, 5, TM::CosSin2},
    {2, 2, TM::Sin2},    {2, 4, TM::CosSin2},  {3, 3, TM::Cos4},
    {3, 5, TM::Sin2Cos2}, {4, 4, TM::Sin2Cos2}, {5, 5, TM::Sin4},
};

// rho' = sum_{mu,nu} E[g_mu g_nu] u_mu rho u_nu^dagger for Hermitian rho.
MatrixXcd moment_weighted_map(const MatrixXcd& rho, const std::array<const MatrixXcd*, 6>& u,
                              const noise::CoefficientSet& coeffs) {
  std::array<MatrixXcd, 6> left;  // u_mu * rho, computed once
  std::array<bool, 6> live{};
  for (int mu = 0; mu < 6; ++mu) {
    if (u[static_cast<size_t>(mu)] == nullptr) continue;
    const MatrixXcd& m = *u[static_cast<size_t>(mu)];
    if (m.rows() != rho.rows() || m.cols() != rho.cols())
      throw std::invalid_argument("decomposition/density dimension mismatch");
    if (m.isZero(0.0)) continue;
    left[static_cast<size_t>(mu)] = m * rho;
    live[static_cast<size_t>(mu)] = true;
  }
  MatrixXcd out = MatrixXcd::Zero(rho.rows(), rho.cols());
  if (live[0]) out += left[0] * u[0]->adjoint();
  for (const auto& pr : kPairs) {
    if (!live[static_cast<size_t>(pr.mu)] || !live[static_cast<size_t>(pr.nu)]) continue;
    const double f = coeffs.moment(pr.moment);
    if (f == 0.0) continue;
    MatrixXcd term =
        left[static_cast<size_t>(pr.mu)] * u[static_cast<size_t>(pr.nu)]->adjoint();
    if (pr.mu == pr.nu) {
      out += f * term;
    } else {
      out += f * (term + term.adjoint());
    }
  }
  return out;
}

MatrixXcd mirror_part(const ProtocolParams& p) {
  const int d = 2 * p.n_sites;
  MatrixXcd m = MatrixXcd::Zero(d, d);
  if (p.boundary == Boundary::Open) {
    m(0, 1) = iunit * std::exp(-iunit * p.phi);
    m(d - 1, d - 2) = iunit;
  }
  return m;
}

void check_reconstruction(const std::function<MatrixXcd(double)>& rebuilt,
                          const std::function<MatrixXcd(double)>& direct, const char* what) {
  for (const double tau : {-1.2, -0.5, 0.3, 0.9, 2.0}) {
    const double err = (rebuilt(tau) - direct(tau)).cwiseAbs().maxCoeff();
    if (err > 1e-10)
      throw std::runtime_error(std::string(what) + " reconstruction failed, max error " +
                               std::to_string(err));
  }
}

}  // namespace

void validate_density(const MatrixXcd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 1)
    throw std::invalid_argument("density matrix must be square");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("density matrix not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
    throw std::invalid_argument("density matrix trace must be 1");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (rho + rho.adjoint()),
                                              Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("density matrix has a negative eigenvalue");
}

BulkDecomposition decompose_bulk(const ProtocolParams& p, double k) {
  BulkDecomposition dec;
  dec.u_f = lattice::floquet_operator_k(p, k);
  const double tp = p.theta1 + p.theta2;
  const double ct = std::cos(tp), st = std::sin(tp);
  const complexd sp = std::exp(iunit * k) + std::exp(iunit * p.phi);
  const complexd sm = std::exp(-iunit * k) + std::exp(-iunit * p.phi);
  dec.u_plus << sm * ct, iunit * sm * st, iunit * sp * st, sp * ct;
  dec.u_minus << sm * st, -iunit * sm * ct, -iunit * sp * ct, sp * st;
  return dec;
}

Matrix2cd noisy_floquet_k(const ProtocolParams& p, double k, double tau1, double tau2) {
  return lattice::step_operator_k(p.theta2 + tau2, -p.phi, k) *
         lattice::step_operator_k(p.theta1 + tau1, p.phi, k);
}

StepDecompositionK decompose_step_k(const ProtocolParams& p, int which_step, double k) {
  if (which_step != 1 && which_step != 2)
    throw std::invalid_argument("step index must be 1 or 2");
  const double theta = which_step == 1 ? p.theta1 : p.theta2;
  const double phi_m = which_step == 1 ? p.phi : -p.phi;
  StepDecompositionK dec;
  dec.uc = lattice::step_operator_k(theta, phi_m, k);
  dec.us = lattice::step_operator_k(theta + 0.5 * pi, phi_m, k);
  return dec;
}

MatrixXcd master_step_bulk_strobo(const MatrixXcd& rho, const BulkDecomposition& dec,
                                  const noise::CoefficientSet& coeffs) {
  validate_density(rho);
  const MatrixXcd u0 = dec.u_f;
  const MatrixXcd uss = -dec.u_plus;   // pairs with f_+ = -sin^2
  const MatrixXcd usc = -dec.u_minus;  // pairs with f_- = -sin cos
  return moment_weighted_map(rho, {&u0, nullptr, nullptr, nullptr, &usc, &uss}, coeffs);
}

MatrixXcd master_step_bulk_random(const MatrixXcd& rho, const StepDecompositionK& dec,
                                  const noise::CoefficientSet& coeffs) {
  validate_density(rho);
  const MatrixXcd uc = dec.uc, us = dec.us;
  return moment_weighted_map(rho, {nullptr, &uc, &us, nullptr, nullptr, nullptr}, coeffs);
}

MatrixXcd master_two_step_bulk_random(const MatrixXcd& rho, const StepDecompositionK& dec1,
                                      const StepDecompositionK& dec2,
                                      const noise::CoefficientSet& coeffs) {
  validate_density(rho);
  const double c2 = coeffs.moment(TM::Cos2), s2 = coeffs.moment(TM::Sin2);
  const Matrix2cd a = dec2.uc * dec1.uc, b = dec2.uc * dec1.us;
  const Matrix2cd c = dec2.us * dec1.uc, d = dec2.us * dec1.us;
  return c2 * c2 * a * rho * a.adjoint() +
         c2 * s2 * (b * rho * b.adjoint() + c * rho * c.adjoint()) +
         s2 * s2 * d * rho * d.adjoint();
}

RealDecomposition decompose_real_strobo(const ProtocolParams& p) {
  const MatrixXcd u1 = lattice::noisy_step_real(p, 1, 0.0).dense();
  const MatrixXcd u1p = lattice::noisy_step_real(p, 1, 0.5 * pi).dense();
  const MatrixXcd m = mirror_part(p);
  const MatrixXcd u2c = lattice::noisy_step_real(p, 2, 0.0).dense() - m;
  const MatrixXcd u2s = lattice::noisy_step_real(p, 2, 0.5 * pi).dense() - m;

  RealDecomposition dec;
  dec.u0 = MatrixXcd::Zero(m.rows(), m.cols());
  dec.uc = m * u1;
  dec.us = m * u1p;
  dec.ucc = u2c * u1;
  dec.usc = u2s * u1 + u2c * u1p;
  dec.uss = u2s * u1p;

  check_reconstruction(
      [&](double tau) -> MatrixXcd {
        const double c = std::cos(tau), s = std::sin(tau);
        return dec.u0 + c * dec.uc + s * dec.us + c * c * dec.ucc + s * c * dec.usc +
               s * s * dec.uss;
      },
      [&](double tau) { return lattice::noisy_floquet_real(p, tau, tau).dense(); },
      "period operator");
  return dec;
}

RealStepDecomposition decompose_step_real(const ProtocolParams& p, int which_step) {
  RealStepDecomposition dec;
  dec.u0 = which_step == 2 ? mirror_part(p)
                           : MatrixXcd::Zero(2 * p.n_sites, 2 * p.n_sites).eval();
  dec.uc = lattice::noisy_step_real(p, which_step, 0.0).dense() - dec.u0;
  dec.us = lattice::noisy_step_real(p, which_step, 0.5 * pi).dense() - dec.u0;
  check_reconstruction(
      [&](double tau) -> MatrixXcd {
        return dec.u0 + std::cos(tau) * dec.uc + std::sin(tau) * dec.us;
      },
      [&](double tau) { return lattice::noisy_step_real(p, which_step, tau).dense(); },
      "step operator");
  return dec;
}

MatrixXcd master_step_real_strobo(const MatrixXcd& rho, const RealDecomposition& dec,
                                  const noise::CoefficientSet& coeffs) {
  validate_density(rho);
  return moment_weighted_map(rho, {&dec.u0, &dec.uc, &dec.us, &dec.ucc, &dec.usc, &dec.uss},
                             coeffs);
}

MatrixXcd master_step_real_random(const MatrixXcd& rho, const RealStepDecomposition& dec,
                                  const noise::CoefficientSet& coeffs) {
  validate_density(rho);
  return moment_weighted_map(rho, {&dec.u0, &dec.uc, &dec.us, nullptr, nullptr, nullptr},
                             coeffs);
}

PropagationSeries propagate(const MatrixXcd& rho0, const MasterStep& step, int n_periods,
                            const std::vector<VectorXcd>& projections, bool keep_density) {
  validate_density(rho0);
  if (n_periods < 0) throw std::invalid_argument("n_periods must be nonnegative");
  for (const auto& v : projections)
    if (v.size() != rho0.rows()) throw std::invalid_argument("projection dimension mismatch");

  PropagationSeries out;
  out.projections.resize(n_periods + 1, static_cast<Eigen::Index>(projections.size()));
  MatrixXcd rho = rho0;
  for (int q = 0; q <= n_periods; ++q) {
    // The step map preserves Hermiticity exactly; matrix products drift off it
    // at machine scale, so project back each period before the next step.
    if (q > 0) {
      const MatrixXcd next = step(rho);
      rho = 0.5 * (next + next.adjoint());
    }
    for (size_t t = 0; t < projections.size(); ++t) {
      const auto& v = projections[t];
      out.projections(q, static_cast<Eigen::Index>(t)) = (v.adjoint() * rho * v)(0).real();
    }
    out.max_trace_error = std::max(out.max_trace_error, std::abs(rho.trace().real() - 1.0) +
                                                            std::abs(rho.trace().imag()));
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (rho + rho.adjoint()),
                                                Eigen::EigenvaluesOnly);
    out.min_eigenvalue = std::min(out.min_eigenvalue, es.eigenvalues().minCoeff());
    if (keep_density) out.rho.push_back(rho);
  }
  return out;
}

}  // namespace dsqw::master
