#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "dsqw/lattice.hpp"
#include "dsqw/trajectory.hpp"

using namespace dsqw;

namespace {

ProtocolParams params(double t1, double t2, double phi, int n, Boundary b) {
  ProtocolParams p;
  p.theta1 = t1;
  p.theta2 = t2;
  p.phi = phi;
  p.n_sites = n;
  p.boundary = b;
  return p;
}

traj::StateVector random_state(int fine, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  traj::StateVector s;
  s.alpha.resize(fine);
  s.beta.resize(fine);
  for (int i = 0; i < fine; ++i) {
    s.alpha(i) = complexd(g(rng), g(rng));
    s.beta(i) = complexd(g(rng), g(rng));
  }
  const double n2 = std::sqrt(s.norm2());
  s.alpha /= n2;
  s.beta /= n2;
  return s;
}

}  // namespace

TEST_CASE("zero coin is a pure shift on the ring") {
  traj::StateVector s;
  s.alpha = VectorXcd::Zero(10);
  s.beta = VectorXcd::Zero(10);
  s.alpha(3) = 1.0;
  s.beta(7) = iunit;
  const auto out = traj::apply_step(s, 0.0, 0.0, Boundary::Periodic);
  CHECK(std::abs(out.alpha(4) - 1.0) < 1e-15);   // alpha moves right
  CHECK(std::abs(out.beta(6) - iunit) < 1e-15);  // beta moves left
  CHECK(std::abs(out.norm2() - s.norm2()) < 1e-14);
}

TEST_CASE("quarter-pi coin splits a single pulse with the textbook amplitudes") {
  traj::StateVector s;
  s.alpha = VectorXcd::Zero(10);
  s.beta = VectorXcd::Zero(10);
  s.alpha(4) = 1.0;
  const double phi = 0.3;
  const auto out = traj::apply_step(s, 0.25 * pi, phi, Boundary::Periodic);
  CHECK(std::abs(out.alpha(5) - std::cos(0.25 * pi) * std::exp(iunit * phi)) < 1e-15);
  CHECK(std::abs(out.beta(3) - iunit * std::sin(0.25 * pi)) < 1e-15);
  CHECK(std::abs(out.norm2() - 1.0) < 1e-12);

  // theta = pi/2 crosses the rings completely with factor i.
  const auto swap = traj::apply_step(s, 0.5 * pi, 0.0, Boundary::Periodic);
  CHECK(std::abs(swap.beta(3) - iunit) < 1e-15);
  CHECK(swap.alpha.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("steps preserve the norm on both boundaries") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ang(-pi, pi);
  for (const auto b : {Boundary::Periodic, Boundary::Open}) {
    const ProtocolParams p = params(0, 0, 0, 9, b);
    auto s = random_state(traj::fine_sites(p), rng);
    for (int m = 0; m < 100; ++m) {
      s = traj::apply_step(s, ang(rng), ang(rng), b);
      CHECK(std::abs(s.norm2() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("one fine period equals the coarse period operator") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> ang(-pi, pi);
  for (const auto b : {Boundary::Open, Boundary::Periodic}) {
    const ProtocolParams p = params(0.35 * pi, 0.2 * pi, 0.3, 8, b);
    VectorXcd coarse(16);
    std::normal_distribution<double> g;
    for (int i = 0; i < 16; ++i) coarse(i) = complexd(g(rng), g(rng));
    coarse.normalize();

    auto s = traj::embed_coarse(p, coarse);
    CHECK((traj::extract_coarse(p, s) - coarse).cwiseAbs().maxCoeff() < 1e-14);

    const double tau1 = 0.17, tau2 = -0.52;
    s = traj::apply_step(s, p.theta1 + tau1, p.phi, b);
    s = traj::apply_step(s, p.theta2 + tau2, -p.phi, b);
    const VectorXcd via_fine = traj::extract_coarse(p, s);
    const VectorXcd via_blocks = lattice::noisy_floquet_real(p, tau1, tau2).apply(coarse);
    CHECK((via_fine - via_blocks).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("records keep the advertised rows") {
  const ProtocolParams p = params(0, 0.25 * pi, 0, 7, Boundary::Open);
  const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
  const std::vector<double> taus(12, 0.0);
  const auto every = traj::evolve_trajectory(init, p, taus, 12, traj::RecordMode::Every);
  REQUIRE(every.steps.size() == 13);  // initial state plus each step
  CHECK(every.steps.front() == 0);
  CHECK(every.steps.back() == 12);
  const auto strobo = traj::evolve_trajectory(init, p, taus, 12, traj::RecordMode::Stroboscopic);
  REQUIRE(strobo.steps.size() == 6);  // one row per completed period
  for (size_t i = 0; i < strobo.steps.size(); ++i)
    CHECK(strobo.steps[i] == 2 * static_cast<int>(i + 1));
  CHECK(strobo.alpha.rows() == 6);
  CHECK(strobo.alpha.cols() == traj::fine_sites(p));
  const double last_norm =
      strobo.alpha.row(5).squaredNorm() + strobo.beta.row(5).squaredNorm();
  CHECK(std::abs(last_norm - 1.0) < 1e-8);
}

TEST_CASE("flat-band edge site only picks up a phase each period") {
  const ProtocolParams p = params(0.5 * pi, 0.0, 0.2 * pi, 10, Boundary::Open);
  VectorXcd e0 = VectorXcd::Zero(20);
  e0(0) = 1.0;
  auto s = traj::embed_coarse(p, e0);
  const complexd lambda = -std::exp(-iunit * p.phi);
  complexd phase = 1.0;
  for (int m = 0; m < 6; ++m) {
    s = traj::apply_step(s, p.theta1, p.phi, p.boundary);
    s = traj::apply_step(s, p.theta2, -p.phi, p.boundary);
    phase *= lambda;
    CHECK((traj::extract_coarse(p, s) - phase * e0).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("noise-free ensembles have no incoherent excess") {
  const ProtocolParams p = params(0, 0.25 * pi, 0, 15, Boundary::Open);
  const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
  noise::NoiseSpec s;  // schedule none
  traj::EnsembleOptions opts;
  opts.record = traj::RecordMode::Every;
  const auto stats = traj::run_ensemble(init, p, s, 4, 20, opts);
  CHECK(stats.n == 4);
  CHECK((stats.incoherent_alpha - stats.coherent_alpha()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((stats.incoherent_beta - stats.coherent_beta()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(stats.se_incoherent_alpha.maxCoeff() < 1e-14);
}

TEST_CASE("coherent intensity never exceeds incoherent intensity") {
  const ProtocolParams p = params(0, 0.25 * pi, 0, 15, Boundary::Open);
  const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
  noise::NoiseSpec s;
  s.sigma = 0.4 * pi;
  s.schedule = noise::Schedule::PerStep;
  s.master_seed = 5;
  const auto stats = traj::run_ensemble(init, p, s, 32, 30, {});
  CHECK((stats.incoherent_alpha - stats.coherent_alpha()).minCoeff() > -1e-12);
  CHECK((stats.incoherent_beta - stats.coherent_beta()).minCoeff() > -1e-12);
}

TEST_CASE("standard errors shrink like the square root of the ensemble size") {
  const ProtocolParams p = params(0, 0.25 * pi, 0, 15, Boundary::Open);
  const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
  noise::NoiseSpec s;
  s.sigma = 0.4 * pi;
  s.schedule = noise::Schedule::PerStep;
  s.master_seed = 6;
  const auto small = traj::run_ensemble(init, p, s, 400, 20, {});
  const auto big = traj::run_ensemble(init, p, s, 1600, 20, {});
  // Pool over the record to damp estimator noise before comparing the scaling.
  const double r = small.se_incoherent_alpha.sum() / big.se_incoherent_alpha.sum();
  CHECK(r > 2.0 * 0.8);
  CHECK(r < 2.0 * 1.2);
}

TEST_CASE("ensemble results do not depend on the worker count") {
  const ProtocolParams p = params(0.35 * pi, 0.2 * pi, 0.3, 9, Boundary::Open);
  const auto init = traj::single_site_state(p, 2, traj::Ring::Beta);
  noise::NoiseSpec s;
  s.sigma = 0.3;
  s.schedule = noise::Schedule::Stroboscopic;
  s.master_seed = 77;
  traj::EnsembleOptions o1;
  o1.density = true;
  o1.projections = {VectorXcd::Unit(18, 5)};
  o1.threads = 1;
  auto o3 = o1;
  o3.threads = 3;
  const auto a = traj::run_ensemble(init, p, s, 33, 14, o1);
  const auto b = traj::run_ensemble(init, p, s, 33, 14, o3);
  CHECK((a.mean_alpha - b.mean_alpha).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.incoherent_beta - b.incoherent_beta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.projection_mean - b.projection_mean).cwiseAbs().maxCoeff() == 0.0);
  for (size_t m = 0; m < a.mean_density.size(); ++m)
    CHECK((a.mean_density[m] - b.mean_density[m]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("averaged density diagonal matches the incoherent intensities") {
  const ProtocolParams p = params(0, 0.25 * pi, 0, 9, Boundary::Open);
  const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
  noise::NoiseSpec s;
  s.sigma = 0.5;
  s.schedule = noise::Schedule::PerStep;
  s.master_seed = 8;
  traj::EnsembleOptions opts;
  opts.density = true;
  const auto stats = traj::run_ensemble(init, p, s, 25, 12, opts);
  REQUIRE(stats.mean_density.size() == 7);  // periods 0..6
  for (int q = 1; q <= 6; ++q) {
    const auto& rho = stats.mean_density[static_cast<size_t>(q)];
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
    const int row = q - 1;  // stroboscopic record rows start at period 1
    for (int j = 0; j < p.n_sites; ++j) {
      const int fine = traj::coarse_to_fine(j);
      CHECK(std::abs(rho(2 * j, 2 * j).real() - stats.incoherent_alpha(row, fine)) < 1e-12);
      CHECK(std::abs(rho(2 * j + 1, 2 * j + 1).real() - stats.incoherent_beta(row, fine)) <
            1e-12);
    }
  }
}

TEST_CASE("density averaging refuses oversized lattices") {
  const ProtocolParams p = params(0, 0.25 * pi, 0, 33, Boundary::Open);
  const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
  noise::NoiseSpec s;
  traj::EnsembleOptions opts;
  opts.density = true;
  CHECK_THROWS_AS(traj::run_ensemble(init, p, s, 2, 4, opts), ResourceRefusal);
}

TEST_CASE("momentum ensembles at the protected momentum reproduce noiseless evolution") {
  ProtocolParams p = params(0.35 * pi, 0.2 * pi, 0.3, 2, Boundary::Periodic);
  const double kstar = lattice::dfs_momenta(p.phi).front();
  Matrix2cd rho0;
  rho0 << 0.6, complexd(0.2, 0.1), complexd(0.2, -0.1), 0.4;
  noise::NoiseSpec s;
  s.sigma = 0.4 * pi;
  s.schedule = noise::Schedule::Stroboscopic;
  s.master_seed = 12;
  const auto mc = traj::bulk_density_mc(p, kstar, s, 50, 8, rho0);
  const Matrix2cd u = lattice::floquet_operator_k(p, kstar);
  Matrix2cd rho = rho0;
  for (int m = 1; m <= 8; ++m) {
    rho = u * rho * u.adjoint();
    CHECK((mc.mean[static_cast<size_t>(m)] - rho).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(mc.se[static_cast<size_t>(m)].maxCoeff() < 1e-13);
  }
}

TEST_CASE("bloch states require a ring") {
  const ProtocolParams p = params(0.1, 0.2, 0.0, 8, Boundary::Open);
  Vector2cd spinor;
  spinor << 1.0, 0.0;
  CHECK_THROWS_AS(traj::bloch_state(p, 0.5, spinor), std::invalid_argument);
}
