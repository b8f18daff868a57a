#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "dsqw/analysis.hpp"
#include "dsqw/lattice.hpp"

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

ProtocolParams flat_protocol(int n) { return params(0.5 * pi, 0.0, 0.2 * pi, n, Boundary::Open); }

// Distance between folded angles through the branch cut.
double angle_dist(double a, double b) { return std::abs(fold_angle(a - b)); }

analysis::BandData synthetic_band(const std::vector<double>& centers,
                                  const std::vector<double>& sigmas,
                                  const std::vector<double>& amps) {
  analysis::BandData bd;
  const int ne = 256;
  bd.k = VectorXd::LinSpaced(static_cast<Eigen::Index>(centers.size()), -1.0, 2.0);
  bd.e = VectorXd::LinSpaced(ne, -pi + 2.0 * pi / ne, pi);
  bd.intensity.resize(static_cast<Eigen::Index>(centers.size()), ne);
  for (size_t i = 0; i < centers.size(); ++i)
    for (int r = 0; r < ne; ++r) {
      const double d = bd.e(r) - centers[i];
      bd.intensity(static_cast<Eigen::Index>(i), r) =
          amps[i] * std::exp(-0.5 * d * d / (sigmas[i] * sigmas[i]));
    }
  return bd;
}

}  // namespace

TEST_CASE("band extraction needs stroboscopic records") {
  const ProtocolParams p = params(0, 0.25 * pi, 0, 8, Boundary::Periodic);
  const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
  const std::vector<double> taus(8, 0.0);
  const auto rec = traj::evolve_trajectory(init, p, taus, 8, traj::RecordMode::Every);
  CHECK_THROWS_AS(analysis::band_structure(rec), std::invalid_argument);
}

TEST_CASE("noiseless band maps ride on the dispersion relation") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 32, steps = 64;
  const double cell = 2.0 * pi / (steps / 2);
  for (int trial = 0; trial < 10; ++trial) {
    const ProtocolParams p =
        params(0.45 * pi * u(rng), 0.45 * pi * u(rng), pi * u(rng), n, Boundary::Periodic);
    const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
    const std::vector<double> taus(steps, 0.0);
    const auto rec = traj::evolve_trajectory(init, p, taus, steps, traj::RecordMode::Stroboscopic);
    const auto bd = analysis::band_structure(rec, analysis::Window::Hann);
    REQUIRE(bd.k.size() == n);
    REQUIRE(bd.e.size() == steps / 2);
    for (int i = 0; i < n; ++i) {
      int peak = 0;
      bd.intensity.row(i).maxCoeff(&peak);
      const auto bands = lattice::quasienergies(p, bd.k(i));
      const double off = std::min(angle_dist(bd.e(peak), bands.e_plus),
                                  angle_dist(bd.e(peak), bands.e_minus));
      CHECK(off <= 0.75 * cell);
    }
  }
}

TEST_CASE("width fits recover synthetic line shapes") {
  const auto bd = synthetic_band({1.2, 0.6, 2.2}, {0.12, 0.3, 0.5}, {1.0, 7.0, 0.01});
  const auto prof = analysis::fwhm_profile(bd, analysis::Band::Upper);
  REQUIRE(prof.points.size() == 3);
  const double scale = 2.0 * std::sqrt(2.0 * std::log(2.0));
  const std::vector<double> centers{1.2, 0.6, 2.2}, sigmas{0.12, 0.3, 0.5};
  for (size_t i = 0; i < 3; ++i) {
    const auto& pt = prof.points[i];
    REQUIRE(pt.valid);
    CHECK(std::abs(pt.center - centers[i]) < 2e-3);
    CHECK(std::abs(pt.fwhm - scale * sigmas[i]) < 0.01 * scale * sigmas[i]);
    CHECK(pt.residual < 1e-3);
  }
}

TEST_CASE("width fits refuse to fabricate values for empty columns") {
  auto bd = synthetic_band({1.0, 1.0}, {0.2, 0.2}, {1.0, 1.0});
  bd.intensity.row(1).setZero();
  const auto prof = analysis::fwhm_profile(bd, analysis::Band::Upper);
  REQUIRE(prof.points.size() == 2);
  CHECK(prof.points[0].valid);
  CHECK_FALSE(prof.points[1].valid);
  CHECK(prof.points[1].fwhm == 0.0);
}

TEST_CASE("noiseless flat-band widths sit at the resolution limit everywhere") {
  const ProtocolParams p = params(0.5 * pi, 0.0, 0.2 * pi, 32, Boundary::Periodic);
  const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
  noise::NoiseSpec off;  // no noise
  const auto bd = analysis::ensemble_band(init, p, off, 1, 64, 1, analysis::Window::Hann);
  const auto prof = analysis::fwhm_profile(bd, analysis::Band::Upper);
  double lo = 1e300, hi = 0.0;
  for (const auto& pt : prof.points) {
    REQUIRE(pt.valid);
    lo = std::min(lo, pt.fwhm);
    hi = std::max(hi, pt.fwhm);
    CHECK(angle_dist(pt.center, 0.5 * pi) < 0.15);
  }
  CHECK(lo >= 2.0 * pi / 32);  // cannot beat the record length
  CHECK(hi / lo <= 1.25);
}

TEST_CASE("timing noise spares exactly the protected momentum") {
  const ProtocolParams p = params(0.0, 0.25 * pi, 0.0, 32, Boundary::Periodic);
  const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
  const double kstar = lattice::dfs_momenta(p.phi).front();

  noise::NoiseSpec strong;
  strong.distribution = noise::Distribution::Uniform;
  strong.sigma = 0.4 * pi;
  strong.schedule = noise::Schedule::Stroboscopic;
  strong.master_seed = 11;
  const auto bd = analysis::ensemble_band(init, p, strong, 60, 64, 1, analysis::Window::Hann);
  const auto prof = analysis::fwhm_profile(bd, analysis::Band::Upper);
  size_t argmin = 0;
  double best = 1e300;
  for (size_t i = 0; i < prof.points.size(); ++i) {
    REQUIRE(prof.points[i].valid);
    if (prof.points[i].fwhm < best) {
      best = prof.points[i].fwhm;
      argmin = i;
    }
  }
  CHECK(angle_dist(prof.points[argmin].k, kstar) < 1e-12);

  // Against the per-momentum noiseless baseline (the windowed linewidth itself
  // undulates with k), mild timing noise broadens every unprotected momentum
  // while the protected column stays noiseless to machine precision: each
  // realization is identical there, so averaging changes nothing.
  noise::NoiseSpec mild;
  mild.sigma = 0.2;
  mild.schedule = noise::Schedule::Stroboscopic;
  mild.master_seed = 12;
  const auto bd2 = analysis::ensemble_band(init, p, mild, 60, 64, 1, analysis::Window::Hann);
  const auto prof2 = analysis::fwhm_profile(bd2, analysis::Band::Upper);
  const auto bd0 = analysis::ensemble_band(init, p, noise::NoiseSpec{}, 1, 64, 1,
                                           analysis::Window::Hann);
  const auto prof0 = analysis::fwhm_profile(bd0, analysis::Band::Upper);
  REQUIRE(prof2.points.size() == prof0.points.size());
  for (size_t i = 0; i < prof2.points.size(); ++i) {
    REQUIRE(prof2.points[i].valid);
    const double excess = prof2.points[i].fwhm - prof0.points[i].fwhm;
    if (angle_dist(prof2.points[i].k, kstar) < 1e-12)
      CHECK(std::abs(excess) < 1e-9);
    else
      CHECK(excess > 2e-4);
  }
}

TEST_CASE("flat-band protocol hosts localized gap states on both edges") {
  const auto rep = analysis::extract_edge_states(flat_protocol(44));
  CHECK(rep.zero_gap_open);
  CHECK(rep.pi_gap_open);
  REQUIRE(rep.states.size() >= 2);

  const MatrixXcd u = lattice::floquet_operator_real(flat_protocol(44)).dense();
  bool saw_left = false, saw_right = false;
  const analysis::EdgeState* left_pi = nullptr;
  for (const auto& st : rep.states) {
    CHECK(st.ipr > 4.0 / 44);
    CHECK(std::abs(st.vec.norm() - 1.0) < 1e-12);
    const VectorXcd resid = u * st.vec - std::exp(iunit * st.quasienergy) * st.vec;
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-10);
    if (st.side == "left") saw_left = true;
    if (st.side == "right") saw_right = true;
    if (st.side == "left" && st.gap == "pi") left_pi = &st;
  }
  CHECK(saw_left);
  CHECK(saw_right);
  REQUIRE(left_pi != nullptr);
  CHECK(std::abs(left_pi->quasienergy - fold_angle(pi - 0.2 * pi)) < 1e-10);

  // The bound-state energy is a boundary property; growing the bulk cannot move it.
  const auto bigger = analysis::extract_edge_states(flat_protocol(54));
  const analysis::EdgeState* left_pi_big = nullptr;
  for (const auto& st : bigger.states)
    if (st.side == "left" && st.gap == "pi") left_pi_big = &st;
  REQUIRE(left_pi_big != nullptr);
  CHECK(std::abs(left_pi_big->quasienergy - left_pi->quasienergy) < 1e-9);
}

TEST_CASE("edge extraction reports closed gaps instead of inventing states") {
  const auto touching = analysis::extract_edge_states(
      params(0.25 * pi, 0.25 * pi, 0.0, 30, Boundary::Open));
  CHECK_FALSE(touching.pi_gap_open);
  CHECK(touching.zero_gap_open);
  CHECK(touching.band_max >= pi - 1e-6);
  for (const auto& st : touching.states) CHECK(st.gap == "zero");

  const auto gapless =
      analysis::extract_edge_states(params(0.0, 0.0, 0.0, 30, Boundary::Open));
  CHECK_FALSE(gapless.zero_gap_open);
  CHECK_FALSE(gapless.pi_gap_open);
  CHECK(gapless.states.empty());
  CHECK_FALSE(gapless.diagnostic.empty());

  CHECK_THROWS_AS(analysis::extract_edge_states(
                      params(0.5 * pi, 0.0, 0.2 * pi, 30, Boundary::Periodic)),
                  std::invalid_argument);
}

TEST_CASE("ensemble projections convert to return-probability series") {
  const ProtocolParams p = params(0.0, 0.25 * pi, 0.0, 9, Boundary::Open);
  const auto init = traj::single_site_state(p, -1, traj::Ring::Alpha);
  noise::NoiseSpec spec;
  spec.sigma = 0.3;
  spec.schedule = noise::Schedule::Stroboscopic;
  spec.master_seed = 3;
  traj::EnsembleOptions opts;
  opts.projections = {VectorXcd::Unit(18, 2 * 4)};  // the injection site itself
  const auto stats = traj::run_ensemble(init, p, spec, 10, 10, opts);
  const auto series = analysis::return_from_ensemble(stats, 0);
  REQUIRE(series.p.size() == 6);  // periods 0..5
  CHECK(series.provenance == "mc");
  CHECK(series.p[0] == 1.0);
  CHECK(series.se[0] == 0.0);
  for (double v : series.p) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(analysis::return_from_ensemble(stats, 1), std::invalid_argument);

  MatrixXd m(3, 2);
  m << 1.0, 0.5, 0.8, 0.4, 0.6, 0.3;
  const auto wrapped = analysis::return_from_projection_series(m, 1, "master");
  CHECK(wrapped.provenance == "master");
  REQUIRE(wrapped.p.size() == 3);
  CHECK(wrapped.p[2] == 0.3);
  CHECK(wrapped.se[1] == 0.0);
}

TEST_CASE("edge recurrence uses the closed-form noise coefficients") {
  CHECK(std::abs(analysis::recurrence_return(1.0, 0.0, 0.12 * pi) - 0.87629126771039868) <
        1e-12);
  // The two coefficients sum to one, so equal populations are a fixed point.
  for (const double sigma : {0.1, 0.5, 1.3})
    CHECK(std::abs(analysis::recurrence_return(0.37, 0.37, sigma) - 0.37) < 1e-15);
  CHECK(analysis::recurrence_return(1.0, 0.0, 0.4) <
        analysis::recurrence_return(1.0, 0.0, 0.2));
  CHECK_THROWS_AS(analysis::recurrence_return(1.5, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("the closed-form return curve evaluates literally") {
  analysis::ReturnProbSeries nb;
  nb.p = {0.0, 0.1, 0.1, 0.1, 0.1};
  nb.se.assign(5, 0.0);
  const double g = 0.25;
  const auto out = analysis::analytic_return(0.9, g, nb);
  CHECK(out.provenance == "analytic");
  REQUIRE(out.p.size() == 5);
  CHECK(std::abs(out.p[0] - 0.9) < 1e-15);
  CHECK(std::abs(out.p[3] - (0.9 * std::exp(-3.0 * g) + g * 0.1)) < 1e-15);
  CHECK(out.se[4] == 0.0);
}

TEST_CASE("decay fits identify exponentials, power tails, and saturation") {
  std::vector<double> expo, power, mix, flat, rising;
  for (int m = 0; m < 100; ++m) {
    expo.push_back(std::exp(-0.1 * m));
    power.push_back(std::pow(1.0 + m, -1.5));
    mix.push_back(std::exp(-0.3 * m) + 0.01 * std::pow(1.0 + m, -0.5));
    flat.push_back(0.25);
    rising.push_back(0.01 * (m + 1));
  }

  const auto re = analysis::fit_decay(expo);
  CHECK(std::abs(re.exp_rate - 0.1) < 0.002);
  CHECK(re.early_residual < 1e-10);
  CHECK(re.monotone);
  CHECK_FALSE(re.saturated);

  const auto rp = analysis::fit_decay(power);
  CHECK(std::abs(rp.tail_exponent + 1.5) < 0.075);
  CHECK(rp.log_curvature > 0.0);  // convex on a log scale, unlike an exponential

  const auto rm = analysis::fit_decay(mix);
  CHECK(rm.has_crossover);
  CHECK(rm.crossover > 8.0);
  CHECK(rm.crossover < 35.0);
  CHECK(std::abs(rm.exp_rate - 0.3) < 0.02);

  const auto rf = analysis::fit_decay(flat);
  CHECK(rf.saturated);
  CHECK(rf.monotone);

  const auto rr = analysis::fit_decay(rising);
  CHECK_FALSE(rr.monotone);

  CHECK_THROWS_AS(analysis::fit_decay(std::vector<double>(20, 1.0)), std::invalid_argument);
}
