#include "dsqw/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsqw/lattice.hpp"
#include "dsqw/parallel.hpp"

namespace dsqw::analysis {

namespace {

// Folded, ascending DFT axis of size n together with the permutation that
// sorts the raw harmonic index.
std::pair<VectorXd, std::vector<int>> folded_axis(int n) {
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> vals(static_cast<size_t>(n));
  for (int q = 0; q < n; ++q)
    vals[static_cast<size_t>(q)] = fold_angle(2.0 * pi * static_cast<double>(q) / n);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return vals[static_cast<size_t>(a)] < vals[static_cast<size_t>(b)]; });
  VectorXd axis(n);
  for (int i = 0; i < n; ++i) axis(i) = vals[static_cast<size_t>(order[static_cast<size_t>(i)])];
  return {axis, order};
}

MatrixXcd dft_matrix(int n) {
  MatrixXcd f(n, n);
  for (int q = 0; q < n; ++q)
    for (int j = 0; j < n; ++j)
      f(q, j) = std::exp(-iunit * (2.0 * pi * static_cast<double>(q) * j / n));
  return f;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, residual = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
  }
  LineFit f;
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) return f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

// Quadratic least squares y ~ c0 + c1 x + c2 x^2; returns c2.
double fit_quadratic_coeff(const std::vector<double>& x, const std::vector<double>& y) {
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < x.size(); ++i) {
    const Eigen::Vector3d phi(1.0, x[i], x[i] * x[i]);
    a += phi * phi.transpose();
    b += y[i] * phi;
  }
  return a.fullPivLu().solve(b)(2);
}

}  // namespace

BandData band_structure(const traj::Record& rec, Window window) {
  if (rec.mode != traj::RecordMode::Stroboscopic)
    throw std::invalid_argument("band_structure needs a stroboscopic record");
  for (int m : rec.steps)
    if (m % 2 != 0)
      throw std::invalid_argument("band_structure needs full-period records");

  const int fine = static_cast<int>(rec.alpha.cols());
  const int m_steps = static_cast<int>(rec.alpha.rows());
  if (m_steps < 1) throw std::invalid_argument("empty record");
  // Completed periods populate the coarse sites (odd fine positions) only.
  const int sites = fine / 2;

  MatrixXcd a(m_steps, sites), b(m_steps, sites);
  for (int j = 0; j < sites; ++j) {
    a.col(j) = rec.alpha.col(2 * j + 1);
    b.col(j) = rec.beta.col(2 * j + 1);
  }
  if (window == Window::Hann && m_steps > 1) {
    for (int t = 0; t < m_steps; ++t) {
      const double w = 0.5 * (1.0 - std::cos(2.0 * pi * t / (m_steps - 1)));
      a.row(t) *= w;
      b.row(t) *= w;
    }
  }

  const MatrixXcd fs = dft_matrix(sites);
  const MatrixXcd ft = dft_matrix(m_steps);
  const MatrixXcd ta = fs * a.transpose() * ft;  // (k harmonic) x (E harmonic)
  const MatrixXcd tb = fs * b.transpose() * ft;
  const MatrixXd raw =
      (ta.cwiseAbs2() + tb.cwiseAbs2()) / (static_cast<double>(sites) * m_steps);

  auto [k_axis, k_order] = folded_axis(sites);
  auto [e_axis, e_order] = folded_axis(m_steps);
  BandData bd;
  bd.k = k_axis;
  bd.e = e_axis;
  bd.intensity.resize(sites, m_steps);
  for (int i = 0; i < sites; ++i)
    for (int r = 0; r < m_steps; ++r)
      bd.intensity(i, r) =
          raw(k_order[static_cast<size_t>(i)], e_order[static_cast<size_t>(r)]);
  return bd;
}

BandData ensemble_band(const traj::StateVector& initial, const ProtocolParams& p,
                       const noise::NoiseSpec& spec, long n_realizations, int n_steps,
                       int threads, Window window) {
  noise::validate(spec);
  if (n_realizations < 1) throw std::invalid_argument("need at least one realization");
  struct Partial {
    long n = 0;
    MatrixXd sum;
  };
  auto fold = [&](Partial& acc, long i) {
    const auto taus = noise::sample_sequence(spec, n_steps, static_cast<std::uint64_t>(i));
    const auto rec =
        traj::evolve_trajectory(initial, p, taus, n_steps, traj::RecordMode::Stroboscopic);
    const BandData bd = band_structure(rec, window);
    if (acc.n == 0)
      acc.sum = bd.intensity;
    else
      acc.sum += bd.intensity;
    acc.n += 1;
  };
  auto merge = [](Partial& x, Partial& y) {
    if (y.n == 0) return;
    if (x.n == 0)
      x = std::move(y);
    else
      x.sum += y.sum;
    x.n += y.n;
  };
  Partial total =
      par::tree_reduce<Partial>(0, n_realizations, 1, par::spawn_depth_for(threads), fold, merge);

  const int fine = traj::fine_sites(p);
  const int sites = fine / 2;
  BandData bd;
  bd.k = folded_axis(sites).first;
  bd.e = folded_axis(n_steps / 2).first;
  bd.intensity = total.sum / static_cast<double>(total.n);
  return bd;
}

FWHMProfile fwhm_profile(const BandData& band, Band which) {
  FWHMProfile prof;
  const int ne = static_cast<int>(band.e.size());
  for (int i = 0; i < static_cast<int>(band.k.size()); ++i) {
    FWHMPoint pt;
    pt.k = band.k(i);

    // Samples restricted to the band's half-plane.
    std::vector<double> es, ys;
    for (int r = 0; r < ne; ++r) {
      const double e = band.e(r);
      if ((which == Band::Upper && e > 0.0) || (which == Band::Lower && e < 0.0)) {
        es.push_back(e);
        ys.push_back(band.intensity(i, r));
      }
    }
    if (es.size() >= 5) {
      const size_t peak =
          static_cast<size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
      const double e0 = es[peak];
      std::vector<double> ew, yw;
      for (size_t r = 0; r < es.size(); ++r)
        if (std::abs(es[r] - e0) <= 0.25 * pi) {
          ew.push_back(es[r]);
          yw.push_back(ys[r]);
        }
      const double ymax = ys[peak];
      if (ew.size() >= 5 && ymax > 0.0) {
        // Closed-form seed: weighted LS of log y on a quadratic.
        Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        for (size_t r = 0; r < ew.size(); ++r) {
          if (yw[r] <= ymax * 1e-12) continue;
          const double w = yw[r] * yw[r];
          const Eigen::Vector3d phi(1.0, ew[r], ew[r] * ew[r]);
          m += w * phi * phi.transpose();
          rhs += w * std::log(yw[r]) * phi;
        }
        const Eigen::Vector3d c = m.fullPivLu().solve(rhs);
        double mu, s, amp;
        if (c(2) < 0.0) {
          mu = -c(1) / (2.0 * c(2));
          s = std::sqrt(-1.0 / (2.0 * c(2)));
          amp = std::exp(c(0) - c(1) * c(1) / (4.0 * c(2)));
        } else {
          // Log-quadratic seed failed (spiky column); fall back to moments.
          double w = 0, we = 0;
          for (size_t r = 0; r < ew.size(); ++r) {
            w += yw[r];
            we += yw[r] * (ew[r] - e0) * (ew[r] - e0);
          }
          mu = e0;
          s = std::max(std::sqrt(we / w), 0.25 * pi / static_cast<double>(ne));
          amp = ymax;
        }
        {
          auto sse = [&](double am, double m_, double s_) {
            double acc = 0;
            for (size_t r = 0; r < ew.size(); ++r) {
              const double d = am * std::exp(-0.5 * (ew[r] - m_) * (ew[r] - m_) / (s_ * s_)) - yw[r];
              acc += d * d;
            }
            return acc;
          };
          double best = sse(amp, mu, s);
          for (int it = 0; it < 30; ++it) {  // Gauss-Newton refinement
            Eigen::Matrix3d jt_j = Eigen::Matrix3d::Zero();
            Eigen::Vector3d jt_r = Eigen::Vector3d::Zero();
            for (size_t r = 0; r < ew.size(); ++r) {
              const double z = (ew[r] - mu) / s;
              const double g = std::exp(-0.5 * z * z);
              const double f = amp * g;
              const Eigen::Vector3d jrow(g, f * z / s, f * z * z / s);
              jt_j += jrow * jrow.transpose();
              jt_r += (f - yw[r]) * jrow;
            }
            Eigen::Vector3d step = jt_j.fullPivLu().solve(jt_r);
            double scale = 1.0;
            bool improved = false;
            for (int h = 0; h < 12; ++h) {
              const double am = amp - scale * step(0);
              const double m_ = mu - scale * step(1);
              const double s_ = s - scale * step(2);
              if (s_ > 1e-6 && am > 0.0) {
                const double v = sse(am, m_, s_);
                if (v < best) {
                  amp = am; mu = m_; s = s_; best = v;
                  improved = true;
                  break;
                }
              }
              scale *= 0.5;
            }
            if (!improved || step.cwiseAbs().maxCoeff() < 1e-12) break;
          }
          if (s > 0.0 && s < pi && std::isfinite(s) && std::abs(mu - e0) < 0.5 * pi) {
            pt.valid = true;
            pt.center = mu;
            pt.fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0)) * s;
            pt.residual = std::sqrt(best / static_cast<double>(ew.size())) / ymax;
          }
        }
      }
    }
    prof.points.push_back(pt);
  }
  return prof;
}

EdgeReport extract_edge_states(const ProtocolParams& p) {
  if (p.boundary != Boundary::Open)
    throw std::invalid_argument("edge extraction needs an open boundary");
  EdgeReport rep;

  double bmin = pi, bmax = 0.0;
  const int grid = 512;
  for (int q = 0; q < grid; ++q) {
    const double e = lattice::quasienergies(p, -pi + 2.0 * pi * q / grid).e_plus;
    bmin = std::min(bmin, e);
    bmax = std::max(bmax, e);
  }
  rep.band_min = bmin;
  rep.band_max = bmax;
  const double gap_tol = 1e-6;
  rep.zero_gap_open = bmin > gap_tol;
  rep.pi_gap_open = bmax < pi - gap_tol;
  if (!rep.zero_gap_open && !rep.pi_gap_open) {
    rep.diagnostic = "no open bulk gap at these parameters";
    return rep;
  }

  const MatrixXcd u = lattice::floquet_operator_real(p).dense();
  Eigen::ComplexEigenSolver<MatrixXcd> es(u);
  const int dim = static_cast<int>(u.rows());
  for (int i = 0; i < dim; ++i) {
    const double e = std::arg(es.eigenvalues()(i));
    const double ae = std::abs(e);
    const double dist = ae < bmin ? bmin - ae : (ae > bmax ? ae - bmax : 0.0);
    if (dist <= gap_tol) continue;
    VectorXcd v = es.eigenvectors().col(i);
    v /= v.norm();
    const double ipr = v.cwiseAbs2().cwiseAbs2().sum();
    if (ipr <= 4.0 / p.n_sites) continue;
    EdgeState st;
    st.vec = v;
    st.quasienergy = e;
    st.gap = ae < bmin ? "zero" : "pi";
    st.ipr = ipr;
    const int quarter = std::max(1, dim / 4);
    const double front = v.head(quarter).squaredNorm();
    const double back = v.tail(quarter).squaredNorm();
    st.side = front >= back ? "left" : "right";
    rep.states.push_back(std::move(st));
  }
  std::sort(rep.states.begin(), rep.states.end(),
            [](const EdgeState& x, const EdgeState& y) { return x.quasienergy < y.quasienergy; });
  if (rep.states.empty()) rep.diagnostic = "no localized gap states found";
  return rep;
}

ReturnProbSeries return_from_ensemble(const traj::EnsembleStats& stats, int column) {
  if (column < 0 || column >= stats.projection_mean.cols())
    throw std::invalid_argument("projection column out of range");
  ReturnProbSeries s;
  s.provenance = "mc";
  for (int q = 0; q < stats.projection_mean.rows(); ++q) {
    s.p.push_back(stats.projection_mean(q, column));
    s.se.push_back(stats.projection_se(q, column));
  }
  return s;
}

ReturnProbSeries return_from_projection_series(const MatrixXd& projections, int column,
                                               const std::string& provenance) {
  if (column < 0 || column >= projections.cols())
    throw std::invalid_argument("projection column out of range");
  ReturnProbSeries s;
  s.provenance = provenance;
  for (int q = 0; q < projections.rows(); ++q) {
    s.p.push_back(projections(q, column));
    s.se.push_back(0.0);
  }
  return s;
}

double recurrence_return(double p_edge, double p_neighbor, double sigma) {
  if (p_edge < -1e-9 || p_edge > 1.0 + 1e-9 || p_neighbor < -1e-9 || p_neighbor > 1.0 + 1e-9)
    throw std::invalid_argument("recurrence inputs must be probabilities");
  const auto g = noise::gamma_coefficients(sigma);
  return g.moment(noise::TrigMoment::Cos2) * p_edge + g.gamma_plus * p_neighbor;
}

ReturnProbSeries analytic_return(double p0, double gamma_plus,
                                 const ReturnProbSeries& neighbor) {
  ReturnProbSeries s;
  s.provenance = "analytic";
  for (size_t m = 0; m < neighbor.p.size(); ++m) {
    s.p.push_back(p0 * std::exp(-static_cast<double>(m) * gamma_plus) +
                  gamma_plus * neighbor.p[m]);
    s.se.push_back(0.0);
  }
  return s;
}

DecayReport fit_decay(const std::vector<double>& p) {
  if (p.size() < 21) throw std::invalid_argument("fit_decay needs at least 20 periods");
  const int t_max = static_cast<int>(p.size()) - 1;
  DecayReport rep;

  std::vector<double> logp(p.size());
  for (size_t i = 0; i < p.size(); ++i) logp[i] = std::log(std::max(p[i], 1e-300));

  for (int m = 0; m < t_max; ++m)
    if (p[static_cast<size_t>(m + 1)] > p[static_cast<size_t>(m)] * 1.05 + 1e-12)
      rep.monotone = false;

  // Early exponential window. Kept tight: the pure-exponential factor is exact
  // only while the neighbor population is still negligible, which the edge
  // recurrence limits to the first few periods.
  rep.early_lo = 0;
  rep.early_hi = 3;
  {
    std::vector<double> xs, ys;
    for (int m = rep.early_lo; m <= rep.early_hi; ++m) {
      xs.push_back(m);
      ys.push_back(logp[static_cast<size_t>(m)]);
    }
    const LineFit f = fit_line(xs, ys);
    rep.exp_rate = -f.slope;
    rep.early_residual = f.residual;

    // Late power-law window.
    rep.late_lo = std::max(t_max / 3, rep.early_hi + 3);
    rep.late_hi = t_max;
    double tail_max = 0.0, tail_min = 1e300;
    for (int m = rep.late_lo; m <= rep.late_hi; ++m) {
      tail_max = std::max(tail_max, p[static_cast<size_t>(m)]);
      tail_min = std::min(tail_min, p[static_cast<size_t>(m)]);
    }
    rep.saturated = tail_max - tail_min <= 0.02 * tail_max;
    std::vector<double> lx, ly;
    for (int m = std::max(1, rep.late_lo); m <= rep.late_hi; ++m) {
      lx.push_back(std::log(static_cast<double>(m)));
      ly.push_back(logp[static_cast<size_t>(m)]);
    }
    const LineFit g = fit_line(lx, ly);
    rep.tail_exponent = g.slope;
    rep.late_residual = g.residual;

    // Crossover: first intersection of the two fitted laws.
    double prev = 0.0;
    for (int m = 1; m <= t_max; ++m) {
      const double h = (f.intercept + f.slope * m) -
                       (g.intercept + g.slope * std::log(static_cast<double>(m)));
      if (m > 1 && ((prev <= 0.0) != (h <= 0.0))) {
        rep.has_crossover = true;
        rep.crossover = (m - 1) + std::abs(prev) / (std::abs(prev) + std::abs(h));
        break;
      }
      prev = h;
    }
    if (!rep.has_crossover) rep.crossover = t_max;
  }

  // Log-scale curvature over the pre-saturation tail.
  {
    double floor = 1e300;
    for (double v : p) floor = std::min(floor, v);
    int cutoff = t_max;
    for (int m = 0; m <= t_max; ++m)
      if (p[static_cast<size_t>(m)] <= std::max(floor * 1.5, 1e-300)) {
        cutoff = m;
        break;
      }
    const int lo = rep.early_hi;
    const int hi = std::max(cutoff, lo + 8);
    std::vector<double> xs, ys;
    for (int m = lo; m <= std::min(hi, t_max); ++m) {
      xs.push_back(m);
      ys.push_back(logp[static_cast<size_t>(m)]);
    }
    rep.log_curvature = fit_quadratic_coeff(xs, ys);
  }
  return rep;
}

}  // namespace dsqw::analysis
