#include "dsqw/trajectory.hpp"

#include <cmath>

#include "dsqw/lattice.hpp"
#include "dsqw/parallel.hpp"

namespace dsqw::traj {

namespace {

constexpr long kGrain = 16;  // merge-tree leaf size, fixed for determinism

// Streaming mean/variance accumulators with pairwise merge. Counts are tracked
// by the owning partial; every row is updated exactly once per sample.
struct WelfordC {
  MatrixXcd mean;
  MatrixXd m2;
  void init(Eigen::Index r, Eigen::Index c) {
    mean = MatrixXcd::Zero(r, c);
    m2 = MatrixXd::Zero(r, c);
  }
  void add_row(long n_new, Eigen::Index row, const Eigen::RowVectorXcd& x) {
    Eigen::RowVectorXcd delta = x - mean.row(row);
    mean.row(row) += delta / static_cast<double>(n_new);
    m2.row(row) += (delta.conjugate().cwiseProduct(x - mean.row(row))).real();
  }
  void add(long n_new, const MatrixXcd& x) {
    MatrixXcd delta = x - mean;
    mean += delta / static_cast<double>(n_new);
    m2 += (delta.conjugate().cwiseProduct(x - mean)).real();
  }
  void merge(const WelfordC& o, long na, long nb) {
    const double nab = static_cast<double>(na + nb);
    MatrixXcd delta = o.mean - mean;
    mean += delta * (static_cast<double>(nb) / nab);
    m2 += o.m2 + delta.cwiseAbs2() * (static_cast<double>(na) * static_cast<double>(nb) / nab);
  }
};

struct WelfordR {
  MatrixXd mean, m2;
  void init(Eigen::Index r, Eigen::Index c) {
    mean = MatrixXd::Zero(r, c);
    m2 = MatrixXd::Zero(r, c);
  }
  void add_row(long n_new, Eigen::Index row, const Eigen::RowVectorXd& x) {
    Eigen::RowVectorXd delta = x - mean.row(row);
    mean.row(row) += delta / static_cast<double>(n_new);
    m2.row(row) += delta.cwiseProduct(x - mean.row(row));
  }
  void add_at(long n_new, Eigen::Index row, Eigen::Index col, double x) {
    const double delta = x - mean(row, col);
    mean(row, col) += delta / static_cast<double>(n_new);
    m2(row, col) += delta * (x - mean(row, col));
  }
  void merge(const WelfordR& o, long na, long nb) {
    const double nab = static_cast<double>(na + nb);
    MatrixXd delta = o.mean - mean;
    mean += delta * (static_cast<double>(nb) / nab);
    m2 += o.m2 + delta.cwiseAbs2() * (static_cast<double>(na) * static_cast<double>(nb) / nab);
  }
};

MatrixXd se_from(const MatrixXd& m2, long n) {
  if (n < 2) return MatrixXd::Zero(m2.rows(), m2.cols());
  return (m2 / (static_cast<double>(n) * static_cast<double>(n - 1))).cwiseSqrt();
}

// Calls on_state(step_index, state) for step 0 and after every step.
template <class F>
void evolve_with(const StateVector& initial, const ProtocolParams& p,
                 std::span<const double> taus, int n_steps, F&& on_state) {
  if (initial.sites() != fine_sites(p))
    throw std::invalid_argument("state size does not match the lattice");
  if (static_cast<int>(taus.size()) < n_steps)
    throw std::invalid_argument("noise sequence shorter than n_steps");
  StateVector s = initial;
  on_state(0, s);
  for (int m = 1; m <= n_steps; ++m) {
    const bool odd = (m % 2) == 1;
    const double theta = (odd ? p.theta1 : p.theta2) + taus[static_cast<size_t>(m - 1)];
    const double phi_m = odd ? p.phi : -p.phi;
    s = apply_step(s, theta, phi_m, p.boundary);
    on_state(m, s);
  }
}

std::vector<int> record_steps(RecordMode mode, int n_steps) {
  std::vector<int> steps;
  if (mode == RecordMode::Every) {
    for (int m = 0; m <= n_steps; ++m) steps.push_back(m);
  } else {
    // One slice per completed Floquet period; amplitudes sit on coarse sites.
    for (int m = 2; m <= n_steps; m += 2) steps.push_back(m);
  }
  return steps;
}

int record_row(RecordMode mode, int step) {
  if (mode == RecordMode::Every) return step;
  return (step >= 2 && (step % 2) == 0) ? step / 2 - 1 : -1;
}

}  // namespace

int fine_sites(const ProtocolParams& p) {
  validate_lattice(p);
  return p.boundary == Boundary::Periodic ? 2 * p.n_sites : 2 * p.n_sites + 1;
}

StateVector embed_coarse(const ProtocolParams& p, const VectorXcd& coarse) {
  if (coarse.size() != 2 * p.n_sites)
    throw std::invalid_argument("coarse vector must have 2*n_sites entries");
  StateVector s;
  const int L = fine_sites(p);
  s.alpha = VectorXcd::Zero(L);
  s.beta = VectorXcd::Zero(L);
  for (int j = 0; j < p.n_sites; ++j) {
    s.alpha(coarse_to_fine(j)) = coarse(2 * j);
    s.beta(coarse_to_fine(j)) = coarse(2 * j + 1);
  }
  return s;
}

VectorXcd extract_coarse(const ProtocolParams& p, const StateVector& state) {
  if (state.sites() != fine_sites(p))
    throw std::invalid_argument("state size does not match the lattice");
  VectorXcd coarse(2 * p.n_sites);
  for (int j = 0; j < p.n_sites; ++j) {
    coarse(2 * j) = state.alpha(coarse_to_fine(j));
    coarse(2 * j + 1) = state.beta(coarse_to_fine(j));
  }
  return coarse;
}

StateVector single_site_state(const ProtocolParams& p, int coarse_site, Ring ring) {
  if (coarse_site < 0) coarse_site = p.n_sites / 2;
  if (coarse_site >= p.n_sites)
    throw std::invalid_argument("injection site outside the lattice");
  VectorXcd coarse = VectorXcd::Zero(2 * p.n_sites);
  coarse(2 * coarse_site + (ring == Ring::Alpha ? 0 : 1)) = 1.0;
  return embed_coarse(p, coarse);
}

StateVector bloch_state(const ProtocolParams& p, double k, const Vector2cd& spinor) {
  if (p.boundary != Boundary::Periodic)
    throw std::invalid_argument("bloch_state needs a periodic lattice");
  VectorXcd coarse(2 * p.n_sites);
  const double norm = 1.0 / std::sqrt(static_cast<double>(p.n_sites));
  for (int j = 0; j < p.n_sites; ++j) {
    const complexd w = norm * std::exp(iunit * (k * static_cast<double>(j)));
    coarse(2 * j) = w * spinor(0);
    coarse(2 * j + 1) = w * spinor(1);
  }
  return embed_coarse(p, coarse);
}

StateVector apply_step(const StateVector& state, double theta, double phi_m,
                       Boundary boundary) {
  const int L = state.sites();
  if (state.beta.size() != L) throw std::invalid_argument("alpha/beta size mismatch");
  if (L < 2) throw std::invalid_argument("state needs at least 2 sites");
  const double c = std::cos(theta), s = std::sin(theta);
  const complexd ph = std::exp(iunit * phi_m);
  StateVector out;
  out.alpha = VectorXcd::Zero(L);
  out.beta = VectorXcd::Zero(L);

  if (boundary == Boundary::Periodic) {
    for (int n = 0; n < L; ++n) {
      const int l = (n - 1 + L) % L, r = (n + 1) % L;
      out.alpha(n) = ph * (c * state.alpha(l) + iunit * s * state.beta(l));
      out.beta(n) = iunit * s * state.alpha(r) + c * state.beta(r);
    }
    return out;
  }

  // Coin outputs; the extremal positions are exact total-reflection mirrors.
  VectorXcd A(L), B(L);
  for (int n = 1; n < L - 1; ++n) {
    A(n) = c * state.alpha(n) + iunit * s * state.beta(n);
    B(n) = iunit * s * state.alpha(n) + c * state.beta(n);
  }
  A(0) = iunit * state.beta(0);
  B(0) = iunit * state.alpha(0);
  A(L - 1) = iunit * state.beta(L - 1);
  B(L - 1) = iunit * state.alpha(L - 1);

  out.alpha(0) = ph * B(0);
  for (int n = 1; n < L; ++n) out.alpha(n) = ph * A(n - 1);
  for (int n = 0; n < L - 1; ++n) out.beta(n) = B(n + 1);
  out.beta(L - 1) = A(L - 1);
  return out;
}

Record evolve_trajectory(const StateVector& initial, const ProtocolParams& p,
                         std::span<const double> taus, int n_steps, RecordMode mode) {
  Record rec;
  rec.mode = mode;
  rec.steps = record_steps(mode, n_steps);
  const int L = fine_sites(p);
  const auto rows = static_cast<Eigen::Index>(rec.steps.size());
  rec.alpha = MatrixXcd::Zero(rows, L);
  rec.beta = MatrixXcd::Zero(rows, L);
  evolve_with(initial, p, taus, n_steps, [&](int m, const StateVector& s) {
    const int row = record_row(mode, m);
    if (row >= 0 && row < rows) {
      rec.alpha.row(row) = s.alpha.transpose();
      rec.beta.row(row) = s.beta.transpose();
    }
  });
  return rec;
}

namespace {

struct EnsemblePartial {
  long n = 0;
  bool init = false;
  WelfordC alpha, beta;
  WelfordR a2, b2;
  std::vector<WelfordC> rho;
  WelfordR proj;
};

}  // namespace

EnsembleStats run_ensemble(const StateVector& initial, const ProtocolParams& p,
                           const noise::NoiseSpec& spec, long n_realizations, int n_steps,
                           const EnsembleOptions& opts) {
  noise::validate(spec);
  if (n_realizations < 1) throw std::invalid_argument("need at least one realization");
  if (n_steps < 1) throw std::invalid_argument("need at least one step");
  const int dim = 2 * p.n_sites;
  if (opts.density && dim > 64)
    throw ResourceRefusal("averaged density needs 2*n_sites <= 64, got " + std::to_string(dim));
  for (const auto& v : opts.projections)
    if (v.size() != dim) throw std::invalid_argument("projection target has wrong dimension");
  if (initial.sites() != fine_sites(p))
    throw std::invalid_argument("state size does not match the lattice");

  const std::vector<int> rec_steps = record_steps(opts.record, n_steps);
  const int n_periods = n_steps / 2;
  const auto n_targets = static_cast<Eigen::Index>(opts.projections.size());
  const int L = fine_sites(p);

  auto make_init = [&](EnsemblePartial& acc) {
    if (opts.amplitude_stats) {
      const auto rows = static_cast<Eigen::Index>(rec_steps.size());
      acc.alpha.init(rows, L);
      acc.beta.init(rows, L);
      acc.a2.init(rows, L);
      acc.b2.init(rows, L);
    }
    if (opts.density) {
      acc.rho.resize(static_cast<size_t>(n_periods) + 1);
      for (auto& w : acc.rho) w.init(dim, dim);
    }
    acc.proj.init(n_periods + 1, n_targets);
    acc.init = true;
  };

  auto fold = [&](EnsemblePartial& acc, long i) {
    if (!acc.init) make_init(acc);
    const auto taus = noise::sample_sequence(spec, n_steps, static_cast<std::uint64_t>(i));
    const long n_new = acc.n + 1;
    evolve_with(initial, p, taus, n_steps, [&](int m, const StateVector& s) {
      if (opts.amplitude_stats) {
        const int row = record_row(opts.record, m);
        if (row >= 0 && row < static_cast<int>(rec_steps.size())) {
          acc.alpha.add_row(n_new, row, s.alpha.transpose());
          acc.beta.add_row(n_new, row, s.beta.transpose());
          acc.a2.add_row(n_new, row, s.alpha.cwiseAbs2().transpose());
          acc.b2.add_row(n_new, row, s.beta.cwiseAbs2().transpose());
        }
      }
      if ((m % 2) == 0) {
        const int period = m / 2;
        if (opts.density || n_targets > 0) {
          const VectorXcd psi = extract_coarse(p, s);
          if (opts.density)
            acc.rho[static_cast<size_t>(period)].add(n_new, psi * psi.adjoint());
          for (Eigen::Index t = 0; t < n_targets; ++t) {
            const complexd ov = opts.projections[static_cast<size_t>(t)].dot(psi);
            acc.proj.add_at(n_new, period, t, std::norm(ov));
          }
        }
      }
    });
    acc.n = n_new;
  };

  auto merge = [&](EnsemblePartial& a, EnsemblePartial& b) {
    if (!b.init) return;
    if (!a.init) {
      a = std::move(b);
      return;
    }
    if (opts.amplitude_stats) {
      a.alpha.merge(b.alpha, a.n, b.n);
      a.beta.merge(b.beta, a.n, b.n);
      a.a2.merge(b.a2, a.n, b.n);
      a.b2.merge(b.b2, a.n, b.n);
    }
    for (size_t q = 0; q < a.rho.size(); ++q) a.rho[q].merge(b.rho[q], a.n, b.n);
    a.proj.merge(b.proj, a.n, b.n);
    a.n += b.n;
  };

  EnsemblePartial total = par::tree_reduce<EnsemblePartial>(
      0, n_realizations, kGrain, par::spawn_depth_for(opts.threads), fold, merge);

  EnsembleStats out;
  out.n = total.n;
  out.mode = opts.record;
  out.steps = rec_steps;
  if (opts.amplitude_stats) {
    out.mean_alpha = std::move(total.alpha.mean);
    out.mean_beta = std::move(total.beta.mean);
    out.incoherent_alpha = std::move(total.a2.mean);
    out.incoherent_beta = std::move(total.b2.mean);
    out.se_incoherent_alpha = se_from(total.a2.m2, total.n);
    out.se_incoherent_beta = se_from(total.b2.m2, total.n);
    out.se_mean_alpha = se_from(total.alpha.m2, total.n);
    out.se_mean_beta = se_from(total.beta.m2, total.n);
  }
  if (opts.density) {
    out.mean_density.reserve(total.rho.size());
    out.se_density.reserve(total.rho.size());
    for (auto& w : total.rho) {
      out.mean_density.push_back(std::move(w.mean));
      out.se_density.push_back(se_from(w.m2, total.n));
    }
  }
  out.projection_mean = std::move(total.proj.mean);
  out.projection_se = se_from(total.proj.m2, total.n);
  return out;
}

BulkMcSeries bulk_density_mc(const ProtocolParams& p, double k, const noise::NoiseSpec& spec,
                             long n_realizations, int n_periods, const Matrix2cd& rho0,
                             int threads) {
  if (n_realizations < 1) throw std::invalid_argument("need at least one realization");
  struct Partial {
    long n = 0;
    bool init = false;
    std::vector<WelfordC> rho;
  };
  auto fold = [&](Partial& acc, long i) {
    if (!acc.init) {
      acc.rho.resize(static_cast<size_t>(n_periods) + 1);
      for (auto& w : acc.rho) w.init(2, 2);
      acc.init = true;
    }
    const auto taus = noise::sample_sequence(spec, 2 * n_periods, static_cast<std::uint64_t>(i));
    const long n_new = acc.n + 1;
    Matrix2cd rho = rho0;
    acc.rho[0].add(n_new, rho);
    for (int q = 0; q < n_periods; ++q) {
      const Matrix2cd u =
          lattice::step_operator_k(p.theta2 + taus[static_cast<size_t>(2 * q + 1)], -p.phi, k) *
          lattice::step_operator_k(p.theta1 + taus[static_cast<size_t>(2 * q)], p.phi, k);
      rho = u * rho * u.adjoint();
      acc.rho[static_cast<size_t>(q + 1)].add(n_new, rho);
    }
    acc.n = n_new;
  };
  auto merge = [&](Partial& a, Partial& b) {
    if (!b.init) return;
    if (!a.init) {
      a = std::move(b);
      return;
    }
    for (size_t q = 0; q < a.rho.size(); ++q) a.rho[q].merge(b.rho[q], a.n, b.n);
    a.n += b.n;
  };
  Partial total = par::tree_reduce<Partial>(0, n_realizations, kGrain,
                                            par::spawn_depth_for(threads), fold, merge);
  BulkMcSeries out;
  out.n = total.n;
  for (auto& w : total.rho) {
    out.mean.push_back(w.mean);
    out.se.push_back(se_from(w.m2, total.n));
  }
  return out;
}

}  // namespace dsqw::traj
