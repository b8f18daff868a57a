#include "dsqw/runner.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "dsqw/analysis.hpp"
#include "dsqw/lattice.hpp"
#include "dsqw/master.hpp"
#include "json.hpp"

namespace dsqw::runner {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_cell(double v) { return fmt(v); }
std::string to_cell(int v) { return std::to_string(v); }
std::string to_cell(const char* s) { return s; }
std::string to_cell(const std::string& s) { return s; }

// Accumulates one artifact in memory and writes it in a single pass.
class Table {
 public:
  Table(std::string name, std::vector<std::string> columns)
      : name_(std::move(name)), columns_(std::move(columns)) {}

  void add_row(const std::vector<std::string>& row) {
    if (row.size() != columns_.size()) throw std::logic_error("row width mismatch in " + name_);
    for (size_t i = 0; i < row.size(); ++i) {
      body_ += row[i];
      body_ += i + 1 < row.size() ? ',' : '\n';
    }
  }

  template <typename... T>
  void add(const T&... cells) {
    add_row(std::vector<std::string>{to_cell(cells)...});
  }

  const std::string& name() const { return name_; }

  void write_to(const fs::path& dir) const {
    std::ofstream f(dir / name_, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + (dir / name_).string() + " for writing");
    std::string head;
    for (size_t i = 0; i < columns_.size(); ++i) {
      head += columns_[i];
      head += i + 1 < columns_.size() ? ',' : '\n';
    }
    f << head << body_;
    if (!f) throw std::runtime_error("write failed for " + (dir / name_).string());
  }

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::string body_;
};

void emit(const fs::path& dir, const Table& t, std::vector<std::string>& outputs) {
  t.write_to(dir);
  outputs.push_back(t.name());
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const config::RunConfig& c, std::vector<std::string>& outputs) {
  nlohmann::json m;
  m["format"] = 1;
  m["tool"] = "dsqw";
  m["subcommand"] = subcommand;
  m["config"] = nlohmann::json::parse(config::serialize(c));
  m["outputs"] = outputs;
  std::ofstream f(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  f << m.dump(2) << "\n";
  outputs.push_back("manifest.json");
}

bool wants(const config::RunConfig& c, const char* observable) {
  for (const auto& o : c.observables)
    if (o == observable) return true;
  return false;
}

noise::CoefficientSet coefficients_or_noiseless(const noise::NoiseSpec& spec) {
  if (spec.schedule == noise::Schedule::None || spec.sigma == 0.0)
    return noise::gamma_coefficients(0.0);
  return noise::coefficients_for(spec);
}

// One noise-averaged period of the real-space master equation for the given
// schedule (None propagates the noiseless conjugation).
master::MasterStep real_master_step(const ProtocolParams& p, const noise::NoiseSpec& spec) {
  const auto coeffs = coefficients_or_noiseless(spec);
  if (spec.schedule == noise::Schedule::PerStep && spec.sigma > 0.0) {
    const auto dec1 = master::decompose_step_real(p, 1);
    const auto dec2 = master::decompose_step_real(p, 2);
    return [dec1, dec2, coeffs](const MatrixXcd& rho) {
      return master::master_step_real_random(master::master_step_real_random(rho, dec1, coeffs),
                                             dec2, coeffs);
    };
  }
  const auto dec = master::decompose_real_strobo(p);
  return [dec, coeffs](const MatrixXcd& rho) {
    return master::master_step_real_strobo(rho, dec, coeffs);
  };
}

void require_master_size(const ProtocolParams& p) {
  const int dim = 2 * p.n_sites;
  if (dim > 256)
    throw ResourceRefusal("real-space master equation supports dimension <= 256, got " +
                          std::to_string(dim) + "; rerun with the trajectory engine");
}

bool flat_band(const ProtocolParams& p) {
  return std::abs(std::cos(p.theta1) * std::cos(p.theta2)) < 1e-12;
}

struct ProfileSummary {
  double at_k0 = 0.0, at_dfs = 0.0, min = 0.0, max = 0.0;
  int invalid = 0;
};

ProfileSummary summarize_profile(const analysis::FWHMProfile& prof, double k_dfs) {
  ProfileSummary s;
  double b0 = 1e300, bd = 1e300, mn = 1e300, mx = -1e300;
  for (const auto& pt : prof.points) {
    if (!pt.valid) {
      ++s.invalid;
      continue;
    }
    mn = std::min(mn, pt.fwhm);
    mx = std::max(mx, pt.fwhm);
    if (std::abs(pt.k) < b0) {
      b0 = std::abs(pt.k);
      s.at_k0 = pt.fwhm;
    }
    const double d = std::abs(fold_angle(pt.k - k_dfs));
    if (d < bd) {
      bd = d;
      s.at_dfs = pt.fwhm;
    }
  }
  s.min = mn;
  s.max = mx;
  return s;
}

void do_evolve(const config::RunConfig& c, int threads, const fs::path& dir,
               std::vector<std::string>& outputs, std::string& message) {
  const VectorXcd init = initial_coarse(c);
  const traj::StateVector psi0 = traj::embed_coarse(c.protocol, init);
  traj::EnsembleOptions opts;
  opts.record = c.record;
  opts.threads = threads;
  opts.density = wants(c, "density");
  if (wants(c, "return")) opts.projections = {init};
  const auto stats =
      traj::run_ensemble(psi0, c.protocol, c.noise, c.n_realizations, c.n_steps, opts);

  if (wants(c, "intensity") || wants(c, "coherent")) {
    std::vector<std::string> cols{"step", "position", "alpha_abs2", "beta_abs2"};
    const bool se = c.n_realizations > 1;
    const bool coh = wants(c, "coherent");
    if (se) {
      cols.push_back("alpha_abs2_se");
      cols.push_back("beta_abs2_se");
    }
    if (coh) {
      for (const char* n : {"alpha_mean_re", "alpha_mean_im", "beta_mean_re", "beta_mean_im"})
        cols.push_back(n);
    }
    Table t("evolution.csv", cols);
    for (size_t r = 0; r < stats.steps.size(); ++r) {
      for (int j = 0; j < stats.mean_alpha.cols(); ++j) {
        const auto ri = static_cast<Eigen::Index>(r);
        std::vector<std::string> cells{
            to_cell(stats.steps[r]), to_cell(j), to_cell(stats.incoherent_alpha(ri, j)),
            to_cell(stats.incoherent_beta(ri, j))};
        if (se) {
          cells.push_back(to_cell(stats.se_incoherent_alpha(ri, j)));
          cells.push_back(to_cell(stats.se_incoherent_beta(ri, j)));
        }
        if (coh) {
          cells.push_back(to_cell(stats.mean_alpha(ri, j).real()));
          cells.push_back(to_cell(stats.mean_alpha(ri, j).imag()));
          cells.push_back(to_cell(stats.mean_beta(ri, j).real()));
          cells.push_back(to_cell(stats.mean_beta(ri, j).imag()));
        }
        t.add_row(cells);
      }
    }
    emit(dir, t, outputs);
  }

  if (wants(c, "norm")) {
    Table t("norm.csv", {"step", "total_intensity"});
    for (size_t r = 0; r < stats.steps.size(); ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      t.add(stats.steps[r],
            stats.incoherent_alpha.row(ri).sum() + stats.incoherent_beta.row(ri).sum());
    }
    emit(dir, t, outputs);
  }

  if (wants(c, "return")) {
    const auto series = analysis::return_from_ensemble(stats, 0);
    Table t("return.csv", {"period", "value", "se"});
    for (size_t m = 0; m < series.p.size(); ++m)
      t.add(static_cast<int>(m), series.p[m], series.se[m]);
    emit(dir, t, outputs);
  }

  if (wants(c, "density")) {
    Table t("density.csv", {"period", "row", "col", "re", "im", "se"});
    for (size_t m = 0; m < stats.mean_density.size(); ++m)
      for (int a = 0; a < stats.mean_density[m].rows(); ++a)
        for (int b = 0; b < stats.mean_density[m].cols(); ++b)
          t.add(static_cast<int>(m), a, b, stats.mean_density[m](a, b).real(),
                stats.mean_density[m](a, b).imag(), stats.se_density[m](a, b));
    emit(dir, t, outputs);
  }

  message = "evolve: " + std::to_string(c.n_realizations) + " realization(s), " +
            std::to_string(c.n_steps) + " steps";
}

void do_bands(const config::RunConfig& c, int threads, const fs::path& dir,
              std::vector<std::string>& outputs, std::string& message) {
  const traj::StateVector psi0 = traj::embed_coarse(c.protocol, initial_coarse(c));
  const auto raw = analysis::ensemble_band(psi0, c.protocol, c.noise, c.n_realizations, c.n_steps,
                                           threads, analysis::Window::None);
  Table tb("band.csv", {"k", "energy", "intensity"});
  for (int i = 0; i < raw.k.size(); ++i)
    for (int r = 0; r < raw.e.size(); ++r) tb.add(raw.k(i), raw.e(r), raw.intensity(i, r));
  emit(dir, tb, outputs);

  // The width measurement runs on the tapered spectrum; the raw transform
  // keeps deterministic grid scalloping that swamps narrow columns.
  const auto tapered = analysis::ensemble_band(psi0, c.protocol, c.noise, c.n_realizations,
                                               c.n_steps, threads, analysis::Window::Hann);
  const auto prof = analysis::fwhm_profile(tapered, analysis::Band::Upper);
  Table tf("fwhm.csv", {"k", "center", "fwhm", "residual", "valid"});
  for (const auto& pt : prof.points)
    tf.add(pt.k, pt.center, pt.fwhm, pt.residual, pt.valid ? 1 : 0);
  emit(dir, tf, outputs);

  const double k_dfs = fold_angle(c.protocol.phi + pi);
  const auto s = summarize_profile(prof, k_dfs);
  message = "bands: fwhm min " + fmt(s.min) + ", max " + fmt(s.max) + ", at dfs momentum " +
            fmt(s.at_dfs);
}

void do_master(const config::RunConfig& c, const fs::path& dir,
               std::vector<std::string>& outputs, std::string& message) {
  if (wants(c, "coherent"))
    throw std::invalid_argument("observable 'coherent' needs the trajectory engine");
  require_master_size(c.protocol);
  const VectorXcd init = initial_coarse(c);
  const MatrixXcd rho0 = init * init.adjoint();
  const bool keep_density = wants(c, "density") || wants(c, "intensity");
  const auto series = master::propagate(rho0, real_master_step(c.protocol, c.noise),
                                        config::n_periods(c), {init}, keep_density);

  if (wants(c, "return")) {
    Table t("return.csv", {"period", "value"});
    for (int m = 0; m < series.projections.rows(); ++m) t.add(m, series.projections(m, 0));
    emit(dir, t, outputs);
  }
  if (wants(c, "density")) {
    Table t("density.csv", {"period", "row", "col", "re", "im"});
    for (size_t m = 0; m < series.rho.size(); ++m)
      for (int a = 0; a < series.rho[m].rows(); ++a)
        for (int b = 0; b < series.rho[m].cols(); ++b)
          t.add(static_cast<int>(m), a, b, series.rho[m](a, b).real(),
                series.rho[m](a, b).imag());
    emit(dir, t, outputs);
  }
  if (wants(c, "intensity")) {
    Table t("site_intensity.csv", {"period", "site", "ring", "value"});
    for (size_t m = 0; m < series.rho.size(); ++m)
      for (int a = 0; a < series.rho[m].rows(); ++a)
        t.add(static_cast<int>(m), a / 2, a % 2 == 0 ? "alpha" : "beta",
              series.rho[m](a, a).real());
    emit(dir, t, outputs);
  }
  if (wants(c, "norm")) {
    Table t("diagnostics.csv", {"max_trace_error", "min_eigenvalue"});
    t.add(series.max_trace_error, series.min_eigenvalue);
    emit(dir, t, outputs);
  }
  message = "master: " + std::to_string(config::n_periods(c)) + " periods, trace error <= " +
            fmt(series.max_trace_error) + ", min eigenvalue " + fmt(series.min_eigenvalue);
}

void do_edge(const config::RunConfig& c, int threads, const fs::path& dir,
             std::vector<std::string>& outputs, std::string& message) {
  const auto rep = analysis::extract_edge_states(c.protocol);
  Table ts("edge_states.csv", {"index", "quasienergy", "gap", "side", "ipr"});
  for (size_t i = 0; i < rep.states.size(); ++i) {
    const auto& st = rep.states[i];
    ts.add(static_cast<int>(i), st.quasienergy, st.gap, st.side, st.ipr);
  }
  emit(dir, ts, outputs);
  if (rep.states.empty())
    throw std::invalid_argument("no localized gap states at these parameters" +
                                (rep.diagnostic.empty() ? "" : ": " + rep.diagnostic));

  const VectorXcd edge_vec = initial_coarse(c);
  VectorXcd neighbor = VectorXcd::Zero(edge_vec.size());
  neighbor(1) = 1.0;
  const int periods = config::n_periods(c);
  const bool flat = flat_band(c.protocol);

  struct SeriesSpec {
    const char* file;
    noise::Schedule schedule;
  };
  std::string decay_summary;
  Table td("decay.csv", {"series", "early_rate", "early_residual", "tail_exponent", "crossover",
                         "log_curvature", "saturated"});
  for (const auto& [file, schedule] :
       {SeriesSpec{"return_noiseless.csv", noise::Schedule::None},
        SeriesSpec{"return_random.csv", noise::Schedule::PerStep},
        SeriesSpec{"return_stroboscopic.csv", noise::Schedule::Stroboscopic}}) {
    noise::NoiseSpec spec = c.noise;
    spec.schedule = schedule;
    if (schedule == noise::Schedule::None) spec.sigma = 0.0;

    analysis::ReturnProbSeries edge_series, nb_series;
    const bool exact = c.engine == config::Engine::Master || schedule == noise::Schedule::None;
    if (exact) {
      require_master_size(c.protocol);
      const auto series = master::propagate(edge_vec * edge_vec.adjoint(),
                                            real_master_step(c.protocol, spec), periods,
                                            {edge_vec, neighbor}, false);
      edge_series = analysis::return_from_projection_series(series.projections, 0, "master");
      nb_series = analysis::return_from_projection_series(series.projections, 1, "master");
    } else {
      traj::EnsembleOptions opts;
      opts.record = traj::RecordMode::Stroboscopic;
      opts.amplitude_stats = false;
      opts.threads = threads;
      opts.projections = {edge_vec, neighbor};
      const auto stats = traj::run_ensemble(traj::embed_coarse(c.protocol, edge_vec), c.protocol,
                                            spec, c.n_realizations, 2 * periods, opts);
      edge_series = analysis::return_from_ensemble(stats, 0);
      nb_series = analysis::return_from_ensemble(stats, 1);
    }

    const bool analytic = flat && schedule == noise::Schedule::Stroboscopic;
    std::vector<std::string> cols{"period", "value", "se"};
    if (analytic) cols.push_back("analytic");
    Table t(file, cols);
    analysis::ReturnProbSeries approx;
    if (analytic) {
      const auto coeffs = coefficients_or_noiseless(spec);
      approx = analysis::analytic_return(edge_series.p[0], coeffs.gamma_plus, nb_series);
    }
    for (size_t m = 0; m < edge_series.p.size(); ++m) {
      if (analytic)
        t.add(static_cast<int>(m), edge_series.p[m], edge_series.se[m], approx.p[m]);
      else
        t.add(static_cast<int>(m), edge_series.p[m], edge_series.se[m]);
    }
    emit(dir, t, outputs);

    if (edge_series.p.size() >= 21) {
      const auto fit = analysis::fit_decay(edge_series.p);
      td.add(file, fit.exp_rate, fit.early_residual, fit.tail_exponent,
             fit.crossover, fit.log_curvature, fit.saturated ? 1 : 0);
      if (schedule == noise::Schedule::Stroboscopic)
        decay_summary = ", stroboscopic early rate " + fmt(fit.exp_rate);
    }
  }
  emit(dir, td, outputs);
  message = "edge: " + std::to_string(rep.states.size()) + " localized state(s)" + decay_summary;
}

void do_dfs(const config::RunConfig& c, const fs::path& dir, std::vector<std::string>& outputs,
            std::string& message) {
  Table tg("dfs.csv", {"k", "residual_plus", "residual_minus"});
  for (int q = 0; q < c.protocol.n_sites; ++q) {
    const double k = lattice::grid_momentum(c.protocol.n_sites, q);
    const auto dec = master::decompose_bulk(c.protocol, k);
    tg.add(k, dec.u_plus.norm(), dec.u_minus.norm());
  }
  emit(dir, tg, outputs);

  Table tm("dfs_momenta.csv", {"k", "residual_plus", "residual_minus"});
  double worst = 0.0;
  std::string k_text;
  for (const double k : lattice::dfs_momenta(c.protocol.phi)) {
    const auto dec = master::decompose_bulk(c.protocol, k);
    tm.add(k, dec.u_plus.norm(), dec.u_minus.norm());
    worst = std::max(worst, std::max(dec.u_plus.norm(), dec.u_minus.norm()));
    k_text = fmt(k);
  }
  emit(dir, tm, outputs);
  message = "dfs: momentum k = " + k_text + ", residual norms <= " + fmt(worst);
}

void do_sweep(const config::RunConfig& c, int threads, const fs::path& dir,
              std::vector<std::string>& outputs, std::string& message) {
  if (!(c.noise.sigma > 0.0))
    throw std::invalid_argument("sweep needs noise.sigma > 0 as the top of the ladder");
  const std::vector<double> ladder{c.noise.sigma / 16.0, c.noise.sigma / 8.0, c.noise.sigma / 4.0,
                                   c.noise.sigma / 2.0, c.noise.sigma};
  const std::vector<std::pair<const char*, noise::Schedule>> schedules{
      {"per_step", noise::Schedule::PerStep}, {"stroboscopic", noise::Schedule::Stroboscopic}};
  int runs = 0;

  if (c.engine == config::Engine::Trajectory) {
    const traj::StateVector psi0 = traj::embed_coarse(c.protocol, initial_coarse(c));
    const double k_dfs = fold_angle(c.protocol.phi + pi);
    noise::NoiseSpec base = c.noise;
    base.schedule = noise::Schedule::None;
    base.sigma = 0.0;
    const auto clean = analysis::fwhm_profile(
        analysis::ensemble_band(psi0, c.protocol, base, 1, c.n_steps, threads,
                                analysis::Window::Hann),
        analysis::Band::Upper);
    const auto s0 = summarize_profile(clean, k_dfs);

    Table t("sweep.csv", {"sigma", "schedule", "fwhm_k0", "fwhm_dfs", "excess_k0", "excess_dfs",
                          "min_fwhm", "max_fwhm", "invalid_columns"});
    t.add(0.0, "none", s0.at_k0, s0.at_dfs, 0.0, 0.0, s0.min, s0.max, s0.invalid);
    ++runs;
    for (const auto& [name, schedule] : schedules) {
      for (const double sg : ladder) {
        noise::NoiseSpec spec = c.noise;
        spec.schedule = schedule;
        spec.sigma = sg;
        const auto prof = analysis::fwhm_profile(
            analysis::ensemble_band(psi0, c.protocol, spec, c.n_realizations, c.n_steps, threads,
                                    analysis::Window::Hann),
            analysis::Band::Upper);
        const auto s = summarize_profile(prof, k_dfs);
        t.add(sg, name, s.at_k0, s.at_dfs, s.at_k0 - s0.at_k0, s.at_dfs - s0.at_dfs, s.min, s.max,
              s.invalid);
        ++runs;
      }
    }
    emit(dir, t, outputs);
  } else {
    require_master_size(c.protocol);
    const VectorXcd init = initial_coarse(c);
    Table t("sweep.csv", {"sigma", "schedule", "early_rate", "predicted_rate", "crossover",
                          "tail_exponent", "saturated"});
    for (const auto& [name, schedule] : schedules) {
      for (const double sg : ladder) {
        noise::NoiseSpec spec = c.noise;
        spec.schedule = schedule;
        spec.sigma = sg;
        const auto series = master::propagate(init * init.adjoint(),
                                              real_master_step(c.protocol, spec),
                                              config::n_periods(c), {init}, false);
        const auto fit = analysis::fit_decay(
            analysis::return_from_projection_series(series.projections, 0, "master").p);
        const auto coeffs = coefficients_or_noiseless(spec);
        t.add(sg, name, fit.exp_rate, -std::log(coeffs.moment(noise::TrigMoment::Cos2)),
              fit.crossover, fit.tail_exponent, fit.saturated ? 1 : 0);
        ++runs;
      }
    }
    emit(dir, t, outputs);
  }
  message = "sweep: " + std::to_string(runs) + " runs";
}

}  // namespace

std::string resolve_out_dir(const config::RunConfig& c, const std::string& cli_out,
                            const std::string& subcommand) {
  if (!cli_out.empty()) return cli_out;
  if (!c.out_dir.empty()) return c.out_dir;
  const char* root = std::getenv("DSQW_OUT_ROOT");
  const std::string base = (root != nullptr && *root != '\0') ? root : "out";
  return base + "/" + (c.name.empty() ? subcommand : c.name);
}

VectorXcd initial_coarse(const config::RunConfig& c) {
  const auto& p = c.protocol;
  validate_lattice(p);
  switch (c.initial.kind) {
    case config::InitialKind::SingleSite: {
      const int j = c.initial.site < 0 ? p.n_sites / 2 : c.initial.site;
      VectorXcd v = VectorXcd::Zero(2 * p.n_sites);
      v(2 * j + (c.initial.ring == traj::Ring::Alpha ? 0 : 1)) = 1.0;
      return v;
    }
    case config::InitialKind::Bloch: {
      const double ns = c.initial.spinor.norm();
      if (!(ns > 0.0)) throw std::invalid_argument("bloch spinor must be nonzero");
      const Vector2cd s = c.initial.spinor / ns;
      VectorXcd v(2 * p.n_sites);
      const double w = 1.0 / std::sqrt(static_cast<double>(p.n_sites));
      for (int j = 0; j < p.n_sites; ++j) {
        const complexd ph = w * std::exp(iunit * (c.initial.k * static_cast<double>(j)));
        v(2 * j) = ph * s(0);
        v(2 * j + 1) = ph * s(1);
      }
      return v;
    }
    case config::InitialKind::EdgeState: {
      const auto rep = analysis::extract_edge_states(p);
      for (const auto& st : rep.states)
        if (st.side == c.initial.edge_side) return st.vec;
      throw std::invalid_argument("no localized " + c.initial.edge_side +
                                  " edge state at these parameters" +
                                  (rep.diagnostic.empty() ? "" : ": " + rep.diagnostic));
    }
  }
  throw std::logic_error("unreachable initial-state kind");
}

RunResult run_subcommand(const std::string& subcommand, const config::RunConfig& c, int threads,
                         const std::string& cli_out) {
  RunResult r;
  try {
    validate_lattice(c.protocol);
    noise::validate(c.noise);
    r.out_dir = resolve_out_dir(c, cli_out, subcommand);
    const fs::path dir(r.out_dir);
    fs::create_directories(dir);

    if (subcommand == "evolve")
      do_evolve(c, threads, dir, r.outputs, r.message);
    else if (subcommand == "bands")
      do_bands(c, threads, dir, r.outputs, r.message);
    else if (subcommand == "master")
      do_master(c, dir, r.outputs, r.message);
    else if (subcommand == "edge")
      do_edge(c, threads, dir, r.outputs, r.message);
    else if (subcommand == "dfs")
      do_dfs(c, dir, r.outputs, r.message);
    else if (subcommand == "sweep")
      do_sweep(c, threads, dir, r.outputs, r.message);
    else {
      r.exit_code = kValidationError;
      r.message = "unknown subcommand '" + subcommand +
                  "' (expected evolve|bands|master|edge|dfs|sweep|verify)";
      return r;
    }
    write_manifest(dir, subcommand, c, r.outputs);
  } catch (const ResourceRefusal& e) {
    r.exit_code = kResourceRefusal;
    r.message = e.what();
  } catch (const config::ConfigError& e) {
    r.exit_code = kValidationError;
    r.message = e.what();
  } catch (const std::invalid_argument& e) {
    r.exit_code = kValidationError;
    r.message = e.what();
  } catch (const std::runtime_error& e) {
    r.exit_code = kVerificationFailure;
    r.message = e.what();
  } catch (const std::exception& e) {
    r.exit_code = kValidationError;
    r.message = e.what();
  }
  return r;
}

}  // namespace dsqw::runner
