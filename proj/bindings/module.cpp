#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dsqw/analysis.hpp"
#include "dsqw/lattice.hpp"
#include "dsqw/noise.hpp"
#include "dsqw/runner.hpp"
#include "dsqw/verify.hpp"

namespace py = pybind11;
using namespace dsqw;

namespace {

ProtocolParams make_protocol(double theta1, double theta2, double phi, int n_sites,
                             const std::string& boundary) {
  ProtocolParams p;
  p.theta1 = theta1;
  p.theta2 = theta2;
  p.phi = phi;
  p.n_sites = n_sites;
  if (boundary == "open")
    p.boundary = Boundary::Open;
  else if (boundary == "periodic")
    p.boundary = Boundary::Periodic;
  else
    throw std::invalid_argument("boundary must be 'open' or 'periodic'");
  validate_lattice(p);
  return p;
}

noise::Distribution make_distribution(const std::string& name) {
  if (name == "gaussian") return noise::Distribution::Gaussian;
  if (name == "uniform") return noise::Distribution::Uniform;
  throw std::invalid_argument("distribution must be 'gaussian' or 'uniform'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-band walk simulator: spectra, noise ensembles, master equations";
  m.attr("__version__") = "0.1.0";

  py::register_exception<config::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ResourceRefusal>(m, "ResourceRefusal", PyExc_RuntimeError);

  m.def(
      "quasienergies",
      [](double theta1, double theta2, double phi, double k) {
        ProtocolParams p;
        p.theta1 = theta1;
        p.theta2 = theta2;
        p.phi = phi;
        const auto bands = lattice::quasienergies(p, k);
        return std::make_pair(bands.e_minus, bands.e_plus);
      },
      py::arg("theta1"), py::arg("theta2"), py::arg("phi"), py::arg("k"),
      "Quasienergy pair (e_minus, e_plus) at one momentum.");

  m.def(
      "band_curve",
      [](double theta1, double theta2, double phi, int n_k) {
        if (n_k < 2) throw std::invalid_argument("band_curve needs n_k >= 2");
        ProtocolParams p;
        p.theta1 = theta1;
        p.theta2 = theta2;
        p.phi = phi;
        std::vector<double> k(static_cast<size_t>(n_k)), lo(k.size()), hi(k.size());
        for (int i = 0; i < n_k; ++i) {
          k[static_cast<size_t>(i)] = -pi + 2.0 * pi * (i + 1) / n_k;
          const auto bands = lattice::quasienergies(p, k[static_cast<size_t>(i)]);
          lo[static_cast<size_t>(i)] = bands.e_minus;
          hi[static_cast<size_t>(i)] = bands.e_plus;
        }
        py::dict d;
        d["k"] = k;
        d["e_minus"] = lo;
        d["e_plus"] = hi;
        return d;
      },
      py::arg("theta1"), py::arg("theta2"), py::arg("phi"), py::arg("n_k") = 256,
      "Both quasienergy branches sampled over the momentum zone.");

  m.def("dfs_momenta", &lattice::dfs_momenta, py::arg("phi"),
        "Momenta whose noise couplings vanish identically.");

  m.def(
      "noise_coefficients",
      [](const std::string& distribution, double sigma) {
        noise::NoiseSpec spec;
        spec.distribution = make_distribution(distribution);
        spec.sigma = sigma;
        noise::validate(spec);
        const auto c = noise::coefficients_for(spec);
        py::dict d;
        d["sigma"] = c.sigma;
        d["distribution"] = distribution;
        d["gamma_plus"] = c.gamma_plus;
        d["gamma_pp"] = c.gamma_pp;
        d["gamma_mm"] = c.gamma_mm;
        py::dict mom;
        mom["cos"] = c.moment(noise::TrigMoment::Cos);
        mom["sin"] = c.moment(noise::TrigMoment::Sin);
        mom["cos2"] = c.moment(noise::TrigMoment::Cos2);
        mom["sin2"] = c.moment(noise::TrigMoment::Sin2);
        mom["sincos"] = c.moment(noise::TrigMoment::SinCos);
        mom["cos3"] = c.moment(noise::TrigMoment::Cos3);
        mom["cossin2"] = c.moment(noise::TrigMoment::CosSin2);
        mom["cos4"] = c.moment(noise::TrigMoment::Cos4);
        mom["sin4"] = c.moment(noise::TrigMoment::Sin4);
        mom["sin2cos2"] = c.moment(noise::TrigMoment::Sin2Cos2);
        d["moments"] = mom;
        return d;
      },
      py::arg("distribution"), py::arg("sigma"),
      "Averaged trigonometric moments and the derived decoherence rates.");

  m.def("preset_names", &config::preset_names, "Names of the shipped figure presets.");
  m.def(
      "preset_text", [](const std::string& name) { return config::preset_text(name); },
      py::arg("name"), "Raw JSON text of one preset.");
  m.def(
      "canonical_config",
      [](const std::string& text) { return config::serialize(config::parse_config(text)); },
      py::arg("text"),
      "Parse a config or manifest and return the canonical form with all defaults pinned.");

  m.def(
      "run",
      [](const std::string& subcommand, const std::string& config_text, int threads,
         const std::string& out) {
        const auto c = config::parse_config(config_text);
        const auto r = runner::run_subcommand(subcommand, c, threads, out);
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["out_dir"] = r.out_dir;
        d["outputs"] = r.outputs;
        d["message"] = r.message;
        return d;
      },
      py::arg("subcommand"), py::arg("config"), py::arg("threads") = 0,
      py::arg("out") = std::string(),
      "Execute one subcommand (evolve|bands|master|edge|dfs|sweep) and report the artifacts.");

  m.def(
      "edge_states",
      [](double theta1, double theta2, double phi, int n_sites) {
        const auto rep =
            analysis::extract_edge_states(make_protocol(theta1, theta2, phi, n_sites, "open"));
        py::list states;
        for (const auto& st : rep.states) {
          py::dict d;
          d["quasienergy"] = st.quasienergy;
          d["gap"] = st.gap;
          d["side"] = st.side;
          d["ipr"] = st.ipr;
          std::vector<double> weight(static_cast<size_t>(st.vec.size()));
          for (Eigen::Index i = 0; i < st.vec.size(); ++i)
            weight[static_cast<size_t>(i)] = std::norm(st.vec(i));
          d["weight"] = weight;
          states.append(d);
        }
        py::dict out;
        out["states"] = states;
        out["band_min"] = rep.band_min;
        out["band_max"] = rep.band_max;
        out["zero_gap_open"] = rep.zero_gap_open;
        out["pi_gap_open"] = rep.pi_gap_open;
        out["diagnostic"] = rep.diagnostic;
        return out;
      },
      py::arg("theta1"), py::arg("theta2"), py::arg("phi"), py::arg("n_sites"),
      "Localized gap states of the open lattice with gap/side labels.");

  m.def(
      "verify",
      [](int threads) {
        const auto results = verify::run_all(threads);
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["id"] = r.id;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["detail"] = r.detail;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("threads") = 0, "Run the full self-check suite; one entry per check.");
}
