#pragma once

#include <string>
#include <vector>

#include "dsqw/common.hpp"
#include "dsqw/noise.hpp"
#include "dsqw/trajectory.hpp"

namespace dsqw::config {

// Parse/validation failure; the message carries one line-level diagnostic per
// problem ("line 7: unknown key 'shedule'").
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Engine { Trajectory, Master };

enum class InitialKind { SingleSite, Bloch, EdgeState };

struct InitialState {
  InitialKind kind = InitialKind::SingleSite;
  int site = -1;                   // coarse index; -1 selects the center site
  traj::Ring ring = traj::Ring::Alpha;
  double k = 0.0;                  // Bloch momentum (periodic lattices)
  Vector2cd spinor{1.0, 0.0};
  std::string edge_side = "left";  // which localized state to load
};

struct RunConfig {
  std::string name;
  ProtocolParams protocol;
  noise::NoiseSpec noise;
  Engine engine = Engine::Trajectory;
  InitialState initial;
  int n_steps = 0;  // walk steps; two per Floquet period
  long n_realizations = 1;
  traj::RecordMode record = traj::RecordMode::Stroboscopic;
  std::string out_dir;  // empty: resolved from DSQW_OUT_ROOT or ./out
  std::vector<std::string> observables{"intensity"};
};

inline int n_periods(const RunConfig& c) { return c.n_steps / 2; }

// Accepts a bare config document or a run manifest (object with a "config"
// member). Angle-valued fields (theta1, theta2, phi, sigma, k) take either a
// number in radians or a string multiple of pi such as "0.25pi". "steps" and
// "periods" are interchangeable (periods = steps / 2); exactly one is given.
RunConfig parse_config(const std::string& text);

// Canonical form with every field explicit, so defaults are pinned in
// manifests. parse_config(serialize(c)) reproduces c losslessly.
std::string serialize(const RunConfig& c);

// Embedded figure presets; the same texts ship as configs/<name>.json.
std::vector<std::string> preset_names();
const std::string& preset_text(const std::string& name);
RunConfig preset(const std::string& name);

}  // namespace dsqw::config
