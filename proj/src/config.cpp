#include "dsqw/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <utility>

#include "json.hpp"

namespace dsqw::config {
namespace {

using nlohmann::json;

int line_at_byte(const std::string& text, size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(),
                                         text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// First occurrence of the quoted key; good enough to point a human at the spot.
int line_of(const std::string& text, const std::string& key) {
  const std::string needle = '"' + key + '"';
  const auto pos = text.find(needle);
  if (pos == std::string::npos) return 0;
  return line_at_byte(text, pos);
}

struct Diagnostics {
  const std::string& text;
  std::vector<std::string> errors;

  void add(const std::string& key, const std::string& msg) {
    const int ln = line_of(text, key);
    errors.push_back(ln > 0 ? "line " + std::to_string(ln) + ": " + msg : msg);
  }
  void done() const {
    if (errors.empty()) return;
    std::string joined;
    for (const auto& e : errors) {
      joined += e;
      joined += '\n';
    }
    joined.pop_back();
    throw ConfigError(joined);
  }
};

std::string trimmed(std::string s) {
  auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && sp(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && sp(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

bool parse_pi_string(const std::string& raw, double& out) {
  std::string t = trimmed(raw);
  if (t.size() < 2 || t.compare(t.size() - 2, 2, "pi") != 0) return false;
  t = trimmed(t.substr(0, t.size() - 2));
  if (t.empty() || t == "+") {
    out = pi;
    return true;
  }
  if (t == "-") {
    out = -pi;
    return true;
  }
  try {
    size_t used = 0;
    const double c = std::stod(t, &used);
    if (used != t.size()) return false;
    out = c * pi;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

// Angles take a radian number or a "<x>pi" string.
bool get_angle(Diagnostics& d, const json& o, const char* key, double& out) {
  if (!o.contains(key)) return false;
  const json& v = o.at(key);
  if (v.is_number()) {
    out = v.get<double>();
    return true;
  }
  if (v.is_string() && parse_pi_string(v.get<std::string>(), out)) return true;
  d.add(key, std::string("'") + key + "' must be a number in radians or a multiple of pi like \"0.25pi\"");
  return false;
}

bool get_integer(Diagnostics& d, const json& o, const char* key, long long& out, long long lo,
                 long long hi) {
  if (!o.contains(key)) return false;
  const json& v = o.at(key);
  if (!v.is_number_integer()) {
    d.add(key, std::string("'") + key + "' must be an integer");
    return false;
  }
  out = v.get<long long>();
  if (out < lo || out > hi) {
    d.add(key, std::string("'") + key + "' = " + std::to_string(out) + " is out of range [" +
                   std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return false;
  }
  return true;
}

template <typename E>
bool get_enum(Diagnostics& d, const json& o, const char* key,
              std::initializer_list<std::pair<const char*, E>> table, E& out) {
  if (!o.contains(key)) return false;
  const json& v = o.at(key);
  std::string options;
  for (const auto& [n, e] : table) {
    if (!options.empty()) options += ", ";
    options += n;
  }
  if (!v.is_string()) {
    d.add(key, std::string("'") + key + "' must be one of: " + options);
    return false;
  }
  const auto s = v.get<std::string>();
  for (const auto& [n, e] : table)
    if (s == n) {
      out = e;
      return true;
    }
  d.add(key, "'" + s + "' is not a valid " + key + " (expected one of: " + options + ")");
  return false;
}

void check_keys(Diagnostics& d, const json& o, const char* what,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : o.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) d.add(item.key(), std::string("unknown key '") + item.key() + "' in " + what);
  }
}

const std::vector<std::string>& known_observables() {
  static const std::vector<std::string> names{"intensity", "coherent", "return", "norm",
                                              "density"};
  return names;
}

const std::map<std::string, std::string>& preset_map() {
  static const std::map<std::string, std::string> presets = [] {
    std::map<std::string, std::string> m;
    auto protocol_walk = R"("protocol": {"theta1": 0.0, "theta2": "0.25pi", "phi": 0.0, "n_sites": 101, "boundary": "open"})";
    auto protocol_flat = R"("protocol": {"theta1": "0.5pi", "theta2": 0.0, "phi": "0.2pi", "n_sites": 44, "boundary": "open"})";
    auto initial_site = R"("initial": {"kind": "single_site", "site": -1, "ring": "alpha"})";
    auto initial_edge = R"("initial": {"kind": "edge_state", "side": "left"})";

    auto spatio = [&](const char* name, const char* noise) {
      return std::string("{\n  \"name\": \"") + name + "\",\n  " + protocol_walk + ",\n  " +
             noise + ",\n  \"engine\": \"trajectory\",\n  " + initial_site +
             ",\n  \"steps\": 80,\n  \"realizations\": 1,\n  \"record\": \"every\",\n"
             "  \"observables\": [\"intensity\"]\n}\n";
    };
    auto bands = [&](const char* name, const char* noise, int realizations) {
      return std::string("{\n  \"name\": \"") + name + "\",\n  " + protocol_walk + ",\n  " +
             noise + ",\n  \"engine\": \"trajectory\",\n  " + initial_site +
             ",\n  \"steps\": 80,\n  \"realizations\": " + std::to_string(realizations) +
             ",\n  \"record\": \"stroboscopic\",\n  \"observables\": [\"intensity\"]\n}\n";
    };
    auto edge = [&](const char* name, const char* protocol, const char* noise, int realizations) {
      return std::string("{\n  \"name\": \"") + name + "\",\n  " + protocol + ",\n  " + noise +
             ",\n  \"engine\": \"master\",\n  " + initial_edge +
             ",\n  \"periods\": 80,\n  \"realizations\": " + std::to_string(realizations) +
             ",\n  \"record\": \"stroboscopic\",\n  \"observables\": [\"return\"]\n}\n";
    };

    m["fig2a"] = spatio(
        "fig2a", R"("noise": {"distribution": "uniform", "sigma": 0.0, "schedule": "none", "seed": 101})");
    m["fig2b"] = spatio(
        "fig2b",
        R"("noise": {"distribution": "uniform", "sigma": "0.4pi", "schedule": "per_step", "seed": 102})");
    m["fig2c"] = spatio(
        "fig2c",
        R"("noise": {"distribution": "uniform", "sigma": "0.4pi", "schedule": "stroboscopic", "seed": 103})");
    m["fig3a"] = bands(
        "fig3a", R"("noise": {"distribution": "uniform", "sigma": 0.0, "schedule": "none", "seed": 201})",
        1);
    m["fig3b"] = bands(
        "fig3b",
        R"("noise": {"distribution": "uniform", "sigma": "0.4pi", "schedule": "per_step", "seed": 202})",
        100);
    m["fig3c"] = bands(
        "fig3c",
        R"("noise": {"distribution": "uniform", "sigma": "0.4pi", "schedule": "stroboscopic", "seed": 203})",
        100);
    m["fig4"] = edge(
        "fig4", protocol_flat,
        R"("noise": {"distribution": "gaussian", "sigma": "0.12pi", "schedule": "stroboscopic", "seed": 401})",
        100);
    m["supp-return"] = edge(
        "supp-return", protocol_flat,
        R"("noise": {"distribution": "gaussian", "sigma": 0.2, "schedule": "stroboscopic", "seed": 501})",
        1000);
    m["supp-return-dispersive"] = edge(
        "supp-return-dispersive",
        R"("protocol": {"theta1": "0.45pi", "theta2": 0.0, "phi": "0.2pi", "n_sites": 44, "boundary": "open"})",
        R"("noise": {"distribution": "gaussian", "sigma": 0.2, "schedule": "stroboscopic", "seed": 502})",
        1000);
    return m;
  }();
  return presets;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("line " + std::to_string(line_at_byte(text, e.byte)) +
                      ": malformed document: " + e.what());
  }
  if (!root.is_object()) throw ConfigError("line 1: config must be a JSON object");

  // A run manifest embeds the config it ran with; accept it directly.
  const json& doc = root.contains("config") ? root.at("config") : root;
  if (!doc.is_object()) throw ConfigError("line 1: 'config' must be a JSON object");

  Diagnostics d{text, {}};
  check_keys(d, doc, "the config",
             {"name", "protocol", "noise", "engine", "initial", "steps", "periods",
              "realizations", "record", "out_dir", "observables"});

  RunConfig c;
  if (doc.contains("name") && doc.at("name").is_string()) c.name = doc.at("name").get<std::string>();

  if (!doc.contains("protocol") || !doc.at("protocol").is_object()) {
    d.errors.push_back(
        "missing required keys: protocol.theta1, protocol.theta2, protocol.phi, "
        "protocol.n_sites");
  } else {
    const json& p = doc.at("protocol");
    check_keys(d, p, "protocol", {"theta1", "theta2", "phi", "n_sites", "boundary"});
    for (const char* key : {"theta1", "theta2", "phi", "n_sites"})
      if (!p.contains(key)) d.errors.push_back(std::string("missing required key: protocol.") + key);
    get_angle(d, p, "theta1", c.protocol.theta1);
    get_angle(d, p, "theta2", c.protocol.theta2);
    get_angle(d, p, "phi", c.protocol.phi);
    long long n = 0;
    if (get_integer(d, p, "n_sites", n, 2, 1 << 20)) c.protocol.n_sites = static_cast<int>(n);
    get_enum(d, p, "boundary",
             {std::pair{"open", Boundary::Open}, std::pair{"periodic", Boundary::Periodic}},
             c.protocol.boundary);
  }

  if (doc.contains("noise")) {
    const json& n = doc.at("noise");
    if (!n.is_object()) {
      d.add("noise", "'noise' must be an object");
    } else {
      check_keys(d, n, "noise", {"distribution", "sigma", "schedule", "seed"});
      get_enum(d, n, "distribution",
               {std::pair{"gaussian", noise::Distribution::Gaussian},
                std::pair{"uniform", noise::Distribution::Uniform}},
               c.noise.distribution);
      if (get_angle(d, n, "sigma", c.noise.sigma) && !(c.noise.sigma >= 0.0))
        d.add("sigma", "'sigma' must be >= 0");
      get_enum(d, n, "schedule",
               {std::pair{"none", noise::Schedule::None},
                std::pair{"per_step", noise::Schedule::PerStep},
                std::pair{"stroboscopic", noise::Schedule::Stroboscopic}},
               c.noise.schedule);
      if (n.contains("seed")) {
        const json& s = n.at("seed");
        if (s.is_number_unsigned())
          c.noise.master_seed = s.get<std::uint64_t>();
        else
          d.add("seed", "'seed' must be a non-negative integer");
      }
    }
  }

  get_enum(d, doc, "engine",
           {std::pair{"trajectory", Engine::Trajectory}, std::pair{"master", Engine::Master}},
           c.engine);

  if (doc.contains("initial")) {
    const json& ini = doc.at("initial");
    if (!ini.is_object()) {
      d.add("initial", "'initial' must be an object");
    } else {
      check_keys(d, ini, "initial", {"kind", "site", "ring", "k", "spinor", "side"});
      get_enum(d, ini, "kind",
               {std::pair{"single_site", InitialKind::SingleSite},
                std::pair{"bloch", InitialKind::Bloch},
                std::pair{"edge_state", InitialKind::EdgeState}},
               c.initial.kind);
      long long site = 0;
      if (get_integer(d, ini, "site", site, -1, 1 << 20)) c.initial.site = static_cast<int>(site);
      get_enum(d, ini, "ring",
               {std::pair{"alpha", traj::Ring::Alpha}, std::pair{"beta", traj::Ring::Beta}},
               c.initial.ring);
      get_angle(d, ini, "k", c.initial.k);
      get_enum(d, ini, "side", {std::pair{"left", std::string("left")},
                                std::pair{"right", std::string("right")}},
               c.initial.edge_side);
      if (ini.contains("spinor")) {
        const json& sp = ini.at("spinor");
        bool ok = sp.is_array() && sp.size() == 2;
        if (ok) {
          for (int i = 0; i < 2; ++i) {
            const json& e = sp.at(static_cast<size_t>(i));
            if (e.is_number())
              c.initial.spinor(i) = e.get<double>();
            else if (e.is_array() && e.size() == 2 && e.at(0).is_number() && e.at(1).is_number())
              c.initial.spinor(i) = complexd(e.at(0).get<double>(), e.at(1).get<double>());
            else
              ok = false;
          }
        }
        if (!ok) d.add("spinor", "'spinor' must be two entries, each a number or an [re, im] pair");
      }
    }
  }

  const bool has_steps = doc.contains("steps"), has_periods = doc.contains("periods");
  if (has_steps && has_periods) {
    d.add("periods", "give either 'steps' or 'periods', not both");
  } else if (!has_steps && !has_periods) {
    d.errors.push_back("missing required key: steps (or periods)");
  } else {
    long long v = 0;
    if (has_steps && get_integer(d, doc, "steps", v, 1, 1 << 26)) c.n_steps = static_cast<int>(v);
    if (has_periods && get_integer(d, doc, "periods", v, 1, 1 << 25))
      c.n_steps = static_cast<int>(2 * v);
  }

  long long real = 0;
  if (get_integer(d, doc, "realizations", real, 1, 1LL << 40)) c.n_realizations = real;
  get_enum(d, doc, "record",
           {std::pair{"every", traj::RecordMode::Every},
            std::pair{"stroboscopic", traj::RecordMode::Stroboscopic}},
           c.record);
  if (doc.contains("out_dir")) {
    if (doc.at("out_dir").is_string())
      c.out_dir = doc.at("out_dir").get<std::string>();
    else
      d.add("out_dir", "'out_dir' must be a string");
  }
  if (doc.contains("observables")) {
    const json& obs = doc.at("observables");
    if (!obs.is_array() || obs.empty()) {
      d.add("observables", "'observables' must be a non-empty array of names");
    } else {
      c.observables.clear();
      for (const auto& o : obs) {
        const std::string name = o.is_string() ? o.get<std::string>() : std::string();
        const auto& known = known_observables();
        if (std::find(known.begin(), known.end(), name) == known.end()) {
          std::string options;
          for (const auto& k : known) {
            if (!options.empty()) options += ", ";
            options += k;
          }
          d.add("observables", "unknown observable '" + name + "' (expected one of: " + options + ")");
        } else {
          c.observables.push_back(name);
        }
      }
    }
  }

  // Cross-field checks only make sense once the pieces parsed cleanly.
  if (d.errors.empty()) {
    if (c.n_steps % 2 != 0 &&
        (c.record == traj::RecordMode::Stroboscopic || c.engine == Engine::Master))
      d.add("steps", "stroboscopic records and the master engine need an even step count");
    if (c.initial.kind == InitialKind::Bloch && c.protocol.boundary != Boundary::Periodic)
      d.add("kind", "a bloch initial state needs a periodic lattice");
    if (c.initial.kind == InitialKind::EdgeState && c.protocol.boundary != Boundary::Open)
      d.add("kind", "an edge_state initial state needs an open lattice");
    if (c.initial.site >= c.protocol.n_sites)
      d.add("site", "'site' = " + std::to_string(c.initial.site) + " is outside the lattice (n_sites = " +
                        std::to_string(c.protocol.n_sites) + ")");
  }

  d.done();
  return c;
}

std::string serialize(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["protocol"] = {{"theta1", c.protocol.theta1},
                   {"theta2", c.protocol.theta2},
                   {"phi", c.protocol.phi},
                   {"n_sites", c.protocol.n_sites},
                   {"boundary", c.protocol.boundary == Boundary::Open ? "open" : "periodic"}};
  j["noise"] = {
      {"distribution",
       c.noise.distribution == noise::Distribution::Gaussian ? "gaussian" : "uniform"},
      {"sigma", c.noise.sigma},
      {"schedule", c.noise.schedule == noise::Schedule::None
                       ? "none"
                       : (c.noise.schedule == noise::Schedule::PerStep ? "per_step"
                                                                       : "stroboscopic")},
      {"seed", c.noise.master_seed}};
  j["engine"] = c.engine == Engine::Trajectory ? "trajectory" : "master";
  const char* kind = c.initial.kind == InitialKind::SingleSite
                         ? "single_site"
                         : (c.initial.kind == InitialKind::Bloch ? "bloch" : "edge_state");
  j["initial"] = {{"kind", kind},
                  {"site", c.initial.site},
                  {"ring", c.initial.ring == traj::Ring::Alpha ? "alpha" : "beta"},
                  {"k", c.initial.k},
                  {"spinor",
                   {{c.initial.spinor(0).real(), c.initial.spinor(0).imag()},
                    {c.initial.spinor(1).real(), c.initial.spinor(1).imag()}}},
                  {"side", c.initial.edge_side}};
  j["steps"] = c.n_steps;
  j["realizations"] = c.n_realizations;
  j["record"] = c.record == traj::RecordMode::Every ? "every" : "stroboscopic";
  j["out_dir"] = c.out_dir;
  j["observables"] = c.observables;
  return j.dump(2) + "\n";
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : preset_map()) names.push_back(k);
  return names;
}

const std::string& preset_text(const std::string& name) {
  const auto& m = preset_map();
  const auto it = m.find(name);
  if (it == m.end()) {
    std::string options;
    for (const auto& [k, v] : m) {
      if (!options.empty()) options += ", ";
      options += k;
    }
    throw ConfigError("unknown preset '" + name + "' (available: " + options + ")");
  }
  return it->second;
}

RunConfig preset(const std::string& name) { return parse_config(preset_text(name)); }

}  // namespace dsqw::config
