#include "pairex/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pairex {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& key, int line, const std::string& what) {
  throw ConfigError("config: " + what + " for key '" + key + "' (line " +
                    std::to_string(line) + ")");
}

double parse_double(const std::string& key, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) fail(key, line, "trailing characters in number");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(key, line, "expected a number, got '" + v + "'");
  }
}

long parse_int(const std::string& key, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) fail(key, line, "trailing characters in integer");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(key, line, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, int line, const std::string& v) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    fail(key, line, "expected an unsigned integer, got '" + v + "'");
  return x;
}

std::vector<double> parse_list(const std::string& key, int line, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, line, trim(item)));
  return out;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(xs[i]);
  }
  return out;
}

}  // namespace

std::string mode_name(EvolutionMode m) {
  switch (m) {
    case EvolutionMode::coupled: return "coupled";
    case EvolutionMode::uncoupled_gm: return "uncoupled-GM";
    case EvolutionMode::mean_field_only: return "mean-field-only";
  }
  return "coupled";
}

EvolutionMode mode_from_name(const std::string& name) {
  if (name == "coupled") return EvolutionMode::coupled;
  if (name == "uncoupled-GM") return EvolutionMode::uncoupled_gm;
  if (name == "mean-field-only") return EvolutionMode::mean_field_only;
  throw ConfigError("config: unknown mode '" + name + "'");
}

SimulationConfig parse_config(const std::string& text) {
  SimulationConfig c;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected 'key = value' on line " + std::to_string(line));
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));

    if (key == "dim") c.dim = static_cast<int>(parse_int(key, line, val));
    else if (key == "grid_points") c.grid_points = static_cast<int>(parse_int(key, line, val));
    else if (key == "box_length") c.box_length = parse_double(key, line, val);
    else if (key == "N") c.N = parse_double(key, line, val);
    else if (key == "beta") c.beta = parse_double(key, line, val);
    else if (key == "potential_profile") c.potential_profile = val;
    else if (key == "potential_width") c.potential_width = parse_double(key, line, val);
    else if (key == "potential_amplitude") c.potential_amplitude = parse_double(key, line, val);
    else if (key == "initial_phi") c.initial_phi = val;
    else if (key == "phi_width") c.phi_width = parse_double(key, line, val);
    else if (key == "phi_center") c.phi_center = parse_double(key, line, val);
    else if (key == "phi_boost_mode") c.phi_boost_mode = static_cast<int>(parse_int(key, line, val));
    else if (key == "mode") c.mode = mode_from_name(val);
    else if (key == "dt") c.dt = parse_double(key, line, val);
    else if (key == "t_final") c.t_final = parse_double(key, line, val);
    else if (key == "output_interval") c.output_interval = parse_double(key, line, val);
    else if (key == "oracle_sites") c.oracle_sites = static_cast<int>(parse_int(key, line, val));
    else if (key == "oracle_n_max_override") c.oracle_n_max_override = static_cast<int>(parse_int(key, line, val));
    else if (key == "seed") c.seed = parse_u64(key, line, val);
    else if (key == "output_dir") c.output_dir = val;
    else if (key == "sweep_N") c.sweep_N = parse_list(key, line, val);
    else if (key == "sweep_beta") c.sweep_beta = parse_list(key, line, val);
    else throw ConfigError("config: unknown key '" + key + "' (line " + std::to_string(line) + ")");
  }

  // range validation; each failure names the offending key
  if (c.dim < 1 || c.dim > 3) throw ConfigError("config: dim must be 1, 2 or 3");
  if (c.grid_points < 2 || c.grid_points % 2 != 0)
    throw ConfigError("config: grid_points must be even and >= 2");
  if (!(c.box_length > 0)) throw ConfigError("config: box_length must be positive");
  if (!(c.N >= 1)) throw ConfigError("config: N must be >= 1");
  if (c.beta < 0 || c.beta > 1) throw ConfigError("config: beta must lie in [0, 1]");
  if (c.potential_width <= 0) throw ConfigError("config: potential_width must be positive");
  if (c.potential_amplitude < 0)
    throw ConfigError("config: potential_amplitude must be nonnegative");
  if (c.phi_width <= 0) throw ConfigError("config: phi_width must be positive");
  if (!(c.dt > 0)) throw ConfigError("config: dt must be positive");
  if (c.t_final < 0) throw ConfigError("config: t_final must be nonnegative");
  if (c.output_interval < 0) throw ConfigError("config: output_interval must be nonnegative");
  if (c.oracle_sites < 2) throw ConfigError("config: oracle_sites must be >= 2");
  if (c.oracle_n_max_override < 0)
    throw ConfigError("config: oracle_n_max_override must be nonnegative");
  for (double n : c.sweep_N)
    if (!(n >= 1)) throw ConfigError("config: sweep_N entries must be >= 1");
  for (double b : c.sweep_beta)
    if (b < 0 || b > 1) throw ConfigError("config: sweep_beta entries must lie in [0, 1]");
  return c;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimulationConfig& c) {
  std::string out;
  auto kv = [&out](const std::string& k, const std::string& v) {
    out += k + " = " + v + "\n";
  };
  kv("dim", std::to_string(c.dim));
  kv("grid_points", std::to_string(c.grid_points));
  kv("box_length", fmt_double(c.box_length));
  kv("N", fmt_double(c.N));
  kv("beta", fmt_double(c.beta));
  kv("potential_profile", c.potential_profile);
  kv("potential_width", fmt_double(c.potential_width));
  kv("potential_amplitude", fmt_double(c.potential_amplitude));
  kv("initial_phi", c.initial_phi);
  kv("phi_width", fmt_double(c.phi_width));
  kv("phi_center", fmt_double(c.phi_center));
  kv("phi_boost_mode", std::to_string(c.phi_boost_mode));
  kv("mode", mode_name(c.mode));
  kv("dt", fmt_double(c.dt));
  kv("t_final", fmt_double(c.t_final));
  kv("output_interval", fmt_double(c.output_interval));
  kv("oracle_sites", std::to_string(c.oracle_sites));
  kv("oracle_n_max_override", std::to_string(c.oracle_n_max_override));
  kv("seed", std::to_string(c.seed));
  kv("output_dir", c.output_dir);
  kv("sweep_N", fmt_list(c.sweep_N));
  kv("sweep_beta", fmt_list(c.sweep_beta));
  return out;
}

GridPtr config_grid(const SimulationConfig& c) {
  return make_grid(c.dim, c.grid_points, c.box_length);
}

Potential config_potential(const SimulationConfig& c, GridPtr grid) {
  return config_potential(c, std::move(grid), c.N, c.beta);
}

Potential config_potential(const SimulationConfig& c, GridPtr grid, double N,
                           double beta) {
  PotentialProfile p;
  p.name = c.potential_profile;
  p.width = c.potential_width;
  p.amplitude = c.potential_amplitude;
  return make_potential(p, N, beta, std::move(grid));
}

Field build_initial_phi(const SimulationConfig& c, GridPtr grid) {
  const Grid& g = *grid;
  CVector vals = CVector::Zero(g.total_points);
  const double L = g.box_length;
  if (c.initial_phi == "constant") {
    vals.setConstant(1.0);
  } else if (c.initial_phi == "plane_wave") {
    for (Index j = 0; j < g.total_points; ++j) {
      double phase = 0.0;
      for (int a = 0; a < g.dim; ++a)
        phase += 2.0 * M_PI * c.phi_boost_mode * g.coordinate[a](j) / L;
      vals(j) = std::polar(1.0, phase);
    }
  } else if (c.initial_phi == "gaussian") {
    // separable product of periodized one-axis gaussians
    for (Index j = 0; j < g.total_points; ++j) {
      double amp = 1.0;
      for (int a = 0; a < g.dim; ++a) {
        double d = g.coordinate[a](j) - c.phi_center;
        d -= L * std::round(d / L);
        double axis = 0.0;
        for (int m = -3; m <= 3; ++m) {
          const double r = d + m * L;
          axis += std::exp(-0.25 * (r * r) / (c.phi_width * c.phi_width));
        }
        amp *= axis;
      }
      double phase = 0.0;
      for (int a = 0; a < g.dim; ++a)
        phase += 2.0 * M_PI * c.phi_boost_mode * g.coordinate[a](j) / L;
      vals(j) = std::polar(amp, phase);
    }
  } else {
    throw ConfigError("config: unknown initial_phi '" + c.initial_phi + "'");
  }
  Field f{std::move(vals), grid};
  const double n = norm_l2(f);
  if (n == 0.0) throw ConfigError("config: initial field is identically zero");
  f.values /= n;
  return f;
}

}  // namespace pairex
