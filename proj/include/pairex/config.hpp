#pragma once

// key = value configuration with '#' comments. Unknown keys are a hard
// error. A parsed config round-trips exactly through serialize_config.

#include <string>
#include <vector>

#include "pairex/dynamics.hpp"

namespace pairex {

struct SimulationConfig {
  int dim = 1;
  int grid_points = 64;
  double box_length = 2.0 * 3.14159265358979323846;

  double N = 100.0;
  double beta = 0.3;

  std::string potential_profile = "gaussian";  // gaussian | bump | zero
  double potential_width = 0.5;
  double potential_amplitude = 1.0;

  std::string initial_phi = "gaussian";  // gaussian | constant | plane_wave
  double phi_width = 1.0;
  double phi_center = 0.0;
  int phi_boost_mode = 0;

  EvolutionMode mode = EvolutionMode::coupled;
  double dt = 1e-3;
  double t_final = 1.0;
  double output_interval = 0.1;

  int oracle_sites = 4;
  int oracle_n_max_override = 0;  // 0: use the truncation rule

  std::uint64_t seed = 42;
  std::string output_dir = "out";

  std::vector<double> sweep_N;     // empty: use N
  std::vector<double> sweep_beta;  // empty: use beta
};

SimulationConfig parse_config(const std::string& text);
SimulationConfig load_config(const std::string& path);
std::string serialize_config(const SimulationConfig& c);

std::string mode_name(EvolutionMode m);
EvolutionMode mode_from_name(const std::string& name);

// grid, potential and initial field specified by the config
GridPtr config_grid(const SimulationConfig& c);
Potential config_potential(const SimulationConfig& c, GridPtr grid);
Potential config_potential(const SimulationConfig& c, GridPtr grid, double N,
                           double beta);
Field build_initial_phi(const SimulationConfig& c, GridPtr grid);

}  // namespace pairex
