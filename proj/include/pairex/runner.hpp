#pragma once

// Batch drivers behind the CLI subcommands. All outputs are deterministic
// given the config (including its seed).

#include <string>

#include "pairex/config.hpp"

namespace pairex {

// diagnostics.csv + kernel/field snapshots at every output interval
void run_evolve(const SimulationConfig& c, const std::string& outdir);

// evolves on the oracle lattice, compares against the exact truncated-Fock
// evolution, writes oracle.json
void run_oracle(const SimulationConfig& c, const std::string& outdir);

// kernel-algebra identity battery; writes identities.json and throws
// ToleranceError if any residual exceeds its documented tolerance
void run_identities(const SimulationConfig& c, const std::string& outdir);

// (N, beta) sweep of coupled vs mean-field-only Fock-norm error; sweep.csv
void run_sweep(const SimulationConfig& c, const std::string& outdir);

}  // namespace pairex
