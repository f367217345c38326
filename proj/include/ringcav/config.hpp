#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "ringcav/mc_oracle.hpp"
#include "ringcav/params.hpp"
#include "ringcav/steady.hpp"

namespace ringcav {

// INI-style configuration:
//   [physical]        every PhysicalParams field (frequencies in Hz)
//   [constants]       optional hbar, k_B, c
//   [operating_point] mode = delta_tilde | delta_prime | delta_prime_over_omega_phi,
//                     value, branch
//   [mc]              optional dt, t_total, n_traj, burn_in, batches_per_traj
// Unknown sections or keys are errors.
struct RunConfig {
  PhysicalParams physical;
  Constants constants;
  OperatingPoint op;
  McConfig mc;
};

// With base == nullptr every required [physical] key must be present;
// otherwise the file only overrides base.
RunConfig parse_config(std::istream& in, const RunConfig* base = nullptr);
RunConfig load_config(const std::string& path, const RunConfig* base = nullptr);

// Canonical text form; parse_config(write_config(c)) == c.
std::string write_config(const RunConfig& c);

// Hash over every physics-relevant input including the operating point.
std::uint64_t config_hash(const RunConfig& c);

// Caption parameter sets: "fig2" (bistability/stability/spectra set) and
// "fig7" (entanglement set).
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace ringcav
