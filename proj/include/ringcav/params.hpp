#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ringcav {

// Physical constants (SI). Overridable through the [constants] config section.
struct Constants {
  double hbar = 1.054571817e-34;
  double k_B = 1.380649e-23;
  double c = 2.99792458e8;
};

inline constexpr double kSodiumMass = 3.81754e-26;

// Raw experimental inputs. Frequencies are cyclic (Hz), as quoted in figure
// captions; derive() converts them to angular units.
struct PhysicalParams {
  double atom_mass = kSodiumMass;      // kg
  double n_atoms = 0.0;                // N
  double ring_radius = 0.0;            // m
  double trap_radial = 0.0;            // ω_ρ/2π, Hz
  double trap_axial = 0.0;             // ω_z/2π, Hz
  double scattering_length = 0.0;      // m
  double atom_photon_coupling = 0.0;   // g_a/2π, Hz
  double atom_detuning = 0.0;          // Δ_a/2π, Hz
  double cavity_freq = 0.0;            // ω₀/2π, Hz
  double cavity_linewidth = 0.0;       // γ₀/2π, Hz
  double cavity_length = 0.0;          // m
  double oam = 1.0;                    // topological charge l
  double winding = 0.0;                // winding number L_p
  double drive_power = 0.0;            // W
  double cavity_detuning_eff = 0.0;    // Δ̃/2π, Hz (signed)
  double mirror_mass = 0.0;            // kg
  double mirror_radius = 0.0;          // m
  double mirror_freq = 0.0;            // ω_φ/2π, Hz
  double mirror_damping = 0.0;         // γ_φ/2π, Hz
  double sidemode_damping = 0.0;       // γ_m/2π, Hz
  double temp_atoms = 0.0;             // K
  double temp_mirror = 0.0;            // K
  std::optional<double> gtilde_override;  // g̃/2π, Hz
};

// Effective constants, all frequencies in rad/s.
struct DerivedParams {
  PhysicalParams source;
  Constants constants;
  std::uint64_t hash = 0;

  double U0 = 0.0;
  double G = 0.0;
  double eta = 0.0;
  double I_atom = 0.0;
  double I_mirror = 0.0;
  double g_phi = 0.0;
  double omega_c = 0.0;
  double omega_d = 0.0;
  double gtilde = 0.0;
  double Omega_c = 0.0;
  double Omega_d = 0.0;
  double omegatilde_c = 0.0;
  double omegatilde_d = 0.0;
  double calA = 0.0;
  // Static response coefficients of the side modes: X_js = -Omegatilde_j G a_s².
  double Omegatilde_c = 0.0;
  double Omegatilde_d = 0.0;
  // Intensity-dependent detuning shift K: Δ' = Δ̃ + K a_s².
  double kerr = 0.0;
  double Delta_tilde = 0.0;
  double Delta_0 = 0.0;  // bare detuning Δ̃ + U₀N/2, reported only

  double omega_0 = 0.0;
  double gamma_0 = 0.0;
  double gamma_m = 0.0;
  double gamma_phi = 0.0;
  double omega_phi = 0.0;
  double temp_atoms = 0.0;
  double temp_mirror = 0.0;
};

// allow_zero_oam admits l = 0 (no OAM lattice) for guard points in scans.
DerivedParams derive(const PhysicalParams& p, const Constants& k = {}, bool allow_zero_oam = false);

struct ValidationEntry {
  std::string name;
  bool passed = true;
  bool warning = false;
  double value = 0.0;
  double bound = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool all_passed() const;
};

// Report-only checks of the quasi-1D condensate and the ω_{c,d} ≫ 4g̃N regime.
ValidationReport validate(const PhysicalParams& p, const Constants& k = {});

// Upper bound on N for the one-dimensional ring description.
double one_dimensional_atom_bound(const PhysicalParams& p);

// Stable 64-bit fingerprint of every physics-relevant input.
std::uint64_t params_hash(const PhysicalParams& p, const Constants& k);

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double to_angular(double hz) { return kTwoPi * hz; }
inline double to_hz(double rad_per_s) { return rad_per_s / kTwoPi; }

}  // namespace ringcav
