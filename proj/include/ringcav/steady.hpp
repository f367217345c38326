#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ringcav/params.hpp"

namespace ringcav {

struct SteadyState {
  double a_s = 0.0;        // real, >= 0
  double intensity = 0.0;  // a_s²
  double X_cs = 0.0;
  double X_ds = 0.0;
  double phi_s = 0.0;
  double Delta_prime = 0.0;  // rad/s
  double Delta_tilde = 0.0;  // effective detuning this state was solved for, rad/s
  int branch_index = 0;
  double Omegatilde_c = 0.0;
  double Omegatilde_d = 0.0;
  double residual = 0.0;  // |a_s²(Δ'² + γ₀²/4) - η²| / η²
  std::uint64_t params_hash = 0;
};

// All physical (x = a_s² >= 0) roots of x[(Δ̃ + Kx)² + (γ₀/2)²] = η², ascending.
std::vector<SteadyState> solve_steady(const DerivedParams& d);

// Same, for an explicit Δ̃ in place of d.Delta_tilde.
std::vector<SteadyState> solve_steady(const DerivedParams& d, double delta_tilde);

// Steady state pinned to a chosen modified detuning Δ' (feedback-stabilized
// operation). The matching Δ̃ = Δ' - K a_s² is reported in the state.
SteadyState steady_at_modified_detuning(const DerivedParams& d, double delta_prime);

struct CriticalThresholds {
  double Delta_cr = 0.0;  // rad/s
  double P_cr = 0.0;      // W; +inf when there is no intensity-dependent shift
};

CriticalThresholds critical_thresholds(const DerivedParams& d);

// Discriminant of the scaled steady-state cubic divided by the sixth power of
// its root scale (a² + |b| + |c|^(2/3))^(1/2); positive means three distinct
// real roots, ~0 marks a fold or the critical point.
double steady_discriminant(const DerivedParams& d, double delta_tilde);

enum class BistabilitySweep { drive_power, detuning };

struct BistabilityRow {
  double sweep_value = 0.0;  // W or Hz, as supplied
  std::vector<double> intensities;  // ascending a_s²
  bool fold = false;                // branch count differs from the previous row
  bool middle_unstable = false;     // three branches: middle one unstable by fold topology
};

std::vector<BistabilityRow> bistability_scan(const PhysicalParams& p, const Constants& k,
                                             BistabilitySweep variable,
                                             std::span<const double> values);

// How a scan or command picks its working point.
struct OperatingPoint {
  enum class Kind {
    delta_tilde,                // solve the cubic at the configured Δ̃
    delta_prime,                // Δ' given directly, value in Hz
    delta_prime_over_omega_phi  // Δ' = value · ω_φ
  };
  Kind kind = Kind::delta_tilde;
  double value = 0.0;
  std::optional<int> branch;  // required when the cubic has three roots
};

// Steady state at an operating point. Throws UsageError in the bistable window
// when no branch is selected.
SteadyState resolve_steady(const DerivedParams& d, const OperatingPoint& op);

}  // namespace ringcav
