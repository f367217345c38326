#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "ringcav/dynamics.hpp"

namespace ringcav {

using cplx = std::complex<double>;
using Mat8c = Eigen::Matrix<cplx, 8, 8>;

// Fourier convention u(ω) = ∫ u(t) e^{iωt} dt, so d/dt → -iω.
struct TransferSet {
  double omega = 0.0;
  std::array<cplx, 9> Ftilde{};  // F̃₁..F̃₉ at index 0..8
  Mat8c M;                       // (-iωI - F)⁻¹
};

TransferSet transfer(const DriftMatrix& F, double omega);

enum class NoiseRegime {
  colored,    // coth thermal correlators and the Q_in/P_in commutator term
  markovian,  // white noise with the diffusion matrix D, symmetrized
};

struct SpectrumResult {
  double omega = 0.0;
  double theta = 0.0;
  double S = 0.0;
  std::array<cplx, 5> xi{};
  double S_vac = 0.0;
  double S_th_c = 0.0;
  double S_th_d = 0.0;
  double S_th_mirror = 0.0;
  bool zero_frequency = false;  // thermal terms taken at their ω → 0 limit
};

// ω(1 - coth(ħω/2k_BT)), finite at ω = 0 and T = 0.
double thermal_factor(double omega, double temperature, const Constants& k);

// Mean thermal occupation 1/(e^{ħω/k_BT} - 1).
double bose_occupation(double omega, double temperature, const Constants& k);

// Coefficients mapping (Q_in, P_in, ε_c, ε_d, ε_φ) to Q_out (row 0) and P_out (row 1).
std::array<std::array<cplx, 5>, 2> output_coefficients(const TransferSet& t, double gamma_0);

SpectrumResult homodyne_spectrum(const DerivedParams& d, const SteadyState& s, double omega,
                                 double theta, NoiseRegime regime = NoiseRegime::colored);
SpectrumResult homodyne_spectrum(const DerivedParams& d, const DriftMatrix& F,
                                 const TransferSet& t, double theta,
                                 NoiseRegime regime = NoiseRegime::colored);

struct AngleCoefficients {
  double B1 = 0.0;
  double B2 = 0.0;
  double S0 = 0.0;  // θ-average of S
};

// S(θ) = S0 - (B1/2) cos 2θ + (B2/2) sin 2θ.
AngleCoefficients angle_coefficients(const DerivedParams& d, const DriftMatrix& F,
                                     const TransferSet& t,
                                     NoiseRegime regime = NoiseRegime::colored);

struct OptimalAngle {
  double theta = 0.0;  // rad, in [0, π)
  double S = 0.0;
  bool degenerate = false;  // S independent of θ
  AngleCoefficients coeffs;
};

OptimalAngle optimal_angle(const DerivedParams& d, const SteadyState& s, double omega,
                           NoiseRegime regime = NoiseRegime::colored);
OptimalAngle optimal_angle(const DerivedParams& d, const DriftMatrix& F, double omega,
                           NoiseRegime regime = NoiseRegime::colored);

struct OptimizedPoint {
  double omega = 0.0;
  double theta_opt = 0.0;
  double S_opt = 0.0;
  bool degenerate = false;
  SpectrumResult spectrum;  // breakdown at θ_opt
};

std::vector<OptimizedPoint> optimized_spectrum(const DerivedParams& d, const SteadyState& s,
                                               std::span<const double> omega_grid,
                                               NoiseRegime regime = NoiseRegime::colored,
                                               unsigned threads = 1);

// Mode-resolved eigenfrequency of the mirror-like normal mode (largest weight
// on δφ, δL_z among eigenvectors with Im λ > 0).
double mirror_normal_mode_frequency(const DriftMatrix& F);

struct MirrorSqueezingRow {
  double winding = 0.0;
  bool ok = false;
  bool stable = false;
  double omega_mirror = 0.0;  // mirror-like normal-mode frequency, rad/s
  double S_opt_mode = 0.0;    // S_opt at omega_mirror
  double theta_opt_mode = 0.0;
  double S_opt_omega_phi = 0.0;  // S_opt at the bare ω_φ
  std::string error;
};

// Optimized squeezing at the mirror resonance as the winding number varies.
std::vector<MirrorSqueezingRow> mirror_squeezing_scan(const PhysicalParams& base,
                                                      const Constants& k,
                                                      const OperatingPoint& op,
                                                      std::span<const double> windings,
                                                      unsigned threads = 1);

}  // namespace ringcav
