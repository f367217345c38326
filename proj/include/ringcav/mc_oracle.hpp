#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ringcav/entangle.hpp"

namespace ringcav {

enum class McNoiseMode { markovian };

struct McConfig {
  double dt = 0.0;       // s
  double t_total = 0.0;  // s, per trajectory
  int n_traj = 1;
  std::uint64_t seed = 1;
  double burn_in = 0.1;  // fraction of t_total discarded
  int batches_per_traj = 16;
  McNoiseMode noise_mode = McNoiseMode::markovian;
  unsigned threads = 1;
};

// Largest |λ| of the drift matrix; the step must satisfy dt < 0.1/that.
double max_abs_eigenvalue(const DriftMatrix& F);

// Throws ConfigError when the configuration violates its invariants.
void check_config(const McConfig& cfg, const DriftMatrix& F);

// Per-trajectory stream seed (splitmix64 of the run seed and trajectory index).
std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t trajectory);

struct McCovariance {
  Mat8 V_est = Mat8::Zero();
  Mat8 stderr_ = Mat8::Zero();
  int n_batches = 0;
  long long samples = 0;
};

struct McSpectrum {
  std::vector<double> theta;
  std::vector<double> omega;
  std::vector<double> S_est;
  std::vector<double> stderr_;
  int segment_steps = 0;
  long long segments = 0;
};

// Estimates S at the pairs (omega[i], theta[i]).
struct SpectrumRequest {
  std::vector<double> omega;  // rad/s
  std::vector<double> theta;  // rad
  int segment_steps = 0;      // Welch segment length, Hann window, 50% overlap
};

struct McRun {
  McCovariance covariance;
  std::optional<McSpectrum> spectrum;
};

// One step of the exact discretization: u ← Phi u + η, η ~ N(0, Qd).
// Its stationary covariance solves F V + V Fᵀ = -D with no step-size bias.
struct McStepMatrices {
  Mat8 Phi;
  Mat8 Qd;
};
McStepMatrices step_matrices(const DriftMatrix& F, const NoiseModel& noise, double dt);

// Integrates du = F u dt + √D dW with the exact one-step transition. The
// Wiener increments of the Q and P inputs are drawn jointly with η, so the
// output quadrature follows from the input-output relation with the same
// noise that drives the cavity.
McRun run_oracle(const DriftMatrix& F, const NoiseModel& noise, const McConfig& cfg,
                 const SpectrumRequest* spectrum = nullptr);

McCovariance simulate(const DriftMatrix& F, const NoiseModel& noise, const McConfig& cfg);

McSpectrum output_spectrum_estimate(const DriftMatrix& F, const NoiseModel& noise,
                                    const McConfig& cfg, double theta,
                                    std::span<const double> omega_grid, int segment_steps);

// Expected value of the Welch estimate: the Markovian spectrum convolved with
// the Hann segment kernel.
double expected_periodogram(const DerivedParams& d, const DriftMatrix& F, double theta,
                            double omega, int segment_steps, double dt);

struct DivergenceReport {
  bool diverging = false;
  std::vector<double> window_second_moment;  // mean |u|² per window after burn-in
};

// For unstable drift matrices: second moments per time window (single trajectory).
DivergenceReport divergence_check(const DriftMatrix& F, const NoiseModel& noise,
                                  const McConfig& cfg, int windows = 10);

}  // namespace ringcav
