#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ringcav/dynamics.hpp"

namespace ringcav {

// Two-quadrature modes of the 8-dimensional state.
enum class Mode : int { c = 0, d = 1, a = 2, m = 3 };

struct NoiseModel {
  Mat8 D = Mat8::Zero();
  double n_c = 0.0;
  double n_d = 0.0;
  double n_m = 0.0;
};

NoiseModel noise_model(const DerivedParams& d);

struct CovarianceMatrix {
  Mat8 V = Mat8::Zero();
  double residual = 0.0;  // ‖FV + VFᵀ + D‖ / ‖D‖
  bool ill_conditioned = false;  // residual above 1e-9
  double min_physical_eigenvalue = 0.0;  // min eig of V + iΩ/2
  bool bona_fide = true;
};

// Vacuum quadrature variance is 1/2.
CovarianceMatrix solve_lyapunov(const DriftMatrix& F, const NoiseModel& noise);

// 8-mode symplectic form ⊕ [[0, 1], [-1, 0]] for n modes.
Eigen::MatrixXd symplectic_form(int n_modes);

Eigen::MatrixXd mode_submatrix(const Mat8& V, std::span<const Mode> modes);

// Two-mode log-negativity from the determinant invariants of the 4×4 block.
double log_negativity(const Mat8& V, Mode i, Mode j);
double log_negativity(const Eigen::Matrix4d& Vsub);

// Log-negativity of the bipartition {first mode} | {rest} from the smallest
// symplectic eigenvalue of the partially transposed covariance.
double log_negativity_symplectic(const Eigen::MatrixXd& Vsub);

struct ResidualContangle {
  double R_min = 0.0;                // clamped at 0
  std::array<double, 3> residuals{};  // unclamped, one per singled-out mode
};

ResidualContangle residual_contangle(const Mat8& V, std::array<Mode, 3> triple);

struct PhononNumber {
  double n_eff = 0.0;
  double T_eff = 0.0;  // K
};

PhononNumber phonon_number(const Mat8& V, const DerivedParams& d);

struct DarkModeCoefficients {
  double com_frequency = 0.0;
  double relative_frequency = 0.0;
  double com_optical_coupling = 0.0;
  double com_relative_coupling = 0.0;
  double com_weight_side = 0.0;    // X_cm = w_side X_j + w_mirror φ
  double com_weight_mirror = 0.0;
};

// Center-of-mass / relative transform of a side mode at omega_j and the mirror.
DarkModeCoefficients dark_mode_coefficients(double G, double g_phi, double omega_j,
                                            double omega_phi);

struct DarkModeReport {
  DarkModeCoefficients c;
  DarkModeCoefficients d;
  double detuning_c = 0.0;  // (Ω_c - ω_φ)/ω_φ
  double detuning_d = 0.0;
  bool dark_c = false;
  bool dark_d = false;
};

DarkModeReport dark_mode_report(const DerivedParams& d, double threshold = 1e-3);

struct EntanglementReport {
  double E_am = 0.0, E_ac = 0.0, E_ad = 0.0;
  double R_min_c = 0.0, R_min_d = 0.0;
  double monogamy_min = 0.0;  // smallest unclamped residual over both triples
  double n_eff = 0.0;
  double T_eff = 0.0;
  CovarianceMatrix cov;
};

EntanglementReport entanglement_report(const DerivedParams& d, const SteadyState& s);

enum class EntanglementSweep { delta_prime, oam, winding, temp_mirror };

struct EntanglementRow {
  double sweep_value = 0.0;
  bool stable = false;
  bool ok = false;           // false for gaps (unstable) and failures
  bool unphysical = false;   // e.g. l = 0: no OAM lattice
  EntanglementReport report;
  std::string error;
};

// delta_prime values are in units of ω_φ; temp_mirror in K. For the other
// sweeps the working point is taken from op.
std::vector<EntanglementRow> entanglement_scan(const PhysicalParams& base, const Constants& k,
                                               EntanglementSweep variable,
                                               std::span<const double> values,
                                               const OperatingPoint& op, unsigned threads = 1);

struct Window {
  double begin = 0.0;
  double end = 0.0;
};

// Contiguous stretches of successful rows where E_am < threshold.
std::vector<Window> vanishing_windows(const std::vector<EntanglementRow>& rows,
                                      double threshold = 1e-3);

}  // namespace ringcav
