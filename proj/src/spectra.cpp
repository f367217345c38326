#include "ringcav/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <sstream>

#include "ringcav/errors.hpp"
#include "ringcav/parallel.hpp"

namespace ringcav {

namespace {

const cplx I1{0.0, 1.0};

// Noise source weights multiplying |ξ_i|² for i = 3, 4, 5 (side modes c, d and the mirror).
struct ThermalWeights {
  double c = 0.0, d = 0.0, m = 0.0;
};

ThermalWeights thermal_weights(const DerivedParams& d, const DriftMatrix& F, double omega,
                               NoiseRegime regime) {
  ThermalWeights w;
  const Constants& k = d.constants;
  if (regime == NoiseRegime::colored) {
    w.c = -2.0 * F.gamma_m * thermal_factor(omega, d.temp_atoms, k) / d.Omega_c;
    w.d = -2.0 * F.gamma_m * thermal_factor(omega, d.temp_atoms, k) / d.Omega_d;
    w.m = -2.0 * F.gamma_phi * thermal_factor(omega, d.temp_mirror, k) / d.omega_phi;
  } else {
    w.c = 2.0 * F.gamma_m * (2.0 * bose_occupation(d.Omega_c, d.temp_atoms, k) + 1.0);
    w.d = 2.0 * F.gamma_m * (2.0 * bose_occupation(d.Omega_d, d.temp_atoms, k) + 1.0);
    w.m = 2.0 * F.gamma_phi * (2.0 * bose_occupation(d.omega_phi, d.temp_mirror, k) + 1.0);
  }
  return w;
}

}  // namespace

double thermal_factor(double omega, double temperature, const Constants& k) {
  if (temperature <= 0.0) return omega > 0.0 ? 0.0 : 2.0 * omega;
  if (omega == 0.0) return -2.0 * k.k_B * temperature / k.hbar;
  // 1 - coth(x/2) = -2/(e^x - 1)
  return -2.0 * omega / std::expm1(k.hbar * omega / (k.k_B * temperature));
}

double bose_occupation(double omega, double temperature, const Constants& k) {
  if (temperature <= 0.0) return 0.0;
  if (omega <= 0.0) throw DomainError("bose_occupation: frequency must be positive");
  return 1.0 / std::expm1(k.hbar * omega / (k.k_B * temperature));
}

TransferSet transfer(const DriftMatrix& F, double omega) {
  if (!std::isfinite(omega)) throw UsageError("transfer: omega must be finite");
  const Mat8c A = cplx(0.0, -omega) * Mat8c::Identity() - F.entries.cast<cplx>();
  Eigen::PartialPivLU<Mat8c> lu(A);
  if (!(lu.rcond() > 1e-15)) {
    std::ostringstream os;
    os << "transfer: resolvent is singular at omega = " << omega << " rad/s";
    throw NumericalError(os.str());
  }
  TransferSet t;
  t.omega = omega;
  t.M = lu.inverse();

  const double sg = std::sqrt(F.gamma_0);
  const auto& M = t.M;
  auto& f = t.Ftilde;
  // Identification coefficient-by-coefficient with
  //   Q_out = (√γ F̃₂ - 1) Q_in + i√γ F̃₃ P_in + √(2γ)(F̃₅ ε_c + F̃₇ ε_d + F̃₉ ε_φ)
  //   P_out = -i√γ (2F̃₁ + F̃₃) Q_in + (√γ F̃₂ - 1) P_in - i√(2γ)(F̃₄ ε_c + F̃₆ ε_d + F̃₈ ε_φ)
  f[1] = sg * M(Q, Q);
  f[2] = -I1 * sg * M(Q, P);
  f[0] = (I1 * sg * M(P, Q) - f[2]) / 2.0;
  f[4] = M(Q, Yc) / std::sqrt(2.0);
  f[6] = M(Q, Yd) / std::sqrt(2.0);
  f[8] = M(Q, Lz) / std::sqrt(2.0);
  f[3] = I1 * M(P, Yc) / std::sqrt(2.0);
  f[5] = I1 * M(P, Yd) / std::sqrt(2.0);
  f[7] = I1 * M(P, Lz) / std::sqrt(2.0);
  return t;
}

std::array<std::array<cplx, 5>, 2> output_coefficients(const TransferSet& t, double gamma_0) {
  const double g = gamma_0, sg = std::sqrt(gamma_0);
  const auto& M = t.M;
  return {{{g * M(Q, Q) - 1.0, g * M(Q, P), sg * M(Q, Yc), sg * M(Q, Yd), sg * M(Q, Lz)},
           {g * M(P, Q), g * M(P, P) - 1.0, sg * M(P, Yc), sg * M(P, Yd), sg * M(P, Lz)}}};
}

SpectrumResult homodyne_spectrum(const DerivedParams& d, const SteadyState& s, double omega,
                                 double theta, NoiseRegime regime) {
  const DriftMatrix F = build_drift(d, s);
  return homodyne_spectrum(d, F, transfer(F, omega), theta, regime);
}

SpectrumResult homodyne_spectrum(const DerivedParams& d, const DriftMatrix& F,
                                 const TransferSet& t, double theta, NoiseRegime regime) {
  const auto rows = output_coefficients(t, F.gamma_0);
  SpectrumResult r;
  r.omega = t.omega;
  r.theta = theta;
  r.zero_frequency = t.omega == 0.0;
  const double c = std::cos(theta), sn = std::sin(theta);
  for (int i = 0; i < 5; ++i) r.xi[i] = rows[0][i] * c + rows[1][i] * sn;

  const auto& xi = r.xi;
  cplx vac = std::norm(xi[0]) + std::norm(xi[1]);
  if (regime == NoiseRegime::colored) {
    vac += I1 * (std::conj(xi[0]) * xi[1] - std::conj(xi[1]) * xi[0]);
  }
  const double scale = std::norm(xi[0]) + std::norm(xi[1]) + 1.0;
  if (std::abs(vac.imag()) > 1e-10 * scale) {
    throw NumericalError("homodyne_spectrum: vacuum term has an imaginary part");
  }
  const ThermalWeights w = thermal_weights(d, F, t.omega, regime);
  r.S_vac = vac.real();
  r.S_th_c = w.c * std::norm(xi[2]);
  r.S_th_d = w.d * std::norm(xi[3]);
  r.S_th_mirror = w.m * std::norm(xi[4]);
  r.S = r.S_vac + r.S_th_c + r.S_th_d + r.S_th_mirror;
  return r;
}

AngleCoefficients angle_coefficients(const DerivedParams& d, const DriftMatrix& F,
                                     const TransferSet& t, NoiseRegime regime) {
  const double sg = std::sqrt(F.gamma_0), s2g = std::sqrt(2.0 * F.gamma_0);
  const auto& f = t.Ftilde;
  std::array<cplx, 9> k;
  k[0] = -I1 * sg * (2.0 * f[0] + f[2]);
  k[1] = sg * f[1] - 1.0;
  k[2] = I1 * sg * f[2];
  k[3] = -I1 * s2g * f[3];
  k[4] = s2g * f[4];
  k[5] = -I1 * s2g * f[5];
  k[6] = s2g * f[6];
  k[7] = -I1 * s2g * f[7];
  k[8] = s2g * f[8];
  auto cj = [](cplx z) { return std::conj(z); };

  cplx b1 = std::norm(k[0]) - std::norm(k[2]);
  cplx b2 = cj(k[0]) * k[1] + cj(k[1]) * k[0] + cj(k[1]) * k[2] + k[1] * cj(k[2]);
  if (regime == NoiseRegime::colored) {
    b1 += I1 * (cj(k[0]) * k[1] - k[0] * cj(k[1]) - cj(k[1]) * k[2] + cj(k[2]) * k[1]);
    b2 += I1 * (cj(k[0]) * k[2] - cj(k[2]) * k[0]);
  }
  const ThermalWeights w = thermal_weights(d, F, t.omega, regime);
  const double wt[3] = {w.c, w.d, w.m};
  double s0 = 0.5 * (std::norm(k[0]) + 2.0 * std::norm(k[1]) + std::norm(k[2]));
  if (regime == NoiseRegime::colored) s0 -= std::imag(cj(k[0]) * k[1] + cj(k[1]) * k[2]);
  for (int j = 0; j < 3; ++j) {
    const cplx a = k[3 + 2 * j], b = k[4 + 2 * j];
    b1 += wt[j] * (std::norm(a) - std::norm(b));
    b2 += wt[j] * (cj(a) * b + a * cj(b));
    s0 += 0.5 * wt[j] * (std::norm(a) + std::norm(b));
  }
  return {b1.real(), b2.real(), s0};
}

OptimalAngle optimal_angle(const DerivedParams& d, const SteadyState& s, double omega,
                           NoiseRegime regime) {
  return optimal_angle(d, build_drift(d, s), omega, regime);
}

OptimalAngle optimal_angle(const DerivedParams& d, const DriftMatrix& F, double omega,
                           NoiseRegime regime) {
  const TransferSet t = transfer(F, omega);
  OptimalAngle out;
  out.coeffs = angle_coefficients(d, F, t, regime);
  const double B1 = out.coeffs.B1, B2 = out.coeffs.B2;
  if (std::hypot(B1, B2) <= 1e-14 * std::max(1.0, std::abs(out.coeffs.S0))) {
    out.degenerate = true;
    out.theta = 0.0;
    out.S = homodyne_spectrum(d, F, t, 0.0, regime).S;
    return out;
  }
  double theta = 0.5 * std::atan2(-B2, B1);
  if (theta < 0.0) theta += M_PI;
  double other = theta + M_PI / 2.0;
  if (other >= M_PI) other -= M_PI;
  const double Sa = homodyne_spectrum(d, F, t, theta, regime).S;
  const double Sb = homodyne_spectrum(d, F, t, other, regime).S;
  out.theta = Sa <= Sb ? theta : other;
  out.S = std::min(Sa, Sb);
  return out;
}

std::vector<OptimizedPoint> optimized_spectrum(const DerivedParams& d, const SteadyState& s,
                                               std::span<const double> omega_grid,
                                               NoiseRegime regime, unsigned threads) {
  const DriftMatrix F = build_drift(d, s);
  std::vector<OptimizedPoint> out(omega_grid.size());
  std::vector<std::string> errors(omega_grid.size());
  parallel_for(omega_grid.size(), threads, [&](std::size_t i) {
    try {
      const OptimalAngle a = optimal_angle(d, F, omega_grid[i], regime);
      out[i].omega = omega_grid[i];
      out[i].theta_opt = a.theta;
      out[i].S_opt = a.S;
      out[i].degenerate = a.degenerate;
      out[i].spectrum = homodyne_spectrum(d, F, transfer(F, omega_grid[i]), a.theta, regime);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericalError("optimized_spectrum: " + e);
  }
  return out;
}

double mirror_normal_mode_frequency(const DriftMatrix& F) {
  Eigen::EigenSolver<Mat8> es(F.entries, true);
  if (es.info() != Eigen::Success) throw NumericalError("mirror mode: eigen solver failed");
  double best_weight = -1.0, best_freq = 0.0;
  for (int j = 0; j < 8; ++j) {
    const cplx lambda = es.eigenvalues()(j);
    if (lambda.imag() <= 0.0) continue;
    const auto v = es.eigenvectors().col(j);
    const double weight = (std::norm(v(Phi)) + std::norm(v(Lz))) / v.squaredNorm();
    if (weight > best_weight) {
      best_weight = weight;
      best_freq = lambda.imag();
    }
  }
  if (best_weight < 0.0) throw NumericalError("mirror mode: no oscillatory eigenvalue");
  return best_freq;
}

std::vector<MirrorSqueezingRow> mirror_squeezing_scan(const PhysicalParams& base,
                                                      const Constants& k,
                                                      const OperatingPoint& op,
                                                      std::span<const double> windings,
                                                      unsigned threads) {
  std::vector<MirrorSqueezingRow> rows(windings.size());
  parallel_for(windings.size(), threads, [&](std::size_t i) {
    MirrorSqueezingRow& row = rows[i];
    row.winding = windings[i];
    try {
      PhysicalParams p = base;
      p.winding = windings[i];
      const DerivedParams d = derive(p, k);
      const DriftMatrix F = build_drift(d, resolve_steady(d, op));
      row.stable = stability(F).stable;
      row.omega_mirror = mirror_normal_mode_frequency(F);
      const OptimalAngle at_mode = optimal_angle(d, F, row.omega_mirror);
      row.S_opt_mode = at_mode.S;
      row.theta_opt_mode = at_mode.theta;
      row.S_opt_omega_phi = optimal_angle(d, F, d.omega_phi).S;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

}  // namespace ringcav
