#include "ringcav/entangle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "ringcav/errors.hpp"
#include "ringcav/parallel.hpp"
#include "ringcav/spectra.hpp"

namespace ringcav {

namespace {

// log-negativity from the smallest partially-transposed symplectic eigenvalue
double from_nu(double nu) { return std::max(0.0, -std::log(2.0 * nu)); }

}  // namespace

NoiseModel noise_model(const DerivedParams& d) {
  NoiseModel n;
  const Constants& k = d.constants;
  n.n_c = bose_occupation(d.Omega_c, d.temp_atoms, k);
  n.n_d = bose_occupation(d.Omega_d, d.temp_atoms, k);
  n.n_m = bose_occupation(d.omega_phi, d.temp_mirror, k);
  n.D(Yc, Yc) = d.gamma_m * (2.0 * n.n_c + 1.0);
  n.D(Yd, Yd) = d.gamma_m * (2.0 * n.n_d + 1.0);
  n.D(Q, Q) = d.gamma_0 / 2.0;
  n.D(P, P) = d.gamma_0 / 2.0;
  n.D(Lz, Lz) = d.gamma_phi * (2.0 * n.n_m + 1.0);
  return n;
}

Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    J(2 * i, 2 * i + 1) = 1.0;
    J(2 * i + 1, 2 * i) = -1.0;
  }
  return J;
}

CovarianceMatrix solve_lyapunov(const DriftMatrix& F, const NoiseModel& noise) {
  const Stability st = stability(F);
  if (!st.stable) {
    std::ostringstream os;
    os << "solve_lyapunov: drift matrix is not stable (max Re lambda = " << st.margin
       << " rad/s); no stationary state";
    throw PreconditionError(os.str());
  }
  // vec(FV + VFᵀ) = (I ⊗ F + F ⊗ I) vec(V)
  using Mat64 = Eigen::Matrix<double, 64, 64>;
  const Mat8 I8 = Mat8::Identity();
  Mat64 K;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      K.block<8, 8>(8 * i, 8 * j) = I8(i, j) * F.entries + F.entries(i, j) * I8;
    }
  }
  Eigen::Matrix<double, 64, 1> rhs;
  for (int j = 0; j < 8; ++j) rhs.segment<8>(8 * j) = -noise.D.col(j);
  const Eigen::Matrix<double, 64, 1> x = K.fullPivLu().solve(rhs);

  CovarianceMatrix out;
  for (int j = 0; j < 8; ++j) out.V.col(j) = x.segment<8>(8 * j);
  out.V = 0.5 * (out.V + out.V.transpose()).eval();
  const double dnorm = noise.D.norm();
  const Mat8 res = F.entries * out.V + out.V * F.entries.transpose() + noise.D;
  out.residual = dnorm > 0.0 ? res.norm() / dnorm : res.norm();
  out.ill_conditioned = !(out.residual < 1e-9);

  Eigen::Matrix<std::complex<double>, 8, 8> H =
      out.V.cast<std::complex<double>>() +
      std::complex<double>(0.0, 0.5) * symplectic_form(4).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<std::complex<double>, 8, 8>> es(H);
  out.min_physical_eigenvalue = es.eigenvalues().minCoeff();
  out.bona_fide = out.min_physical_eigenvalue >= -1e-9;
  return out;
}

Eigen::MatrixXd mode_submatrix(const Mat8& V, std::span<const Mode> modes) {
  const int n = static_cast<int>(modes.size());
  Eigen::MatrixXd S(2 * n, 2 * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      S.block<2, 2>(2 * a, 2 * b) =
          V.block<2, 2>(2 * static_cast<int>(modes[a]), 2 * static_cast<int>(modes[b]));
    }
  }
  return S;
}

double log_negativity(const Mat8& V, Mode i, Mode j) {
  const Mode pair[2] = {i, j};
  return log_negativity(Eigen::Matrix4d(mode_submatrix(V, pair)));
}

double log_negativity(const Eigen::Matrix4d& Vs) {
  const double detA = Vs.block<2, 2>(0, 0).determinant();
  const double detB = Vs.block<2, 2>(2, 2).determinant();
  const double detC = Vs.block<2, 2>(0, 2).determinant();
  const double detV = Vs.determinant();
  const double sigma = detA + detB - 2.0 * detC;
  double radicand = sigma * sigma - 4.0 * detV;
  if (radicand < -1e-9 * std::max(1.0, sigma * sigma)) {
    std::ostringstream os;
    os << "log_negativity: non-physical covariance (Sigma^2 - 4 det V = " << radicand << ")";
    throw DomainError(os.str());
  }
  radicand = std::max(radicand, 0.0);
  const double eta_minus = std::sqrt(std::max(0.0, (sigma - std::sqrt(radicand)) / 2.0));
  return from_nu(eta_minus);
}

double log_negativity_symplectic(const Eigen::MatrixXd& Vs) {
  const int n = static_cast<int>(Vs.rows()) / 2;
  Eigen::MatrixXd Vt = Vs;
  // partial transpose on the first mode: p → -p
  Vt.row(1) *= -1.0;
  Vt.col(1) *= -1.0;
  const Eigen::MatrixXd A = symplectic_form(n) * Vt;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("symplectic eigenvalues: eigen solver did not converge");
  }
  return from_nu(es.eigenvalues().cwiseAbs().minCoeff());
}

ResidualContangle residual_contangle(const Mat8& V, std::array<Mode, 3> triple) {
  ResidualContangle out;
  out.R_min = std::numeric_limits<double>::infinity();
  for (int r = 0; r < 3; ++r) {
    const Mode i = triple[r];
    const Mode j = triple[(r + 1) % 3];
    const Mode k = triple[(r + 2) % 3];
    const Mode ijk[3] = {i, j, k};
    const double one_vs_two = log_negativity_symplectic(mode_submatrix(V, ijk));
    const double eij = log_negativity(V, i, j);
    const double eik = log_negativity(V, i, k);
    out.residuals[r] = one_vs_two * one_vs_two - eij * eij - eik * eik;
    out.R_min = std::min(out.R_min, std::max(0.0, out.residuals[r]));
  }
  return out;
}

PhononNumber phonon_number(const Mat8& V, const DerivedParams& d) {
  double n = 0.5 * (V(Phi, Phi) + V(Lz, Lz)) - 0.5;
  if (n < -1e-6) {
    std::ostringstream os;
    os << "phonon_number: negative occupation " << n << " (covariance below vacuum)";
    throw DomainError(os.str());
  }
  n = std::max(n, 0.0);
  PhononNumber out;
  out.n_eff = n;
  out.T_eff = n > 0.0 ? d.constants.hbar * d.omega_phi / (d.constants.k_B * std::log1p(1.0 / n))
                      : 0.0;
  return out;
}

DarkModeCoefficients dark_mode_coefficients(double G, double g_phi, double omega_j,
                                            double omega_phi) {
  const double norm2 = G * G + g_phi * g_phi;
  if (!(norm2 > 0.0)) {
    throw DomainError("dark_mode_report: G = g_phi = 0, center-of-mass transform undefined");
  }
  DarkModeCoefficients c;
  c.com_frequency = (omega_j * G * G + omega_phi * g_phi * g_phi) / norm2;
  c.relative_frequency = (omega_j * g_phi * g_phi + omega_phi * G * G) / norm2;
  c.com_optical_coupling = std::sqrt(norm2);
  c.com_relative_coupling = 0.5 * G * g_phi * (omega_phi - omega_j) / norm2;
  c.com_weight_side = G / std::sqrt(norm2);
  c.com_weight_mirror = g_phi / std::sqrt(norm2);
  return c;
}

DarkModeReport dark_mode_report(const DerivedParams& d, double threshold) {
  DarkModeReport r;
  r.c = dark_mode_coefficients(d.G, d.g_phi, d.Omega_c, d.omega_phi);
  r.d = dark_mode_coefficients(d.G, d.g_phi, d.Omega_d, d.omega_phi);
  r.detuning_c = (d.Omega_c - d.omega_phi) / d.omega_phi;
  r.detuning_d = (d.Omega_d - d.omega_phi) / d.omega_phi;
  r.dark_c = std::abs(r.detuning_c) < threshold;
  r.dark_d = std::abs(r.detuning_d) < threshold;
  return r;
}

EntanglementReport entanglement_report(const DerivedParams& d, const SteadyState& s) {
  const DriftMatrix F = build_drift(d, s);
  EntanglementReport r;
  // Measures are reported even when cov.bona_fide is false: with g̃ ≠ 0 the
  // dressed side-mode couplings are not reciprocal and V can undershoot the
  // uncertainty bound slightly. Callers see the flag.
  r.cov = solve_lyapunov(F, noise_model(d));
  const Mat8& V = r.cov.V;
  r.E_am = log_negativity(V, Mode::a, Mode::m);
  r.E_ac = log_negativity(V, Mode::a, Mode::c);
  r.E_ad = log_negativity(V, Mode::a, Mode::d);
  const auto rc = residual_contangle(V, {Mode::a, Mode::m, Mode::c});
  const auto rd = residual_contangle(V, {Mode::a, Mode::m, Mode::d});
  r.R_min_c = rc.R_min;
  r.R_min_d = rd.R_min;
  r.monogamy_min = std::min(*std::min_element(rc.residuals.begin(), rc.residuals.end()),
                            *std::min_element(rd.residuals.begin(), rd.residuals.end()));
  const PhononNumber ph = phonon_number(V, d);
  r.n_eff = ph.n_eff;
  r.T_eff = ph.T_eff;
  return r;
}

std::vector<EntanglementRow> entanglement_scan(const PhysicalParams& base, const Constants& k,
                                               EntanglementSweep variable,
                                               std::span<const double> values,
                                               const OperatingPoint& op, unsigned threads) {
  std::vector<EntanglementRow> rows(values.size());
  parallel_for(values.size(), threads, [&](std::size_t i) {
    EntanglementRow& row = rows[i];
    row.sweep_value = values[i];
    try {
      PhysicalParams p = base;
      OperatingPoint point = op;
      switch (variable) {
        case EntanglementSweep::delta_prime:
          point.kind = OperatingPoint::Kind::delta_prime_over_omega_phi;
          point.value = values[i];
          break;
        case EntanglementSweep::oam:
          p.oam = values[i];
          row.unphysical = values[i] < 1.0;
          break;
        case EntanglementSweep::winding:
          p.winding = values[i];
          break;
        case EntanglementSweep::temp_mirror:
          p.temp_mirror = values[i];
          break;
      }
      const DerivedParams d = derive(p, k, row.unphysical);
      const SteadyState s = resolve_steady(d, point);
      row.stable = stability(build_drift(d, s)).stable;
      if (!row.stable) {
        row.error = "unstable";
        return;
      }
      row.report = entanglement_report(d, s);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

std::vector<Window> vanishing_windows(const std::vector<EntanglementRow>& rows,
                                      double threshold) {
  std::vector<Window> out;
  bool open = false;
  for (const auto& r : rows) {
    const bool vanishing = r.ok && r.report.E_am < threshold;
    if (vanishing && !open) {
      out.push_back({r.sweep_value, r.sweep_value});
      open = true;
    } else if (vanishing) {
      out.back().end = r.sweep_value;
    } else {
      open = false;
    }
  }
  return out;
}

}  // namespace ringcav
