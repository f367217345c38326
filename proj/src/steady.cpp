#include "ringcav/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ringcav/errors.hpp"

namespace ringcav {

namespace {

constexpr double kResidualTol = 1e-12;
constexpr double kFoldTol = 1e-9;

struct Cubic {
  // y³ + a y² + b y + c = 0
  double a, b, c;
};

// Real roots of a monic cubic. Near-degenerate discriminants collapse to the
// double-root form so folds are reported as two distinct values.
std::vector<double> real_roots(const Cubic& cu) {
  const double a = cu.a, b = cu.b, c = cu.c;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;

  const double disc = -(4.0 * p * p * p + 27.0 * q * q);
  const double scale = 4.0 * std::abs(p * p * p) + 27.0 * q * q;
  std::vector<double> roots;
  if (scale == 0.0) {
    roots.push_back(shift);  // triple root
  } else if (std::abs(disc) <= kFoldTol * scale) {
    if (p == 0.0) {
      roots.push_back(shift);
    } else {
      roots.push_back(3.0 * q / p + shift);
      roots.push_back(-1.5 * q / p + shift);
    }
  } else if (disc > 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots.push_back(m * std::cos(theta - 2.0 * M_PI * k / 3.0) + shift);
    }
  } else {
    const double s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s) + shift);
  }
  return roots;
}

double residual_of(double x, double delta_tilde, double kerr, double kappa, double eta2) {
  const double dp = delta_tilde + kerr * x;
  return x * (dp * dp + kappa * kappa) - eta2;
}

double polish(double x, double delta_tilde, double kerr, double kappa, double eta2) {
  for (int it = 0; it < 200; ++it) {
    const double dp = delta_tilde + kerr * x;
    const double f = x * (dp * dp + kappa * kappa) - eta2;
    if (std::abs(f) <= 0.01 * kResidualTol * eta2) break;
    const double df = dp * dp + kappa * kappa + 2.0 * kerr * x * dp;
    if (df == 0.0) break;
    const double next = x - f / df;
    if (!std::isfinite(next)) break;
    if (std::abs(residual_of(next, delta_tilde, kerr, kappa, eta2)) >= std::abs(f)) break;
    x = next;
  }
  return x;
}

SteadyState expand(const DerivedParams& d, double x, double delta_tilde) {
  SteadyState s;
  s.intensity = x;
  s.a_s = std::sqrt(x);
  s.Delta_tilde = delta_tilde;
  s.Delta_prime = delta_tilde + d.kerr * x;
  s.X_cs = -d.Omegatilde_c * d.G * x;
  s.X_ds = -d.Omegatilde_d * d.G * x;
  s.phi_s = -(d.g_phi / d.omega_phi) * x;
  s.Omegatilde_c = d.Omegatilde_c;
  s.Omegatilde_d = d.Omegatilde_d;
  s.params_hash = d.hash;
  const double kappa = d.gamma_0 / 2.0;
  const double eta2 = d.eta * d.eta;
  s.residual = eta2 > 0.0
                   ? std::abs(x * (s.Delta_prime * s.Delta_prime + kappa * kappa) - eta2) / eta2
                   : 0.0;
  return s;
}

Cubic scaled_cubic(const DerivedParams& d, double delta_tilde) {
  // y = K x / κ, δ = Δ̃/κ  →  y³ + 2δy² + (δ² + 1)y - η²K/κ³ = 0
  const double kappa = d.gamma_0 / 2.0;
  const double delta = delta_tilde / kappa;
  return Cubic{2.0 * delta, delta * delta + 1.0,
               -d.eta * d.eta * d.kerr / (kappa * kappa * kappa)};
}

}  // namespace

std::vector<SteadyState> solve_steady(const DerivedParams& d) {
  return solve_steady(d, d.Delta_tilde);
}

std::vector<SteadyState> solve_steady(const DerivedParams& d, double delta_tilde) {
  const double kappa = d.gamma_0 / 2.0;
  const double eta2 = d.eta * d.eta;
  std::vector<SteadyState> out;
  if (eta2 == 0.0) {
    out.push_back(expand(d, 0.0, delta_tilde));
    return out;
  }

  std::vector<double> xs;
  if (d.kerr == 0.0) {
    xs.push_back(eta2 / (delta_tilde * delta_tilde + kappa * kappa));
  } else {
    const Cubic cu = scaled_cubic(d, delta_tilde);
    for (double y : real_roots(cu)) {
      const double x = y * kappa / d.kerr;
      if (x >= 0.0) xs.push_back(x);
    }
    if (xs.empty() && cu.c < 0.0) {
      // Cardano cancels for a tiny drive; f(0) < 0 brackets the positive root.
      auto f = [&](double y) { return ((y + cu.a) * y + cu.b) * y + cu.c; };
      double lo = 0.0, hi = -cu.c / cu.b;
      while (f(hi) < 0.0) hi *= 2.0;
      for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
      }
      xs.push_back(0.5 * (lo + hi) * kappa / d.kerr);
    }
  }
  if (xs.empty()) {
    throw NumericalError("steady state: no nonnegative root although eta^2 > 0");
  }

  for (double& x : xs) {
    x = polish(x, delta_tilde, d.kerr, kappa, eta2);
    const double r = std::abs(residual_of(x, delta_tilde, d.kerr, kappa, eta2)) / eta2;
    if (!(r < kResidualTol)) {
      std::ostringstream os;
      os << "steady state: Newton polishing failed, x = " << x << ", relative residual " << r
         << ", Delta_tilde = " << delta_tilde << ", K = " << d.kerr;
      throw NumericalError(os.str());
    }
  }
  std::sort(xs.begin(), xs.end());
  std::vector<double> distinct;
  for (double x : xs) {
    if (distinct.empty() ||
        std::abs(x - distinct.back()) > 1e-9 * std::max(std::abs(x), 1e-300)) {
      distinct.push_back(x);
    }
  }
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    out.push_back(expand(d, distinct[i], delta_tilde));
    out.back().branch_index = static_cast<int>(i);
  }
  return out;
}

SteadyState steady_at_modified_detuning(const DerivedParams& d, double delta_prime) {
  const double kappa = d.gamma_0 / 2.0;
  const double x = d.eta * d.eta / (delta_prime * delta_prime + kappa * kappa);
  SteadyState s = expand(d, x, delta_prime - d.kerr * x);
  s.Delta_prime = delta_prime;
  return s;
}

CriticalThresholds critical_thresholds(const DerivedParams& d) {
  if (!(d.omega_phi > 0.0)) throw DomainError("critical power: omega_phi must be > 0");
  CriticalThresholds t;
  t.Delta_cr = -std::sqrt(3.0) * d.gamma_0 / 2.0;
  t.P_cr = d.kerr > 0.0 ? d.constants.hbar * d.omega_0 * d.gamma_0 * d.gamma_0 /
                              (3.0 * std::sqrt(3.0) * d.kerr)
                        : std::numeric_limits<double>::infinity();
  return t;
}

double steady_discriminant(const DerivedParams& d, double delta_tilde) {
  const Cubic cu = scaled_cubic(d, delta_tilde);
  const double p = cu.b - cu.a * cu.a / 3.0;
  const double q = 2.0 * cu.a * cu.a * cu.a / 27.0 - cu.a * cu.b / 3.0 + cu.c;
  const double r2 = cu.a * cu.a + std::abs(cu.b) + std::cbrt(cu.c * cu.c);
  return -(4.0 * p * p * p + 27.0 * q * q) / (r2 * r2 * r2);
}

SteadyState resolve_steady(const DerivedParams& d, const OperatingPoint& op) {
  switch (op.kind) {
    case OperatingPoint::Kind::delta_prime:
      return steady_at_modified_detuning(d, to_angular(op.value));
    case OperatingPoint::Kind::delta_prime_over_omega_phi:
      return steady_at_modified_detuning(d, op.value * d.omega_phi);
    case OperatingPoint::Kind::delta_tilde:
      break;
  }
  const auto roots = solve_steady(d);
  if (op.branch) {
    if (*op.branch < 0 || *op.branch >= static_cast<int>(roots.size())) {
      std::ostringstream os;
      os << "branch " << *op.branch << " requested but the steady state has " << roots.size()
         << " branch(es)";
      throw UsageError(os.str());
    }
    return roots[static_cast<std::size_t>(*op.branch)];
  }
  if (roots.size() > 1) {
    throw UsageError("bistable working point: select a branch (0 = lower, " +
                     std::to_string(roots.size() - 1) + " = upper)");
  }
  return roots.front();
}

std::vector<BistabilityRow> bistability_scan(const PhysicalParams& p, const Constants& k,
                                             BistabilitySweep variable,
                                             std::span<const double> values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw UsageError("bistability_scan: sweep grid must be strictly increasing");
    }
  }
  std::vector<BistabilityRow> rows;
  rows.reserve(values.size());
  for (double v : values) {
    PhysicalParams q = p;
    if (variable == BistabilitySweep::drive_power) {
      q.drive_power = v;
    } else {
      q.cavity_detuning_eff = v;
    }
    const DerivedParams d = derive(q, k);
    BistabilityRow row;
    row.sweep_value = v;
    for (const auto& s : solve_steady(d)) row.intensities.push_back(s.intensity);
    row.middle_unstable = row.intensities.size() == 3;
    row.fold = !rows.empty() && rows.back().intensities.size() != row.intensities.size();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ringcav
