#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "ringcav/errors.hpp"
#include "ringcav/steady.hpp"

using namespace ringcav;
using namespace ringcav::testing;

namespace {

// Fold points of x[(D + Kx)^2 + k^2] = eta^2 in drive power, from the stationary
// points of the left-hand side.
std::pair<double, double> fold_powers(const DerivedParams& d, double delta_tilde) {
  const double kap = d.gamma_0 / 2, K = d.kerr, D = delta_tilde;
  // d/dx: 3K^2 x^2 + 4 K D x + D^2 + k^2 = 0
  const double disc = 16 * K * K * D * D - 12 * K * K * (D * D + kap * kap);
  const double x1 = (-4 * K * D - std::sqrt(disc)) / (6 * K * K);
  const double x2 = (-4 * K * D + std::sqrt(disc)) / (6 * K * K);
  auto power = [&](double x) {
    const double eta2 = x * (std::pow(D + K * x, 2) + kap * kap);
    return eta2 * d.constants.hbar * d.omega_0 / d.gamma_0;
  };
  return {power(x2), power(x1)};  // the larger-x fold sits at the lower power
}

}  // namespace

TEST_CASE("steady state satisfies the field equation and the displacement relations") {
  const DerivedParams d = derive(fig2_params());
  const auto roots = solve_steady(d);
  REQUIRE(roots.size() == 1);
  const SteadyState& s = roots[0];
  const double kap = d.gamma_0 / 2;
  const double lhs = s.intensity * (s.Delta_prime * s.Delta_prime + kap * kap);
  CHECK(std::abs(lhs - d.eta * d.eta) / (d.eta * d.eta) < 1e-10);
  CHECK(s.a_s >= 0.0);
  CHECK(s.X_cs == -s.Omegatilde_c * d.G * s.intensity);
  CHECK(s.X_ds == -s.Omegatilde_d * d.G * s.intensity);
  CHECK(s.phi_s == -(d.g_phi / d.omega_phi) * s.intensity);
  CHECK(s.Delta_prime == doctest::Approx(d.Delta_tilde + d.kerr * s.intensity).epsilon(1e-13));
}

TEST_CASE("negligible drive gives a vanishing field") {
  const DerivedParams d = derive(with_zero_drive(fig2_params()));
  const auto roots = solve_steady(d);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].a_s < 1e-12);
  CHECK(std::abs(roots[0].X_cs) < 1e-20);
  CHECK(std::abs(roots[0].phi_s) < 1e-20);
}

TEST_CASE("critical thresholds") {
  const DerivedParams d = derive(fig2_params());
  const CriticalThresholds th = critical_thresholds(d);
  CHECK(th.Delta_cr == doctest::Approx(-std::sqrt(3.0) * d.gamma_0 / 2).epsilon(1e-14));
  CHECK(to_hz(th.Delta_cr) == doctest::Approx(-0.173e6).epsilon(2e-3));
  CHECK(th.P_cr == doctest::Approx(1e-12).epsilon(0.15));

  // At (Delta_cr, P_cr) the cubic collapses to a triple root at y = 2/sqrt(3)
  // in units of Kx / (gamma_0 / 2).
  PhysicalParams p = fig2_params();
  p.cavity_detuning_eff = to_hz(th.Delta_cr);
  p.drive_power = th.P_cr;
  const DerivedParams dc = derive(p);
  CHECK(std::abs(steady_discriminant(dc, th.Delta_cr)) < 1e-8);
  const double x0 = 2.0 / std::sqrt(3.0) * (d.gamma_0 / 2) / d.kerr;
  for (const auto& s : solve_steady(dc)) CHECK(s.intensity == doctest::Approx(x0).epsilon(1e-4));
}

TEST_CASE("no intensity-dependent shift means no bistability threshold") {
  PhysicalParams p = fig2_params();
  p.atom_photon_coupling = 0.0;
  p.oam = 0.0;
  const DerivedParams d = derive(p, {}, true);
  CHECK(d.kerr == 0.0);
  CHECK(std::isinf(critical_thresholds(d).P_cr));
}

TEST_CASE("bistable window is bounded by the two folds") {
  PhysicalParams p = fig2_params();
  p.cavity_detuning_eff = -0.3e6;
  const DerivedParams d = derive(p);
  const auto [lo, hi] = fold_powers(d, d.Delta_tilde);
  REQUIRE(lo < hi);
  const std::vector<double> grid = {0.5 * lo, 0.99 * lo, 1.01 * lo, 0.5 * (lo + hi), 0.99 * hi,
                                    1.01 * hi, 2 * hi};
  const auto rows = bistability_scan(p, {}, BistabilitySweep::drive_power, grid);
  const std::vector<std::size_t> expected = {1, 1, 3, 3, 3, 1, 1};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CAPTURE(i);
    CHECK(rows[i].intensities.size() == expected[i]);
  }
  CHECK(rows[2].fold);
  CHECK(rows[5].fold);
  CHECK(rows[3].middle_unstable);
}

TEST_CASE("monostable above the critical detuning") {
  PhysicalParams p = fig2_params();
  p.cavity_detuning_eff = -0.1e6;
  std::vector<double> grid;
  for (int i = 1; i <= 200; ++i) grid.push_back(i * 0.05e-12);
  for (const auto& r : bistability_scan(p, {}, BistabilitySweep::drive_power, grid))
    CHECK(r.intensities.size() == 1);
}

TEST_CASE("sweep edge cases") {
  const PhysicalParams p = fig2_params();
  const std::vector<double> one = {1e-12};
  CHECK(bistability_scan(p, {}, BistabilitySweep::drive_power, one).size() == 1);
  const std::vector<double> bad = {2e-12, 1e-12};
  CHECK_THROWS_AS(bistability_scan(p, {}, BistabilitySweep::drive_power, bad), UsageError);
}

TEST_CASE("bistable operating point needs an explicit branch") {
  PhysicalParams p = fig2_params();
  p.cavity_detuning_eff = -0.3e6;
  p.drive_power = 2e-12;
  const DerivedParams d = derive(p);
  REQUIRE(solve_steady(d).size() == 3);
  OperatingPoint op;
  CHECK_THROWS_AS(resolve_steady(d, op), UsageError);
  op.branch = 2;
  const SteadyState s = resolve_steady(d, op);
  CHECK(s.branch_index == 2);
  CHECK(s.intensity == solve_steady(d)[2].intensity);
}

TEST_CASE("operating point given by the modified detuning") {
  const DerivedParams d = derive(fig7_params());
  const double dp = -1.2 * d.omega_phi;
  const SteadyState s = steady_at_modified_detuning(d, dp);
  CHECK(s.Delta_prime == doctest::Approx(dp).epsilon(1e-14));
  CHECK(s.intensity == doctest::Approx(d.eta * d.eta / (dp * dp + d.gamma_0 * d.gamma_0 / 4))
                           .epsilon(1e-12));
  // Solving the cubic at the back-solved effective detuning recovers the same state.
  bool found = false;
  for (const auto& r : solve_steady(d, s.Delta_tilde))
    found = found || std::abs(r.intensity - s.intensity) < 1e-9 * s.intensity;
  CHECK(found);
}
