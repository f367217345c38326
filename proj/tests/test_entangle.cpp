#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "ringcav/config.hpp"
#include "ringcav/entangle.hpp"
#include "ringcav/errors.hpp"

using namespace ringcav;
using namespace ringcav::testing;

namespace {

Mat8 vacuum() { return Mat8::Identity() * 0.5; }

// Two-mode squeezed vacuum on (a, m), every other mode in vacuum.
Mat8 tms(double r) {
  Mat8 V = vacuum();
  const double ch = std::cosh(2 * r) / 2, sh = std::sinh(2 * r) / 2;
  V(Q, Q) = V(P, P) = V(Phi, Phi) = V(Lz, Lz) = ch;
  V(Q, Phi) = V(Phi, Q) = sh;
  V(P, Lz) = V(Lz, P) = -sh;
  return V;
}

struct Fig7 {
  DerivedParams d;
  SteadyState s;
  DriftMatrix F;
};

Fig7 fig7_at(double delta_prime_over_omega_phi) {
  const RunConfig cfg = preset("fig7");
  Fig7 f{derive(cfg.physical), {}, {}};
  f.s = steady_at_modified_detuning(f.d, delta_prime_over_omega_phi * f.d.omega_phi);
  f.F = build_drift(f.d, f.s);
  return f;
}

}  // namespace

TEST_CASE("two-mode squeezed benchmark") {
  for (double r : {0.1, 0.5, 1.0}) {
    const Mat8 V = tms(r);
    CHECK(std::abs(log_negativity(V, Mode::a, Mode::m) - 2 * r) < 1e-6);
    const std::array<Mode, 2> pair = {Mode::a, Mode::m};
    CHECK(std::abs(log_negativity_symplectic(mode_submatrix(V, pair)) - 2 * r) < 1e-6);
    CHECK(log_negativity(V, Mode::a, Mode::c) == 0.0);
  }
}

TEST_CASE("vacuum has no entanglement and no phonons") {
  const Mat8 V = vacuum();
  CHECK(log_negativity(V, Mode::a, Mode::m) == 0.0);
  const ResidualContangle rc = residual_contangle(V, {Mode::a, Mode::m, Mode::c});
  CHECK(rc.R_min == 0.0);
  const DerivedParams d = derive(fig7_params());
  CHECK(phonon_number(V, d).n_eff == doctest::Approx(0.0));
}

TEST_CASE("an uncorrelated third mode leaves no residual contangle") {
  Mat8 V = tms(0.7);
  V(Xc, Xc) = V(Yc, Yc) = 3.5;  // thermal c mode
  const ResidualContangle rc = residual_contangle(V, {Mode::a, Mode::m, Mode::c});
  // C_{a|mc} = C_{a|m} and C_{a|c} = 0, so the residual singling out a is 0.
  CHECK(std::abs(rc.residuals[0]) < 1e-9);
  CHECK(rc.R_min == doctest::Approx(0.0).epsilon(1e-9));
  for (double r : rc.residuals) CHECK(r >= -1e-9);
}

TEST_CASE("Lyapunov solution of uncoupled damped oscillators") {
  PhysicalParams p = with_zero_drive(fig7_params());
  p.gtilde_override = 0.0;
  const DerivedParams d = derive(p);
  const DriftMatrix F = build_drift(d, solve_steady(d)[0]);
  const NoiseModel nm = noise_model(d);
  const CovarianceMatrix cov = solve_lyapunov(F, nm);
  // For dx = w y dt, dy = (-w x - g y) dt + noise with diffusion g(2n+1),
  // the stationary covariance is (n + 1/2) I.
  CHECK(cov.V(Xc, Xc) == doctest::Approx(nm.n_c + 0.5).epsilon(1e-9));
  CHECK(cov.V(Yc, Yc) == doctest::Approx(nm.n_c + 0.5).epsilon(1e-9));
  CHECK(cov.V(Xd, Xd) == doctest::Approx(nm.n_d + 0.5).epsilon(1e-9));
  CHECK(cov.V(Q, Q) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(cov.V(P, P) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(cov.V(Phi, Phi) == doctest::Approx(nm.n_m + 0.5).epsilon(1e-9));
  CHECK(std::abs(cov.V(Q, Phi)) < 1e-9);
  CHECK(phonon_number(cov.V, d).n_eff == doctest::Approx(nm.n_m).epsilon(1e-9));
  CHECK(cov.bona_fide);
}

TEST_CASE("Lyapunov solution at the Fig. 7 working point") {
  const Fig7 f = fig7_at(-0.6);
  const NoiseModel nm = noise_model(f.d);
  const CovarianceMatrix cov = solve_lyapunov(f.F, nm);
  CHECK_FALSE(cov.ill_conditioned);
  const Mat8 R = f.F.entries * cov.V + cov.V * f.F.entries.transpose() + nm.D;
  CHECK(R.norm() < 1e-9 * nm.D.norm());
  CHECK((cov.V - cov.V.transpose()).norm() == 0.0);
  CHECK(cov.V.block<2, 2>(Q, Phi).norm() > 0.0);
  CHECK(cov.bona_fide);
}

TEST_CASE("two log-negativity paths agree") {
  for (double x : {-1.2, -0.6, -0.3}) {
    const Fig7 f = fig7_at(x);
    const Mat8 V = solve_lyapunov(f.F, noise_model(f.d)).V;
    const std::array<std::array<Mode, 2>, 3> pairs = {{{Mode::a, Mode::m}, {Mode::a, Mode::c}, {Mode::m, Mode::d}}};
    for (const auto& pr : pairs) {
      const double a = log_negativity(V, pr[0], pr[1]);
      const double b = log_negativity_symplectic(mode_submatrix(V, pr));
      CHECK(std::abs(a - b) < 1e-8);
    }
  }
}

TEST_CASE("unstable drift has no stationary covariance") {
  const RunConfig cfg = preset("fig2");
  PhysicalParams p = cfg.physical;
  // g_phi / G = 20 at omega_phi = omega_d: deep in the unstable region.
  const DerivedParams ref = derive(p);
  p.mirror_freq = to_hz(ref.omega_d);
  p.mirror_mass = mirror_mass_for_gphi(p, {}, 20.0 * ref.G, ref.omega_d);
  const DerivedParams d = derive(p);
  const DriftMatrix F = build_drift(d, resolve_steady(d, cfg.op));
  REQUIRE_FALSE(stability(F).stable);
  CHECK_THROWS_AS(solve_lyapunov(F, noise_model(d)), PreconditionError);
}

TEST_CASE("dark-mode coefficients") {
  const double G = 2.0, g = 3.0, wphi = 10.0;
  CHECK(dark_mode_coefficients(G, g, wphi, wphi).com_relative_coupling == 0.0);
  CHECK(dark_mode_coefficients(G, g, 9.0, wphi).com_relative_coupling > 0.0);
  CHECK(dark_mode_coefficients(G, g, 11.0, wphi).com_relative_coupling < 0.0);
  const DarkModeCoefficients sym = dark_mode_coefficients(G, G, 9.0, wphi);
  CHECK(sym.com_weight_side == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(sym.com_weight_mirror == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("dark-mode flags near the side-mode crossings") {
  PhysicalParams p = fig7_params();
  bool any_c = false, any_d = false;
  double l_c = 0, l_d = 0;
  for (int i = 0; i <= 400; ++i) {
    p.oam = 224.0 + 0.0125 * i;
    const DarkModeReport r = dark_mode_report(derive(p));
    if (r.dark_c) any_c = true, l_c = p.oam;
    if (r.dark_d) any_d = true, l_d = p.oam;
  }
  CHECK(any_c);
  CHECK(any_d);
  CHECK(l_c > 224.0);
  CHECK(l_c < 229.0);
  CHECK(l_d > 224.0);
  CHECK(l_d < 229.0);
}

TEST_CASE("Delta-prime scan respects monogamy and is thread-count independent") {
  const RunConfig cfg = preset("fig7");
  std::vector<double> xs;
  for (int i = 0; i <= 30; ++i) xs.push_back(-3.0 + 0.1 * i);
  const auto a = entanglement_scan(cfg.physical, {}, EntanglementSweep::delta_prime, xs, cfg.op, 1);
  const auto b = entanglement_scan(cfg.physical, {}, EntanglementSweep::delta_prime, xs, cfg.op, 4);
  REQUIRE(a.size() == xs.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ok == b[i].ok);
    if (!a[i].ok) continue;
    CHECK(a[i].report.E_am == b[i].report.E_am);
    CHECK(a[i].report.monogamy_min >= -1e-9);
  }
}

TEST_CASE("l = 0 sweep point is computed but flagged") {
  const RunConfig cfg = preset("fig7");
  const std::vector<double> ls = {0.0, 243.0};
  const auto rows = entanglement_scan(cfg.physical, {}, EntanglementSweep::oam, ls, cfg.op);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].unphysical);
  CHECK_FALSE(rows[1].unphysical);
}

TEST_CASE("vanishing windows") {
  std::vector<EntanglementRow> rows(6);
  const double e[] = {0.1, 1e-4, 0.0, 0.05, 1e-5, 0.2};
  for (int i = 0; i < 6; ++i) {
    rows[i].sweep_value = i;
    rows[i].ok = true;
    rows[i].report.E_am = e[i];
  }
  const auto w = vanishing_windows(rows);
  REQUIRE(w.size() == 2);
  CHECK(w[0].begin == 1.0);
  CHECK(w[0].end == 2.0);
  CHECK(w[1].begin == 4.0);
  CHECK(w[1].end == 4.0);
}
