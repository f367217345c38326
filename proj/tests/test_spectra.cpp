#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "ringcav/config.hpp"
#include "ringcav/spectra.hpp"

using namespace ringcav;
using namespace ringcav::testing;

namespace {

constexpr double kDeg = M_PI / 180.0;

struct Point {
  DerivedParams d;
  SteadyState s;
  DriftMatrix F;
};

Point make(const PhysicalParams& p, const OperatingPoint& op, bool allow_zero_oam = false) {
  Point pt{derive(p, {}, allow_zero_oam), {}, {}};
  pt.s = resolve_steady(pt.d, op);
  pt.F = build_drift(pt.d, pt.s);
  return pt;
}

Point fig2_point() {
  const RunConfig cfg = preset("fig2");
  return make(cfg.physical, cfg.op);
}

// G = g_phi = 0: no atom-photon coupling and no radiation torque.
Point uncoupled_point() {
  const RunConfig cfg = preset("fig2");
  PhysicalParams p = cfg.physical;
  p.atom_photon_coupling = 0.0;
  p.oam = 0.0;
  return make(p, cfg.op, true);
}

}  // namespace

TEST_CASE("bare-cavity resolvent") {
  const Point pt = uncoupled_point();
  const double k = pt.d.gamma_0 / 2, Dp = pt.s.Delta_prime, g = pt.d.gamma_0;
  for (double w : {0.0, 0.3 * g, -2.0 * g}) {
    // (-i w I - A)^{-1} for A = [[-k, -Dp], [Dp, -k]], inverted by hand.
    const std::complex<double> a(k, -w);  // diagonal of -i w I - A
    const std::complex<double> det = a * a + Dp * Dp;
    const std::complex<double> MQQ = a / det, MQP = -Dp / det, MPQ = Dp / det;
    const TransferSet t = transfer(pt.F, w);
    CHECK(std::abs(t.M(Q, Q) - MQQ) < 1e-12 * std::abs(MQQ));
    CHECK(std::abs(t.M(Q, P) - MQP) < 1e-12 * std::abs(MQP));
    CHECK(std::abs(t.M(P, Q) - MPQ) < 1e-12 * std::abs(MPQ));
    CHECK(std::abs(t.M(P, P) - t.M(Q, Q)) < 1e-12 * std::abs(MQQ));
    CHECK(std::abs(t.Ftilde[1] - std::sqrt(g) * MQQ) < 1e-12 * std::sqrt(g) * std::abs(MQQ));
    for (int i = 3; i < 9; ++i) CHECK(std::abs(t.Ftilde[i]) == 0.0);
  }
}

TEST_CASE("resolvent of a real drift matrix is conjugate-symmetric in frequency") {
  const Point pt = fig2_point();
  for (double f : {100.0, 653.0, 717.0, 5e4}) {
    const TransferSet a = transfer(pt.F, to_angular(f));
    const TransferSet b = transfer(pt.F, -to_angular(f));
    CHECK((a.M - b.M.conjugate()).norm() < 1e-10 * a.M.norm());
    for (int i : {1, 4, 6, 8}) CHECK(std::abs(a.Ftilde[i] - std::conj(b.Ftilde[i])) < 1e-10 * std::abs(a.Ftilde[i]) + 1e-300);
  }
  const TransferSet far = transfer(pt.F, 1e13);
  for (const auto& f : far.Ftilde) CHECK(std::abs(f) < 1e-6);
}

TEST_CASE("side-mode susceptibility peaks at the dressed side-mode frequency") {
  const Point pt = fig2_point();
  double best = 0.0, best_f = 0.0;
  const double centre = to_hz(pt.d.Omega_c);
  for (int i = -2000; i <= 2000; ++i) {
    const double f = centre + 0.005 * i;
    const double v = std::abs(transfer(pt.F, to_angular(f)).Ftilde[4]);
    if (v > best) best = v, best_f = f;
  }
  CHECK(std::abs(to_angular(best_f) - pt.d.Omega_c) < pt.d.gamma_m * 2.0);
}

TEST_CASE("uncoupled cavity reflects pure vacuum") {
  const Point pt = uncoupled_point();
  for (double f : {0.0, 100.0, 653.0, 717.0, 1e5}) {
    for (double th : {0.0, 5.0, 45.0, 90.0, 133.0}) {
      for (auto regime : {NoiseRegime::colored, NoiseRegime::markovian}) {
        const SpectrumResult r = homodyne_spectrum(pt.d, pt.s, to_angular(f), th * kDeg, regime);
        CHECK(r.S == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  const OptimalAngle oa = optimal_angle(pt.d, pt.s, to_angular(653.0));
  CHECK(oa.degenerate);
  CHECK(oa.theta == 0.0);
}

TEST_CASE("noise breakdown adds up") {
  const Point pt = fig2_point();
  for (double f : {560.0, 600.0, 653.0, 700.0, 718.0}) {
    for (double th : {5.0, 90.0}) {
      const SpectrumResult r = homodyne_spectrum(pt.d, pt.s, to_angular(f), th * kDeg);
      const double sum = r.S_vac + r.S_th_c + r.S_th_d + r.S_th_mirror;
      CHECK(std::abs(sum - r.S) <= 1e-12 * std::abs(r.S));
      CHECK(r.S >= 0.0);
    }
  }
}

// The off-resonant tail falls as 1/omega^2 with a prefactor set by the couplings,
// not by the mechanical damping; 10^4 side-mode linewidths away it is below 1e-3.
TEST_CASE("shot-noise floor far from the mechanical resonances") {
  const Point pt = fig2_point();
  const double offset = 1e4 * to_hz(pt.d.gamma_m);
  for (double f : {to_hz(pt.d.Omega_c) + offset, 2e4, 5e4}) {
    for (double th : {5.0, 45.0, 90.0}) {
      const double S = homodyne_spectrum(pt.d, pt.s, to_angular(f), th * kDeg).S;
      CHECK(std::abs(S - 1.0) < 1e-3);
    }
  }
}

TEST_CASE("thermal factor limits") {
  const Constants k;
  const double w = 1e3, T = 1e-3;
  CHECK(thermal_factor(w, T, k) == doctest::Approx(-2 * w / std::expm1(k.hbar * w / (k.k_B * T))));
  CHECK(thermal_factor(0.0, T, k) == doctest::Approx(-2 * k.k_B * T / k.hbar));
  CHECK(thermal_factor(w, 0.0, k) == 0.0);
  CHECK(thermal_factor(-w, 0.0, k) == doctest::Approx(-2 * w));
  CHECK(bose_occupation(w, T, k) == doctest::Approx(1.0 / std::expm1(k.hbar * w / (k.k_B * T))));
}

TEST_CASE("zero frequency uses the thermal limit") {
  const Point pt = fig2_point();
  const SpectrumResult z = homodyne_spectrum(pt.d, pt.s, 0.0, 30 * kDeg);
  CHECK(z.zero_frequency);
  CHECK(std::isfinite(z.S));
}

TEST_CASE("angle dependence is a single harmonic in 2 theta") {
  const Point pt = fig2_point();
  for (auto regime : {NoiseRegime::colored, NoiseRegime::markovian}) {
    for (double f : {600.0, 653.0, 717.5}) {
      const TransferSet t = transfer(pt.F, to_angular(f));
      const AngleCoefficients c = angle_coefficients(pt.d, pt.F, t, regime);
      for (double th : {0.0, 17.0, 61.0, 90.0, 144.0}) {
        const double S = homodyne_spectrum(pt.d, pt.F, t, th * kDeg, regime).S;
        const double model = c.S0 - 0.5 * c.B1 * std::cos(2 * th * kDeg) + 0.5 * c.B2 * std::sin(2 * th * kDeg);
        CHECK(model == doctest::Approx(S).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("optimal angle beats a brute-force angle grid") {
  const Point pt = fig2_point();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> freq(500.0, 800.0);
  for (int k = 0; k < 20; ++k) {
    const double w = to_angular(freq(rng));
    const OptimalAngle oa = optimal_angle(pt.d, pt.s, w);
    CHECK(oa.theta >= 0.0);
    CHECK(oa.theta < M_PI);
    for (int deg = 0; deg < 360; ++deg) {
      const double S = homodyne_spectrum(pt.d, pt.s, w, deg * 0.5 * kDeg).S;
      CHECK(oa.S <= S + 1e-9);
    }
  }
}

TEST_CASE("optimized spectrum is thread-count independent") {
  const Point pt = fig2_point();
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(to_angular(560.0 + 4.0 * i));
  const auto a = optimized_spectrum(pt.d, pt.s, grid, NoiseRegime::colored, 1);
  const auto b = optimized_spectrum(pt.d, pt.s, grid, NoiseRegime::colored, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].S_opt == b[i].S_opt);
    CHECK(a[i].theta_opt == b[i].theta_opt);
  }
}
