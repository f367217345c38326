#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ringcav/errors.hpp"
#include "ringcav/params.hpp"

using namespace ringcav;
using namespace ringcav::testing;

TEST_CASE("optical lattice depth and atom-photon coupling from the caption inputs") {
  const DerivedParams d = derive(fig2_params());
  // U0 = g_a^2 / Delta_a, evaluated in cyclic units directly.
  const double U0_hz = 0.7e6 * 0.7e6 / 5.4e9;
  CHECK(to_hz(d.U0) == doctest::Approx(U0_hz).epsilon(1e-12));
  CHECK(to_hz(d.U0) == doctest::Approx(90.7).epsilon(5e-3));
  CHECK(to_hz(d.G) == doctest::Approx(U0_hz * 100.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(to_hz(d.G) == doctest::Approx(3.2e3).epsilon(0.02));
}

TEST_CASE("dressed side-mode frequencies") {
  const PhysicalParams p = fig2_params();
  const DerivedParams d = derive(p);
  // Independent evaluation from hbar (Lp +- 2l)^2 / (2 m R^2) and the dressing formula.
  const double hbar = 1.054571817e-34;
  const double Ia = p.atom_mass * p.ring_radius * p.ring_radius;
  const double wc = hbar * 21.0 * 21.0 / (2 * Ia);
  const double wd = hbar * 19.0 * 19.0 / (2 * Ia);
  const double gN = kTwoPi * 14 * 78.8e-6 * p.n_atoms;
  const double Oc = std::sqrt(std::pow(wc + 4 * gN, 2) - 4 * gN * gN);
  const double Od = std::sqrt(std::pow(wd + 4 * gN, 2) - 4 * gN * gN);
  CHECK(d.Omega_c == doctest::Approx(Oc).epsilon(1e-12));
  CHECK(d.Omega_d == doctest::Approx(Od).epsilon(1e-12));
  CHECK(to_hz(d.Omega_c) == doctest::Approx(717).epsilon(0.01));
  CHECK(to_hz(d.Omega_d) == doctest::Approx(595).epsilon(0.01));
  CHECK(d.calA == doctest::Approx(2 * gN * (wc - wd)).epsilon(1e-12));
}

TEST_CASE("zero winding number makes the side modes degenerate") {
  PhysicalParams p = fig2_params();
  p.winding = 0;
  const DerivedParams d = derive(p);
  CHECK(d.omega_c == d.omega_d);
  CHECK(d.calA == 0.0);
}

TEST_CASE("l = 0 is rejected unless explicitly allowed") {
  PhysicalParams p = fig2_params();
  p.oam = 0;
  CHECK_THROWS_AS(derive(p), InvalidParameter);
  const DerivedParams d = derive(p, {}, true);
  const double hbar = 1.054571817e-34;
  CHECK(d.omega_c == doctest::Approx(hbar / (2 * p.atom_mass * p.ring_radius * p.ring_radius)));
  CHECK(d.omega_c == d.omega_d);
  CHECK(d.calA == 0.0);
}

TEST_CASE("reversing the winding swaps the side modes") {
  PhysicalParams p = fig2_params();
  const DerivedParams a = derive(p);
  p.winding = -p.winding;
  const DerivedParams b = derive(p);
  CHECK(a.omega_c == doctest::Approx(b.omega_d).epsilon(1e-14));
  CHECK(a.omega_d == doctest::Approx(b.omega_c).epsilon(1e-14));
  CHECK(a.calA == doctest::Approx(-b.calA).epsilon(1e-14));
}

TEST_CASE("dressing vanishes with the atomic interaction") {
  PhysicalParams p = fig2_params();
  p.gtilde_override = 0.0;
  const DerivedParams d = derive(p);
  CHECK(std::abs(d.Omega_c - d.omega_c) / d.omega_c < 1e-12);
  CHECK(std::abs(d.Omega_d - d.omega_d) / d.omega_d < 1e-12);
  CHECK(d.calA == 0.0);
}

TEST_CASE("drive amplitude scales as the square root of power") {
  PhysicalParams p = fig2_params();
  const double eta1 = derive(p).eta;
  p.drive_power *= 4.0;
  CHECK(derive(p).eta == doctest::Approx(2.0 * eta1).epsilon(1e-14));
}

TEST_CASE("derive is deterministic") {
  const DerivedParams a = derive(fig7_params());
  const DerivedParams b = derive(fig7_params());
  CHECK(a.hash == b.hash);
  CHECK(a.G == b.G);
  CHECK(a.Omega_c == b.Omega_c);
  CHECK(a.kerr == b.kerr);
}

TEST_CASE("invalid inputs are reported") {
  PhysicalParams p = fig2_params();
  p.atom_detuning = 0.0;
  CHECK_THROWS_AS(derive(p), InvalidParameter);
  p = fig2_params();
  p.mirror_mass = -1.0;
  CHECK_THROWS_AS(derive(p), InvalidParameter);
  p = fig2_params();
  p.drive_power = 0.0;
  CHECK_THROWS_AS(derive(p), InvalidParameter);
}

TEST_CASE("one-dimensional ring bound") {
  PhysicalParams p = fig2_params();
  const double bound = 4 * p.ring_radius / (3 * p.scattering_length) *
                       std::sqrt(M_PI * p.trap_radial / p.trap_axial);
  CHECK(one_dimensional_atom_bound(p) == doctest::Approx(bound).epsilon(1e-12));
  CHECK(bound == doctest::Approx(2.8e5).epsilon(0.02));
  CHECK(validate(p).all_passed());

  p.trap_radial = p.trap_axial = 500.0;
  CHECK(one_dimensional_atom_bound(p) ==
        doctest::Approx(4 * p.ring_radius / (3 * p.scattering_length) * std::sqrt(M_PI)));

  p = fig2_params();
  p.n_atoms = 1e6;
  const ValidationReport r = validate(p);
  CHECK_FALSE(r.all_passed());
  bool named = false;
  for (const auto& e : r.entries) named = named || (e.name == "one_dimensional_ring" && !e.passed);
  CHECK(named);
}
