#include "ringcav/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ringcav/errors.hpp"
#include "ringcav/hash.hpp"

namespace ringcav {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << name << " must be finite and strictly positive (got " << value << ")";
    throw InvalidParameter(os.str());
  }
}

void check_invariants(const PhysicalParams& p, const Constants& k, bool allow_zero_oam) {
  require_positive(p.atom_mass, "atom_mass");
  require_positive(p.ring_radius, "ring_radius");
  require_positive(p.trap_radial, "trap_radial");
  require_positive(p.trap_axial, "trap_axial");
  require_positive(p.scattering_length, "scattering_length");
  require_positive(p.cavity_freq, "cavity_freq");
  require_positive(p.cavity_linewidth, "cavity_linewidth");
  require_positive(p.cavity_length, "cavity_length");
  require_positive(p.drive_power, "drive_power");
  require_positive(p.mirror_mass, "mirror_mass");
  require_positive(p.mirror_radius, "mirror_radius");
  require_positive(p.mirror_damping, "mirror_damping");
  require_positive(p.sidemode_damping, "sidemode_damping");
  require_positive(p.temp_atoms, "temp_atoms");
  require_positive(p.temp_mirror, "temp_mirror");
  require_positive(k.hbar, "hbar");
  require_positive(k.k_B, "k_B");
  require_positive(k.c, "c");
  if (!(p.n_atoms >= 1.0)) throw InvalidParameter("n_atoms must be >= 1");
  if (!(p.oam >= (allow_zero_oam ? 0.0 : 1.0))) {
    throw InvalidParameter("oam (topological charge l) must be >= 1");
  }
  if (!std::isfinite(p.winding)) throw InvalidParameter("winding must be finite");
  if (!std::isfinite(p.cavity_detuning_eff)) {
    throw InvalidParameter("cavity_detuning_eff must be finite");
  }
  if (p.atom_detuning == 0.0 || !std::isfinite(p.atom_detuning)) {
    throw InvalidParameter("atom_detuning must be nonzero (U0 = g_a^2/Delta_a diverges)");
  }
  if (!std::isfinite(p.atom_photon_coupling)) {
    throw InvalidParameter("atom_photon_coupling must be finite");
  }
}

double checked_sqrt(double radicand, const char* quantity) {
  if (radicand < 0.0 || !std::isfinite(radicand)) {
    std::ostringstream os;
    os << "negative radicand for " << quantity << " (" << radicand << ")";
    throw DomainError(os.str());
  }
  return std::sqrt(radicand);
}

double gtilde_from_collisions(const PhysicalParams& p) {
  // g = 2ħω_ρ a/R and g̃ = g/4πħ, so ħ drops out.
  const double omega_rho = to_angular(p.trap_radial);
  return 2.0 * omega_rho * p.scattering_length / p.ring_radius / (4.0 * M_PI);
}

}  // namespace

std::uint64_t params_hash(const PhysicalParams& p, const Constants& k) {
  Fnv1a h;
  for (double v : {p.atom_mass, p.n_atoms, p.ring_radius, p.trap_radial, p.trap_axial,
                   p.scattering_length, p.atom_photon_coupling, p.atom_detuning,
                   p.cavity_freq, p.cavity_linewidth, p.cavity_length, p.oam, p.winding,
                   p.drive_power, p.cavity_detuning_eff, p.mirror_mass, p.mirror_radius,
                   p.mirror_freq, p.mirror_damping, p.sidemode_damping, p.temp_atoms,
                   p.temp_mirror, k.hbar, k.k_B, k.c}) {
    h.add(v);
  }
  h.add(p.gtilde_override ? std::string_view("override") : std::string_view("formula"));
  if (p.gtilde_override) h.add(*p.gtilde_override);
  return h.value();
}

DerivedParams derive(const PhysicalParams& p, const Constants& k, bool allow_zero_oam) {
  check_invariants(p, k, allow_zero_oam);

  DerivedParams d;
  d.source = p;
  d.constants = k;
  d.hash = params_hash(p, k);

  const double N = p.n_atoms;
  const double l = p.oam;
  const double Lp = p.winding;

  const double ga = to_angular(p.atom_photon_coupling);
  const double delta_a = to_angular(p.atom_detuning);
  d.U0 = ga * ga / delta_a;
  d.G = d.U0 * std::sqrt(N) / (2.0 * std::sqrt(2.0));

  d.I_atom = p.atom_mass * p.ring_radius * p.ring_radius;
  d.omega_c = k.hbar * (Lp + 2.0 * l) * (Lp + 2.0 * l) / (2.0 * d.I_atom);
  d.omega_d = k.hbar * (Lp - 2.0 * l) * (Lp - 2.0 * l) / (2.0 * d.I_atom);

  d.gtilde = p.gtilde_override ? to_angular(*p.gtilde_override) : gtilde_from_collisions(p);
  const double gN = d.gtilde * N;
  d.Omega_c = checked_sqrt((d.omega_c + 4.0 * gN) * (d.omega_c + 4.0 * gN) - 4.0 * gN * gN,
                           "Omega_c^2");
  d.Omega_d = checked_sqrt((d.omega_d + 4.0 * gN) * (d.omega_d + 4.0 * gN) - 4.0 * gN * gN,
                           "Omega_d^2");
  d.omegatilde_c = d.omega_c + 2.0 * gN;
  d.omegatilde_d = d.omega_d + 2.0 * gN;
  d.calA = 2.0 * gN * (d.omega_c - d.omega_d);

  d.omega_phi = to_angular(p.mirror_freq);
  if (!(d.omega_phi > 0.0)) {
    throw DomainError("negative radicand for g_phi: mirror_freq must be > 0");
  }
  d.I_mirror = p.mirror_mass * p.mirror_radius * p.mirror_radius / 2.0;
  d.g_phi = k.c * l / p.cavity_length * checked_sqrt(k.hbar / (d.I_mirror * d.omega_phi), "g_phi");

  d.omega_0 = to_angular(p.cavity_freq);
  d.gamma_0 = to_angular(p.cavity_linewidth);
  d.gamma_m = to_angular(p.sidemode_damping);
  d.gamma_phi = to_angular(p.mirror_damping);
  d.eta = std::sqrt(p.drive_power * d.gamma_0 / (k.hbar * d.omega_0));

  const double Oc2 = d.Omega_c * d.Omega_c;
  const double Od2 = d.Omega_d * d.Omega_d;
  const double denom = d.calA * d.calA + Oc2 * Od2;
  if (denom == 0.0) throw DomainError("side-mode static response is singular (Omega_c Omega_d = 0)");
  d.Omegatilde_c = (d.omegatilde_c * Od2 - d.omegatilde_d * d.calA) / denom;
  d.Omegatilde_d = (d.omegatilde_d * Oc2 + d.omegatilde_c * d.calA) / denom;
  d.kerr = (d.Omegatilde_c + d.Omegatilde_d) * d.G * d.G + d.g_phi * d.g_phi / d.omega_phi;

  d.Delta_tilde = to_angular(p.cavity_detuning_eff);
  d.Delta_0 = d.Delta_tilde + d.U0 * N / 2.0;
  d.temp_atoms = p.temp_atoms;
  d.temp_mirror = p.temp_mirror;
  return d;
}

double one_dimensional_atom_bound(const PhysicalParams& p) {
  return 4.0 * p.ring_radius / (3.0 * p.scattering_length) *
         std::sqrt(M_PI * p.trap_radial / p.trap_axial);
}

bool ValidationReport::all_passed() const {
  for (const auto& e : entries) {
    if (!e.passed) return false;
  }
  return true;
}

ValidationReport validate(const PhysicalParams& p, const Constants& k) {
  ValidationReport report;

  ValidationEntry oned;
  oned.name = "one_dimensional_ring";
  oned.bound = one_dimensional_atom_bound(p);
  oned.value = p.n_atoms;
  oned.passed = std::isfinite(oned.bound) && p.n_atoms < oned.bound;
  {
    std::ostringstream os;
    os << "N < (4R/3a)sqrt(pi w_rho/w_z) = " << oned.bound;
    if (!oned.passed) os << " violated: N = " << p.n_atoms;
    oned.message = os.str();
  }
  report.entries.push_back(oned);

  ValidationEntry weak;
  weak.name = "sidemode_over_interaction";
  weak.bound = 10.0;
  const double Ia = p.atom_mass * p.ring_radius * p.ring_radius;
  const double wc = k.hbar * std::pow(p.winding + 2.0 * p.oam, 2) / (2.0 * Ia);
  const double wd = k.hbar * std::pow(p.winding - 2.0 * p.oam, 2) / (2.0 * Ia);
  const double gt = p.gtilde_override ? to_angular(*p.gtilde_override)
                                      : gtilde_from_collisions(p);
  const double four_gN = 4.0 * std::abs(gt) * p.n_atoms;
  weak.value = four_gN > 0.0 ? std::min(wc, wd) / four_gN
                             : std::numeric_limits<double>::infinity();
  weak.warning = weak.value < weak.bound;
  weak.passed = true;
  weak.message = weak.warning ? "min(w_c, w_d)/(4 g~ N) < 10: Bogoliubov shift not negligible"
                              : "min(w_c, w_d) >> 4 g~ N";
  report.entries.push_back(weak);
  return report;
}

}  // namespace ringcav
