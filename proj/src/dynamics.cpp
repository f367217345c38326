#include "ringcav/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "ringcav/errors.hpp"
#include "ringcav/parallel.hpp"

namespace ringcav {

DriftMatrix build_drift(const DerivedParams& d, const SteadyState& s) {
  if (s.params_hash != d.hash) {
    throw UsageError("build_drift: steady state was solved for different parameters");
  }
  DriftMatrix F;
  F.Gr = std::sqrt(2.0) * d.G * s.a_s;
  F.gphi_r = std::sqrt(2.0) * d.g_phi * s.a_s;
  F.Delta_prime = s.Delta_prime;
  F.gamma_0 = d.gamma_0;
  F.gamma_m = d.gamma_m;
  F.gamma_phi = d.gamma_phi;
  F.params_hash = d.hash;

  const double Oc = d.Omega_c, Od = d.Omega_d;
  if (Oc == 0.0 || Od == 0.0) throw DomainError("build_drift: dressed side-mode frequency is zero");
  auto& m = F.entries;
  m(Xc, Yc) = Oc;
  m(Yc, Xc) = -Oc;
  m(Yc, Yc) = -d.gamma_m;
  m(Yc, Xd) = -d.calA / Oc;
  m(Yc, Q) = -d.omegatilde_c * F.Gr / Oc;
  m(Xd, Yd) = Od;
  m(Yd, Xc) = d.calA / Od;
  m(Yd, Xd) = -Od;
  m(Yd, Yd) = -d.gamma_m;
  m(Yd, Q) = -d.omegatilde_d * F.Gr / Od;
  m(Q, Q) = -d.gamma_0 / 2.0;
  m(Q, P) = -s.Delta_prime;
  m(P, Xc) = -F.Gr;
  m(P, Xd) = -F.Gr;
  m(P, Q) = s.Delta_prime;
  m(P, P) = -d.gamma_0 / 2.0;
  m(P, Phi) = -F.gphi_r;
  m(Phi, Lz) = d.omega_phi;
  m(Lz, Q) = -F.gphi_r;
  m(Lz, Phi) = -d.omega_phi;
  m(Lz, Lz) = -d.gamma_phi;
  return F;
}

Stability stability(const DriftMatrix& F) {
  if (!F.entries.allFinite()) throw NumericalError("stability: drift matrix has non-finite entries");
  Eigen::EigenSolver<Mat8> es(F.entries, false);
  if (es.info() != Eigen::Success) throw NumericalError("stability: eigenvalue solver did not converge");
  Stability out;
  out.eigenvalues = es.eigenvalues();
  out.margin = out.eigenvalues.real().maxCoeff();
  out.epsilon = 1e-9 * F.entries.norm();
  out.stable = out.margin < -out.epsilon;
  return out;
}

double mirror_mass_for_gphi(const PhysicalParams& p, const Constants& k, double g_phi,
                            double omega_phi) {
  // g_φ = (c l/L) √(ħ/(I ω_φ)), I = M R_m²/2
  const double lever = k.c * p.oam / p.cavity_length;
  const double inertia = k.hbar * lever * lever / (g_phi * g_phi * omega_phi);
  return 2.0 * inertia / (p.mirror_radius * p.mirror_radius);
}

StabilityMap stability_map(const PhysicalParams& base, const Constants& k,
                           std::span<const double> gphi_over_G,
                           std::span<const double> omegaphi_over_omegad,
                           const OperatingPoint& op, unsigned threads) {
  StabilityMap map;
  map.x.assign(gphi_over_G.begin(), gphi_over_G.end());
  map.y.assign(omegaphi_over_omegad.begin(), omegaphi_over_omegad.end());
  map.cells.resize(map.x.size() * map.y.size());
  const DerivedParams ref = derive(base, k);

  parallel_for(map.cells.size(), threads, [&](std::size_t idx) {
    const std::size_t ix = idx % map.x.size();
    const std::size_t iy = idx / map.x.size();
    StabilityCell& cell = map.cells[idx];
    cell.gphi_over_G = map.x[ix];
    cell.omegaphi_over_omegad = map.y[iy];
    try {
      PhysicalParams p = base;
      const double omega_phi = cell.omegaphi_over_omegad * ref.omega_d;
      p.mirror_freq = to_hz(omega_phi);
      p.mirror_mass = mirror_mass_for_gphi(p, k, cell.gphi_over_G * ref.G, omega_phi);
      const DerivedParams d = derive(p, k);
      const Stability st = stability(build_drift(d, resolve_steady(d, op)));
      cell.stable = st.stable;
      cell.margin = st.margin;
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });

  for (std::size_t iy = 0; iy < map.y.size(); ++iy) {
    for (std::size_t ix = 1; ix < map.x.size(); ++ix) {
      const auto& a = map.at(ix - 1, iy);
      const auto& b = map.at(ix, iy);
      if (!a.ok || !b.ok || a.stable == b.stable) continue;
      const double t = a.margin / (a.margin - b.margin);
      map.boundary.emplace_back(map.x[ix - 1] + t * (map.x[ix] - map.x[ix - 1]), map.y[iy]);
    }
  }
  return map;
}

}  // namespace ringcav
