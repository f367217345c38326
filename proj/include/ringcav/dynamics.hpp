#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ringcav/params.hpp"
#include "ringcav/steady.hpp"

namespace ringcav {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8c = Eigen::Matrix<std::complex<double>, 8, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;

// State ordering: δX_c, δY_c, δX_d, δY_d, δQ, δP, δφ, δL_z.
enum Quadrature : int { Xc = 0, Yc, Xd, Yd, Q, P, Phi, Lz };

struct DriftMatrix {
  Mat8 entries = Mat8::Zero();
  double Gr = 0.0;      // √2 G a_s
  double gphi_r = 0.0;  // √2 g_φ a_s
  double Delta_prime = 0.0;
  double gamma_0 = 0.0;
  double gamma_m = 0.0;
  double gamma_phi = 0.0;
  std::uint64_t params_hash = 0;
};

DriftMatrix build_drift(const DerivedParams& d, const SteadyState& s);

struct Stability {
  bool stable = false;
  double margin = 0.0;   // max Re λ, rad/s
  double epsilon = 0.0;  // 1e-9 ‖F‖
  Vec8c eigenvalues;
};

Stability stability(const DriftMatrix& F);

struct StabilityCell {
  double gphi_over_G = 0.0;
  double omegaphi_over_omegad = 0.0;
  bool ok = false;  // false: the point could not be evaluated (see error)
  bool stable = false;
  double margin = 0.0;
  std::string error;
};

struct StabilityMap {
  std::vector<double> x;  // g_φ/G
  std::vector<double> y;  // ω_φ/ω_d
  std::vector<StabilityCell> cells;  // row-major, y outer
  // (x, y) points where the margin changes sign along x, linearly interpolated.
  std::vector<std::pair<double, double>> boundary;
  const StabilityCell& at(std::size_t ix, std::size_t iy) const { return cells[iy * x.size() + ix]; }
};

// Re-derives every grid point: ω_φ = y·ω_d, then the mirror mass is chosen so
// that g_φ = x·G. The working point is resolved per point with `op`.
StabilityMap stability_map(const PhysicalParams& base, const Constants& k,
                           std::span<const double> gphi_over_G,
                           std::span<const double> omegaphi_over_omegad,
                           const OperatingPoint& op, unsigned threads = 1);

// Mirror mass giving the requested g_φ at ω_φ for the geometry in p.
double mirror_mass_for_gphi(const PhysicalParams& p, const Constants& k, double g_phi,
                            double omega_phi);

}  // namespace ringcav
