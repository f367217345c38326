#pragma once

#include "ringcav/config.hpp"
#include "ringcav/params.hpp"

namespace ringcav::testing {

inline PhysicalParams fig2_params() { return preset("fig2").physical; }
inline PhysicalParams fig7_params() { return preset("fig7").physical; }

// Drive so weak that the intracavity field is negligible.
inline PhysicalParams with_zero_drive(PhysicalParams p) {
  p.drive_power = 1e-40;
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace ringcav::testing
