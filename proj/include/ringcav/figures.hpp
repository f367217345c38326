#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ringcav/config.hpp"

namespace ringcav {

std::vector<std::string> figure_names();

bool is_figure(const std::string& name);

// Caption parameter set plus the figure's own working point.
RunConfig figure_config(const std::string& name);

struct FigureResult {
  std::vector<std::string> outputs;
  std::vector<std::string> failures;  // per-point errors; gaps from instability are not failures
};

// Writes <name>.csv (and inset CSVs where the figure has one) plus <name>.gp.
FigureResult render_figure(const std::string& name, const RunConfig& cfg,
                           const std::string& out_dir, unsigned threads, std::uint64_t hash);

}  // namespace ringcav
