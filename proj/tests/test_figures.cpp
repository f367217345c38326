#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ringcav/errors.hpp"
#include "ringcav/figures.hpp"

using namespace ringcav;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ringcav_fig_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("every figure has a default configuration") {
  CHECK(figure_names().size() == 14);
  for (const auto& n : figure_names()) CHECK_NOTHROW(figure_config(n));
  CHECK_FALSE(is_figure("fig10"));
  CHECK_THROWS_AS(render_figure("fig10", figure_config("fig2a"), "/tmp", 1, 0), UsageError);
}

TEST_CASE("monostable detuning gives a single-branch bistability curve") {
  RunConfig cfg = figure_config("fig2a");
  cfg.physical.cavity_detuning_eff = -0.1e6;
  const auto dir = scratch("mono");
  const FigureResult r = render_figure("fig2a", cfg, dir.string(), 1, 1);
  CHECK(r.failures.empty());
  const auto rows = data_rows(read_file(dir / "fig2a.csv"));
  CHECK(rows.size() == 400);
  for (const auto& row : rows) CHECK(row.substr(row.rfind(',') + 1) == "1");
  CHECK(std::filesystem::exists(dir / "fig2a.gp"));
}

TEST_CASE("stability figure is a 200 x 200 grid") {
  const auto dir = scratch("fig3");
  const FigureResult r = render_figure("fig3", figure_config("fig3"), dir.string(), 2, 7);
  CHECK(r.failures.empty());
  const std::string text = read_file(dir / "fig3.csv");
  CHECK(text.rfind("# manifest_hash = ", 0) == 0);
  CHECK(data_rows(text).size() == 200 * 200);
}

TEST_CASE("figure CSVs are byte-identical across runs") {
  const auto a = scratch("rep_a"), b = scratch("rep_b");
  render_figure("fig2b", figure_config("fig2b"), a.string(), 1, 3);
  render_figure("fig2b", figure_config("fig2b"), b.string(), 1, 3);
  CHECK(read_file(a / "fig2b.csv") == read_file(b / "fig2b.csv"));
  render_figure("fig7c", figure_config("fig7c"), a.string(), 1, 3);
  render_figure("fig7c", figure_config("fig7c"), b.string(), 4, 3);
  CHECK(read_file(a / "fig7c.csv") == read_file(b / "fig7c.csv"));
}
