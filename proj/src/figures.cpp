#include "ringcav/figures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ringcav/dynamics.hpp"
#include "ringcav/entangle.hpp"
#include "ringcav/errors.hpp"
#include "ringcav/io.hpp"
#include "ringcav/spectra.hpp"
#include "ringcav/steady.hpp"

namespace ringcav {

namespace {

constexpr double kDeg = M_PI / 180.0;

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> arange(double a, double b, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::floor((b - a) / step + 1e-9)) + 1;
  for (int i = 0; i < n; ++i) v.push_back(a + i * step);
  return v;
}

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void write_script(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "set datafile separator ','\nset key autotitle columnhead\n" << body;
}

struct Ctx {
  const std::string& name;
  const RunConfig& cfg;
  const std::string& dir;
  unsigned threads;
  std::uint64_t hash;
  FigureResult& result;

  std::string csv(const std::string& suffix = "") const { return join(dir, name + suffix + ".csv"); }
  void script(const std::string& body) const {
    const std::string path = join(dir, name + ".gp");
    write_script(path, body);
    result.outputs.push_back(path);
  }
};

void bistability_figure(const Ctx& x, BistabilitySweep variable, const std::vector<double>& grid) {
  const auto rows = bistability_scan(x.cfg.physical, x.cfg.constants, variable, grid);
  std::vector<std::string> comments;
  for (const auto& r : rows) {
    if (r.fold) comments.push_back("fold near sweep_value = " + std::to_string(r.sweep_value));
  }
  CsvWriter w(x.csv(), x.hash, {"sweep_value", "branch0", "branch1", "branch2", "n_branches"}, comments);
  for (const auto& r : rows) {
    w.cell(r.sweep_value);
    for (std::size_t b = 0; b < 3; ++b) {
      if (b < r.intensities.size()) w.cell(r.intensities[b]);
      else w.empty();
    }
    w.cell(static_cast<double>(r.intensities.size()));
    w.end_row();
  }
  x.result.outputs.push_back(w.path());
  const std::string xl = variable == BistabilitySweep::drive_power ? "P_in (W)" : "Delta~/2pi (Hz)";
  x.script("set xlabel '" + xl + "'\nset ylabel '|a_s|^2'\nplot '" + x.name +
           ".csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n");
}

void stability_figure(const Ctx& x) {
  const auto xs = linspace(0.05, 40.0, 200);
  const auto ys = linspace(0.05, 2.0, 200);
  const auto map = stability_map(x.cfg.physical, x.cfg.constants, xs, ys, x.cfg.op, x.threads);
  CsvWriter w(x.csv(), x.hash, {"gphi_over_G", "omegaphi_over_omegad", "stable", "margin"});
  for (const auto& c : map.cells) {
    w.cell(c.gphi_over_G).cell(c.omegaphi_over_omegad);
    if (c.ok) {
      w.cell(c.stable ? 1.0 : 0.0).cell(c.margin);
    } else {
      w.empty().empty();
      x.result.failures.push_back("g_phi/G = " + std::to_string(c.gphi_over_G) + ", w_phi/w_d = " +
                                  std::to_string(c.omegaphi_over_omegad) + ": " + c.error);
    }
    w.end_row();
  }
  x.result.outputs.push_back(w.path());
  x.script("set xlabel 'g_phi/G'\nset ylabel 'omega_phi/omega_d'\nset view map\n"
           "splot '" + x.name + ".csv' using 1:2:3 with image\n");
}

void spectrum_row(CsvWriter& w, const SpectrumResult& r) {
  w.cell(to_hz(r.omega)).cell(r.theta / kDeg).cell(r.S).cell(r.S_vac).cell(r.S_th_c)
      .cell(r.S_th_d).cell(r.S_th_mirror);
}

const std::vector<std::string> kSpectrumColumns = {"omega_hz", "theta_deg", "S", "S_vac",
                                                   "S_th_c", "S_th_d", "S_th_mirror"};

// Frequency of the deepest S(ω, θ) within ±halfwidth of center (rad/s).
double deepest_dip(const DerivedParams& d, const DriftMatrix& F, double center, double halfwidth,
                   double theta) {
  double best = center, best_S = std::numeric_limits<double>::infinity();
  for (double w : linspace(center - halfwidth, center + halfwidth, 2001)) {
    const double S = homodyne_spectrum(d, F, transfer(F, w), theta).S;
    if (S < best_S) {
      best_S = S;
      best = w;
    }
  }
  return best;
}

void psd_figure(const Ctx& x) {
  const DerivedParams d = derive(x.cfg.physical, x.cfg.constants);
  const DriftMatrix F = build_drift(d, resolve_steady(d, x.cfg.op));
  CsvWriter w(x.csv(), x.hash, kSpectrumColumns);
  for (double th : {90.0, 30.0, 5.0}) {
    for (double f : linspace(550.0, 750.0, 4000)) {
      spectrum_row(w, homodyne_spectrum(d, F, transfer(F, to_angular(f)), th * kDeg));
      w.end_row();
    }
  }
  x.result.outputs.push_back(w.path());
  x.script("set xlabel 'omega/2pi (Hz)'\nset ylabel 'S'\n"
           "plot '" + x.name + ".csv' using ($2==90?$1:1/0):3 with lines title 'theta=90', "
           "'' using ($2==30?$1:1/0):3 with lines title 'theta=30', "
           "'' using ($2==5?$1:1/0):3 with lines title 'theta=5'\n");
}

void angle_figure(const Ctx& x) {
  const DerivedParams d = derive(x.cfg.physical, x.cfg.constants);
  const DriftMatrix F = build_drift(d, resolve_steady(d, x.cfg.op));
  const double halfwidth = to_angular(10.0);
  const double freqs[3] = {deepest_dip(d, F, d.Omega_c, halfwidth, 7.0 * kDeg),
                           deepest_dip(d, F, d.Omega_d, halfwidth, 7.0 * kDeg), d.omega_phi};
  CsvWriter w(x.csv(), x.hash, kSpectrumColumns,
              {"fixed frequencies: deepest theta = 7 deg dip within 10 Hz of Omega_c and Omega_d, "
               "and omega_phi"});
  for (double om : freqs) {
    const TransferSet t = transfer(F, om);
    for (double th : arange(0.0, 180.0, 0.1)) {
      spectrum_row(w, homodyne_spectrum(d, F, t, th * kDeg));
      w.end_row();
    }
  }
  x.result.outputs.push_back(w.path());
  x.script("set xlabel 'theta (deg)'\nset ylabel 'S'\nplot '" + x.name + ".csv' using 2:3 with lines\n");
}

void optimized_figure(const Ctx& x) {
  const DerivedParams ref = derive(x.cfg.physical, x.cfg.constants);
  std::vector<std::string> cols = {"G_hz"};
  cols.insert(cols.end(), kSpectrumColumns.begin(), kSpectrumColumns.end());
  cols.push_back("theta_opt_deg");
  CsvWriter w(x.csv(), x.hash, cols, {"G varied through g_a at fixed N"});
  const auto grid = linspace(to_angular(550.0), to_angular(750.0), 2000);
  for (double G_hz : {3.2e3, 9.6e3, 22.4e3}) {
    PhysicalParams p = x.cfg.physical;
    p.atom_photon_coupling *= std::sqrt(G_hz / to_hz(ref.G));
    const DerivedParams d = derive(p, x.cfg.constants);
    const auto pts = optimized_spectrum(d, resolve_steady(d, x.cfg.op), grid,
                                        NoiseRegime::colored, x.threads);
    for (const auto& pt : pts) {
      w.cell(G_hz);
      spectrum_row(w, pt.spectrum);
      w.cell(pt.theta_opt / kDeg);
      w.end_row();
    }
  }
  x.result.outputs.push_back(w.path());
  x.script("set xlabel 'omega/2pi (Hz)'\nset ylabel 'S_opt'\nplot '" + x.name +
           ".csv' using 2:4 with lines\n");
}

void mirror_figure(const Ctx& x) {
  const auto rows = mirror_squeezing_scan(x.cfg.physical, x.cfg.constants, x.cfg.op,
                                          arange(0.0, 100.0, 1.0), x.threads);
  CsvWriter w(x.csv(), x.hash,
              {"winding", "omega_mirror_hz", "S_opt_mode", "theta_opt_deg", "S_opt_omega_phi", "stable"});
  for (const auto& r : rows) {
    w.cell(r.winding);
    if (r.ok) {
      w.cell(to_hz(r.omega_mirror)).cell(r.S_opt_mode).cell(r.theta_opt_mode / kDeg)
          .cell(r.S_opt_omega_phi).cell(r.stable ? 1.0 : 0.0);
    } else {
      w.empty().empty().empty().empty().empty();
      x.result.failures.push_back("L_p = " + std::to_string(r.winding) + ": " + r.error);
    }
    w.end_row();
  }
  x.result.outputs.push_back(w.path());
  x.script("set xlabel 'L_p'\nset ylabel 'S_opt at mirror resonance'\nplot '" + x.name +
           ".csv' using 1:3 with lines\n");
}

void entangle_csv(const Ctx& x, const std::string& suffix, EntanglementSweep variable,
                  const std::vector<double>& grid) {
  const auto rows = entanglement_scan(x.cfg.physical, x.cfg.constants, variable, grid, x.cfg.op,
                                      x.threads);
  std::vector<std::string> comments;
  for (const auto& win : vanishing_windows(rows)) {
    comments.push_back("E_am < 1e-3 for sweep_value in [" + std::to_string(win.begin) + ", " +
                       std::to_string(win.end) + "]");
  }
  CsvWriter w(x.csv(suffix), x.hash,
              {"sweep_value", "E_am", "E_ac", "E_ad", "Rmin_amc", "Rmin_amd", "n_eff", "stable",
               "bona_fide"},
              comments);
  for (const auto& r : rows) {
    w.cell(r.sweep_value);
    if (r.ok) {
      const auto& e = r.report;
      w.cell(e.E_am).cell(e.E_ac).cell(e.E_ad).cell(e.R_min_c).cell(e.R_min_d).cell(e.n_eff)
          .cell(1.0).cell(e.cov.bona_fide ? 1.0 : 0.0);
    } else {
      w.empty().empty().empty().empty().empty().empty().cell(r.stable ? 1.0 : 0.0).empty();
      if (r.stable) x.result.failures.push_back(std::to_string(r.sweep_value) + ": " + r.error);
    }
    w.end_row();
  }
  x.result.outputs.push_back(w.path());
}

}  // namespace

std::vector<std::string> figure_names() {
  return {"fig2a", "fig2b", "fig3",  "fig4a", "fig4b", "fig5",  "fig6",
          "fig7a", "fig7b", "fig7c", "fig8",  "fig9a", "fig9b", "fig9c"};
}

bool is_figure(const std::string& name) {
  const auto names = figure_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

RunConfig figure_config(const std::string& name) {
  if (!is_figure(name)) throw UsageError("unknown figure '" + name + "'");
  const bool entangle = name[3] == '7' || name[3] == '8' || name[3] == '9';
  RunConfig c = preset(entangle ? "fig7" : "fig2");
  if (name == "fig2a") {
    c.physical.cavity_detuning_eff = -0.3e6;
    c.op = {OperatingPoint::Kind::delta_tilde, 0.0, std::nullopt};
  } else if (name == "fig2b") {
    c.physical.drive_power = 3e-12;
    c.op = {OperatingPoint::Kind::delta_tilde, 0.0, std::nullopt};
  } else if (name == "fig6") {
    c.physical.oam = 15;
  } else if (name == "fig9b" || name == "fig9c") {
    c.op.value = -1.9;
  }
  return c;
}

FigureResult render_figure(const std::string& name, const RunConfig& cfg,
                           const std::string& out_dir, unsigned threads, std::uint64_t hash) {
  if (!is_figure(name)) throw UsageError("unknown figure '" + name + "'");
  std::filesystem::create_directories(out_dir);
  FigureResult result;
  const Ctx x{name, cfg, out_dir, threads, hash, result};

  if (name == "fig2a") {
    bistability_figure(x, BistabilitySweep::drive_power, linspace(0.01e-12, 4e-12, 400));
  } else if (name == "fig2b") {
    bistability_figure(x, BistabilitySweep::detuning, linspace(-0.6e6, 0.2e6, 400));
  } else if (name == "fig3") {
    stability_figure(x);
  } else if (name == "fig4a") {
    psd_figure(x);
  } else if (name == "fig4b") {
    angle_figure(x);
  } else if (name == "fig5") {
    optimized_figure(x);
  } else if (name == "fig6") {
    mirror_figure(x);
  } else if (name == "fig7a") {
    entangle_csv(x, "", EntanglementSweep::delta_prime, arange(-3.0, 0.0, 0.01));
    entangle_csv(x, "_inset", EntanglementSweep::temp_mirror, arange(1e-3, 20e-3, 0.25e-3));
    x.script("set xlabel 'Delta'/omega_phi'\nset ylabel 'E_N'\nplot '" + name +
             ".csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n");
  } else if (name == "fig7b" || name == "fig9b") {
    entangle_csv(x, "", EntanglementSweep::oam, arange(200.0, 260.0, 0.25));
    x.script("set xlabel 'l'\nplot '" + name + (name == "fig7b" ? ".csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n"
                                                                : ".csv' using 1:5 with lines, '' using 1:6 with lines\n"));
  } else if (name == "fig7c" || name == "fig9c") {
    entangle_csv(x, "", EntanglementSweep::winding, arange(0.0, 60.0, 1.0));
    x.script("set xlabel 'L_p'\nplot '" + name + (name == "fig7c" ? ".csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n"
                                                                  : ".csv' using 1:5 with lines, '' using 1:6 with lines\n"));
  } else if (name == "fig8") {
    entangle_csv(x, "", EntanglementSweep::oam, arange(220.0, 234.0, 0.05));
    entangle_csv(x, "_inset", EntanglementSweep::winding, arange(20.0, 45.0, 0.25));
    x.script("set xlabel 'l'\nset ylabel 'n_eff'\nset logscale y\nplot '" + name +
             ".csv' using 1:7 with lines, 1 dashtype 2\n");
  } else if (name == "fig9a") {
    entangle_csv(x, "", EntanglementSweep::delta_prime, arange(-3.0, 0.0, 0.01));
    x.script("set xlabel 'Delta'/omega_phi'\nset ylabel 'R_min'\nplot '" + name +
             ".csv' using 1:5 with lines, '' using 1:6 with lines\n");
  }
  return result;
}

}  // namespace ringcav
