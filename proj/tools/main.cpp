#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "ringcav/config.hpp"
#include "ringcav/dynamics.hpp"
#include "ringcav/entangle.hpp"
#include "ringcav/errors.hpp"
#include "ringcav/figures.hpp"
#include "ringcav/hash.hpp"
#include "ringcav/io.hpp"
#include "ringcav/mc_oracle.hpp"
#include "ringcav/spectra.hpp"
#include "ringcav/steady.hpp"

using namespace ringcav;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPartial = 3;

constexpr double kDeg = M_PI / 180.0;

struct Common {
  std::string config;
  std::string preset;
  std::string out = ".";
  unsigned threads = 1;
  std::uint64_t seed = 1;
  bool json = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "INI configuration file");
  cmd->add_option("--preset", c.preset, "built-in parameter set (fig2, fig7)");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads (1 = reproducibility reference)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  cmd->add_flag("--json", c.json, "machine-readable output on stdout");
}

RunConfig resolve_config(const Common& c, const RunConfig* base = nullptr) {
  std::optional<RunConfig> start;
  if (!c.preset.empty()) start = preset(c.preset);
  else if (base) start = *base;
  if (!c.config.empty()) return load_config(c.config, start ? &*start : nullptr);
  if (start) return *start;
  throw UsageError("either --config or --preset is required");
}

std::uint64_t run_hash(const RunConfig& cfg, const std::string& descriptor) {
  Fnv1a h;
  h.add(hex_hash(config_hash(cfg)));
  h.add(descriptor);
  return h.value();
}

std::string out_path(const Common& c, const std::string& file) {
  std::filesystem::create_directories(c.out);
  return (std::filesystem::path(c.out) / file).string();
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void finish(const Common& c, const std::string& stem, const std::string& command,
            std::uint64_t hash, const std::vector<std::string>& outputs,
            const std::vector<std::string>& failures, const Timer& timer) {
  RunManifest m;
  m.config_hash = hash;
  m.command = command;
  m.outputs = outputs;
  m.wall_time_s = timer.seconds();
  m.failures = failures;
  m.write(out_path(c, stem + ".manifest.json"));
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(std::max(n, 1)));
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

// ---- derive ---------------------------------------------------------------

int cmd_derive(const Common& c) {
  Timer timer;
  const RunConfig cfg = resolve_config(c);
  const DerivedParams d = derive(cfg.physical, cfg.constants);
  const ValidationReport report = validate(cfg.physical, cfg.constants);
  const CriticalThresholds th = critical_thresholds(d);

  struct Row {
    const char* name;
    double value;
    const char* unit;
  };
  const std::vector<Row> rows = {
      {"U0/2pi", to_hz(d.U0), "Hz"},
      {"G/2pi", to_hz(d.G), "Hz"},
      {"eta", d.eta, "rad/s"},
      {"I_atom", d.I_atom, "kg m^2"},
      {"I_mirror", d.I_mirror, "kg m^2"},
      {"g_phi/2pi", to_hz(d.g_phi), "Hz"},
      {"omega_c/2pi", to_hz(d.omega_c), "Hz"},
      {"omega_d/2pi", to_hz(d.omega_d), "Hz"},
      {"gtilde/2pi", to_hz(d.gtilde), "Hz"},
      {"Omega_c/2pi", to_hz(d.Omega_c), "Hz"},
      {"Omega_d/2pi", to_hz(d.Omega_d), "Hz"},
      {"omegatilde_c/2pi", to_hz(d.omegatilde_c), "Hz"},
      {"omegatilde_d/2pi", to_hz(d.omegatilde_d), "Hz"},
      {"calA", d.calA, "rad^2/s^2"},
      {"Omegatilde_c", d.Omegatilde_c, "s/rad"},
      {"Omegatilde_d", d.Omegatilde_d, "s/rad"},
      {"K", d.kerr, "rad/s"},
      {"Delta_tilde/2pi", to_hz(d.Delta_tilde), "Hz"},
      {"Delta_0/2pi", to_hz(d.Delta_0), "Hz"},
      {"Delta_cr/2pi", to_hz(th.Delta_cr), "Hz"},
      {"P_cr", th.P_cr, "W"},
  };
  const std::uint64_t hash = run_hash(cfg, "derive");
  CsvWriter w(out_path(c, "derive.csv"), hash, {"quantity", "value", "unit"});
  for (const auto& r : rows) {
    w.cell(r.name).cell(r.value).cell(r.unit);
    w.end_row();
  }
  if (c.json) {
    json j;
    j["config_hash"] = hex_hash(hash);
    for (const auto& r : rows) j["derived"][r.name] = {{"value", r.value}, {"unit", r.unit}};
    for (const auto& e : report.entries) {
      j["validation"].push_back({{"name", e.name}, {"passed", e.passed}, {"warning", e.warning},
                                 {"value", e.value}, {"bound", e.bound}, {"message", e.message}});
    }
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& r : rows) std::printf("%-18s %16.8g  %s\n", r.name, r.value, r.unit);
    std::printf("\nvalidation:\n");
    for (const auto& e : report.entries) {
      std::printf("  %-26s %s  %s\n", e.name.c_str(),
                  !e.passed ? "FAIL" : (e.warning ? "WARN" : "ok  "), e.message.c_str());
    }
  }
  finish(c, "derive", "derive", hash, {w.path()}, {}, timer);
  return kExitOk;
}

// ---- steady ---------------------------------------------------------------

struct SteadyArgs {
  std::string sweep;
  double from = 0.0, to = 0.0;
  int points = 200;
};

int cmd_steady(const Common& c, const SteadyArgs& a) {
  Timer timer;
  const RunConfig cfg = resolve_config(c);
  const DerivedParams d = derive(cfg.physical, cfg.constants);
  std::ostringstream desc;
  desc << "steady " << a.sweep << " " << a.from << " " << a.to << " " << a.points;
  const std::uint64_t hash = run_hash(cfg, desc.str());

  if (!a.sweep.empty()) {
    BistabilitySweep var;
    if (a.sweep == "power") var = BistabilitySweep::drive_power;
    else if (a.sweep == "detuning") var = BistabilitySweep::detuning;
    else throw UsageError("--sweep must be 'power' or 'detuning'");
    const auto grid = linspace(a.from, a.to, a.points);
    const auto rows = bistability_scan(cfg.physical, cfg.constants, var, grid);
    CsvWriter w(out_path(c, "steady.csv"), hash,
                {"sweep_value", "branch0", "branch1", "branch2", "n_branches"});
    json j = json::array();
    for (const auto& r : rows) {
      w.cell(r.sweep_value);
      for (std::size_t b = 0; b < 3; ++b) {
        if (b < r.intensities.size()) w.cell(r.intensities[b]);
        else w.empty();
      }
      w.cell(static_cast<double>(r.intensities.size()));
      w.end_row();
      j.push_back({{"sweep_value", r.sweep_value}, {"intensities", r.intensities}, {"fold", r.fold}});
    }
    if (c.json) std::cout << j.dump(2) << "\n";
    else std::printf("wrote %s (%zu rows)\n", w.path().c_str(), rows.size());
    finish(c, "steady", "steady --sweep " + a.sweep, hash, {w.path()}, {}, timer);
    return kExitOk;
  }

  std::vector<SteadyState> states;
  if (cfg.op.kind == OperatingPoint::Kind::delta_tilde) states = solve_steady(d);
  else states.push_back(resolve_steady(d, cfg.op));
  const CriticalThresholds th = critical_thresholds(d);
  CsvWriter w(out_path(c, "steady.csv"), hash,
              {"branch", "a_s", "intensity", "X_cs", "X_ds", "phi_s", "delta_prime_hz",
               "delta_tilde_hz", "residual", "margin"});
  json j;
  j["Delta_cr_hz"] = to_hz(th.Delta_cr);
  j["P_cr_W"] = th.P_cr;
  for (const auto& s : states) {
    const double margin = stability(build_drift(d, s)).margin;
    w.cell(static_cast<double>(s.branch_index)).cell(s.a_s).cell(s.intensity).cell(s.X_cs)
        .cell(s.X_ds).cell(s.phi_s).cell(to_hz(s.Delta_prime)).cell(to_hz(s.Delta_tilde))
        .cell(s.residual).cell(margin);
    w.end_row();
    j["branches"].push_back({{"branch", s.branch_index}, {"a_s", s.a_s}, {"intensity", s.intensity},
                             {"delta_prime_hz", to_hz(s.Delta_prime)}, {"margin", margin}});
  }
  if (c.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("Delta_cr/2pi = %.6g Hz, P_cr = %.6g W\n", to_hz(th.Delta_cr), th.P_cr);
    for (const auto& s : states) {
      std::printf("branch %d: a_s = %.8g, Delta'/2pi = %.8g Hz, Delta~/2pi = %.8g Hz\n",
                  s.branch_index, s.a_s, to_hz(s.Delta_prime), to_hz(s.Delta_tilde));
    }
  }
  finish(c, "steady", "steady", hash, {w.path()}, {}, timer);
  return kExitOk;
}

// ---- stability-map --------------------------------------------------------

struct MapArgs {
  std::vector<double> x_range = {0.05, 40.0};
  std::vector<double> y_range = {0.05, 2.0};
  int nx = 200, ny = 200;
};

int cmd_stability_map(const Common& c, const MapArgs& a) {
  Timer timer;
  const RunConfig cfg = resolve_config(c);
  std::ostringstream desc;
  desc << "stability-map " << a.x_range[0] << " " << a.x_range[1] << " " << a.nx << " "
       << a.y_range[0] << " " << a.y_range[1] << " " << a.ny;
  const std::uint64_t hash = run_hash(cfg, desc.str());
  const auto xs = linspace(a.x_range[0], a.x_range[1], a.nx);
  const auto ys = linspace(a.y_range[0], a.y_range[1], a.ny);
  const auto map = stability_map(cfg.physical, cfg.constants, xs, ys, cfg.op, c.threads);
  CsvWriter w(out_path(c, "stability_map.csv"), hash,
              {"gphi_over_G", "omegaphi_over_omegad", "stable", "margin"});
  std::vector<std::string> failures;
  std::size_t n_stable = 0;
  for (const auto& cell : map.cells) {
    w.cell(cell.gphi_over_G).cell(cell.omegaphi_over_omegad);
    if (cell.ok) {
      w.cell(cell.stable ? 1.0 : 0.0).cell(cell.margin);
      n_stable += cell.stable;
    } else {
      w.empty().empty();
      failures.push_back(cell.error);
    }
    w.end_row();
  }
  if (c.json) {
    json j{{"cells", map.cells.size()}, {"stable", n_stable}, {"failures", failures.size()}};
    for (const auto& [x, y] : map.boundary) j["boundary"].push_back({x, y});
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("%zu of %zu grid points stable; boundary points: %zu\n", n_stable,
                map.cells.size(), map.boundary.size());
  }
  finish(c, "stability_map", "stability-map", hash, {w.path()}, failures, timer);
  return failures.empty() ? kExitOk : kExitPartial;
}

// ---- spectrum / squeeze-opt -----------------------------------------------

struct SpectrumArgs {
  std::vector<double> theta = {90.0};
  double from = 550.0, to = 750.0;
  int points = 2000;
  std::string regime = "colored";
};

NoiseRegime parse_regime(const std::string& s) {
  if (s == "colored") return NoiseRegime::colored;
  if (s == "markovian") return NoiseRegime::markovian;
  throw UsageError("--regime must be 'colored' or 'markovian'");
}

const std::vector<std::string> kSpectrumColumns = {"omega_hz", "theta_deg", "S", "S_vac",
                                                   "S_th_c", "S_th_d", "S_th_mirror"};

void spectrum_cells(CsvWriter& w, const SpectrumResult& r) {
  w.cell(to_hz(r.omega)).cell(r.theta / kDeg).cell(r.S).cell(r.S_vac).cell(r.S_th_c)
      .cell(r.S_th_d).cell(r.S_th_mirror);
}

int cmd_spectrum(const Common& c, const SpectrumArgs& a) {
  Timer timer;
  const RunConfig cfg = resolve_config(c);
  const NoiseRegime regime = parse_regime(a.regime);
  const DerivedParams d = derive(cfg.physical, cfg.constants);
  const DriftMatrix F = build_drift(d, resolve_steady(d, cfg.op));
  std::ostringstream desc;
  desc << "spectrum " << a.from << " " << a.to << " " << a.points << " " << a.regime;
  for (double t : a.theta) desc << " " << t;
  const std::uint64_t hash = run_hash(cfg, desc.str());
  CsvWriter w(out_path(c, "spectrum.csv"), hash, kSpectrumColumns);
  json j = json::array();
  for (double th : a.theta) {
    for (double f : linspace(a.from, a.to, a.points)) {
      const SpectrumResult r = homodyne_spectrum(d, F, transfer(F, to_angular(f)), th * kDeg, regime);
      spectrum_cells(w, r);
      w.end_row();
      if (c.json) j.push_back({{"omega_hz", f}, {"theta_deg", th}, {"S", r.S}});
    }
  }
  if (c.json) std::cout << j.dump(2) << "\n";
  else std::printf("wrote %s\n", w.path().c_str());
  finish(c, "spectrum", "spectrum", hash, {w.path()}, {}, timer);
  return kExitOk;
}

int cmd_squeeze_opt(const Common& c, const SpectrumArgs& a) {
  Timer timer;
  const RunConfig cfg = resolve_config(c);
  const NoiseRegime regime = parse_regime(a.regime);
  const DerivedParams d = derive(cfg.physical, cfg.constants);
  std::ostringstream desc;
  desc << "squeeze-opt " << a.from << " " << a.to << " " << a.points << " " << a.regime;
  const std::uint64_t hash = run_hash(cfg, desc.str());
  std::vector<double> grid;
  for (double f : linspace(a.from, a.to, a.points)) grid.push_back(to_angular(f));
  const auto pts = optimized_spectrum(d, resolve_steady(d, cfg.op), grid, regime, c.threads);
  auto cols = kSpectrumColumns;
  cols.push_back("theta_opt_deg");
  CsvWriter w(out_path(c, "squeeze_opt.csv"), hash, cols);
  json j = json::array();
  for (const auto& p : pts) {
    spectrum_cells(w, p.spectrum);
    w.cell(p.theta_opt / kDeg);
    w.end_row();
    if (c.json) {
      j.push_back({{"omega_hz", to_hz(p.omega)}, {"theta_opt_deg", p.theta_opt / kDeg},
                   {"S_opt", p.S_opt}, {"degenerate", p.degenerate}});
    }
  }
  if (c.json) std::cout << j.dump(2) << "\n";
  else std::printf("wrote %s\n", w.path().c_str());
  finish(c, "squeeze_opt", "squeeze-opt", hash, {w.path()}, {}, timer);
  return kExitOk;
}

// ---- entangle-scan --------------------------------------------------------

struct EntangleArgs {
  std::string sweep = "delta_prime";
  double from = -3.0, to = 0.0;
  int points = 301;
};

int cmd_entangle_scan(const Common& c, const EntangleArgs& a) {
  Timer timer;
  const RunConfig cfg = resolve_config(c);
  EntanglementSweep var;
  if (a.sweep == "delta_prime") var = EntanglementSweep::delta_prime;
  else if (a.sweep == "oam") var = EntanglementSweep::oam;
  else if (a.sweep == "winding") var = EntanglementSweep::winding;
  else if (a.sweep == "temp_mirror") var = EntanglementSweep::temp_mirror;
  else throw UsageError("--sweep must be delta_prime, oam, winding or temp_mirror");
  std::ostringstream desc;
  desc << "entangle-scan " << a.sweep << " " << a.from << " " << a.to << " " << a.points;
  const std::uint64_t hash = run_hash(cfg, desc.str());
  const auto rows = entanglement_scan(cfg.physical, cfg.constants, var,
                                      linspace(a.from, a.to, a.points), cfg.op, c.threads);
  std::vector<std::string> comments;
  for (const auto& win : vanishing_windows(rows)) {
    comments.push_back("E_am < 1e-3 for sweep_value in [" + std::to_string(win.begin) + ", " +
                       std::to_string(win.end) + "]");
  }
  CsvWriter w(out_path(c, "entangle_scan.csv"), hash,
              {"sweep_value", "E_am", "E_ac", "E_ad", "Rmin_amc", "Rmin_amd", "n_eff", "stable",
               "bona_fide"},
              comments);
  std::vector<std::string> failures;
  json j = json::array();
  for (const auto& r : rows) {
    w.cell(r.sweep_value);
    if (r.ok) {
      const auto& e = r.report;
      w.cell(e.E_am).cell(e.E_ac).cell(e.E_ad).cell(e.R_min_c).cell(e.R_min_d).cell(e.n_eff)
          .cell(1.0).cell(e.cov.bona_fide ? 1.0 : 0.0);
      if (c.json) {
        j.push_back({{"sweep_value", r.sweep_value}, {"E_am", e.E_am}, {"E_ac", e.E_ac},
                     {"E_ad", e.E_ad}, {"Rmin_amc", e.R_min_c}, {"Rmin_amd", e.R_min_d},
                     {"n_eff", e.n_eff}, {"unphysical", r.unphysical}});
      }
    } else {
      w.empty().empty().empty().empty().empty().empty().cell(r.stable ? 1.0 : 0.0).empty();
      if (r.stable) failures.push_back(std::to_string(r.sweep_value) + ": " + r.error);
    }
    w.end_row();
  }
  if (c.json) std::cout << j.dump(2) << "\n";
  else std::printf("wrote %s (%zu rows, %zu failures)\n", w.path().c_str(), rows.size(), failures.size());
  finish(c, "entangle_scan", "entangle-scan", hash, {w.path()}, failures, timer);
  return failures.empty() ? kExitOk : kExitPartial;
}

// ---- figure ---------------------------------------------------------------

int cmd_figure(const Common& c, const std::string& name) {
  Timer timer;
  if (!is_figure(name)) {
    std::string known;
    for (const auto& n : figure_names()) known += " " + n;
    throw UsageError("unknown figure '" + name + "'; known:" + known);
  }
  const RunConfig base = figure_config(name);
  const RunConfig cfg = resolve_config(c, &base);
  const std::uint64_t hash = run_hash(cfg, "figure " + name);
  const FigureResult res = render_figure(name, cfg, c.out, c.threads, hash);
  if (c.json) {
    std::cout << json{{"figure", name}, {"outputs", res.outputs}, {"failures", res.failures}}.dump(2)
              << "\n";
  } else {
    for (const auto& o : res.outputs) std::printf("wrote %s\n", o.c_str());
    if (!res.failures.empty()) std::printf("%zu grid point(s) failed\n", res.failures.size());
  }
  finish(c, name, "figure " + name, hash, res.outputs, res.failures, timer);
  return res.failures.empty() ? kExitOk : kExitPartial;
}

// ---- mc-check -------------------------------------------------------------

struct McArgs {
  int n_traj = 0;
  double t_total = 0.0;
  double dt = 0.0;
  int segment = 65536;
  int points = 5;
  bool corrupt = false;
};

int cmd_mc_check(const Common& c, const McArgs& a) {
  Timer timer;
  const RunConfig fallback = preset("fig7");
  const RunConfig cfg = resolve_config(c, &fallback);
  const DerivedParams d = derive(cfg.physical, cfg.constants);
  const DriftMatrix F = build_drift(d, resolve_steady(d, cfg.op));
  const NoiseModel noise = noise_model(d);
  const Stability st = stability(F);

  McConfig mc = cfg.mc;
  mc.seed = c.seed;
  mc.threads = c.threads;
  if (a.n_traj > 0) mc.n_traj = a.n_traj;
  else if (mc.n_traj <= 1) mc.n_traj = 8;
  if (a.t_total > 0.0) mc.t_total = a.t_total;
  else if (mc.t_total <= 0.0) mc.t_total = 0.05;
  if (a.dt > 0.0) mc.dt = a.dt;
  else if (mc.dt <= 0.0) mc.dt = 0.09 / max_abs_eigenvalue(F);

  std::ostringstream desc;
  desc << "mc-check " << mc.dt << " " << mc.t_total << " " << mc.n_traj << " " << mc.burn_in
       << " " << mc.batches_per_traj << " " << c.seed << " " << a.segment << " " << a.points
       << " " << a.corrupt;
  const std::uint64_t hash = run_hash(cfg, desc.str());

  struct Check {
    std::string name;
    bool passed;
    std::string detail;
  };
  std::vector<Check> checks;
  std::vector<std::string> outputs;

  if (!st.stable) {
    checks.push_back({"covariance", true, "skipped: drift matrix unstable"});
    // Run long enough for several e-foldings and let growth dominate the start-up transient.
    McConfig dc = mc;
    if (a.t_total <= 0.0) dc.t_total = std::max(mc.t_total, 8.0 / st.margin);
    dc.burn_in = std::max(mc.burn_in, 0.3);
    const DivergenceReport div = divergence_check(F, noise, dc);
    std::ostringstream os;
    os << "window second moments:";
    for (double v : div.window_second_moment) os << " " << v;
    checks.push_back({"divergence", div.diverging, os.str()});
  } else {
    DriftMatrix analytic = F;
    if (a.corrupt) analytic.entries(P, Q) *= 1.5;  // fault injection for testing the checker

    SpectrumRequest req;
    req.segment_steps = a.segment;
    std::mt19937_64 rng(trajectory_seed(c.seed, 0xfeed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double lo = 0.8 * std::min({d.omega_phi, d.Omega_c, d.Omega_d});
    const double hi = 1.2 * std::max({d.omega_phi, d.Omega_c, d.Omega_d});
    for (int i = 0; i < a.points; ++i) {
      req.omega.push_back(lo + (hi - lo) * unit(rng));
      req.theta.push_back(M_PI * unit(rng));
    }
    const McRun run = run_oracle(F, noise, mc, &req);

    const Mat8 V = solve_lyapunov(analytic, noise).V;
    CsvWriter wc(out_path(c, "mc_covariance.csv"), hash,
                 {"i", "j", "V_est", "stderr", "V_lyapunov", "z"});
    double zmax = 0.0;
    int worst_i = 0, worst_j = 0;
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const double se = run.covariance.stderr_(i, j);
        const double z = (run.covariance.V_est(i, j) - V(i, j)) / se;
        wc.cell(i).cell(j).cell(run.covariance.V_est(i, j)).cell(se).cell(V(i, j)).cell(z);
        wc.end_row();
        if (j >= i && std::abs(z) > zmax) {
          zmax = std::abs(z);
          worst_i = i;
          worst_j = j;
        }
      }
    }
    outputs.push_back(wc.path());
    std::ostringstream os;
    os << "max |z| = " << zmax << " at (" << worst_i << "," << worst_j << ") over "
       << run.covariance.n_batches << " batches";
    checks.push_back({"covariance", zmax <= 3.0, os.str()});

    const auto& sp = *run.spectrum;
    CsvWriter ws(out_path(c, "mc_periodogram.csv"), hash,
                 {"omega_hz", "S_est", "stderr", "theta_deg", "S_expected", "z"});
    double szmax = 0.0;
    for (std::size_t i = 0; i < sp.omega.size(); ++i) {
      const double ex = expected_periodogram(d, analytic, sp.theta[i], sp.omega[i], a.segment, mc.dt);
      const double z = (sp.S_est[i] - ex) / sp.stderr_[i];
      szmax = std::max(szmax, std::abs(z));
      ws.cell(to_hz(sp.omega[i])).cell(sp.S_est[i]).cell(sp.stderr_[i]).cell(sp.theta[i] / kDeg)
          .cell(ex).cell(z);
      ws.end_row();
    }
    outputs.push_back(ws.path());
    std::ostringstream os2;
    os2 << "max |z| = " << szmax << " over " << sp.omega.size() << " (omega, theta) points";
    checks.push_back({"spectrum", szmax <= 3.0, os2.str()});
  }

  bool all = true;
  std::vector<std::string> failures;
  json j = json::array();
  for (const auto& ch : checks) {
    all = all && ch.passed;
    if (!ch.passed) failures.push_back(ch.name + ": " + ch.detail);
    if (c.json) j.push_back({{"check", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    else std::printf("%s %-11s %s\n", ch.passed ? "PASS" : "FAIL", ch.name.c_str(), ch.detail.c_str());
  }
  if (c.json) std::cout << j.dump(2) << "\n";
  finish(c, "mc_check", "mc-check", hash, outputs, failures, timer);
  return all ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearized ring-BEC / LG-cavity / rotating-mirror simulator"};
  app.require_subcommand(1);
  Common common;

  auto* derive_cmd = app.add_subcommand("derive", "print derived constants");
  add_common(derive_cmd, common);

  SteadyArgs steady_args;
  auto* steady_cmd = app.add_subcommand("steady", "steady states, thresholds, bistability sweep");
  add_common(steady_cmd, common);
  steady_cmd->add_option("--sweep", steady_args.sweep, "power (W) or detuning (Hz)");
  steady_cmd->add_option("--from", steady_args.from);
  steady_cmd->add_option("--to", steady_args.to);
  steady_cmd->add_option("--points", steady_args.points)->check(CLI::PositiveNumber);

  MapArgs map_args;
  auto* map_cmd = app.add_subcommand("stability-map", "stability over (g_phi/G, omega_phi/omega_d)");
  add_common(map_cmd, common);
  map_cmd->add_option("--x-range", map_args.x_range, "g_phi/G range")->expected(2);
  map_cmd->add_option("--y-range", map_args.y_range, "omega_phi/omega_d range")->expected(2);
  map_cmd->add_option("--nx", map_args.nx)->check(CLI::PositiveNumber);
  map_cmd->add_option("--ny", map_args.ny)->check(CLI::PositiveNumber);

  SpectrumArgs spec_args;
  auto* spec_cmd = app.add_subcommand("spectrum", "homodyne output spectrum");
  add_common(spec_cmd, common);
  spec_cmd->add_option("--theta", spec_args.theta, "homodyne angle(s) in degrees");
  spec_cmd->add_option("--from", spec_args.from, "start frequency (Hz)");
  spec_cmd->add_option("--to", spec_args.to, "end frequency (Hz)");
  spec_cmd->add_option("--points", spec_args.points)->check(CLI::PositiveNumber);
  spec_cmd->add_option("--regime", spec_args.regime, "colored or markovian");

  SpectrumArgs opt_args;
  auto* opt_cmd = app.add_subcommand("squeeze-opt", "spectrum at the optimal homodyne angle");
  add_common(opt_cmd, common);
  opt_cmd->add_option("--from", opt_args.from, "start frequency (Hz)");
  opt_cmd->add_option("--to", opt_args.to, "end frequency (Hz)");
  opt_cmd->add_option("--points", opt_args.points)->check(CLI::PositiveNumber);
  opt_cmd->add_option("--regime", opt_args.regime, "colored or markovian");

  EntangleArgs ent_args;
  auto* ent_cmd = app.add_subcommand("entangle-scan", "entanglement measures along a sweep");
  add_common(ent_cmd, common);
  ent_cmd->add_option("--sweep", ent_args.sweep, "delta_prime (units of omega_phi), oam, winding, temp_mirror (K)");
  ent_cmd->add_option("--from", ent_args.from);
  ent_cmd->add_option("--to", ent_args.to);
  ent_cmd->add_option("--points", ent_args.points)->check(CLI::PositiveNumber);

  std::string figure_name;
  auto* fig_cmd = app.add_subcommand("figure", "regenerate a figure's data and plot script");
  add_common(fig_cmd, common);
  fig_cmd->add_option("name", figure_name, "fig2a ... fig9c")->required();

  McArgs mc_args;
  auto* mc_cmd = app.add_subcommand("mc-check", "compare analytic results with the Monte-Carlo oracle");
  add_common(mc_cmd, common);
  mc_cmd->add_option("--n-traj", mc_args.n_traj, "independent trajectories");
  mc_cmd->add_option("--t-total", mc_args.t_total, "seconds per trajectory");
  mc_cmd->add_option("--dt", mc_args.dt, "step (s); default 0.09/|lambda|max");
  mc_cmd->add_option("--segment", mc_args.segment, "Welch segment length in steps");
  mc_cmd->add_option("--points", mc_args.points, "random (omega, theta) spectrum points");
  mc_cmd->add_flag("--corrupt-drift", mc_args.corrupt)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (derive_cmd->parsed()) return cmd_derive(common);
    if (steady_cmd->parsed()) return cmd_steady(common, steady_args);
    if (map_cmd->parsed()) return cmd_stability_map(common, map_args);
    if (spec_cmd->parsed()) return cmd_spectrum(common, spec_args);
    if (opt_cmd->parsed()) return cmd_squeeze_opt(common, opt_args);
    if (ent_cmd->parsed()) return cmd_entangle_scan(common, ent_args);
    if (fig_cmd->parsed()) return cmd_figure(common, figure_name);
    if (mc_cmd->parsed()) return cmd_mc_check(common, mc_args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const InvalidParameter& e) {
    std::fprintf(stderr, "invalid parameter: %s\n", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheck;
  }
  return kExitUsage;
}
