#include "ringcav/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ringcav/errors.hpp"
#include "ringcav/hash.hpp"

namespace ringcav {

namespace {

namespace pt = boost::property_tree;

struct Field {
  const char* key;
  double PhysicalParams::*member;
  bool required;
};

const Field kPhysical[] = {
    {"atom_mass", &PhysicalParams::atom_mass, false},
    {"n_atoms", &PhysicalParams::n_atoms, true},
    {"ring_radius", &PhysicalParams::ring_radius, true},
    {"trap_radial", &PhysicalParams::trap_radial, true},
    {"trap_axial", &PhysicalParams::trap_axial, true},
    {"scattering_length", &PhysicalParams::scattering_length, true},
    {"atom_photon_coupling", &PhysicalParams::atom_photon_coupling, true},
    {"atom_detuning", &PhysicalParams::atom_detuning, true},
    {"cavity_freq", &PhysicalParams::cavity_freq, true},
    {"cavity_linewidth", &PhysicalParams::cavity_linewidth, true},
    {"cavity_length", &PhysicalParams::cavity_length, true},
    {"oam", &PhysicalParams::oam, true},
    {"winding", &PhysicalParams::winding, true},
    {"drive_power", &PhysicalParams::drive_power, true},
    {"cavity_detuning_eff", &PhysicalParams::cavity_detuning_eff, true},
    {"mirror_mass", &PhysicalParams::mirror_mass, true},
    {"mirror_radius", &PhysicalParams::mirror_radius, true},
    {"mirror_freq", &PhysicalParams::mirror_freq, true},
    {"mirror_damping", &PhysicalParams::mirror_damping, true},
    {"sidemode_damping", &PhysicalParams::sidemode_damping, true},
    {"temp_atoms", &PhysicalParams::temp_atoms, true},
    {"temp_mirror", &PhysicalParams::temp_mirror, true},
};

double to_number(const std::string& section, const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos != text.size() || text.empty() || !std::isfinite(v)) {
    throw ConfigError("[" + section + "] " + key + ": not a finite number: '" + text + "'");
  }
  return v;
}

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* mode_name(OperatingPoint::Kind k) {
  switch (k) {
    case OperatingPoint::Kind::delta_tilde: return "delta_tilde";
    case OperatingPoint::Kind::delta_prime: return "delta_prime";
    case OperatingPoint::Kind::delta_prime_over_omega_phi: return "delta_prime_over_omega_phi";
  }
  return "";
}

}  // namespace

RunConfig parse_config(std::istream& in, const RunConfig* base) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  RunConfig c = base ? *base : RunConfig{};

  std::map<std::string, std::function<void(const std::string&, const pt::ptree&)>> sections;
  sections["physical"] = [&](const std::string& name, const pt::ptree& sec) {
    for (const auto& [key, node] : sec) {
      const std::string& text = node.data();
      if (key == "gtilde_override") {
        c.physical.gtilde_override = to_number(name, key, text);
        continue;
      }
      bool known = false;
      for (const auto& f : kPhysical) {
        if (key == f.key) {
          c.physical.*f.member = to_number(name, key, text);
          known = true;
        }
      }
      if (!known) throw ConfigError("[physical] unknown key '" + key + "'");
    }
    if (!base) {
      for (const auto& f : kPhysical) {
        if (f.required && !sec.get_child_optional(f.key)) {
          throw ConfigError(std::string("[physical] missing key '") + f.key + "'");
        }
      }
    }
  };
  sections["constants"] = [&](const std::string& name, const pt::ptree& sec) {
    for (const auto& [key, node] : sec) {
      const double v = to_number(name, key, node.data());
      if (key == "hbar") c.constants.hbar = v;
      else if (key == "k_B") c.constants.k_B = v;
      else if (key == "c") c.constants.c = v;
      else throw ConfigError("[constants] unknown key '" + key + "'");
    }
  };
  sections["operating_point"] = [&](const std::string& name, const pt::ptree& sec) {
    for (const auto& [key, node] : sec) {
      const std::string& text = node.data();
      if (key == "mode") {
        if (text == "delta_tilde") c.op.kind = OperatingPoint::Kind::delta_tilde;
        else if (text == "delta_prime") c.op.kind = OperatingPoint::Kind::delta_prime;
        else if (text == "delta_prime_over_omega_phi") c.op.kind = OperatingPoint::Kind::delta_prime_over_omega_phi;
        else throw ConfigError("[operating_point] mode: unknown value '" + text + "'");
      } else if (key == "value") {
        c.op.value = to_number(name, key, text);
      } else if (key == "branch") {
        const double b = to_number(name, key, text);
        if (b != std::floor(b) || b < 0 || b > 2) throw ConfigError("[operating_point] branch must be 0, 1 or 2");
        c.op.branch = static_cast<int>(b);
      } else {
        throw ConfigError("[operating_point] unknown key '" + key + "'");
      }
    }
  };
  sections["mc"] = [&](const std::string& name, const pt::ptree& sec) {
    for (const auto& [key, node] : sec) {
      const double v = to_number(name, key, node.data());
      if (key == "dt") c.mc.dt = v;
      else if (key == "t_total") c.mc.t_total = v;
      else if (key == "n_traj") c.mc.n_traj = static_cast<int>(v);
      else if (key == "burn_in") c.mc.burn_in = v;
      else if (key == "batches_per_traj") c.mc.batches_per_traj = static_cast<int>(v);
      else throw ConfigError("[mc] unknown key '" + key + "'");
    }
  };

  bool have_physical = false;
  for (const auto& [name, sec] : tree) {
    if (!sec.data().empty() && sec.empty()) {
      throw ConfigError("key '" + name + "' outside of a section");
    }
    auto it = sections.find(name);
    if (it == sections.end()) throw ConfigError("unknown section [" + name + "]");
    it->second(name, sec);
    have_physical = have_physical || name == "physical";
  }
  if (!base && !have_physical) throw ConfigError("missing section [physical]");
  return c;
}

RunConfig load_config(const std::string& path, const RunConfig* base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, base);
}

std::string write_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[physical]\n";
  for (const auto& f : kPhysical) os << f.key << " = " << format(c.physical.*f.member) << "\n";
  if (c.physical.gtilde_override) os << "gtilde_override = " << format(*c.physical.gtilde_override) << "\n";
  os << "\n[constants]\nhbar = " << format(c.constants.hbar) << "\nk_B = " << format(c.constants.k_B)
     << "\nc = " << format(c.constants.c) << "\n";
  os << "\n[operating_point]\nmode = " << mode_name(c.op.kind) << "\nvalue = " << format(c.op.value) << "\n";
  if (c.op.branch) os << "branch = " << *c.op.branch << "\n";
  os << "\n[mc]\ndt = " << format(c.mc.dt) << "\nt_total = " << format(c.mc.t_total)
     << "\nn_traj = " << c.mc.n_traj << "\nburn_in = " << format(c.mc.burn_in)
     << "\nbatches_per_traj = " << c.mc.batches_per_traj << "\n";
  return os.str();
}

std::uint64_t config_hash(const RunConfig& c) {
  Fnv1a h;
  h.add(format(static_cast<double>(params_hash(c.physical, c.constants))));
  h.add(mode_name(c.op.kind));
  h.add(c.op.value);
  h.add(c.op.branch ? static_cast<double>(*c.op.branch) : -1.0);
  return h.value();
}

std::vector<std::string> preset_names() { return {"fig2", "fig7"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  PhysicalParams& p = c.physical;
  if (name == "fig2") {
    p.n_atoms = 1e4;
    p.ring_radius = 12e-6;
    p.trap_radial = 840.0;
    p.trap_axial = 840.0;
    p.scattering_length = 0.1e-9;
    p.atom_photon_coupling = 0.7e6;
    p.atom_detuning = 5.4e9;
    p.cavity_freq = 1e15;
    p.cavity_linewidth = 0.2e6;
    p.cavity_length = 4e-3;
    p.oam = 10;
    p.winding = 1;
    p.drive_power = 12.4e-15;
    p.cavity_detuning_eff = 653.0;
    p.mirror_mass = 3.08e-9;
    p.mirror_radius = 15e-6;
    p.mirror_freq = 653.0;
    p.mirror_damping = 0.08;
    p.sidemode_damping = 0.8;
    p.temp_atoms = 10e-9;
    p.temp_mirror = 1e-3;
    p.gtilde_override = 14.0 * 78.8e-6;
    c.op.kind = OperatingPoint::Kind::delta_prime_over_omega_phi;
    c.op.value = 1.0;
    return c;
  }
  if (name == "fig7") {
    p.n_atoms = 2e4;
    p.ring_radius = 10e-6;
    p.trap_radial = 8.4e3;
    p.trap_axial = 8.4e3;
    p.scattering_length = 2.5e-9;
    p.atom_photon_coupling = std::sqrt(153.5 * 1.04e9);
    p.atom_detuning = 1.04e9;
    p.cavity_freq = 1e15;
    p.cavity_linewidth = 0.48e6;
    p.cavity_length = 1e-3;
    p.oam = 243;
    p.winding = 1;
    p.drive_power = 0.19e-9;
    p.cavity_detuning_eff = -1.2 * 3e6 / (2.0 * M_PI);
    p.mirror_mass = 0.1e-12;
    p.mirror_radius = 20e-6;
    p.mirror_freq = 3e6 / (2.0 * M_PI);
    p.mirror_damping = 4.77;
    p.sidemode_damping = 0.8;
    p.temp_atoms = 10e-9;
    p.temp_mirror = 5e-3;
    c.op.kind = OperatingPoint::Kind::delta_prime_over_omega_phi;
    c.op.value = -1.2;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace ringcav
