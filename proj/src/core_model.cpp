#include "finjj/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "finjj/constants.hpp"
#include "finjj/errors.hpp"

namespace finjj {

void validate(const BoseHubbardParams& bh) {
  if (!(bh.lambda > 0.0)) throw DomainError("Bose-Hubbard lambda must be positive");
  if (!(bh.nu > 0.0)) throw DomainError("Bose-Hubbard nu must be positive");
  if (!std::isfinite(bh.mu)) throw DomainError("Bose-Hubbard mu must be finite");
  if (bh.pairs_total < 1) throw DomainError("pairs_total must be at least 1");
}

void validate(const CircuitParams& params) {
  if (!(params.e_j > 0.0) || !std::isfinite(params.e_j)) throw DomainError("E_J must be positive");
  if (!(params.e_c > 0.0) || !std::isfinite(params.e_c)) throw DomainError("E_C must be positive");
  if (!std::isfinite(params.n_g)) throw DomainError("n_g must be finite");
  if (params.pairs_total < 1) throw DomainError("pairs_total (2N) must be at least 1");
}

CircuitParams map_bose_hubbard(const BoseHubbardParams& bh) {
  validate(bh);
  const double n_half = 0.5 * static_cast<double>(bh.pairs_total);
  CircuitParams p;
  p.e_j = 2.0 * n_half * bh.nu;
  p.e_c = 2.0 * bh.lambda;
  p.n_g = -bh.mu / (2.0 * bh.lambda);
  p.pairs_total = bh.pairs_total;
  return p;
}

BoseHubbardParams map_to_bose_hubbard(const CircuitParams& params) {
  validate(params);
  BoseHubbardParams bh;
  bh.lambda = 0.5 * params.e_c;
  bh.mu = -params.n_g * params.e_c;
  bh.nu = params.e_j / static_cast<double>(params.pairs_total);
  bh.pairs_total = params.pairs_total;
  return bh;
}

void validate(const MaterialProps& m) {
  const auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!positive(m.gap)) throw DomainError("material gap must be positive");
  if (!positive(m.fermi_energy)) throw DomainError("material Fermi energy must be positive");
  if (!positive(m.electron_density)) throw DomainError("material electron density must be positive");
  if (!positive(m.london_depth)) throw DomainError("material London depth must be positive");
}

MaterialProps aluminum() {
  MaterialProps m;
  m.name = "aluminum";
  m.gap = 0.34e-3 * constants::electron_volt;
  m.fermi_energy = 11.63 * constants::electron_volt;
  m.electron_density = 18.06e22 * 1e6;
  m.london_depth = 16e-9;
  return m;
}

double cooper_pair_density(const MaterialProps& m) {
  if (!(m.london_depth > 0.0)) throw DomainError("London depth must be positive");
  using namespace constants;
  const double ll = m.london_depth;
  return electron_mass / (2.0 * vacuum_permeability * elementary_charge * elementary_charge * ll * ll);
}

ValidityReport validity_min_pairs(const MaterialProps& m) {
  validate(m);
  ValidityReport r;
  r.n_s = cooper_pair_density(m);
  r.n_min = (m.fermi_energy / m.gap) * (r.n_s / m.electron_density);
  return r;
}

ValidityReport validity_report(const MaterialProps& m, double n_half, double n_g,
                               double gate_capacitance) {
  ValidityReport r = validity_min_pairs(m);
  r.island_volume = island_volume(m, n_half);
  r.gate_voltage = gate_voltage(n_g, gate_capacitance);
  return r;
}

double island_volume(const MaterialProps& m, double n_half) {
  if (!(n_half > 0.0)) throw DomainError("island volume needs N > 0");
  return n_half / cooper_pair_density(m);
}

double gate_voltage(double n_g, double gate_capacitance) {
  if (!(gate_capacitance > 0.0)) throw DomainError("gate capacitance must be positive");
  return n_g * constants::cooper_pair_charge / gate_capacitance;
}

double capacitance_per_pair_volt(double volts) {
  if (!(volts > 0.0)) throw DomainError("voltage scale must be positive");
  return constants::cooper_pair_charge / volts;
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_number(const std::string& key, const std::string& value, int line) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(value.substr(used)).size() != 0) {
    throw DomainError("material file line " + std::to_string(line) + ": bad number for '" +
                      key + "': " + value);
  }
  return x;
}

}  // namespace

std::vector<MaterialProps> parse_materials(std::istream& in) {
  std::vector<MaterialProps> out;
  struct Seen {
    bool gap = false, fermi = false, density = false, depth = false;
  };
  std::vector<Seen> seen;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    auto sep = raw.find('=');
    if (sep == std::string::npos) sep = raw.find(':');
    if (sep == std::string::npos) {
      throw DomainError("material file line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = lower(trim(raw.substr(0, sep)));
    const std::string value = trim(raw.substr(sep + 1));

    if (key == "name") {
      out.emplace_back();
      seen.emplace_back();
      out.back().name = value;
      continue;
    }
    if (out.empty()) {
      throw DomainError("material file line " + std::to_string(line) +
                        ": '" + key + "' before any 'name'");
    }
    auto& m = out.back();
    auto& s = seen.back();
    const double x = parse_number(key, value, line);
    if (key == "gap_mev") {
      m.gap = x * 1e-3 * constants::electron_volt;
      s.gap = true;
    } else if (key == "fermi_ev") {
      m.fermi_energy = x * constants::electron_volt;
      s.fermi = true;
    } else if (key == "n_e_per_cm3") {
      m.electron_density = x * 1e6;
      s.density = true;
    } else if (key == "lambdal_nm") {
      m.london_depth = x * 1e-9;
      s.depth = true;
    } else {
      throw DomainError("material file line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& s = seen[i];
    if (!(s.gap && s.fermi && s.density && s.depth)) {
      throw DomainError("material '" + out[i].name + "' is missing one of gap_meV, fermi_eV, "
                        "n_e_per_cm3, lambdaL_nm");
    }
    validate(out[i]);
  }
  return out;
}

std::vector<MaterialProps> load_materials(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open material file " + path.string());
  return parse_materials(in);
}

std::optional<MaterialProps> builtin_material(const std::string& name) {
  const std::string key = lower(name);
  if (key == "aluminum" || key == "aluminium" || key == "al") return aluminum();
  return std::nullopt;
}

}  // namespace finjj
