#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace finjj {

/// Two-site Bose-Hubbard couplings: on-site interaction, bias and tunneling.
struct BoseHubbardParams {
  double lambda = 1.0;
  double mu = 0.0;
  double nu = 1.0;
  std::int64_t pairs_total = 2;  // 2N bosons in total
};

/// Circuit parameters of a junction between two islands with N pairs each.
///
/// Energies are in whatever unit the caller chooses (the spectrum depends only
/// on e_j / e_c and n_g). `pairs_total` is 2N, so the charge basis runs over
/// n in {-N, ..., N} with N possibly half-integer.
struct CircuitParams {
  double e_j = 1.0;
  double e_c = 1.0;
  double n_g = 0.0;
  std::int64_t pairs_total = 2;

  double n_half() const noexcept { return 0.5 * static_cast<double>(pairs_total); }
  std::int64_t dim() const noexcept { return pairs_total + 1; }
  double ej_over_ec() const noexcept { return e_j / e_c; }

  CircuitParams with_n_g(double ng) const noexcept {
    CircuitParams p = *this;
    p.n_g = ng;
    return p;
  }
};

void validate(const BoseHubbardParams& bh);
void validate(const CircuitParams& params);

CircuitParams map_bose_hubbard(const BoseHubbardParams& bh);
BoseHubbardParams map_to_bose_hubbard(const CircuitParams& params);

/// Bulk material properties in SI units (energies in joules).
struct MaterialProps {
  std::string name;
  double gap = 0.0;
  double fermi_energy = 0.0;
  double electron_density = 0.0;  // m^-3
  double london_depth = 0.0;      // m
};

void validate(const MaterialProps& m);

/// Aluminum: gap 0.34 meV, Fermi energy 11.63 eV, n_e = 18.06e22 cm^-3,
/// London depth 16 nm.
MaterialProps aluminum();

// Zero-temperature Cooper-pair density m_e / (2 mu_0 e^2 lambda_L^2), m^-3.
double cooper_pair_density(const MaterialProps& m);

struct ValidityReport {
  double n_min = 0.0;  // smallest N for which the level spacing stays below the gap
  double n_s = 0.0;    // Cooper-pair density, m^-3
  std::optional<double> island_volume;  // m^3, for a given N
  std::optional<double> gate_voltage;   // V, for a given n_g and C_g
};

/// Minimum pairs per island, N_min = (eps_F / Delta)(n_s / n_e). This is the
/// equality value of an order-of-magnitude bound; apply a safety factor as
/// needed.
ValidityReport validity_min_pairs(const MaterialProps& m);

ValidityReport validity_report(const MaterialProps& m, double n_half,
                               double n_g, double gate_capacitance);

double island_volume(const MaterialProps& m, double n_half);

// V_g = n_g * 2e / C_g.
double gate_voltage(double n_g, double gate_capacitance);

// Capacitance C with 2e / C equal to `volts`.
double capacitance_per_pair_volt(double volts);

/// Reads material presets from a key-value text file. Each record starts with
/// a `name` key and sets gap_meV, fermi_eV, n_e_per_cm3 and lambdaL_nm.
/// Lines are `key = value` (or `key: value`); `#` starts a comment.
std::vector<MaterialProps> parse_materials(std::istream& in);
std::vector<MaterialProps> load_materials(const std::filesystem::path& path);

/// Looks up a built-in preset by name ("aluminum", "al").
std::optional<MaterialProps> builtin_material(const std::string& name);

}  // namespace finjj
