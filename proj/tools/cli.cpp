#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "finjj/charge_hamiltonian.hpp"
#include "finjj/constants.hpp"
#include "finjj/core_model.hpp"
#include "finjj/errors.hpp"
#include "finjj/observables.hpp"
#include "finjj/perturbation.hpp"
#include "finjj/sweep_table.hpp"
#include "finjj/wick.hpp"

namespace finjj::cli {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// A bad flag value; the message starts with the flag name.
struct ParamError : std::runtime_error {
  ParamError(const std::string& flag, const std::string& msg) : std::runtime_error(flag + ": " + msg) {}
};

struct Options {
  std::string pairs;
  double ejec = 1.0;
  double ec = 1.0;
  double ng = 0.0;

  double from = 0.0;
  double to = 0.0;
  std::string steps = "101";
  std::vector<double> values;
  bool log_spacing = false;
  std::string levels;

  std::string window = "adaptive";
  std::string half_width;
  double rtol = 1e-9;
  std::string w_max;
  std::string threads = "0";

  std::string format = "csv";
  std::string output;

  bool subtract_e0 = false;
  bool frequency = false;
  bool first_order = false;

  std::string kind;
  std::string scan = "ejec";
  double curvature_step = default_curvature_step;

  double ej_ghz = 10.0;
  double ec_ghz = 0.2;

  std::string material = "aluminum";
  double gate_mv = 1.0;

  std::string count = "200";
  std::string max_degree = "6";
  std::string max_terms = "6";
  std::string seed = "1";
  std::string fock_dim = "64";
  double tol = 1e-9;

  double lo = 0.0;
  double hi = 0.0;
};

// Options whose presence matters, not just their value.
struct Seen {
  CLI::Option* from = nullptr;
  CLI::Option* to = nullptr;
  CLI::Option* steps = nullptr;
  CLI::Option* lo = nullptr;
  CLI::Option* hi = nullptr;
};

std::string fmt(double x, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Counts accept scientific notation ("5e8") but must be exact integers.
std::int64_t parse_count(const std::string& text, const std::string& flag, std::int64_t min_value) {
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end == text.c_str() || *end != '\0' || !std::isfinite(x)) {
    throw ParamError(flag, "expected a count, got '" + text + "'");
  }
  if (x != std::floor(x)) throw ParamError(flag, "must be an integer, got '" + text + "'");
  if (x < static_cast<double>(min_value)) {
    throw ParamError(flag, "must be at least " + std::to_string(min_value) + ", got '" + text + "'");
  }
  if (x > 9007199254740992.0) throw ParamError(flag, "exceeds 2^53");
  return static_cast<std::int64_t>(x);
}

void require_positive(double x, const std::string& flag) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ParamError(flag, "must be a positive number, got " + fmt(x));
}

void require_finite(double x, const std::string& flag) {
  if (!std::isfinite(x)) throw ParamError(flag, "must be finite");
}

CircuitParams circuit(const Options& o, double n_g) {
  const std::int64_t pairs = parse_count(o.pairs, "--pairs", 1);
  require_positive(o.ejec, "--ejec");
  require_positive(o.ec, "--ec");
  require_finite(n_g, "--ng");
  return {o.ejec * o.ec, o.ec, n_g, pairs};
}

WindowPolicy window_policy(const Options& o) {
  if (o.window == "full") {
    if (!o.half_width.empty()) throw ParamError("--half-width", "not used with --window full");
    return WindowPolicy::full();
  }
  if (o.window == "fixed") {
    if (o.half_width.empty()) throw ParamError("--half-width", "required with --window fixed");
    return WindowPolicy::fixed(parse_count(o.half_width, "--half-width", 1));
  }
  require_positive(o.rtol, "--rtol");
  WindowPolicy p = WindowPolicy::adaptive(o.rtol);
  if (!o.half_width.empty()) p.half_width = parse_count(o.half_width, "--half-width", 4);
  if (!o.w_max.empty()) p.w_max = parse_count(o.w_max, "--w-max", 4);
  return p;
}

nlohmann::ordered_json policy_meta(const WindowPolicy& p) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(p.mode);
  if (p.mode == WindowPolicy::Mode::fixed) j["half_width"] = p.half_width;
  if (p.mode == WindowPolicy::Mode::adaptive) {
    j["initial_half_width"] = p.half_width > 0 ? nlohmann::ordered_json(p.half_width) : "auto";
    j["rtol"] = p.rtol;
    j["w_max"] = p.w_max;
  }
  return j;
}

nlohmann::ordered_json circuit_meta(const CircuitParams& p) {
  nlohmann::ordered_json j;
  j["pairs_total"] = p.pairs_total;
  j["n_half"] = p.n_half();
  j["e_j"] = p.e_j;
  j["e_c"] = p.e_c;
  j["ej_over_ec"] = p.ej_over_ec();
  return j;
}

std::vector<double> linspace(double from, double to, std::int64_t steps, bool log_spacing) {
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (std::int64_t i = 0; i < steps; ++i) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    g[static_cast<std::size_t>(i)] =
        log_spacing ? from * std::pow(to / from, t) : from + (to - from) * t;
  }
  if (steps > 1) g.back() = to;
  return g;
}

std::vector<double> sweep_grid(const Options& o, const Seen& seen, const char* what) {
  if (!o.values.empty()) {
    for (double v : o.values) require_finite(v, "--values");
    for (std::size_t i = 1; i < o.values.size(); ++i) {
      if (!(o.values[i] > o.values[i - 1])) throw ParamError("--values", "must be strictly increasing");
    }
    return o.values;
  }
  if (seen.from->count() == 0) throw ParamError("--from", std::string("required to sweep ") + what);
  if (seen.to->count() == 0) throw ParamError("--to", std::string("required to sweep ") + what);
  require_finite(o.from, "--from");
  require_finite(o.to, "--to");
  if (!(o.from < o.to)) throw ParamError("--to", "must be greater than --from");
  const std::int64_t steps = parse_count(o.steps, "--steps", 1);
  if (steps > 100'000'000) throw ParamError("--steps", "too many grid points");
  if (o.log_spacing && !(o.from > 0.0)) throw ParamError("--from", "must be positive with --log");
  return linspace(o.from, o.to, steps, o.log_spacing);
}

nlohmann::ordered_json grid_meta(const Options& o, const std::vector<double>& grid) {
  nlohmann::ordered_json j;
  if (!o.values.empty()) {
    j["values"] = grid;
  } else {
    j["from"] = o.from;
    j["to"] = o.to;
    j["steps"] = grid.size();
    j["spacing"] = o.log_spacing ? "log" : "linear";
  }
  return j;
}

std::int64_t level_count(const Options& o, std::int64_t fallback, const CircuitParams& p) {
  if (o.levels.empty()) return std::min(fallback, p.dim());
  const std::int64_t k = parse_count(o.levels, "--levels", 1);
  if (k > p.dim()) throw ParamError("--levels", "exceeds the basis dimension 2N+1 = " + std::to_string(p.dim()));
  return k;
}

void prepend_meta(SweepTable& t, nlohmann::ordered_json head) {
  for (const auto& [k, v] : t.meta.items()) {
    if (!head.contains(k)) head[k] = v;
  }
  t.meta = std::move(head);
}

int emit(const SweepTable& table, const Options& o, const std::string& summary, std::ostream& out,
         std::ostream& err) {
  std::ostringstream body;
  if (o.format == "json") {
    body << to_json(table, 2) << '\n';
  } else {
    write_csv(body, table);
  }
  if (o.output.empty()) {
    out << body.str();
    err << summary << '\n';
    return exit_ok;
  }
  std::ofstream file(o.output, std::ios::binary);
  if (!file) throw ParamError("--output", "cannot open '" + o.output + "' for writing");
  file << body.str();
  if (!file) throw ParamError("--output", "write to '" + o.output + "' failed");
  out << summary << " -> " << o.output << '\n';
  return exit_ok;
}

enum class SweepKind { bands, imbalance, susceptibility };

int cmd_sweep(const Options& o, const Seen& seen, SweepKind kind, std::ostream& out, std::ostream& err) {
  const char* name = kind == SweepKind::bands       ? "bands"
                     : kind == SweepKind::imbalance ? "imbalance"
                                                    : "susceptibility";
  const CircuitParams base = circuit(o, 0.0);
  const WindowPolicy policy = window_policy(o);
  const std::vector<double> grid = sweep_grid(o, seen, "n_g");

  SweepRequest req;
  req.levels = level_count(o, kind == SweepKind::bands ? 3 : 1, base);
  req.imbalance = kind != SweepKind::bands;
  req.susceptibility = kind == SweepKind::susceptibility;
  req.frequency = o.frequency;
  req.threads = static_cast<unsigned>(parse_count(o.threads, "--threads", 0));

  SweepTable table = band_sweep(base, grid, req, policy);

  double offset = 0.0;
  if (o.subtract_e0) {
    offset = std::numeric_limits<double>::infinity();
    for (double e : table.column("E0")) {
      if (std::isfinite(e)) offset = std::min(offset, e);
    }
    if (!std::isfinite(offset)) offset = 0.0;
    for (auto& [col, values] : table.columns) {
      if (col.size() > 1 && col[0] == 'E') {
        for (double& v : values) v -= offset;
      }
    }
  }

  // band_sweep already records the circuit and the window policy.
  nlohmann::ordered_json head;
  head["command"] = name;
  head["n_half"] = base.n_half();
  head["ej_over_ec"] = base.ej_over_ec();
  head["levels"] = req.levels;
  head["grid"] = grid_meta(o, grid);
  head["energy_offset"] = offset;
  prepend_meta(table, std::move(head));

  const std::size_t failed = table.meta["failed_points"].size();
  std::string summary = std::string(name) + ": " + std::to_string(grid.size()) + " points, " +
                        std::to_string(req.levels) + " level(s), 2N = " + std::to_string(base.pairs_total) +
                        ", E_J/E_C = " + fmt(base.ej_over_ec());
  if (kind != SweepKind::bands) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : table.column("n_expect")) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    summary += ", <n> in [" + fmt(lo) + ", " + fmt(hi) + "]";
  }
  if (kind == SweepKind::susceptibility) {
    double peak = 0.0;
    for (double v : table.column("chi")) {
      if (std::isfinite(v)) peak = std::max(peak, v);
    }
    summary += ", peak d<n>/dn_g = " + fmt(peak);
  }
  summary += failed ? ", " + std::to_string(failed) + " point(s) failed" : "";
  emit(table, o, summary, out, err);
  return failed ? exit_not_converged : exit_ok;
}

int cmd_curvature(const Options& o, const Seen& seen, std::ostream& out, std::ostream& err) {
  const std::int64_t pairs = parse_count(o.pairs, "--pairs", 1);
  require_positive(o.ec, "--ec");
  require_positive(o.curvature_step, "--step");
  const WindowPolicy policy = window_policy(o);
  const std::vector<double> ratios = sweep_grid(o, seen, "E_J/E_C");
  for (double r : ratios) {
    if (!(r > 0.0)) throw ParamError(o.values.empty() ? "--from" : "--values", "E_J/E_C must be positive");
  }
  const bool dispersion = o.kind == "dispersion";

  std::vector<double> value, richardson, analytic, ratio, disagreement;
  auto warnings = nlohmann::ordered_json::array();
  for (double r : ratios) {
    const CircuitParams p{r * o.ec, o.ec, 0.0, pairs};
    const Curvature c = dispersion ? dispersion_curvature(p, policy, o.curvature_step)
                                   : susceptibility_curvature(p, policy, o.curvature_step);
    value.push_back(c.value);
    richardson.push_back(c.richardson);
    analytic.push_back(c.analytic);
    ratio.push_back(c.ratio());
    disagreement.push_back(c.disagreement);
    for (const auto& w : c.warnings) warnings.push_back({{"ej_over_ec", r}, {"warning", w}});
  }

  SweepTable table;
  table.grid_name = "ej_over_ec";
  table.grid = ratios;
  table.add_column("curvature", std::move(value));
  table.add_column("richardson", std::move(richardson));
  table.add_column("analytic", std::move(analytic));
  table.add_column("ratio", ratio);
  table.add_column("disagreement", std::move(disagreement));

  nlohmann::ordered_json head;
  head["command"] = "curvature";
  head["kind"] = o.kind;
  head["scan"] = o.scan;
  head["pairs_total"] = pairs;
  head["n_half"] = 0.5 * static_cast<double>(pairs);
  head["e_c"] = o.ec;
  head["n_g"] = 0.0;
  head["step"] = o.curvature_step;
  head["grid"] = grid_meta(o, ratios);
  head["window"] = policy_meta(policy);
  head["warnings"] = std::move(warnings);
  table.meta = std::move(head);

  const std::string summary = "curvature (" + o.kind + "): " + std::to_string(ratios.size()) +
                              " value(s) of E_J/E_C, 2N = " + std::to_string(pairs) + ", ratio to closed form " +
                              fmt(ratio.front()) + " at " + fmt(ratios.front()) + " -> " + fmt(ratio.back()) +
                              " at " + fmt(ratios.back());
  return emit(table, o, summary, out, err);
}

int cmd_transmon_shift(const Options& o, std::ostream& out, std::ostream& err) {
  const std::int64_t pairs = parse_count(o.pairs, "--pairs", 1);
  require_positive(o.ej_ghz, "--ej-ghz");
  require_positive(o.ec_ghz, "--ec-ghz");
  require_finite(o.ng, "--ng");
  if (o.ng == 0.0) throw ParamError("--ng", "must be nonzero");
  const WindowPolicy policy = window_policy(o);

  const CircuitParams at_zero{o.ej_ghz, o.ec_ghz, 0.0, pairs};
  const CircuitParams at_ng = at_zero.with_n_g(o.ng);
  const Observable w0 = qubit_frequency(at_zero, policy);
  const Observable w1 = qubit_frequency(at_ng, policy);
  const AnalyticValue a0 = transmon_frequency(at_zero);
  const AnalyticValue a1 = transmon_frequency(at_ng);

  const double shift_khz = (w1.value - w0.value) * 1e6;
  const double closed_khz = (a1.value - a0.value) * 1e6;
  const double deviation = std::abs(shift_khz - closed_khz) / std::abs(closed_khz);

  const bool ng_first = o.ng < 0.0;
  const auto order = [&](double zero_value, double ng_value) {
    return ng_first ? std::vector<double>{ng_value, zero_value} : std::vector<double>{zero_value, ng_value};
  };
  SweepTable table;
  table.grid = order(0.0, o.ng);
  table.add_column("omega_q_ghz", order(w0.value, w1.value));
  table.add_column("closed_form_ghz", order(a0.value, a1.value));
  table.add_column("window_n_lo", order(static_cast<double>(w0.window.first) - at_zero.n_half(),
                                        static_cast<double>(w1.window.first) - at_zero.n_half()));
  table.add_column("window_n_hi", order(static_cast<double>(w0.window.last) - at_zero.n_half(),
                                        static_cast<double>(w1.window.last) - at_zero.n_half()));

  nlohmann::ordered_json head;
  head["command"] = "transmon-shift";
  head["units"] = "GHz";
  head["circuit"] = circuit_meta(at_zero);
  head["n_g"] = o.ng;
  head["window"] = policy_meta(policy);
  head["shift_khz"] = shift_khz;
  head["closed_form_shift_khz"] = closed_khz;
  head["relative_deviation"] = deviation;
  std::set<std::string> warnings(a1.warnings.begin(), a1.warnings.end());
  head["warnings"] = warnings;
  table.meta = std::move(head);

  const std::string summary = "transmon-shift: omega_q(n_g=" + fmt(o.ng) + ") - omega_q(0) = " +
                              fmt(shift_khz, 6) + " kHz; closed form " + fmt(closed_khz, 6) + " kHz (deviation " +
                              fmt(100.0 * deviation, 3) + "%)";
  return emit(table, o, summary, out, err);
}

int cmd_analytic(const Options& o, const Seen& seen, std::ostream& out, std::ostream& err) {
  const CircuitParams base = circuit(o, o.ng);
  const bool sweep = seen.from->count() > 0 || seen.to->count() > 0 || !o.values.empty();
  const std::vector<double> grid = sweep ? sweep_grid(o, seen, "n_g") : std::vector<double>{o.ng};

  const std::size_t n = grid.size();
  std::vector<double> gap(n, nan), chi(n, nan), eps(n), up(n), um(n), u0(n), freq(n), tchi(n);
  std::vector<double> fo_freq, fo_imbalance;
  std::set<std::string> warnings;
  for (std::size_t i = 0; i < n; ++i) {
    const CircuitParams p = base.with_n_g(grid[i]);
    if (is_degeneracy_point(p)) {
      const AnalyticValue g = cpb_gap(p);
      const AnalyticValue x = cpb_susceptibility(p);
      gap[i] = g.value;
      chi[i] = x.value;
      warnings.insert(g.warnings.begin(), g.warnings.end());
    }
    const BogoliubovCoeffs c = bogoliubov(p);
    eps[i] = c.epsilon;
    up[i] = c.u_plus;
    um[i] = c.u_minus;
    u0[i] = c.u_0;
    const AnalyticValue f = transmon_frequency(p);
    const AnalyticValue s = transmon_susceptibility(p);
    freq[i] = f.value;
    tchi[i] = s.value;
    warnings.insert(f.warnings.begin(), f.warnings.end());
    if (o.first_order) {
      const FirstOrderTransmon t = transmon_first_order_numeric(p);
      fo_freq.push_back(t.freq);
      fo_imbalance.push_back(t.imbalance);
    }
  }

  SweepTable table;
  table.grid = grid;
  table.add_column("cpb_gap", std::move(gap));
  table.add_column("cpb_susceptibility", std::move(chi));
  table.add_column("epsilon", std::move(eps));
  table.add_column("u_plus", std::move(up));
  table.add_column("u_minus", std::move(um));
  table.add_column("u_0", std::move(u0));
  table.add_column("transmon_frequency", std::move(freq));
  table.add_column("transmon_susceptibility", std::move(tchi));
  if (o.first_order) {
    table.add_column("first_order_frequency", std::move(fo_freq));
    table.add_column("first_order_imbalance", std::move(fo_imbalance));
  }

  nlohmann::ordered_json head;
  head["command"] = "analytic";
  head["circuit"] = circuit_meta(base);
  if (sweep) {
    head["grid"] = grid_meta(o, grid);
  } else {
    head["n_g"] = o.ng;
  }
  head["warnings"] = warnings;
  table.meta = std::move(head);

  std::string summary = "analytic: " + std::to_string(n) + " point(s), 2N = " + std::to_string(base.pairs_total) +
                        ", E_J/E_C = " + fmt(base.ej_over_ec());
  if (n == 1) summary += ", transmon frequency " + fmt(table.column("transmon_frequency")[0]);
  summary += ", " + std::to_string(warnings.size()) + " regime warning(s)";
  return emit(table, o, summary, out, err);
}

int cmd_validity(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<MaterialProps> materials;
  if (auto m = builtin_material(o.material)) {
    materials.push_back(*m);
  } else {
    std::ifstream probe(o.material);
    if (!probe) throw ParamError("--material", "no preset or readable file named '" + o.material + "'");
    try {
      materials = load_materials(o.material);
    } catch (const DomainError& e) {
      throw ParamError("--material", e.what());
    }
    if (materials.empty()) throw ParamError("--material", "file '" + o.material + "' has no records");
  }
  const std::int64_t pairs = parse_count(o.pairs, "--pairs", 1);
  require_finite(o.ng, "--ng");
  require_positive(o.gate_mv, "--gate-mv");
  const double c_g = capacitance_per_pair_volt(o.gate_mv * 1e-3);
  const double n_half = 0.5 * static_cast<double>(pairs);

  SweepTable table;
  table.grid_name = "record";
  std::vector<double> n_min, n_s, volume, voltage;
  auto names = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < materials.size(); ++i) {
    const ValidityReport r = validity_report(materials[i], n_half, o.ng, c_g);
    table.grid.push_back(static_cast<double>(i));
    n_min.push_back(r.n_min);
    n_s.push_back(r.n_s);
    volume.push_back(r.island_volume.value_or(nan) * 1e18);
    voltage.push_back(r.gate_voltage.value_or(nan));
    names.push_back({{"name", materials[i].name},
                     {"gap_mev", materials[i].gap / constants::electron_volt * 1e3},
                     {"fermi_ev", materials[i].fermi_energy / constants::electron_volt},
                     {"n_e_per_cm3", materials[i].electron_density * 1e-6},
                     {"lambda_l_nm", materials[i].london_depth * 1e9}});
  }
  table.add_column("n_min", n_min);
  table.add_column("n_s_per_m3", n_s);
  table.add_column("island_volume_um3", volume);
  table.add_column("gate_voltage_v", voltage);

  nlohmann::ordered_json head;
  head["command"] = "validity";
  head["materials"] = std::move(names);
  head["pairs_total"] = pairs;
  head["n_half"] = n_half;
  head["n_g"] = o.ng;
  head["gate_mv_per_pair"] = o.gate_mv;
  head["gate_capacitance_f"] = c_g;
  table.meta = std::move(head);

  const std::string summary = "validity (" + materials.front().name + "): N_min = " + fmt(n_min.front(), 4) +
                              ", n_s = " + fmt(n_s.front(), 4) + " m^-3, island volume " + fmt(volume.front(), 4) +
                              " um^3 at 2N = " + fmt(static_cast<double>(pairs)) + ", V_g = " +
                              fmt(voltage.front(), 6) + " V at n_g = " + fmt(o.ng);
  return emit(table, o, summary, out, err);
}

int cmd_wick_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const std::int64_t count = parse_count(o.count, "--count", 1);
  wick::RandomPolySpec spec;
  spec.max_degree = static_cast<int>(parse_count(o.max_degree, "--max-degree", 0));
  spec.max_terms = static_cast<int>(parse_count(o.max_terms, "--max-terms", 1));
  if (spec.max_degree > 24) throw ParamError("--max-degree", "at most 24");
  if (spec.max_terms > 1000) throw ParamError("--max-terms", "at most 1000");
  const auto seed = static_cast<std::uint64_t>(parse_count(o.seed, "--seed", 0));
  const auto dim = static_cast<std::size_t>(parse_count(o.fock_dim, "--fock-dim", 1));
  if (dim <= static_cast<std::size_t>(spec.max_degree)) throw ParamError("--fock-dim", "must exceed --max-degree");
  if (dim > 4096) throw ParamError("--fock-dim", "at most 4096");
  require_positive(o.tol, "--tol");

  std::mt19937_64 rng(seed);
  SweepTable table;
  table.grid_name = "trial";
  // matrix_error is relative to the largest exact matrix entry.
  std::vector<double> degree, terms, re, im, vev_error, matrix_error;
  std::int64_t failures = 0;
  double worst = 0.0;
  for (std::int64_t t = 0; t < count; ++t) {
    const wick::OperatorPoly p = wick::random_polynomial(rng, spec);
    const wick::Complex vev = wick::vacuum_expectation(p);
    const wick::Complex oracle = wick::fock_oracle(p, dim);
    const double e_vev = std::abs(vev - oracle);

    // Columns j with j + degree < dim never see the truncation.
    const auto exact_cols = static_cast<Eigen::Index>(dim) - p.degree();
    const Eigen::MatrixXcd before = wick::fock_matrix(p, dim);
    const Eigen::MatrixXcd after = wick::fock_matrix(wick::normal_order(p), dim);
    const double scale = std::max(1.0, before.leftCols(exact_cols).cwiseAbs().maxCoeff());
    const double e_mat = (before - after).leftCols(exact_cols).cwiseAbs().maxCoeff() / scale;

    table.grid.push_back(static_cast<double>(t));
    degree.push_back(p.degree());
    terms.push_back(static_cast<double>(p.size()));
    re.push_back(vev.real());
    im.push_back(vev.imag());
    vev_error.push_back(e_vev);
    matrix_error.push_back(e_mat);
    worst = std::max({worst, e_vev, e_mat});
    if (!(e_vev <= o.tol && e_mat <= o.tol)) ++failures;
  }
  table.add_column("degree", std::move(degree));
  table.add_column("terms", std::move(terms));
  table.add_column("vev_real", std::move(re));
  table.add_column("vev_imag", std::move(im));
  table.add_column("vev_error", std::move(vev_error));
  table.add_column("matrix_error", std::move(matrix_error));

  nlohmann::ordered_json head;
  head["command"] = "wick-verify";
  head["count"] = count;
  head["max_degree"] = spec.max_degree;
  head["max_terms"] = spec.max_terms;
  head["max_abs_coefficient"] = spec.max_abs;
  head["seed"] = seed;
  head["fock_dim"] = dim;
  head["tol"] = o.tol;
  head["failures"] = failures;
  table.meta = std::move(head);

  const std::string summary = "wick-verify: " + std::to_string(count - failures) + "/" + std::to_string(count) +
                              " polynomials match the Fock oracle (max error " + fmt(worst, 3) + ", tol " +
                              fmt(o.tol, 3) + ")";
  emit(table, o, summary, out, err);
  return failures ? exit_check_failed : exit_ok;
}

int cmd_hamiltonian(const Options& o, const Seen& seen, std::ostream& out, std::ostream& err) {
  const CircuitParams p = circuit(o, o.ng);
  ChargeWindow w = full_window(p);
  if ((seen.lo->count() > 0) != (seen.hi->count() > 0)) throw ParamError("--lo", "give both --lo and --hi");
  if (seen.lo->count() > 0) {
    try {
      w = charge_window(p, o.lo, o.hi);
    } catch (const DomainError& e) {
      throw ParamError("--lo/--hi", e.what());
    }
  }
  if (w.size() > default_dense_limit) {
    throw ParamError("--pairs", "export is limited to " + std::to_string(default_dense_limit) +
                                    " rows; narrow it with --lo/--hi");
  }
  const TridiagonalHamiltonian h = build_windowed(p, w);

  std::ostringstream body;
  nlohmann::ordered_json head;
  head["command"] = "hamiltonian";
  head["circuit"] = circuit_meta(p);
  head["n_g"] = p.n_g;
  head["n_lo"] = h.charge(0);
  head["n_hi"] = h.charge(h.dim() - 1);
  for (const auto& [k, v] : head.items()) body << "# " << k << " = " << v.dump() << '\n';
  write_table(body, h);

  const std::string summary = "hamiltonian: " + std::to_string(h.dim()) + " rows, n in [" + fmt(h.charge(0)) +
                              ", " + fmt(h.charge(h.dim() - 1)) + "]";
  if (o.output.empty()) {
    out << body.str();
    err << summary << '\n';
    return exit_ok;
  }
  std::ofstream file(o.output, std::ios::binary);
  if (!file) throw ParamError("--output", "cannot open '" + o.output + "' for writing");
  file << body.str();
  out << summary << " -> " << o.output << '\n';
  return exit_ok;
}

void add_circuit(CLI::App* sub, Options& o, bool pairs_required) {
  auto* pairs = sub->add_option("--pairs", o.pairs, "total Cooper pairs 2N (scientific notation allowed)");
  if (pairs_required) pairs->required();
  sub->add_option("--ejec", o.ejec, "E_J/E_C")->capture_default_str();
  sub->add_option("--ec", o.ec, "E_C, the energy unit of all outputs")->capture_default_str();
}

void add_grid(CLI::App* sub, Options& o, Seen& seen) {
  seen.from = sub->add_option("--from", o.from, "first grid value");
  seen.to = sub->add_option("--to", o.to, "last grid value");
  seen.steps = sub->add_option("--steps", o.steps, "grid points, endpoints included")->capture_default_str();
  sub->add_option("--values", o.values, "explicit grid instead of --from/--to/--steps")->delimiter(',');
}

void add_window(CLI::App* sub, Options& o) {
  sub->add_option("--window", o.window, "charge window policy")
      ->check(CLI::IsMember({"adaptive", "fixed", "full"}))
      ->capture_default_str();
  sub->add_option("--half-width", o.half_width, "window half-width (fixed) or initial half-width (adaptive)");
  sub->add_option("--rtol", o.rtol, "adaptive window tolerance")->capture_default_str();
  sub->add_option("--w-max", o.w_max, "largest adaptive half-width");
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--output,-o", o.output, "output file (default: stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Josephson junction between finite superconducting islands", "finjj"};
  app.require_subcommand(1);
  Options o;
  Seen bands_seen, imbalance_seen, susceptibility_seen;

  const auto sweep_cmd = [&](const char* name, const char* help, bool bands, Seen& seen) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_circuit(sub, o, true);
    add_grid(sub, o, seen);
    add_window(sub, o);
    add_output(sub, o);
    sub->add_option("--levels", o.levels, bands ? "band count (default 3)" : "band count (default 1)");
    sub->add_option("--threads", o.threads, "worker threads, 0 for all cores")->capture_default_str();
    sub->add_flag("--frequency", o.frequency, "add an omega_q column");
    if (bands) sub->add_flag("--subtract-e0", o.subtract_e0, "shift energies so that min E0 over the grid is 0");
    return sub;
  };
  CLI::App* bands = sweep_cmd("bands", "lowest band energies over an n_g grid", true, bands_seen);
  CLI::App* imbalance = sweep_cmd("imbalance", "ground-state <n> over an n_g grid", false, imbalance_seen);
  CLI::App* susceptibility = sweep_cmd("susceptibility", "d<n>/dn_g over an n_g grid", false, susceptibility_seen);

  Seen curvature_seen;
  CLI::App* curvature = app.add_subcommand("curvature", "zero-offset curvature against E_J/E_C");
  curvature->add_option("--kind", o.kind, "which curvature")
      ->check(CLI::IsMember({"dispersion", "susceptibility"}))
      ->required();
  curvature->add_option("--scan", o.scan, "scanned parameter")->check(CLI::IsMember({"ejec"}))->capture_default_str();
  curvature->add_option("--pairs", o.pairs, "total Cooper pairs 2N")->required();
  curvature->add_option("--ec", o.ec, "E_C")->capture_default_str();
  curvature->add_option("--step", o.curvature_step, "finite-difference step in n_g")->capture_default_str();
  curvature->add_flag("--log", o.log_spacing, "geometric grid spacing");
  add_grid(curvature, o, curvature_seen);
  add_window(curvature, o);
  add_output(curvature, o);

  o.pairs = "5e8";
  CLI::App* shift = app.add_subcommand("transmon-shift", "frequency shift omega_q(n_g) - omega_q(0) in kHz");
  shift->add_option("--ej-ghz", o.ej_ghz, "E_J in GHz")->capture_default_str();
  shift->add_option("--ec-ghz", o.ec_ghz, "E_C in GHz")->capture_default_str();
  shift->add_option("--pairs", o.pairs, "total Cooper pairs 2N")->capture_default_str();
  CLI::Option* shift_ng = shift->add_option("--ng", o.ng, "offset charge");
  shift_ng->default_str("1e6");
  add_window(shift, o);
  add_output(shift, o);

  Seen analytic_seen;
  CLI::App* analytic = app.add_subcommand("analytic", "closed-form gap, susceptibility and Bogoliubov data");
  add_circuit(analytic, o, true);
  analytic->add_option("--ng", o.ng, "offset charge")->capture_default_str();
  analytic->add_flag("--first-order", o.first_order, "add the first-order transmon evaluation");
  add_grid(analytic, o, analytic_seen);
  add_output(analytic, o);

  CLI::App* validity = app.add_subcommand("validity", "minimum island size and device-scale estimates");
  validity->add_option("--material", o.material, "preset name or key-value file")->capture_default_str();
  validity->add_option("--pairs", o.pairs, "total Cooper pairs 2N for the island volume")->capture_default_str();
  CLI::Option* validity_ng = validity->add_option("--ng", o.ng, "offset charge for the gate voltage");
  validity_ng->default_str("1e6");
  validity->add_option("--gate-mv", o.gate_mv, "gate capacitance as 2e / C_g in mV")->capture_default_str();
  add_output(validity, o);

  CLI::App* wick_verify = app.add_subcommand("wick-verify", "random polynomials against the truncated-Fock oracle");
  wick_verify->add_option("--count", o.count, "number of polynomials")->capture_default_str();
  wick_verify->add_option("--max-degree", o.max_degree, "longest word")->capture_default_str();
  wick_verify->add_option("--max-terms", o.max_terms, "most terms per polynomial")->capture_default_str();
  wick_verify->add_option("--seed", o.seed, "generator seed")->capture_default_str();
  wick_verify->add_option("--fock-dim", o.fock_dim, "truncated Fock dimension")->capture_default_str();
  wick_verify->add_option("--tol", o.tol, "absolute tolerance")->capture_default_str();
  add_output(wick_verify, o);

  Seen ham_seen;
  CLI::App* hamiltonian = app.add_subcommand("hamiltonian", "charge-basis coefficients as an n, diag, offdiag table");
  add_circuit(hamiltonian, o, true);
  hamiltonian->add_option("--ng", o.ng, "offset charge")->capture_default_str();
  ham_seen.lo = hamiltonian->add_option("--lo", o.lo, "lowest charge kept");
  ham_seen.hi = hamiltonian->add_option("--hi", o.hi, "highest charge kept");
  hamiltonian->add_option("--output,-o", o.output, "output file (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_bad_parameter;
  }
  // Subcommand-specific defaults that differ from the shared ones.
  if (shift->parsed() && shift_ng->count() == 0) o.ng = 1e6;
  if (validity->parsed() && validity_ng->count() == 0) o.ng = 1e6;

  try {
    if (bands->parsed()) return cmd_sweep(o, bands_seen, SweepKind::bands, out, err);
    if (imbalance->parsed()) return cmd_sweep(o, imbalance_seen, SweepKind::imbalance, out, err);
    if (susceptibility->parsed()) return cmd_sweep(o, susceptibility_seen, SweepKind::susceptibility, out, err);
    if (curvature->parsed()) return cmd_curvature(o, curvature_seen, out, err);
    if (shift->parsed()) return cmd_transmon_shift(o, out, err);
    if (analytic->parsed()) return cmd_analytic(o, analytic_seen, out, err);
    if (validity->parsed()) return cmd_validity(o, out, err);
    if (wick_verify->parsed()) return cmd_wick_verify(o, out, err);
    if (hamiltonian->parsed()) return cmd_hamiltonian(o, ham_seen, out, err);
  } catch (const ParamError& e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_parameter;
  } catch (const ConvergenceError& e) {
    err << "error: not converged: " << e.what() << " (achieved " << fmt(e.achieved()) << ")\n";
    return exit_not_converged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_parameter;
  }
  return exit_bad_parameter;
}

}  // namespace finjj::cli
