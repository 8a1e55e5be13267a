#include "finjj/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "finjj/errors.hpp"

namespace finjj {

std::string to_string(WindowPolicy::Mode mode) {
  switch (mode) {
    case WindowPolicy::Mode::full:
      return "full";
    case WindowPolicy::Mode::fixed:
      return "fixed";
    case WindowPolicy::Mode::adaptive:
      return "adaptive";
  }
  return "unknown";
}

std::int64_t default_initial_half_width(const CircuitParams& params) {
  // Four standard deviations of the harmonic ground state in charge.
  const double spread = 8.0 * std::pow(params.e_j / (8.0 * params.e_c), 0.25);
  return std::max<std::int64_t>(16, static_cast<std::int64_t>(std::ceil(spread)));
}

double default_eig_tol(const CircuitParams& params) { return 1e-15 * (params.e_c + params.e_j); }

namespace {

double resolve_tol(const CircuitParams& params, const WindowPolicy& policy) {
  return policy.eig_tol > 0.0 ? policy.eig_tol : default_eig_tol(params);
}

double charge_expectation(const TridiagonalHamiltonian& h, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += h.charge(static_cast<std::int64_t>(i)) * v[i] * v[i];
  return s;
}

WindowedSolution solve_on(const CircuitParams& params, const ChargeWindow& window, std::int64_t levels,
                          bool with_ground_vector, double tol) {
  const TridiagonalHamiltonian h = build_windowed(params, window);
  const std::int64_t k = std::min(levels, h.dim());
  WindowedSolution out;
  out.window = window;
  out.spectrum = lowest_eigenvalues(h, k, tol);
  if (with_ground_vector) {
    EigenPair gs = ground_state(h, tol);
    out.ground_charge = charge_expectation(h, *gs.vector);
    gs.value = out.spectrum.pairs.front().value;
    out.spectrum.pairs.front() = std::move(gs);
  }
  return out;
}

double relative_change(const WindowedSolution& a, const WindowedSolution& b, bool with_charge) {
  double change = 0.0;
  const auto& pa = a.spectrum.pairs;
  const auto& pb = b.spectrum.pairs;
  const std::size_t n = std::min(pa.size(), pb.size());
  for (std::size_t j = 1; j < n; ++j) {
    const double ga = pa[j].value - pa[0].value;
    const double gb = pb[j].value - pb[0].value;
    const double denom = std::max(std::abs(gb), std::numeric_limits<double>::min());
    change = std::max(change, std::abs(ga - gb) / denom);
  }
  if (with_charge) {
    change = std::max(change, std::abs(a.ground_charge - b.ground_charge) /
                                  std::max(1.0, std::abs(b.ground_charge)));
  }
  return change;
}

}  // namespace

WindowedSolution solve_windowed(const CircuitParams& params, const WindowPolicy& policy,
                                std::int64_t levels, bool with_ground_vector) {
  validate(params);
  if (levels < 1) throw DomainError("solve_windowed: levels must be at least 1");
  const double tol = resolve_tol(params, policy);

  switch (policy.mode) {
    case WindowPolicy::Mode::full: {
      WindowedSolution s = solve_on(params, full_window(params), levels, with_ground_vector, tol);
      s.converged = true;
      return s;
    }
    case WindowPolicy::Mode::fixed: {
      if (policy.half_width < 1) throw DomainError("fixed window half-width must be at least 1");
      const ChargeWindow w = centered_window(params, params.n_g, policy.half_width);
      WindowedSolution s = solve_on(params, w, levels, with_ground_vector, tol);
      s.converged = covers_full_basis(params, w);
      return s;
    }
    case WindowPolicy::Mode::adaptive:
      break;
  }

  if (!(policy.rtol > 0.0)) throw DomainError("adaptive window rtol must be positive");
  std::int64_t width = policy.half_width > 0 ? policy.half_width : default_initial_half_width(params);
  if (width < 4) throw DomainError("adaptive window initial half-width must be at least 4");
  // The gap is the convergence monitor, so at least two levels are solved.
  const std::int64_t solve_levels = std::max<std::int64_t>(levels, 2);

  ChargeWindow w = centered_window(params, params.n_g, width);
  WindowedSolution prev = solve_on(params, w, solve_levels, with_ground_vector, tol);
  int doublings = 0;
  while (!covers_full_basis(params, w)) {
    width *= 2;
    if (width > policy.w_max) {
      throw ConvergenceError("adaptive window not converged at w_max = " + std::to_string(policy.w_max),
                             static_cast<double>(width / 2));
    }
    ++doublings;
    w = centered_window(params, params.n_g, width);
    WindowedSolution next = solve_on(params, w, solve_levels, with_ground_vector, tol);
    const double change = relative_change(prev, next, with_ground_vector);
    prev = std::move(next);
    if (change < policy.rtol) break;
  }
  prev.converged = true;
  prev.doublings = doublings;
  prev.spectrum.pairs.resize(static_cast<std::size_t>(std::min(levels, prev.spectrum.dim)));
  return prev;
}

Observable qubit_frequency(const CircuitParams& params, const WindowPolicy& policy) {
  const WindowedSolution s = solve_windowed(params, policy, 2, false);
  if (s.spectrum.pairs.size() < 2) throw DomainError("qubit_frequency: basis has a single state");
  return {s.spectrum.pairs[1].value - s.spectrum.pairs[0].value, s.converged, s.window};
}

Observable expected_imbalance(const CircuitParams& params, const WindowPolicy& policy) {
  const WindowedSolution s = solve_windowed(params, policy, 1, true);
  return {s.ground_charge, s.converged, s.window};
}

double ground_charge(const CircuitParams& params, const ChargeWindow& window, double eig_tol) {
  const TridiagonalHamiltonian h = build_windowed(params, window);
  const EigenPair gs = ground_state(h, eig_tol);
  return charge_expectation(h, *gs.vector);
}

namespace {

struct GroundSample {
  double energy;
  double charge;
};

GroundSample sample_ground(const CircuitParams& params, const ChargeWindow& window, double tol) {
  const TridiagonalHamiltonian h = build_windowed(params, window);
  const EigenPair gs = ground_state(h, tol);
  return {gs.value, charge_expectation(h, *gs.vector)};
}

}  // namespace

Susceptibility charge_susceptibility(const CircuitParams& params, const WindowPolicy& policy, double step) {
  validate(params);
  const double h = step > 0.0 ? step : 1e-4 * std::max(1.0, std::abs(params.n_g));
  const double tol = resolve_tol(params, policy);

  const WindowedSolution center = solve_windowed(params, policy, 2, true);
  const ChargeWindow& w = center.window;

  const auto at = [&](double offset) { return sample_ground(params.with_n_g(params.n_g + offset), w, tol); };
  const GroundSample p1 = at(h), m1 = at(-h), p2 = at(0.5 * h), m2 = at(-0.5 * h);

  const double d_wide = (p1.charge - m1.charge) / (2.0 * h);
  const double d_narrow = (p2.charge - m2.charge) / h;
  const double richardson = (4.0 * d_narrow - d_wide) / 3.0;

  const double e_wide = (p1.energy - m1.energy) / (2.0 * h);
  const double e_narrow = (p2.energy - m2.energy) / h;
  const double energy_slope = (4.0 * e_narrow - e_wide) / 3.0;

  Susceptibility out;
  out.value = richardson;
  out.central_difference = d_wide;
  out.error_estimate = std::abs(richardson - d_narrow);
  out.step = h;
  out.imbalance = center.ground_charge;
  out.hellmann_feynman_residual =
      std::abs(energy_slope + 2.0 * params.e_c * (center.ground_charge - params.n_g));
  out.converged = center.converged;
  out.window = w;
  return out;
}

SweepTable band_sweep(const CircuitParams& base, const std::vector<double>& grid,
                      const SweepRequest& request, const WindowPolicy& policy) {
  validate(base.with_n_g(0.0));
  if (grid.empty()) throw DomainError("band_sweep: grid is empty");
  if (request.levels < 1) throw DomainError("band_sweep: levels must be at least 1");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("band_sweep: grid must be strictly increasing");
  }

  const std::size_t npts = grid.size();
  const auto levels = static_cast<std::size_t>(request.levels);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> bands(levels, std::vector<double>(npts, nan));
  std::vector<double> imbalance(npts, nan), chi(npts, nan), omega(npts, nan);
  std::vector<std::string> failures(npts);

  const auto work = [&](std::size_t i) {
    const CircuitParams p = base.with_n_g(grid[i]);
    try {
      const bool need_vec = request.imbalance && !request.susceptibility;
      const WindowedSolution s =
          solve_windowed(p, policy, std::max<std::int64_t>(request.levels, 2), need_vec);
      for (std::size_t k = 0; k < levels && k < s.spectrum.pairs.size(); ++k) {
        bands[k][i] = s.spectrum.pairs[k].value;
      }
      if (s.spectrum.pairs.size() >= 2) omega[i] = s.spectrum.pairs[1].value - s.spectrum.pairs[0].value;
      if (need_vec) imbalance[i] = s.ground_charge;
      if (request.susceptibility) {
        const Susceptibility x = charge_susceptibility(p, policy);
        chi[i] = x.value;
        imbalance[i] = x.imbalance;
      }
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  };

  unsigned threads = request.threads > 0 ? request.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, npts));
  if (threads <= 1) {
    for (std::size_t i = 0; i < npts; ++i) work(i);
  } else {
    // Each point is computed independently, so the schedule cannot change results.
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < npts; i = next++) work(i);
      });
    }
  }

  SweepTable table;
  table.grid = grid;
  for (std::size_t k = 0; k < levels; ++k) table.add_column("E" + std::to_string(k), std::move(bands[k]));
  if (request.imbalance || request.susceptibility) table.add_column("n_expect", std::move(imbalance));
  if (request.susceptibility) table.add_column("chi", std::move(chi));
  if (request.frequency) table.add_column("omega_q", std::move(omega));

  auto failed = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < npts; ++i) {
    if (!failures[i].empty()) failed.push_back({{"index", i}, {"n_g", grid[i]}, {"error", failures[i]}});
  }
  if (!failed.empty()) {
    std::vector<double> ok(npts, 1.0);
    for (const auto& f : failed) ok[f["index"].get<std::size_t>()] = 0.0;
    table.add_column("ok", std::move(ok));
  }

  table.meta["e_j"] = base.e_j;
  table.meta["e_c"] = base.e_c;
  table.meta["pairs_total"] = base.pairs_total;
  table.meta["window_mode"] = to_string(policy.mode);
  if (policy.mode == WindowPolicy::Mode::fixed) table.meta["window_half_width"] = policy.half_width;
  if (policy.mode == WindowPolicy::Mode::adaptive) {
    table.meta["window_rtol"] = policy.rtol;
    table.meta["window_w_max"] = policy.w_max;
  }
  table.meta["eig_tol"] = resolve_tol(base, policy);
  table.meta["failed_points"] = std::move(failed);
  return table;
}

namespace {

double five_point_second_derivative(double fm2, double fm1, double f0, double fp1, double fp2, double h) {
  return (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
}

template <class F>
Curvature curvature_at_zero(F&& f, double step) {
  if (!(step > 0.0)) throw DomainError("curvature step must be positive");
  const double h = step;
  const double f0 = f(0.0);
  const double fp1 = f(h), fm1 = f(-h), fp2 = f(2.0 * h), fm2 = f(-2.0 * h);
  const double fph = f(0.5 * h), fmh = f(-0.5 * h);

  Curvature c;
  c.step = h;
  c.value = five_point_second_derivative(fm2, fm1, f0, fp1, fp2, h);
  const double fine = five_point_second_derivative(fm1, fmh, f0, fph, fp1, 0.5 * h);
  c.richardson = (16.0 * fine - c.value) / 15.0;
  c.disagreement = std::abs(c.richardson - c.value) / std::max(std::abs(c.richardson),
                                                                std::numeric_limits<double>::min());
  if (c.disagreement > 0.1) {
    c.warnings.push_back("curvature step unstable: Richardson estimate differs by " +
                         std::to_string(100.0 * c.disagreement) + "%");
  }
  return c;
}

void transmon_hint(const CircuitParams& base, std::vector<std::string>& warnings) {
  if (base.ej_over_ec() < 10.0) {
    warnings.push_back("E_J/E_C = " + std::to_string(base.ej_over_ec()) +
                       " is below the transmon regime; the analytic curvature does not apply");
  }
}

}  // namespace

Curvature dispersion_curvature(const CircuitParams& base, const WindowPolicy& policy, double step) {
  validate(base.with_n_g(0.0));
  const double tol = resolve_tol(base, policy);
  const CircuitParams origin = base.with_n_g(0.0);
  // Window converged at the origin, padded by the stencil reach.
  WindowedSolution s = solve_windowed(origin, policy, 2, false);
  ChargeWindow w = s.window;
  if (!covers_full_basis(base, w)) {
    const auto pad = static_cast<std::int64_t>(std::ceil(2.0 * step)) + 1;
    w = {std::max<std::int64_t>(0, w.first - pad), std::min(base.pairs_total, w.last + pad)};
  }
  const auto gap = [&](double ng) {
    const TridiagonalHamiltonian h = build_windowed(base.with_n_g(ng), w);
    const Spectrum sp = lowest_eigenvalues(h, 2, tol);
    return sp.pairs[1].value - sp.pairs[0].value;
  };
  Curvature c = curvature_at_zero(gap, step);
  const double n = base.n_half();
  c.analytic = -std::sqrt(2.0 * base.e_c * base.e_j) / (2.0 * n * n);
  transmon_hint(base, c.warnings);
  return c;
}

Curvature susceptibility_curvature(const CircuitParams& base, const WindowPolicy& policy, double step) {
  validate(base.with_n_g(0.0));
  const WindowedSolution s = solve_windowed(base.with_n_g(0.0), policy, 2, true);
  ChargeWindow w = s.window;
  if (!covers_full_basis(base, w)) {
    const auto pad = static_cast<std::int64_t>(std::ceil(2.0 * step)) + 1;
    w = {std::max<std::int64_t>(0, w.first - pad), std::min(base.pairs_total, w.last + pad)};
  }
  const double tol = resolve_tol(base, policy);

  const auto chi = [&](double ng) {
    const double h = 1e-4 * std::max(1.0, std::abs(ng));
    const auto charge = [&](double x) { return ground_charge(base.with_n_g(x), w, tol); };
    const double d_wide = (charge(ng + h) - charge(ng - h)) / (2.0 * h);
    const double d_narrow = (charge(ng + 0.5 * h) - charge(ng - 0.5 * h)) / h;
    return (4.0 * d_narrow - d_wide) / 3.0;
  };
  Curvature c = curvature_at_zero(chi, step);
  const double n = base.n_half();
  c.analytic = -3.0 * base.e_j / (2.0 * base.e_c * n * n * n * n);
  transmon_hint(base, c.warnings);
  return c;
}

}  // namespace finjj
