#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "finjj/charge_hamiltonian.hpp"
#include "finjj/core_model.hpp"
#include "finjj/eigensolve.hpp"
#include "finjj/sweep_table.hpp"

namespace finjj {

/// How much of the charge basis to diagonalize.
///
/// `adaptive` starts from a window of half-width `half_width` (0 picks
/// max(16, ceil(8 (E_J / 8 E_C)^(1/4)))) around the basis state nearest n_g
/// and doubles it until the qubit frequency (and, when eigenvectors are
/// used, <n>) changes by less than `rtol`. It fails past `w_max`.
struct WindowPolicy {
  enum class Mode { full, fixed, adaptive };

  Mode mode = Mode::adaptive;
  std::int64_t half_width = 0;
  std::int64_t w_max = std::int64_t{1} << 24;
  double rtol = 1e-9;
  double eig_tol = 0.0;  // 0 selects default_eig_tol()

  static WindowPolicy full() { return {Mode::full}; }
  static WindowPolicy fixed(std::int64_t w) { return {Mode::fixed, w}; }
  static WindowPolicy adaptive(double rtol = 1e-9) {
    WindowPolicy p;
    p.rtol = rtol;
    return p;
  }
};

std::string to_string(WindowPolicy::Mode mode);

std::int64_t default_initial_half_width(const CircuitParams& params);
double default_eig_tol(const CircuitParams& params);

struct WindowedSolution {
  Spectrum spectrum;  // eigenvector only for the ground state, when requested
  ChargeWindow window;
  bool converged = false;
  int doublings = 0;
  double ground_charge = 0.0;  // <n>, when the ground vector was requested
};

/// Lowest `levels` eigenvalues under a window policy.
WindowedSolution solve_windowed(const CircuitParams& params, const WindowPolicy& policy,
                                std::int64_t levels, bool with_ground_vector);

struct Observable {
  double value = 0.0;
  bool converged = false;
  ChargeWindow window;
};

// hbar omega_q = E_1 - E_0.
Observable qubit_frequency(const CircuitParams& params, const WindowPolicy& policy = {});

// <psi_0| n |psi_0>.
Observable expected_imbalance(const CircuitParams& params, const WindowPolicy& policy = {});

// Ground-state <n> on a fixed window.
double ground_charge(const CircuitParams& params, const ChargeWindow& window, double eig_tol);

struct Susceptibility {
  double value = 0.0;               // Richardson-extrapolated central difference
  double central_difference = 0.0;  // plain central difference with step h
  double error_estimate = 0.0;
  double step = 0.0;
  // |dE_0/dn_g + 2 E_C (<n> - n_g)|, finite difference against Hellmann-Feynman.
  double hellmann_feynman_residual = 0.0;
  double imbalance = 0.0;  // <n> at n_g
  bool converged = false;
  ChargeWindow window;
};

/// d<n>/dn_g by central differences with one Richardson level. step <= 0
/// selects h = 1e-4 max(1, |n_g|). All stencil points share the window found
/// at n_g.
Susceptibility charge_susceptibility(const CircuitParams& params, const WindowPolicy& policy = {},
                                     double step = 0.0);

struct SweepRequest {
  std::int64_t levels = 3;
  bool imbalance = false;
  bool susceptibility = false;
  bool frequency = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Tabulates band energies (and optional <n>, d<n>/dn_g, omega_q) over an
/// n_g grid; `base.n_g` is ignored. Points that fail are kept with NaN values
/// and listed in the table's meta block.
SweepTable band_sweep(const CircuitParams& base, const std::vector<double>& grid,
                      const SweepRequest& request, const WindowPolicy& policy = {});

struct Curvature {
  double value = 0.0;       // 5-point stencil with step h
  double richardson = 0.0;  // extrapolation from steps h and h/2
  double disagreement = 0.0;
  double analytic = 0.0;
  double step = 0.0;
  std::vector<std::string> warnings;

  double ratio() const { return value / analytic; }
};

inline constexpr double default_curvature_step = 0.125;

/// d^2(hbar omega_q)/dn_g^2 at n_g = 0, compared with -sqrt(2 E_C E_J) / (2 N^2).
Curvature dispersion_curvature(const CircuitParams& base, const WindowPolicy& policy = {},
                               double step = default_curvature_step);

/// d^2(d<n>/dn_g)/dn_g^2 at n_g = 0, compared with -3 E_J / (2 E_C N^4).
Curvature susceptibility_curvature(const CircuitParams& base, const WindowPolicy& policy = {},
                                   double step = default_curvature_step);

}  // namespace finjj
