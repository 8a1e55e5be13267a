#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "finjj/core_model.hpp"
#include "finjj/wick.hpp"

namespace finjj {

using wick::BogoliubovCoeffs;

/// A closed-form value together with any regime warnings. Warnings flag use
/// outside the asymptotic regime where the formula is claimed, not errors.
struct AnalyticValue {
  double value = 0.0;
  std::vector<std::string> warnings;
};

/// Two-level Hamiltonian on span{|floor n_g>, |ceil n_g>}, where floor and
/// ceil are the neighbouring basis charges below and above n_g.
struct TwoLevelEffective {
  double floor_n = 0.0;
  double ceil_n = 0.0;
  double sigma_x_coeff = 0.0;  // -(E_J/2N) sqrt(N(N+1) - floor*ceil)
  double diag_floor = 0.0;     // E_C (floor - n_g)^2
  double diag_ceil = 0.0;      // E_C (ceil - n_g)^2

  Eigen::Matrix2d matrix() const;
  double gap() const;
  // Ground-state <n> of the two-level problem.
  double expected_charge() const;
};

// Basis-relative tolerance for "n_g is a degeneracy point".
inline constexpr double degeneracy_tolerance = 1e-9;

/// True when n_g sits halfway between two neighbouring basis charges inside
/// (-N, N).
bool is_degeneracy_point(const CircuitParams& params);

TwoLevelEffective cpb_effective(const CircuitParams& params);

// (E_J/2N) sqrt((1+2N)^2 - 4 n_g^2); only at degeneracy points.
AnalyticValue cpb_gap(const CircuitParams& params);

// 2N E_C / (E_J sqrt((1+2N)^2 - 4 n_g^2)); only at degeneracy points.
AnalyticValue cpb_susceptibility(const CircuitParams& params);

/// Level spacing eps = sqrt(2 E_C E_J + E_J^2 / N^2) and the affine
/// Bogoliubov coefficients u_+- = (E_J +- N eps) / sqrt(4 N eps E_J),
/// u_0 = n_g sqrt(2 E_C^2 E_J / eps^3).
BogoliubovCoeffs bogoliubov(const CircuitParams& params);

// sqrt(2 E_C E_J) (1 - (n_g / 2N)^2).
AnalyticValue transmon_frequency(const CircuitParams& params);

// 1 - 3 E_J n_g^2 / (4 E_C N^4).
AnalyticValue transmon_susceptibility(const CircuitParams& params);

struct FirstOrderTransmon {
  double freq = 0.0;       // eps + <b dH b^dag> - <dH>
  double imbalance = 0.0;  // first-order <n> in the Bogoliubov vacuum
  BogoliubovCoeffs coeffs;
  std::vector<std::string> warnings;
};

/// Evaluates the first-order transmon corrections with the Wick engine. The
/// square root in the Holstein-Primakoff S_z is truncated at first order,
/// dS_z = -a^dag p a / sqrt(16N), the dS_z^2 term is dropped, and the state
/// correction is summed over one to four Bogoliubov quanta.
FirstOrderTransmon transmon_first_order_numeric(const CircuitParams& params);

// The ladder polynomials used above, in the a frame.
wick::OperatorPoly delta_sz_first_order(double n_half);
wick::OperatorPoly delta_h_first_order(const CircuitParams& params);
// E_C (sqrt(N) p - n_g)^2 - (E_J/N)(N - a^dag a)
wick::OperatorPoly h0_transmon(const CircuitParams& params);

}  // namespace finjj
