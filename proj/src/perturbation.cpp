#include "finjj/perturbation.hpp"

#include <cmath>

#include "finjj/errors.hpp"

namespace finjj {

using wick::Complex;
using wick::OperatorPoly;

namespace {

// Position of n_g in basis units, k = n_g + N.
double basis_coordinate(const CircuitParams& params) { return params.n_g + params.n_half(); }

void require_degeneracy_point(const CircuitParams& params, const char* who) {
  validate(params);
  if (!is_degeneracy_point(params)) {
    throw DomainError(std::string(who) + ": n_g = " + std::to_string(params.n_g) +
                      " is not a degeneracy point in {-N+1/2, ..., N-1/2}");
  }
}

void cpb_regime_warning(const CircuitParams& params, std::vector<std::string>& warnings) {
  if (params.ej_over_ec() >= 0.1) {
    warnings.push_back("E_J/E_C = " + std::to_string(params.ej_over_ec()) +
                       " is outside the Cooper-pair-box regime (< 0.1)");
  }
}

void transmon_regime_warning(const CircuitParams& params, std::vector<std::string>& warnings) {
  const double ratio = params.ej_over_ec();
  const double n = params.n_half();
  if (!(ratio > 10.0)) {
    warnings.push_back("E_J/E_C = " + std::to_string(ratio) + " is below the transmon regime (> 10)");
  }
  if (!(ratio < n * n / 100.0)) {
    warnings.push_back("E_J/E_C = " + std::to_string(ratio) + " is not small against N^2/100 = " +
                       std::to_string(n * n / 100.0));
  }
}

}  // namespace

Eigen::Matrix2d TwoLevelEffective::matrix() const {
  Eigen::Matrix2d m;
  m << diag_floor, sigma_x_coeff, sigma_x_coeff, diag_ceil;
  return m;
}

double TwoLevelEffective::gap() const {
  const double half_split = 0.5 * (diag_floor - diag_ceil);
  return 2.0 * std::hypot(half_split, sigma_x_coeff);
}

double TwoLevelEffective::expected_charge() const {
  const double half_split = 0.5 * (diag_floor - diag_ceil);
  const double r = std::hypot(half_split, sigma_x_coeff);
  // Weight on |ceil> minus weight on |floor> in the ground state.
  const double polarization = r > 0.0 ? half_split / r : 0.0;
  return 0.5 * (floor_n + ceil_n) + 0.5 * (ceil_n - floor_n) * polarization;
}

bool is_degeneracy_point(const CircuitParams& params) {
  const double k = basis_coordinate(params);
  const double top = static_cast<double>(params.pairs_total);
  if (!(k > 0.0 && k < top)) return false;
  const double frac = k - std::floor(k);
  return std::abs(frac - 0.5) <= degeneracy_tolerance * std::max(1.0, std::abs(k));
}

TwoLevelEffective cpb_effective(const CircuitParams& params) {
  validate(params);
  const double k = basis_coordinate(params);
  const double top = static_cast<double>(params.pairs_total);
  if (!(k > 0.0 && k < top)) {
    throw DomainError("cpb_effective: n_g must lie strictly inside (-N, N)");
  }
  if (std::abs(k - std::round(k)) <= degeneracy_tolerance * std::max(1.0, std::abs(k))) {
    throw DomainError("cpb_effective: n_g coincides with a basis charge; no two-state degeneracy");
  }
  const double n_half = params.n_half();
  TwoLevelEffective t;
  t.floor_n = std::floor(k) - n_half;
  t.ceil_n = t.floor_n + 1.0;
  const double kf = std::floor(k);
  // N(N+1) - floor*ceil = (2N - kf)(kf + 1) with floor = kf - N.
  t.sigma_x_coeff = -(params.e_j / (2.0 * n_half)) * std::sqrt((top - kf) * (kf + 1.0));
  t.diag_floor = params.e_c * (t.floor_n - params.n_g) * (t.floor_n - params.n_g);
  t.diag_ceil = params.e_c * (t.ceil_n - params.n_g) * (t.ceil_n - params.n_g);
  return t;
}

AnalyticValue cpb_gap(const CircuitParams& params) {
  require_degeneracy_point(params, "cpb_gap");
  const double two_n = static_cast<double>(params.pairs_total);
  AnalyticValue out;
  out.value = (params.e_j / two_n) * std::sqrt((1.0 + two_n) * (1.0 + two_n) - 4.0 * params.n_g * params.n_g);
  cpb_regime_warning(params, out.warnings);
  return out;
}

AnalyticValue cpb_susceptibility(const CircuitParams& params) {
  require_degeneracy_point(params, "cpb_susceptibility");
  const double two_n = static_cast<double>(params.pairs_total);
  AnalyticValue out;
  out.value = two_n * params.e_c /
              (params.e_j * std::sqrt((1.0 + two_n) * (1.0 + two_n) - 4.0 * params.n_g * params.n_g));
  cpb_regime_warning(params, out.warnings);
  return out;
}

BogoliubovCoeffs bogoliubov(const CircuitParams& params) {
  validate(params);
  const double n = params.n_half();
  const double ej = params.e_j;
  const double ec = params.e_c;
  BogoliubovCoeffs c;
  c.epsilon = std::sqrt(2.0 * ec * ej + ej * ej / (n * n));
  const double norm = std::sqrt(4.0 * n * c.epsilon * ej);
  c.u_plus = (ej + n * c.epsilon) / norm;
  c.u_minus = (ej - n * c.epsilon) / norm;
  c.u_0 = params.n_g * std::sqrt(2.0 * ec * ec * ej / (c.epsilon * c.epsilon * c.epsilon));
  return c;
}

AnalyticValue transmon_frequency(const CircuitParams& params) {
  validate(params);
  AnalyticValue out;
  const double r = params.n_g / static_cast<double>(params.pairs_total);
  out.value = std::sqrt(2.0 * params.e_c * params.e_j) * (1.0 - r * r);
  transmon_regime_warning(params, out.warnings);
  if (std::abs(params.n_g) >= params.n_half()) {
    out.warnings.push_back("|n_g| >= N: saturation regime, first-order result not claimed");
  }
  return out;
}

AnalyticValue transmon_susceptibility(const CircuitParams& params) {
  validate(params);
  AnalyticValue out;
  const double n = params.n_half();
  out.value = 1.0 - 3.0 * params.e_j * params.n_g * params.n_g / (4.0 * params.e_c * n * n * n * n);
  transmon_regime_warning(params, out.warnings);
  if (std::abs(params.n_g) >= n) {
    out.warnings.push_back("|n_g| >= N: saturation regime, first-order result not claimed");
  }
  return out;
}

OperatorPoly delta_sz_first_order(double n_half) {
  const OperatorPoly a = OperatorPoly::lower();
  const OperatorPoly ad = OperatorPoly::raise();
  return ad * wick::momentum() * a * Complex(-1.0 / std::sqrt(16.0 * n_half));
}

OperatorPoly delta_h_first_order(const CircuitParams& params) {
  const double n = params.n_half();
  const OperatorPoly p = wick::momentum();
  const OperatorPoly p_shifted = p - OperatorPoly::scalar(params.n_g / std::sqrt(n));
  // E_C [sqrt(N) p' dS_z + h.c.] with sqrt(N) dS_z = -(1/4) a^dag p a
  const OperatorPoly x = p_shifted * OperatorPoly::raise() * p * OperatorPoly::lower();
  return (x + x.adjoint()) * Complex(-0.25 * params.e_c);
}

OperatorPoly h0_transmon(const CircuitParams& params) {
  const double n = params.n_half();
  const OperatorPoly q = wick::momentum() * Complex(std::sqrt(n)) - OperatorPoly::scalar(params.n_g);
  return q * q * Complex(params.e_c) -
         (OperatorPoly::scalar(n) - wick::number()) * Complex(params.e_j / n);
}

FirstOrderTransmon transmon_first_order_numeric(const CircuitParams& params) {
  validate(params);
  FirstOrderTransmon out;
  transmon_regime_warning(params, out.warnings);
  const double n = params.n_half();
  const BogoliubovCoeffs c = bogoliubov(params);
  out.coeffs = c;

  const OperatorPoly b = OperatorPoly::lower();
  const OperatorPoly bd = OperatorPoly::raise();

  const OperatorPoly dh = wick::substitute_affine(delta_h_first_order(params), c);
  out.freq = c.epsilon + wick::vacuum_expectation(b * dh * bd).real() - wick::vacuum_expectation(dh).real();

  const OperatorPoly sqrt_n_p = wick::substitute_affine(wick::momentum() * Complex(std::sqrt(n)), c);
  const OperatorPoly dsz = wick::substitute_affine(delta_sz_first_order(n), c);

  const OperatorPoly p_shifted = wick::momentum() - OperatorPoly::scalar(params.n_g / std::sqrt(n));
  const OperatorPoly x = p_shifted * OperatorPoly::raise() * wick::momentum() * OperatorPoly::lower();
  const OperatorPoly y = wick::substitute_affine(x + x.adjoint(), c);

  // |d psi_0> = (E_C / 4 eps) sum_k (b^dag)^k |0> <0| b^k Y |0> / (k! k)
  Complex correction{};
  OperatorPoly bd_k = OperatorPoly::identity();
  OperatorPoly b_k = OperatorPoly::identity();
  double factorial = 1.0;
  for (int k = 1; k <= 4; ++k) {
    bd_k = bd_k * bd;
    b_k = b_k * b;
    factorial *= k;
    const Complex overlap = wick::vacuum_expectation(sqrt_n_p * bd_k);
    const Complex amplitude = wick::vacuum_expectation(b_k * y);
    correction += overlap * amplitude / (factorial * k);
  }
  correction *= params.e_c / (4.0 * c.epsilon);

  out.imbalance = wick::vacuum_expectation(sqrt_n_p).real() + wick::vacuum_expectation(dsz).real() +
                  2.0 * correction.real();
  return out;
}

}  // namespace finjj
