#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "finjj/core_model.hpp"

namespace finjj {

inline constexpr std::int64_t default_dense_limit = 4001;

/// Contiguous range of charge states, stored as basis indices k = n + N so
/// that half-integer N needs no special casing. Both ends are inclusive.
struct ChargeWindow {
  std::int64_t first = 0;
  std::int64_t last = 0;

  std::int64_t size() const noexcept { return last - first + 1; }
  bool operator==(const ChargeWindow&) const = default;
};

ChargeWindow full_window(const CircuitParams& params);

// Window given by its charge endpoints; both must be points of the basis.
ChargeWindow charge_window(const CircuitParams& params, double n_lo, double n_hi);

// [c - half_width, c + half_width] around the basis state c nearest `center`,
// clipped to the physical basis.
ChargeWindow centered_window(const CircuitParams& params, double center,
                             std::int64_t half_width);

bool covers_full_basis(const CircuitParams& params, const ChargeWindow& w);

/// Explicitly stored symmetric tridiagonal matrix. `offdiag[i]` couples rows
/// i and i+1.
struct TridiagonalStorage {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;

  std::int64_t dim() const noexcept { return static_cast<std::int64_t>(diagonal.size()); }
  double diag(std::int64_t i) const { return diagonal[static_cast<std::size_t>(i)]; }
  double offdiag(std::int64_t i) const { return off_diagonal[static_cast<std::size_t>(i)]; }
};

/// Charge-basis Hamiltonian E_C (n - n_g)^2 |n><n| - (E_J / 2N) sqrt(N(N+1) - n(n+1))
/// (|n><n+1| + h.c.), restricted to a window. Coefficients are computed on
/// demand, so the full basis of a 10^8-pair island costs no storage.
class TridiagonalHamiltonian {
 public:
  TridiagonalHamiltonian(const CircuitParams& params, const ChargeWindow& window);

  const CircuitParams& params() const noexcept { return params_; }
  const ChargeWindow& window() const noexcept { return window_; }
  std::int64_t dim() const noexcept { return window_.size(); }

  // Charge n of local row i.
  double charge(std::int64_t i) const noexcept {
    return static_cast<double>(window_.first + i) - params_.n_half();
  }

  double diag(std::int64_t i) const noexcept {
    const double d = charge(i) - params_.n_g;
    return params_.e_c * d * d;
  }

  // Coupling between local rows i and i+1.
  double offdiag(std::int64_t i) const noexcept { return coupling(window_.first + i); }

  /// Matrix element <k| H |k+1> for basis index k. Zero at k = 2N and k = -1,
  /// the two physical edges. Uses (N - n)(N + n + 1) = (2N - k)(k + 1), which
  /// stays exact when n is close to +-N.
  double coupling(std::int64_t k) const noexcept {
    const auto upper = static_cast<double>(params_.pairs_total - k);
    const auto lower = static_cast<double>(k + 1);
    if (upper <= 0.0 || lower <= 0.0) return 0.0;
    return -hop_scale_ * std::sqrt(upper * lower);
  }

  // Square of offdiag(i) without the square root, for Sturm sequences.
  double offdiag_squared(std::int64_t i) const noexcept {
    const std::int64_t k = window_.first + i;
    const auto upper = static_cast<double>(params_.pairs_total - k);
    const auto lower = static_cast<double>(k + 1);
    if (upper <= 0.0 || lower <= 0.0) return 0.0;
    return hop_scale_ * hop_scale_ * upper * lower;
  }

  TridiagonalStorage materialize(std::int64_t dense_limit = default_dense_limit) const;

 private:
  CircuitParams params_;
  ChargeWindow window_;
  double hop_scale_;  // E_J / 2N
};

TridiagonalHamiltonian build(const CircuitParams& params);
TridiagonalHamiltonian build_windowed(const CircuitParams& params, const ChargeWindow& window);

/// Writes `n diag offdiag` rows; the last row carries the coupling to the
/// state just outside the window (zero at the physical edge).
void write_table(std::ostream& out, const TridiagonalHamiltonian& h);

/// Spin operators of total spin N in the charge basis, rows ordered by
/// ascending n.
struct SpinMatrices {
  Eigen::MatrixXcd sx;
  Eigen::MatrixXcd sy;
  Eigen::MatrixXcd sz;
};

SpinMatrices spin_matrices(std::int64_t pairs_total,
                           std::int64_t dense_limit = default_dense_limit);

// E_C (S_z - n_g)^2 - (E_J / N) S_x assembled from dense spin matrices.
Eigen::MatrixXcd spin_hamiltonian(const CircuitParams& params,
                                  std::int64_t dense_limit = default_dense_limit);

}  // namespace finjj
