#include "finjj/charge_hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <complex>
#include <ostream>
#include <string>

#include "finjj/errors.hpp"

namespace finjj {

namespace {

// Basis index of charge n, or throws if n is not a basis point.
std::int64_t basis_index(const CircuitParams& params, double n) {
  const double k = n + params.n_half();
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 * std::max(1.0, std::abs(k))) {
    throw DomainError("charge " + std::to_string(n) + " is not a point of the basis");
  }
  if (rounded < 0.0 || rounded > static_cast<double>(params.pairs_total)) {
    throw DomainError("charge " + std::to_string(n) + " lies outside [-N, N]");
  }
  return static_cast<std::int64_t>(rounded);
}

}  // namespace

ChargeWindow full_window(const CircuitParams& params) { return {0, params.pairs_total}; }

ChargeWindow charge_window(const CircuitParams& params, double n_lo, double n_hi) {
  validate(params);
  const ChargeWindow w{basis_index(params, n_lo), basis_index(params, n_hi)};
  if (w.first > w.last) throw DomainError("charge window has n_lo > n_hi");
  return w;
}

ChargeWindow centered_window(const CircuitParams& params, double center, std::int64_t half_width) {
  validate(params);
  if (half_width < 0) throw DomainError("window half-width must be non-negative");
  const double top = static_cast<double>(params.pairs_total);
  const double k = std::clamp(std::round(center + params.n_half()), 0.0, top);
  const auto kc = static_cast<std::int64_t>(k);
  return {std::max<std::int64_t>(0, kc - half_width),
          std::min<std::int64_t>(params.pairs_total, kc + half_width)};
}

bool covers_full_basis(const CircuitParams& params, const ChargeWindow& w) {
  return w.first == 0 && w.last == params.pairs_total;
}

TridiagonalHamiltonian::TridiagonalHamiltonian(const CircuitParams& params, const ChargeWindow& window)
    : params_(params), window_(window), hop_scale_(0.0) {
  validate(params_);
  if (window_.first < 0 || window_.last > params_.pairs_total || window_.first > window_.last) {
    throw DomainError("charge window [" + std::to_string(window_.first) + ", " +
                      std::to_string(window_.last) + "] (basis indices) is outside [0, 2N]");
  }
  hop_scale_ = params_.e_j / static_cast<double>(params_.pairs_total);
}

TridiagonalStorage TridiagonalHamiltonian::materialize(std::int64_t dense_limit) const {
  if (dim() > dense_limit) {
    throw CapacityError("materialize: dimension " + std::to_string(dim()) +
                        " exceeds limit " + std::to_string(dense_limit));
  }
  TridiagonalStorage t;
  const auto n = static_cast<std::size_t>(dim());
  t.diagonal.resize(n);
  t.off_diagonal.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) t.diagonal[i] = diag(static_cast<std::int64_t>(i));
  for (std::size_t i = 0; i + 1 < n; ++i) t.off_diagonal[i] = offdiag(static_cast<std::int64_t>(i));
  return t;
}

TridiagonalHamiltonian build(const CircuitParams& params) {
  validate(params);
  return TridiagonalHamiltonian(params, full_window(params));
}

TridiagonalHamiltonian build_windowed(const CircuitParams& params, const ChargeWindow& window) {
  return TridiagonalHamiltonian(params, window);
}

void write_table(std::ostream& out, const TridiagonalHamiltonian& h) {
  char buf[128];
  out << "# n diag offdiag\n";
  for (std::int64_t i = 0; i < h.dim(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", h.charge(i), h.diag(i),
                  h.coupling(h.window().first + i));
    out << buf;
  }
}

SpinMatrices spin_matrices(std::int64_t pairs_total, std::int64_t dense_limit) {
  if (pairs_total < 1) throw DomainError("spin_matrices: 2N must be at least 1");
  const std::int64_t dim = pairs_total + 1;
  if (dim > dense_limit) {
    throw CapacityError("spin_matrices: dimension " + std::to_string(dim) +
                        " exceeds dense limit " + std::to_string(dense_limit));
  }
  const double big_n = 0.5 * static_cast<double>(pairs_total);
  const auto n = static_cast<Eigen::Index>(dim);
  using cd = std::complex<double>;

  // S_+ |n> = sqrt(N(N+1) - n(n+1)) |n+1>
  Eigen::MatrixXcd raise = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sz(k, k) = static_cast<double>(k) - big_n;
    if (k + 1 < n) {
      raise(k + 1, k) = std::sqrt(static_cast<double>(pairs_total - k) * static_cast<double>(k + 1));
    }
  }
  const Eigen::MatrixXcd lower = raise.adjoint();
  SpinMatrices s;
  s.sx = 0.5 * (raise + lower);
  s.sy = (raise - lower) / cd(0.0, 2.0);
  s.sz = std::move(sz);
  return s;
}

Eigen::MatrixXcd spin_hamiltonian(const CircuitParams& params, std::int64_t dense_limit) {
  validate(params);
  const SpinMatrices s = spin_matrices(params.pairs_total, dense_limit);
  const auto n = s.sz.rows();
  const Eigen::MatrixXcd shifted = s.sz - params.n_g * Eigen::MatrixXcd::Identity(n, n);
  return params.e_c * shifted * shifted - (params.e_j / params.n_half()) * s.sx;
}

}  // namespace finjj
