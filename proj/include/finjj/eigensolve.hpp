#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "finjj/charge_hamiltonian.hpp"
#include "finjj/errors.hpp"

namespace finjj {

/// Anything exposing a symmetric tridiagonal matrix element by element.
/// `offdiag(i)` couples rows i and i+1.
template <class Op>
concept SymmetricTridiagonal = requires(const Op& op, std::int64_t i) {
  { op.dim() } -> std::convertible_to<std::int64_t>;
  { op.diag(i) } -> std::convertible_to<double>;
  { op.offdiag(i) } -> std::convertible_to<double>;
};

struct EigenPair {
  double value = 0.0;
  std::optional<std::vector<double>> vector;  // unit norm when present
  double residual = std::numeric_limits<double>::quiet_NaN();  // ||H v - value v||
  bool near_degenerate = false;
};

/// Lowest eigenpairs in ascending order (E_0 <= E_1 <= ...).
struct Spectrum {
  std::vector<EigenPair> pairs;
  std::int64_t dim = 0;
  bool converged = true;
  std::vector<std::string> warnings;

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(pairs.size());
    for (const auto& p : pairs) v.push_back(p.value);
    return v;
  }
};

struct EigensolveOptions {
  int max_bisection_steps = 400;
  int max_inverse_iterations = 50;
  // Levels closer than this (times the matrix scale) are re-orthogonalized.
  double cluster_gap = 1e-8;
};

namespace detail {

template <SymmetricTridiagonal Op>
double offdiag_sq(const Op& h, std::int64_t i) {
  if constexpr (requires { h.offdiag_squared(i); }) {
    return h.offdiag_squared(i);
  } else {
    const double e = h.offdiag(i);
    return e * e;
  }
}

}  // namespace detail

struct GershgorinBounds {
  double lower = 0.0;
  double upper = 0.0;
  double max_offdiag_sq = 0.0;

  double scale() const { return std::max(std::abs(lower), std::abs(upper)); }
};

/// Spectrum enclosure [min diag - 2 max|e|, max diag + 2 max|e|].
template <SymmetricTridiagonal Op>
GershgorinBounds gershgorin(const Op& h) {
  const std::int64_t n = h.dim();
  double dmin = h.diag(0);
  double dmax = dmin;
  double emax_sq = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = h.diag(i);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
    if (i + 1 < n) emax_sq = std::max(emax_sq, detail::offdiag_sq(h, i));
  }
  const double radius = 2.0 * std::sqrt(emax_sq);
  GershgorinBounds b{dmin - radius, dmax + radius, emax_sq};
  // Widen by a few ulps so the ends are strict bounds after rounding.
  const double pad = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, b.scale());
  b.lower -= pad;
  b.upper += pad;
  return b;
}

inline double pivot_floor(const GershgorinBounds& b) {
  return std::numeric_limits<double>::min() * std::max(1.0, b.max_offdiag_sq);
}

/// Number of eigenvalues strictly below x, from the signs of the LDL^T pivots
/// of H - x. Pivots smaller than `pivmin` are clamped to -pivmin.
template <SymmetricTridiagonal Op>
std::int64_t sturm_count(const Op& h, double x, double pivmin) {
  const std::int64_t n = h.dim();
  std::int64_t count = 0;
  double q = h.diag(0) - x;
  if (std::abs(q) <= pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::int64_t i = 1; i < n; ++i) {
    q = h.diag(i) - x - detail::offdiag_sq(h, i - 1) / q;
    if (std::abs(q) <= pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

template <SymmetricTridiagonal Op>
std::int64_t sturm_count(const Op& h, double x) {
  return sturm_count(h, x, pivot_floor(gershgorin(h)));
}

/// Lowest k eigenvalues by Sturm-sequence bisection. Each value lies within
/// `tol` of a true eigenvalue, certified by the counts at its bracket ends.
/// Memory use does not depend on the dimension.
template <SymmetricTridiagonal Op>
Spectrum lowest_eigenvalues(const Op& h, std::int64_t k, double tol,
                            const EigensolveOptions& opts = {}) {
  const std::int64_t n = h.dim();
  if (n < 1) throw DomainError("lowest_eigenvalues: empty operator");
  if (k < 1 || k > n) throw DomainError("lowest_eigenvalues: k must be in [1, dim]");
  if (!(tol > 0.0)) throw DomainError("lowest_eigenvalues: tol must be positive");

  const GershgorinBounds bounds = gershgorin(h);
  const double pivmin = pivot_floor(bounds);
  const auto uk = static_cast<std::size_t>(k);

  // lo[j] has count <= j, hi[j] has count >= j + 1.
  std::vector<double> lo(uk, bounds.lower);
  std::vector<double> hi(uk, bounds.upper);

  Spectrum out;
  out.dim = n;
  out.pairs.resize(uk);
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t j = 0; j < uk; ++j) {
    if (j > 0) lo[j] = std::max(lo[j], lo[j - 1]);
    int steps = 0;
    for (;;) {
      const double width = hi[j] - lo[j];
      const double floor = 2.0 * eps * std::max(std::abs(lo[j]), std::abs(hi[j])) + pivmin;
      if (width <= std::max(tol, floor)) break;
      if (++steps > opts.max_bisection_steps) {
        throw ConvergenceError("lowest_eigenvalues: bisection iteration cap reached", width);
      }
      const double mid = 0.5 * (lo[j] + hi[j]);
      if (mid <= lo[j] || mid >= hi[j]) break;
      const std::int64_t c = sturm_count(h, mid, pivmin);
      // Every bracket still open learns from this count.
      for (std::size_t m = j; m < uk; ++m) {
        if (static_cast<std::int64_t>(m) < c) {
          hi[m] = std::min(hi[m], mid);
        } else {
          lo[m] = std::max(lo[m], mid);
        }
      }
    }
    out.pairs[j].value = 0.5 * (lo[j] + hi[j]);
  }
  return out;
}

namespace detail {

// LU with partial pivoting of a shifted symmetric tridiagonal matrix, in the
// layout of LAPACK's dgttrf.
class ShiftedTridiagonalLU {
 public:
  ShiftedTridiagonalLU(const std::vector<double>& d, const std::vector<double>& e,
                       double shift, double tiny)
      : n_(d.size()), dl_(e), d_(d), du_(e), du2_(n_ > 2 ? n_ - 2 : 0, 0.0), pivot_(n_, false) {
    for (auto& x : d_) x -= shift;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == 0.0) d_[i] = tiny;
        const double fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        const double fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const double temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        pivot_[i] = true;
      }
    }
    for (auto& x : d_) {
      if (std::abs(x) < tiny) x = std::copysign(tiny, x == 0.0 ? 1.0 : x);
    }
  }

  void solve(std::vector<double>& b) const {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (!pivot_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl_[i] * b[i];
      }
    }
    b[n_ - 1] /= d_[n_ - 1];
    if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
    for (std::size_t ii = n_ >= 2 ? n_ - 2 : 0; ii-- > 0;) {
      b[ii] = (b[ii] - du_[ii] * b[ii + 1] - du2_[ii] * b[ii + 2]) / d_[ii];
    }
  }

 private:
  std::size_t n_;
  std::vector<double> dl_, d_, du_, du2_;
  std::vector<bool> pivot_;
};

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double residual_norm(const std::vector<double>& d, const std::vector<double>& e,
                            const std::vector<double>& v, double lambda) {
  const std::size_t n = d.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (d[i] - lambda) * v[i];
    if (i > 0) r += e[i - 1] * v[i - 1];
    if (i + 1 < n) r += e[i] * v[i + 1];
    s += r * r;
  }
  return std::sqrt(s);
}

// Deterministic start vector; splitmix64 keeps it identical on every platform.
inline std::vector<double> start_vector(std::size_t n, std::size_t level) {
  std::vector<double> v(n, 1.0);
  if (level == 0) return v;
  std::uint64_t state = 0x9E3779B97F4A7C15ULL * (level + 1);
  for (auto& x : v) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    x = static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
  }
  return v;
}

// Flip so that the largest-magnitude component is positive.
inline void normalize_sign(std::vector<double>& v) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  }
  if (v[imax] < 0.0) {
    for (auto& x : v) x = -x;
  }
}

// Ground vector for a tridiagonal with non-positive off-diagonals. The shift
// sigma sits certifiably below E_0, so H - sigma is a positive definite
// M-matrix: its LDL^T pivots are positive and both substitutions add terms of
// one sign. Every iterate is therefore nonnegative and each component carries
// relative accuracy. Components vanish only by underflow in the tails.
// Returns false when the pivots are not all positive.
inline bool positive_ground_vector(const std::vector<double>& d, const std::vector<double>& e, double sigma,
                                   int max_iterations, double lambda, double target, std::vector<double>& v,
                                   double& res) {
  const std::size_t n = d.size();
  std::vector<double> piv(n);
  piv[0] = d[0] - sigma;
  if (!(piv[0] > 0.0)) return false;
  for (std::size_t i = 1; i < n; ++i) {
    piv[i] = d[i] - sigma - e[i - 1] * e[i - 1] / piv[i - 1];
    if (!(piv[i] > 0.0) || !std::isfinite(piv[i])) return false;
  }
  // Iterate past the residual test until every component settles in relative
  // terms; the tails lag because they start out swamped by other levels.
  constexpr double settle = 16.0 * std::numeric_limits<double>::epsilon();
  v.assign(n, 1.0);
  std::vector<double> prev;
  bool small_residual = false;
  for (int it = 0; it < max_iterations; ++it) {
    prev = v;
    for (std::size_t i = 1; i < n; ++i) v[i] -= (e[i - 1] / piv[i - 1]) * v[i - 1];
    v[n - 1] /= piv[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) v[i] = (v[i] - e[i] * v[i + 1]) / piv[i];
    const double nv = norm2(v);
    if (!(nv > 0.0) || !std::isfinite(nv)) return false;
    for (auto& x : v) x /= nv;
    res = residual_norm(d, e, v, lambda);
    small_residual = res <= target;
    bool settled = small_residual;
    for (std::size_t i = 0; i < n && settled; ++i) {
      settled = std::abs(v[i] - prev[i]) <= settle * v[i] + std::numeric_limits<double>::min();
    }
    if (settled) return true;
  }
  return small_residual;
}

}  // namespace detail

/// Lowest k eigenpairs: bisection for the values, then inverse iteration
/// seeded at each value. Needs O(dim) storage per returned vector.
template <SymmetricTridiagonal Op>
Spectrum lowest_eigenpairs(const Op& h, std::int64_t k, double tol,
                           const EigensolveOptions& opts = {}) {
  Spectrum spec = lowest_eigenvalues(h, k, tol, opts);
  const auto n = static_cast<std::size_t>(h.dim());

  std::vector<double> d(n);
  std::vector<double> e(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) d[i] = h.diag(static_cast<std::int64_t>(i));
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = h.offdiag(static_cast<std::int64_t>(i));

  const GershgorinBounds bounds = gershgorin(h);
  const double scale = std::max(bounds.scale(), std::numeric_limits<double>::min());
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double tiny = eps * scale;
  const double target = std::max(2.0 * tol, 64.0 * eps * scale * std::sqrt(static_cast<double>(n)));

  for (std::size_t j = 0; j < spec.pairs.size(); ++j) {
    auto& pair = spec.pairs[j];
    if (n == 1) {
      pair.vector = std::vector<double>{1.0};
      pair.residual = std::abs(d[0] - pair.value);
      continue;
    }
    if (j == 0 && std::all_of(e.begin(), e.end(), [](double x) { return x <= 0.0; })) {
      double shift = std::max(tol, tiny);
      while (shift < scale && sturm_count(h, pair.value - shift) > 0) shift *= 2.0;
      std::vector<double> v;
      double res = 0.0;
      if (detail::positive_ground_vector(d, e, pair.value - shift, opts.max_inverse_iterations, pair.value, target,
                                         v, res)) {
        pair.vector = std::move(v);
        pair.residual = res;
        continue;
      }
    }
    // Earlier vectors whose values are clustered with this one.
    std::vector<std::size_t> cluster;
    for (std::size_t i = 0; i < j; ++i) {
      if (std::abs(spec.pairs[i].value - pair.value) < opts.cluster_gap * scale) cluster.push_back(i);
    }
    const detail::ShiftedTridiagonalLU lu(d, e, pair.value, tiny);
    std::vector<double> v = detail::start_vector(n, j);
    double res = std::numeric_limits<double>::infinity();
    bool done = false;
    for (int it = 0; it < opts.max_inverse_iterations && !done; ++it) {
      lu.solve(v);
      for (std::size_t i : cluster) {
        const auto& u = *spec.pairs[i].vector;
        double dot = 0.0;
        for (std::size_t m = 0; m < n; ++m) dot += u[m] * v[m];
        for (std::size_t m = 0; m < n; ++m) v[m] -= dot * u[m];
      }
      const double nv = detail::norm2(v);
      if (!(nv > 0.0) || !std::isfinite(nv)) {
        throw ConvergenceError("lowest_eigenpairs: inverse iteration broke down", res);
      }
      for (auto& x : v) x /= nv;
      res = detail::residual_norm(d, e, v, pair.value);
      done = res <= target;
    }
    if (!done) {
      spec.converged = false;
      spec.warnings.push_back("inverse iteration for level " + std::to_string(j) +
                              " stopped at residual " + std::to_string(res));
    }
    detail::normalize_sign(v);
    pair.vector = std::move(v);
    pair.residual = res;
  }
  return spec;
}

/// Ground state with its eigenvector. Flags the vector as ill-conditioned when
/// E_1 - E_0 < 10 tol.
template <SymmetricTridiagonal Op>
EigenPair ground_state(const Op& h, double tol, const EigensolveOptions& opts = {}) {
  const std::int64_t levels = std::min<std::int64_t>(2, h.dim());
  Spectrum spec = lowest_eigenvalues(h, levels, tol, opts);
  Spectrum one = lowest_eigenpairs(h, 1, tol, opts);
  EigenPair gs = std::move(one.pairs.front());
  if (levels == 2 && spec.pairs[1].value - spec.pairs[0].value < 10.0 * tol) {
    gs.near_degenerate = true;
  }
  if (!one.converged) {
    throw ConvergenceError("ground_state: inverse iteration did not converge", gs.residual);
  }
  return gs;
}

/// Full spectrum from a dense symmetric tridiagonal QL/QR solver. This is the
/// reference oracle for the bisection path; it refuses dimensions above
/// `dense_limit`.
Spectrum dense_all(const TridiagonalStorage& t, bool with_vectors = true,
                   std::int64_t dense_limit = default_dense_limit);

template <SymmetricTridiagonal Op>
Spectrum dense_all(const Op& h, bool with_vectors = true,
                   std::int64_t dense_limit = default_dense_limit) {
  if (h.dim() > dense_limit) {
    throw CapacityError("dense_all: dimension " + std::to_string(h.dim()) +
                        " exceeds dense limit " + std::to_string(dense_limit));
  }
  TridiagonalStorage t;
  const auto n = static_cast<std::size_t>(h.dim());
  t.diagonal.resize(n);
  t.off_diagonal.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) t.diagonal[i] = h.diag(static_cast<std::int64_t>(i));
  for (std::size_t i = 0; i + 1 < n; ++i) t.off_diagonal[i] = h.offdiag(static_cast<std::int64_t>(i));
  return dense_all(t, with_vectors, dense_limit);
}

}  // namespace finjj
