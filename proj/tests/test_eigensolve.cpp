#include <doctest.h>

#include <cmath>
#include <random>

#include "finjj/charge_hamiltonian.hpp"
#include "finjj/eigensolve.hpp"
#include "finjj/errors.hpp"
#include "oracle.hpp"

using namespace finjj;

namespace {

double energy_scale(const CircuitParams& p) { return p.e_c + p.e_j; }

}  // namespace

TEST_SUITE("eigensolve") {

TEST_CASE("two-level closed form") {
  const TridiagonalHamiltonian h = build({1.0, 1.0, 0.0, 1});
  const Spectrum s = lowest_eigenvalues(h, 2, 1e-15);
  CHECK(s.pairs[0].value == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK(s.pairs[1].value == doctest::Approx(1.25).epsilon(1e-14));

  const EigenPair gs = ground_state(h, 1e-15);
  REQUIRE(gs.vector);
  CHECK(gs.value == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK((*gs.vector)[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK((*gs.vector)[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  const Spectrum d = dense_all(h);
  CHECK(d.pairs[0].value == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK(d.pairs[1].value == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("bisection matches an independent dense solver") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::int64_t> pairs(1, 400);
  std::uniform_real_distribution<double> log_ratio(-2.0, 2.5);
  std::uniform_real_distribution<double> offset(-30.0, 30.0);
  for (int trial = 0; trial < 40; ++trial) {
    const CircuitParams p{std::pow(10.0, log_ratio(rng)), 1.0, offset(rng), pairs(rng)};
    const TridiagonalHamiltonian h = build(p);
    const auto k = std::min<std::int64_t>(5, h.dim());
    const Spectrum s = lowest_eigenpairs(h, k, 1e-15 * energy_scale(p));
    const oracle::Dense ref = oracle::solve(p.e_j, p.e_c, p.n_g, p.pairs_total);
    CAPTURE(p.e_j);
    CAPTURE(p.n_g);
    CAPTURE(p.pairs_total);
    for (std::int64_t j = 0; j < k; ++j) {
      CHECK(std::abs(s.pairs[j].value - ref.values(j)) <= 1e-10 * std::max(std::abs(ref.values(j)), p.e_c));
    }
    const auto& v = *s.pairs[0].vector;
    double overlap = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) overlap += v[i] * ref.vectors(static_cast<Eigen::Index>(i), 0);
    CHECK(std::abs(overlap) > 1.0 - 1e-10);
  }
}

TEST_CASE("level spacing far beyond the island charge") {
  // Saturated states |N - k> with E_k close to E_C (n_g - N + k)^2.
  const TridiagonalHamiltonian h = build({1.0, 1.0, 20.0, 10});
  const Spectrum s = lowest_eigenvalues(h, 4, 1e-14);
  for (int k = 0; k < 3; ++k) {
    CHECK(oracle::rel(s.pairs[k + 1].value - s.pairs[k].value, 2.0 * (15.0 + k) + 1.0) < 1e-2);
  }
}

TEST_CASE("ground vectors stay positive in underflowing tails") {
  const CircuitParams p{0.3, 1.0, -9.1, 720};
  const EigenPair gs = ground_state(build(p), 1e-15 * energy_scale(p));
  CHECK(oracle::positive_up_to_underflow(*gs.vector));
  CHECK(gs.vector->front() == 0.0);
  CHECK(gs.vector->back() == 0.0);
}

TEST_CASE("ground-vector tails are accurate componentwise") {
  // Each row of (H - E_0) v = 0 holds relative to the size of its own terms,
  // even where the amplitudes are far below machine epsilon.
  const CircuitParams p{0.3, 1.0, -9.1, 60};
  const TridiagonalHamiltonian h = build(p);
  const EigenPair gs = ground_state(h, 1e-15 * energy_scale(p));
  const auto& v = *gs.vector;
  CHECK(v.back() < 1e-100);
  double worst = 0.0;
  for (std::int64_t i = 0; i < h.dim(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    double r = (h.diag(i) - gs.value) * v[u];
    double size = std::abs(r);
    if (i > 0) {
      r += h.offdiag(i - 1) * v[u - 1];
      size += std::abs(h.offdiag(i - 1) * v[u - 1]);
    }
    if (i + 1 < h.dim()) {
      r += h.offdiag(i) * v[u + 1];
      size += std::abs(h.offdiag(i) * v[u + 1]);
    }
    // The row holding the peak carries the eigenvalue error instead.
    if (std::abs(h.charge(i) - p.n_g) > 1.0) worst = std::max(worst, std::abs(r) / size);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("Sturm counts certify each eigenvalue") {
  const CircuitParams p{5.0, 1.0, 0.37, 120};
  const TridiagonalHamiltonian h = build(p);
  const double tol = 1e-12;
  const Spectrum s = lowest_eigenvalues(h, 6, tol);
  for (std::int64_t j = 0; j < 6; ++j) {
    CHECK(sturm_count(h, s.pairs[j].value + tol) >= j + 1);
    CHECK(sturm_count(h, s.pairs[j].value - tol) <= j);
  }
}

TEST_CASE("fewer levels give a prefix of more levels") {
  const TridiagonalHamiltonian h = build({20.0, 1.0, 3.3, 300});
  const Spectrum longer = lowest_eigenvalues(h, 8, 1e-14);
  for (std::int64_t k = 1; k < 8; ++k) {
    const Spectrum shorter = lowest_eigenvalues(h, k, 1e-14);
    for (std::int64_t j = 0; j < k; ++j) CHECK(std::abs(shorter.pairs[j].value - longer.pairs[j].value) < 1e-12);
  }
}

TEST_CASE("eigenvectors are normalized, positive and accurate") {
  for (const CircuitParams& p : {CircuitParams{0.2, 1.0, 0.5, 10}, CircuitParams{50.0, 1.0, 3.0, 400},
                                 CircuitParams{1.0, 1.0, 200.0, 100}, CircuitParams{1e3, 1.0, 0.0, 61}}) {
    const EigenPair gs = ground_state(build(p), 1e-15 * energy_scale(p));
    REQUIRE(gs.vector);
    double norm = 0.0;
    for (double x : *gs.vector) norm += x * x;
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-12);
    CHECK(gs.residual < 1e-10 * energy_scale(p));
    CHECK(oracle::positive_up_to_underflow(*gs.vector));
  }
}

TEST_CASE("excited vectors are orthogonal") {
  const TridiagonalHamiltonian h = build({1.0, 1.0, 45.0, 10});
  const Spectrum s = lowest_eigenpairs(h, 5, 1e-14);
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = a + 1; b < 5; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < 11; ++i) dot += (*s.pairs[a].vector)[i] * (*s.pairs[b].vector)[i];
      CHECK(std::abs(dot) < 1e-10);
    }
  }
}

TEST_CASE("dense solver trace and Frobenius identities") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> pairs(1, 600);
  std::uniform_real_distribution<double> ratio(0.01, 100.0);
  std::uniform_real_distribution<double> offset(-10.0, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    const CircuitParams p{ratio(rng), 1.0, offset(rng), pairs(rng)};
    const TridiagonalHamiltonian h = build(p);
    const Spectrum s = dense_all(h, false);
    double trace = 0.0, frob = 0.0, sum = 0.0, sum_sq = 0.0;
    for (std::int64_t i = 0; i < h.dim(); ++i) {
      trace += h.diag(i);
      frob += h.diag(i) * h.diag(i);
      if (i + 1 < h.dim()) frob += 2.0 * h.offdiag(i) * h.offdiag(i);
    }
    for (const auto& e : s.pairs) {
      sum += e.value;
      sum_sq += e.value * e.value;
    }
    CHECK(oracle::rel(sum, trace) < 1e-10);
    CHECK(oracle::rel(sum_sq, frob) < 1e-10);
  }
  CHECK_THROWS_AS(dense_all(build({1.0, 1.0, 0.0, 4001})), CapacityError);
  CHECK_NOTHROW(dense_all(build({1.0, 1.0, 0.0, 4000}), false));
}

TEST_CASE("near-degenerate ground states are flagged") {
  const EigenPair gs = ground_state(build({1e-13, 1.0, 0.5, 10}), 1e-12);
  CHECK(gs.near_degenerate);
  CHECK_FALSE(ground_state(build({1.0, 1.0, 0.5, 10}), 1e-12).near_degenerate);
}

TEST_CASE("iteration caps and bad arguments") {
  EigensolveOptions opts;
  opts.max_bisection_steps = 3;
  CHECK_THROWS_AS(lowest_eigenvalues(build({1.0, 1.0, 0.0, 100}), 1, 1e-14, opts), ConvergenceError);
  try {
    lowest_eigenvalues(build({1.0, 1.0, 0.0, 100}), 1, 1e-14, opts);
  } catch (const ConvergenceError& e) {
    CHECK(e.achieved() > 1e-14);
  }
  CHECK_THROWS_AS(lowest_eigenvalues(build({1.0, 1.0, 0.0, 4}), 0, 1e-14), DomainError);
  CHECK_THROWS_AS(lowest_eigenvalues(build({1.0, 1.0, 0.0, 4}), 6, 1e-14), DomainError);
  CHECK_THROWS_AS(lowest_eigenvalues(build({1.0, 1.0, 0.0, 4}), 1, 0.0), DomainError);
}

TEST_CASE("results are bitwise reproducible") {
  const TridiagonalHamiltonian h = build({7.0, 1.0, 2.2, 1000});
  const Spectrum a = lowest_eigenpairs(h, 3, 1e-14);
  const Spectrum b = lowest_eigenpairs(h, 3, 1e-14);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(a.pairs[j].value == b.pairs[j].value);
    CHECK(*a.pairs[j].vector == *b.pairs[j].vector);
  }
}

TEST_CASE("windows inside very large bases") {
  const CircuitParams p{10.0, 0.2, 0.0, 500'000'000};
  const TridiagonalHamiltonian h = build_windowed(p, centered_window(p, 0.0, 64));
  const Spectrum s = lowest_eigenvalues(h, 2, 1e-15 * 10.2);
  CHECK(oracle::rel(s.pairs[1].value - s.pairs[0].value, std::sqrt(2.0 * 0.2 * 10.0)) < 0.05);
}

TEST_CASE("matrix-free bisection over a two-million-state basis") {
  const CircuitParams p{50.0, 1.0, 0.0, 2'000'000};
  const Spectrum full = lowest_eigenvalues(build(p), 2, 1e-15 * 51.0);
  const Spectrum windowed = lowest_eigenvalues(build_windowed(p, centered_window(p, 0.0, 40)), 2, 1e-15 * 51.0);
  CHECK(oracle::rel(windowed.pairs[1].value - windowed.pairs[0].value,
                    full.pairs[1].value - full.pairs[0].value) < 1e-10);
}

}  // TEST_SUITE
