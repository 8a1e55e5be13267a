#include <doctest.h>

#include <cmath>
#include <random>

#include "finjj/errors.hpp"
#include "finjj/wick.hpp"

using namespace finjj;
using namespace finjj::wick;

namespace {

const OperatorPoly b = OperatorPoly::lower();
const OperatorPoly bd = OperatorPoly::raise();

double exact_block_error(const OperatorPoly& p, std::size_t dim) {
  const auto keep = static_cast<Eigen::Index>(dim) - p.degree();
  const Eigen::MatrixXcd raw = fock_matrix(p, dim).leftCols(keep);
  const Eigen::MatrixXcd ordered = fock_matrix(normal_order(p), dim).leftCols(keep);
  const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
  return (raw - ordered).cwiseAbs().maxCoeff() / scale;
}

// Vacuum of b = u_+ a + u_- a^dag - i u_0 on a truncated a-frame Fock space.
Eigen::VectorXcd bogoliubov_vacuum(const BogoliubovCoeffs& c, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  const Eigen::MatrixXcd a = fock_matrix(OperatorPoly::lower(), dim);
  const Eigen::MatrixXcd m = c.u_plus * a + c.u_minus * a.adjoint() -
                             Complex(0.0, c.u_0) * Eigen::MatrixXcd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().col(n - 1);
}

}  // namespace

TEST_SUITE("wick") {

TEST_CASE("canonical commutator") {
  const OperatorPoly c = normal_order(b * bd - bd * b);
  CHECK(c == OperatorPoly::identity());
  CHECK(normal_order(b * bd) == number() + OperatorPoly::identity());
}

TEST_CASE("small expansions") {
  // b b b^dag = b^dag b^2 + 2 b
  const OperatorPoly e = normal_order(b * b * bd);
  CHECK(e.size() == 2);
  CHECK(e.coefficient(LadderWord::normal(1, 2)) == Complex(1.0));
  CHECK(e.coefficient(LadderWord::normal(0, 1)) == Complex(2.0));

  // b^2 (b^dag)^2 = (b^dag)^2 b^2 + 4 b^dag b + 2
  const OperatorPoly f = normal_order(b * b * bd * bd);
  CHECK(f.coefficient(LadderWord::normal(2, 2)) == Complex(1.0));
  CHECK(f.coefficient(LadderWord::normal(1, 1)) == Complex(4.0));
  CHECK(f.coefficient(LadderWord{}) == Complex(2.0));
  CHECK(vacuum_expectation(b * b * bd * bd) == Complex(2.0));
}

TEST_CASE("quadrature moments") {
  // <(b + b^dag)^4> = 3 and <x^2> = <p^2> = 1/2.
  CHECK(std::abs(vacuum_expectation(power(b + bd, 4)) - Complex(3.0)) < 1e-15);
  CHECK(std::abs(vacuum_expectation(power(position(), 2)) - Complex(0.5)) < 1e-15);
  CHECK(std::abs(vacuum_expectation(power(momentum(), 2)) - Complex(0.5)) < 1e-15);
  // [x, p] = i
  const OperatorPoly xp = normal_order(position() * momentum() - momentum() * position());
  CHECK(std::abs(xp.coefficient(LadderWord{}) - Complex(0.0, 1.0)) < 1e-15);
  CHECK(xp.size() == 1);
  CHECK_THROWS_AS(power(b, -1), DomainError);
}

TEST_CASE("random polynomials: normal ordering preserves the operator") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const OperatorPoly p = random_polynomial(rng);
    CHECK(p.degree() <= 6);
    CHECK(p.size() <= 6);
    const OperatorPoly n = normal_order(p);
    CHECK(n.is_normal_ordered());
    CHECK(exact_block_error(p, 40) < 1e-12);
    const Complex vev = vacuum_expectation(p);
    CHECK(std::abs(vev - fock_oracle(p, 64)) < 1e-12);
    CHECK(std::abs(vev - fock_oracle_converged(p)) < 1e-12);
  }
}

TEST_CASE("normal ordering is idempotent and linear") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const OperatorPoly p = random_polynomial(rng);
    const OperatorPoly q = random_polynomial(rng);
    const OperatorPoly np = normal_order(p);
    CHECK(normal_order(np) == np);
    const Complex alpha(0.3, -1.1);
    const OperatorPoly lhs = normal_order(p * alpha + q);
    const OperatorPoly rhs = np * alpha + normal_order(q);
    REQUIRE(lhs.size() <= rhs.size() + 1);
    for (const auto& [w, c] : rhs.terms()) CHECK(std::abs(lhs.coefficient(w) - c) < 1e-12);
    for (const auto& [w, c] : lhs.terms()) CHECK(std::abs(rhs.coefficient(w) - c) < 1e-12);
  }
}

TEST_CASE("adjoint commutes with normal ordering") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const OperatorPoly p = random_polynomial(rng);
    const OperatorPoly lhs = normal_order(p.adjoint());
    const OperatorPoly rhs = normal_order(p).adjoint();
    for (const auto& [w, c] : rhs.terms()) CHECK(std::abs(lhs.coefficient(w) - c) < 1e-12);
    // The vacuum value of a Hermitian polynomial is real.
    CHECK(std::abs(vacuum_expectation(p + p.adjoint()).imag()) < 1e-12);
  }
}

TEST_CASE("affine substitution") {
  // Identity map.
  std::mt19937_64 rng(14);
  const OperatorPoly p = random_polynomial(rng);
  CHECK(substitute_affine(p, BogoliubovCoeffs{}) == normal_order(p));

  // Pure displacement: a = b + i u_0 (u_+ + u_-) with u_+ = 1.
  const BogoliubovCoeffs shift{1.0, 0.0, 0.25, 1.0};
  const OperatorPoly a = substitute_affine(OperatorPoly::lower(), shift);
  CHECK(a.coefficient(LadderWord::normal(0, 1)) == Complex(1.0));
  CHECK(a.coefficient(LadderWord{}) == Complex(0.0, 0.25));

  // a^dag a in a squeezed frame: <0_b| a^dag a |0_b> = u_-^2.
  const double r = 0.4;
  const BogoliubovCoeffs sq{std::cosh(r), std::sinh(r), 0.0, 1.0};
  CHECK(std::abs(vacuum_expectation(substitute_affine(number(), sq)) - Complex(std::sinh(r) * std::sinh(r))) <
        1e-14);

  CHECK_THROWS_AS(substitute_affine(p, BogoliubovCoeffs{1.0, 0.5, 0.0, 1.0}), DomainError);
}

TEST_CASE("substitution agrees with a numerically built vacuum") {
  const double r = 0.3;
  for (double u0 : {0.0, 0.4, -0.7}) {
    const BogoliubovCoeffs c{std::cosh(r), std::sinh(r), u0, 1.0};
    const std::size_t dim = 80;
    const Eigen::VectorXcd v = bogoliubov_vacuum(c, dim);
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 20; ++trial) {
      const OperatorPoly p = random_polynomial(rng, {4, 4, 1.0});
      const Complex numeric = v.adjoint() * fock_matrix(p, dim) * v;
      const Complex symbolic = vacuum_expectation(substitute_affine(p, c));
      CAPTURE(u0);
      CHECK(std::abs(numeric - symbolic) < 1e-9);
    }
  }
}

TEST_CASE("term limits") {
  Limits tight;
  tight.max_terms = 3;
  CHECK_THROWS_AS(normal_order(power(b + bd, 8), tight), CapacityError);
  CHECK_NOTHROW(normal_order(power(b + bd, 8)));
}

TEST_CASE("Fock oracle") {
  CHECK(fock_oracle(OperatorPoly::identity(), 4) == Complex(1.0));
  CHECK(fock_oracle(bd, 4) == Complex(0.0));
  CHECK(fock_oracle(b * bd, 4) == Complex(1.0));
  // b^3 (b^dag)^3 |0> needs the |3> state.
  CHECK(fock_oracle(power(b, 3) * power(bd, 3), 3) == Complex(0.0));
  CHECK(std::abs(fock_oracle(power(b, 3) * power(bd, 3), 4) - Complex(6.0)) < 1e-14);
  CHECK_THROWS_AS(fock_oracle(b, 0), DomainError);
  CHECK_THROWS_AS(fock_matrix(b, 0), DomainError);

  const Eigen::MatrixXcd m = fock_matrix(number(), 5);
  for (Eigen::Index k = 0; k < 5; ++k) CHECK(std::abs(m(k, k) - Complex(static_cast<double>(k))) < 1e-15);
}

TEST_CASE("random polynomial spec") {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 100; ++i) {
    const OperatorPoly p = random_polynomial(rng, {3, 2, 0.5});
    CHECK(p.degree() <= 3);
    CHECK(p.size() <= 2);
    for (const auto& [w, c] : p.terms()) CHECK(std::abs(c) <= 0.5 * 2.0);
  }
  std::mt19937_64 a(17), c(17);
  CHECK(random_polynomial(a) == random_polynomial(c));
  CHECK_THROWS_AS(random_polynomial(rng, {6, 0, 1.0}), DomainError);
  CHECK_THROWS_AS(random_polynomial(rng, {6, 6, 0.0}), DomainError);
}

TEST_CASE("text dump") {
  CHECK(to_string(OperatorPoly{}) == "0\n");
  const OperatorPoly p = OperatorPoly::monomial(LadderWord::normal(2, 1), 2.0);
  CHECK(to_string(p) == "(+2+0i) * b†^2 b^1\n");
  CHECK(to_string(b * bd, "a") == "(+1+0i) * a a†\n");
}

}  // TEST_SUITE
