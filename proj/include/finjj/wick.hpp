#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace finjj::wick {

using Complex = std::complex<double>;

enum class Ladder : std::uint8_t { lower = 0, raise = 1 };

/// Ordered product of ladder operators of one bosonic mode; empty is the
/// identity.
struct LadderWord {
  std::vector<Ladder> symbols;

  LadderWord() = default;
  explicit LadderWord(std::vector<Ladder> s) : symbols(std::move(s)) {}

  // raise^m lower^n
  static LadderWord normal(int raises, int lowers);

  std::size_t size() const noexcept { return symbols.size(); }
  bool empty() const noexcept { return symbols.empty(); }
  bool is_normal_ordered() const noexcept;
  int raises() const noexcept;

  auto operator<=>(const LadderWord&) const = default;
  bool operator==(const LadderWord&) const = default;
};

LadderWord operator+(const LadderWord& lhs, const LadderWord& rhs);

/// Finite sum of complex-weighted ladder words. Words are kept in canonical
/// (lexicographic) order and exact zero coefficients are never stored.
class OperatorPoly {
 public:
  using Terms = std::map<LadderWord, Complex>;

  OperatorPoly() = default;

  static OperatorPoly scalar(Complex c);
  static OperatorPoly identity() { return scalar(1.0); }
  static OperatorPoly lower();
  static OperatorPoly raise();
  static OperatorPoly monomial(const LadderWord& w, Complex c = 1.0);

  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  Complex coefficient(const LadderWord& w) const;
  int degree() const noexcept;
  bool is_normal_ordered() const noexcept;

  void add_term(const LadderWord& w, Complex c);

  // Reverses every word and conjugates its coefficient.
  OperatorPoly adjoint() const;

  OperatorPoly& operator+=(const OperatorPoly& rhs);
  OperatorPoly& operator-=(const OperatorPoly& rhs);
  OperatorPoly& operator*=(Complex c);

  friend OperatorPoly operator+(OperatorPoly lhs, const OperatorPoly& rhs) { return lhs += rhs; }
  friend OperatorPoly operator-(OperatorPoly lhs, const OperatorPoly& rhs) { return lhs -= rhs; }
  friend OperatorPoly operator*(OperatorPoly p, Complex c) { return p *= c; }
  friend OperatorPoly operator*(Complex c, OperatorPoly p) { return p *= c; }
  friend OperatorPoly operator-(OperatorPoly p) { return p *= -1.0; }
  // Word concatenation; the result is not normal ordered.
  friend OperatorPoly operator*(const OperatorPoly& lhs, const OperatorPoly& rhs);

  bool operator==(const OperatorPoly&) const = default;

 private:
  Terms terms_;
};

// Quadratures of the mode: x = (a + a^dag)/sqrt2, p = i(a^dag - a)/sqrt2.
OperatorPoly position();
OperatorPoly momentum();
OperatorPoly number();
OperatorPoly power(const OperatorPoly& p, int exponent);

struct Limits {
  std::size_t max_terms = 1'000'000;
};

/// Rewrites every word with all raising symbols to the left, using
/// [lower, raise] = 1. Operator identity is preserved.
OperatorPoly normal_order(const OperatorPoly& p, const Limits& limits = {});

/// <0| p |0>: the identity coefficient after normal ordering.
Complex vacuum_expectation(const OperatorPoly& p, const Limits& limits = {});

/// Forward affine Bogoliubov map between an `a` frame and a `b` frame:
///   b      = u_plus a + u_minus a^dag - i u_0
///   b^dag  = u_minus a + u_plus a^dag + i u_0
/// with level spacing `epsilon` of the quadratic Hamiltonian it diagonalizes.
struct BogoliubovCoeffs {
  double u_plus = 1.0;
  double u_minus = 0.0;
  double u_0 = 0.0;
  double epsilon = 0.0;

  double symplectic_defect() const noexcept { return u_plus * u_plus - u_minus * u_minus - 1.0; }
};

/// Rewrites a polynomial in the a-frame symbols as a normal-ordered
/// polynomial in the b-frame symbols. The affine map is inverted internally:
///   a     = u_plus b - u_minus b^dag + i u_0 (u_plus + u_minus)
///   a^dag = u_plus b^dag - u_minus b - i u_0 (u_plus + u_minus)
OperatorPoly substitute_affine(const OperatorPoly& p, const BogoliubovCoeffs& c,
                               const Limits& limits = {});

/// Dense matrix of p on the Fock states |0>..|dim-1>. Rows near the
/// truncation edge are affected by the cut for words that climb past it.
Eigen::MatrixXcd fock_matrix(const OperatorPoly& p, std::size_t dim);

/// <0| p |0> evaluated with truncated Fock matrices of size dim.
Complex fock_oracle(const OperatorPoly& p, std::size_t dim);

/// fock_oracle with dim doubled from `dim` until successive values agree to
/// `tol`; throws ConvergenceError if `max_dim` is reached first.
Complex fock_oracle_converged(const OperatorPoly& p, std::size_t dim = 8, double tol = 1e-12,
                              std::size_t max_dim = 4096);

struct RandomPolySpec {
  int max_degree = 6;
  int max_terms = 6;
  double max_abs = 1.0;  // bound on |coefficient|
};

/// A polynomial of at most `max_terms` random words of length <= max_degree
/// with coefficients drawn uniformly from the disc of radius max_abs. The
/// words are not normal ordered.
OperatorPoly random_polynomial(std::mt19937_64& rng, const RandomPolySpec& spec = {});

/// Text dump, one `coeff * b†^m b^n` term per line for normal-ordered words
/// and the raw symbol sequence otherwise.
std::string to_string(const OperatorPoly& p, const std::string& symbol = "b");

}  // namespace finjj::wick
