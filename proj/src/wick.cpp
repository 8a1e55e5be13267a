#include "finjj/wick.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <utility>

#include "finjj/errors.hpp"

namespace finjj::wick {

LadderWord LadderWord::normal(int raises, int lowers) {
  std::vector<Ladder> s(static_cast<std::size_t>(raises), Ladder::raise);
  s.insert(s.end(), static_cast<std::size_t>(lowers), Ladder::lower);
  return LadderWord(std::move(s));
}

bool LadderWord::is_normal_ordered() const noexcept {
  // raise > lower, so normal order is a non-increasing sequence.
  return std::is_sorted(symbols.begin(), symbols.end(), std::greater<>{});
}

int LadderWord::raises() const noexcept {
  return static_cast<int>(std::count(symbols.begin(), symbols.end(), Ladder::raise));
}

LadderWord operator+(const LadderWord& lhs, const LadderWord& rhs) {
  std::vector<Ladder> s = lhs.symbols;
  s.insert(s.end(), rhs.symbols.begin(), rhs.symbols.end());
  return LadderWord(std::move(s));
}

OperatorPoly OperatorPoly::scalar(Complex c) { return monomial(LadderWord{}, c); }
OperatorPoly OperatorPoly::lower() { return monomial(LadderWord({Ladder::lower})); }
OperatorPoly OperatorPoly::raise() { return monomial(LadderWord({Ladder::raise})); }

OperatorPoly OperatorPoly::monomial(const LadderWord& w, Complex c) {
  OperatorPoly p;
  p.add_term(w, c);
  return p;
}

Complex OperatorPoly::coefficient(const LadderWord& w) const {
  const auto it = terms_.find(w);
  return it == terms_.end() ? Complex{} : it->second;
}

int OperatorPoly::degree() const noexcept {
  int d = 0;
  for (const auto& [w, c] : terms_) d = std::max(d, static_cast<int>(w.size()));
  return d;
}

bool OperatorPoly::is_normal_ordered() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.first.is_normal_ordered(); });
}

void OperatorPoly::add_term(const LadderWord& w, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

OperatorPoly OperatorPoly::adjoint() const {
  OperatorPoly out;
  for (const auto& [w, c] : terms_) {
    std::vector<Ladder> s(w.symbols.rbegin(), w.symbols.rend());
    for (auto& x : s) x = x == Ladder::raise ? Ladder::lower : Ladder::raise;
    out.add_term(LadderWord(std::move(s)), std::conj(c));
  }
  return out;
}

OperatorPoly& OperatorPoly::operator+=(const OperatorPoly& rhs) {
  for (const auto& [w, c] : rhs.terms_) add_term(w, c);
  return *this;
}

OperatorPoly& OperatorPoly::operator-=(const OperatorPoly& rhs) {
  for (const auto& [w, c] : rhs.terms_) add_term(w, -c);
  return *this;
}

OperatorPoly& OperatorPoly::operator*=(Complex c) {
  if (c == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    it = it->second == Complex{} ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

OperatorPoly operator*(const OperatorPoly& lhs, const OperatorPoly& rhs) {
  OperatorPoly out;
  for (const auto& [wl, cl] : lhs.terms()) {
    for (const auto& [wr, cr] : rhs.terms()) out.add_term(wl + wr, cl * cr);
  }
  return out;
}

OperatorPoly position() {
  return (OperatorPoly::lower() + OperatorPoly::raise()) * Complex(1.0 / std::sqrt(2.0));
}

OperatorPoly momentum() {
  return (OperatorPoly::raise() - OperatorPoly::lower()) * Complex(0.0, 1.0 / std::sqrt(2.0));
}

OperatorPoly number() { return OperatorPoly::raise() * OperatorPoly::lower(); }

OperatorPoly power(const OperatorPoly& p, int exponent) {
  if (exponent < 0) throw DomainError("wick::power: negative exponent");
  OperatorPoly out = OperatorPoly::identity();
  for (int i = 0; i < exponent; ++i) out = out * p;
  return out;
}

namespace {

// Normal-ordered accumulator keyed by (raises, lowers).
using NormalTerms = std::map<std::pair<int, int>, Complex>;

void accumulate(NormalTerms& t, std::pair<int, int> key, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = t.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) t.erase(it);
  }
}

void guard(const NormalTerms& t, const Limits& limits) {
  if (t.size() > limits.max_terms) {
    throw CapacityError("wick: term count " + std::to_string(t.size()) + " exceeds limit " +
                        std::to_string(limits.max_terms));
  }
}

// Right-multiplies by (alpha lower + beta raise + gamma). Moving a raise past
// lower^n contributes n lower^(n-1) from the commutator.
NormalTerms right_multiply(const NormalTerms& in, Complex alpha, Complex beta, Complex gamma) {
  NormalTerms out;
  for (const auto& [key, c] : in) {
    const auto [m, n] = key;
    if (alpha != Complex{}) accumulate(out, {m, n + 1}, c * alpha);
    if (beta != Complex{}) {
      accumulate(out, {m + 1, n}, c * beta);
      if (n > 0) accumulate(out, {m, n - 1}, c * beta * static_cast<double>(n));
    }
    if (gamma != Complex{}) accumulate(out, {m, n}, c * gamma);
  }
  return out;
}

OperatorPoly to_poly(const NormalTerms& t) {
  OperatorPoly out;
  for (const auto& [key, c] : t) out.add_term(LadderWord::normal(key.first, key.second), c);
  return out;
}

}  // namespace

OperatorPoly normal_order(const OperatorPoly& p, const Limits& limits) {
  NormalTerms total;
  for (const auto& [w, c] : p.terms()) {
    NormalTerms acc{{{0, 0}, c}};
    for (Ladder s : w.symbols) {
      acc = s == Ladder::lower ? right_multiply(acc, 1.0, 0.0, 0.0) : right_multiply(acc, 0.0, 1.0, 0.0);
      guard(acc, limits);
    }
    for (const auto& [key, v] : acc) accumulate(total, key, v);
    guard(total, limits);
  }
  return to_poly(total);
}

Complex vacuum_expectation(const OperatorPoly& p, const Limits& limits) {
  return normal_order(p, limits).coefficient(LadderWord{});
}

OperatorPoly substitute_affine(const OperatorPoly& p, const BogoliubovCoeffs& c, const Limits& limits) {
  const double scale = std::max(1.0, c.u_plus * c.u_plus);
  if (!std::isfinite(c.u_plus) || !std::isfinite(c.u_minus) || !std::isfinite(c.u_0) ||
      std::abs(c.symplectic_defect()) > 1e-12 * scale) {
    throw DomainError("substitute_affine: coefficients are not symplectic (u_+^2 - u_-^2 != 1)");
  }
  const Complex shift(0.0, c.u_0 * (c.u_plus + c.u_minus));
  // a = u_+ b - u_- b^dag + shift, a^dag = -u_- b + u_+ b^dag - shift
  NormalTerms total;
  for (const auto& [w, coeff] : p.terms()) {
    NormalTerms acc{{{0, 0}, coeff}};
    for (Ladder s : w.symbols) {
      acc = s == Ladder::lower ? right_multiply(acc, c.u_plus, -c.u_minus, shift)
                               : right_multiply(acc, -c.u_minus, c.u_plus, -shift);
      guard(acc, limits);
    }
    for (const auto& [key, v] : acc) accumulate(total, key, v);
    guard(total, limits);
  }
  return to_poly(total);
}

namespace {

Eigen::MatrixXcd annihilator(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
  return b;
}

}  // namespace

Eigen::MatrixXcd fock_matrix(const OperatorPoly& p, std::size_t dim) {
  if (dim == 0) throw DomainError("fock_matrix: dim must be positive");
  const auto n = static_cast<Eigen::Index>(dim);
  const Eigen::MatrixXcd b = annihilator(dim);
  const Eigen::MatrixXcd bd = b.adjoint();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [w, c] : p.terms()) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
    for (Ladder s : w.symbols) m = m * (s == Ladder::lower ? b : bd);
    out += c * m;
  }
  return out;
}

Complex fock_oracle(const OperatorPoly& p, std::size_t dim) {
  if (dim == 0) throw DomainError("fock_oracle: dim must be positive");
  Complex total{};
  std::vector<Complex> v(dim);
  for (const auto& [w, c] : p.terms()) {
    std::fill(v.begin(), v.end(), Complex{});
    v[0] = 1.0;
    // Apply the word to |0> from the right; amplitude past dim-1 is cut.
    for (auto it = w.symbols.rbegin(); it != w.symbols.rend(); ++it) {
      if (*it == Ladder::lower) {
        for (std::size_t k = 0; k + 1 < dim; ++k) v[k] = std::sqrt(static_cast<double>(k + 1)) * v[k + 1];
        v[dim - 1] = 0.0;
      } else {
        for (std::size_t k = dim - 1; k > 0; --k) v[k] = std::sqrt(static_cast<double>(k)) * v[k - 1];
        v[0] = 0.0;
      }
    }
    total += c * v[0];
  }
  return total;
}

Complex fock_oracle_converged(const OperatorPoly& p, std::size_t dim, double tol, std::size_t max_dim) {
  dim = std::max<std::size_t>(dim, 2);
  Complex prev = fock_oracle(p, dim);
  while (dim * 2 <= max_dim) {
    dim *= 2;
    const Complex next = fock_oracle(p, dim);
    if (std::abs(next - prev) <= tol * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  throw ConvergenceError("fock_oracle: value unstable under dimension doubling", std::abs(prev));
}

OperatorPoly random_polynomial(std::mt19937_64& rng, const RandomPolySpec& spec) {
  if (spec.max_degree < 0 || spec.max_terms < 1 || !(spec.max_abs > 0.0)) {
    throw DomainError("random_polynomial: invalid spec");
  }
  std::uniform_int_distribution<int> n_terms(1, spec.max_terms);
  std::uniform_int_distribution<int> length(0, spec.max_degree);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  OperatorPoly p;
  const int terms = n_terms(rng);
  for (int t = 0; t < terms; ++t) {
    LadderWord w;
    const int len = length(rng);
    for (int i = 0; i < len; ++i) w.symbols.push_back(coin(rng) ? Ladder::raise : Ladder::lower);
    const double r = spec.max_abs * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    p.add_term(w, std::polar(r, phi));
  }
  return p;
}

std::string to_string(const OperatorPoly& p, const std::string& symbol) {
  if (p.empty()) return "0\n";
  std::string out;
  char buf[96];
  for (const auto& [w, c] : p.terms()) {
    std::snprintf(buf, sizeof buf, "(%+.17g%+.17gi)", c.real(), c.imag());
    out += buf;
    if (w.empty()) {
      out += '\n';
      continue;
    }
    out += " *";
    if (w.is_normal_ordered()) {
      const int m = w.raises();
      const int n = static_cast<int>(w.size()) - m;
      if (m > 0) out += " " + symbol + "†^" + std::to_string(m);
      if (n > 0) out += " " + symbol + "^" + std::to_string(n);
    } else {
      for (Ladder s : w.symbols) out += s == Ladder::raise ? " " + symbol + "†" : " " + symbol;
    }
    out += '\n';
  }
  return out;
}

}  // namespace finjj::wick
