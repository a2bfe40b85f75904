#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace giz {

// Errors are split by what the caller is expected to do about them; the CLI
// maps each class onto an exit code.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

using Rational = mpq_class;
using Complex = std::complex<double>;

/// Element of Q(i), both parts kept in lowest terms by GMP.
class GaussRat {
 public:
  GaussRat() = default;
  GaussRat(long n) : re_(n) {}  // NOLINT(google-explicit-constructor)
  GaussRat(Rational re, Rational im = 0);
  static GaussRat I() { return GaussRat(0, 1); }
  static GaussRat frac(long num, long den);

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussRat conj() const { return {re_, -im_}; }
  GaussRat inverse() const;
  Complex to_complex() const { return {re_.get_d(), im_.get_d()}; }

  GaussRat operator-() const { return {-re_, -im_}; }
  GaussRat& operator+=(const GaussRat& o);
  GaussRat& operator-=(const GaussRat& o);
  GaussRat& operator*=(const GaussRat& o);
  GaussRat& operator/=(const GaussRat& o);

  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
  friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// Grammar form: `3/2`, `-i`, `(1/2+3*i)`.
  std::string str() const;

 private:
  Rational re_{0};
  Rational im_{0};
};

std::ostream& operator<<(std::ostream& os, const GaussRat& c);

// ---------------------------------------------------------------------------
// Variables and monomials

/// Ring variables in order of precedence for the monomial order.
enum class Var : std::uint8_t { y = 0, v = 1, x = 2, u = 3, lambda = 4 };
inline constexpr std::size_t kNumVars = 5;
inline constexpr std::array<Var, 4> kAmbientVars{Var::x, Var::y, Var::u, Var::v};

std::string_view var_name(Var v);
std::optional<Var> var_from_name(std::string_view name);
inline std::size_t idx(Var v) { return static_cast<std::size_t>(v); }

/// Exponent vector indexed by Var.
class Monomial {
 public:
  Monomial() { exps_.fill(0); }
  static Monomial var(Var v, std::uint32_t e = 1);
  static Monomial from(std::initializer_list<std::pair<Var, std::uint32_t>> parts);

  std::uint32_t operator[](Var v) const { return exps_[idx(v)]; }
  std::uint32_t& operator[](Var v) { return exps_[idx(v)]; }
  std::uint32_t at(std::size_t i) const { return exps_[i]; }

  std::uint64_t degree() const;
  bool is_one() const { return degree() == 0; }
  bool divides(const Monomial& other) const;

  Monomial operator*(const Monomial& o) const;
  /// Requires divides(*this, o) reversed: returns this / o.
  Monomial operator/(const Monomial& o) const;
  static Monomial lcm(const Monomial& a, const Monomial& b);
  static Monomial gcd(const Monomial& a, const Monomial& b);

  friend bool operator==(const Monomial& a, const Monomial& b) = default;
  std::string str() const;

 private:
  std::array<std::uint32_t, kNumVars> exps_;
};

/// Degree-reverse-lexicographic order with y > v > x > u > lambda.
/// Returns <0, 0, >0.
int compare_degrevlex(const Monomial& a, const Monomial& b);

struct MonomialGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return compare_degrevlex(a, b) > 0;
  }
};

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials

class MultiPoly {
 public:
  using TermMap = std::map<Monomial, GaussRat, MonomialGreater>;

  MultiPoly() = default;
  MultiPoly(const GaussRat& c);  // NOLINT(google-explicit-constructor)
  MultiPoly(long c) : MultiPoly(GaussRat(c)) {}  // NOLINT(google-explicit-constructor)
  MultiPoly(const GaussRat& c, const Monomial& m);
  static MultiPoly var(Var v) { return {GaussRat(1), Monomial::var(v)}; }
  static MultiPoly monomial(const Monomial& m) { return {GaussRat(1), m}; }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::size_t size() const { return terms_.size(); }

  /// Leading term under the degrevlex order; requires non-zero.
  const Monomial& lead_monomial() const;
  const GaussRat& lead_coeff() const;
  GaussRat coeff(const Monomial& m) const;
  std::uint64_t total_degree() const;
  std::uint32_t degree_in(Var v) const;
  bool uses(Var v) const { return degree_in(v) > 0; }

  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);
  MultiPoly& operator*=(const GaussRat& c);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, const GaussRat& c) { return a *= c; }
  friend MultiPoly operator*(const GaussRat& c, MultiPoly a) { return a *= c; }
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) { return a.terms_ == b.terms_; }

  /// a += c * m * b, the inner loop of every reduction.
  void add_scaled(const GaussRat& c, const Monomial& m, const MultiPoly& b);
  MultiPoly mul_term(const GaussRat& c, const Monomial& m) const;

  MultiPoly pow(long e) const;
  MultiPoly derive(Var v) const;
  MultiPoly substitute(const std::map<Var, MultiPoly>& assignment) const;
  Complex eval(const std::map<Var, Complex>& point) const;
  GaussRat eval_exact(const std::map<Var, GaussRat>& point) const;

  /// Parseable text in the polynomial grammar, terms in monomial order.
  std::string str() const;

 private:
  void add_term(const Monomial& m, const GaussRat& c);
  TermMap terms_;
};

std::ostream& operator<<(std::ostream& os, const MultiPoly& p);

/// Quotient q with p == d*q, or nullopt when d does not divide p.
std::optional<MultiPoly> exact_divide(const MultiPoly& p, const MultiPoly& d);

/// Divides every term by a monomial; nullopt if some term is not divisible.
std::optional<MultiPoly> divide_by_monomial(const MultiPoly& p, const Monomial& m);

// ---------------------------------------------------------------------------
// Univariate polynomials (P in x, Q in u)

class UniPoly {
 public:
  UniPoly(std::vector<GaussRat> coeffs, Var var);
  static UniPoly from_multi(const MultiPoly& p, Var var);

  Var var() const { return var_; }
  const std::vector<GaussRat>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  GaussRat coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : GaussRat(); }
  GaussRat eval(const GaussRat& t) const;
  Complex eval(Complex t) const;

  UniPoly derivative() const;
  UniPoly with_var(Var v) const { return {coeffs_, v}; }
  MultiPoly to_multi() const;
  MultiPoly to_multi(Var v) const { return with_var(v).to_multi(); }
  std::vector<Complex> complex_coeffs() const;
  std::string str() const { return to_multi().str(); }

  friend bool operator==(const UniPoly& a, const UniPoly& b) = default;

 private:
  std::vector<GaussRat> coeffs_;
  Var var_;
};

/// Monic gcd by the Euclidean algorithm over Q(i).
UniPoly uni_gcd(const UniPoly& a, const UniPoly& b);

/// True iff gcd(p, p') is constant.
bool simple_roots(const UniPoly& p);

/// Numerical roots (companion-matrix eigenvalues).
std::vector<Complex> uni_roots(const UniPoly& p);

/// Roots that lie in Q(i), found by rounding numeric roots and re-checking exactly.
std::vector<GaussRat> exact_roots(const UniPoly& p);

// ---------------------------------------------------------------------------
// Rational expressions with monomial denominators

/// num / den where den is a monomial. Chart-level functions (Laurent in the
/// chart coordinates) and non-polynomialized field components use this.
struct MonoFrac {
  MultiPoly num;
  Monomial den;

  MonoFrac() = default;
  MonoFrac(MultiPoly n) : num(std::move(n)) {}  // NOLINT(google-explicit-constructor)
  MonoFrac(MultiPoly n, Monomial d);

  bool is_polynomial() const { return den.is_one(); }
  bool is_zero() const { return num.is_zero(); }

  MonoFrac operator-() const { return {-num, den}; }
  friend MonoFrac operator+(const MonoFrac& a, const MonoFrac& b);
  friend MonoFrac operator-(const MonoFrac& a, const MonoFrac& b) { return a + (-b); }
  friend MonoFrac operator*(const MonoFrac& a, const MonoFrac& b);
  friend bool operator==(const MonoFrac& a, const MonoFrac& b);

  MonoFrac derive(Var v) const;
  MonoFrac pow(long e) const;
  /// Cancels common monomial factors between num and den.
  MonoFrac normalized() const;
  std::string str() const;
};

/// Substitutes variables by MonoFrac images (used to pull ambient functions
/// back into a chart).
MonoFrac substitute_frac(const MultiPoly& p, const std::map<Var, MonoFrac>& assignment);

// ---------------------------------------------------------------------------
// Text grammar

/// Parses the polynomial grammar: variables x y u v, lambda, i, rationals,
/// + - * / ^ and parentheses. Division is allowed by non-zero constants only.
MultiPoly parse_poly(std::string_view text);

/// Parses a univariate polynomial that may only use `var`.
UniPoly parse_unipoly(std::string_view text, Var var);

/// Parses either an exact constant in the grammar or a float `a+bi`.
struct ParsedScalar {
  std::optional<GaussRat> exact;
  Complex value;
};
ParsedScalar parse_scalar(std::string_view text);

std::string complex_str(Complex c);

}  // namespace giz
