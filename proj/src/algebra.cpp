#include "giz/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <regex>
#include <sstream>

#include <Eigen/Dense>

namespace giz {

// ---------------------------------------------------------------------------
// GaussRat

GaussRat::GaussRat(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

GaussRat GaussRat::frac(long num, long den) {
  if (den == 0) throw InvalidInput("zero denominator");
  return GaussRat(Rational(num, den));
}

GaussRat GaussRat::inverse() const {
  if (is_zero()) throw InvalidInput("division by zero in Q(i)");
  Rational n = re_ * re_ + im_ * im_;
  return {re_ / n, -im_ / n};
}

GaussRat& GaussRat::operator+=(const GaussRat& o) {
  re_ += o.re_;
  if (sgn(o.im_) != 0) im_ += o.im_;
  return *this;
}

GaussRat& GaussRat::operator-=(const GaussRat& o) {
  re_ -= o.re_;
  if (sgn(o.im_) != 0) im_ -= o.im_;
  return *this;
}

GaussRat& GaussRat::operator*=(const GaussRat& o) {
  if (is_real() && o.is_real()) {
    re_ *= o.re_;
    return *this;
  }
  Rational r = re_ * o.re_ - im_ * o.im_;
  Rational i = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

GaussRat& GaussRat::operator/=(const GaussRat& o) {
  if (o.is_real()) {
    if (sgn(o.re_) == 0) throw InvalidInput("division by zero in Q(i)");
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  return *this *= o.inverse();
}

namespace {
std::string rat_str(const Rational& q) { return q.get_str(); }
}  // namespace

std::string GaussRat::str() const {
  if (is_real()) return rat_str(re_);
  std::string imag;
  if (im_ == 1) {
    imag = "i";
  } else if (im_ == -1) {
    imag = "-i";
  } else {
    imag = rat_str(im_) + "*i";
  }
  if (sgn(re_) == 0) return imag;
  std::string out = "(" + rat_str(re_);
  if (imag.front() != '-') out += "+";
  return out + imag + ")";
}

std::ostream& operator<<(std::ostream& os, const GaussRat& c) { return os << c.str(); }

// ---------------------------------------------------------------------------
// Monomials

std::string_view var_name(Var v) {
  switch (v) {
    case Var::x: return "x";
    case Var::y: return "y";
    case Var::u: return "u";
    case Var::v: return "v";
    case Var::lambda: return "lambda";
  }
  return "?";
}

std::optional<Var> var_from_name(std::string_view name) {
  if (name == "x") return Var::x;
  if (name == "y") return Var::y;
  if (name == "u") return Var::u;
  if (name == "v") return Var::v;
  if (name == "lambda") return Var::lambda;
  return std::nullopt;
}

Monomial Monomial::var(Var v, std::uint32_t e) {
  Monomial m;
  m[v] = e;
  return m;
}

Monomial Monomial::from(std::initializer_list<std::pair<Var, std::uint32_t>> parts) {
  Monomial m;
  for (auto [v, e] : parts) m[v] += e;
  return m;
}

std::uint64_t Monomial::degree() const {
  std::uint64_t d = 0;
  for (auto e : exps_) d += e;
  return d;
}

bool Monomial::divides(const Monomial& other) const {
  for (std::size_t i = 0; i < kNumVars; ++i)
    if (exps_[i] > other.exps_[i]) return false;
  return true;
}

namespace {
constexpr std::uint64_t kMaxExponent = 1u << 20;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  for (std::size_t i = 0; i < kNumVars; ++i) {
    std::uint64_t e = std::uint64_t{exps_[i]} + o.exps_[i];
    if (e > kMaxExponent) throw InvalidInput("exponent overflow");
    r.exps_[i] = static_cast<std::uint32_t>(e);
  }
  return r;
}

Monomial Monomial::operator/(const Monomial& o) const {
  Monomial r;
  for (std::size_t i = 0; i < kNumVars; ++i) {
    if (o.exps_[i] > exps_[i]) throw InternalError("monomial division is not exact");
    r.exps_[i] = exps_[i] - o.exps_[i];
  }
  return r;
}

Monomial Monomial::lcm(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kNumVars; ++i) r.exps_[i] = std::max(a.exps_[i], b.exps_[i]);
  return r;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kNumVars; ++i) r.exps_[i] = std::min(a.exps_[i], b.exps_[i]);
  return r;
}

std::string Monomial::str() const {
  static constexpr std::array<Var, kNumVars> print_order{Var::x, Var::y, Var::u, Var::v,
                                                         Var::lambda};
  std::string out;
  for (Var v : print_order) {
    auto e = (*this)[v];
    if (e == 0) continue;
    if (!out.empty()) out += "*";
    out += var_name(v);
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

int compare_degrevlex(const Monomial& a, const Monomial& b) {
  auto da = a.degree();
  auto db = b.degree();
  if (da != db) return da > db ? 1 : -1;
  for (std::size_t i = kNumVars; i-- > 0;) {
    if (a.at(i) != b.at(i)) return a.at(i) < b.at(i) ? 1 : -1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// MultiPoly

MultiPoly::MultiPoly(const GaussRat& c) {
  if (!c.is_zero()) terms_.emplace(Monomial{}, c);
}

MultiPoly::MultiPoly(const GaussRat& c, const Monomial& m) {
  if (!c.is_zero()) terms_.emplace(m, c);
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

const Monomial& MultiPoly::lead_monomial() const {
  if (terms_.empty()) throw InternalError("leading monomial of zero polynomial");
  return terms_.begin()->first;
}

const GaussRat& MultiPoly::lead_coeff() const {
  if (terms_.empty()) throw InternalError("leading coefficient of zero polynomial");
  return terms_.begin()->second;
}

GaussRat MultiPoly::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? GaussRat() : it->second;
}

std::uint64_t MultiPoly::total_degree() const {
  std::uint64_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

std::uint32_t MultiPoly::degree_in(Var v) const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m[v]);
  return d;
}

void MultiPoly::add_term(const Monomial& m, const GaussRat& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const GaussRat& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, k] : terms_) k *= c;
  return *this;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) {
  *this = *this * o;
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  const MultiPoly& big = a.size() >= b.size() ? a : b;
  const MultiPoly& small = a.size() >= b.size() ? b : a;
  MultiPoly r;
  for (const auto& [m, c] : small.terms_) r.add_scaled(c, m, big);
  return r;
}

void MultiPoly::add_scaled(const GaussRat& c, const Monomial& m, const MultiPoly& b) {
  if (c.is_zero()) return;
  for (const auto& [bm, bc] : b.terms_) add_term(m * bm, c * bc);
}

MultiPoly MultiPoly::mul_term(const GaussRat& c, const Monomial& m) const {
  MultiPoly r;
  if (c.is_zero()) return r;
  auto hint = r.terms_.end();
  // Multiplication by a monomial preserves the order, so insertion is linear.
  for (const auto& [bm, bc] : terms_) hint = std::next(r.terms_.emplace_hint(hint, m * bm, c * bc));
  return r;
}

MultiPoly MultiPoly::pow(long e) const {
  if (e < 0) throw InvalidInput("negative exponent in pow");
  MultiPoly result(1);
  MultiPoly base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

MultiPoly MultiPoly::derive(Var v) const {
  MultiPoly r;
  for (const auto& [m, c] : terms_) {
    auto e = m[v];
    if (e == 0) continue;
    Monomial dm = m;
    dm[v] = e - 1;
    r.add_term(dm, c * GaussRat(static_cast<long>(e)));
  }
  return r;
}

MultiPoly MultiPoly::substitute(const std::map<Var, MultiPoly>& assignment) const {
  // Powers of each image are cached; most calls raise the same image many times.
  std::map<std::pair<Var, std::uint32_t>, MultiPoly> cache;
  auto power = [&](Var v, std::uint32_t e) -> const MultiPoly& {
    auto key = std::make_pair(v, e);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    MultiPoly p = assignment.at(v).pow(e);
    return cache.emplace(key, std::move(p)).first->second;
  };
  MultiPoly r;
  for (const auto& [m, c] : terms_) {
    Monomial rest = m;
    MultiPoly term(c);
    for (const auto& [v, img] : assignment) {
      auto e = m[v];
      if (e == 0) continue;
      rest[v] = 0;
      term = term * power(v, e);
    }
    r += term.mul_term(GaussRat(1), rest);
  }
  return r;
}

Complex MultiPoly::eval(const std::map<Var, Complex>& point) const {
  std::array<std::vector<Complex>, kNumVars> powers;
  for (std::size_t i = 0; i < kNumVars; ++i) {
    auto deg = degree_in(static_cast<Var>(i));
    if (deg == 0) continue;
    auto it = point.find(static_cast<Var>(i));
    if (it == point.end())
      throw InvalidInput("unassigned variable " + std::string(var_name(static_cast<Var>(i))));
    powers[i].resize(deg + 1);
    powers[i][0] = 1.0;
    for (std::uint32_t e = 1; e <= deg; ++e) powers[i][e] = powers[i][e - 1] * it->second;
  }
  Complex acc = 0.0;
  for (const auto& [m, c] : terms_) {
    Complex t = c.to_complex();
    for (std::size_t i = 0; i < kNumVars; ++i)
      if (m.at(i) > 0) t *= powers[i][m.at(i)];
    acc += t;
  }
  return acc;
}

GaussRat MultiPoly::eval_exact(const std::map<Var, GaussRat>& point) const {
  std::array<std::vector<GaussRat>, kNumVars> powers;
  for (std::size_t i = 0; i < kNumVars; ++i) {
    auto deg = degree_in(static_cast<Var>(i));
    if (deg == 0) continue;
    auto it = point.find(static_cast<Var>(i));
    if (it == point.end())
      throw InvalidInput("unassigned variable " + std::string(var_name(static_cast<Var>(i))));
    powers[i].resize(deg + 1);
    powers[i][0] = GaussRat(1);
    for (std::uint32_t e = 1; e <= deg; ++e) powers[i][e] = powers[i][e - 1] * it->second;
  }
  GaussRat acc;
  for (const auto& [m, c] : terms_) {
    GaussRat t = c;
    for (std::size_t i = 0; i < kNumVars; ++i)
      if (m.at(i) > 0) t *= powers[i][m.at(i)];
    acc += t;
  }
  return acc;
}

std::string MultiPoly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    std::string t;
    if (m.is_one()) {
      t = c.str();
    } else if (c.is_one()) {
      t = m.str();
    } else if (c == GaussRat(-1)) {
      t = "-" + m.str();
    } else {
      t = c.str() + "*" + m.str();
    }
    if (first) {
      out = t;
      first = false;
    } else if (t.front() == '-') {
      out += " - " + t.substr(1);
    } else {
      out += " + " + t;
    }
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const MultiPoly& p) { return os << p.str(); }

std::optional<MultiPoly> exact_divide(const MultiPoly& p, const MultiPoly& d) {
  if (d.is_zero()) throw InvalidInput("division by the zero polynomial");
  MultiPoly rem = p;
  MultiPoly q;
  const Monomial& dl = d.lead_monomial();
  GaussRat dinv = d.lead_coeff().inverse();
  while (!rem.is_zero()) {
    const Monomial& rl = rem.lead_monomial();
    if (!dl.divides(rl)) return std::nullopt;
    Monomial m = rl / dl;
    GaussRat c = rem.lead_coeff() * dinv;
    q += MultiPoly(c, m);
    rem.add_scaled(-c, m, d);
  }
  if (!(q * d == p)) throw InternalError("exact_divide re-multiplication check failed");
  return q;
}

std::optional<MultiPoly> divide_by_monomial(const MultiPoly& p, const Monomial& m) {
  MultiPoly r;
  for (const auto& [pm, c] : p.terms()) {
    if (!m.divides(pm)) return std::nullopt;
    r += MultiPoly(c, pm / m);
  }
  return r;
}

// ---------------------------------------------------------------------------
// UniPoly

UniPoly::UniPoly(std::vector<GaussRat> coeffs, Var var) : coeffs_(std::move(coeffs)), var_(var) {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

UniPoly UniPoly::from_multi(const MultiPoly& p, Var var) {
  std::vector<GaussRat> c;
  for (const auto& [m, k] : p.terms()) {
    for (std::size_t i = 0; i < kNumVars; ++i) {
      if (static_cast<Var>(i) != var && m.at(i) != 0)
        throw InvalidInput("polynomial must be univariate in " + std::string(var_name(var)) +
                           ": " + p.str());
    }
    auto e = m[var];
    if (c.size() <= e) c.resize(e + 1);
    c[e] = k;
  }
  return {std::move(c), var};
}

GaussRat UniPoly::eval(const GaussRat& t) const {
  GaussRat acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Complex UniPoly::eval(Complex t) const {
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + it->to_complex();
  return acc;
}

UniPoly UniPoly::derivative() const {
  std::vector<GaussRat> d;
  for (std::size_t i = 1; i < coeffs_.size(); ++i)
    d.push_back(coeffs_[i] * GaussRat(static_cast<long>(i)));
  return {std::move(d), var_};
}

MultiPoly UniPoly::to_multi() const {
  MultiPoly r;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    r += MultiPoly(coeffs_[i], Monomial::var(var_, static_cast<std::uint32_t>(i)));
  return r;
}

std::vector<Complex> UniPoly::complex_coeffs() const {
  std::vector<Complex> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c.to_complex());
  return out;
}

namespace {

UniPoly uni_rem(UniPoly a, const UniPoly& b) {
  auto ac = a.coeffs();
  const auto& bc = b.coeffs();
  GaussRat binv = bc.back().inverse();
  while (ac.size() >= bc.size() && !ac.empty()) {
    GaussRat f = ac.back() * binv;
    std::size_t shift = ac.size() - bc.size();
    for (std::size_t i = 0; i < bc.size(); ++i) ac[shift + i] -= f * bc[i];
    while (!ac.empty() && ac.back().is_zero()) ac.pop_back();
  }
  return {std::move(ac), a.var()};
}

}  // namespace

UniPoly uni_gcd(const UniPoly& a, const UniPoly& b) {
  UniPoly r0 = a;
  UniPoly r1 = b;
  while (!r1.is_zero()) {
    UniPoly r2 = uni_rem(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r2);
  }
  if (r0.is_zero()) return r0;
  auto c = r0.coeffs();
  GaussRat inv = c.back().inverse();
  for (auto& k : c) k *= inv;
  return {std::move(c), r0.var()};
}

bool simple_roots(const UniPoly& p) {
  if (p.is_zero()) throw InvalidInput("simple_roots of the zero polynomial");
  return uni_gcd(p, p.derivative()).degree() == 0;
}

std::vector<Complex> uni_roots(const UniPoly& p) {
  if (p.is_zero()) throw InvalidInput("roots of the zero polynomial");
  long n = p.degree();
  if (n <= 0) return {};
  auto c = p.complex_coeffs();
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (long i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (long i = 0; i < n; ++i) companion(i, n - 1) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Complex> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  // One Newton polish per root against the original coefficients.
  auto dp = p.derivative();
  for (auto& r : roots) {
    Complex d = dp.eval(r);
    if (std::abs(d) > 1e-300) r -= p.eval(r) / d;
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : std::arg(a) < std::arg(b);
  });
  return roots;
}

namespace {

Rational rationalize(double value, long max_den) {
  // Best rational approximation by continued fractions.
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = value;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(x);
    if (std::abs(a) > 1e15) break;
    long ai = static_cast<long>(a);
    long h2 = ai * h1 + h0;
    long k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    double frac = x - a;
    if (std::abs(frac) < 1e-12) break;
    x = 1.0 / frac;
  }
  if (k1 == 0) return Rational(0);
  return Rational(h1, k1);
}

}  // namespace

std::vector<GaussRat> exact_roots(const UniPoly& p) {
  std::vector<GaussRat> out;
  for (Complex r : uni_roots(p)) {
    GaussRat candidate(rationalize(r.real(), 100000), rationalize(r.imag(), 100000));
    if (!p.eval(candidate).is_zero()) continue;
    if (std::find(out.begin(), out.end(), candidate) == out.end()) out.push_back(candidate);
  }
  return out;
}

// ---------------------------------------------------------------------------
// MonoFrac

MonoFrac::MonoFrac(MultiPoly n, Monomial d) : num(std::move(n)), den(d) {}

MonoFrac operator+(const MonoFrac& a, const MonoFrac& b) {
  if (a.den == b.den) return MonoFrac(a.num + b.num, a.den).normalized();
  Monomial l = Monomial::lcm(a.den, b.den);
  MultiPoly n = a.num.mul_term(GaussRat(1), l / a.den);
  n += b.num.mul_term(GaussRat(1), l / b.den);
  return MonoFrac(std::move(n), l).normalized();
}

MonoFrac operator*(const MonoFrac& a, const MonoFrac& b) {
  return MonoFrac(a.num * b.num, a.den * b.den).normalized();
}

bool operator==(const MonoFrac& a, const MonoFrac& b) {
  return a.num.mul_term(GaussRat(1), b.den) == b.num.mul_term(GaussRat(1), a.den);
}

MonoFrac MonoFrac::derive(Var v) const {
  // d(N/m) = N'/m - e N/(m*v) where e is the exponent of v in m.
  auto e = den[v];
  MonoFrac d(num.derive(v), den);
  if (e == 0) return d.normalized();
  MonoFrac second(num * GaussRat(-static_cast<long>(e)), den * Monomial::var(v));
  return d + second;
}

MonoFrac MonoFrac::pow(long e) const {
  if (e < 0) throw InvalidInput("negative exponent in pow");
  Monomial d;
  for (long i = 0; i < e; ++i) d = d * den;
  return MonoFrac(num.pow(e), d).normalized();
}

MonoFrac MonoFrac::normalized() const {
  if (num.is_zero()) return {};
  if (den.is_one()) return *this;
  Monomial g = den;
  for (const auto& [m, c] : num.terms()) {
    g = Monomial::gcd(g, m);
    if (g.is_one()) return *this;
  }
  return MonoFrac(*divide_by_monomial(num, g), den / g);
}

std::string MonoFrac::str() const {
  if (den.is_one()) return num.str();
  return "(" + num.str() + ")/(" + den.str() + ")";
}

MonoFrac substitute_frac(const MultiPoly& p, const std::map<Var, MonoFrac>& assignment) {
  std::map<std::pair<Var, std::uint32_t>, MonoFrac> cache;
  auto power = [&](Var v, std::uint32_t e) -> const MonoFrac& {
    auto key = std::make_pair(v, e);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, assignment.at(v).pow(e)).first->second;
  };
  // Group terms by the part that gets substituted so each product is formed once.
  std::map<Monomial, MultiPoly, MonomialGreater> groups;
  for (const auto& [m, c] : p.terms()) {
    Monomial sub;
    Monomial rest = m;
    for (const auto& [v, img] : assignment) {
      sub[v] = m[v];
      rest[v] = 0;
    }
    groups[sub] += MultiPoly(c, rest);
  }
  MonoFrac acc;
  for (const auto& [sub, rest] : groups) {
    MonoFrac term(rest);
    for (const auto& [v, img] : assignment) {
      if (sub[v] > 0) term = term * power(v, sub[v]);
    }
    acc = acc + term;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  MultiPoly parse() {
    MultiPoly p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("syntax error at position " + std::to_string(pos_) + ": " + what + " in \"" +
                       std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  MultiPoly expr() {
    MultiPoly acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  MultiPoly term() {
    MultiPoly acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        MultiPoly d = unary();
        if (!d.is_constant() || d.is_zero()) {
          pos_ = at;
          fail("division only by non-zero constants");
        }
        acc *= d.lead_coeff().inverse();
      } else {
        return acc;
      }
    }
  }

  MultiPoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  MultiPoly power() {
    MultiPoly base = atom();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected non-negative integer exponent");
      long e = std::stol(std::string(text_.substr(start, pos_ - start)));
      return base.pow(e);
    }
    return base;
  }

  MultiPoly atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      MultiPoly inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
        fail("decimal literals are not exact; use a/b");
      return MultiPoly(GaussRat(Rational(std::string(text_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == "i") return MultiPoly(GaussRat::I());
      if (auto v = var_from_name(name)) return MultiPoly::var(*v);
      pos_ = start;
      fail("unknown symbol '" + std::string(name) + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(std::string_view text) { return Parser(text).parse(); }

UniPoly parse_unipoly(std::string_view text, Var var) {
  MultiPoly p = parse_poly(text);
  return UniPoly::from_multi(p, var);
}

ParsedScalar parse_scalar(std::string_view text) {
  try {
    MultiPoly p = parse_poly(text);
    if (p.is_constant()) {
      GaussRat c = p.is_zero() ? GaussRat() : p.lead_coeff();
      return {c, c.to_complex()};
    }
  } catch (const InvalidInput&) {
    // fall through to the floating form
  }
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  static const std::regex full(
      R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(?:([+-](?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)i)?$)");
  static const std::regex imag_only(R"(^([+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)i$)");
  std::smatch m;
  if (std::regex_match(s, m, imag_only)) {
    std::string im = m[1].str();
    double iv = (im.empty() || im == "+") ? 1.0 : (im == "-" ? -1.0 : std::stod(im));
    return {std::nullopt, Complex(0.0, iv)};
  }
  if (!s.empty() && std::regex_match(s, m, full)) {
    double re = m[1].matched ? std::stod(m[1].str()) : 0.0;
    double iv = 0.0;
    if (m[2].matched) {
      std::string im = m[2].str();
      iv = (im == "+") ? 1.0 : (im == "-" ? -1.0 : std::stod(im));
    }
    return {std::nullopt, Complex(re, iv)};
  }
  throw InvalidInput("cannot parse scalar \"" + std::string(text) + "\"");
}

std::string complex_str(Complex c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", c.real(), c.imag());
  return buf;
}

}  // namespace giz
