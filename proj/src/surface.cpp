#include "giz/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace giz {

// ---------------------------------------------------------------------------
// Surface

Surface::Surface(UniPoly P, UniPoly Q)
    : P_(std::move(P)),
      Q_(std::move(Q)),
      Px_(P_.to_multi()),
      Qu_(Q_.to_multi()),
      gens_{MultiPoly::var(Var::y) * MultiPoly::var(Var::u) - MultiPoly::var(Var::x) * Px_,
            MultiPoly::var(Var::x) * MultiPoly::var(Var::v) - MultiPoly::var(Var::u) * Qu_,
            MultiPoly::var(Var::y) * MultiPoly::var(Var::v) - Px_ * Qu_},
      ideal_({gens_.begin(), gens_.end()}) {
  simple_P_ = simple_roots(P_);
  simple_Q_ = simple_roots(Q_);
  p0_zero_ = P_.coeff(0).is_zero();
  q0_zero_ = Q_.coeff(0).is_zero();
  smooth_ = simple_P_ && simple_Q_ && !(p0_zero_ && q0_zero_);
}

Surface Surface::make(const UniPoly& P, const UniPoly& Q) {
  if (P.degree() < 1 || Q.degree() < 1)
    throw InvalidInput("P and Q must be non-constant (constant P or Q gives a Danielewski surface)");
  return Surface(P.with_var(Var::x), Q.with_var(Var::u));
}

std::string Surface::smoothness_diagnostic() const {
  std::vector<std::string> out;
  if (!simple_P_) out.push_back("non-simple roots: P has a repeated root");
  if (!simple_Q_) out.push_back("non-simple roots: Q has a repeated root");
  if (p0_zero_ && q0_zero_) out.push_back("P(0) = Q(0) = 0");
  std::string s;
  for (std::size_t i = 0; i < out.size(); ++i) s += (i ? "; " : "") + out[i];
  return s;
}

std::string Surface::label() const { return "S[P=" + P_.str() + ", Q=" + Q_.str() + "]"; }

// ---------------------------------------------------------------------------
// Points

SurfacePoint SurfacePoint::make_exact(const std::array<GaussRat, 4>& c) {
  SurfacePoint p;
  p.kind = Kind::exact;
  p.exact = c;
  for (std::size_t i = 0; i < 4; ++i) p.coords[i] = c[i].to_complex();
  return p;
}

SurfacePoint SurfacePoint::make_numeric(const std::array<Complex, 4>& c, double tol) {
  SurfacePoint p;
  p.kind = Kind::numeric;
  p.coords = c;
  p.residual_tol = tol;
  return p;
}

std::map<Var, Complex> SurfacePoint::as_map() const {
  std::map<Var, Complex> m;
  for (std::size_t i = 0; i < 4; ++i) m[kCoordVars[i]] = coords[i];
  return m;
}

std::map<Var, GaussRat> SurfacePoint::as_exact_map() const {
  if (!is_exact()) throw InvalidInput("exact coordinates requested for a numeric point");
  std::map<Var, GaussRat> m;
  for (std::size_t i = 0; i < 4; ++i) m[kCoordVars[i]] = exact[i];
  return m;
}

std::string SurfacePoint::str() const {
  std::string s;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i) s += ",";
    s += is_exact() ? exact[i].str() : complex_str(coords[i]);
  }
  return s;
}

SurfacePoint parse_point(std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4)
    throw InvalidInput("a point needs four coordinates x,y,u,v; got " +
                       std::to_string(parts.size()));
  std::array<ParsedScalar, 4> s;
  bool all_exact = true;
  for (std::size_t i = 0; i < 4; ++i) {
    s[i] = parse_scalar(parts[i]);
    all_exact = all_exact && s[i].exact.has_value();
  }
  if (all_exact) return SurfacePoint::make_exact({*s[0].exact, *s[1].exact, *s[2].exact, *s[3].exact});
  return SurfacePoint::make_numeric({s[0].value, s[1].value, s[2].value, s[3].value});
}

double residual(const Surface& S, const SurfacePoint& p) {
  auto pt = p.as_map();
  double r = 0.0;
  for (const auto& g : S.generators()) r = std::max(r, std::abs(g.eval(pt)));
  return r;
}

bool on_surface_exact(const Surface& S, const SurfacePoint& p) {
  auto pt = p.as_exact_map();
  for (const auto& g : S.generators())
    if (!g.eval_exact(pt).is_zero()) return false;
  return true;
}

void require_on_surface(const Surface& S, const SurfacePoint& p) {
  if (p.is_exact()) {
    if (!on_surface_exact(S, p)) throw InvalidInput("point " + p.str() + " is not on the surface");
    return;
  }
  double scale = 1.0;
  for (const auto& c : p.coords) scale = std::max(scale, std::abs(c));
  long d = std::max(S.P().degree(), S.Q().degree()) + 1;
  double r = residual(S, p);
  if (!(r <= p.residual_tol * std::pow(scale, static_cast<double>(d)))) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", r);
    throw InvalidInput("point " + p.str() + " is not on the surface (residual " + buf + ")");
  }
}

// ---------------------------------------------------------------------------
// Charts

std::string_view chart_name(ChartTag t) {
  switch (t) {
    case ChartTag::phi: return "phi";
    case ChartTag::psi: return "psi";
    case ChartTag::chi: return "chi";
  }
  return "?";
}

std::array<Var, 2> chart_params(ChartTag t) {
  switch (t) {
    case ChartTag::phi: return {Var::x, Var::y};
    case ChartTag::psi: return {Var::u, Var::v};
    case ChartTag::chi: return {Var::x, Var::u};
  }
  throw InternalError("unknown chart");
}

bool in_chart_domain(ChartTag t, Complex a, Complex b) {
  switch (t) {
    case ChartTag::phi:
    case ChartTag::psi: return b != 0.0;
    case ChartTag::chi: return a != 0.0 && b != 0.0;
  }
  return false;
}

bool in_chart_image(ChartTag t, const SurfacePoint& p, double eps) {
  auto nz = [&](std::size_t i) {
    return p.is_exact() ? !p.exact[i].is_zero() : std::abs(p.coords[i]) > eps;
  };
  switch (t) {
    case ChartTag::phi: return nz(kY);
    case ChartTag::psi: return nz(kV);
    case ChartTag::chi: return nz(kX) && nz(kU);
  }
  return false;
}

namespace {

/// Assembles a point from chart parameters and the two dependent values.
template <typename T>
std::array<T, 4> assemble(ChartTag t, T a, T b, T d1, T d2) {
  switch (t) {
    case ChartTag::phi: return {a, b, d1, d2};  // x, y | u, v
    case ChartTag::psi: return {d1, d2, a, b};  // u, v | x, y
    case ChartTag::chi: return {a, d1, b, d2};  // x, u | y, v
  }
  throw InternalError("unknown chart");
}

template <typename T, typename EvalP, typename EvalQ>
std::pair<T, T> dependents(ChartTag t, const T& a, const T& b, EvalP Pf, EvalQ Qf) {
  switch (t) {
    case ChartTag::phi: {
      T u = a * Pf(a) / b;
      return {u, Pf(a) * Qf(u) / b};
    }
    case ChartTag::psi: {
      T x = a * Qf(a) / b;
      return {x, Qf(a) * Pf(x) / b};
    }
    case ChartTag::chi: return {a * Pf(a) / b, b * Qf(b) / a};
  }
  throw InternalError("unknown chart");
}

}  // namespace

SurfacePoint chart_embed(const Surface& S, ChartTag t, const GaussRat& a, const GaussRat& b) {
  if (b.is_zero() || (t == ChartTag::chi && a.is_zero()))
    throw InvalidInput("parameters outside the domain of chart " + std::string(chart_name(t)));
  auto Pf = [&](const GaussRat& z) { return S.P().eval(z); };
  auto Qf = [&](const GaussRat& z) { return S.Q().eval(z); };
  auto [d1, d2] = dependents<GaussRat>(t, a, b, Pf, Qf);
  return SurfacePoint::make_exact(assemble<GaussRat>(t, a, b, d1, d2));
}

SurfacePoint chart_embed(const Surface& S, ChartTag t, Complex a, Complex b) {
  if (!in_chart_domain(t, a, b))
    throw InvalidInput("parameters outside the domain of chart " + std::string(chart_name(t)));
  auto Pf = [&](Complex z) { return S.P().eval(z); };
  auto Qf = [&](Complex z) { return S.Q().eval(z); };
  auto [d1, d2] = dependents<Complex>(t, a, b, Pf, Qf);
  return SurfacePoint::make_numeric(assemble<Complex>(t, a, b, d1, d2));
}

std::map<Var, MonoFrac> chart_coordinates(const Surface& S, ChartTag t) {
  auto over = [](MonoFrac f, Var v) {
    f.den = f.den * Monomial::var(v);
    return f.normalized();
  };
  const MultiPoly x = MultiPoly::var(Var::x), u = MultiPoly::var(Var::u);
  switch (t) {
    case ChartTag::phi: {
      MonoFrac uf = over(MonoFrac(x * S.Px()), Var::y);
      MonoFrac vf = over(substitute_frac(S.Px() * S.Qu(), {{Var::u, uf}}), Var::y);
      return {{Var::u, uf}, {Var::v, vf}};
    }
    case ChartTag::psi: {
      MonoFrac xf = over(MonoFrac(u * S.Qu()), Var::v);
      MonoFrac yf = over(substitute_frac(S.Px() * S.Qu(), {{Var::x, xf}}), Var::v);
      return {{Var::x, xf}, {Var::y, yf}};
    }
    case ChartTag::chi:
      return {{Var::y, over(MonoFrac(x * S.Px()), Var::u)},
              {Var::v, over(MonoFrac(u * S.Qu()), Var::x)}};
  }
  throw InternalError("unknown chart");
}

MonoFrac chart_pullback(const Surface& S, ChartTag t, const MultiPoly& f) {
  return substitute_frac(f, chart_coordinates(S, t)).normalized();
}

MonoFrac chart_pullback(const Surface& S, ChartTag t, const MonoFrac& f) {
  auto coords = chart_coordinates(S, t);
  MonoFrac num = substitute_frac(f.num, coords);
  MonoFrac den = substitute_frac(MultiPoly::monomial(f.den), coords);
  // den is a monomial in chart coordinates only if the substituted variables
  // do not occur in f.den; otherwise it is a quotient we cannot represent.
  if (den.num.size() != 1)
    throw InvalidInput("denominator does not pull back to a monomial in chart " +
                       std::string(chart_name(t)));
  const auto& [m, c] = *den.num.terms().begin();
  MonoFrac out(num.num * MultiPoly::monomial(den.den) * c.inverse(), num.den * m);
  return out.normalized();
}

// ---------------------------------------------------------------------------
// Ambient fields

bool AmbientField::polynomialized() const {
  return std::all_of(comps.begin(), comps.end(), [](const MonoFrac& c) { return c.is_polynomial(); });
}

bool AmbientField::is_zero() const {
  return std::all_of(comps.begin(), comps.end(), [](const MonoFrac& c) { return c.is_zero(); });
}

MonoFrac AmbientField::apply(const MultiPoly& f) const {
  MonoFrac acc;
  for (std::size_t i = 0; i < 4; ++i) {
    MultiPoly d = f.derive(kCoordVars[i]);
    if (d.is_zero() || comps[i].is_zero()) continue;
    acc = acc + comps[i] * MonoFrac(d);
  }
  return acc.normalized();
}

MonoFrac AmbientField::apply(const MonoFrac& f) const {
  MonoFrac acc;
  for (std::size_t i = 0; i < 4; ++i) {
    if (comps[i].is_zero()) continue;
    MonoFrac d = f.derive(kCoordVars[i]);
    if (d.is_zero()) continue;
    acc = acc + comps[i] * d;
  }
  return acc.normalized();
}

AmbientField AmbientField::scaled(const MonoFrac& f) const {
  AmbientField out;
  for (std::size_t i = 0; i < 4; ++i) out.comps[i] = (comps[i] * f).normalized();
  return out;
}

AmbientField operator+(const AmbientField& a, const AmbientField& b) {
  AmbientField out;
  for (std::size_t i = 0; i < 4; ++i) out.comps[i] = (a.comps[i] + b.comps[i]).normalized();
  return out;
}

AmbientField operator-(const AmbientField& a, const AmbientField& b) {
  AmbientField out;
  for (std::size_t i = 0; i < 4; ++i) out.comps[i] = (a.comps[i] - b.comps[i]).normalized();
  return out;
}

std::string AmbientField::str() const {
  static constexpr std::array<const char*, 4> names{"d/dx", "d/dy", "d/du", "d/dv"};
  std::string s;
  for (std::size_t i = 0; i < 4; ++i) {
    if (comps[i].is_zero()) continue;
    if (!s.empty()) s += " + ";
    s += "(" + comps[i].str() + ")*" + names[i];
  }
  return s.empty() ? "0" : s;
}

AmbientField ambient_bracket(const AmbientField& a, const AmbientField& b) {
  AmbientField out;
  for (std::size_t i = 0; i < 4; ++i)
    out.comps[i] = (a.apply(b.comps[i]) - b.apply(a.comps[i])).normalized();
  return out;
}

namespace {

std::size_t slot(Var v) {
  for (std::size_t i = 0; i < 4; ++i)
    if (kCoordVars[i] == v) return i;
  throw InternalError("not an ambient variable");
}

/// The dependent coordinate of a chart and the generator defining it; the
/// partial derivative of that generator in the coordinate is a monomial.
struct Step {
  Var dep;
  std::size_t gen;
};

std::array<Step, 2> steps(ChartTag t) {
  switch (t) {
    case ChartTag::phi: return {Step{Var::u, 0}, Step{Var::v, 2}};
    case ChartTag::psi: return {Step{Var::x, 1}, Step{Var::y, 2}};
    case ChartTag::chi: return {Step{Var::y, 0}, Step{Var::v, 1}};
  }
  throw InternalError("unknown chart");
}

}  // namespace

AmbientField pushforward_rational(const Surface& S, const ChartField& f) {
  AmbientField out;
  auto params = chart_params(f.chart);
  out.comps[slot(params[0])] = f.a.normalized();
  out.comps[slot(params[1])] = f.b.normalized();
  for (const Step& st : steps(f.chart)) {
    const MultiPoly& g = S.generators()[st.gen];
    MultiPoly pivot = g.derive(st.dep);
    if (pivot.size() != 1) throw InternalError("chart pivot is not a monomial");
    const auto& [pm, pc] = *pivot.terms().begin();
    MonoFrac acc;
    for (std::size_t i = 0; i < 4; ++i) {
      Var w = kCoordVars[i];
      if (w == st.dep) continue;
      MultiPoly dg = g.derive(w);
      if (dg.is_zero()) continue;
      acc = acc + MonoFrac(dg) * out.comps[i];
    }
    MonoFrac val(acc.num * (-pc.inverse()), acc.den * pm);
    out.comps[slot(st.dep)] = val.normalized();
  }
  return out;
}

std::optional<AmbientField> polynomialize(const Surface& S, const AmbientField& f) {
  AmbientField out;
  for (std::size_t i = 0; i < 4; ++i) {
    MonoFrac c = f.comps[i].normalized();
    auto g = S.ideal().divide_by_monomial_mod(c.num, c.den);
    if (!g) return std::nullopt;
    out.comps[i] = MonoFrac(*g);
  }
  return out;
}

AmbientField pushforward(const Surface& S, const ChartField& f) {
  AmbientField r = pushforward_rational(S, f);
  if (auto p = polynomialize(S, r)) return *p;
  return r;
}

bool fields_equal_mod(const Surface& S, const AmbientField& a, const AmbientField& b,
                      int max_power) {
  for (std::size_t i = 0; i < 4; ++i) {
    MonoFrac d = (a.comps[i] - b.comps[i]).normalized();
    if (d.is_zero()) continue;
    MultiPoly n = S.reduce(d.num);
    bool ok = n.is_zero();
    for (int k = 1; k <= max_power && !ok; ++k) {
      n = S.reduce(n.mul_term(GaussRat(1), d.den));
      ok = n.is_zero();
    }
    if (!ok) return false;
  }
  return true;
}

std::array<Complex, 4> eval_field(const AmbientField& f, const SurfacePoint& p) {
  auto pt = p.as_map();
  std::array<Complex, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    Complex den = MultiPoly::monomial(f.comps[i].den).eval(pt);
    if (den == 0.0) throw InvalidInput("field denominator vanishes at " + p.str());
    out[i] = f.comps[i].num.eval(pt) / den;
  }
  return out;
}

std::array<GaussRat, 4> eval_field_exact(const AmbientField& f, const SurfacePoint& p) {
  auto pt = p.as_exact_map();
  std::array<GaussRat, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    GaussRat den = MultiPoly::monomial(f.comps[i].den).eval_exact(pt);
    if (den.is_zero()) throw InvalidInput("field denominator vanishes at " + p.str());
    out[i] = f.comps[i].num.eval_exact(pt) / den;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tangent spaces

std::array<std::array<MultiPoly, 4>, 3> jacobian(const Surface& S) {
  std::array<std::array<MultiPoly, 4>, 3> J;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 4; ++c) J[r][c] = S.generators()[r].derive(kCoordVars[c]);
  return J;
}

namespace {

/// In-place reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref(std::vector<std::array<GaussRat, 4>>& rows) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < 4 && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c].is_zero()) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    GaussRat inv = rows[r][c].inverse();
    for (auto& e : rows[r]) e *= inv;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k == r || rows[k][c].is_zero()) continue;
      GaussRat f = rows[k][c];
      for (std::size_t j = 0; j < 4; ++j) rows[k][j] -= f * rows[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::size_t exact_rank(std::vector<std::array<GaussRat, 4>> vectors) {
  return rref(vectors).size();
}

std::array<std::array<GaussRat, 4>, 2> tangent_basis(const Surface& S, const SurfacePoint& p) {
  auto pt = p.as_exact_map();
  auto J = jacobian(S);
  std::vector<std::array<GaussRat, 4>> rows(3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 4; ++c) rows[r][c] = J[r][c].eval_exact(pt);
  auto pivots = rref(rows);
  if (pivots.size() != 2)
    throw InvalidInput("Jacobian has rank " + std::to_string(pivots.size()) + " at " + p.str() +
                       "; the surface is singular there");
  std::array<std::array<GaussRat, 4>, 2> basis{};
  std::size_t k = 0;
  for (std::size_t free = 0; free < 4; ++free) {
    if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
    std::array<GaussRat, 4> v{};
    v[free] = GaussRat(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -rows[r][free];
    basis[k++] = v;
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Symmetry

Surface swap_surface(const Surface& S) { return Surface::make(S.Q(), S.P()); }

SurfacePoint swap_point(const SurfacePoint& p) {
  SurfacePoint q = p;
  for (std::size_t i = 0; i < 4; ++i) {
    q.coords[i] = p.coords[(i + 2) % 4];
    q.exact[i] = p.exact[(i + 2) % 4];
  }
  return q;
}

namespace {

Monomial swap_monomial(const Monomial& m) {
  Monomial out = m;
  out[Var::x] = m[Var::u];
  out[Var::u] = m[Var::x];
  out[Var::y] = m[Var::v];
  out[Var::v] = m[Var::y];
  return out;
}

}  // namespace

MultiPoly swap_vars(const MultiPoly& p) {
  MultiPoly out;
  for (const auto& [m, c] : p.terms()) out += MultiPoly(c, swap_monomial(m));
  return out;
}

MonoFrac swap_vars(const MonoFrac& p) { return MonoFrac(swap_vars(p.num), swap_monomial(p.den)); }

AmbientField swap_field(const AmbientField& f) {
  AmbientField out;
  for (std::size_t i = 0; i < 4; ++i) out.comps[i] = swap_vars(f.comps[(i + 2) % 4]);
  return out;
}

ChartTag swap_chart(ChartTag t) {
  switch (t) {
    case ChartTag::phi: return ChartTag::psi;
    case ChartTag::psi: return ChartTag::phi;
    case ChartTag::chi: return ChartTag::chi;
  }
  return t;
}

}  // namespace giz
