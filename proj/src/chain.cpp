#include <algorithm>

#include "giz/liecert.hpp"

namespace giz {

namespace {

enum class Side { phi, psi };

/// Mirrors phi-side data onto the psi side through x<->u, y<->v.
struct Mirror {
  Side side;
  MultiPoly f(const MultiPoly& p) const { return side == Side::phi ? p : swap_vars(p); }
  std::string id(const std::string& s) const { return side == Side::phi ? s : swap_catalog_id(s); }
  std::string prefix() const { return side == Side::phi ? "phi." : "psi."; }
  /// A phi- or chi-chart field written for the phi side.
  ChartField field(const ChartField& cf) const {
    if (side == Side::phi) return cf;
    if (cf.chart == ChartTag::phi) return {ChartTag::psi, swap_vars(cf.a), swap_vars(cf.b)};
    if (cf.chart == ChartTag::chi) return {ChartTag::chi, swap_vars(cf.b), swap_vars(cf.a)};
    throw InternalError("mirror of a psi-chart field");
  }
};

MultiPoly mono(long a, long b, long c = 0) {
  Monomial m;
  m[Var::x] = static_cast<std::uint32_t>(a);
  m[Var::y] = static_cast<std::uint32_t>(b);
  m[Var::u] = static_cast<std::uint32_t>(c);
  return MultiPoly::monomial(m);
}

std::string key(const std::string& kind, std::initializer_list<long> idx) {
  std::string s = kind + "[";
  bool first = true;
  for (long i : idx) {
    s += (first ? "" : ",") + std::to_string(i);
    first = false;
  }
  return s + "]";
}

class Chain {
 public:
  Chain(BuiltSpan& b, Side side) : b_(b), sp_(b.span), g_(b.span.graph()), S_(b.span.surface()), mir_{side} {}

  Derivation target(const MultiPoly& a, const MultiPoly& bcoef) {
    AmbientField f = pushforward(S_, mir_.field(ChartField{ChartTag::phi, MonoFrac(a), MonoFrac(bcoef)}));
    return certify(S_, f, "chain target");
  }

  std::size_t seed(const std::string& id, const MultiPoly& f, const std::string& name) {
    std::size_t n = g_.shear(mir_.id(id), mir_.f(f));
    sp_.add(n);
    sp_.name(mir_.prefix() + name, n);
    return n;
  }

  /// Turns `node` into a node equal to alpha^{-1} times its intended value
  /// `alpha * t`, absorbing any discrepancy through the span.
  std::optional<std::size_t> realize(std::size_t node, const Derivation& t, const GaussRat& alpha,
                                     const std::string& name, const std::map<std::string, long>& params) {
    const Derivation& val = g_.node(node).value;
    Derivation at = scale(S_, MultiPoly(alpha), t);
    StepRecord rec{mir_.prefix() + name, params, ""};
    std::optional<std::size_t> out;
    if (val.comps() == at.comps()) {
      rec.verdict = "exact";
      out = alpha.is_one() ? node : g_.lincomb({{alpha.inverse(), node}});
    } else if (auto c = scalar_of(val, t)) {
      rec.verdict = "scalar(" + (*c / alpha).str() + ")";
      out = g_.lincomb({{c->inverse(), node}});
    } else {
      Derivation diff = combine(S_, {{MultiPoly(1), &val}, {MultiPoly(-1), &at}});
      auto sol = sp_.solve(diff);
      if (sol.solved) {
        rec.verdict = "absorbed(" + std::to_string(sol.terms.size()) + ")";
        std::vector<std::pair<GaussRat, std::size_t>> terms{{alpha.inverse(), node}};
        for (const auto& [c, e] : sol.terms) terms.emplace_back(-c * alpha.inverse(), e);
        out = g_.lincomb(terms);
      } else {
        rec.verdict = "failed";
        b_.findings.push_back(mir_.prefix() + name + ": remainder " + sol.residual.str());
      }
    }
    b_.steps.push_back(rec);
    if (out) {
      if (g_.node(*out).value.comps() != t.comps())
        throw InternalError("realized node differs from its target in " + name);
      sp_.add(*out);
    }
    return out;
  }

  std::optional<GaussRat> scalar_of(const Derivation& a, const Derivation& b) const {
    for (std::size_t i = 0; i < 4; ++i) {
      if (b.comp(i).is_zero()) continue;
      if (a.comp(i).is_zero()) return std::nullopt;
      const auto& [mb, cb] = *b.comp(i).terms().begin();
      const auto& [ma, ca] = *a.comp(i).terms().begin();
      if (!(ma == mb)) return std::nullopt;
      GaussRat c = ca / cb;
      for (std::size_t j = 0; j < 4; ++j)
        if (!(a.comp(j) == b.comp(j) * c)) return std::nullopt;
      return c;
    }
    return std::nullopt;
  }

  void run(long amax, long bmax, const SpanRanges& r) {
    // Seeds: y^{k+2} dx, x y^{k+1} dx, x^{j+1} y dy and chi x u^{l+1} dx.
    for (long k = 0; k + 2 <= bmax; ++k) y2_[k] = seed("phi.y2_dx", mono(0, k), key("y2dx", {k}));
    for (long k = 0; k + 1 <= bmax; ++k) xy_[k] = seed("phi.xy_dx", mono(0, k), key("xydx", {k}));
    for (long j = 0; j + 1 <= amax; ++j) xj_[j] = seed("phi.xy_dy", mono(j, 0), key("xydy", {j}));
    for (long l = 0; l <= r.l + 1; ++l) ch_[l] = seed("chi.xu_dx", mono(0, 0, l), key("chi", {l}));

    // y^{k+3} dy = [y^{k+2} dx, x y dy] + (k+2) x y^{k+2} dx.
    for (long k = 0; k + 3 <= bmax; ++k) {
      std::size_t br = g_.bracket(y2_[k], xj_[0]);
      std::size_t lc = g_.lincomb({{GaussRat(1), br}, {GaussRat(k + 2), xy_[k + 1]}});
      if (auto n = realize(lc, target(MultiPoly(), mono(0, k + 3)), GaussRat(1), "D1", {{"k", k}})) {
        dy_[{0, k}] = *n;
        sp_.name(mir_.prefix() + key("dy", {0, k + 3}), *n);
      }
    }
    // x^j y^{k+3} dy = (k+2)^{-1} [y^{k+3} dy, x^j y dy].
    for (long j = 1; j <= amax; ++j)
      for (long k = 0; k + 3 <= bmax; ++k) {
        if (!dy_.count({0, k})) continue;
        std::size_t br = g_.bracket(dy_[{0, k}], xj_[j - 1]);
        std::size_t lc = g_.lincomb({{GaussRat::frac(1, k + 2), br}});
        if (auto n = realize(lc, target(MultiPoly(), mono(j, k + 3)), GaussRat(1), "D2",
                             {{"j", j}, {"k", k}})) {
          dy_[{j, k}] = *n;
          sp_.name(mir_.prefix() + key("dy", {j, k + 3}), *n);
        }
      }
    // x^{j+1} y^{k+2} dx = (k+2)^{-1} [x^j y dy, x y^{k+2} dx] + j (k+2)^{-1} x^j y^{k+3} dy.
    for (long j = 1; j + 1 <= amax; ++j)
      for (long k = 0; k + 3 <= bmax; ++k) {
        if (!dy_.count({j, k})) continue;
        std::size_t br = g_.bracket(xj_[j - 1], xy_[k + 1]);
        std::size_t lc = g_.lincomb({{GaussRat::frac(1, k + 2), br}, {GaussRat::frac(j, k + 2), dy_[{j, k}]}});
        if (auto n = realize(lc, target(mono(j + 1, k + 2), MultiPoly()), GaussRat(1), "D3",
                             {{"j", j}, {"k", k}}))
          sp_.name(mir_.prefix() + key("dx", {j + 1, k + 2}), *n);
      }

    // u-terms: [chi_*(x u^{l+1} dx), x^j y^{k+5} dy] carries j x^j y^{k+5} u^{l+1} dy.
    std::map<std::tuple<long, long, long>, std::size_t> e1;
    for (long j = 1; j <= r.j + 2; ++j)
      for (long k = 0; k <= r.k + 2; ++k)
        for (long l = 0; l <= r.l; ++l) {
          if (!dy_.count({j, k + 2})) continue;
          std::size_t br = g_.bracket(ch_[l], dy_[{j, k + 2}]);
          if (auto n = realize(br, target(MultiPoly(), mono(j, k + 5, l + 1)), GaussRat(j), "E1",
                               {{"j", j}, {"k", k}, {"l", l}})) {
            e1[{j, k, l}] = *n;
            sp_.name(mir_.prefix() + key("dyu", {j, k + 5, l + 1}), *n);
          }
        }
    // The same bracket against y^3 dy and y^4 dy elements reaches the low
    // y-degrees where E2's extra term lands; added to the span as computed.
    for (long j = 0; j <= amax; ++j)
      for (long k = 0; k < 2; ++k)
        for (long l = 0; l <= r.l + 1; ++l) {
          if (!dy_.count({j, k})) continue;
          std::size_t br = g_.bracket(ch_[l], dy_[{j, k}]);
          sp_.add(br);
          sp_.name(mir_.prefix() + key("low", {j, k + 3, l}), br);
        }
    // [x^j y^{k+3} u^{l+1} dy, y^2 dx] carries 2 x^j y^{k+4} u^{l+1} dx.
    for (long j = 1; j <= r.j + 2; ++j)
      for (long k = 2; k <= r.k + 2; ++k)
        for (long l = 0; l <= r.l; ++l) {
          auto it = e1.find({j, k - 2, l});
          if (it == e1.end()) continue;
          std::size_t br = g_.bracket(it->second, y2_[0]);
          if (auto n = realize(br, target(mono(j, k + 4, l + 1), MultiPoly()), GaussRat(2), "E2",
                               {{"j", j}, {"k", k}, {"l", l}}))
            sp_.name(mir_.prefix() + key("dxu", {j, k + 4, l + 1}), *n);
        }

    // Induction products x^{2+j} y^{7+k} u^{1+l} dx and dy.
    for (long j = 0; j <= r.j; ++j)
      for (long k = 0; k <= r.k; ++k)
        for (long l = 0; l <= r.l; ++l)
          for (int c = 0; c < 2; ++c) {
            MultiPoly coef = mono(2 + j, 7 + k, 1 + l);
            Derivation t = c == 0 ? target(coef, MultiPoly()) : target(MultiPoly(), coef);
            std::string name = key(c == 0 ? "ind_dx" : "ind_dy", {j, k, l});
            auto n = sp_.express(t, mir_.prefix() + name);
            b_.steps.push_back({mir_.prefix() + name, {{"j", j}, {"k", k}, {"l", l}},
                                n ? "in-span" : "failed"});
            if (n) {
              sp_.add(*n);
              sp_.name(mir_.prefix() + name, *n);
            } else {
              b_.findings.push_back(mir_.prefix() + name + " is not in the span");
            }
          }
  }

 private:
  BuiltSpan& b_;
  CertifiedSpan& sp_;
  CertGraph& g_;
  const Surface& S_;
  Mirror mir_;
  std::map<long, std::size_t> y2_, xy_, xj_, ch_;
  std::map<std::pair<long, long>, std::size_t> dy_;
};

}  // namespace

BuiltSpan build_span(const Surface& S, SpanRanges ranges) {
  if (!S.smooth()) throw InvalidInput("build_span needs a smooth surface: " + S.smoothness_diagnostic());
  BuiltSpan b{CertifiedSpan(S), {}, {}, ranges};
  for (const auto& e : catalog(S)) {
    std::size_t n = b.span.graph().leaf(e.id);
    b.span.add(n);
    b.span.name(e.id, n);
  }
  if (ranges.empty()) return b;
  const long d = std::max(S.P().degree(), S.Q().degree());
  const long amax = 4 + ranges.j + ranges.l + (ranges.l + 2) * d;
  const long bmax = 7 + std::max(ranges.k, ranges.m);
  Chain(b, Side::phi).run(amax, bmax, ranges);
  Chain(b, Side::psi).run(amax, bmax, ranges);
  // Cross terms: the other side's first chi seed against each low element.
  for (auto [mine, other] : {std::pair{"phi.", "psi."}, std::pair{"psi.", "phi."}}) {
    auto chi = b.span.find(std::string(other) + "chi[0]");
    if (!chi) continue;
    std::vector<std::pair<std::string, std::size_t>> low;
    for (const auto& [name, n] : b.span.names())
      if (name.starts_with(std::string(mine) + "low[")) low.emplace_back(name, n);
    for (const auto& [name, n] : low) {
      std::size_t br = b.span.graph().bracket(*chi, n);
      b.span.add(br);
      b.span.name("cross[" + std::string(other) + "chi[0]," + name + "]", br);
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Lambda and the final bracket

namespace {

MultiPoly var(Var v) { return MultiPoly::var(v); }

/// Largest e with m^e dividing f modulo the ideal (f != 0), and the quotient.
std::pair<std::uint32_t, MultiPoly> strip(const Surface& S, MultiPoly f, Var v, std::uint32_t cap = 64) {
  std::uint32_t e = 0;
  while (e < cap) {
    auto q = S.ideal().divide_by_monomial_mod(f, Monomial::var(v));
    if (!q || q->is_zero()) break;
    f = *q;
    ++e;
  }
  return {e, f};
}

}  // namespace

LambdaResult build_lambda(BuiltSpan& b, int j, int k, int l) {
  if (j < 0 || k < 0 || l < 0) throw InvalidInput("Lambda parameters must be non-negative");
  const Surface& S = b.span.surface();
  LambdaResult res;
  Monomial gm;
  gm[Var::u] = 2 + j;
  gm[Var::v] = 7 + k;
  gm[Var::x] = 1 + l;
  MultiPoly g = MultiPoly::monomial(gm);
  Derivation A = certify(S, pushforward(S, {ChartTag::psi, MonoFrac(g), MonoFrac()}), "Lambda du part");
  Derivation B = certify(S, pushforward(S, {ChartTag::psi, MonoFrac(), MonoFrac(g)}), "Lambda dv part");
  MultiPoly w = var(Var::u) * S.Qu().derive(Var::u) + S.Qu();  // uQ' + Q
  res.displayed = combine(S, {{var(Var::v), &A}, {w, &B}});
  res.displayed_x_part = res.displayed.comp(kX);
  // On the surface x = uQ(u)/v, so the multiplier x makes the d/dx parts cancel.
  res.lambda = combine(S, {{var(Var::x), &A}, {w, &B}});
  res.lambda_x_part = res.lambda.comp(kX);

  std::string label = "Lambda[" + std::to_string(j) + "," + std::to_string(k) + "," + std::to_string(l) + "]";
  if (auto n = b.span.express(res.lambda, label)) {
    res.node = *n;
    res.in_span = true;
    b.span.add(*n);
  } else {
    res.detail = "Lambda is not in the span";
    return res;
  }
  if (!res.lambda_x_part.is_zero()) {
    res.detail = "Lambda has a d/dx part: " + res.lambda_x_part.str();
    return res;
  }
  const MultiPoly& ly = res.lambda.comp(kY);
  if (ly.is_zero()) {
    res.detail = "Lambda vanishes";
    return res;
  }
  // Factorizations modulo the ideal are not unique (xv = uQ(u) and uy = xP(x)
  // trade one variable for another), so the required x u^2 v comes off first
  // and only then are further powers stripped, v before x before u.
  Monomial need;
  need[Var::x] = 1;
  need[Var::u] = 2;
  need[Var::v] = 1;
  auto q = S.ideal().divide_by_monomial_mod(ly, need);
  if (!q) {
    res.detail = "x u^2 v does not divide the d/dy part of Lambda";
    return res;
  }
  MultiPoly rest = *q;
  std::uint32_t ev, ex, eu;
  std::tie(ev, rest) = strip(S, rest, Var::v);
  std::tie(ex, rest) = strip(S, rest, Var::x);
  std::tie(eu, rest) = strip(S, rest, Var::u);
  res.x_exp = 1 + ex;
  res.u_exp = 2 + eu;
  res.v_exp = 1 + ev;
  res.R = rest;
  res.extracted = true;
  return res;
}

FinalResult final_generator(BuiltSpan& b, int j, int k, int l, int m) {
  if (j < 0 || k < 0 || l < 0 || m < 0) throw InvalidInput("parameters must be non-negative");
  const Surface& S = b.span.surface();
  FinalResult res;
  res.lambda = build_lambda(b, 0, m, 0);
  if (!res.lambda.in_span || !res.lambda.lambda_x_part.is_zero()) {
    res.detail = res.lambda.detail;
    return res;
  }
  std::optional<std::size_t> xnode;
  for (std::uint32_t e : {3u, 7u}) {
    Monomial xm;
    xm[Var::x] = 2 + j;
    xm[Var::y] = e + k;
    xm[Var::u] = 1 + l;
    AmbientField f = pushforward(S, {ChartTag::phi, MonoFrac(), MonoFrac(MultiPoly::monomial(xm))});
    if (!f.polynomialized()) continue;
    Derivation X = certify(S, f, "final operand");
    xnode = b.span.express(X, "x^" + std::to_string(2 + j) + "*y^" + std::to_string(e + k) + "*u^" +
                                  std::to_string(1 + l) + " d/dy");
    if (xnode) {
      res.first_operand_y_exp = e;
      break;
    }
  }
  if (!xnode) {
    res.detail = "first operand is not in the span";
    return res;
  }
  res.root = b.span.graph().bracket(*xnode, res.lambda.node);
  const Derivation& F = b.span.graph().node(res.root).value;
  Monomial fm;
  fm[Var::x] = 1 + j;
  fm[Var::y] = 1 + k;
  fm[Var::u] = 1 + l;
  fm[Var::v] = m;
  if (!F.comp(kX).is_zero()) {
    res.detail = "final bracket has a d/dx part";
    return res;
  }
  auto T = S.ideal().divide_by_monomial_mod(F.comp(kY), fm);
  if (!T) {
    res.detail = "x^{1+j} y^{1+k} u^{1+l} v^m does not divide the final coefficient: " + F.comp(kY).str();
    return res;
  }
  res.T = *T;
  res.factored = true;
  MultiPoly coeff = S.reduce(T->mul_term(GaussRat(1), fm));
  AmbientField expected = pushforward_rational(S, {ChartTag::phi, MonoFrac(), MonoFrac(coeff)});
  res.root_matches = fields_equal_mod(S, F.field(), expected, 4);
  if (res.T.is_zero()) res.detail = "T vanishes identically";
  return res;
}

bool generating_check(const Surface& S, const SurfacePoint& p0, const Derivation& mu) {
  if (!p0.is_exact()) throw InvalidInput("generating_check needs an exact point");
  require_on_surface(S, p0);
  if (p0.exact[kY].is_zero()) throw InvalidInput("generating_check needs y0 != 0");
  auto basis = tangent_basis(S, p0);
  auto m0 = eval_field_exact(mu.field(), p0);
  if (std::all_of(m0.begin(), m0.end(), [](const GaussRat& c) { return c.is_zero(); }))
    throw InvalidInput("mu vanishes at p0");
  AmbientField dx = pushforward_rational(S, {ChartTag::phi, MonoFrac(1), MonoFrac()});
  auto d0 = eval_field_exact(dx, p0);
  // Both vectors must be tangent.
  if (exact_rank({basis[0], basis[1], m0}) != 2 || exact_rank({basis[0], basis[1], d0}) != 2)
    throw InternalError("vector is not tangent at p0");
  GaussRat y2 = p0.exact[kY] * p0.exact[kY];
  std::array<GaussRat, 4> moved{};
  for (std::size_t i = 0; i < 4; ++i) moved[i] = m0[i] + y2 * d0[i];
  return exact_rank({m0, moved}) == 2;
}

}  // namespace giz
