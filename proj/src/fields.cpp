#include "giz/fields.hpp"

#include <algorithm>

namespace giz {

bool Derivation::is_zero() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const MultiPoly& c) { return c.is_zero(); });
}

AmbientField Derivation::field() const {
  AmbientField f;
  for (std::size_t i = 0; i < 4; ++i) f.comps[i] = MonoFrac(comps_[i]);
  return f;
}

MultiPoly Derivation::apply(const Surface& S, const MultiPoly& f) const {
  MultiPoly acc;
  for (std::size_t i = 0; i < 4; ++i) {
    if (comps_[i].is_zero()) continue;
    MultiPoly d = f.derive(kCoordVars[i]);
    if (!d.is_zero()) acc += comps_[i] * d;
  }
  return S.reduce(acc);
}

namespace {

MultiPoly raw_apply(const std::array<MultiPoly, 4>& comps, const MultiPoly& f) {
  MultiPoly acc;
  for (std::size_t i = 0; i < 4; ++i) {
    if (comps[i].is_zero()) continue;
    MultiPoly d = f.derive(kCoordVars[i]);
    if (!d.is_zero()) acc += comps[i] * d;
  }
  return acc;
}

}  // namespace

bool Derivation::verify(const Surface& S) const {
  const auto& g = S.generators();
  for (std::size_t i = 0; i < 3; ++i) {
    MultiPoly rhs;
    for (std::size_t j = 0; j < 3; ++j) rhs += witnesses_[i][j] * g[j];
    if (!(raw_apply(comps_, g[i]) == rhs)) return false;
  }
  for (const auto& c : comps_)
    if (!(S.reduce(c) == c)) return false;
  return true;
}

std::string Derivation::str() const { return field().str(); }

std::optional<Derivation> tangency_check(const Surface& S, const AmbientField& f) {
  if (!f.polynomialized()) throw InvalidInput("tangency_check needs a polynomialized field");
  Derivation d;
  for (std::size_t i = 0; i < 4; ++i) d.comps_[i] = S.reduce(f.comps[i].num);
  const auto& gb = S.ideal().basis();
  for (std::size_t i = 0; i < 3; ++i) {
    MultiPoly vg = raw_apply(d.comps_, S.generators()[i]);
    NFResult nf = normal_form(vg, gb);
    if (!nf.remainder.is_zero()) return std::nullopt;
    auto cof = source_cofactors(nf, gb);
    for (std::size_t j = 0; j < 3; ++j) d.witnesses_[i][j] = cof[j];
  }
  if (!d.verify(S)) throw InternalError("tangency witness failed re-verification");
  return d;
}

Derivation certify(const Surface& S, const AmbientField& f, std::string_view what) {
  auto d = tangency_check(S, f);
  if (!d) throw InternalError(std::string(what) + ": field is not tangent to the surface");
  return *d;
}

Derivation bracket(const Surface& S, const Derivation& a, const Derivation& b) {
  AmbientField out;
  for (std::size_t j = 0; j < 4; ++j)
    out.comps[j] = MonoFrac(S.reduce(raw_apply(a.comps(), b.comp(j)) - raw_apply(b.comps(), a.comp(j))));
  return certify(S, out, "bracket");
}

Derivation combine(const Surface& S,
                   const std::vector<std::pair<MultiPoly, const Derivation*>>& terms) {
  std::array<MultiPoly, 4> acc;
  for (const auto& [f, d] : terms)
    for (std::size_t j = 0; j < 4; ++j)
      if (!d->comp(j).is_zero()) acc[j] += f * d->comp(j);
  AmbientField out;
  for (std::size_t j = 0; j < 4; ++j) out.comps[j] = MonoFrac(acc[j]);
  return certify(S, out, "linear combination");
}

Derivation scale(const Surface& S, const MultiPoly& f, const Derivation& d) {
  return combine(S, {{f, &d}});
}

bool equal_mod(const Surface& S, const Derivation& a, const Derivation& b) {
  for (std::size_t j = 0; j < 4; ++j)
    if (!S.equal_mod(a.comp(j), b.comp(j))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Catalog

std::string_view reason_name(CompleteReason r) {
  switch (r) {
    case CompleteReason::basic: return "basic-complete";
    case CompleteReason::lnd: return "lnd";
    case CompleteReason::shear_product: return "shear-product";
  }
  return "?";
}

const std::vector<std::string>& catalog_ids() {
  static const std::vector<std::string> ids{"phi.y2_dx", "phi.xy_dx",   "phi.xy_dy",  "psi.v2_du",
                                            "psi.uv_du", "psi.uv_dv",   "chi.xu_dx",  "chi.xu_du",
                                            "phi.y_dx_lnd", "psi.v_du_lnd"};
  return ids;
}

ChartField catalog_chart_field(std::string_view id) {
  auto cf = [](ChartTag t, const char* a, const char* b) {
    return ChartField{t, MonoFrac(parse_poly(a)), MonoFrac(parse_poly(b))};
  };
  if (id == "phi.y2_dx") return cf(ChartTag::phi, "y^2", "0");
  if (id == "phi.xy_dx") return cf(ChartTag::phi, "x*y", "0");
  if (id == "phi.xy_dy") return cf(ChartTag::phi, "0", "x*y");
  if (id == "psi.v2_du") return cf(ChartTag::psi, "v^2", "0");
  if (id == "psi.uv_du") return cf(ChartTag::psi, "u*v", "0");
  if (id == "psi.uv_dv") return cf(ChartTag::psi, "0", "u*v");
  if (id == "chi.xu_dx") return cf(ChartTag::chi, "x*u", "0");
  if (id == "chi.xu_du") return cf(ChartTag::chi, "0", "x*u");
  if (id == "phi.y_dx_lnd") return cf(ChartTag::phi, "y", "0");
  if (id == "psi.v_du_lnd") return cf(ChartTag::psi, "v", "0");
  throw InvalidInput("unknown catalog id '" + std::string(id) + "'");
}

CatalogEntry catalog_entry(const Surface& S, std::string_view id) {
  ChartField cf = catalog_chart_field(id);
  bool lnd = id.ends_with("_lnd");
  if (id == "phi.y_dx_lnd" && !S.p0_zero())
    throw InvalidInput("phi.y_dx_lnd requires P(0) = 0");
  if (id == "psi.v_du_lnd" && !S.q0_zero())
    throw InvalidInput("psi.v_du_lnd requires Q(0) = 0");
  AmbientField f = pushforward(S, cf);
  if (!f.polynomialized())
    throw InternalError("catalog field " + std::string(id) + " did not polynomialize");
  return CatalogEntry{std::string(id), cf, certify(S, f, id),
                      lnd ? CompleteReason::lnd : CompleteReason::basic};
}

std::vector<CatalogEntry> catalog(const Surface& S) {
  std::vector<CatalogEntry> out;
  for (const auto& id : catalog_ids()) {
    if (id == "phi.y_dx_lnd" && !S.p0_zero()) continue;
    if (id == "psi.v_du_lnd" && !S.q0_zero()) continue;
    out.push_back(catalog_entry(S, id));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Completeness

bool shear_complete(const Surface& S, const Derivation& theta, const MultiPoly& f) {
  return theta.apply(S, theta.apply(S, f)).is_zero();
}

std::string_view verdict_name(LndVerdict v) {
  switch (v) {
    case LndVerdict::yes: return "yes";
    case LndVerdict::no: return "no";
    case LndVerdict::unknown: return "unknown";
  }
  return "?";
}

int default_lnd_cap(const Surface& S) {
  return static_cast<int>(4 * (S.P().degree() + S.Q().degree() + 2));
}

LndResult locally_nilpotent(const Surface& S, const Derivation& V, int cap) {
  LndResult res;
  // Eigen-pattern first: V(h) in (h) + I with V(h) != 0 rules out nilpotency.
  for (Var h : kCoordVars) {
    MultiPoly vh = V.apply(S, MultiPoly::var(h));
    if (vh.is_zero()) continue;
    if (auto g = S.ideal().divide_by_monomial_mod(vh, Monomial::var(h))) {
      res.verdict = LndVerdict::no;
      res.detail = "V(" + std::string(var_name(h)) + ") = (" + g->str() + ")*" +
                   std::string(var_name(h));
      return res;
    }
  }
  bool all = true;
  for (Var h : kCoordVars) {
    MultiPoly cur = MultiPoly::var(h);
    int k = 0;
    while (!cur.is_zero() && k < cap) {
      cur = V.apply(S, cur);
      ++k;
    }
    if (!cur.is_zero()) {
      all = false;
      break;
    }
    res.steps = std::max(res.steps, k);
  }
  res.verdict = all ? LndVerdict::yes : LndVerdict::unknown;
  return res;
}

AmbientField lnd_display_field(const Surface& S) {
  if (!S.p0_zero()) throw InvalidInput("the displayed LND form needs P(0) = 0");
  const MultiPoly x = MultiPoly::var(Var::x), u = MultiPoly::var(Var::u);
  const MultiPoly &P = S.Px(), &Q = S.Qu();
  MultiPoly dP = P.derive(Var::x), dQ = Q.derive(Var::u);
  auto Pox = exact_divide(P, x);
  if (!Pox) throw InternalError("x does not divide P although P(0) = 0");
  AmbientField f;
  f.comps = {MonoFrac(MultiPoly::var(Var::y)), MonoFrac(MultiPoly()), MonoFrac(P + x * dP),
             MonoFrac(dP * Q + dP * u * dQ + *Pox * u * dQ)};
  return f;
}

}  // namespace giz
