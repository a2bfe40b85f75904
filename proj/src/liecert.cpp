#include "giz/liecert.hpp"

#include <algorithm>
#include <functional>

namespace giz {

std::string_view op_name(CertOp op) {
  switch (op) {
    case CertOp::leaf: return "leaf";
    case CertOp::shear_mult: return "shear-mult";
    case CertOp::bracket: return "bracket";
    case CertOp::lincomb: return "lincomb";
  }
  return "?";
}

std::string swap_catalog_id(std::string_view id) {
  static const std::vector<std::pair<std::string, std::string>> pairs{
      {"phi.y2_dx", "psi.v2_du"},     {"phi.xy_dx", "psi.uv_du"}, {"phi.xy_dy", "psi.uv_dv"},
      {"chi.xu_dx", "chi.xu_du"},     {"phi.y_dx_lnd", "psi.v_du_lnd"}};
  for (const auto& [a, b] : pairs) {
    if (id == a) return b;
    if (id == b) return a;
  }
  throw InvalidInput("unknown catalog id '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// CertGraph

std::size_t CertGraph::push(CertNode n) {
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

const Derivation& CertGraph::leaf_value(const std::string& id) {
  auto it = leaf_values_.find(id);
  if (it == leaf_values_.end()) it = leaf_values_.emplace(id, catalog_entry(S_, id).derivation).first;
  return it->second;
}

std::size_t CertGraph::leaf(std::string_view catalog_id) {
  std::string id(catalog_id);
  if (auto it = leaf_nodes_.find(id); it != leaf_nodes_.end()) return it->second;
  CertNode n;
  n.op = CertOp::leaf;
  n.catalog_id = id;
  n.value = leaf_value(id);
  n.label = id;
  std::size_t i = push(std::move(n));
  leaf_nodes_[id] = i;
  return i;
}

std::size_t CertGraph::shear(std::string_view catalog_id, const MultiPoly& f) {
  if (f.is_constant() && f == MultiPoly(1)) return leaf(catalog_id);
  std::string id(catalog_id);
  const Derivation& base = leaf_value(id);
  if (!shear_complete(S_, base, f))
    throw InvalidInput("shear criterion fails for (" + f.str() + ") * " + id);
  CertNode n;
  n.op = CertOp::shear_mult;
  n.catalog_id = id;
  n.f = f;
  n.value = scale(S_, f, base);
  n.label = "(" + f.str() + ")*" + id;
  return push(std::move(n));
}

std::size_t CertGraph::bracket(std::size_t a, std::size_t b) {
  CertNode n;
  n.op = CertOp::bracket;
  n.children = {a, b};
  n.value = giz::bracket(S_, node(a).value, node(b).value);
  n.label = "[" + node(a).label + ", " + node(b).label + "]";
  return push(std::move(n));
}

std::size_t CertGraph::lincomb(const std::vector<std::pair<GaussRat, std::size_t>>& terms) {
  CertNode n;
  n.op = CertOp::lincomb;
  std::vector<std::pair<MultiPoly, const Derivation*>> parts;
  for (const auto& [c, i] : terms) {
    if (c.is_zero()) continue;
    n.children.push_back(i);
    n.coeffs.push_back(c);
  }
  for (std::size_t t = 0; t < n.children.size(); ++t)
    parts.emplace_back(MultiPoly(n.coeffs[t]), &node(n.children[t]).value);
  n.value = combine(S_, parts);
  n.label = "lincomb(" + std::to_string(n.children.size()) + ")";
  return push(std::move(n));
}

std::optional<std::size_t> CertGraph::verify() const {
  std::map<std::string, Derivation> leaves;
  auto leaf_of = [&](const std::string& id) -> const Derivation& {
    auto it = leaves.find(id);
    if (it == leaves.end()) it = leaves.emplace(id, catalog_entry(S_, id).derivation).first;
    return it->second;
  };
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const CertNode& n = nodes_[i];
    for (std::size_t c : n.children)
      if (c >= i) return i;  // children must precede their parents
    if (!n.value.verify(S_)) return i;
    Derivation recomputed;
    switch (n.op) {
      case CertOp::leaf: recomputed = leaf_of(n.catalog_id); break;
      case CertOp::shear_mult:
        if (!shear_complete(S_, leaf_of(n.catalog_id), n.f)) return i;
        recomputed = scale(S_, n.f, leaf_of(n.catalog_id));
        break;
      case CertOp::bracket:
        if (n.children.size() != 2) return i;
        recomputed = giz::bracket(S_, nodes_[n.children[0]].value, nodes_[n.children[1]].value);
        break;
      case CertOp::lincomb: {
        if (n.coeffs.size() != n.children.size()) return i;
        std::vector<std::pair<MultiPoly, const Derivation*>> parts;
        for (std::size_t t = 0; t < n.children.size(); ++t)
          parts.emplace_back(MultiPoly(n.coeffs[t]), &nodes_[n.children[t]].value);
        recomputed = combine(S_, parts);
        break;
      }
    }
    if (recomputed.comps() != n.value.comps()) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> CertGraph::closure(const std::vector<std::size_t>& roots) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    if (seen.at(i)) continue;
    seen[i] = true;
    for (std::size_t c : nodes_[i].children) stack.push_back(c);
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------------------
// CertifiedSpan

CertifiedSpan::Vec CertifiedSpan::to_vec(const Derivation& d) {
  Vec v;
  for (std::size_t i = 0; i < 4; ++i)
    for (const auto& [m, c] : d.comp(i).terms()) v.emplace(Key{i, m}, c);
  return v;
}

void CertifiedSpan::eliminate(Vec& v, std::map<std::size_t, GaussRat>& used) const {
  auto it = v.begin();
  while (it != v.end()) {
    auto p = pivots_.find(it->first);
    if (p == pivots_.end()) {
      ++it;
      continue;
    }
    const Key key = it->first;
    const GaussRat c = it->second;
    const Row& row = rows_[p->second];
    for (const auto& [k, val] : row.vec) {
      auto [slot, fresh] = v.try_emplace(k, GaussRat());
      slot->second -= c * val;
      if (slot->second.is_zero()) v.erase(slot);
    }
    for (const auto& [e, w] : row.combo) {
      GaussRat& u = used[e];
      u += c * w;
    }
    it = v.lower_bound(key);
  }
  for (auto u = used.begin(); u != used.end();) u = u->second.is_zero() ? used.erase(u) : std::next(u);
}

void CertifiedSpan::add(std::size_t node) {
  if (element_pos_.count(node)) return;
  std::size_t pos = elements_.size();
  elements_.push_back(node);
  element_pos_[node] = pos;
  Vec v = to_vec(graph_.node(node).value);
  std::map<std::size_t, GaussRat> used;
  eliminate(v, used);
  if (v.empty()) return;
  GaussRat inv = v.begin()->second.inverse();
  Row row;
  for (auto& [k, c] : v) row.vec.emplace(k, c * inv);
  row.combo[pos] = inv;
  for (const auto& [e, w] : used) {
    GaussRat& slot = row.combo[e];
    slot -= w * inv;
  }
  pivots_[row.vec.begin()->first] = rows_.size();
  rows_.push_back(std::move(row));
}

CertifiedSpan::Solution CertifiedSpan::solve(const Derivation& target) const {
  Solution sol;
  Vec v = to_vec(target);
  std::map<std::size_t, GaussRat> used;
  eliminate(v, used);
  for (const auto& [k, c] : v) {
    MonoFrac& slot = sol.residual.comps[k.first];
    slot = slot + MonoFrac(MultiPoly(c, k.second));
  }
  sol.solved = v.empty();
  for (const auto& [e, w] : used) sol.terms.emplace_back(w, elements_[e]);
  return sol;
}

std::optional<std::size_t> CertifiedSpan::express(const Derivation& target,
                                                 const std::string& label) {
  Solution sol = solve(target);
  if (!sol.solved) return std::nullopt;
  std::size_t n = graph_.lincomb(sol.terms);
  if (graph_.node(n).value.comps() != target.comps())
    throw InternalError("span solution does not reproduce " + label);
  graph_.set_label(n, label);
  return n;
}

std::optional<std::size_t> CertifiedSpan::find(const std::string& key) const {
  auto it = names_.find(key);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Chart-level computations

namespace {

MonoFrac mf(const MultiPoly& p) { return MonoFrac(p); }

std::pair<MonoFrac, MonoFrac> pair_sub(const std::pair<MonoFrac, MonoFrac>& a,
                                       const std::pair<MonoFrac, MonoFrac>& b) {
  return {(a.first - b.first).normalized(), (a.second - b.second).normalized()};
}

std::pair<MonoFrac, MonoFrac> pair_scale(const GaussRat& c, const std::pair<MonoFrac, MonoFrac>& a) {
  return {(MonoFrac(MultiPoly(c)) * a.first).normalized(),
          (MonoFrac(MultiPoly(c)) * a.second).normalized()};
}

/// Substitutes u = xP(x)/y into a chi-chart function with no u in its denominator.
MonoFrac chi_to_phi(const Surface& S, const MonoFrac& f) {
  MonoFrac g = f.normalized();
  if (g.den[Var::u] != 0 || g.den[Var::y] != 0 || g.den[Var::v] != 0)
    throw InvalidInput("chi-chart expression is not representable in the phi chart");
  MonoFrac u(MultiPoly::var(Var::x) * S.Px(), Monomial::var(Var::y));
  MonoFrac num = substitute_frac(g.num, {{Var::u, u}});
  return MonoFrac(num.num, num.den * g.den).normalized();
}

}  // namespace

std::pair<MonoFrac, MonoFrac> to_phi_chart(const Surface& S, const ChartField& f) {
  switch (f.chart) {
    case ChartTag::phi:
      return {chart_pullback(S, ChartTag::phi, f.a), chart_pullback(S, ChartTag::phi, f.b)};
    case ChartTag::chi: {
      // In chi coordinates y = xP(x)/u, so dy = a (P + xP')/u - b xP/u^2.
      MonoFrac a = chart_pullback(S, ChartTag::chi, f.a);
      MonoFrac b = chart_pullback(S, ChartTag::chi, f.b);
      MultiPoly x = MultiPoly::var(Var::x);
      MonoFrac dydx(S.Px() + x * S.Px().derive(Var::x), Monomial::var(Var::u));
      MonoFrac dydu(-(x * S.Px()), Monomial::var(Var::u, 2));
      return {chi_to_phi(S, a), chi_to_phi(S, a * dydx + b * dydu)};
    }
    case ChartTag::psi: break;
  }
  throw InvalidInput("psi-chart fields have no phi-chart oracle");
}

std::pair<MonoFrac, MonoFrac> phi_chart_bracket(const std::pair<MonoFrac, MonoFrac>& a,
                                                const std::pair<MonoFrac, MonoFrac>& b) {
  auto apply = [](const std::pair<MonoFrac, MonoFrac>& v, const MonoFrac& f) {
    return v.first * f.derive(Var::x) + v.second * f.derive(Var::y);
  };
  return {(apply(a, b.first) - apply(b, a.first)).normalized(),
          (apply(a, b.second) - apply(b, a.second)).normalized()};
}

std::pair<MonoFrac, MonoFrac> phi_chart_form(const Surface& S, const AmbientField& f) {
  return {chart_pullback(S, ChartTag::phi, f.comps[kX]), chart_pullback(S, ChartTag::phi, f.comps[kY])};
}

// ---------------------------------------------------------------------------
// Identities

std::string_view verdict_kind_name(VerdictKind v) {
  switch (v) {
    case VerdictKind::exact: return "exact";
    case VerdictKind::scalar_match: return "scalar-match";
    case VerdictKind::mismatch: return "mismatch";
  }
  return "?";
}

std::string IdentityReport::verdict_str() const {
  if (verdict == VerdictKind::scalar_match) return "scalar-match(" + scalar.str() + ")";
  return std::string(verdict_kind_name(verdict));
}

bool IdentityReport::acceptable() const {
  if (!oracle_agrees) return false;
  if (verdict != VerdictKind::mismatch) return true;
  return absorbed.value_or(false);
}

std::vector<std::string> identity_names() { return {"D1", "D2", "D3", "E1", "E2"}; }

namespace {

struct IdentitySpec {
  std::vector<IdTerm> lhs;
  std::vector<IdTerm> rhs;
};

MultiPoly mono(std::initializer_list<std::pair<Var, long>> parts, GaussRat c = GaussRat(1)) {
  Monomial m;
  for (const auto& [v, e] : parts) {
    if (e < 0) throw InvalidInput("negative exponent in identity parameters");
    m[v] += static_cast<std::uint32_t>(e);
  }
  return MultiPoly(c, m);
}

ChartField phi(const MultiPoly& a, const MultiPoly& b) { return {ChartTag::phi, mf(a), mf(b)}; }

IdentitySpec identity_spec(const Surface& S, std::string_view name,
                           const std::map<std::string, long>& params) {
  auto get = [&](const char* key) {
    auto it = params.find(key);
    long v = it == params.end() ? 0 : it->second;
    if (v < 0) throw InvalidInput(std::string("parameter ") + key + " must be non-negative");
    return v;
  };
  const long j = get("j"), k = get("k"), l = get("l");
  using V = Var;
  const MultiPoly zero;
  if (name == "D1") {
    return {{{GaussRat(1), phi(mono({{V::y, k + 2}}), zero), phi(zero, mono({{V::x, 1}, {V::y, 1}}))},
             {GaussRat(k + 2), phi(mono({{V::x, 1}, {V::y, k + 2}}), zero), std::nullopt}},
            {{GaussRat(1), phi(zero, mono({{V::y, k + 3}})), std::nullopt}}};
  }
  if (name == "D2") {
    return {{{GaussRat::frac(1, k + 2), phi(zero, mono({{V::y, k + 3}})),
              phi(zero, mono({{V::x, j}, {V::y, 1}}))}},
            {{GaussRat(1), phi(zero, mono({{V::x, j}, {V::y, k + 3}})), std::nullopt}}};
  }
  if (name == "D3") {
    return {{{GaussRat::frac(1, k + 2), phi(zero, mono({{V::x, j}, {V::y, 1}})),
              phi(mono({{V::x, 1}, {V::y, k + 2}}), zero)},
             {GaussRat::frac(j, k + 2), phi(zero, mono({{V::x, j}, {V::y, k + 3}})), std::nullopt}},
            {{GaussRat(1), phi(mono({{V::x, j + 1}, {V::y, k + 2}}), zero), std::nullopt}}};
  }
  const MultiPoly x = MultiPoly::var(Var::x);
  const MultiPoly dxP = S.Px() + x * S.Px().derive(Var::x);  // P + xP'
  if (name == "E1") {
    ChartField chi{ChartTag::chi, mf(mono({{V::x, 1}, {V::u, l + 1}})), MonoFrac()};
    MultiPoly rx = mono({{V::x, j + 2}, {V::y, k + 3}, {V::u, l}}, GaussRat(l + 1)) * S.Px();
    MultiPoly ry = mono({{V::x, j}, {V::y, k + 5}, {V::u, l + 1}}, GaussRat(j)) +
                   mono({{V::x, j + 1}, {V::y, k + 4}, {V::u, l}}, GaussRat(k + l + 5)) * dxP;
    return {{{GaussRat(1), chi, phi(zero, mono({{V::x, j}, {V::y, k + 5}}))}},
            {{GaussRat(1), phi(rx, ry), std::nullopt}}};
  }
  if (name == "E2") {
    if (j < 1) throw InvalidInput("E2 needs j >= 1");
    return {{{GaussRat(1), phi(zero, mono({{V::x, j}, {V::y, k + 3}, {V::u, l + 1}})),
              phi(mono({{V::y, 2}}), zero)}},
            {{GaussRat(1),
              phi(mono({{V::x, j}, {V::y, k + 4}, {V::u, l + 1}}, GaussRat(2)),
                  mono({{V::x, j - 1}, {V::y, k + 5}, {V::u, l + 1}}, GaussRat(-j))),
              std::nullopt}}};
  }
  throw InvalidInput("unknown identity '" + std::string(name) + "'");
}

/// Reduces a rational ambient field to normal form when it polynomializes.
AmbientField tidy(const Surface& S, const AmbientField& f) {
  if (auto p = polynomialize(S, f)) return *p;
  AmbientField out;
  for (std::size_t i = 0; i < 4; ++i) out.comps[i] = f.comps[i].normalized();
  return out;
}

AmbientField eval_ambient(const Surface& S, const std::vector<IdTerm>& terms) {
  AmbientField acc;
  for (const auto& t : terms) {
    AmbientField a = pushforward(S, t.a);
    AmbientField v = t.b ? ambient_bracket(a, pushforward(S, *t.b)) : a;
    acc = acc + v.scaled(MonoFrac(MultiPoly(t.coeff)));
  }
  return tidy(S, acc);
}

std::pair<MonoFrac, MonoFrac> eval_chart(const Surface& S, const std::vector<IdTerm>& terms) {
  std::pair<MonoFrac, MonoFrac> acc;
  for (const auto& t : terms) {
    auto a = to_phi_chart(S, t.a);
    auto v = t.b ? phi_chart_bracket(a, to_phi_chart(S, *t.b)) : a;
    auto sc = pair_scale(t.coeff, v);
    acc = {(acc.first + sc.first).normalized(), (acc.second + sc.second).normalized()};
  }
  return acc;
}

bool pair_eq(const std::pair<MonoFrac, MonoFrac>& a, const std::pair<MonoFrac, MonoFrac>& b) {
  return a.first == b.first && a.second == b.second;
}

bool pair_zero(const std::pair<MonoFrac, MonoFrac>& a) {
  return a.first.is_zero() && a.second.is_zero();
}

/// c with a = c * b, if one exists.
std::optional<GaussRat> ratio(const std::pair<MonoFrac, MonoFrac>& a,
                              const std::pair<MonoFrac, MonoFrac>& b) {
  const MonoFrac* pa = nullptr;
  const MonoFrac* pb = nullptr;
  if (!b.first.is_zero()) {
    pa = &a.first;
    pb = &b.first;
  } else if (!b.second.is_zero()) {
    pa = &a.second;
    pb = &b.second;
  } else {
    return std::nullopt;
  }
  if (pa->is_zero()) return std::nullopt;
  MultiPoly an = pa->num.mul_term(GaussRat(1), pb->den);
  MultiPoly bn = pb->num.mul_term(GaussRat(1), pa->den);
  if (!(an.lead_monomial() == bn.lead_monomial())) return std::nullopt;
  GaussRat c = an.lead_coeff() / bn.lead_coeff();
  if (!pair_eq(a, pair_scale(c, b))) return std::nullopt;
  return c;
}

}  // namespace

IdentityReport verify_identity(const Surface& S, std::string_view name,
                               const std::map<std::string, long>& params) {
  IdentitySpec spec = identity_spec(S, name, params);
  IdentityReport r;
  r.name = std::string(name);
  r.params = params;
  r.lhs = eval_ambient(S, spec.lhs);
  r.rhs = eval_ambient(S, spec.rhs);
  r.difference = tidy(S, r.lhs - r.rhs);
  r.lhs_chart = phi_chart_form(S, r.lhs);
  r.rhs_chart = phi_chart_form(S, r.rhs);
  r.difference_chart = pair_sub(r.lhs_chart, r.rhs_chart);
  // Independent route: the same expression evaluated with the two-variable
  // bracket in the phi chart.
  r.oracle_agrees = pair_eq(eval_chart(S, spec.lhs), r.lhs_chart) &&
                    pair_eq(eval_chart(S, spec.rhs), r.rhs_chart);
  if (pair_zero(r.difference_chart)) {
    r.verdict = VerdictKind::exact;
  } else if (auto c = ratio(r.lhs_chart, r.rhs_chart)) {
    r.verdict = VerdictKind::scalar_match;
    r.scalar = *c;
  } else {
    r.verdict = VerdictKind::mismatch;
  }
  return r;
}

bool absorb(const CertifiedSpan& span, IdentityReport& report) {
  bool ok = false;
  if (report.difference.polynomialized()) {
    if (auto d = tangency_check(span.surface(), report.difference)) ok = span.contains(*d);
  }
  report.absorbed = ok;
  return ok;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::ordered_json field_json(const AmbientField& f) {
  nlohmann::ordered_json j;
  static constexpr std::array<const char*, 4> names{"x", "y", "u", "v"};
  for (std::size_t i = 0; i < 4; ++i) j[names[i]] = f.comps[i].str();
  return j;
}

}  // namespace

nlohmann::ordered_json report_json(const IdentityReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) j["params"][k] = v;
  j["verdict"] = r.verdict_str();
  j["oracle_agrees"] = r.oracle_agrees;
  if (r.absorbed) j["absorbed"] = *r.absorbed;
  j["difference"] = field_json(r.difference);
  j["difference_phi_chart"] = {{"dx", r.difference_chart.first.str()},
                               {"dy", r.difference_chart.second.str()}};
  return j;
}

nlohmann::ordered_json cert_json(const CertGraph& g, const std::vector<std::size_t>& roots) {
  nlohmann::ordered_json j;
  j["schema"] = "cert-v1";
  j["surface"] = {{"P", g.surface().P().str()}, {"Q", g.surface().Q().str()}};
  auto nodes = g.closure(roots);
  std::map<std::size_t, std::size_t> renumber;
  for (std::size_t i = 0; i < nodes.size(); ++i) renumber[nodes[i]] = i;
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t i : nodes) {
    const CertNode& n = g.node(i);
    nlohmann::ordered_json o;
    o["id"] = renumber[i];
    o["op"] = op_name(n.op);
    auto ch = nlohmann::ordered_json::array();
    for (std::size_t c : n.children) ch.push_back(renumber.at(c));
    o["children"] = ch;
    if (n.op == CertOp::lincomb) {
      auto cs = nlohmann::ordered_json::array();
      for (const auto& c : n.coeffs) cs.push_back(c.str());
      o["coeff"] = cs;
    }
    if (!n.catalog_id.empty()) o["catalog_id"] = n.catalog_id;
    if (n.op == CertOp::shear_mult) o["f"] = n.f.str();
    o["label"] = n.label;
    o["value"] = field_json(n.value.field());
    arr.push_back(o);
  }
  j["nodes"] = arr;
  auto rs = nlohmann::ordered_json::array();
  for (std::size_t r : roots) rs.push_back(renumber.at(r));
  j["roots"] = rs;
  return j;
}

}  // namespace giz
