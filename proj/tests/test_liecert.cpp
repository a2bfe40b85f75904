#include <doctest.h>

#include "giz/liecert.hpp"
#include "test_support.hpp"

using namespace giz;
using giz::testing::P;

namespace {

Surface surf(const char* p, const char* q) {
  return Surface::make(parse_unipoly(p, Var::x), parse_unipoly(q, Var::u));
}

const BuiltSpan& default_span(const Surface& S) {
  static std::map<std::string, BuiltSpan> cache;
  auto it = cache.find(S.label());
  if (it == cache.end()) it = cache.emplace(S.label(), build_span(S, {})).first;
  return it->second;
}

MonoFrac frac_y(const MultiPoly& p, long ey) {
  if (ey >= 0) return MonoFrac(p * P("y").pow(ey));
  Monomial d;
  d[Var::y] = static_cast<std::uint32_t>(-ey);
  return MonoFrac(p, d);
}

}  // namespace

TEST_CASE("D1 is exact for k in 0..3") {
  for (auto [p, q] : {std::pair{"x - 1", "u - 1"}, std::pair{"x^2 + x - 3", "u^2 + 1"}}) {
    Surface S = surf(p, q);
    for (long k = 0; k <= 3; ++k) {
      auto r = verify_identity(S, "D1", {{"k", k}});
      CHECK(r.verdict == VerdictKind::exact);
      CHECK(r.oracle_agrees);
      CHECK(r.verdict_str() == "exact");
    }
  }
}

TEST_CASE("identity verdicts") {
  Surface S = surf("x - 1", "u - 1");
  // [y^3 dy, x y dy] = x y^3 dy - 3 x y^3 dy = -2 x y^3 dy.
  auto d2 = verify_identity(S, "D2", {{"j", 1}, {"k", 0}});
  CHECK(d2.verdict == VerdictKind::scalar_match);
  CHECK(d2.scalar == GaussRat(-1));
  CHECK(d2.verdict_str() == "scalar-match(-1)");
  CHECK(d2.oracle_agrees);
  CHECK(d2.acceptable());

  auto d3 = verify_identity(S, "D3", {{"j", 1}, {"k", 1}});
  CHECK(d3.verdict == VerdictKind::exact);
  auto e1 = verify_identity(S, "E1", {{"j", 1}, {"k", 0}, {"l", 0}});
  CHECK(e1.verdict == VerdictKind::exact);
  CHECK(e1.oracle_agrees);

  CHECK_THROWS_AS(verify_identity(S, "E2", {{"j", 0}, {"k", 0}, {"l", 0}}), InvalidInput);
  CHECK_THROWS_AS(verify_identity(S, "Z9", {}), InvalidInput);
}

TEST_CASE("E2 differs from its display by the du/dx term") {
  // In the phi chart u = x P(x) / y, so d/dx of u^{l+1} leaves
  // -(l+1) x^{j+l} P^l (P + x P') y^{k+4-l} dy behind.
  for (auto [p, q] : {std::pair{"x - 1", "u - 1"}, std::pair{"x^2 - 2", "u + 3"}}) {
    Surface S = surf(p, q);
    MultiPoly Px = S.Px(), dP = S.Px().derive(Var::x);
    for (long j = 1; j <= 2; ++j)
      for (long k = 0; k <= 2; ++k)
        for (long l = 0; l <= 2; ++l) {
          auto r = verify_identity(S, "E2", {{"j", j}, {"k", k}, {"l", l}});
          CAPTURE(j);
          CAPTURE(k);
          CAPTURE(l);
          MultiPoly c = P("x").pow(j + l) * Px.pow(l) * (Px + P("x") * dP) * MultiPoly(GaussRat(-(l + 1)));
          CHECK(r.verdict == VerdictKind::mismatch);
          CHECK(r.oracle_agrees);
          CHECK(r.difference_chart.first.normalized().num.is_zero());
          CHECK(r.difference_chart.second == frac_y(c, k + 4 - l));
        }
  }
  Surface S = surf("x - 1", "u - 1");
  auto r = verify_identity(S, "E2", {{"j", 1}, {"k", 0}, {"l", 0}});
  CHECK(r.difference_chart.second == MonoFrac(P("-2*x^2*y^4 + x*y^4")));
}

TEST_CASE("every identity is accepted for parameters in 0..2") {
  Surface S = surf("x - 1", "u - 1");
  const BuiltSpan& b = default_span(S);
  for (const auto& name : identity_names())
    for (long j = 0; j <= 2; ++j)
      for (long k = 0; k <= 2; ++k)
        for (long l = 0; l <= 2; ++l) {
          if (name == "E2" && j == 0) continue;
          auto r = verify_identity(S, name, {{"j", j}, {"k", k}, {"l", l}});
          if (r.verdict == VerdictKind::mismatch) absorb(b.span, r);
          CAPTURE(name);
          CAPTURE(j);
          CAPTURE(k);
          CAPTURE(l);
          CHECK(r.acceptable());
          CHECK(r.oracle_agrees);
          // The verdict recomputes from the two sides.
          if (r.verdict == VerdictKind::scalar_match)
            for (std::size_t i = 0; i < 4; ++i)
              CHECK(S.equal_mod(r.lhs.comps[i].num * MultiPoly::monomial(r.rhs.comps[i].den),
                                r.rhs.comps[i].num * MultiPoly::monomial(r.lhs.comps[i].den) *
                                    MultiPoly(r.scalar)));
        }
}

TEST_CASE("build_span") {
  Surface S = surf("x - 1", "u - 1");
  auto seeds = build_span(S, {-1, -1, -1, -1});
  CHECK(seeds.span.elements().size() == 8);
  CHECK(seeds.span.graph().size() == 8);
  CHECK(seeds.steps.empty());

  const BuiltSpan& b = default_span(S);
  CHECK(b.findings.empty());
  for (const auto& s : b.steps) CHECK(s.verdict != "failed");
  CHECK_FALSE(b.span.graph().verify());

  auto y3dy = certify(S, pushforward(S, {ChartTag::phi, MonoFrac(), MonoFrac(P("y^3"))}), "y3dy");
  CHECK(b.span.contains(y3dy));
  auto ind = certify(S, pushforward(S, {ChartTag::phi, MonoFrac(P("x^2*y^7*u")), MonoFrac()}), "ind");
  CHECK(b.span.contains(ind));
  auto far = certify(S, pushforward(S, {ChartTag::phi, MonoFrac(), MonoFrac(P("y^30"))}), "far");
  CHECK_FALSE(b.span.contains(far));
  CHECK(b.span.find("phi.dy[0,3]"));
  CHECK(b.span.find("psi.ind_dx[0,0,0]"));

  // Solving a random combination of elements reproduces it.
  std::mt19937 rng(5);
  const auto& els = b.span.elements();
  for (int t = 0; t < 5; ++t) {
    std::size_t a = els[rng() % els.size()], c = els[rng() % els.size()];
    const Derivation& A = b.span.graph().node(a).value;
    const Derivation& C = b.span.graph().node(c).value;
    Derivation target = combine(S, {{MultiPoly(GaussRat(3)), &A}, {MultiPoly(GaussRat(-2)), &C}});
    auto sol = b.span.solve(target);
    REQUIRE(sol.solved);
    std::vector<std::pair<MultiPoly, const Derivation*>> terms;
    for (const auto& [k, n] : sol.terms) terms.emplace_back(MultiPoly(k), &b.span.graph().node(n).value);
    CHECK(combine(S, terms).comps() == target.comps());
  }
}

TEST_CASE("psi side mirrors the phi side of the swapped surface") {
  Surface S = surf("x^2 - 2", "u - 1");
  Surface W = swap_surface(S);
  BuiltSpan a = build_span(S, {0, 0, 0, 0});
  BuiltSpan b = build_span(W, {0, 0, 0, 0});
  int compared = 0;
  for (const auto& [name, n] : a.span.names()) {
    if (!name.starts_with("psi.")) continue;
    bool leaf = std::ranges::find(catalog_ids(), name) != catalog_ids().end();
    auto m = b.span.find(leaf ? swap_catalog_id(name) : "phi." + name.substr(4));
    CAPTURE(name);
    REQUIRE(m);
    AmbientField mirrored = swap_field(b.span.graph().node(*m).value.field());
    CHECK(fields_equal_mod(S, a.span.graph().node(n).value.field(), mirrored, 1));
    ++compared;
  }
  CHECK(compared > 20);
}

TEST_CASE("Lambda") {
  for (auto [p, q] : {std::pair{"x - 1", "u - 1"}, std::pair{"x", "u - 1"}}) {
    Surface S = surf(p, q);
    BuiltSpan b = build_span(S, {});
    for (int k = 0; k <= 1; ++k) {
      auto L = build_lambda(b, 0, k, 0);
      CHECK(L.lambda.verify(S));
      CHECK(L.in_span);
      CHECK(L.lambda_x_part.is_zero());
      CHECK_FALSE(L.displayed_x_part.is_zero());
      // Hand expansion of both psi push-forwards: with g = x u^2 v^{7+k},
      // Lambda = x g du + (uQ' + Q) g dv - g P(x) Q(u)^2 / v^2 dy.
      MultiPoly g = P("x*u^2") * P("v").pow(7 + k);
      MultiPoly w = P("u") * S.Qu().derive(Var::u) + S.Qu();
      CHECK(S.equal_mod(L.lambda.comp(kU), P("x") * g));
      CHECK(S.equal_mod(L.lambda.comp(kV), w * g));
      CHECK(S.equal_mod(L.lambda.comp(kY), -(P("x*u^2") * P("v").pow(5 + k) * S.Px() * S.Qu() * S.Qu())));
      REQUIRE(L.extracted);
      CHECK(L.x_exp == 1);
      CHECK(L.u_exp == 2);
      Monomial m;
      m[Var::x] = L.x_exp;
      m[Var::u] = L.u_exp;
      m[Var::v] = L.v_exp;
      CHECK(S.equal_mod(L.R * MultiPoly::monomial(m), L.lambda.comp(kY)));
    }
  }
  Surface S = surf("x - 1", "u - 1");
  BuiltSpan b = build_span(S, {});
  CHECK_THROWS_AS(build_lambda(b, -1, 0, 0), InvalidInput);
}

TEST_CASE("final_generator") {
  Surface S = surf("x - 1", "u - 1");
  BuiltSpan b = build_span(S, {});
  auto r = final_generator(b, 0, 0, 0, 0);
  REQUIRE(r.factored);
  CHECK_FALSE(r.T.is_zero());
  CHECK(r.root_matches);
  CHECK((r.first_operand_y_exp == 3 || r.first_operand_y_exp == 7));
  CHECK_FALSE(b.span.graph().verify());

  // Chart-level oracle: both operands are multiples of dy, so the bracket is
  // a dB/dy - B da/dy in the chart variables.
  const CertNode& root = b.span.graph().node(r.root);
  REQUIRE(root.op == CertOp::bracket);
  auto A = to_phi_chart(S, {ChartTag::phi, MonoFrac(), MonoFrac(P("x^2*u") * P("y").pow(r.first_operand_y_exp))});
  auto B = phi_chart_form(S, b.span.graph().node(root.children[1]).value.field());
  CHECK(A.first.normalized().num.is_zero());
  CHECK(B.first.normalized().num.is_zero());
  MonoFrac expect = A.second * B.second.derive(Var::y) - B.second * A.second.derive(Var::y);
  CHECK(phi_chart_form(S, root.value.field()).second == expect);
  CHECK(phi_chart_form(S, root.value.field()).second ==
        to_phi_chart(S, {ChartTag::phi, MonoFrac(), MonoFrac(S.reduce(r.T * P("x*y*u")))}).second);

  CHECK_THROWS_AS(final_generator(b, 0, -1, 0, 0), InvalidInput);
}

TEST_CASE("generating_check") {
  Surface S = surf("x - 1", "u - 1");
  BuiltSpan b = build_span(S, {});
  auto r = final_generator(b, 0, 0, 0, 0);
  const Derivation& mu = b.span.graph().node(r.root).value;
  // x = 2, u = 3 gives y = xP/u = 2/3 and v = uQ/x = 3.
  auto p0 = SurfacePoint::make_exact({GaussRat(2), GaussRat::frac(2, 3), GaussRat(3), GaussRat(3)});
  CHECK(generating_check(S, p0, mu));
  Derivation nu = catalog_entry(S, "phi.y2_dx").derivation;
  CHECK_FALSE(generating_check(S, p0, nu));
  auto bad = SurfacePoint::make_exact({GaussRat(1), GaussRat(0), GaussRat(0), GaussRat(0)});
  CHECK_THROWS_AS(generating_check(S, bad, nu), InvalidInput);
  auto numeric = SurfacePoint::make_numeric({Complex(2), Complex(2.0 / 3), Complex(3), Complex(3)});
  CHECK_THROWS_AS(generating_check(S, numeric, mu), InvalidInput);
}

TEST_CASE("cert_json") {
  Surface S = surf("x", "u - 1");
  BuiltSpan b = build_span(S, {0, 0, 0, 0});
  auto r = final_generator(b, 0, 0, 0, 0);
  REQUIRE(r.factored);
  auto j = cert_json(b.span.graph(), {r.root});
  CHECK(j["schema"] == "cert-v1");
  const auto& nodes = j["nodes"];
  CHECK(nodes.size() == b.span.graph().closure({r.root}).size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    CHECK(nodes[i]["id"] == i);
    for (const auto& c : nodes[i]["children"]) CHECK(c.get<std::size_t>() < i);
    if (nodes[i]["op"] == "leaf") CHECK(nodes[i].contains("catalog_id"));
  }
  CHECK(j["roots"][0] == nodes.size() - 1);

  auto rep = verify_identity(S, "D2", {{"j", 1}, {"k", 0}});
  auto rj = report_json(rep);
  CHECK(rj["verdict"] == "scalar-match(-1)");
  CHECK(rj["params"]["j"] == 1);
}
