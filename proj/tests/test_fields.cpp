#include <doctest.h>

#include "giz/fields.hpp"
#include "test_support.hpp"

using namespace giz;
using giz::testing::P;

namespace {

Surface surf(const char* p, const char* q) {
  return Surface::make(parse_unipoly(p, Var::x), parse_unipoly(q, Var::u));
}

Derivation chart_derivation(const Surface& S, ChartTag t, const char* a, const char* b) {
  AmbientField f = pushforward(S, ChartField{t, MonoFrac(P(a)), MonoFrac(P(b))});
  REQUIRE(f.polynomialized());
  auto d = tangency_check(S, f);
  REQUIRE(d);
  return *d;
}

/// Bracket of chart fields whose coefficients only involve the chart parameters.
std::pair<MultiPoly, MultiPoly> chart_bracket(ChartTag t, const MultiPoly& a, const MultiPoly& b,
                                              const MultiPoly& c, const MultiPoly& d) {
  auto [s, r] = chart_params(t);
  auto D = [&](const MultiPoly& p, const MultiPoly& q, const MultiPoly& f) {
    return p * f.derive(s) + q * f.derive(r);
  };
  return {D(a, b, c) - D(c, d, a), D(a, b, d) - D(c, d, b)};
}

}  // namespace

TEST_CASE("tangency_check") {
  Surface S = surf("x - 1", "u - 1");
  auto y2dx = tangency_check(S, pushforward(S, catalog_chart_field("phi.y2_dx")));
  REQUIRE(y2dx);
  CHECK(y2dx->verify(S));

  AmbientField dx{{MonoFrac(1), MonoFrac(), MonoFrac(), MonoFrac()}};
  CHECK_FALSE(tangency_check(S, dx));
  CHECK_FALSE(S.reduce(P("2*x - 1")).is_zero());

  auto zero = tangency_check(S, AmbientField{});
  REQUIRE(zero);
  CHECK(zero->is_zero());
  for (const auto& row : zero->witnesses())
    for (const auto& c : row) CHECK(c.is_zero());

  AmbientField rational = pushforward(S, ChartField{ChartTag::phi, MonoFrac(), MonoFrac(1)});
  CHECK_THROWS_AS(tangency_check(S, rational), InvalidInput);
}

TEST_CASE("bracket") {
  Surface S = surf("x^2 - 2", "u + 1");
  Derivation a = chart_derivation(S, ChartTag::phi, "y^2", "0");
  Derivation b = chart_derivation(S, ChartTag::phi, "0", "x*y");
  CHECK(bracket(S, a, a).is_zero());

  // [y^2 d/dx, x y d/dy] + 2 x y^2 d/dx = y^3 d/dy.
  Derivation lhs = bracket(S, a, b);
  Derivation xy2dx = chart_derivation(S, ChartTag::phi, "x*y^2", "0");
  Derivation sum = combine(S, {{MultiPoly(1), &lhs}, {MultiPoly(2), &xy2dx}});
  Derivation y3dy = chart_derivation(S, ChartTag::phi, "0", "y^3");
  CHECK(equal_mod(S, sum, y3dy));

  // Antisymmetry and bilinearity, exact after normal form.
  Derivation c = chart_derivation(S, ChartTag::chi, "x*u", "0");
  Derivation ab = bracket(S, a, b), ba = bracket(S, b, a);
  CHECK(combine(S, {{MultiPoly(1), &ab}, {MultiPoly(1), &ba}}).is_zero());
  Derivation bc = combine(S, {{MultiPoly(3), &b}, {MultiPoly(-1), &c}});
  Derivation lhs2 = bracket(S, a, bc);
  Derivation ac = bracket(S, a, c);
  Derivation rhs2 = combine(S, {{MultiPoly(3), &ab}, {MultiPoly(-1), &ac}});
  CHECK(lhs2.comps() == rhs2.comps());
}

TEST_CASE("ambient bracket of push-forwards equals push-forward of the chart bracket") {
  Surface S = surf("x^2 + x - 1", "u^2 - 3");
  std::mt19937 rng(17);
  for (int t = 0; t < 9; ++t) {
    ChartTag tag = static_cast<ChartTag>(t % 3);
    auto params = chart_params(tag);
    auto rnd = [&] {
      MultiPoly r = giz::testing::random_poly(rng, 2, 2);
      std::map<Var, MultiPoly> keep;
      for (Var v : kAmbientVars)
        if (v != params[0] && v != params[1]) keep[v] = MultiPoly(1);
      return r.substitute(keep);
    };
    MultiPoly a = rnd(), b = rnd(), c = rnd(), d = rnd();
    auto [e, f] = chart_bracket(tag, a, b, c, d);
    AmbientField lhs = ambient_bracket(pushforward_rational(S, {tag, a, b}),
                                       pushforward_rational(S, {tag, c, d}));
    AmbientField rhs = pushforward_rational(S, {tag, e, f});
    CHECK(fields_equal_mod(S, lhs, rhs, 6));
  }
}

TEST_CASE("property: Jacobi identity on certified triples") {
  Surface S = surf("x^2 - x + 2", "u^2 + 1");
  auto cat = catalog(S);
  std::mt19937 rng(23);
  for (int t = 0; t < 6; ++t) {
    const Derivation& U = cat[rng() % cat.size()].derivation;
    const Derivation& V = cat[rng() % cat.size()].derivation;
    const Derivation& W = cat[rng() % cat.size()].derivation;
    Derivation j1 = bracket(S, U, bracket(S, V, W));
    Derivation j2 = bracket(S, V, bracket(S, W, U));
    Derivation j3 = bracket(S, W, bracket(S, U, V));
    CHECK(combine(S, {{MultiPoly(1), &j1}, {MultiPoly(1), &j2}, {MultiPoly(1), &j3}}).is_zero());
  }
}

TEST_CASE("catalog") {
  Surface S = surf("x - 1", "u - 1");
  auto cat = catalog(S);
  CHECK(cat.size() == 8);
  for (const auto& e : cat) {
    CHECK(e.derivation.verify(S));
    CHECK(e.reason == CompleteReason::basic);
  }
  auto cat2 = catalog(surf("x", "u - 1"));
  REQUIRE(cat2.size() == 9);
  CHECK(cat2.back().id == "phi.y_dx_lnd");
  CHECK(catalog(surf("x + 1", "u^2 - u")).back().id == "psi.v_du_lnd");
  CHECK_THROWS_AS(catalog_entry(S, "phi.y_dx_lnd"), InvalidInput);
  CHECK_THROWS_AS(catalog_entry(S, "phi.nope"), InvalidInput);

  // Ids do not depend on the surface.
  std::vector<std::string> ids;
  for (const auto& e : cat) ids.push_back(e.id);
  CHECK(ids == std::vector<std::string>(catalog_ids().begin(), catalog_ids().begin() + 8));
}

TEST_CASE("shear_complete") {
  Surface S = surf("x - 1", "u - 1");
  Derivation y2dx = catalog_entry(S, "phi.y2_dx").derivation;
  Derivation xydy = catalog_entry(S, "phi.xy_dy").derivation;
  Derivation xydx = catalog_entry(S, "phi.xy_dx").derivation;
  CHECK(shear_complete(S, y2dx, P("y")));
  for (int j = 0; j < 4; ++j) CHECK(shear_complete(S, xydy, P("x").pow(j)));
  CHECK_FALSE(shear_complete(S, xydx, P("x")));
  // Direct two-step application: Theta(x) = x y, Theta(x y) = x y^2.
  CHECK(S.equal_mod(xydx.apply(S, P("x")), P("x*y")));
  CHECK(S.equal_mod(xydx.apply(S, P("x*y")), P("x*y^2")));

  // x^{j} * (x y d/dy) is the push-forward of x^{j+1} y d/dy.
  Derivation shear = scale(S, P("x^2"), xydy);
  CHECK(equal_mod(S, shear, chart_derivation(S, ChartTag::phi, "0", "x^3*y")));
}

TEST_CASE("locally_nilpotent") {
  Surface S = surf("x - 1", "u - 1");
  int cap = default_lnd_cap(S);
  auto r = locally_nilpotent(S, catalog_entry(S, "phi.y2_dx").derivation, cap);
  CHECK(r.verdict == LndVerdict::yes);
  auto no = locally_nilpotent(S, catalog_entry(S, "phi.xy_dy").derivation, cap);
  CHECK(no.verdict == LndVerdict::no);
  CHECK(no.detail.find("V(y)") != std::string::npos);
  auto zero = locally_nilpotent(S, *tangency_check(S, AmbientField{}), cap);
  CHECK(zero.verdict == LndVerdict::yes);
  CHECK(zero.steps == 1);

  for (auto [p, q] : {std::pair{"x", "u - 1"}, std::pair{"x^2 - x", "u^3 + 2"},
                      std::pair{"x^3 - x", "u^2 + u + 1"}}) {
    Surface T = surf(p, q);
    auto e = catalog_entry(T, "phi.y_dx_lnd");
    CHECK(e.reason == CompleteReason::lnd);
    CHECK(locally_nilpotent(T, e.derivation, default_lnd_cap(T)).verdict == LndVerdict::yes);
    Surface W = swap_surface(T);
    auto f = catalog_entry(W, "psi.v_du_lnd");
    CHECK(locally_nilpotent(W, f.derivation, default_lnd_cap(W)).verdict == LndVerdict::yes);
  }
}

TEST_CASE("displayed LND form matches the push-forward") {
  for (auto [p, q] : {std::pair{"x", "u - 1"}, std::pair{"x^2 - x", "u^3 + 2"}, std::pair{"x^3 - x", "u^2 + u + 1"}}) {
    Surface S = surf(p, q);
    Derivation shown = certify(S, lnd_display_field(S), "display");
    CHECK(equal_mod(S, shown, catalog_entry(S, "phi.y_dx_lnd").derivation));
  }
  CHECK_THROWS_AS(lnd_display_field(surf("x - 1", "u")), InvalidInput);
}
