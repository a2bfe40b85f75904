#include <doctest.h>

#include "giz/surface.hpp"
#include "test_support.hpp"

using namespace giz;
using giz::testing::P;

namespace {

Surface surf(const char* p, const char* q) {
  return Surface::make(parse_unipoly(p, Var::x), parse_unipoly(q, Var::u));
}

MonoFrac frac(const char* num, Monomial den = {}) { return MonoFrac(P(num), den); }

ChartField chart_field(ChartTag t, const char* a, const char* b) {
  return ChartField{t, frac(a), frac(b)};
}

/// The field applied to each generator vanishes on the surface.
bool tangent(const Surface& S, const AmbientField& f) {
  for (const auto& g : S.generators()) {
    MonoFrac r = f.apply(g);
    MultiPoly n = S.reduce(r.num);
    for (int k = 0; k < 4 && !n.is_zero(); ++k) n = S.reduce(n.mul_term(GaussRat(1), r.den));
    if (!n.is_zero()) return false;
  }
  return true;
}

AmbientField poly_field(const char* fx, const char* fy, const char* fu, const char* fv) {
  return AmbientField{{frac(fx), frac(fy), frac(fu), frac(fv)}};
}

}  // namespace

TEST_CASE("make_surface and smoothness") {
  Surface S = surf("x - 1", "u - 1");
  CHECK(S.smooth());
  CHECK_FALSE(S.p0_zero());
  CHECK(S.generators()[0] == P("y*u - x*(x-1)"));
  CHECK(S.generators()[1] == P("x*v - u*(u-1)"));
  CHECK(S.generators()[2] == P("y*v - (x-1)*(u-1)"));
  CHECK(S.smoothness_diagnostic().empty());

  Surface T = surf("x", "u");
  CHECK_FALSE(T.smooth());
  CHECK(T.p0_zero());
  CHECK(T.q0_zero());

  Surface R = surf("x*(x-1)^2", "u*(u-1)^2");
  CHECK_FALSE(R.smooth());
  CHECK(R.smoothness_diagnostic().find("repeated") != std::string::npos);

  CHECK_THROWS_AS(surf("3", "u - 1"), InvalidInput);
  CHECK_THROWS_AS(surf("x", "2"), InvalidInput);
}

TEST_CASE("chart_embed") {
  Surface S = surf("x - 1", "u - 1");
  SurfacePoint a = chart_embed(S, ChartTag::phi, GaussRat(0), GaussRat(1));
  CHECK(a.str() == "0,1,0,1");
  CHECK(on_surface_exact(S, a));
  SurfacePoint b = chart_embed(S, ChartTag::chi, GaussRat(1), GaussRat(1));
  CHECK(b.str() == "1,0,1,0");
  CHECK(on_surface_exact(S, b));
  for (long y = 1; y < 6; ++y)
    CHECK(chart_embed(S, ChartTag::phi, GaussRat(0), GaussRat(y)).exact[kU].is_zero());

  CHECK_THROWS_AS(chart_embed(S, ChartTag::phi, GaussRat(1), GaussRat(0)), InvalidInput);
  CHECK_THROWS_AS(chart_embed(S, ChartTag::chi, GaussRat(0), GaussRat(1)), InvalidInput);
  CHECK_THROWS_AS(chart_embed(S, ChartTag::psi, Complex(1), Complex(0)), InvalidInput);

  // Numeric parameters land on the surface and project back to themselves.
  Surface S2 = surf("x^2 + 1", "u - 2");
  for (ChartTag t : {ChartTag::phi, ChartTag::psi, ChartTag::chi}) {
    Complex pa(0.3, -1.2), pb(1.7, 0.4);
    SurfacePoint p = chart_embed(S2, t, pa, pb);
    CHECK(residual(S2, p) < 1e-12);
    auto params = chart_params(t);
    auto pm = p.as_map();
    CHECK(pm[params[0]] == pa);
    CHECK(pm[params[1]] == pb);
    GaussRat ea = GaussRat::frac(2, 3), eb = GaussRat(-3, 1);
    SurfacePoint q = chart_embed(S2, t, ea, eb);
    CHECK(on_surface_exact(S2, q));
    auto qm = q.as_exact_map();
    CHECK(qm[params[0]] == ea);
    CHECK(qm[params[1]] == eb);
  }
}

TEST_CASE("chart coordinates land on the surface identically") {
  Surface S = surf("x^3 - 2*x + 1/2", "i*u^2 + u - 3");
  for (ChartTag t : {ChartTag::phi, ChartTag::psi, ChartTag::chi})
    for (const auto& g : S.generators()) CHECK(chart_pullback(S, t, g).is_zero());
}

TEST_CASE("points: parsing and residual checks") {
  Surface S = surf("x - 1", "u - 1");
  SurfacePoint p = parse_point("0,1,0,1");
  CHECK(p.is_exact());
  CHECK_NOTHROW(require_on_surface(S, p));
  CHECK_THROWS_AS(require_on_surface(S, parse_point("1,1,1,1")), InvalidInput);
  SurfacePoint n = parse_point("0.0,1.0,0,1");
  CHECK_FALSE(n.is_exact());
  CHECK_NOTHROW(require_on_surface(S, n));
  CHECK_THROWS_AS(require_on_surface(S, parse_point("0.0,1.0,0,1.001")), InvalidInput);
  CHECK_THROWS_AS(parse_point("0,1,0"), InvalidInput);
}

TEST_CASE("pushforward: phi d/dy matches the chart display") {
  Surface S = surf("x^2 - 3", "u^2 + u + 2");
  AmbientField f = pushforward(S, chart_field(ChartTag::phi, "0", "1"));
  CHECK_FALSE(f.polynomialized());
  Monomial y = Monomial::var(Var::y), y2 = Monomial::var(Var::y, 2);
  MultiPoly PQp = S.Px() * S.Qu().derive(Var::u);
  AmbientField display{{MonoFrac(), MonoFrac(1), MonoFrac(-P("u"), y),
                        MonoFrac(-P("v"), y) - MonoFrac(P("u") * PQp, y2)}};
  for (std::size_t i = 0; i < 4; ++i) CHECK(f.comps[i] == display.comps[i]);
}

TEST_CASE("pushforward: phi y^2 d/dx is polynomial") {
  for (auto [p, q] : {std::pair{"x - 1", "u - 1"}, std::pair{"x^2 + x + 1", "u^3 - 2"}}) {
    Surface S = surf(p, q);
    AmbientField f = pushforward(S, chart_field(ChartTag::phi, "y^2", "0"));
    REQUIRE(f.polynomialized());
    MultiPoly Pp = S.Px().derive(Var::x), Qp = S.Qu().derive(Var::u);
    MultiPoly y = P("y"), x = P("x"), u = P("u");
    MultiPoly ev = y * Pp * S.Qu() + y * u * Pp * Qp + S.Px() * S.Px() * Qp;
    CHECK(S.equal_mod(f.comps[kX].num, P("y^2")));
    CHECK(f.comps[kY].is_zero());
    CHECK(S.equal_mod(f.comps[kU].num, y * (x * Pp + S.Px())));
    CHECK(S.equal_mod(f.comps[kV].num, ev));
    // At x = u = 0: y P(0) d/du + (y P'(0) Q(0) + P(0)^2 Q'(0)) d/dv.
    std::map<Var, MultiPoly> origin{{Var::x, MultiPoly()}, {Var::u, MultiPoly()}};
    GaussRat P0 = S.P().coeff(0), P1 = S.P().coeff(1), Q0 = S.Q().coeff(0), Q1 = S.Q().coeff(1);
    CHECK(ev.substitute(origin) == y * (P1 * Q0) + MultiPoly(P0 * P0 * Q1));
    CHECK((y * (x * Pp + S.Px())).substitute(origin) == y * P0);
  }
}

TEST_CASE("pushforward: the nilpotent field when P(0) = 0") {
  Surface S = surf("x^2 - x", "u + 2");
  AmbientField f = pushforward(S, chart_field(ChartTag::phi, "y", "0"));
  REQUIRE(f.polynomialized());
  MultiPoly Pp = S.Px().derive(Var::x), Qp = S.Qu().derive(Var::u);
  MultiPoly P_over_x = *exact_divide(S.Px(), P("x"));
  MultiPoly u = P("u");
  CHECK(S.equal_mod(f.comps[kX].num, P("y")));
  CHECK(S.equal_mod(f.comps[kU].num, S.Px() + P("x") * Pp));
  CHECK(S.equal_mod(f.comps[kV].num, Pp * S.Qu() + Pp * u * Qp + P_over_x * u * Qp));
  CHECK(tangent(S, f));

  // Without P(0) = 0 the same field does not polynomialize.
  Surface T = surf("x - 1", "u + 2");
  CHECK_FALSE(pushforward(T, chart_field(ChartTag::phi, "y", "0")).polynomialized());
}

TEST_CASE("the eight basic fields polynomialize") {
  const std::vector<std::pair<const char*, const char*>> surfaces{
      {"x - 1", "u - 1"}, {"x^2 - 2", "u"}, {"x^4 + x - 1", "u^3 - u + 1/3"}, {"x*(x+1)", "u^4 - 1"},
      {"i*x^2 + 1", "u^2 + 3*u + 2"}};
  for (auto [p, q] : surfaces) {
    Surface S = surf(p, q);
    std::vector<ChartField> eight{
        chart_field(ChartTag::phi, "y^2", "0"), chart_field(ChartTag::phi, "x*y", "0"),
        chart_field(ChartTag::phi, "0", "x*y"), chart_field(ChartTag::psi, "v^2", "0"),
        chart_field(ChartTag::psi, "u*v", "0"), chart_field(ChartTag::psi, "0", "u*v"),
        chart_field(ChartTag::chi, "x*u", "0"), chart_field(ChartTag::chi, "0", "x*u")};
    for (const auto& cf : eight) {
      AmbientField f = pushforward(S, cf);
      CHECK(f.polynomialized());
      CHECK(tangent(S, f));
    }
  }
}

TEST_CASE("property: pushforwards are tangent") {
  std::mt19937 rng(5);
  Surface S = surf("x^2 - 2*x + 3", "u^2 - 5");
  for (int t = 0; t < 12; ++t) {
    ChartTag tag = static_cast<ChartTag>(t % 3);
    auto params = chart_params(tag);
    auto rnd = [&] {
      MultiPoly r = giz::testing::random_poly(rng, 3, 2);
      // Restrict to the chart parameters.
      std::map<Var, MultiPoly> keep;
      for (Var v : kAmbientVars)
        if (v != params[0] && v != params[1]) keep[v] = MultiPoly(1);
      return r.substitute(keep);
    };
    ChartField cf{tag, MonoFrac(rnd()), MonoFrac(rnd())};
    CHECK(tangent(S, pushforward_rational(S, cf)));
    CHECK(tangent(S, pushforward(S, cf)));
  }
}

TEST_CASE("tangent_basis") {
  Surface S = surf("x - 1", "u - 1");
  SurfacePoint p = parse_point("0,1,0,1");
  auto basis = tangent_basis(S, p);
  CHECK(exact_rank({basis[0], basis[1]}) == 2);
  auto J = jacobian(S);
  auto pt = p.as_exact_map();
  for (const auto& row : J)
    for (const auto& b : basis) {
      GaussRat acc;
      for (std::size_t c = 0; c < 4; ++c) acc += row[c].eval_exact(pt) * b[c];
      CHECK(acc.is_zero());
    }
  // Push-forwards evaluate into the tangent space.
  AmbientField f = pushforward(S, chart_field(ChartTag::phi, "y^2", "0"));
  auto fv = eval_field_exact(f, p);
  CHECK(exact_rank({basis[0], basis[1], fv}) == 2);

  Surface T = surf("x", "u");
  CHECK_THROWS_AS(tangent_basis(T, parse_point("0,0,0,0")), InvalidInput);
}

TEST_CASE("swap symmetry") {
  Surface S = surf("x^2 + 1", "u - 3");
  Surface W = swap_surface(S);
  CHECK(W.P() == S.Q().with_var(Var::x));
  CHECK(swap_surface(W) == S);
  CHECK(swap_vars(S.generators()[0]) == W.generators()[1]);
  CHECK(swap_vars(S.generators()[1]) == W.generators()[0]);
  CHECK(swap_vars(S.generators()[2]) == W.generators()[2]);

  SurfacePoint p = chart_embed(S, ChartTag::phi, GaussRat(2), GaussRat(5));
  SurfacePoint q = swap_point(p);
  CHECK(on_surface_exact(W, q));
  CHECK(swap_point(q).str() == p.str());

  for (auto [a, b] : {std::pair{"y^2", "0"}, std::pair{"x*y", "x*y"}, std::pair{"0", "1"}}) {
    AmbientField fs = swap_field(pushforward(S, chart_field(ChartTag::phi, a, b)));
    ChartField cw{ChartTag::psi, swap_vars(frac(a)), swap_vars(frac(b))};
    AmbientField fw = pushforward(W, cw);
    CHECK(fields_equal_mod(W, fs, fw));
  }
  AmbientField g = poly_field("x", "y", "u*v", "0");
  CHECK(swap_field(swap_field(g)).str() == g.str());
}

TEST_CASE("ambient bracket is antisymmetric and satisfies Jacobi") {
  AmbientField a = poly_field("y^2", "0", "x*u", "1");
  AmbientField b = poly_field("x", "x*y", "0", "v^2");
  AmbientField c = poly_field("u", "1", "y", "x*v");
  CHECK((ambient_bracket(a, b) + ambient_bracket(b, a)).is_zero());
  AmbientField jac = ambient_bracket(a, ambient_bracket(b, c)) +
                     ambient_bracket(b, ambient_bracket(c, a)) +
                     ambient_bracket(c, ambient_bracket(a, b));
  CHECK(jac.is_zero());
}
