#include <doctest.h>

#include "giz/algebra.hpp"
#include "test_support.hpp"

using namespace giz;
using giz::testing::P;

TEST_CASE("gaussrat canonical form") {
  GaussRat a(Rational(2, 4), Rational(-6, 3));
  CHECK(a.re() == Rational(1, 2));
  CHECK(a.im() == Rational(-2));
  CHECK(GaussRat(Rational(0, 5)).is_zero());
  GaussRat z = GaussRat::I() * GaussRat::I();
  CHECK(z == GaussRat(-1));
  CHECK((GaussRat(3, 4) / GaussRat(3, 4)).is_one());
  CHECK_THROWS_AS(GaussRat().inverse(), InvalidInput);
}

TEST_CASE("ring operations") {
  CHECK(P("(x+y) + (x-y)") == P("2*x"));
  CHECK(P("(x-1)*(x+1)") == P("x^2 - 1"));

  // (x+iy)^2 against an expansion built by repeated addition.
  MultiPoly sq = P("x + i*y").pow(2);
  MultiPoly xx(GaussRat(1), Monomial::var(Var::x, 2));
  MultiPoly xiy(GaussRat::I(), Monomial::from({{Var::x, 1}, {Var::y, 1}}));
  MultiPoly iyiy(GaussRat(-1), Monomial::var(Var::y, 2));
  MultiPoly oracle = xx + xiy + xiy + iyiy;
  CHECK(sq == oracle);
  CHECK(sq == P("x^2 + 2*i*x*y - y^2"));

  CHECK_THROWS_AS(P("x").pow(-1), InvalidInput);
  CHECK(P("x").pow(0) == MultiPoly(1));
}

TEST_CASE("derive") {
  MultiPoly xP = P("x*(x-1)");
  CHECK(xP.derive(Var::x) == P("2*x - 1"));
  CHECK(P("y^3").derive(Var::x).is_zero());
  CHECK(P("x*(u-1)").derive(Var::u) == P("x"));
}

TEST_CASE("substitute") {
  CHECK(P("x^2").substitute({{Var::x, P("x + lambda*y")}}) ==
        P("x^2 + 2*lambda*x*y + lambda^2*y^2"));
  // Q(u - lambda*P(0)) for Q = u - 1, P = x - 1.
  CHECK(P("u - 1").substitute({{Var::u, P("u - lambda*(-1)")}}) == P("u + lambda - 1"));
  MultiPoly p = P("x*y + 3*u^2 - v");
  CHECK(p.substitute({{Var::x, P("x")}, {Var::u, P("u")}}) == p);
}

TEST_CASE("eval_complex") {
  std::map<Var, Complex> pt{{Var::x, 0.0}, {Var::y, 1.0}, {Var::u, 0.0}, {Var::v, 1.0}};
  CHECK(std::abs(P("y*u - x*(x-1)").eval(pt)) == 0.0);
  CHECK(std::abs(P("x^2").eval({{Var::x, Complex(0, 1)}}) - Complex(-1, 0)) < 1e-15);
  std::map<Var, Complex> zero{{Var::x, 0.0}, {Var::y, 0.0}, {Var::u, 0.0}, {Var::v, 0.0}};
  CHECK(P("x*y*u*v").eval(zero) == Complex(0.0));
  CHECK_THROWS_AS(P("x*y").eval({{Var::x, 1.0}}), InvalidInput);
}

TEST_CASE("exact_divide") {
  // (X P(X) - x P(x)) / y with P = x - 1 and X = x + lambda*y.
  MultiPoly X = P("x + lambda*y");
  MultiPoly num = X * (X - MultiPoly(1)) - P("x*(x-1)");
  auto q = exact_divide(num, P("y"));
  REQUIRE(q);
  CHECK(*q == P("lambda*(2*x - 1) + lambda^2*y"));
  CHECK_FALSE(exact_divide(P("x^2"), P("y")));
  CHECK(exact_divide(MultiPoly(), P("x+y"))->is_zero());
  CHECK_THROWS_AS(exact_divide(P("x"), MultiPoly()), InvalidInput);
}

TEST_CASE("simple_roots") {
  CHECK(simple_roots(parse_unipoly("x - 1", Var::x)));
  CHECK_FALSE(simple_roots(parse_unipoly("x*(x-1)^2", Var::x)));
  CHECK(simple_roots(parse_unipoly("x^2 + 1", Var::x)));
  CHECK_THROWS_AS(simple_roots(UniPoly({}, Var::x)), InvalidInput);
}

TEST_CASE("roots") {
  auto r = exact_roots(parse_unipoly("x^2 + 1", Var::x));
  CHECK(r.size() == 2);
  auto q = exact_roots(parse_unipoly("2*u^2 - 3*u + 1", Var::u));
  REQUIRE(q.size() == 2);
  CHECK(std::find(q.begin(), q.end(), GaussRat::frac(1, 2)) != q.end());
  CHECK(exact_roots(parse_unipoly("x^2 - 2", Var::x)).empty());
}

TEST_CASE("parser and printer") {
  UniPoly p = parse_unipoly("x^2 - 3/2*x + 1", Var::x);
  REQUIRE(p.degree() == 2);
  CHECK(p.coeff(0) == GaussRat(1));
  CHECK(p.coeff(1) == GaussRat::frac(-3, 2));
  CHECK(p.coeff(2) == GaussRat(1));
  CHECK_NOTHROW(parse_unipoly("u - 1", Var::u));
  CHECK_THROWS_AS(parse_unipoly("x + y", Var::x), InvalidInput);
  CHECK_THROWS_AS(parse_poly("x +* y"), InvalidInput);
  CHECK_THROWS_AS(parse_poly("x / y"), InvalidInput);
  CHECK_THROWS_AS(parse_poly("2x"), InvalidInput);
  CHECK(parse_poly("  x  *  y ") == P("x*y"));
  CHECK(P("(1/2 + 3*i)*x - i*y + lambda^2").str() == "lambda^2 - i*y + (1/2+3*i)*x");

  try {
    parse_poly("x + $");
    FAIL("expected error");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("position 4") != std::string::npos);
  }
}

TEST_CASE("parse_scalar") {
  auto a = parse_scalar("3/2");
  REQUIRE(a.exact);
  CHECK(*a.exact == GaussRat::frac(3, 2));
  auto b = parse_scalar("1.5-2i");
  CHECK_FALSE(b.exact);
  CHECK(b.value == Complex(1.5, -2));
  CHECK(parse_scalar("2.5i").value == Complex(0, 2.5));
  CHECK(parse_scalar("-1e-3").value == Complex(-1e-3, 0));
  CHECK_THROWS_AS(parse_scalar("x+1"), InvalidInput);
}

TEST_CASE("monofrac") {
  MonoFrac u(P("x^2 - x"), Monomial::var(Var::y));
  MonoFrac du = u.derive(Var::y);
  CHECK(du == MonoFrac(P("-(x^2 - x)"), Monomial::var(Var::y, 2)));
  CHECK((u * MonoFrac(P("y"))) == MonoFrac(P("x^2 - x")));
  CHECK((u + u).str() == "(2*x^2 - 2*x)/(y)");
  MonoFrac pulled = substitute_frac(P("y*u - x^2 + x"), {{Var::u, u}});
  CHECK(pulled.is_zero());
}

TEST_CASE("property: ring axioms, Leibniz, division, substitution") {
  std::mt19937 rng(0);
  for (int trial = 0; trial < 30; ++trial) {
    MultiPoly a = giz::testing::random_poly(rng);
    MultiPoly b = giz::testing::random_poly(rng);
    MultiPoly c = giz::testing::random_poly(rng);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    for (Var v : kAmbientVars) CHECK((a * b).derive(v) == a.derive(v) * b + a * b.derive(v));
    if (!b.is_zero()) {
      auto q = exact_divide(a * b, b);
      REQUIRE(q);
      CHECK(*q == a);
    }
    // Composition of substitutions.
    std::map<Var, MultiPoly> s1{{Var::x, P("x + y")}, {Var::u, P("u*v - 1")}};
    std::map<Var, MultiPoly> s2{{Var::y, P("2*y + x")}, {Var::v, P("v^2")}};
    std::map<Var, MultiPoly> composed;
    for (const auto& [v, img] : s1) composed[v] = img.substitute(s2);
    for (const auto& [v, img] : s2)
      if (!composed.count(v)) composed[v] = img;
    CHECK(a.substitute(s1).substitute(s2) == a.substitute(composed));
    // Printing round-trips through the parser.
    CHECK(parse_poly(a.str()) == a);
  }
}
