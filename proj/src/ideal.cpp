#include "giz/ideal.hpp"

#include <algorithm>
#include <numeric>

namespace giz {

MultiPoly s_polynomial(const MultiPoly& f, const MultiPoly& g) {
  Monomial l = Monomial::lcm(f.lead_monomial(), g.lead_monomial());
  MultiPoly s = f.mul_term(f.lead_coeff().inverse(), l / f.lead_monomial());
  s -= g.mul_term(g.lead_coeff().inverse(), l / g.lead_monomial());
  return s;
}

namespace {

/// Full reduction of p by `basis`, optionally tracking cofactors.
MultiPoly reduce_impl(MultiPoly p, const std::vector<MultiPoly>& basis,
                      std::vector<MultiPoly>* cofactors) {
  std::vector<GaussRat> inv;
  inv.reserve(basis.size());
  for (const auto& g : basis) inv.push_back(g.lead_coeff().inverse());
  MultiPoly rem;
  while (!p.is_zero()) {
    const Monomial lm = p.lead_monomial();
    const GaussRat lc = p.lead_coeff();
    bool reduced = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Monomial& gl = basis[i].lead_monomial();
      if (!gl.divides(lm)) continue;
      Monomial q = lm / gl;
      GaussRat c = lc * inv[i];
      p.add_scaled(-c, q, basis[i]);
      if (cofactors) (*cofactors)[i] += MultiPoly(c, q);
      reduced = true;
      break;
    }
    if (!reduced) {
      rem += MultiPoly(lc, lm);
      p -= MultiPoly(lc, lm);
    }
  }
  return rem;
}

struct Element {
  MultiPoly poly;
  std::vector<MultiPoly> repr;  // in terms of the source generators
};

void scale(Element& e, const GaussRat& c) {
  e.poly *= c;
  for (auto& r : e.repr) r *= c;
}

/// Reduces e by the elements (with representation bookkeeping).
void reduce_element(Element& e, const std::vector<Element>& elems) {
  std::vector<MultiPoly> basis;
  basis.reserve(elems.size());
  for (const auto& b : elems) basis.push_back(b.poly);
  std::vector<MultiPoly> cof(elems.size());
  e.poly = reduce_impl(e.poly, basis, &cof);
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (cof[i].is_zero()) continue;
    for (std::size_t j = 0; j < e.repr.size(); ++j) e.repr[j] -= cof[i] * elems[i].repr[j];
  }
}

}  // namespace

GroebnerBasis buchberger(const std::vector<MultiPoly>& gens) {
  const std::size_t n = gens.size();
  std::vector<Element> elems;
  for (std::size_t i = 0; i < n; ++i) {
    if (gens[i].is_zero()) continue;
    Element e{gens[i], std::vector<MultiPoly>(n)};
    e.repr[i] = MultiPoly(1);
    elems.push_back(std::move(e));
  }

  struct Pair {
    std::size_t i, j;
    std::uint64_t deg;
    std::size_t order;
  };
  std::vector<Pair> pairs;
  std::size_t counter = 0;
  auto add_pairs_for = [&](std::size_t j) {
    for (std::size_t i = 0; i < j; ++i) {
      Monomial l = Monomial::lcm(elems[i].poly.lead_monomial(), elems[j].poly.lead_monomial());
      pairs.push_back({i, j, l.degree(), counter++});
    }
  };
  for (std::size_t j = 1; j < elems.size(); ++j) add_pairs_for(j);

  while (!pairs.empty()) {
    auto best = std::min_element(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      return a.deg != b.deg ? a.deg < b.deg : a.order < b.order;
    });
    Pair pr = *best;
    pairs.erase(best);
    const Element& f = elems[pr.i];
    const Element& g = elems[pr.j];
    const Monomial& fl = f.poly.lead_monomial();
    const Monomial& gl = g.poly.lead_monomial();
    // Coprime leading monomials: the S-polynomial reduces to zero.
    if (Monomial::gcd(fl, gl).is_one()) continue;
    Monomial l = Monomial::lcm(fl, gl);
    GaussRat cf = f.poly.lead_coeff().inverse();
    GaussRat cg = g.poly.lead_coeff().inverse();
    Element s{f.poly.mul_term(cf, l / fl), std::vector<MultiPoly>(n)};
    s.poly -= g.poly.mul_term(cg, l / gl);
    for (std::size_t k = 0; k < n; ++k) {
      s.repr[k] = f.repr[k].mul_term(cf, l / fl) - g.repr[k].mul_term(cg, l / gl);
    }
    reduce_element(s, elems);
    if (s.poly.is_zero()) continue;
    elems.push_back(std::move(s));
    add_pairs_for(elems.size() - 1);
  }

  // Minimalize: drop elements whose leading monomial is divisible by another's.
  std::vector<Element> minimal;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const Monomial& li = elems[i].poly.lead_monomial();
    bool redundant = false;
    for (std::size_t j = 0; j < elems.size() && !redundant; ++j) {
      if (i == j) continue;
      const Monomial& lj = elems[j].poly.lead_monomial();
      if (lj.divides(li) && (lj != li || j < i)) redundant = true;
    }
    if (!redundant) minimal.push_back(elems[i]);
  }
  // Interreduce tails and make monic.
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    Element head = minimal[i];
    Monomial lm = head.poly.lead_monomial();
    GaussRat lc = head.poly.lead_coeff();
    Element tail = head;
    tail.poly -= MultiPoly(lc, lm);
    std::vector<Element> others;
    for (std::size_t j = 0; j < minimal.size(); ++j)
      if (j != i) others.push_back(minimal[j]);
    // Tail reduction: the leading term is kept aside.
    reduce_element(tail, others);
    tail.poly += MultiPoly(lc, lm);
    scale(tail, lc.inverse());
    minimal[i] = std::move(tail);
  }
  std::sort(minimal.begin(), minimal.end(), [](const Element& a, const Element& b) {
    return compare_degrevlex(a.poly.lead_monomial(), b.poly.lead_monomial()) < 0;
  });

  GroebnerBasis gb;
  gb.source_ = gens;
  for (auto& e : minimal) {
    gb.basis_.push_back(std::move(e.poly));
    gb.repr_.push_back(std::move(e.repr));
  }
  return gb;
}

bool GroebnerBasis::verify() const {
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (!basis_[i].lead_coeff().is_one()) return false;
    for (std::size_t j = i + 1; j < basis_.size(); ++j) {
      if (!giz::reduce(s_polynomial(basis_[i], basis_[j]), *this).is_zero()) return false;
    }
    // Reduced: no term of basis[i] is divisible by another leading monomial.
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      if (i == j) continue;
      for (const auto& [m, c] : basis_[i].terms())
        if (basis_[j].lead_monomial().divides(m)) return false;
    }
    // Representation re-verifies exactly.
    MultiPoly acc;
    for (std::size_t k = 0; k < source_.size(); ++k) acc += repr_[i][k] * source_[k];
    if (!(acc == basis_[i])) return false;
  }
  return true;
}

NFResult normal_form(const MultiPoly& p, const GroebnerBasis& gb) {
  NFResult r;
  r.cofactors.resize(gb.generators().size());
  r.remainder = reduce_impl(p, gb.generators(), &r.cofactors);
  return r;
}

MultiPoly reduce(const MultiPoly& p, const GroebnerBasis& gb) {
  return reduce_impl(p, gb.generators(), nullptr);
}

std::vector<MultiPoly> source_cofactors(const NFResult& nf, const GroebnerBasis& gb) {
  std::vector<MultiPoly> out(gb.source().size());
  for (std::size_t i = 0; i < nf.cofactors.size(); ++i) {
    if (nf.cofactors[i].is_zero()) continue;
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (gb.representation()[i][j].is_zero()) continue;
      out[j] += nf.cofactors[i] * gb.representation()[i][j];
    }
  }
  return out;
}

Ideal::Ideal(std::vector<MultiPoly> gens)
    : gb_(std::make_shared<const GroebnerBasis>(buchberger(gens))),
      cache_(std::make_shared<Cache>()) {}

const GroebnerBasis& Ideal::augmented(const Monomial& m) const {
  std::vector<std::uint32_t> key(kNumVars);
  for (std::size_t i = 0; i < kNumVars; ++i) key[i] = m.at(i);
  std::lock_guard lock(cache_->mu);
  auto it = cache_->by_monomial.find(key);
  if (it != cache_->by_monomial.end()) return *it->second;
  std::vector<MultiPoly> gens = gb_->source();
  gens.push_back(MultiPoly::monomial(m));
  auto gb = std::make_shared<const GroebnerBasis>(buchberger(gens));
  return *cache_->by_monomial.emplace(key, std::move(gb)).first->second;
}

std::optional<MultiPoly> Ideal::divide_by_monomial_mod(const MultiPoly& f,
                                                      const Monomial& m) const {
  if (m.is_one()) return reduce(f);
  // Plain polynomial division first; it is the common case and much cheaper.
  if (auto direct = divide_by_monomial(f, m)) return reduce(*direct);
  if (auto direct = divide_by_monomial(reduce(f), m)) return reduce(*direct);
  const GroebnerBasis& aug = augmented(m);
  NFResult nf = giz::normal_form(f, aug);
  if (!nf.remainder.is_zero()) return std::nullopt;
  std::vector<MultiPoly> cof = source_cofactors(nf, aug);
  MultiPoly g = reduce(cof.back());
  if (!contains(f - g.mul_term(GaussRat(1), m)))
    throw InternalError("divide_by_monomial_mod witness failed re-verification");
  return g;
}

}  // namespace giz
