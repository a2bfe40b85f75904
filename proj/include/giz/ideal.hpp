#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "giz/algebra.hpp"

namespace giz {

/// Reduced Groebner basis under the fixed degrevlex order (y > v > x > u > lambda).
///
/// Every basis element remembers how it was built from the source generators,
/// so a zero remainder can always be turned into an explicit certificate
/// p = sum_j c_j * source_j.
class GroebnerBasis {
 public:
  GroebnerBasis() = default;

  const std::vector<MultiPoly>& generators() const { return basis_; }
  const std::vector<MultiPoly>& source() const { return source_; }
  /// basis[i] = sum_j representation()[i][j] * source[j].
  const std::vector<std::vector<MultiPoly>>& representation() const { return repr_; }

  /// Checks that every S-polynomial reduces to zero and that the basis is reduced.
  bool verify() const;

 private:
  friend GroebnerBasis buchberger(const std::vector<MultiPoly>& gens);
  std::vector<MultiPoly> basis_;
  std::vector<MultiPoly> source_;
  std::vector<std::vector<MultiPoly>> repr_;
};

struct NFResult {
  MultiPoly remainder;
  /// One cofactor per basis element: input = sum cofactors[i]*basis[i] + remainder.
  std::vector<MultiPoly> cofactors;
};

/// Normal strategy: pairs by lowest lcm degree, ties by insertion order.
GroebnerBasis buchberger(const std::vector<MultiPoly>& gens);

NFResult normal_form(const MultiPoly& p, const GroebnerBasis& gb);

/// Remainder only; the hot path for every comparison modulo the ideal.
MultiPoly reduce(const MultiPoly& p, const GroebnerBasis& gb);

/// Expresses NF cofactors in terms of the source generators instead of the basis.
std::vector<MultiPoly> source_cofactors(const NFResult& nf, const GroebnerBasis& gb);

/// S-polynomial of two polynomials (used by the checker and the oracle tests).
MultiPoly s_polynomial(const MultiPoly& f, const MultiPoly& g);

/// Ideal wrapper that owns a basis plus the lazily built bases of
/// ideal + <m> needed for division by a monomial. Copies share the cache.
class Ideal {
 public:
  explicit Ideal(std::vector<MultiPoly> gens);

  const GroebnerBasis& basis() const { return *gb_; }
  MultiPoly reduce(const MultiPoly& p) const { return giz::reduce(p, *gb_); }
  bool contains(const MultiPoly& p) const { return reduce(p).is_zero(); }
  NFResult normal_form(const MultiPoly& p) const { return giz::normal_form(p, *gb_); }

  /// Some g with f - m*g in the ideal (reduced to normal form), or nullopt if
  /// f is not in ideal + <m>. Success is re-verified before returning.
  std::optional<MultiPoly> divide_by_monomial_mod(const MultiPoly& f, const Monomial& m) const;

  /// Basis of ideal + <m>, cached.
  const GroebnerBasis& augmented(const Monomial& m) const;

 private:
  struct Cache {
    std::mutex mu;
    std::map<std::vector<std::uint32_t>, std::shared_ptr<const GroebnerBasis>> by_monomial;
  };
  std::shared_ptr<const GroebnerBasis> gb_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace giz
