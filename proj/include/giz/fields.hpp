#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "giz/surface.hpp"

namespace giz {

/// A polynomial vector field tangent to a surface. Components are kept in
/// normal form; witnesses[i][j] are cofactors with V(g_i) = sum_j c_ij g_j.
class Derivation {
 public:
  Derivation() = default;

  const std::array<MultiPoly, 4>& comps() const { return comps_; }
  const MultiPoly& comp(std::size_t i) const { return comps_[i]; }
  const std::array<std::array<MultiPoly, 3>, 3>& witnesses() const { return witnesses_; }

  bool is_zero() const;
  AmbientField field() const;

  /// V(f), reduced modulo the ideal.
  MultiPoly apply(const Surface& S, const MultiPoly& f) const;
  /// Re-checks the witness identities exactly.
  bool verify(const Surface& S) const;

  std::string str() const;

  friend std::optional<Derivation> tangency_check(const Surface& S, const AmbientField& f);

 private:
  std::array<MultiPoly, 4> comps_;
  std::array<std::array<MultiPoly, 3>, 3> witnesses_;
};

/// Certifies a polynomialized field; nullopt iff some V(g_i) is not in the ideal.
std::optional<Derivation> tangency_check(const Surface& S, const AmbientField& f);

/// tangency_check that throws InternalError on failure (for results that are
/// tangent by construction).
Derivation certify(const Surface& S, const AmbientField& f, std::string_view what);

Derivation bracket(const Surface& S, const Derivation& a, const Derivation& b);
/// sum c_i * f_i * V_i with polynomial multipliers f_i.
Derivation combine(const Surface& S, const std::vector<std::pair<MultiPoly, const Derivation*>>& terms);
Derivation scale(const Surface& S, const MultiPoly& f, const Derivation& d);

/// Whether two derivations agree on the surface.
bool equal_mod(const Surface& S, const Derivation& a, const Derivation& b);

// ---------------------------------------------------------------------------
// Catalog of complete fields

enum class CompleteReason { basic, lnd, shear_product };
std::string_view reason_name(CompleteReason r);

struct CatalogEntry {
  std::string id;
  ChartField chart_field;
  Derivation derivation;
  CompleteReason reason;
};

/// The eight basic complete fields, plus the nilpotent ones that exist when
/// P(0) = 0 or Q(0) = 0. Throws InternalError if one fails to polynomialize.
std::vector<CatalogEntry> catalog(const Surface& S);

/// Entry by id; throws InvalidInput for unknown or unavailable ids.
CatalogEntry catalog_entry(const Surface& S, std::string_view id);

/// The chart field behind a catalog id, without building the derivation.
ChartField catalog_chart_field(std::string_view id);

const std::vector<std::string>& catalog_ids();

/// The displayed form of phi_*(y d/dx) when P(0) = 0:
/// y d/dx + (P + xP') d/du + (P'Q + P'uQ' + (P/x)uQ') d/dv.
AmbientField lnd_display_field(const Surface& S);

// ---------------------------------------------------------------------------
// Completeness criteria

/// f * Theta is complete iff Theta(Theta(f)) = 0 on the surface.
bool shear_complete(const Surface& S, const Derivation& theta, const MultiPoly& f);

enum class LndVerdict { yes, no, unknown };
std::string_view verdict_name(LndVerdict v);

struct LndResult {
  LndVerdict verdict = LndVerdict::unknown;
  int steps = 0;       // longest chain to zero over the four coordinates
  std::string detail;  // the coordinate witnessing "no", when any
};

/// Iterates V on x, y, u, v. "yes" when every chain reaches zero within cap
/// steps; "no" when V(h) is a non-zero multiple of a coordinate h (impossible
/// for a locally nilpotent derivation on a domain); "unknown" otherwise.
LndResult locally_nilpotent(const Surface& S, const Derivation& V, int cap);
int default_lnd_cap(const Surface& S);

}  // namespace giz
