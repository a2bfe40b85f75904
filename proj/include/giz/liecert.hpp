#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "giz/fields.hpp"

namespace giz {

// ---------------------------------------------------------------------------
// Certificate graph

enum class CertOp { leaf, shear_mult, bracket, lincomb };
std::string_view op_name(CertOp op);

struct CertNode {
  CertOp op = CertOp::leaf;
  std::string catalog_id;             // leaf, shear_mult
  MultiPoly f;                        // shear_mult multiplier
  std::vector<std::size_t> children;  // bracket: 2, lincomb: any
  std::vector<GaussRat> coeffs;       // lincomb, parallel to children
  Derivation value;
  std::string label;
};

/// Append-only DAG of certified Lie-algebra elements on one surface.
class CertGraph {
 public:
  explicit CertGraph(Surface S) : S_(std::move(S)) {}

  const Surface& surface() const { return S_; }
  const CertNode& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }

  std::size_t leaf(std::string_view catalog_id);
  /// f * leaf; throws InvalidInput unless the shear criterion holds.
  std::size_t shear(std::string_view catalog_id, const MultiPoly& f);
  std::size_t bracket(std::size_t a, std::size_t b);
  std::size_t lincomb(const std::vector<std::pair<GaussRat, std::size_t>>& terms);

  void set_label(std::size_t i, std::string label) { nodes_.at(i).label = std::move(label); }

  /// Recomputes each node from its children and the catalog, bottom-up.
  /// Returns the first node whose cached value does not recompute.
  std::optional<std::size_t> verify() const;

  /// Nodes reachable from the given roots, in topological order.
  std::vector<std::size_t> closure(const std::vector<std::size_t>& roots) const;

 private:
  std::size_t push(CertNode n);
  const Derivation& leaf_value(const std::string& id);

  Surface S_;
  std::vector<CertNode> nodes_;
  std::map<std::string, std::size_t> leaf_nodes_;
  std::map<std::string, Derivation> leaf_values_;
};

std::string swap_catalog_id(std::string_view id);

// ---------------------------------------------------------------------------
// Span with exact membership queries

class CertifiedSpan {
 public:
  explicit CertifiedSpan(Surface S) : graph_(std::move(S)) {}

  CertGraph& graph() { return graph_; }
  const CertGraph& graph() const { return graph_; }
  const Surface& surface() const { return graph_.surface(); }

  /// Adds a node's value to the span (no-op for elements already added).
  void add(std::size_t node);
  const std::vector<std::size_t>& elements() const { return elements_; }
  std::size_t rank() const { return rows_.size(); }

  struct Solution {
    std::vector<std::pair<GaussRat, std::size_t>> terms;  // coefficient, node
    AmbientField residual;                                // zero iff solved
    bool solved = false;
  };
  /// Writes target as a linear combination of span elements, or returns the
  /// part of it that is not reached.
  Solution solve(const Derivation& target) const;
  bool contains(const Derivation& target) const { return solve(target).solved; }

  /// A lincomb node equal to target, or nullopt.
  std::optional<std::size_t> express(const Derivation& target, const std::string& label);

  void name(const std::string& key, std::size_t node) { names_[key] = node; }
  std::optional<std::size_t> find(const std::string& key) const;
  const std::map<std::string, std::size_t>& names() const { return names_; }

 private:
  using Key = std::pair<std::size_t, Monomial>;
  struct KeyLess {
    bool operator()(const Key& a, const Key& b) const {
      if (a.first != b.first) return a.first < b.first;
      return compare_degrevlex(a.second, b.second) > 0;
    }
  };
  using Vec = std::map<Key, GaussRat, KeyLess>;
  struct Row {
    Vec vec;                                // pivot entry is 1 and is the first key
    std::map<std::size_t, GaussRat> combo;  // in terms of element positions
  };
  static Vec to_vec(const Derivation& d);
  /// Eliminates pivots from v in key order, accumulating into combo.
  void eliminate(Vec& v, std::map<std::size_t, GaussRat>& combo) const;

  CertGraph graph_;
  std::vector<std::size_t> elements_;
  std::map<std::size_t, std::size_t> element_pos_;
  std::vector<Row> rows_;
  std::map<Key, std::size_t, KeyLess> pivots_;
  std::map<std::string, std::size_t> names_;
};

// ---------------------------------------------------------------------------
// Bracket identities

/// A term c * [a, b] (bracket) or c * a (plain field); fields are chart fields.
struct IdTerm {
  GaussRat coeff;
  ChartField a;
  std::optional<ChartField> b;
};

enum class VerdictKind { exact, scalar_match, mismatch };
std::string_view verdict_kind_name(VerdictKind v);

struct IdentityReport {
  std::string name;
  std::map<std::string, long> params;
  AmbientField lhs;
  AmbientField rhs;
  AmbientField difference;  // lhs - rhs
  std::pair<MonoFrac, MonoFrac> lhs_chart;
  std::pair<MonoFrac, MonoFrac> rhs_chart;
  std::pair<MonoFrac, MonoFrac> difference_chart;
  VerdictKind verdict = VerdictKind::mismatch;
  GaussRat scalar{1};
  /// Independent chart-level computation of the left side agrees.
  bool oracle_agrees = false;
  /// Set when the difference was tested against a span.
  std::optional<bool> absorbed;

  std::string verdict_str() const;
  bool acceptable() const;  // exact, scalar match, or absorbed
};

/// Identity ids: D1 (k), D2 (j,k), D3 (j,k), E1 (j,k,l), E2 (j,k,l).
std::vector<std::string> identity_names();
IdentityReport verify_identity(const Surface& S, std::string_view name,
                               const std::map<std::string, long>& params);

/// The phi-chart expression of a chart field (phi itself, or chi through the
/// transition y = xP(x)/u), as two Laurent coefficients in x and y.
std::pair<MonoFrac, MonoFrac> to_phi_chart(const Surface& S, const ChartField& f);

/// Bracket of phi-chart fields in the two chart variables.
std::pair<MonoFrac, MonoFrac> phi_chart_bracket(const std::pair<MonoFrac, MonoFrac>& a,
                                                const std::pair<MonoFrac, MonoFrac>& b);

/// Phi-chart form of an ambient field: its x and y components pulled back.
std::pair<MonoFrac, MonoFrac> phi_chart_form(const Surface& S, const AmbientField& f);

/// Tests whether the difference of a report is a member of the span.
bool absorb(const CertifiedSpan& span, IdentityReport& report);

// ---------------------------------------------------------------------------
// The chain of brackets producing an ideal multiple of phi_*(d/dy)

struct SpanRanges {
  int j = 1, k = 1, l = 1, m = 1;
  bool empty() const { return j < 0 || k < 0 || l < 0 || m < 0; }
};

/// One replayed step of the chain: how the computed bracket relates to the
/// element it is meant to produce.
struct StepRecord {
  std::string name;
  std::map<std::string, long> params;
  std::string verdict;  // exact, scalar(c), absorbed(n), failed
};

struct BuiltSpan {
  CertifiedSpan span;
  std::vector<StepRecord> steps;
  std::vector<std::string> findings;  // steps that could not be completed
  SpanRanges ranges;
};

/// Seeds the span with catalog and shear leaves, then replays the bracket
/// chain on both sides of the symmetry (the psi side uses the mirrored
/// leaves, multipliers and targets).
BuiltSpan build_span(const Surface& S, SpanRanges ranges);

struct LambdaResult {
  Derivation displayed;          // multiplier v on the d/du field
  MultiPoly displayed_x_part;    // its d/dx component in normal form
  Derivation lambda;             // multiplier x instead of v
  MultiPoly lambda_x_part;       // zero when the d/dx part cancels
  std::size_t node = 0;
  bool in_span = false;
  bool extracted = false;
  std::uint32_t x_exp = 0, u_exp = 0, v_exp = 0;  // x^{1+s} u^{2+r} v^{1+m}
  MultiPoly R;
  std::string detail;
};

LambdaResult build_lambda(BuiltSpan& b, int j, int k, int l);

struct FinalResult {
  MultiPoly T;
  std::size_t root = 0;
  std::uint32_t first_operand_y_exp = 0;
  LambdaResult lambda;
  bool factored = false;
  bool root_matches = false;  // root == (monomial * T) phi_*(d/dy) mod ideal
  std::string detail;
};

/// Final bracket [x^{2+j} y^{e+k} u^{1+l} d/dy, Lambda] with the monomial
/// x^{1+j} y^{1+k} u^{1+l} v^m factored out. e = 3 when that operand lies in
/// the span, otherwise 7.
FinalResult final_generator(BuiltSpan& b, int j, int k, int l, int m);

/// The tangent directions mu(p0) and mu(p0) + y0^2 phi_*(d/dx)(p0) span
/// T_{p0}S. Throws InvalidInput when y0 = 0 or mu(p0) = 0.
bool generating_check(const Surface& S, const SurfacePoint& p0, const Derivation& mu);

// ---------------------------------------------------------------------------
// Serialization (cert-v1)

nlohmann::ordered_json report_json(const IdentityReport& r);
nlohmann::ordered_json cert_json(const CertGraph& g, const std::vector<std::size_t>& roots);

}  // namespace giz
