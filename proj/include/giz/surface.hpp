#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "giz/algebra.hpp"
#include "giz/ideal.hpp"

namespace giz {

/// Ambient coordinate slots, in the order points and fields are stored.
enum Coord : std::size_t { kX = 0, kY = 1, kU = 2, kV = 3 };
inline constexpr std::array<Var, 4> kCoordVars{Var::x, Var::y, Var::u, Var::v};

/// The surface yu = xP(x), xv = uQ(u), yv = P(x)Q(u) in C^4.
class Surface {
 public:
  /// Rejects constant P or Q (those equations describe a Danielewski surface).
  static Surface make(const UniPoly& P, const UniPoly& Q);

  const UniPoly& P() const { return P_; }
  const UniPoly& Q() const { return Q_; }
  /// P(x) and Q(u) as ring elements.
  const MultiPoly& Px() const { return Px_; }
  const MultiPoly& Qu() const { return Qu_; }
  const std::array<MultiPoly, 3>& generators() const { return gens_; }
  const Ideal& ideal() const { return ideal_; }

  bool smooth() const { return smooth_; }
  bool p0_zero() const { return p0_zero_; }
  bool q0_zero() const { return q0_zero_; }
  bool simple_P() const { return simple_P_; }
  bool simple_Q() const { return simple_Q_; }
  /// Empty when smooth; otherwise names the violated condition.
  std::string smoothness_diagnostic() const;

  MultiPoly reduce(const MultiPoly& p) const { return ideal_.reduce(p); }
  bool equal_mod(const MultiPoly& a, const MultiPoly& b) const { return ideal_.contains(a - b); }

  std::string label() const;
  friend bool operator==(const Surface& a, const Surface& b) {
    return a.P_ == b.P_ && a.Q_ == b.Q_;
  }

 private:
  Surface(UniPoly P, UniPoly Q);
  UniPoly P_;
  UniPoly Q_;
  MultiPoly Px_;
  MultiPoly Qu_;
  std::array<MultiPoly, 3> gens_;
  Ideal ideal_;
  bool smooth_ = false;
  bool p0_zero_ = false;
  bool q0_zero_ = false;
  bool simple_P_ = false;
  bool simple_Q_ = false;
};

// ---------------------------------------------------------------------------
// Points

struct SurfacePoint {
  enum class Kind { exact, numeric };

  Kind kind = Kind::numeric;
  std::array<GaussRat, 4> exact{};  // meaningful for Kind::exact
  std::array<Complex, 4> coords{};  // always filled
  double residual_tol = 1e-9;

  static SurfacePoint make_exact(const std::array<GaussRat, 4>& c);
  static SurfacePoint make_numeric(const std::array<Complex, 4>& c, double tol = 1e-9);

  bool is_exact() const { return kind == Kind::exact; }
  std::map<Var, Complex> as_map() const;
  std::map<Var, GaussRat> as_exact_map() const;
  std::string str() const;
};

/// Parses `x,y,u,v`; entries are exact constants or floats `a+bi`.
SurfacePoint parse_point(std::string_view text);

/// max_i |g_i(p)|; zero exactly for exact points on the surface.
double residual(const Surface& S, const SurfacePoint& p);
bool on_surface_exact(const Surface& S, const SurfacePoint& p);

/// Throws InvalidInput when p is not on S (exactly, or within its tolerance).
void require_on_surface(const Surface& S, const SurfacePoint& p);

// ---------------------------------------------------------------------------
// Charts

enum class ChartTag { phi, psi, chi };

std::string_view chart_name(ChartTag t);

/// The two chart parameters, in order (phi: x,y; psi: u,v; chi: x,u).
std::array<Var, 2> chart_params(ChartTag t);

/// Parameter pairs outside the chart domain (a zero where C* is required).
bool in_chart_domain(ChartTag t, Complex a, Complex b);
/// Whether a surface point lies in the chart image.
bool in_chart_image(ChartTag t, const SurfacePoint& p, double eps = 0.0);

SurfacePoint chart_embed(const Surface& S, ChartTag t, const GaussRat& a, const GaussRat& b);
SurfacePoint chart_embed(const Surface& S, ChartTag t, Complex a, Complex b);

/// The chart's expressions for the two dependent coordinates (phi: u = xP/y, ...).
std::map<Var, MonoFrac> chart_coordinates(const Surface& S, ChartTag t);

/// Pulls an ambient function back into the chart parameters.
MonoFrac chart_pullback(const Surface& S, ChartTag t, const MultiPoly& f);
MonoFrac chart_pullback(const Surface& S, ChartTag t, const MonoFrac& f);

// ---------------------------------------------------------------------------
// Ambient vector fields

/// Four components (x, y, u, v), each polynomial or over a monomial denominator.
struct AmbientField {
  std::array<MonoFrac, 4> comps;

  bool polynomialized() const;
  bool is_zero() const;
  /// Applies the field to a function: sum comps[i] * d f / d coord_i.
  MonoFrac apply(const MultiPoly& f) const;
  MonoFrac apply(const MonoFrac& f) const;
  AmbientField scaled(const MonoFrac& f) const;
  friend AmbientField operator+(const AmbientField& a, const AmbientField& b);
  friend AmbientField operator-(const AmbientField& a, const AmbientField& b);
  std::string str() const;
};

/// Lie bracket of rational ambient fields, computed componentwise.
AmbientField ambient_bracket(const AmbientField& a, const AmbientField& b);

/// Chart field a * d/d(param0) + b * d/d(param1); coefficients are functions
/// on the surface written in ambient coordinates.
struct ChartField {
  ChartTag chart;
  MonoFrac a;
  MonoFrac b;
};

/// Push-forward by the chart's forward map. The two dependent components are
/// obtained by differentiating the defining equations whose partial in the
/// dependent coordinate is a monomial, which is the chain rule through the
/// chart map written in ambient coordinates.
AmbientField pushforward_rational(const Surface& S, const ChartField& f);

/// Polynomialization of each component via division modulo the ideal.
/// nullopt if some component has no polynomial extension.
std::optional<AmbientField> polynomialize(const Surface& S, const AmbientField& f);

/// pushforward_rational followed by polynomialize; the rational form is
/// returned when polynomialization fails.
AmbientField pushforward(const Surface& S, const ChartField& f);

/// Two rational fields agree on the surface: after clearing denominators,
/// m^k * (difference) lies in the ideal for some k <= max_power.
bool fields_equal_mod(const Surface& S, const AmbientField& a, const AmbientField& b,
                      int max_power = 3);

/// Evaluation of a field at a point (denominators must not vanish there).
std::array<Complex, 4> eval_field(const AmbientField& f, const SurfacePoint& p);
std::array<GaussRat, 4> eval_field_exact(const AmbientField& f, const SurfacePoint& p);

// ---------------------------------------------------------------------------
// Tangent spaces

/// Jacobian of (g1, g2, g3) as polynomials, rows = generators, cols = x,y,u,v.
std::array<std::array<MultiPoly, 4>, 3> jacobian(const Surface& S);

/// Kernel basis of the Jacobian at an exact point; throws InvalidInput when
/// the rank is not 2 (a singular point).
std::array<std::array<GaussRat, 4>, 2> tangent_basis(const Surface& S, const SurfacePoint& p);

/// Rank of a set of exact vectors over Q(i).
std::size_t exact_rank(std::vector<std::array<GaussRat, 4>> vectors);

// ---------------------------------------------------------------------------
// The (x, y, P) <-> (u, v, Q) symmetry

Surface swap_surface(const Surface& S);
SurfacePoint swap_point(const SurfacePoint& p);
/// Renames x <-> u and y <-> v.
MultiPoly swap_vars(const MultiPoly& p);
MonoFrac swap_vars(const MonoFrac& p);
AmbientField swap_field(const AmbientField& f);
ChartTag swap_chart(ChartTag t);

}  // namespace giz
