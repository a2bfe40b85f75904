#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "giz/fields.hpp"

namespace giz {

// ---------------------------------------------------------------------------
// Flows

struct FlowResult {
  SurfacePoint endpoint;
  double max_residual = 0.0;
  int steps = 0;
};

/// Whether the catalog field's closed-form chart flow applies at p.
bool closed_flow_applies(std::string_view id, const SurfacePoint& p);

/// Closed-form chart flow of a catalog field. Shear flows keep exact points
/// exact when t is exact. Throws InvalidInput outside the chart locus.
SurfacePoint closed_flow(const Surface& S, std::string_view id, const GaussRat& t, const SurfacePoint& p);
SurfacePoint closed_flow(const Surface& S, std::string_view id, Complex t, const SurfacePoint& p);

struct NumericFlowOptions {
  double tol = 1e-8;        // residual bound, relative to max(1, |p|)^(deg+1)
  double rel_step = 1e-10;  // step-size control
  bool project = true;      // one Newton step onto the surface per step
  int max_steps = 200000;
};

/// Adaptive Runge-Kutta 4(5) along the segment 0 -> t of the time plane.
/// Throws NumericFailure on residual blow-up or step-size underflow.
FlowResult numeric_flow(const Surface& S, const Derivation& V, Complex t, const SurfacePoint& p,
                        const NumericFlowOptions& opt = {});

/// Residual of p scaled by max(1, |p|)^(deg + 1), deg = max(deg P, deg Q).
double scaled_residual(const Surface& S, const SurfacePoint& p);

// ---------------------------------------------------------------------------
// The isomorphism Theta onto S_{P, Q(u - lambda P(0))}

struct ThetaMap {
  std::array<MultiPoly, 4> comps;      // images of x, y, u, v; may contain lambda
  MultiPoly P;                         // in x
  MultiPoly Q;                         // in u, may contain lambda
  MultiPoly Qt;                        // Q(u - lambda P(0))
  std::array<MultiPoly, 3> target_generators;

  /// Components with lambda set to a value.
  std::array<MultiPoly, 4> at(const GaussRat& lambda) const;
};

/// Theta with lambda left symbolic (the ring variable lambda).
ThetaMap theta_symbolic(const MultiPoly& P, const MultiPoly& Q);
ThetaMap theta_symbolic(const Surface& S);
/// Theta with a fixed lambda and its exact target surface.
std::pair<std::array<MultiPoly, 4>, Surface> theta(const Surface& S, const GaussRat& lambda);

SurfacePoint apply_map(const std::array<MultiPoly, 4>& m, const SurfacePoint& p);

struct ThetaReport {
  bool pullback_exact = false;    // target generators pull back into the ideal
  bool inverse_exact = false;     // Theta_{-lambda} after Theta_lambda is the identity mod the ideal
  bool v1_formula = false;        // only checked when P(0) = 0
  bool v1_checked = false;
  double max_numeric_residual = 0.0;  // max |g_i| on the images
  double max_scaled_residual = 0.0;   // the same over max(1, |image|)^(deg + 1)
  int numeric_points = 0;
  std::vector<std::string> findings;
};

/// Symbolic lambda when `lambda` is empty.
ThetaReport verify_theta(const Surface& S, std::optional<GaussRat> lambda, unsigned seed = 0,
                         int numeric_points = 100);

/// Fourth component of Theta at (0, 0, u, 0) minus lambda P'(0) (Q(u) + 2u Q'(u)),
/// reduced modulo u Q(u), as a polynomial in u and lambda.
MultiPoly v1_discrepancy(const Surface& S);

// ---------------------------------------------------------------------------
// Words

struct FlowStep {
  std::string id;
  Complex t;
  std::optional<GaussRat> t_exact;
};
struct IsoStep {
  GaussRat lambda;
  bool forward = true;  // backward applies Theta_{-lambda} of the current surface
};
struct SwapStep {};
using WordStep = std::variant<FlowStep, IsoStep, SwapStep>;

struct AutoWord {
  std::vector<WordStep> steps;

  bool empty() const { return steps.empty(); }
  AutoWord inverse() const;
  AutoWord& append(const AutoWord& w);
  std::string str() const;
};

nlohmann::ordered_json word_json(const AutoWord& w);
AutoWord word_from_json(const nlohmann::json& j);

struct ExecuteOptions {
  double tol = 1e-8;
  NumericFlowOptions numeric;
};

struct ExecuteResult {
  FlowResult flow;
  Surface surface;  // the surface the endpoint lies on
  int numeric_steps = 0;
};

/// Applies the steps in order; throws NumericFailure when a residual breaches tol
/// and InvalidInput for steps that do not apply.
ExecuteResult execute_word(const Surface& S, const AutoWord& w, const SurfacePoint& p,
                           const ExecuteOptions& opt = {});

// ---------------------------------------------------------------------------
// Transitivity

enum class PlanMode { flows, algebraic };

/// Chi-chart point (a, c) with a, c >= 1 the least integers such that P(a) != 0
/// and Q(c) != 0, so all four coordinates are nonzero.
SurfacePoint reference_point(const Surface& S);

/// A word taking p to q. Throws InvalidInput for non-smooth surfaces (and for
/// repeated roots in algebraic mode).
AutoWord plan_transitivity(const Surface& S, const SurfacePoint& p, const SurfacePoint& q, PlanMode mode);

/// The per-point half: a word taking p to reference_point(S).
AutoWord plan_to_reference(const Surface& S, const SurfacePoint& p, PlanMode mode);

/// Points with y = v = 0 (the finite set the LND flows cannot leave).
bool in_lambda_set(const SurfacePoint& p, double eps = 1e-12);

}  // namespace giz
