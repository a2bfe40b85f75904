#include "giz/autoflow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

namespace giz {

namespace {

MultiPoly var(Var v) { return MultiPoly::var(v); }

std::size_t coord_of(Var v) {
  switch (v) {
    case Var::x: return kX;
    case Var::y: return kY;
    case Var::u: return kU;
    case Var::v: return kV;
    default: break;
  }
  throw InternalError("not an ambient variable");
}

double scale_of(const std::array<Complex, 4>& z) {
  double s = 1.0;
  for (const auto& c : z) s = std::max(s, std::abs(c));
  return s;
}

/// Zero test on one coordinate: exact for exact points, relative for numeric ones.
bool zero(const SurfacePoint& p, std::size_t i) {
  if (p.is_exact()) return p.exact[i].is_zero();
  return std::abs(p.coords[i]) <= 1e-9 * scale_of(p.coords);
}

/// A polynomial in x, y, u, v compiled for repeated complex evaluation.
class NumPoly {
 public:
  NumPoly() = default;
  explicit NumPoly(const MultiPoly& p) {
    for (const auto& [m, c] : p.terms()) {
      std::array<std::uint32_t, 4> e{m[Var::x], m[Var::y], m[Var::u], m[Var::v]};
      for (std::size_t i = 0; i < 4; ++i) max_ = std::max(max_, e[i]);
      terms_.push_back({c.to_complex(), e});
    }
  }
  Complex eval(const std::array<Complex, 4>& z) const {
    if (terms_.empty()) return 0.0;
    std::array<std::vector<Complex>, 4> pw;
    for (std::size_t i = 0; i < 4; ++i) {
      pw[i].resize(max_ + 1);
      pw[i][0] = 1.0;
      for (std::uint32_t k = 1; k <= max_; ++k) pw[i][k] = pw[i][k - 1] * z[i];
    }
    Complex acc = 0.0;
    for (const auto& [c, e] : terms_) acc += c * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]] * pw[3][e[3]];
    return acc;
  }

 private:
  std::vector<std::pair<Complex, std::array<std::uint32_t, 4>>> terms_;
  std::uint32_t max_ = 0;
};

struct CompiledSurface {
  std::array<NumPoly, 3> g;
  std::array<std::array<NumPoly, 4>, 3> dg;
  double deg = 1;

  explicit CompiledSurface(const Surface& S) {
    for (std::size_t i = 0; i < 3; ++i) {
      g[i] = NumPoly(S.generators()[i]);
      for (std::size_t j = 0; j < 4; ++j) dg[i][j] = NumPoly(S.generators()[i].derive(kCoordVars[j]));
    }
    deg = static_cast<double>(std::max(S.P().degree(), S.Q().degree()) + 1);
  }
  double residual(const std::array<Complex, 4>& z) const {
    double r = 0.0;
    for (const auto& gi : g) r = std::max(r, std::abs(gi.eval(z)));
    return r;
  }
  double scaled(const std::array<Complex, 4>& z) const { return residual(z) / std::pow(scale_of(z), deg); }

  /// One minimum-norm Newton step towards g = 0.
  void project(std::array<Complex, 4>& z) const {
    Eigen::Matrix<Complex, 3, 4> J;
    Eigen::Matrix<Complex, 3, 1> r;
    for (std::size_t i = 0; i < 3; ++i) {
      r(i) = g[i].eval(z);
      for (std::size_t j = 0; j < 4; ++j) J(i, j) = dg[i][j].eval(z);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    Eigen::VectorXcd d = svd.solve(r);
    for (std::size_t j = 0; j < 4; ++j) z[j] -= d(static_cast<Eigen::Index>(j));
  }
};

ChartTag chart_of(std::string_view id) {
  if (id.starts_with("phi.")) return ChartTag::phi;
  if (id.starts_with("psi.")) return ChartTag::psi;
  if (id.starts_with("chi.")) return ChartTag::chi;
  throw InvalidInput("unknown catalog id '" + std::string(id) + "'");
}

// Chart flows: a += b^2 t, a += b t, a *= exp(b t), b *= exp(a t).
enum class FlowKind { shift_sq, shift, scale_a, scale_b };

FlowKind flow_kind(std::string_view id) {
  if (id == "phi.y2_dx" || id == "psi.v2_du") return FlowKind::shift_sq;
  if (id == "phi.y_dx_lnd" || id == "psi.v_du_lnd") return FlowKind::shift;
  if (id == "phi.xy_dx" || id == "psi.uv_du" || id == "chi.xu_dx") return FlowKind::scale_a;
  if (id == "phi.xy_dy" || id == "psi.uv_dv" || id == "chi.xu_du") return FlowKind::scale_b;
  throw InvalidInput("unknown catalog id '" + std::string(id) + "'");
}

void check_id(const Surface& S, std::string_view id) {
  flow_kind(id);
  if (id == "phi.y_dx_lnd" && !S.p0_zero()) throw InvalidInput("phi.y_dx_lnd requires P(0) = 0");
  if (id == "psi.v_du_lnd" && !S.q0_zero()) throw InvalidInput("psi.v_du_lnd requires Q(0) = 0");
}

}  // namespace

// ---------------------------------------------------------------------------
// Flows

bool closed_flow_applies(std::string_view id, const SurfacePoint& p) {
  return in_chart_image(chart_of(id), p, 1e-6 * scale_of(p.coords));
}

SurfacePoint closed_flow(const Surface& S, std::string_view id, const GaussRat& t, const SurfacePoint& p) {
  FlowKind k = flow_kind(id);
  if (!p.is_exact() || (k != FlowKind::shift_sq && k != FlowKind::shift))
    return closed_flow(S, id, t.to_complex(), p);
  check_id(S, id);
  ChartTag c = chart_of(id);
  if (!in_chart_image(c, p)) throw InvalidInput("point outside the chart of " + std::string(id));
  auto [va, vb] = chart_params(c);
  GaussRat a = p.exact[coord_of(va)], b = p.exact[coord_of(vb)];
  a = a + (k == FlowKind::shift_sq ? b * b : b) * t;
  return chart_embed(S, c, a, b);
}

SurfacePoint closed_flow(const Surface& S, std::string_view id, Complex t, const SurfacePoint& p) {
  check_id(S, id);
  ChartTag c = chart_of(id);
  if (!closed_flow_applies(id, p)) throw InvalidInput("point outside the chart of " + std::string(id));
  auto [va, vb] = chart_params(c);
  Complex a = p.coords[coord_of(va)], b = p.coords[coord_of(vb)];
  switch (flow_kind(id)) {
    case FlowKind::shift_sq: a += b * b * t; break;
    case FlowKind::shift: a += b * t; break;
    case FlowKind::scale_a: a *= std::exp(b * t); break;
    case FlowKind::scale_b: b *= std::exp(a * t); break;
  }
  return chart_embed(S, c, a, b);
}

double scaled_residual(const Surface& S, const SurfacePoint& p) {
  if (p.is_exact()) return on_surface_exact(S, p) ? 0.0 : std::numeric_limits<double>::infinity();
  double d = static_cast<double>(std::max(S.P().degree(), S.Q().degree()) + 1);
  return residual(S, p) / std::pow(scale_of(p.coords), d);
}

FlowResult numeric_flow(const Surface& S, const Derivation& V, Complex t, const SurfacePoint& p,
                        const NumericFlowOptions& opt) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 8>;
  FlowResult res{p, 0.0, 0};
  if (t == Complex(0) || V.is_zero()) return res;

  CompiledSurface cs(S);
  std::array<NumPoly, 4> comps;
  for (std::size_t i = 0; i < 4; ++i) comps[i] = NumPoly(V.comp(i));
  auto unpack = [](const State& s) {
    std::array<Complex, 4> z;
    for (std::size_t i = 0; i < 4; ++i) z[i] = {s[2 * i], s[2 * i + 1]};
    return z;
  };
  auto pack = [](const std::array<Complex, 4>& z, State& s) {
    for (std::size_t i = 0; i < 4; ++i) {
      s[2 * i] = z[i].real();
      s[2 * i + 1] = z[i].imag();
    }
  };
  // Integrate z' = t V(z) over s in [0, 1].
  auto rhs = [&](const State& s, State& ds, double) {
    auto z = unpack(s);
    for (std::size_t i = 0; i < 4; ++i) {
      Complex w = t * comps[i].eval(z);
      ds[2 * i] = w.real();
      ds[2 * i + 1] = w.imag();
    }
  };
  State state;
  pack(p.coords, state);
  auto stepper = ode::make_controlled<ode::runge_kutta_cash_karp54<State>>(opt.rel_step, opt.rel_step);
  double s = 0.0, ds = 1e-2;
  while (s < 1.0) {
    if (res.steps >= opt.max_steps) throw NumericFailure("numeric flow exceeded the step limit");
    double h = std::min(ds, 1.0 - s);
    double before = s;
    if (stepper.try_step(rhs, state, s, h) == ode::fail) {
      if (h < 1e-14) throw NumericFailure("numeric flow step size underflow at s = " + std::to_string(s));
      ds = h;
      continue;
    }
    ds = (s >= 1.0 || h < ds) ? ds : h;
    if (s - before <= 0.0) throw NumericFailure("numeric flow made no progress");
    ++res.steps;
    auto z = unpack(state);
    if (opt.project) {
      cs.project(z);
      pack(z, state);
    }
    double r = cs.scaled(z);
    res.max_residual = std::max(res.max_residual, r);
    if (!(r <= opt.tol)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "residual %.3g at s = %.6f after %d steps", r, s, res.steps);
      throw NumericFailure(std::string("numeric flow left the surface: ") + buf);
    }
  }
  res.endpoint = SurfacePoint::make_numeric(unpack(state), p.residual_tol);
  return res;
}

// ---------------------------------------------------------------------------
// Theta

namespace {

MultiPoly divide_or_throw(const MultiPoly& p, Var v) {
  auto q = exact_divide(p, var(v));
  if (!q) throw InternalError(std::string("Theta: numerator not divisible by ") + std::string(var_name(v)));
  return *q;
}

ThetaMap build_theta(const MultiPoly& P, const MultiPoly& Q, const MultiPoly& lam) {
  ThetaMap t;
  t.P = P;
  t.Q = Q;
  const MultiPoly x = var(Var::x), y = var(Var::y), u = var(Var::u), v = var(Var::v);
  MultiPoly P0 = P.substitute({{Var::x, MultiPoly()}});
  t.Qt = Q.substitute({{Var::u, u - lam * P0}});
  auto Pof = [&](const MultiPoly& w) { return P.substitute({{Var::x, w}}); };
  auto Qtof = [&](const MultiPoly& w) { return t.Qt.substitute({{Var::u, w}}); };

  MultiPoly X = x + lam * y;
  MultiPoly U = u + divide_or_throw(X * Pof(X) - x * P, Var::y);
  MultiPoly Ubar = u + lam * (P + x * P.derive(Var::x));
  MultiPoly V = v + divide_or_throw(Pof(X) * Qtof(U) - P * Qtof(Ubar), Var::y) +
                u * divide_or_throw(Qtof(Ubar) - Q, Var::x);
  t.comps = {X, y, U, V};
  t.target_generators = {y * u - x * P, x * v - u * t.Qt, y * v - P * t.Qt};
  return t;
}

std::map<Var, MultiPoly> as_substitution(const std::array<MultiPoly, 4>& m) {
  return {{Var::x, m[0]}, {Var::y, m[1]}, {Var::u, m[2]}, {Var::v, m[3]}};
}

/// Remainder of r modulo a polynomial m in the single variable v (other
/// variables are coefficients).
MultiPoly reduce_univariate(MultiPoly r, const MultiPoly& m, Var v) {
  UniPoly mu = UniPoly::from_multi(m, v);
  auto n = static_cast<std::uint32_t>(mu.degree());
  GaussRat lc = mu.coeff(n);
  for (;;) {
    const std::pair<const Monomial, GaussRat>* top = nullptr;
    for (const auto& t : r.terms())
      if (t.first[v] >= n && (!top || t.first[v] > top->first[v])) top = &t;
    if (!top) return r;
    Monomial shift = top->first;
    shift[v] -= n;
    r -= m.mul_term(top->second / lc, shift);
  }
}

}  // namespace

std::array<MultiPoly, 4> ThetaMap::at(const GaussRat& lambda) const {
  std::array<MultiPoly, 4> out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = comps[i].substitute({{Var::lambda, MultiPoly(lambda)}});
  return out;
}

ThetaMap theta_symbolic(const MultiPoly& P, const MultiPoly& Q) { return build_theta(P, Q, var(Var::lambda)); }
ThetaMap theta_symbolic(const Surface& S) { return theta_symbolic(S.Px(), S.Qu()); }

std::pair<std::array<MultiPoly, 4>, Surface> theta(const Surface& S, const GaussRat& lambda) {
  ThetaMap t = build_theta(S.Px(), S.Qu(), MultiPoly(lambda));
  return {t.comps, Surface::make(S.P(), UniPoly::from_multi(t.Qt, Var::u))};
}

SurfacePoint apply_map(const std::array<MultiPoly, 4>& m, const SurfacePoint& p) {
  std::array<GaussRat, 4> e;
  std::array<Complex, 4> z;
  if (p.is_exact()) {
    auto pt = p.as_exact_map();
    for (std::size_t i = 0; i < 4; ++i) e[i] = m[i].eval_exact(pt);
    return SurfacePoint::make_exact(e);
  }
  for (std::size_t i = 0; i < 4; ++i) z[i] = NumPoly(m[i]).eval(p.coords);
  return SurfacePoint::make_numeric(z, p.residual_tol);
}

MultiPoly v1_discrepancy(const Surface& S) {
  ThetaMap t = theta_symbolic(S);
  MultiPoly zero;
  MultiPoly v1 = t.comps[3].substitute({{Var::x, zero}, {Var::y, zero}, {Var::v, zero}});
  GaussRat dP0 = S.P().derivative().eval(GaussRat(0));
  const MultiPoly u = var(Var::u), Q = S.Qu();
  MultiPoly expect = var(Var::lambda) * MultiPoly(dP0) * (Q + MultiPoly(GaussRat(2)) * u * Q.derive(Var::u));
  return reduce_univariate(v1 - expect, u * Q, Var::u);
}

ThetaReport verify_theta(const Surface& S, std::optional<GaussRat> lambda, unsigned seed, int numeric_points) {
  ThetaReport rep;
  MultiPoly lam = lambda ? MultiPoly(*lambda) : var(Var::lambda);
  ThetaMap t = build_theta(S.Px(), S.Qu(), lam);
  auto sub = as_substitution(t.comps);

  rep.pullback_exact = true;
  for (std::size_t i = 0; i < 3; ++i) {
    MultiPoly r = S.reduce(t.target_generators[i].substitute(sub));
    if (!r.is_zero()) {
      rep.pullback_exact = false;
      rep.findings.push_back("generator " + std::to_string(i + 1) + " pulls back to " + r.str());
    }
  }

  ThetaMap back = build_theta(S.Px(), t.Qt, -lam);
  rep.inverse_exact = true;
  for (std::size_t i = 0; i < 4; ++i) {
    MultiPoly r = S.reduce(back.comps[i].substitute(sub) - var(kCoordVars[i]));
    if (!r.is_zero()) {
      rep.inverse_exact = false;
      rep.findings.push_back("inverse candidate differs in " + std::string(var_name(kCoordVars[i])) +
                             ": " + r.str());
    }
  }

  if (S.p0_zero()) {
    rep.v1_checked = true;
    MultiPoly d = v1_discrepancy(S);
    rep.v1_formula = d.is_zero();
    if (!rep.v1_formula) rep.findings.push_back("v1 formula discrepancy " + d.str());
  }

  GaussRat lv = lambda ? *lambda : GaussRat::frac(7, 5);
  std::array<NumPoly, 4> img;
  for (std::size_t i = 0; i < 4; ++i) img[i] = NumPoly(t.comps[i].substitute({{Var::lambda, MultiPoly(lv)}}));
  std::array<NumPoly, 3> tg;
  for (std::size_t i = 0; i < 3; ++i) tg[i] = NumPoly(t.target_generators[i].substitute({{Var::lambda, MultiPoly(lv)}}));
  double deg = static_cast<double>(std::max(S.P().degree(), S.Q().degree()) + 1);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> rad(0.5, 1.5), ang(0.0, 2 * M_PI);
  for (int k = 0; k < numeric_points; ++k) {
    Complex a = std::polar(rad(rng), ang(rng)), b = std::polar(rad(rng), ang(rng));
    SurfacePoint p = chart_embed(S, ChartTag::chi, a, b);
    std::array<Complex, 4> z;
    for (std::size_t i = 0; i < 4; ++i) z[i] = img[i].eval(p.coords);
    double r = 0.0;
    for (const auto& g : tg) r = std::max(r, std::abs(g.eval(z)));
    rep.max_numeric_residual = std::max(rep.max_numeric_residual, r);
    rep.max_scaled_residual = std::max(rep.max_scaled_residual, r / std::pow(scale_of(z), deg));
    ++rep.numeric_points;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Words

AutoWord AutoWord::inverse() const {
  AutoWord w;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    if (const auto* f = std::get_if<FlowStep>(&*it)) {
      FlowStep g = *f;
      g.t = -g.t;
      if (g.t_exact) g.t_exact = -*g.t_exact;
      w.steps.emplace_back(g);
    } else if (const auto* i = std::get_if<IsoStep>(&*it)) {
      w.steps.emplace_back(IsoStep{i->lambda, !i->forward});
    } else {
      w.steps.emplace_back(SwapStep{});
    }
  }
  return w;
}

AutoWord& AutoWord::append(const AutoWord& w) {
  steps.insert(steps.end(), w.steps.begin(), w.steps.end());
  return *this;
}

namespace {

std::string time_str(const FlowStep& f) { return f.t_exact ? f.t_exact->str() : complex_str(f.t); }

}  // namespace

std::string AutoWord::str() const {
  std::string s;
  for (const auto& st : steps) {
    if (!s.empty()) s += " ";
    if (const auto* f = std::get_if<FlowStep>(&st))
      s += "flow(" + f->id + ", " + time_str(*f) + ")";
    else if (const auto* i = std::get_if<IsoStep>(&st))
      s += "iso(" + i->lambda.str() + (i->forward ? ", fwd)" : ", bwd)");
    else
      s += "swap";
  }
  return s;
}

nlohmann::ordered_json word_json(const AutoWord& w) {
  nlohmann::ordered_json j;
  j["schema"] = "word-v1";
  auto arr = nlohmann::ordered_json::array();
  for (const auto& st : w.steps) {
    nlohmann::ordered_json o;
    if (const auto* f = std::get_if<FlowStep>(&st))
      o["flow"] = {{"id", f->id}, {"t", time_str(*f)}};
    else if (const auto* i = std::get_if<IsoStep>(&st))
      o["iso"] = {{"lambda", i->lambda.str()}, {"dir", i->forward ? "fwd" : "bwd"}};
    else
      o["swap"] = true;
    arr.push_back(o);
  }
  j["steps"] = arr;
  return j;
}

AutoWord word_from_json(const nlohmann::json& j) {
  if (!j.contains("steps") || !j["steps"].is_array()) throw InvalidInput("word-v1: missing steps array");
  AutoWord w;
  for (const auto& o : j["steps"]) {
    if (o.contains("flow")) {
      ParsedScalar t = parse_scalar(o["flow"].at("t").get<std::string>());
      w.steps.emplace_back(FlowStep{o["flow"].at("id").get<std::string>(), t.value, t.exact});
    } else if (o.contains("iso")) {
      ParsedScalar l = parse_scalar(o["iso"].at("lambda").get<std::string>());
      if (!l.exact) throw InvalidInput("word-v1: iso lambda must be exact");
      std::string dir = o["iso"].value("dir", "fwd");
      if (dir != "fwd" && dir != "bwd") throw InvalidInput("word-v1: iso dir must be fwd or bwd");
      w.steps.emplace_back(IsoStep{*l.exact, dir == "fwd"});
    } else if (o.contains("swap")) {
      w.steps.emplace_back(SwapStep{});
    } else {
      throw InvalidInput("word-v1: unknown step " + o.dump());
    }
  }
  return w;
}

namespace {

/// Mutable execution state shared by execute_word and the planners.
struct Runner {
  Surface S;
  SurfacePoint p;
  ExecuteOptions opt;
  FlowResult stats{p, 0.0, 0};
  int numeric_steps = 0;
  std::map<std::pair<std::string, std::string>, std::pair<std::array<MultiPoly, 4>, Surface>> thetas;

  void apply(const WordStep& st) {
    if (const auto* f = std::get_if<FlowStep>(&st)) {
      check_id(S, f->id);
      if (closed_flow_applies(f->id, p)) {
        p = f->t_exact ? closed_flow(S, f->id, *f->t_exact, p) : closed_flow(S, f->id, f->t, p);
        ++stats.steps;
      } else {
        FlowResult r = numeric_flow(S, catalog_entry(S, f->id).derivation, f->t, p, opt.numeric);
        p = r.endpoint;
        stats.steps += r.steps;
        numeric_steps += r.steps;
        stats.max_residual = std::max(stats.max_residual, r.max_residual);
      }
    } else if (const auto* i = std::get_if<IsoStep>(&st)) {
      GaussRat l = i->forward ? i->lambda : -i->lambda;
      auto key = std::make_pair(S.label(), l.str());
      auto it = thetas.find(key);
      if (it == thetas.end()) it = thetas.emplace(key, theta(S, l)).first;
      p = apply_map(it->second.first, p);
      S = it->second.second;
      ++stats.steps;
    } else {
      p = swap_point(p);
      S = swap_surface(S);
      ++stats.steps;
    }
    double r = scaled_residual(S, p);
    stats.max_residual = std::max(stats.max_residual, r);
    if (!(r <= opt.tol)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3g", r);
      throw NumericFailure("word execution left the surface (scaled residual " + std::string(buf) + ")");
    }
  }
};

}  // namespace

ExecuteResult execute_word(const Surface& S, const AutoWord& w, const SurfacePoint& p, const ExecuteOptions& opt) {
  require_on_surface(S, p);
  Runner run{S, p, opt};
  for (const auto& st : w.steps) run.apply(st);
  run.stats.endpoint = run.p;
  return {run.stats, run.S, run.numeric_steps};
}

// ---------------------------------------------------------------------------
// Transitivity

bool in_lambda_set(const SurfacePoint& p, double eps) {
  if (p.is_exact()) return p.exact[kY].is_zero() && p.exact[kV].is_zero();
  double s = scale_of(p.coords);
  return std::abs(p.coords[kY]) <= eps * s && std::abs(p.coords[kV]) <= eps * s;
}

SurfacePoint reference_point(const Surface& S) {
  long a = 1;
  while (S.P().eval(GaussRat(a)).is_zero()) ++a;
  long c = 1;
  while (S.Q().eval(GaussRat(c)).is_zero()) ++c;
  return chart_embed(S, ChartTag::chi, GaussRat(a), GaussRat(c));
}

namespace {

/// Builds a word while tracking where it takes the start point.
struct Planner {
  Runner run;
  AutoWord word;

  Planner(const Surface& S, const SurfacePoint& p) : run{S, p, {}} {}

  const SurfacePoint& p() const { return run.p; }
  void push(const WordStep& st) {
    run.apply(st);
    word.steps.push_back(st);
  }
  /// Applies a trial sequence on a copy; commits it when accept() holds.
  template <typename Accept>
  bool attempt(const std::vector<WordStep>& steps, Accept accept) {
    Runner trial = run;
    try {
      for (const auto& st : steps) trial.apply(st);
    } catch (const InvalidInput&) {
      return false;
    } catch (const NumericFailure&) {
      return false;
    }
    if (!accept(trial.p)) return false;
    run = std::move(trial);
    word.steps.insert(word.steps.end(), steps.begin(), steps.end());
    return true;
  }
  /// Smallest positive integer time t for which accept holds after flowing.
  template <typename Accept>
  void flow_until(const std::string& id, Accept accept, const char* what) {
    for (long t = 1; t <= 16; ++t)
      if (attempt({FlowStep{id, Complex(static_cast<double>(t)), GaussRat(t)}}, accept)) return;
    throw InternalError(std::string("planner: no integer time works for ") + what);
  }
};

void require_plannable(const Surface& S, const SurfacePoint& p, const SurfacePoint& q) {
  if (!S.smooth()) throw InvalidInput("surface is not smooth: " + S.smoothness_diagnostic());
  require_on_surface(S, p);
  require_on_surface(S, q);
}

/// Roots of a polynomial with complex coefficients (lowest degree first).
std::vector<Complex> complex_roots(std::vector<Complex> c) {
  while (!c.empty() && std::abs(c.back()) == 0.0) c.pop_back();
  if (c.size() < 2) return {};
  std::size_t n = c.size() - 1;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

using CPoly = std::vector<Complex>;
CPoly cmul(const CPoly& a, const CPoly& b) {
  CPoly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}
CPoly cadd(CPoly a, const CPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}
/// f(g(w)) for f given by coefficients.
CPoly ccompose(const std::vector<Complex>& f, const CPoly& g) {
  CPoly r{0.0};
  for (auto it = f.rbegin(); it != f.rend(); ++it) r = cadd(cmul(r, g), CPoly{*it});
  return r;
}

/// In the chart (a, b) with b fixed, the new value a' of a flow parameter with
/// h(a') = target, where h(a) = F(a G(a) / b) G(a) / b (F, G the polynomials
/// of the two sides). Picks the root closest to a.
struct Solved {
  Complex value;
  std::optional<GaussRat> exact;
};
Solved solve_level(const UniPoly& F, const UniPoly& G, const SurfacePoint& p, std::size_t ia, std::size_t ib,
                   std::size_t itarget, const SurfacePoint& target) {
  if (p.is_exact() && target.is_exact()) {
    GaussRat b = p.exact[ib], binv = b.inverse();
    MultiPoly w = MultiPoly::var(Var::u);
    MultiPoly Gw = G.to_multi(Var::u);
    MultiPoly h = F.to_multi(Var::x).substitute({{Var::x, w * Gw * binv}}) * Gw * binv -
                  MultiPoly(target.exact[itarget]);
    auto roots = exact_roots(UniPoly::from_multi(h, Var::u));
    if (!roots.empty()) {
      GaussRat a = p.exact[ia];
      auto best = *std::min_element(roots.begin(), roots.end(), [&](const GaussRat& r1, const GaussRat& r2) {
        return std::abs((r1 - a).to_complex()) < std::abs((r2 - a).to_complex());
      });
      return {best.to_complex(), best};
    }
  }
  Complex b = p.coords[ib];
  CPoly wG = cmul(CPoly{0.0, 1.0 / b}, G.complex_coeffs());
  CPoly h = cmul(ccompose(F.complex_coeffs(), wG), G.complex_coeffs());
  for (auto& c : h) c /= b;
  h = cadd(h, CPoly{-target.coords[itarget]});
  auto roots = complex_roots(h);
  if (roots.empty()) throw InternalError("planner: level equation has no roots");
  Complex a = p.coords[ia];
  Complex best = *std::min_element(roots.begin(), roots.end(),
                                   [&](Complex r1, Complex r2) { return std::abs(r1 - a) < std::abs(r2 - a); });
  return {best, std::nullopt};
}

FlowStep shift_to(const std::string& id, const Solved& target, const SurfacePoint& p, std::size_t ia, std::size_t ib) {
  // a + b^2 t = target
  if (target.exact && p.is_exact()) {
    GaussRat b = p.exact[ib];
    GaussRat t = (*target.exact - p.exact[ia]) / (b * b);
    return {id, t.to_complex(), t};
  }
  Complex b = p.coords[ib];
  return {id, (target.value - p.coords[ia]) / (b * b), std::nullopt};
}

/// Algebraic mode: LND flows of y^2 d/dx and v^2 d/du, with Theta conjugation
/// to leave the set y = v = 0.
void route_algebraic(Planner& pl, const SurfacePoint& ref) {
  if (in_lambda_set(pl.p(), 1e-9)) {
    bool done = false;
    for (long l = 1; l <= 12 && !done; ++l)
      for (bool sw : {false, true}) {
        for (const char* id : {"psi.v2_du", "phi.y2_dx"}) {
          for (long t = 1; t <= 3 && !done; ++t) {
            std::vector<WordStep> steps;
            if (sw) steps.emplace_back(SwapStep{});
            steps.emplace_back(IsoStep{GaussRat(l), true});
            steps.emplace_back(FlowStep{id, Complex(static_cast<double>(t)), GaussRat(t)});
            steps.emplace_back(IsoStep{GaussRat(l), false});
            if (sw) steps.emplace_back(SwapStep{});
            done = pl.attempt(steps, [](const SurfacePoint& q) { return !in_lambda_set(q, 1e-9); });
          }
          if (done) break;
        }
        if (done) break;
      }
    if (!done) throw InternalError("planner: no conjugated flow leaves y = v = 0");
  }
  if (zero(pl.p(), kY))
    pl.flow_until("psi.v2_du", [](const SurfacePoint& q) { return !zero(q, kY); }, "making y nonzero");
  if (zero(pl.p(), kV))
    pl.flow_until("phi.y2_dx", [](const SurfacePoint& q) { return !zero(q, kV); }, "making v nonzero");
  const Surface& S = pl.run.S;
  // v fixed: move u until y = y_ref.
  auto push_nonzero = [&](const FlowStep& f) {
    if (f.t_exact ? !f.t_exact->is_zero() : f.t != Complex(0)) pl.push(f);
  };
  Solved u1 = solve_level(S.P(), S.Q(), pl.p(), kU, kV, kY, ref);
  push_nonzero(shift_to("psi.v2_du", u1, pl.p(), kU, kV));
  // y fixed: move x to x_ref.
  Solved x1{ref.coords[kX], ref.is_exact() ? std::optional(ref.exact[kX]) : std::nullopt};
  push_nonzero(shift_to("phi.y2_dx", x1, pl.p(), kX, kY));
}

/// Flows mode on a surface with P(0) != 0.
void route_flows(Planner& pl, const SurfacePoint& ref) {
  auto nz_xu = [](const SurfacePoint& q) { return !zero(q, kX) && !zero(q, kU); };
  for (int iter = 0; iter < 6 && !nz_xu(pl.p()); ++iter) {
    bool x0 = zero(pl.p(), kX), u0 = zero(pl.p(), kU);
    if (!x0 && u0) {
      if (!zero(pl.p(), kY))
        pl.flow_until("phi.y2_dx", nz_xu, "case x != 0, u = 0");
      else
        pl.flow_until("phi.xy_dx", [](const SurfacePoint& q) { return !zero(q, kU); }, "case x != 0, u = y = 0");
    } else if (x0 && !u0) {
      if (!zero(pl.p(), kV))
        pl.flow_until("psi.v2_du", nz_xu, "case x = 0, u != 0");
      else
        pl.flow_until("psi.uv_du", [](const SurfacePoint& q) { return !zero(q, kX); }, "case x = 0, u != 0, v = 0");
    } else if (!zero(pl.p(), kY)) {
      pl.flow_until("phi.y2_dx", [](const SurfacePoint& q) { return !zero(q, kX); }, "case x = u = 0");
    } else if (!zero(pl.p(), kV)) {
      pl.flow_until("psi.v2_du", [](const SurfacePoint& q) { return !zero(q, kU); }, "case x = u = y = 0");
    } else {
      // The origin: y^2 d/dx is P(0)^2 Q'(0) d/dv there.
      pl.flow_until("phi.y2_dx", [](const SurfacePoint& q) { return !zero(q, kV); }, "the origin");
    }
  }
  if (!nz_xu(pl.p())) throw InternalError("planner: could not reach the chi chart");
  Complex x = pl.p().coords[kX], u = pl.p().coords[kU];
  pl.push(FlowStep{"chi.xu_dx", std::log(ref.coords[kX] / x) / u, std::nullopt});
  x = pl.p().coords[kX];
  u = pl.p().coords[kU];
  pl.push(FlowStep{"chi.xu_du", std::log(ref.coords[kU] / u) / x, std::nullopt});
}

}  // namespace

AutoWord plan_to_reference(const Surface& S, const SurfacePoint& p, PlanMode mode) {
  SurfacePoint ref = reference_point(S);
  require_plannable(S, p, ref);
  if (mode == PlanMode::algebraic) {
    Planner pl(S, p);
    route_algebraic(pl, ref);
    return pl.word;
  }
  if (!S.p0_zero()) {
    Planner pl(S, p);
    route_flows(pl, ref);
    return pl.word;
  }
  // Normalize P(0) != 0 through the symmetry.
  Surface W = swap_surface(S);
  Planner pl(W, swap_point(p));
  route_flows(pl, reference_point(W));
  AutoWord w;
  w.steps.emplace_back(SwapStep{});
  w.append(pl.word);
  w.steps.emplace_back(SwapStep{});
  return w;
}

AutoWord plan_transitivity(const Surface& S, const SurfacePoint& p, const SurfacePoint& q, PlanMode mode) {
  require_plannable(S, p, q);
  if (p.coords == q.coords) return {};
  AutoWord w = plan_to_reference(S, p, mode);
  w.append(plan_to_reference(S, q, mode).inverse());
  return w;
}

}  // namespace giz
