#include "giz/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

namespace giz {

namespace {

using Json = nlohmann::ordered_json;

void check(SuiteResult& r, bool ok, const std::string& what) {
  ++r.checks;
  if (!ok) {
    r.pass = false;
    r.findings.push_back("FAILED " + what);
  }
}

std::string params_str(const std::map<std::string, long>& p) {
  std::string s;
  for (const auto& [k, v] : p) s += (s.empty() ? "" : ",") + k + "=" + std::to_string(v);
  return s;
}

GaussRat small_rational(std::mt19937& rng, bool nonzero) {
  std::uniform_int_distribution<long> num(-5, 5), den(1, 4);
  for (;;) {
    GaussRat g = GaussRat::frac(num(rng), den(rng));
    if (!nonzero || !g.is_zero()) return g;
  }
}

MultiPoly small_poly(std::mt19937& rng) {
  std::uniform_int_distribution<int> e(0, 2), c(-3, 3);
  MultiPoly p;
  for (int t = 0; t < 3; ++t) {
    Monomial m;
    for (Var v : kAmbientVars) m[v] = static_cast<std::uint32_t>(e(rng));
    p += MultiPoly(GaussRat(c(rng)), m);
  }
  return p;
}

// ---------------------------------------------------------------------------

void suite_charts(SuiteResult& r, const Surface& S, const RunConfig& cfg) {
  std::vector<CatalogEntry> cat;
  try {
    cat = catalog(S);
  } catch (const InternalError& e) {
    check(r, false, std::string("catalog: ") + e.what());
    return;
  }
  Json fields = Json::array();
  for (const auto& e : cat) {
    bool ok = e.derivation.verify(S);
    check(r, ok, e.id + " tangency witnesses");
    fields.push_back({{"id", e.id}, {"reason", reason_name(e.reason)}, {"tangent", ok}});
  }
  r.details["fields"] = fields;

  std::mt19937 rng(cfg.seed);
  for (ChartTag t : {ChartTag::phi, ChartTag::psi, ChartTag::chi}) {
    for (int i = 0; i < 5; ++i) {
      GaussRat a = small_rational(rng, t == ChartTag::chi), b = small_rational(rng, true);
      SurfacePoint p = chart_embed(S, t, a, b);
      check(r, on_surface_exact(S, p), std::string(chart_name(t)) + " image of (" + a.str() + ", " + b.str() + ")");
    }
  }

  if (S.p0_zero()) {
    Derivation shown = certify(S, lnd_display_field(S), "displayed LND form");
    check(r, equal_mod(S, shown, catalog_entry(S, "phi.y_dx_lnd").derivation), "displayed LND form (P(0) = 0)");
  }
  if (S.q0_zero()) {
    Surface W = swap_surface(S);
    Derivation shown = certify(W, lnd_display_field(W), "displayed LND form");
    check(r, equal_mod(W, shown, catalog_entry(W, "phi.y_dx_lnd").derivation), "mirrored displayed LND form (Q(0) = 0)");
  }
}

void suite_ideal(SuiteResult& r, const Surface& S, const RunConfig& cfg) {
  const GroebnerBasis& gb = S.ideal().basis();
  check(r, gb.verify(), "Buchberger criterion on the basis");
  r.details["basis"] = Json::array();
  for (const auto& g : gb.generators()) r.details["basis"].push_back(g.str());
  for (std::size_t i = 0; i < 3; ++i)
    check(r, S.reduce(S.generators()[i]).is_zero(), "generator " + std::to_string(i + 1) + " reduces to 0");

  std::mt19937 rng(cfg.seed);
  for (int t = 0; t < 10; ++t) {
    MultiPoly f;
    for (const auto& g : S.generators()) f += small_poly(rng) * g;
    NFResult nf = S.ideal().normal_form(f);
    MultiPoly back;
    auto cof = source_cofactors(nf, gb);
    for (std::size_t j = 0; j < cof.size(); ++j) back += cof[j] * gb.source()[j];
    check(r, nf.remainder.is_zero() && back == f, "membership certificate for combination " + std::to_string(t));
  }
  MultiPoly outside = MultiPoly::var(Var::x) + small_rational(rng, true);
  check(r, !S.ideal().contains(outside), "x + c is not in the ideal");
}

void suite_brackets(SuiteResult& r, const Surface& S, const RunConfig& cfg) {
  const long n = std::max(0, cfg.range);
  std::vector<std::pair<std::string, std::map<std::string, long>>> jobs;
  for (long k = 0; k <= std::max(3L, n); ++k) jobs.push_back({"D1", {{"k", k}}});
  for (const char* id : {"D2", "D3"})
    for (long j = 0; j <= n; ++j)
      for (long k = 0; k <= n; ++k) jobs.push_back({id, {{"j", j}, {"k", k}}});
  for (const char* id : {"E1", "E2"})
    for (long j = std::string(id) == "E2" ? 1 : 0; j <= n; ++j)
      for (long k = 0; k <= n; ++k)
        for (long l = 0; l <= n; ++l) jobs.push_back({id, {{"j", j}, {"k", k}, {"l", l}}});

  std::optional<BuiltSpan> span;
  std::map<std::string, int> tally;
  Json items = Json::array();
  for (const auto& [id, params] : jobs) {
    IdentityReport rep = verify_identity(S, id, params);
    if (rep.verdict == VerdictKind::mismatch) {
      if (!span) span = build_span(S, {});
      absorb(span->span, rep);
    }
    std::string tag = id + "{" + params_str(params) + "}";
    check(r, rep.oracle_agrees, tag + " chart oracle");
    check(r, rep.acceptable(), tag + " verdict " + rep.verdict_str());
    std::string v = rep.verdict_str();
    if (rep.absorbed) v += *rep.absorbed ? "+absorbed" : "+not-absorbed";
    ++tally[id + ":" + v];
    if (rep.verdict != VerdictKind::exact) {
      items.push_back(report_json(rep));
      r.findings.push_back(tag + ": " + v + "; difference " + rep.difference.str());
    }
  }
  r.details["verdicts"] = Json::object();
  for (const auto& [k, c] : tally) r.details["verdicts"][k] = c;
  r.details["non_exact"] = items;
  if (span) {
    r.details["span_rank"] = span->span.rank();
    for (const auto& f : span->findings) r.findings.push_back("span: " + f);
  }
}

void suite_iso(SuiteResult& r, const Surface& S, const RunConfig& cfg) {
  auto rep = verify_theta(S, std::nullopt, cfg.seed, 100);
  check(r, rep.pullback_exact, "pullback of the target generators (symbolic lambda)");
  check(r, rep.inverse_exact, "Theta_{-lambda} after Theta_lambda is the identity");
  if (rep.v1_checked) check(r, rep.v1_formula, "v1 formula at (0,0,u0,0)");
  check(r, rep.max_scaled_residual <= 1e-10, "numeric image residuals");
  auto [m, T] = theta(S, GaussRat(0));
  bool ident = T == S;
  for (std::size_t i = 0; i < 4; ++i) ident = ident && m[i] == MultiPoly::var(kCoordVars[i]);
  check(r, ident, "lambda = 0 gives the identity");
  for (const auto& f : rep.findings) r.findings.push_back(f);
  r.details = {{"pullback_exact", rep.pullback_exact},
               {"inverse_exact", rep.inverse_exact},
               {"v1_checked", rep.v1_checked},
               {"v1_formula", rep.v1_formula},
               {"v1_discrepancy", v1_discrepancy(S).str()},
               {"numeric_points", rep.numeric_points},
               {"max_residual", rep.max_numeric_residual},
               {"max_scaled_residual", rep.max_scaled_residual}};
}

void suite_lnd(SuiteResult& r, const Surface& S, const RunConfig&) {
  int cap = default_lnd_cap(S);
  Json out = Json::object();
  for (const auto& e : catalog(S)) {
    LndResult l = locally_nilpotent(S, e.derivation, cap);
    bool shear = e.id.find("2_d") != std::string::npos || e.reason == CompleteReason::lnd;
    // Shears and the displayed LND fields are nilpotent; the scalings never are.
    LndVerdict want = shear ? LndVerdict::yes : LndVerdict::no;
    check(r, l.verdict == want, e.id + " is " + std::string(verdict_name(l.verdict)));
    out[e.id] = {{"verdict", verdict_name(l.verdict)}, {"steps", l.steps}, {"detail", l.detail}};
  }
  r.details["fields"] = out;
  r.details["cap"] = cap;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"brackets", "charts", "ideal", "iso", "lnd"};
  return names;
}

Surface surface_from(const std::string& P, const std::string& Q) {
  UniPoly p = parse_unipoly(P, Var::x), q = parse_unipoly(Q, Var::u);
  return Surface::make(p, q);
}

SuiteResult run_suite(const std::string& name, const Surface& S, const RunConfig& cfg) {
  SuiteResult r;
  r.name = name;
  auto t0 = std::chrono::steady_clock::now();
  if (name == "charts") suite_charts(r, S, cfg);
  else if (name == "ideal") suite_ideal(r, S, cfg);
  else if (name == "brackets") suite_brackets(r, S, cfg);
  else if (name == "iso") suite_iso(r, S, cfg);
  else if (name == "lnd") suite_lnd(r, S, cfg);
  else throw InvalidInput("unknown suite '" + name + "'");
  r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GIZ_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SuiteResult> run_suites(const RunConfig& cfg) {
  std::vector<std::string> names;
  for (const auto& s : cfg.suites) {
    if (s == "all") names.insert(names.end(), suite_names().begin(), suite_names().end());
    else if (std::find(suite_names().begin(), suite_names().end(), s) != suite_names().end()) names.push_back(s);
    else throw InvalidInput("unknown suite '" + s + "'");
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  Surface S = surface_from(cfg.P, cfg.Q);

  std::vector<SuiteResult> out(names.size());
  std::vector<std::exception_ptr> errors(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < names.size();) {
      try {
        out[i] = run_suite(names[i], S, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t n = std::min<std::size_t>(names.size(), static_cast<std::size_t>(worker_count(cfg.threads)));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Json report_v1(const RunConfig& cfg, const std::vector<SuiteResult>& results) {
  Json j;
  j["schema"] = "report-v1";
  Surface S = surface_from(cfg.P, cfg.Q);
  j["surface"] = {{"P", S.P().str()}, {"Q", S.Q().str()}, {"smooth", S.smooth()}};
  j["config"] = {{"range", cfg.range}, {"seed", cfg.seed}};
  bool pass = true;
  Json suites = Json::object();
  for (const auto& r : results) {
    pass = pass && r.pass;
    Json s;
    s["pass"] = r.pass;
    s["checks"] = r.checks;
    s["findings"] = r.findings;
    s["details"] = r.details;
    if (cfg.timings) s["timing_ms"] = r.millis;
    suites[r.name] = s;
  }
  j["suites"] = suites;
  j["pass"] = pass;
  return j;
}

CertRun run_cert(const Surface& S, int range) {
  CertRun out;
  int n = std::max(0, range);
  BuiltSpan b = build_span(S, {n, n, n, n});
  for (const auto& f : b.findings) out.findings.push_back("span: " + f);
  std::vector<std::size_t> roots;
  Json gens = Json::array();
  for (int j = 0; j <= n; ++j)
    for (int k = 0; k <= n; ++k)
      for (int l = 0; l <= n; ++l)
        for (int m = 0; m <= n; ++m) {
          FinalResult f = final_generator(b, j, k, l, m);
          bool ok = f.factored && !f.T.is_zero() && f.root_matches;
          if (!ok) {
            out.pass = false;
            out.findings.push_back("final generator (" + std::to_string(j) + "," + std::to_string(k) + "," +
                                   std::to_string(l) + "," + std::to_string(m) + "): " + f.detail);
          }
          if (f.factored) roots.push_back(f.root);
          gens.push_back({{"params", {j, k, l, m}},
                          {"T", f.T.str()},
                          {"root_matches", f.root_matches},
                          {"first_operand_y_exp", f.first_operand_y_exp},
                          {"lambda_exponents", {f.lambda.x_exp, f.lambda.u_exp, f.lambda.v_exp}}});
        }
  if (auto bad = b.span.graph().verify()) {
    out.pass = false;
    out.findings.push_back("certificate node " + std::to_string(*bad) + " fails re-verification");
  }
  out.cert = cert_json(b.span.graph(), roots);
  out.cert["generators"] = gens;
  return out;
}

}  // namespace giz
