#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "giz/suites.hpp"

using namespace giz;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kFinding = 1, kInvalid = 2, kNumeric = 3 };

Json point_json(const SurfacePoint& p) {
  Json a = Json::array();
  for (std::size_t i = 0; i < 4; ++i) a.push_back(p.is_exact() ? p.exact[i].str() : complex_str(p.coords[i]));
  return a;
}

void emit(const Json& j, const std::string& out) {
  std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + out);
  f << text;
}

double rel_error(const SurfacePoint& a, const SurfacePoint& b) {
  double d = 0.0, s = 1.0;
  for (std::size_t i = 0; i < 4; ++i) {
    d = std::max(d, std::abs(a.coords[i] - b.coords[i]));
    s = std::max(s, std::abs(b.coords[i]));
  }
  return d / s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gizatullin surfaces: verification suites, certificates and automorphism words"};
  app.require_subcommand(1);

  RunConfig cfg;
  double tol = 1e-8;
  std::string out, from, to, mode = "algebraic", field, time = "1", point;
  int cert_range = 1;
  auto surface_opts = [&](CLI::App* c) {
    c->add_option("--P", cfg.P, "P(x)")->capture_default_str();
    c->add_option("--Q", cfg.Q, "Q(u)")->capture_default_str();
    c->add_option("--out", out, "output file (default stdout)");
  };

  auto* verify = app.add_subcommand("verify", "run verification suites and write a report-v1 JSON");
  surface_opts(verify);
  verify->add_option("--suite", cfg.suites, "charts, brackets, ideal, iso, lnd, all")->delimiter(',');
  verify->add_option("--range", cfg.range, "maximum of the identity parameters")->capture_default_str();
  verify->add_option("--seed", cfg.seed, "seed for randomized checks")->capture_default_str();
  verify->add_flag("--timings", cfg.timings, "include wall-clock timings (not reproducible)");

  auto* cert = app.add_subcommand("cert", "build the final generators and write their cert-v1 certificate");
  surface_opts(cert);
  cert->add_option("--range", cert_range, "parameters j,k,l,m range over 0..N")->capture_default_str();

  auto* move = app.add_subcommand("move", "plan and execute a word taking --from to --to");
  surface_opts(move);
  move->add_option("--from", from, "start point x,y,u,v")->required();
  move->add_option("--to", to, "end point x,y,u,v")->required();
  move->add_option("--mode", mode, "flows or algebraic")->capture_default_str()->check(CLI::IsMember({"flows", "algebraic"}));
  move->add_option("--tol", tol, "residual tolerance")->capture_default_str();

  auto* flow = app.add_subcommand("flow", "apply one catalog flow");
  surface_opts(flow);
  flow->add_option("--field", field, "catalog id, e.g. phi.y2_dx")->required();
  flow->add_option("--time", time, "complex time")->capture_default_str();
  flow->add_option("--point", point, "point x,y,u,v")->required();
  flow->add_option("--tol", tol, "residual tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*verify) {
      auto results = run_suites(cfg);
      Json rep = report_v1(cfg, results);
      emit(rep, out);
      return rep["pass"].get<bool>() ? kOk : kFinding;
    }
    Surface S = surface_from(cfg.P, cfg.Q);
    if (*cert) {
      CertRun r = run_cert(S, cert_range);
      r.cert["pass"] = r.pass;
      r.cert["findings"] = r.findings;
      emit(r.cert, out);
      return r.pass ? kOk : kFinding;
    }
    if (*move) {
      SurfacePoint p = parse_point(from), q = parse_point(to);
      PlanMode m = mode == "flows" ? PlanMode::flows : PlanMode::algebraic;
      AutoWord w = plan_transitivity(S, p, q, m);
      ExecuteOptions opt;
      opt.tol = tol;
      opt.numeric.tol = tol;
      auto res = execute_word(S, w, p, opt);
      double err = rel_error(res.flow.endpoint, q);
      Json j;
      j["word"] = word_json(w);
      j["endpoint"] = point_json(res.flow.endpoint);
      j["target"] = point_json(q);
      j["error"] = err;
      j["max_residual"] = res.flow.max_residual;
      emit(j, out);
      return err <= 1e-6 ? kOk : kFinding;
    }
    if (*flow) {
      SurfacePoint p = parse_point(point);
      require_on_surface(S, p);
      ParsedScalar t = parse_scalar(time);
      AutoWord w;
      w.steps.emplace_back(FlowStep{field, t.value, t.exact});
      ExecuteOptions opt;
      opt.tol = tol;
      opt.numeric.tol = tol;
      auto res = execute_word(S, w, p, opt);
      Json j;
      j["field"] = field;
      j["time"] = t.exact ? t.exact->str() : complex_str(t.value);
      j["method"] = closed_flow_applies(field, p) ? "closed" : "numeric";
      j["endpoint"] = point_json(res.flow.endpoint);
      j["max_residual"] = res.flow.max_residual;
      emit(j, out);
      return kOk;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "verification error: " << e.what() << "\n";
    return kFinding;
  }
  return kOk;
}
