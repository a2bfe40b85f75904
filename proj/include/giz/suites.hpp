#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "giz/autoflow.hpp"
#include "giz/liecert.hpp"

namespace giz {

struct RunConfig {
  std::string P = "x - 1";
  std::string Q = "u - 1";
  std::vector<std::string> suites;  // "all" expands to every suite
  int range = 2;                    // maxima for j, k, l (and m)
  unsigned seed = 0;
  int threads = 0;                  // 0: GIZ_THREADS or hardware concurrency
  bool timings = false;             // timings make reports run-dependent
};

struct SuiteResult {
  std::string name;
  bool pass = true;
  int checks = 0;
  std::vector<std::string> findings;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  double millis = 0.0;
};

/// charts, brackets, ideal, iso, lnd.
const std::vector<std::string>& suite_names();

/// Parses P (in x) and Q (in u); InvalidInput on grammar or variable errors.
Surface surface_from(const std::string& P, const std::string& Q);

SuiteResult run_suite(const std::string& name, const Surface& S, const RunConfig& cfg);

/// Runs the selected suites in a worker pool; results sorted by suite name.
std::vector<SuiteResult> run_suites(const RunConfig& cfg);

nlohmann::ordered_json report_v1(const RunConfig& cfg, const std::vector<SuiteResult>& results);

struct CertRun {
  nlohmann::ordered_json cert;
  std::vector<std::string> findings;
  bool pass = true;
};

/// The final generators for (j,k,l,m) in {0..range}^4 with their certificate.
CertRun run_cert(const Surface& S, int range);

int worker_count(int requested);

}  // namespace giz
