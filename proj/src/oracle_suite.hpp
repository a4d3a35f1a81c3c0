#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace imcf {

struct OracleRow {
  std::string kind;  // ricci_hat, ricci_bar, scalar_hat, H_hat
  std::string scenario;
  std::string where;
  double analytic = 0.0;
  double oracle = 0.0;
  double rel_error = 0.0;
  bool pass = false;
};

struct OracleOptions {
  int curvature_samples = 100;
  int graph_states = 20;
  int graph_resolution = 512;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct OracleTable {
  std::vector<OracleRow> rows;
  double tolerance = 1e-4;
  bool pass() const;
  double worst(const std::string& kind_prefix) const;
};

// Random curvature samples against the finite-difference Ricci oracle, and random axisym
// graph states against the embedded shape-operator oracle.
OracleTable run_oracle_suite(const OracleOptions& options);

}  // namespace imcf
