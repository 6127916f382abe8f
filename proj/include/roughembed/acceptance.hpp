#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace roughembed {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Reduced resolutions and trial counts; runtime limits still apply.
  bool quick = false;
  std::uint64_t seed = 7;
};

CriterionResult criterion_inequality_suites(const AcceptanceOptions& options);
CriterionResult criterion_exact_constants(const AcceptanceOptions& options);
CriterionResult criterion_spiral_map(const AcceptanceOptions& options);
CriterionResult criterion_dilatation(const AcceptanceOptions& options);
CriterionResult criterion_classical_spectra(const AcceptanceOptions& options);
CriterionResult criterion_mesh_independence(const AcceptanceOptions& options);
CriterionResult criterion_condition2(const AcceptanceOptions& options);
CriterionResult criterion_c_epsilon(const AcceptanceOptions& options);
CriterionResult criterion_topology(const AcceptanceOptions& options);

/// Runs the selected criteria (1..9; empty = all) in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const std::vector<int>& which = {});

/// "[PASS] 3 spiral map (1.2 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace roughembed
