#pragma once

// Built-in examples with closed-form solutions, and their end-to-end self-check.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "toric/grid.hpp"
#include "toric/polyhedral.hpp"
#include "toric/potential.hpp"
#include "toric/soliton.hpp"

namespace toric {

struct CatalogEntry {
  std::string name;
  std::string notes;
  std::vector<IntVec> rays;
  std::optional<Polyhedron> polyhedron;  // empty for the Futaki parameter sets
  std::optional<Potential> u;    // symplectic potential on P
  std::optional<Potential> phi;  // Kahler potential on R^n
  /// Known in closed form; empty when only the solver value is available.
  std::optional<Eigen::VectorXd> expected_b;
  std::vector<GridAxis> u_box;    // sampling box for the residual check
  std::vector<GridAxis> phi_box;  // sampling box for the complex-side check
  std::optional<FutakiParams> futaki;
};

const std::vector<CatalogEntry>& catalog();
/// Throws InvalidInput for unknown names.
const CatalogEntry& catalog_entry(const std::string& name);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct EntryReport {
  std::string name;
  std::optional<Eigen::VectorXd> b_P;
  std::vector<CheckResult> checks;
  bool passed = false;
};

/// Delzant -> b_P (with a seeded Monte Carlo confirmation when no closed form
/// exists) -> Futaki pairing -> residuals -> Ding invariance and first variation.
EntryReport run_entry(const CatalogEntry& entry, std::uint64_t seed = 1);

}  // namespace toric
