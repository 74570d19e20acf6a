#pragma once

// Discrete Legendre-Fenchel transforms on uniform grids.

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "toric/grid.hpp"

namespace toric {

/// Per-axis target slopes: count-1 nodes spanning the slope range that every
/// grid line along that axis attains (so a quadratic round-trips exactly).
std::vector<GridAxis> default_targets(const PotentialGrid& f);

/// sup_xi <s, xi> - f(xi) over the present samples, evaluated on the target
/// axes one dimension at a time. Targets whose maximizer sits on the edge of
/// the sampled region are marked unreliable. Throws NotConvex when the input
/// defect exceeds convexity_tol.
PotentialGrid legendre(const PotentialGrid& f, const std::optional<std::vector<GridAxis>>& targets = std::nullopt,
                       double convexity_tol = 1e-8);

struct InvolutionReport {
  double error = 0.0;        // sup |L(L(f)) - f| over reliable samples
  std::size_t samples = 0;   // samples entering the sup
  bool degenerate = false;   // affine input: the conjugate collapses to a point
};

/// Round trip through `targets` (default_targets when absent) and back to f's axes.
InvolutionReport involution_error(const PotentialGrid& f,
                                  const std::optional<std::vector<GridAxis>>& targets = std::nullopt);

struct AffineAction {
  enum class Mode { Glnz, DomainShift, SlopeShift };
  Mode mode = Mode::DomainShift;
  IntMatrix matrix;       // Glnz
  Eigen::VectorXd shift;  // DomainShift: b1, SlopeShift: b2

  static AffineAction glnz(IntMatrix b) { return {Mode::Glnz, std::move(b), {}}; }
  static AffineAction domain_shift(Eigen::VectorXd b1) { return {Mode::DomainShift, {}, std::move(b1)}; }
  static AffineAction slope_shift(Eigen::VectorXd b2) { return {Mode::SlopeShift, {}, std::move(b2)}; }
};

/// phi(B xi) (resampled on the same axes), phi(xi - b1) (axes shifted), or
/// phi(xi) + <b2, xi>. Throws NotUnimodular for |det B| != 1.
PotentialGrid affine_action(const PotentialGrid& f, const AffineAction& action);

struct PropernessBound {
  double slope = 0.0;     // epsilon
  double offset = 0.0;    // sup of the conjugate over the epsilon-sphere
  bool verified = false;  // f >= slope |xi| - offset on every sample
};

/// Requires the closed epsilon-ball to lie inside the slope range of f;
/// otherwise throws ZeroNotInterior.
PropernessBound properness_bound(const PotentialGrid& f, double eps);

}  // namespace toric
