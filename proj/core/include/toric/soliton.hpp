#pragma once

// Monge-Ampere operators on both sides of the Legendre transform, soliton
// residuals, boundary normalization fits and the Futaki profile.

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "toric/grid.hpp"
#include "toric/polyhedral.hpp"
#include "toric/potential.hpp"

namespace toric {

struct MetricSample {
  Eigen::VectorXd x;
  Eigen::MatrixXd hessian_u;
  Eigen::MatrixXd inverse;
};

/// Hessian of u at x and its inverse; throws HessianNotSPD.
MetricSample metric_sample(const Potential& u, const Eigen::VectorXd& x);

/// 2(<grad u, x> - u) - log det Hess u at one point.
double rho_at(const Potential& u, const Eigen::VectorXd& x);

struct RhoOptions {
  std::size_t band_cells = 3;
  /// When set, u - u_ref is differenced and the facet-log potential of this
  /// polyhedron contributes exact derivatives.
  std::optional<Polyhedron> singular_reference;
};

struct ResidualField {
  PotentialGrid rho;       // NaN off the evaluated interior
  PotentialGrid residual;  // rho - <b, x>
  double sup_norm = 0.0;
  std::size_t interior_cells = 0;
  std::size_t excluded_band = 0;  // present samples dropped by the band
};

/// Centered differences on the grid; samples within band_cells of an absent
/// sample or the box edge are skipped. Throws HessianNotSPD.
ResidualField rho(const PotentialGrid& u, const Eigen::VectorXd& b, const RhoOptions& opts = {});
inline ResidualField rho(const PotentialGrid& u, const RhoOptions& opts = {}) {
  return rho(u, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(u.dim())), opts);
}

/// sup |rho_u - <b, x>| over the evaluated interior.
double soliton_residual(const PotentialGrid& u, const Eigen::VectorXd& b, const RhoOptions& opts = {});

/// First-order prediction of the difference-stencil error in rho for an
/// analytic u, taken over the samples `field` evaluated (plain path only).
double residual_truncation_model(const Potential& u, const ResidualField& field);

/// sup |det phi_ij - E| / max(det phi_ij, E) with E = exp(-2 phi + <b, grad phi>).
double complex_side_residual(const PotentialGrid& phi, const Eigen::VectorXd& b, std::size_t band_cells = 1);

/// Least-squares affine a(xi) with phi - a solving the complex-side equation.
struct AffineNormalization {
  Eigen::VectorXd slope;
  double constant = 0.0;
  double residual_before = 0.0;
  double residual_after = 0.0;
};
AffineNormalization affine_normalize(const PotentialGrid& phi, const Eigen::VectorXd& b, std::size_t band_cells = 1);

struct FacetNormalization {
  std::size_t facet = 0;
  double log_coefficient = 0.0;  // c in rho ~ c log(l_i + a_i) + smooth
  double expected = 0.0;         // 1 - a_i
  double smooth_proxy = 0.0;     // sup of |second differences of u - u_P| / h^2 in the band
  std::size_t samples = 0;
};

/// Fits rho_u against log(l_i + a_i) at facet distances in
/// [band_lo, band_hi] cells. Throws InsufficientMeshResolution.
std::vector<FacetNormalization> boundary_normalization_check(const PotentialGrid& u, const Polyhedron& p,
                                                             double band_lo = 3.0, double band_hi = 30.0);

struct SolutionComparison {
  Eigen::VectorXd slope;
  double constant = 0.0;
  double residual = 0.0;  // sup |u1 - u0 - a|
  std::size_t samples = 0;
};

/// Least-squares affine fit of u1 - u0 on the common present samples.
SolutionComparison compare_solutions(const PotentialGrid& u0, const PotentialGrid& u1);

struct FutakiParams {
  int n = 2;
  double kappa = 3.0;
  double mu = 1.0;
};

/// k-th tau-derivative (k <= 2) of the rational profile phi(tau).
double futaki_phi(const FutakiParams& p, double tau, int derivative = 0);

/// mu > 0 with phi(0) = 0 at fixed n and kappa; throws InvalidParams when no
/// sign change is found.
double solve_futaki_mu(int n, double kappa);

struct FutakiProfile {
  FutakiParams params;
  double phi0 = 0.0;
  double leading_coefficient = 0.0;  // (kappa - 2) / mu
  std::array<double, 3> orders{};    // log-log slopes of phi, phi', phi''
  double ricci_ratio_order = 0.0;
  double min_phi = 0.0;
  std::vector<double> tau, phi, dphi, ddphi, ricci_t, ricci_tt, ratio;
};

/// Samples on [0, tau_max] (log spaced past 1); slopes are fitted between
/// tau_max / 10 and tau_max. Throws InvalidParams.
FutakiProfile futaki_profile(const FutakiParams& p, double tau_max = 1e4, std::size_t samples = 200);

}  // namespace toric
