#pragma once

// The weight A, admissibility, the functionals D_1 and D, and the
// convexity / first-variation checks along linear paths of potentials.

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "toric/exp_integrals.hpp"
#include "toric/grid.hpp"
#include "toric/polyhedral.hpp"
#include "toric/potential.hpp"

namespace toric {

class WeightA {
 public:
  /// A(x) = <b, x>; the growth certificate is derived from P. Throws
  /// NonIntegrable when P is unbounded and b is outside int C*.
  static WeightA linear(const Polyhedron& p, const Eigen::VectorXd& b);
  /// Arbitrary A; the certificate is required when P is unbounded (NoTailBound).
  static WeightA general(const Polyhedron& p, ScalarField a, const std::optional<GrowthCertificate>& cert,
                         const QuadratureOptions& quadrature = {});

  const Polyhedron& polyhedron() const { return *p_; }
  std::size_t dim() const { return p_->dim(); }
  double operator()(const Eigen::VectorXd& x) const { return a_(x); }
  const ScalarField& field() const { return a_; }
  const std::optional<GrowthCertificate>& certificate() const { return cert_; }
  /// Set for linear weights.
  const std::optional<Eigen::VectorXd>& linear_coefficient() const { return b_; }
  /// V_A = int_P e^{-A}.
  double volume() const { return volume_; }

 private:
  WeightA() = default;
  std::shared_ptr<const Polyhedron> p_;
  ScalarField a_;
  std::optional<GrowthCertificate> cert_;
  std::optional<Eigen::VectorXd> b_;
  double volume_ = 0.0;
};

struct AdmissibilityReport {
  double volume = 0.0;
  Eigen::VectorXd first_moments;  // int x_i e^{-A}
  double up_integral = 0.0;       // int u_P e^{-A}
  bool finite_volume = false;
  bool balanced = false;          // |int x_i e^{-A}| <= tol V_A
  bool up_integrable = false;
  bool admissible = false;
};

/// Throws NoTailBound and NonIntegrable; NotDelzant from u_P.
AdmissibilityReport check_admissible(const WeightA& a, double tol = 1e-6);

struct DingOptions {
  double truncation_tol = 1e-10;
  QuadratureOptions quadrature{1e-9};
  /// Integrate over this region instead of P truncated by the tail bounds
  /// (grid potentials are only defined on their box).
  std::optional<Polyhedron> region;
};

/// One frozen quadrature rule on the truncated domain, adapted to e^{-A} and
/// to u e^{-A}, e^{-rho_u} for the given potentials; every functional below is
/// evaluated on it so that comparisons between nearby potentials are smooth.
class DingEvaluator {
 public:
  /// With rho_terms false only u e^{-A} is adapted (enough for normalize).
  DingEvaluator(const WeightA& a, const std::vector<Potential>& adapt_to, const DingOptions& opts = {},
                bool rho_terms = true);

  const WeightA& weight() const { return a_; }
  /// int e^{-A} on the rule (consistent with the other integrals).
  double volume() const { return volume_; }
  double potential_integral(const Potential& u) const;  // int u e^{-A}
  double weight_integral(const ScalarField& w) const;   // int w e^{-A}
  double ding1(const Potential& u) const;               // int e^{-rho_u}
  double ding(const Potential& u) const;
  /// Same integrals with the lower-order rule; |high - low| estimates noise.
  double ding1_low(const Potential& u) const;
  double ding_low(const Potential& u) const;
  double potential_integral_low(const Potential& u) const;
  double volume_low() const { return volume_low_; }
  /// Constant c with int (u + c) e^{-A} = 0.
  double normalization_constant(const Potential& u) const;

  double radius() const { return radius_; }
  double tail() const { return tail_; }
  std::size_t cells() const { return mesh_->num_cells(); }
  /// Interior points of the integration region on a regular lattice, for fits.
  std::vector<Eigen::VectorXd> sample_points(std::size_t per_axis = 21) const;

 private:
  WeightA a_;
  std::shared_ptr<QuadratureMesh> mesh_;
  Polyhedron region_;
  double volume_ = 0.0;
  double volume_low_ = 0.0;
  double radius_ = 0.0;
  double tail_ = 0.0;
};

/// Linear growth rho >= c1 |x| - c2 fitted along the recession rays of P
/// (with a safety factor); throws NonIntegrablePotential when rho does not grow.
GrowthCertificate fit_linear_growth(const Polyhedron& p, const ScalarField& rho);

double ding1(const Potential& u, const WeightA& a, const DingOptions& opts = {});
double ding(const Potential& u, const WeightA& a, const DingOptions& opts = {});
Potential normalize(const Potential& u, const WeightA& a, const DingOptions& opts = {});

/// P intersected with the box of the grid.
Polyhedron grid_region(const Polyhedron& p, const PotentialGrid& g);
/// Grid versions integrate P clipped to the grid box, with u - u_P differenced.
double ding1(const PotentialGrid& u, const WeightA& a, const DingOptions& opts = {});
double ding(const PotentialGrid& u, const WeightA& a, const DingOptions& opts = {});
PotentialGrid normalize(const PotentialGrid& u, const WeightA& a, const DingOptions& opts = {});

struct AffineFit {
  Eigen::VectorXd slope;
  double constant = 0.0;
  double residual = 0.0;  // sup over the sample points
};

struct GeodesicScanReport {
  std::vector<double> t;
  std::vector<double> d_values;
  std::vector<double> ding1_values;
  std::vector<double> second_differences;     // of D, at interior nodes
  std::vector<double> logconcavity_values;    // second differences of log D_1
  std::vector<double> noise;                  // error estimate of each second difference
  double min_second_difference = 0.0;
  double max_logconcavity = 0.0;
  bool convex = false;
  bool log_concave = false;
  bool equality_flag = false;
  AffineFit affine_fit;
};

/// D along (1-t) u0 + t u1 at m >= 9 Chebyshev-Lobatto times. Throws
/// PathLeavesCone when some u_t is not convex.
GeodesicScanReport geodesic_convexity_scan(const Potential& u0, const Potential& u1, const WeightA& a,
                                           std::size_t samples = 9, double tol = 1e-6,
                                           const DingOptions& opts = {});
GeodesicScanReport geodesic_convexity_scan(const PotentialGrid& u0, const PotentialGrid& u1, const WeightA& a,
                                           std::size_t samples = 9, double tol = 1e-6,
                                           const DingOptions& opts = {});

struct FirstVariationReport {
  double fd_ding1 = 0.0;      // (D_1(u + h w) - D_1(u - h w)) / 2h
  double predicted = 0.0;     // 2 int w e^{-A}
  double relative_error = 0.0;
  double fd_ding = 0.0;       // (D(u + h w) - D(u - h w)) / 2h
  double h = 0.0;
};

/// Throws ConvexityLost when u +- h w is not convex on the rule. The
/// difference quotient divides quadrature error by h, hence the finer rule.
FirstVariationReport first_variation_check(const Potential& u, const WeightA& a, const Potential& w, double h = 1e-3,
                                           const DingOptions& opts = {.quadrature = QuadratureOptions{1e-12}});

/// -(phi_{t+h} - phi_{t-h}) / 2h at xi = grad u_t(x), phi_s the pointwise
/// conjugate of (1-s) u0 + s u1; equals (u1 - u0)(x) up to O(h^2).
double geodesic_time_derivative(const Potential& u0, const Potential& u1, double t, const Eigen::VectorXd& x,
                                double h = 1e-4);

/// int e^{-2 phi} over the grid box (trapezoid rule on present samples).
double conjugate_side_ding1(const PotentialGrid& phi);

}  // namespace toric
