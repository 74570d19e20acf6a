#pragma once

// Integrals of e^{-<b,x>} (and its first two moments) over pointed
// polyhedra, plus adaptive quadrature of general weights g e^{-A} over
// possibly unbounded P with a certified tail.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "toric/polyhedral.hpp"

namespace toric {

enum class IntegralMethod { Brion, Triangulated, Quadrature };
std::string_view to_string(IntegralMethod m);

struct ExpMoments {
  double value = 0.0;
  Eigen::VectorXd first;   // int x e^{-<b,x>}
  Eigen::MatrixXd second;  // int x x^T e^{-<b,x>}
  IntegralMethod method = IntegralMethod::Brion;
};

/// Divided difference of t -> e^{-t} on the given nodes (repeats allowed).
double exp_divided_difference(std::span<const double> nodes);

/// Geometry of P (vertices, edge cones, triangulation) computed once and
/// reused for many exponents b.
class ExpIntegrator {
 public:
  explicit ExpIntegrator(const Polyhedron& p);

  const Polyhedron& polyhedron() const { return p_; }
  std::size_t dim() const { return p_.dim(); }
  /// Primitive generators of the recession cone, as doubles.
  const std::vector<Eigen::VectorXd>& recession_rays() const { return rays_; }
  bool bounded() const { return rays_.empty(); }

  /// b in the interior of the dual recession cone.
  bool in_domain(const Eigen::VectorXd& b) const;

  double integrate(const Eigen::VectorXd& b) const { return moments(b, 0).value; }
  /// order 0, 1 or 2; higher-order fields are left empty. Picks Brion and
  /// falls back to the triangulated formula near degenerate exponents.
  ExpMoments moments(const Eigen::VectorXd& b, int order = 2) const;

  /// Vertex-cone sum; nullopt when a vertex is non-simple or b is within
  /// the degeneracy threshold of an edge hyperplane.
  std::optional<ExpMoments> brion(const Eigen::VectorXd& b, int order = 2) const;
  ExpMoments triangulated(const Eigen::VectorXd& b, int order = 2) const;

 private:
  struct VertexCone {
    Eigen::VectorXd point;
    Eigen::MatrixXd edges;  // columns
    double abs_det = 0.0;
    bool simple = false;
  };
  struct Cell {
    Eigen::MatrixXd points;  // columns
    Eigen::MatrixXd rays;    // columns
    double volume_factor = 0.0;
  };

  void check_domain(const Eigen::VectorXd& b) const;

  Polyhedron p_;
  std::vector<Eigen::VectorXd> rays_;
  std::vector<VertexCone> cones_;
  std::vector<Cell> cells_;
  bool all_simple_ = true;
};

double integrate_exp(const Polyhedron& p, const Eigen::VectorXd& b, IntegralMethod* method = nullptr);
ExpMoments integrate_exp_moments(const Polyhedron& p, const Eigen::VectorXd& b);

// ---------------------------------------------------------------- quadrature

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// A(x) >= c1 |x| - c2 on P.
struct GrowthCertificate {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// |g(x)| <= constant * (1 + |x|)^degree on P.
struct PolynomialBound {
  double constant = 1.0;
  int degree = 0;
};

/// Certificate for A(x) = <b,x> on P, valid when b is in the interior of C*.
GrowthCertificate linear_growth_certificate(const Polyhedron& p, const Eigen::VectorXd& b);

/// Upper bound on the integral of |g| e^{-A} over P minus the ball of radius r.
double tail_bound(std::size_t dim, const GrowthCertificate& cert, const PolynomialBound& g, double r);

/// Smallest radius in the doubling sequence 1, 2, 4, ... with tail_bound <= tol.
double truncation_radius(std::size_t dim, const GrowthCertificate& cert, const PolynomialBound& g, double tol);

struct QuadratureOptions {
  double tol = 1e-10;             // absolute target for the summed error estimate
  std::size_t max_cells = 20000;
  int points_per_axis = 8;        // Gauss-Legendre order of the collapsed rule
  double max_initial_edge = std::numeric_limits<double>::infinity();
};

/// Simplicial mesh of a bounded polytope refined adaptively for a set of
/// integrands, then frozen so that repeated integrations share one rule.
class QuadratureMesh {
 public:
  QuadratureMesh(const Polyhedron& bounded, const QuadratureOptions& opts = {});

  /// Bisects cells until every integrand meets the tolerance.
  void adapt(const std::vector<ScalarField>& integrands);

  double integrate(const ScalarField& f) const;
  /// Same mesh, lower-order rule; the difference estimates quadrature error.
  double integrate_low(const ScalarField& f) const;
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t dim() const { return dim_; }

 private:
  struct Simplex {
    Eigen::MatrixXd v;  // columns are vertices
    double volume;
  };
  double cell_integral(const Simplex& s, const ScalarField& f, bool low) const;

  std::size_t dim_;
  QuadratureOptions opts_;
  std::vector<Simplex> cells_;
  // Reference rule on the unit simplex: barycentric weights and points.
  Eigen::MatrixXd ref_points_, ref_points_low_;
  Eigen::VectorXd ref_weights_, ref_weights_low_;
};

struct WeightedResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double radius = 0.0;      // truncation radius, 0 when P is bounded
  double tail_bound = 0.0;
  std::size_t cells = 0;
};

struct WeightedOptions {
  double truncation_tol = 1e-10;
  QuadratureOptions quadrature{};
};

/// Region P clipped to [-R,R]^n by adaptive quadrature, plus the certified tail.
/// Throws NoTailBound for unbounded P without a certificate and NonIntegrable
/// when c1 <= 0.
WeightedResult integrate_weighted(const Polyhedron& p, const ScalarField& a, const ScalarField& g,
                                  const std::optional<GrowthCertificate>& cert, const PolynomialBound& g_bound = {},
                                  const WeightedOptions& opts = {});

/// Truncated, frozen quadrature domain for repeated weighted integrals.
struct TruncatedDomain {
  Polyhedron region;  // P, or P clipped to the box
  double radius = 0.0;
  double tail = 0.0;
};
TruncatedDomain truncate_domain(const Polyhedron& p, const std::optional<GrowthCertificate>& cert,
                                const PolynomialBound& g_bound, double truncation_tol);

/// Seeded Monte Carlo estimate of int x e^{-<b,x>} over P using exponential
/// importance sampling on a simplicial cone containing P; returns mean and
/// standard error per component.
struct MonteCarloMoment {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;
  std::size_t samples = 0;
};
MonteCarloMoment monte_carlo_first_moment(const Polyhedron& p, const Eigen::VectorXd& b, std::size_t samples,
                                          std::uint64_t seed);

}  // namespace toric
