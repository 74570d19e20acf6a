#pragma once

// Pointwise convex functions with (optionally analytic) derivatives. Grids
// sample these; residuals and Ding integrals evaluate them directly.

#include <cstddef>
#include <functional>
#include <memory>

#include <Eigen/Core>

#include "toric/polyhedral.hpp"

namespace toric {

class Potential {
 public:
  using Value = std::function<double(const Eigen::VectorXd&)>;
  using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Hessian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  Potential() = default;
  Potential(std::size_t dim, Value value, Gradient gradient = {}, Hessian hessian = {});

  std::size_t dim() const { return dim_; }
  double operator()(const Eigen::VectorXd& x) const { return value_(x); }
  /// Analytic when provided, otherwise central differences.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }
  bool has_analytic_hessian() const { return static_cast<bool>(hessian_); }

 private:
  std::size_t dim_ = 0;
  Value value_;
  Gradient gradient_;
  Hessian hessian_;
};

Potential operator+(const Potential& a, const Potential& b);
Potential scale(const Potential& a, double s);
/// (1-t) a + t b.
Potential interpolate(const Potential& a, const Potential& b, double t);
/// a(x) + <c, x> + c0.
Potential add_affine(const Potential& a, const Eigen::VectorXd& c, double c0);
/// (x, y) -> a(x) + b(y).
Potential direct_sum(const Potential& a, const Potential& b);

/// 1/2 sum_i (l_i + a_i) log(l_i + a_i); throws NotDelzant.
Potential guillemin_potential(const Polyhedron& p);
/// Same formula without the Delzant check (the mistranslated fixtures need it).
Potential facet_log_potential(const Polyhedron& p);

Potential quadratic_potential(std::size_t dim);

/// amplitude * exp(-1 / (1 - r^2)) with r = |x - center| / radius; zero for r >= 1.
Potential bump(const Eigen::VectorXd& center, double radius, double amplitude);

/// Legendre transform at one point: sup_xi <xi, x> - f(xi) by damped Newton
/// from `start` on grad f(xi) = x. Returns the value and the maximizer.
struct PointConjugate {
  double value = 0.0;
  Eigen::VectorXd argmax;
  bool converged = false;
};
PointConjugate legendre_at(const Potential& f, const Eigen::VectorXd& x, const Eigen::VectorXd& start,
                           double tol = 1e-13, int max_iter = 100);

}  // namespace toric
