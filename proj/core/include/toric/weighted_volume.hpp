#pragma once

// The weighted volume F(b) = int_P e^{-<b,x>} dx and its minimizer b_P.

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "toric/error.hpp"
#include "toric/exp_integrals.hpp"

namespace toric {

double weighted_volume(const Polyhedron& p, const Eigen::VectorXd& b);
Eigen::VectorXd weighted_volume_grad(const Polyhedron& p, const Eigen::VectorXd& b);
Eigen::MatrixXd weighted_volume_hess(const Polyhedron& p, const Eigen::VectorXd& b);

struct TraceEntry {
  Eigen::VectorXd b;
  double value = 0.0;
  double grad_norm = 0.0;
};

struct SolveReport {
  Eigen::VectorXd b_P;
  double value = 0.0;
  double grad_norm = 0.0;
  double hessian_min_eig = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
};

struct SolveOptions {
  double tol_rel = 1e-10;  // on |grad F| relative to F
  double tol_abs = 1e-14;
  int max_iter = 100;
  std::optional<Eigen::VectorXd> start;
};

/// NotConverged, carrying the best iterate.
class SolveError : public Error {
 public:
  SolveError(const std::string& detail, SolveReport report)
      : Error(ErrorCode::NotConverged, detail), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Start point used by solve_bp: mean of the generators of C*, or 0 when P is bounded.
Eigen::VectorXd default_start(const Polyhedron& p);

/// Damped Newton for grad F = 0. Requires 0 in the interior of P.
SolveReport solve_bp(const Polyhedron& p, const SolveOptions& opts = {});
SolveReport solve_bp(const ExpIntegrator& integrator, const SolveOptions& opts = {});

/// int_P (<c,x> + c0) e^{-<b,x>} dx.
double futaki_pairing(const Polyhedron& p, const Eigen::VectorXd& b, const Eigen::VectorXd& c, double c0 = 0.0);

}  // namespace toric
