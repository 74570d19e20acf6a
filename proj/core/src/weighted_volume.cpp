#include "toric/weighted_volume.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace toric {

double weighted_volume(const Polyhedron& p, const Eigen::VectorXd& b) { return ExpIntegrator(p).integrate(b); }

Eigen::VectorXd weighted_volume_grad(const Polyhedron& p, const Eigen::VectorXd& b) {
  return -ExpIntegrator(p).moments(b, 1).first;
}

Eigen::MatrixXd weighted_volume_hess(const Polyhedron& p, const Eigen::VectorXd& b) {
  return ExpIntegrator(p).moments(b, 2).second;
}

Eigen::VectorXd default_start(const Polyhedron& p) {
  const Cone rec = recession_cone(p);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.dim()));
  if (rec.is_trivial()) return b;
  const auto& duals = rec.dual_generators();
  for (const auto& g : duals) b += to_eigen(g);
  return b / static_cast<double>(duals.size());
}

SolveReport solve_bp(const Polyhedron& p, const SolveOptions& opts) { return solve_bp(ExpIntegrator(p), opts); }

SolveReport solve_bp(const ExpIntegrator& ei, const SolveOptions& opts) {
  const Polyhedron& p = ei.polyhedron();
  if (!p.contains_interior(RatVec(p.dim(), Rational(0))))
    throw Error(ErrorCode::InvalidInput, "0 must lie in the interior of P; translate first");
  Eigen::VectorXd b = opts.start ? *opts.start : default_start(p);
  if (!ei.in_domain(b)) {
    if (opts.start) throw Error(ErrorCode::DomainViolation, "start point is not in the interior of the dual recession cone");
    throw Error(ErrorCode::DomainViolation, "dual recession cone has empty interior");
  }

  SolveReport rep;
  auto m = ei.moments(b, 2);
  auto record = [&](const ExpMoments& mm) {
    rep.b_P = b;
    rep.value = mm.value;
    rep.grad_norm = mm.first.norm();
    rep.trace.push_back({b, mm.value, rep.grad_norm});
  };
  auto done = [&](const ExpMoments& mm) { return mm.first.norm() <= opts.tol_abs + opts.tol_rel * mm.value; };
  record(m);

  for (int it = 0; it < opts.max_iter && !done(m); ++it) {
    const Eigen::VectorXd grad = -m.first;
    Eigen::LLT<Eigen::MatrixXd> llt(m.second);
    Eigen::VectorXd dir = llt.info() == Eigen::Success ? Eigen::VectorXd(llt.solve(-grad)) : Eigen::VectorXd(-grad);
    const double slope = grad.dot(dir);
    double t = 1.0;
    bool moved = false;
    while (t > 1e-14) {
      const Eigen::VectorXd trial = b + t * dir;
      if (ei.in_domain(trial)) {
        auto mt = ei.moments(trial, 2);
        if (mt.value <= m.value + 1e-4 * t * slope && mt.value < m.value) {
          b = trial;
          m = std::move(mt);
          moved = true;
          break;
        }
      }
      t *= 0.5;
    }
    rep.iterations = it + 1;
    if (!moved) break;
    record(m);
  }

  rep.converged = done(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.second, Eigen::EigenvaluesOnly);
  rep.hessian_min_eig = eig.eigenvalues().minCoeff();
  if (!rep.converged)
    throw SolveError("no critical point within " + std::to_string(opts.max_iter) + " iterations (|grad F| = " +
                         std::to_string(rep.grad_norm) + ")",
                     rep);
  return rep;
}

double futaki_pairing(const Polyhedron& p, const Eigen::VectorXd& b, const Eigen::VectorXd& c, double c0) {
  auto m = ExpIntegrator(p).moments(b, 1);
  return c.dot(m.first) + c0 * m.value;
}

}  // namespace toric
