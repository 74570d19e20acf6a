#include "toric/potential.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "toric/error.hpp"

namespace toric {

Potential::Potential(std::size_t dim, Value value, Gradient gradient, Hessian hessian)
    : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)), hessian_(std::move(hessian)) {}

Eigen::VectorXd Potential::gradient(const Eigen::VectorXd& x) const {
  if (gradient_) return gradient_(x);
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 6e-6 * std::max(1.0, std::abs(x[i]));
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (value_(xp) - value_(xm)) / (2 * h);
  }
  return g;
}

Eigen::MatrixXd Potential::hessian(const Eigen::VectorXd& x) const {
  if (hessian_) return hessian_(x);
  const Eigen::Index n = x.size();
  Eigen::MatrixXd hm(n, n);
  if (gradient_) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = 6e-6 * std::max(1.0, std::abs(x[i]));
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      hm.col(i) = (gradient_(xp) - gradient_(xm)) / (2 * h);
    }
    return 0.5 * (hm + hm.transpose());
  }
  const double f0 = value_(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hi = 1e-4 * std::max(1.0, std::abs(x[i]));
    for (Eigen::Index j = i; j < n; ++j) {
      const double hj = 1e-4 * std::max(1.0, std::abs(x[j]));
      auto at = [&](double si, double sj) {
        Eigen::VectorXd y = x;
        y[i] += si;
        y[j] += sj;
        return value_(y);
      };
      if (i == j) {
        hm(i, i) = (at(hi, 0) - 2 * f0 + at(-hi, 0)) / (hi * hi);
      } else {
        hm(i, j) = (at(hi, hj) - at(hi, -hj) - at(-hi, hj) + at(-hi, -hj)) / (4 * hi * hj);
        hm(j, i) = hm(i, j);
      }
    }
  }
  return hm;
}

namespace {

Potential::Hessian hess_of(const Potential& p) {
  return [p](const Eigen::VectorXd& x) { return p.hessian(x); };
}

}  // namespace

Potential operator+(const Potential& a, const Potential& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::InvalidInput, "potential dimensions differ");
  Potential::Gradient g;
  Potential::Hessian h;
  if (a.has_analytic_gradient() && b.has_analytic_gradient())
    g = [a, b](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a.gradient(x) + b.gradient(x); };
  if (a.has_analytic_hessian() && b.has_analytic_hessian())
    h = [a, b](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return a.hessian(x) + b.hessian(x); };
  return Potential(a.dim(), [a, b](const Eigen::VectorXd& x) { return a(x) + b(x); }, g, h);
}

Potential scale(const Potential& a, double s) {
  Potential::Gradient g;
  Potential::Hessian h;
  if (a.has_analytic_gradient()) g = [a, s](const Eigen::VectorXd& x) -> Eigen::VectorXd { return s * a.gradient(x); };
  if (a.has_analytic_hessian()) h = [a, s](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return s * a.hessian(x); };
  return Potential(a.dim(), [a, s](const Eigen::VectorXd& x) { return s * a(x); }, g, h);
}

Potential interpolate(const Potential& a, const Potential& b, double t) {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return scale(a, 1.0 - t) + scale(b, t);
}

Potential add_affine(const Potential& a, const Eigen::VectorXd& c, double c0) {
  Potential::Gradient g;
  Potential::Hessian h;
  if (a.has_analytic_gradient()) g = [a, c](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a.gradient(x) + c; };
  if (a.has_analytic_hessian()) h = hess_of(a);
  return Potential(a.dim(), [a, c, c0](const Eigen::VectorXd& x) { return a(x) + c.dot(x) + c0; }, g, h);
}

Potential direct_sum(const Potential& a, const Potential& b) {
  const auto na = static_cast<Eigen::Index>(a.dim());
  const auto nb = static_cast<Eigen::Index>(b.dim());
  auto value = [a, b, na, nb](const Eigen::VectorXd& x) { return a(x.head(na)) + b(x.tail(nb)); };
  auto grad = [a, b, na, nb](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(na + nb);
    g << a.gradient(x.head(na)), b.gradient(x.tail(nb));
    return g;
  };
  auto hess = [a, b, na, nb](const Eigen::VectorXd& x) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(na + nb, na + nb);
    h.topLeftCorner(na, na) = a.hessian(x.head(na));
    h.bottomRightCorner(nb, nb) = b.hessian(x.tail(nb));
    return h;
  };
  return Potential(a.dim() + b.dim(), value, grad, hess);
}

Potential facet_log_potential(const Polyhedron& p) {
  const auto n = static_cast<Eigen::Index>(p.dim());
  const auto m = static_cast<Eigen::Index>(p.num_facets());
  Eigen::MatrixXd normals(m, n);
  Eigen::VectorXd offsets(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    normals.row(i) = to_eigen(p.normals()[static_cast<std::size_t>(i)]).transpose();
    offsets[i] = to_double(p.offsets()[static_cast<std::size_t>(i)]);
  }
  auto value = [normals, offsets](const Eigen::VectorXd& x) {
    const Eigen::VectorXd s = normals * x + offsets;
    double v = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s[i] < 0.0) return std::numeric_limits<double>::quiet_NaN();
      if (s[i] > 0.0) v += s[i] * std::log(s[i]);
    }
    return 0.5 * v;
  };
  auto grad = [normals, offsets](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::VectorXd s = normals * x + offsets;
    return 0.5 * normals.transpose() * (s.array().log() + 1.0).matrix();
  };
  auto hess = [normals, offsets](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const Eigen::VectorXd s = normals * x + offsets;
    return 0.5 * normals.transpose() * s.cwiseInverse().asDiagonal() * normals;
  };
  return Potential(p.dim(), value, grad, hess);
}

Potential guillemin_potential(const Polyhedron& p) {
  auto cert = is_delzant(p);
  if (!cert.delzant) throw Error(ErrorCode::NotDelzant, "vertex " + std::to_string(*cert.failing_vertex) + ": " + cert.reason);
  return facet_log_potential(p);
}

Potential quadratic_potential(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Potential(
      dim, [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); },
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; },
      [n](const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(n, n); });
}

Potential bump(const Eigen::VectorXd& center, double radius, double amplitude) {
  const auto n = center.size();
  const double r2inv = 1.0 / (radius * radius);
  auto s_of = [center, r2inv](const Eigen::VectorXd& x) { return (x - center).squaredNorm() * r2inv; };
  auto value = [=](const Eigen::VectorXd& x) {
    const double s = s_of(x);
    return s < 1.0 ? amplitude * std::exp(-1.0 / (1.0 - s)) : 0.0;
  };
  auto grad = [=](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double s = s_of(x);
    if (s >= 1.0) return Eigen::VectorXd::Zero(n);
    const double w = 1.0 - s;
    const double g1 = -std::exp(-1.0 / w) / (w * w);
    return amplitude * g1 * 2.0 * r2inv * (x - center);
  };
  auto hess = [=](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const double s = s_of(x);
    if (s >= 1.0) return Eigen::MatrixXd::Zero(n, n);
    const double w = 1.0 - s;
    const double g = std::exp(-1.0 / w);
    const double g1 = -g / (w * w);
    const double g2 = g * (1.0 / std::pow(w, 4) - 2.0 / std::pow(w, 3));
    const Eigen::VectorXd d = x - center;
    return amplitude * (g2 * 4.0 * r2inv * r2inv * d * d.transpose() +
                        g1 * 2.0 * r2inv * Eigen::MatrixXd::Identity(n, n));
  };
  return Potential(static_cast<std::size_t>(n), value, grad, hess);
}

PointConjugate legendre_at(const Potential& f, const Eigen::VectorXd& x, const Eigen::VectorXd& start, double tol,
                           int max_iter) {
  PointConjugate out;
  Eigen::VectorXd xi = start;
  auto psi = [&](const Eigen::VectorXd& y) { return y.dot(x) - f(y); };
  double cur = psi(xi);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd r = x - f.gradient(xi);
    if (r.norm() <= tol * (1.0 + x.norm())) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd h = f.hessian(xi);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    const Eigen::VectorXd step = llt.info() == Eigen::Success ? Eigen::VectorXd(llt.solve(r)) : r;
    double t = 1.0;
    bool moved = false;
    while (t > 1e-12) {
      const Eigen::VectorXd trial = xi + t * step;
      const double v = psi(trial);
      if (std::isfinite(v) && v >= cur - 1e-15 * std::abs(cur)) {
        xi = trial;
        cur = v;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  out.value = cur;
  out.argmax = xi;
  if (!out.converged) out.converged = (x - f.gradient(xi)).norm() <= 1e3 * tol * (1.0 + x.norm());
  return out;
}

}  // namespace toric
