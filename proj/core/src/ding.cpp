#include "toric/ding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/QR>

#include "toric/error.hpp"
#include "toric/parallel.hpp"
#include "toric/soliton.hpp"

namespace toric {

namespace {

std::vector<Eigen::VectorXd> rays_of(const Polyhedron& p) {
  std::vector<Eigen::VectorXd> out;
  const Cone c = recession_cone(p);
  for (const auto& g : c.generators()) out.push_back(to_eigen(g));
  return out;
}

// Mean of the vertices pushed one unit along the mean recession ray.
Eigen::VectorXd interior_point(const Polyhedron& p) {
  const auto vs = vertices(p);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.dim()));
  for (const auto& v : vs) x += to_eigen(v.point);
  x /= static_cast<double>(vs.size());
  const auto rays = rays_of(p);
  if (!rays.empty()) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(x.size());
    for (const auto& g : rays) r += g.normalized();
    x += r / static_cast<double>(rays.size());
  }
  return x;
}

// Directions probed for growth: the rays, their pairwise sums, their total.
std::vector<Eigen::VectorXd> probe_directions(const Polyhedron& p) {
  const auto rays = rays_of(p);
  std::vector<Eigen::VectorXd> dirs;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    dirs.push_back(rays[i].normalized());
    for (std::size_t j = i + 1; j < rays.size(); ++j) dirs.push_back((rays[i].normalized() + rays[j].normalized()).normalized());
  }
  if (rays.size() > 2) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(rays[0].size());
    for (const auto& r : rays) s += r.normalized();
    dirs.push_back(s.normalized());
  }
  return dirs;
}

std::vector<Eigen::VectorXd> probe_points(const Polyhedron& p) {
  const Eigen::VectorXd x0 = interior_point(p);
  std::vector<Eigen::VectorXd> pts{x0};
  // Vertices, nudged inside so that Hessians stay finite.
  for (const auto& v : vertices(p)) pts.push_back(to_eigen(v.point) + 1e-3 * (x0 - to_eigen(v.point)));
  for (const auto& d : probe_directions(p))
    for (int j = 0; j <= 6; ++j) pts.push_back(x0 + std::ldexp(1.0, j) * d);
  return pts;
}

// |u_P| <= C (1 + |x|)^2 on P: s log s <= max(s^2, 1/e) with s <= |nu||x| + a.
double up_bound_constant(const Polyhedron& p) {
  double c = 0.0;
  for (std::size_t i = 0; i < p.num_facets(); ++i) {
    const double nu = to_eigen(p.normals()[i]).norm();
    const double a = std::abs(to_double(p.offsets()[i]));
    c += std::pow(std::max(nu, a + 1.0), 2);
  }
  return std::max(1.0, 0.5 * c);
}

bool is_spd_failure(const Error& e) { return e.code() == ErrorCode::HessianNotSPD; }

double exp_neg_rho(const Potential& u, const Eigen::VectorXd& x) { return std::exp(-rho_at(u, x)); }

}  // namespace

// ---------------------------------------------------------------- weight

WeightA WeightA::linear(const Polyhedron& p, const Eigen::VectorXd& b) {
  if (b.size() != static_cast<Eigen::Index>(p.dim())) throw Error(ErrorCode::InvalidInput, "b has wrong dimension");
  WeightA w;
  w.p_ = std::make_shared<const Polyhedron>(p);
  w.b_ = b;
  w.a_ = [b](const Eigen::VectorXd& x) { return b.dot(x); };
  if (!p.is_bounded()) w.cert_ = linear_growth_certificate(p, b);
  w.volume_ = integrate_exp(p, b);
  return w;
}

WeightA WeightA::general(const Polyhedron& p, ScalarField a, const std::optional<GrowthCertificate>& cert,
                         const QuadratureOptions& quadrature) {
  if (!p.is_bounded() && !cert) throw Error(ErrorCode::NoTailBound, "unbounded P needs a growth certificate for A");
  WeightA w;
  w.p_ = std::make_shared<const Polyhedron>(p);
  w.a_ = std::move(a);
  w.cert_ = cert;
  WeightedOptions wo;
  wo.quadrature = quadrature;
  w.volume_ = integrate_weighted(p, w.a_, [](const Eigen::VectorXd&) { return 1.0; }, cert, {}, wo).value;
  return w;
}

AdmissibilityReport check_admissible(const WeightA& a, double tol) {
  const Polyhedron& p = a.polyhedron();
  const std::size_t n = p.dim();
  AdmissibilityReport r;
  r.volume = a.volume();
  if (a.linear_coefficient()) {
    r.first_moments = integrate_exp_moments(p, *a.linear_coefficient()).first;
  } else {
    r.first_moments.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      r.first_moments[ii] =
          integrate_weighted(p, a.field(), [ii](const Eigen::VectorXd& x) { return x[ii]; }, a.certificate(), {1.0, 1})
              .value;
    }
  }
  const Potential up = guillemin_potential(p);
  r.up_integral = integrate_weighted(p, a.field(), [&up](const Eigen::VectorXd& x) { return up(x); }, a.certificate(),
                                     {up_bound_constant(p), 2})
                      .value;
  r.finite_volume = std::isfinite(r.volume) && r.volume > 0.0;
  r.balanced = r.finite_volume && r.first_moments.allFinite() &&
               r.first_moments.lpNorm<Eigen::Infinity>() <= tol * r.volume;
  r.up_integrable = std::isfinite(r.up_integral);
  r.admissible = r.finite_volume && r.balanced && r.up_integrable;
  return r;
}

// ---------------------------------------------------------------- growth

GrowthCertificate fit_linear_growth(const Polyhedron& p, const ScalarField& rho) {
  if (p.is_bounded()) return {1.0, 0.0};
  const Eigen::VectorXd x0 = interior_point(p);
  double slope = std::numeric_limits<double>::infinity();
  for (const auto& d : probe_directions(p)) {
    const double s = (rho(x0 + 64.0 * d) - rho(x0 + 32.0 * d)) / 32.0;
    slope = std::min(slope, s);
  }
  if (!(slope > 0.0)) throw Error(ErrorCode::NonIntegrablePotential, "rho_u does not grow along the recession cone");
  GrowthCertificate c{0.5 * slope, 0.0};
  for (const auto& x : probe_points(p)) c.c2 = std::max(c.c2, c.c1 * x.norm() - rho(x));
  c.c2 += 1.0;
  return c;
}

// ---------------------------------------------------------------- evaluator

DingEvaluator::DingEvaluator(const WeightA& a, const std::vector<Potential>& adapt_to, const DingOptions& opts,
                             bool rho_terms)
    : a_(a), region_(a.polyhedron()) {
  const Polyhedron& p = a.polyhedron();
  const std::size_t n = p.dim();
  QuadratureOptions qo = opts.quadrature;
  if (opts.region) {
    region_ = *opts.region;
    if (!region_.is_bounded()) throw Error(ErrorCode::InvalidInput, "integration region must be bounded");
  } else if (!p.is_bounded()) {
    if (!a.certificate()) throw Error(ErrorCode::NoTailBound, "unbounded P needs a growth certificate for A");
    const GrowthCertificate ca = *a.certificate();
    // u grows at most quadratically; the constant is read off the probes.
    double cu = up_bound_constant(p);
    for (const auto& u : adapt_to)
      for (const auto& x : probe_points(p)) cu = std::max(cu, 2.0 * std::abs(u(x)) / std::pow(1.0 + x.norm(), 2));
    double r = truncation_radius(n, ca, {cu, 2}, opts.truncation_tol);
    std::vector<GrowthCertificate> rho_certs;
    double c1_min = ca.c1;
    for (const auto& u : adapt_to) {
      if (!rho_terms) break;
      rho_certs.push_back(fit_linear_growth(p, [&u](const Eigen::VectorXd& x) { return rho_at(u, x); }));
      r = std::max(r, truncation_radius(n, rho_certs.back(), {}, opts.truncation_tol));
      c1_min = std::min(c1_min, rho_certs.back().c1);
    }
    double vmax = 0.0;
    for (const auto& v : vertices(p)) vmax = std::max(vmax, to_eigen(v.point).lpNorm<Eigen::Infinity>());
    while (r < 2.0 * vmax + 1.0) r *= 2.0;
    radius_ = r;
    tail_ = tail_bound(n, ca, {cu, 2}, r);
    for (const auto& c : rho_certs) tail_ = std::max(tail_, tail_bound(n, c, {}, r));
    region_ = clip_to_box(p, Rational(static_cast<long long>(r)));
    qo.max_initial_edge = std::max(4.0 / c1_min, r / 16.0);
  }
  mesh_ = std::make_shared<QuadratureMesh>(region_, qo);
  const ScalarField& af = a_.field();
  std::vector<ScalarField> integrands{[af](const Eigen::VectorXd& x) { return std::exp(-af(x)); }};
  for (const auto& u : adapt_to) {
    integrands.push_back([af, u](const Eigen::VectorXd& x) { return u(x) * std::exp(-af(x)); });
    if (rho_terms) integrands.push_back([u](const Eigen::VectorXd& x) { return exp_neg_rho(u, x); });
  }
  mesh_->adapt(integrands);
  volume_ = mesh_->integrate(integrands.front());
  volume_low_ = mesh_->integrate_low(integrands.front());
}

double DingEvaluator::weight_integral(const ScalarField& w) const {
  const ScalarField& af = a_.field();
  return mesh_->integrate([&](const Eigen::VectorXd& x) { return w(x) * std::exp(-af(x)); });
}

double DingEvaluator::potential_integral(const Potential& u) const {
  const double v = weight_integral([&u](const Eigen::VectorXd& x) { return u(x); });
  if (!std::isfinite(v)) throw Error(ErrorCode::NonIntegrablePotential, "int u e^{-A} is not finite");
  return v;
}

double DingEvaluator::ding1(const Potential& u) const {
  const double v = mesh_->integrate([&u](const Eigen::VectorXd& x) { return exp_neg_rho(u, x); });
  if (!std::isfinite(v) || !(v > 0.0)) throw Error(ErrorCode::NonIntegrablePotential, "int e^{-rho_u} is not finite");
  return v;
}

double DingEvaluator::ding1_low(const Potential& u) const {
  return mesh_->integrate_low([&u](const Eigen::VectorXd& x) { return exp_neg_rho(u, x); });
}

double DingEvaluator::ding(const Potential& u) const { return potential_integral(u) / volume_ - 0.5 * std::log(ding1(u)); }

double DingEvaluator::potential_integral_low(const Potential& u) const {
  const ScalarField& af = a_.field();
  return mesh_->integrate_low([&](const Eigen::VectorXd& x) { return u(x) * std::exp(-af(x)); });
}

double DingEvaluator::ding_low(const Potential& u) const {
  return potential_integral_low(u) / volume_low_ - 0.5 * std::log(ding1_low(u));
}

double DingEvaluator::normalization_constant(const Potential& u) const { return -potential_integral(u) / volume_; }

std::vector<Eigen::VectorXd> DingEvaluator::sample_points(std::size_t per_axis) const {
  const auto ni = static_cast<Eigen::Index>(region_.dim());
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(ni, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  for (const auto& v : vertices(region_)) {
    const Eigen::VectorXd x = to_eigen(v.point);
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  per_axis = std::max<std::size_t>(per_axis, 2);
  std::vector<Eigen::VectorXd> out;
  std::vector<std::size_t> idx(region_.dim(), 0);
  const double margin = 1e-9 * (1.0 + (hi - lo).maxCoeff());
  while (true) {
    Eigen::VectorXd x(ni);
    for (Eigen::Index i = 0; i < ni; ++i)
      x[i] = lo[i] + (hi[i] - lo[i]) * static_cast<double>(idx[static_cast<std::size_t>(i)]) /
                         static_cast<double>(per_axis - 1);
    if (region_.min_facet_distance(x) > margin) out.push_back(x);
    std::size_t i = 0;
    while (i < idx.size() && idx[i] + 1 == per_axis) idx[i++] = 0;
    if (i == idx.size()) break;
    ++idx[i];
  }
  return out;
}

// ---------------------------------------------------------------- free functions

double ding1(const Potential& u, const WeightA& a, const DingOptions& opts) { return DingEvaluator(a, {u}, opts).ding1(u); }

double ding(const Potential& u, const WeightA& a, const DingOptions& opts) { return DingEvaluator(a, {u}, opts).ding(u); }

Potential normalize(const Potential& u, const WeightA& a, const DingOptions& opts) {
  const double c = DingEvaluator(a, {u}, opts, false).normalization_constant(u);
  return add_affine(u, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(u.dim())), c);
}

Polyhedron grid_region(const Polyhedron& p, const PotentialGrid& g) {
  if (g.dim() != p.dim()) throw Error(ErrorCode::InvalidInput, "grid and polyhedron dimensions differ");
  std::vector<IntVec> normals = p.normals();
  std::vector<Rational> offsets = p.offsets();
  for (std::size_t i = 0; i < g.dim(); ++i) {
    IntVec e(g.dim(), 0);
    e[i] = 1;
    normals.push_back(e);
    offsets.push_back(-Rational(g.axes()[i].min));
    e[i] = -1;
    normals.push_back(e);
    offsets.push_back(Rational(g.axes()[i].max));
  }
  return Polyhedron::make(g.dim(), normals, offsets);
}

namespace {

DingOptions on_grid(const PotentialGrid& u, const WeightA& a, DingOptions opts) {
  if (!opts.region) opts.region = grid_region(a.polyhedron(), u);
  return opts;
}

}  // namespace

double ding1(const PotentialGrid& u, const WeightA& a, const DingOptions& opts) {
  return ding1(grid_potential(u, a.polyhedron()), a, on_grid(u, a, opts));
}

double ding(const PotentialGrid& u, const WeightA& a, const DingOptions& opts) {
  return ding(grid_potential(u, a.polyhedron()), a, on_grid(u, a, opts));
}

PotentialGrid normalize(const PotentialGrid& u, const WeightA& a, const DingOptions& opts) {
  const Potential pu = grid_potential(u, a.polyhedron());
  const double c = DingEvaluator(a, {pu}, on_grid(u, a, opts), false).normalization_constant(pu);
  PotentialGrid out = u;
  for (std::size_t k = 0; k < out.size(); ++k)
    if (out.present(k)) out[k] += c;
  return out;
}

// ---------------------------------------------------------------- geodesics

namespace {

AffineFit fit_affine(const std::vector<Eigen::VectorXd>& pts, const ScalarField& f) {
  AffineFit fit;
  if (pts.empty()) return fit;
  const auto n = pts.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), n + 1);
  Eigen::VectorXd y(m.rows());
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    const auto& x = pts[static_cast<std::size_t>(k)];
    m(k, 0) = 1.0;
    m.row(k).tail(n) = x.transpose();
    y[k] = f(x);
  }
  const Eigen::VectorXd c = m.colPivHouseholderQr().solve(y);
  fit.constant = c[0];
  fit.slope = c.tail(n);
  fit.residual = (m * c - y).lpNorm<Eigen::Infinity>();
  return fit;
}

// Weights of the second divided difference 2 f[t0, t1, t2].
std::array<double, 3> second_difference_weights(double t0, double t1, double t2) {
  const double h1 = t1 - t0, h2 = t2 - t1;
  return {2.0 / (h1 * (h1 + h2)), -2.0 / (h1 * h2), 2.0 / (h2 * (h1 + h2))};
}

}  // namespace

GeodesicScanReport geodesic_convexity_scan(const Potential& u0, const Potential& u1, const WeightA& a,
                                           std::size_t samples, double tol, const DingOptions& opts) {
  if (samples < 9) throw Error(ErrorCode::InvalidInput, "geodesic scans need at least 9 time samples");
  GeodesicScanReport rep;
  const std::size_t m = samples;
  for (std::size_t k = 0; k < m; ++k)
    rep.t.push_back(0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(m - 1))));
  rep.t.front() = 0.0;
  rep.t.back() = 1.0;
  try {
    const DingEvaluator ev(a, {u0, u1, interpolate(u0, u1, 0.5)}, opts);
    // One mesh serves every t, so the quadrature error is a smooth function
    // of t; the error of a second difference is the second difference of the
    // error, estimated by that of (high - low), plus a rounding floor.
    std::vector<double> d(m), d_diff(m), d_floor(m), d1(m), l_diff(m), l_floor(m);
    parallel_for(m, [&](std::size_t k) {
      const Potential ut = interpolate(u0, u1, rep.t[k]);
      d1[k] = ev.ding1(ut);
      d[k] = ev.potential_integral(ut) / ev.volume() - 0.5 * std::log(d1[k]);
      const double low1 = ev.ding1_low(ut);
      const double d_low = ev.potential_integral_low(ut) / ev.volume_low() - 0.5 * std::log(low1);
      d_diff[k] = d[k] - d_low;
      d_floor[k] = 1e-13 * std::max(1.0, std::abs(d[k]));
      l_diff[k] = std::log(d1[k]) - std::log(low1);
      l_floor[k] = 1e-13 * std::max(1.0, std::abs(std::log(d1[k])));
    });
    rep.d_values = d;
    rep.ding1_values = d1;
    rep.min_second_difference = std::numeric_limits<double>::infinity();
    rep.max_logconcavity = -std::numeric_limits<double>::infinity();
    double max_abs = 0.0, max_noise = 0.0, max_log_noise = 0.0;
    for (std::size_t k = 1; k + 1 < m; ++k) {
      const auto w = second_difference_weights(rep.t[k - 1], rep.t[k], rep.t[k + 1]);
      auto apply = [&](const std::vector<double>& v) { return w[0] * v[k - 1] + w[1] * v[k] + w[2] * v[k + 1]; };
      auto apply_abs = [&](const std::vector<double>& v) {
        return std::abs(w[0]) * v[k - 1] + std::abs(w[1]) * v[k] + std::abs(w[2]) * v[k + 1];
      };
      const double dd = apply(d);
      const double ll = w[0] * std::log(d1[k - 1]) + w[1] * std::log(d1[k]) + w[2] * std::log(d1[k + 1]);
      const double noise = std::abs(apply(d_diff)) + apply_abs(d_floor);
      const double log_noise = std::abs(apply(l_diff)) + apply_abs(l_floor);
      rep.second_differences.push_back(dd);
      rep.logconcavity_values.push_back(ll);
      rep.noise.push_back(noise);
      rep.min_second_difference = std::min(rep.min_second_difference, dd);
      rep.max_logconcavity = std::max(rep.max_logconcavity, ll);
      max_abs = std::max(max_abs, std::abs(dd));
      max_noise = std::max(max_noise, noise);
      max_log_noise = std::max(max_log_noise, log_noise);
    }
    rep.convex = rep.min_second_difference >= -tol;
    rep.log_concave = rep.max_logconcavity <= tol + max_log_noise;
    rep.equality_flag = max_abs < 10.0 * max_noise;
    rep.affine_fit = fit_affine(ev.sample_points(), [&](const Eigen::VectorXd& x) { return u1(x) - u0(x); });
  } catch (const Error& e) {
    if (is_spd_failure(e)) throw Error(ErrorCode::PathLeavesCone, e.detail());
    throw;
  }
  return rep;
}

GeodesicScanReport geodesic_convexity_scan(const PotentialGrid& u0, const PotentialGrid& u1, const WeightA& a,
                                           std::size_t samples, double tol, const DingOptions& opts) {
  if (u0.axes().size() != u1.axes().size()) throw Error(ErrorCode::InvalidInput, "endpoint grids differ in dimension");
  return geodesic_convexity_scan(grid_potential(u0, a.polyhedron()), grid_potential(u1, a.polyhedron()), a, samples,
                                 tol, on_grid(u0, a, opts));
}

// ---------------------------------------------------------------- first variation

FirstVariationReport first_variation_check(const Potential& u, const WeightA& a, const Potential& w, double h,
                                           const DingOptions& opts) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidInput, "step must be positive");
  FirstVariationReport rep;
  rep.h = h;
  try {
    const Potential up = u + scale(w, h), um = u + scale(w, -h);
    const DingEvaluator ev(a, {u, up, um}, opts);
    rep.fd_ding1 = (ev.ding1(up) - ev.ding1(um)) / (2.0 * h);
    rep.fd_ding = (ev.ding(up) - ev.ding(um)) / (2.0 * h);
    rep.predicted = 2.0 * ev.weight_integral([&w](const Eigen::VectorXd& x) { return w(x); });
  } catch (const Error& e) {
    if (is_spd_failure(e)) throw Error(ErrorCode::ConvexityLost, "u +- h w is not convex: " + e.detail());
    throw;
  }
  const double scale_ = std::max(std::abs(rep.fd_ding1), std::abs(rep.predicted));
  rep.relative_error = scale_ == 0.0 ? 0.0 : std::abs(rep.fd_ding1 - rep.predicted) / scale_;
  return rep;
}

double geodesic_time_derivative(const Potential& u0, const Potential& u1, double t, const Eigen::VectorXd& x,
                                double h) {
  const Eigen::VectorXd xi = interpolate(u0, u1, t).gradient(x);
  auto phi = [&](double s) {
    const PointConjugate c = legendre_at(interpolate(u0, u1, s), xi, x);
    if (!c.converged) throw Error(ErrorCode::NotConverged, "pointwise conjugate did not converge");
    return c.value;
  };
  return -(phi(t + h) - phi(t - h)) / (2.0 * h);
}

double conjugate_side_ding1(const PotentialGrid& phi) {
  CompensatedSum acc;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (!phi.present(k)) continue;
    const auto idx = phi.unflatten(k);
    double w = 1.0;
    for (std::size_t i = 0; i < phi.dim(); ++i) {
      const auto& ax = phi.axes()[i];
      if (ax.count < 2) continue;
      w *= ax.step() * ((idx[i] == 0 || idx[i] + 1 == ax.count) ? 0.5 : 1.0);
    }
    acc.add(w * std::exp(-2.0 * phi[k]));
  }
  return acc.value();
}

}  // namespace toric
