#include "toric/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>
#include <boost/math/tools/roots.hpp>

#include "toric/error.hpp"
#include "toric/parallel.hpp"

namespace toric {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string where(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

// Samples whose (2r+1)^n index neighbourhood lies in the box and is present.
std::vector<char> interior_mask(const PotentialGrid& g, std::size_t band) {
  const std::size_t n = g.dim();
  const std::size_t r = std::max<std::size_t>(band, 1);
  std::vector<char> mask(g.size(), 0);
  parallel_for(g.size(), [&](std::size_t k) {
    if (!g.present(k)) return;
    const auto idx = g.unflatten(k);
    for (std::size_t i = 0; i < n; ++i)
      if (idx[i] < r || idx[i] + r >= g.axes()[i].count) return;
    std::vector<long> off(n, -static_cast<long>(r));
    while (true) {
      std::size_t flat = k;
      for (std::size_t i = 0; i < n; ++i) flat = static_cast<std::size_t>(static_cast<long>(flat) + off[i] * static_cast<long>(g.stride(i)));
      if (!g.present(flat)) return;
      std::size_t i = 0;
      while (i < n && off[i] == static_cast<long>(r)) off[i++] = -static_cast<long>(r);
      if (i == n) break;
      ++off[i];
    }
    mask[k] = 1;
  });
  return mask;
}

struct Stencil {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

// Centered differences of vals at interior sample k.
Stencil differences(const PotentialGrid& g, const std::vector<double>& vals, std::size_t k) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  Stencil s{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t si = g.stride(static_cast<std::size_t>(i));
    const double hi = g.axes()[static_cast<std::size_t>(i)].step();
    s.grad[i] = (vals[k + si] - vals[k - si]) / (2 * hi);
    s.hess(i, i) = (vals[k + si] - 2 * vals[k] + vals[k - si]) / (hi * hi);
    for (Eigen::Index j = 0; j < i; ++j) {
      const std::size_t sj = g.stride(static_cast<std::size_t>(j));
      const double hj = g.axes()[static_cast<std::size_t>(j)].step();
      s.hess(i, j) = s.hess(j, i) =
          (vals[k + si + sj] - vals[k + si - sj] - vals[k - si + sj] + vals[k - si - sj]) / (4 * hi * hj);
    }
  }
  return s;
}

double log_det_spd(const Eigen::MatrixXd& h, const Eigen::VectorXd& x) {
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::HessianNotSPD, "Hessian not positive definite at " + where(x));
  const Eigen::MatrixXd& l = llt.matrixL();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0)) throw Error(ErrorCode::HessianNotSPD, "Hessian not positive definite at " + where(x));
    acc += 2.0 * std::log(l(i, i));
  }
  return acc;
}

// Rethrows the first recorded error after a parallel loop.
struct FirstError {
  std::optional<std::size_t> index;
  std::optional<Error> error;
  std::mutex m;
  void record(std::size_t k, const Error& e) {
    std::lock_guard<std::mutex> lock(m);
    if (!index || k < *index) {
      index = k;
      error = e;
    }
  }
  void rethrow() const {
    if (error) throw *error;
  }
};

Eigen::MatrixXd affine_design(const std::vector<Eigen::VectorXd>& pts) {
  const auto n = pts.empty() ? 0 : pts.front().size();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), n + 1);
  for (std::size_t r = 0; r < pts.size(); ++r) {
    a(static_cast<Eigen::Index>(r), 0) = 1.0;
    a.row(static_cast<Eigen::Index>(r)).tail(n) = pts[r].transpose();
  }
  return a;
}

}  // namespace

MetricSample metric_sample(const Potential& u, const Eigen::VectorXd& x) {
  MetricSample m{x, u.hessian(x), {}};
  Eigen::LLT<Eigen::MatrixXd> llt(m.hessian_u);
  if (llt.info() != Eigen::Success || !m.hessian_u.allFinite())
    throw Error(ErrorCode::HessianNotSPD, "Hessian not positive definite at " + where(x));
  m.inverse = llt.solve(Eigen::MatrixXd::Identity(x.size(), x.size()));
  const double defect = (m.inverse * m.hessian_u - Eigen::MatrixXd::Identity(x.size(), x.size())).norm();
  if (defect > 1e-8) throw Error(ErrorCode::HessianNotSPD, "Hessian too ill-conditioned at " + where(x));
  return m;
}

double rho_at(const Potential& u, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd h = u.hessian(x);
  return 2.0 * (u.gradient(x).dot(x) - u(x)) - log_det_spd(h, x);
}

ResidualField rho(const PotentialGrid& u, const Eigen::VectorXd& b, const RhoOptions& opts) {
  if (b.size() != static_cast<Eigen::Index>(u.dim())) throw Error(ErrorCode::InvalidInput, "b has wrong dimension");
  std::vector<double> vals = u.values();
  std::optional<Potential> ref;
  if (opts.singular_reference) {
    if (opts.singular_reference->dim() != u.dim())
      throw Error(ErrorCode::InvalidInput, "reference polyhedron has wrong dimension");
    ref = facet_log_potential(*opts.singular_reference);
    for (std::size_t k = 0; k < vals.size(); ++k)
      if (!std::isnan(vals[k])) vals[k] -= (*ref)(u.point(k));
  }
  // Absent samples of the differenced field define the interior.
  PotentialGrid diffed(u.axes(), u.kind());
  for (std::size_t k = 0; k < vals.size(); ++k) diffed[k] = vals[k];
  const std::vector<char> mask = interior_mask(diffed, opts.band_cells);

  ResidualField out{PotentialGrid(u.axes(), PotentialKind::Symplectic), PotentialGrid(u.axes(), PotentialKind::Symplectic)};
  for (std::size_t k = 0; k < u.size(); ++k) {
    out.rho[k] = kNaN;
    out.residual[k] = kNaN;
  }
  FirstError err;
  parallel_for(u.size(), [&](std::size_t k) {
    if (!mask[k]) return;
    const Eigen::VectorXd x = u.point(k);
    try {
      Stencil s = differences(diffed, vals, k);
      double value = vals[k];
      if (ref) {
        const Polyhedron& p = *opts.singular_reference;
        for (std::size_t i = 0; i < p.num_facets(); ++i)
          if (!(to_eigen(p.normals()[i]).dot(x) + to_double(p.offsets()[i]) > 0.0)) return;
        s.grad += ref->gradient(x);
        s.hess += ref->hessian(x);
        value = u[k];
      }
      const double r = 2.0 * (s.grad.dot(x) - value) - log_det_spd(s.hess, x);
      out.rho[k] = r;
      out.residual[k] = r - b.dot(x);
    } catch (const Error& e) {
      err.record(k, e);
    }
  });
  err.rethrow();
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!u.present(k)) continue;
    if (std::isnan(out.rho[k])) {
      ++out.excluded_band;
      continue;
    }
    ++out.interior_cells;
    out.sup_norm = std::max(out.sup_norm, std::abs(out.residual[k]));
  }
  return out;
}

double soliton_residual(const PotentialGrid& u, const Eigen::VectorXd& b, const RhoOptions& opts) {
  return rho(u, b, opts).sup_norm;
}

double residual_truncation_model(const Potential& u, const ResidualField& field) {
  const PotentialGrid& g = field.rho;
  const auto n = static_cast<Eigen::Index>(g.dim());
  Eigen::VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = g.axes()[static_cast<std::size_t>(i)].step();
  const double delta = 0.05 * h.minCoeff();
  std::vector<double> model(g.size(), 0.0);
  parallel_for(g.size(), [&](std::size_t k) {
    if (!g.present(k)) return;
    const Eigen::VectorXd x = g.point(k);
    const Eigen::MatrixXd h0 = u.hessian(x);
    std::vector<Eigen::MatrixXd> hp(static_cast<std::size_t>(n)), hm(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd y = x;
      y[i] += delta;
      hp[static_cast<std::size_t>(i)] = u.hessian(y);
      y[i] -= 2 * delta;
      hm[static_cast<std::size_t>(i)] = u.hessian(y);
    }
    Eigen::VectorXd dg(n);
    Eigen::MatrixXd dh(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& p = hp[static_cast<std::size_t>(i)];
      const auto& m = hm[static_cast<std::size_t>(i)];
      const double u3 = (p(i, i) - m(i, i)) / (2 * delta);
      const double u4 = (p(i, i) - 2 * h0(i, i) + m(i, i)) / (delta * delta);
      dg[i] = h[i] * h[i] / 6.0 * u3;
      dh(i, i) = h[i] * h[i] / 12.0 * u4;
      for (Eigen::Index j = 0; j < i; ++j) {
        const auto& pj = hp[static_cast<std::size_t>(j)];
        const auto& mj = hm[static_cast<std::size_t>(j)];
        const double u_iiij = (p(i, j) - 2 * h0(i, j) + m(i, j)) / (delta * delta);
        const double u_ijjj = (pj(i, j) - 2 * h0(i, j) + mj(i, j)) / (delta * delta);
        dh(i, j) = dh(j, i) = (h[i] * h[i] * u_iiij + h[j] * h[j] * u_ijjj) / 6.0;
      }
    }
    const Eigen::MatrixXd inv = h0.inverse();
    model[k] = std::abs(2.0 * dg.dot(x) - (inv * dh).trace());
  });
  return *std::max_element(model.begin(), model.end());
}

namespace {

struct ComplexSide {
  std::vector<std::size_t> index;
  std::vector<Eigen::VectorXd> xi;
  std::vector<double> log_det, exponent;  // exponent = -2 phi + <b, grad phi>
};

ComplexSide complex_side(const PotentialGrid& phi, const Eigen::VectorXd& b, std::size_t band) {
  if (b.size() != static_cast<Eigen::Index>(phi.dim())) throw Error(ErrorCode::InvalidInput, "b has wrong dimension");
  const std::vector<char> mask = interior_mask(phi, band);
  ComplexSide cs;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (!mask[k]) continue;
    const Stencil s = differences(phi, phi.values(), k);
    const Eigen::VectorXd xi = phi.point(k);
    cs.index.push_back(k);
    cs.xi.push_back(xi);
    cs.log_det.push_back(log_det_spd(s.hess, xi));
    cs.exponent.push_back(-2.0 * phi[k] + b.dot(s.grad));
  }
  return cs;
}

double relative_defect(const ComplexSide& cs) {
  double sup = 0.0;
  for (std::size_t r = 0; r < cs.index.size(); ++r) {
    // |D - E| / max(D, E) = 1 - exp(-|log D - log E|)
    sup = std::max(sup, -std::expm1(-std::abs(cs.log_det[r] - cs.exponent[r])));
  }
  return sup;
}

}  // namespace

double complex_side_residual(const PotentialGrid& phi, const Eigen::VectorXd& b, std::size_t band_cells) {
  return relative_defect(complex_side(phi, b, band_cells));
}

AffineNormalization affine_normalize(const PotentialGrid& phi, const Eigen::VectorXd& b, std::size_t band_cells) {
  const ComplexSide cs = complex_side(phi, b, band_cells);
  const auto n = static_cast<Eigen::Index>(phi.dim());
  if (cs.index.size() < static_cast<std::size_t>(n + 1))
    throw Error(ErrorCode::InsufficientMeshResolution, "too few interior samples for an affine fit");
  const Eigen::MatrixXd a = affine_design(cs.xi);
  Eigen::VectorXd d(a.rows());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    d[r] = cs.log_det[static_cast<std::size_t>(r)] - cs.exponent[static_cast<std::size_t>(r)];
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(d);
  AffineNormalization out;
  out.slope = 0.5 * coef.tail(n);
  out.constant = 0.5 * (coef[0] + b.dot(out.slope));
  out.residual_before = relative_defect(cs);
  PotentialGrid fixed = phi;
  for (std::size_t k = 0; k < fixed.size(); ++k)
    if (fixed.present(k)) fixed[k] -= out.slope.dot(phi.point(k)) + out.constant;
  out.residual_after = complex_side_residual(fixed, b, band_cells);
  return out;
}

std::vector<FacetNormalization> boundary_normalization_check(const PotentialGrid& u, const Polyhedron& p,
                                                             double band_lo, double band_hi) {
  if (p.dim() != u.dim()) throw Error(ErrorCode::InvalidInput, "polyhedron and grid dimensions differ");
  const auto n = static_cast<Eigen::Index>(u.dim());
  const ResidualField field = rho(u, Eigen::VectorXd::Zero(n), RhoOptions{1, p});
  double h = 0.0;
  for (const auto& ax : u.axes()) h = std::max(h, ax.step());
  const Potential up = facet_log_potential(p);
  std::vector<double> v(u.size(), kNaN);
  for (std::size_t k = 0; k < u.size(); ++k)
    if (u.present(k)) v[k] = u[k] - up(u.point(k));

  std::vector<FacetNormalization> out;
  for (std::size_t i = 0; i < p.num_facets(); ++i) {
    FacetNormalization fr;
    fr.facet = i;
    fr.expected = 1.0 - to_double(p.offsets()[i]);
    std::vector<Eigen::VectorXd> pts;
    std::vector<double> logs, vals;
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (!field.rho.present(k)) continue;
      const Eigen::VectorXd x = u.point(k);
      bool keep = true;
      double s_i = 0.0;
      for (std::size_t j = 0; j < p.num_facets() && keep; ++j) {
        const Eigen::VectorXd nu = to_eigen(p.normals()[j]);
        const double s = nu.dot(x) + to_double(p.offsets()[j]);
        const double d = s / nu.norm();
        if (j == i) {
          s_i = s;
          keep = d >= band_lo * h && d <= band_hi * h;
        } else {
          keep = d > band_hi * h;
        }
      }
      if (!keep) continue;
      pts.push_back(x);
      logs.push_back(std::log(s_i));
      vals.push_back(field.rho[k]);
      for (std::size_t a = 0; a < u.dim(); ++a) {
        const std::size_t sa = u.stride(a);
        const auto idx = u.unflatten(k);
        if (idx[a] == 0 || idx[a] + 1 >= u.axes()[a].count) continue;
        if (std::isnan(v[k + sa]) || std::isnan(v[k - sa])) continue;
        const double ha = u.axes()[a].step();
        fr.smooth_proxy = std::max(fr.smooth_proxy, std::abs(v[k + sa] - 2 * v[k] + v[k - sa]) / (ha * ha));
      }
    }
    fr.samples = pts.size();
    if (fr.samples < static_cast<std::size_t>(n + 3))
      throw Error(ErrorCode::InsufficientMeshResolution,
                  "facet " + std::to_string(i) + " has " + std::to_string(fr.samples) + " samples in the fitting band");
    Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), n + 2);
    Eigen::VectorXd y(a.rows());
    for (std::size_t r = 0; r < pts.size(); ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      a(ri, 0) = logs[r];
      a(ri, 1) = 1.0;
      a.row(ri).tail(n) = pts[r].transpose();
      y[ri] = vals[r];
    }
    fr.log_coefficient = a.colPivHouseholderQr().solve(y)[0];
    out.push_back(fr);
  }
  return out;
}

SolutionComparison compare_solutions(const PotentialGrid& u0, const PotentialGrid& u1) {
  if (u0.axes() != u1.axes()) throw Error(ErrorCode::InvalidInput, "grids do not share a mesh");
  const auto n = static_cast<Eigen::Index>(u0.dim());
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> diff;
  for (std::size_t k = 0; k < u0.size(); ++k) {
    if (!u0.present(k) || !u1.present(k)) continue;
    pts.push_back(u0.point(k));
    diff.push_back(u1[k] - u0[k]);
  }
  if (pts.size() < static_cast<std::size_t>(n + 1))
    throw Error(ErrorCode::InsufficientMeshResolution, "too few common samples for an affine fit");
  const Eigen::MatrixXd a = affine_design(pts);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(diff.data(), static_cast<Eigen::Index>(diff.size()));
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
  SolutionComparison out;
  out.constant = coef[0];
  out.slope = coef.tail(n);
  out.samples = pts.size();
  out.residual = (a * coef - y).cwiseAbs().maxCoeff();
  return out;
}

namespace {

void check_futaki(const FutakiParams& p) {
  if (p.n < 2) throw Error(ErrorCode::InvalidParams, "n must be at least 2");
  if (!(p.kappa > 2.0)) throw Error(ErrorCode::InvalidParams, "kappa must exceed 2");
  if (!(p.mu > 0.0)) throw Error(ErrorCode::InvalidParams, "mu must be positive");
}

// phi = sum_j c_j (1 + tau)^{p_j}; the linear term is listed first.
struct FutakiTerms {
  std::vector<double> coef;
  std::vector<int> power;
};

FutakiTerms futaki_terms(const FutakiParams& p) {
  FutakiTerms t;
  t.coef.push_back((p.kappa - 2.0) / p.mu);
  t.power.push_back(1);
  const double a = (p.kappa - 2.0 - p.kappa / p.n) / std::pow(p.mu, p.n + 1);
  for (int j = 0; j < p.n; ++j) {
    t.coef.push_back(a * std::exp(std::lgamma(p.n + 1.0) - std::lgamma(j + 1.0)) * std::pow(p.mu, j));
    t.power.push_back(j - (p.n - 1));
  }
  return t;
}

double falling(int p, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= p - i;
  return r;
}

double eval_terms(const FutakiTerms& t, double tau, int derivative) {
  double s = 0.0;
  for (std::size_t j = 0; j < t.coef.size(); ++j)
    s += t.coef[j] * falling(t.power[j], derivative) * std::pow(1.0 + tau, t.power[j] - derivative);
  return s;
}

double log_slope(double t1, double f1, double t2, double f2) {
  return (std::log(std::abs(f2)) - std::log(std::abs(f1))) / (std::log1p(t2) - std::log1p(t1));
}

}  // namespace

double futaki_phi(const FutakiParams& p, double tau, int derivative) {
  check_futaki(p);
  if (derivative < 0 || derivative > 2) throw Error(ErrorCode::InvalidInput, "derivative order must be 0, 1 or 2");
  return eval_terms(futaki_terms(p), tau, derivative);
}

double solve_futaki_mu(int n, double kappa) {
  check_futaki({n, kappa, 1.0});
  auto phi0 = [&](double mu) { return eval_terms(futaki_terms({n, kappa, mu}), 0.0, 0); };
  double lo = 1e-3;
  double flo = phi0(lo);
  for (double hi = lo * 1.1; hi < 1e3; hi *= 1.1) {
    const double fhi = phi0(hi);
    if (flo == 0.0) return lo;
    if (std::signbit(flo) != std::signbit(fhi)) {
      boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
      const auto r = boost::math::tools::bisect(phi0, lo, hi, tol);
      const double a = std::abs(phi0(r.first)), b = std::abs(phi0(r.second));
      return a <= b ? r.first : r.second;
    }
    lo = hi;
    flo = fhi;
  }
  throw Error(ErrorCode::InvalidParams, "phi(0) has no root for mu in [1e-3, 1e3]");
}

FutakiProfile futaki_profile(const FutakiParams& p, double tau_max, std::size_t samples) {
  check_futaki(p);
  if (!(tau_max > 1.0) || samples < 4) throw Error(ErrorCode::InvalidInput, "need tau_max > 1 and at least 4 samples");
  const FutakiTerms t = futaki_terms(p);
  const int n = p.n;
  auto ricci = [&](double tau, double& rt, double& rtt) {
    const double s = 1.0 + tau;
    const double phi = eval_terms(t, tau, 0);
    const double d1 = eval_terms(t, tau, 1);
    const double d2 = eval_terms(t, tau, 2);
    // phi' (1 + tau) - phi termwise, so the linear part cancels exactly.
    double w = 0.0;
    for (std::size_t j = 0; j < t.coef.size(); ++j) w += (t.power[j] - 1) * t.coef[j] * std::pow(s, t.power[j]);
    rt = p.kappa - ((n - 1) * phi / s + d1);
    rtt = -((n - 1) * w / (s * s) + d2);
    return std::sqrt((n - 1) * (rt / s) * (rt / s) + (rtt / phi) * (rtt / phi));
  };

  FutakiProfile out;
  out.params = p;
  out.phi0 = eval_terms(t, 0.0, 0);
  out.leading_coefficient = t.coef[0];
  out.min_phi = std::numeric_limits<double>::infinity();
  const std::size_t lin = samples / 4;
  for (std::size_t i = 0; i < samples; ++i) {
    double tau;
    if (i < lin)
      tau = static_cast<double>(i) / static_cast<double>(lin);
    else
      tau = std::pow(tau_max, static_cast<double>(i - lin) / static_cast<double>(samples - lin - 1));
    double rt = 0.0, rtt = 0.0;
    out.tau.push_back(tau);
    out.phi.push_back(eval_terms(t, tau, 0));
    out.dphi.push_back(eval_terms(t, tau, 1));
    out.ddphi.push_back(eval_terms(t, tau, 2));
    const double ratio = ricci(tau, rt, rtt);
    out.ricci_t.push_back(rt);
    out.ricci_tt.push_back(rtt);
    out.ratio.push_back(ratio);
    if (tau > 0.0) out.min_phi = std::min(out.min_phi, out.phi.back());
  }
  const double t1 = tau_max / 10.0, t2 = tau_max;
  for (int d = 0; d < 3; ++d)
    out.orders[static_cast<std::size_t>(d)] = log_slope(t1, eval_terms(t, t1, d), t2, eval_terms(t, t2, d));
  double a = 0.0, b = 0.0;
  out.ricci_ratio_order = log_slope(t1, ricci(t1, a, b), t2, ricci(t2, a, b));
  return out;
}

}  // namespace toric
