#include "toric/exp_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <Eigen/LU>

#include "toric/error.hpp"
#include "toric/parallel.hpp"

namespace toric {

std::string_view to_string(IntegralMethod m) {
  switch (m) {
    case IntegralMethod::Brion: return "brion";
    case IntegralMethod::Triangulated: return "triangulated";
    case IntegralMethod::Quadrature: return "quadrature";
  }
  return "unknown";
}

// ---------------------------------------------------------------- divided differences

namespace {

constexpr double kDegenerateEdge = 1e-8;
constexpr double kMaxCancellation = 1e5;

// e^{-lo} * sum_m (-1)^{m+k} h_m(s) / (m+k)!, s = nodes - lo in [0, 1].
double dd_series(const double* t, std::size_t count) {
  const std::size_t k = count - 1;
  const double lo = t[0];
  constexpr std::size_t kTerms = 30;
  double h[kTerms + 1] = {1.0};
  for (std::size_t i = 0; i < count; ++i) {
    const double s = t[i] - lo;
    for (std::size_t m = 1; m <= kTerms; ++m) h[m] += s * h[m - 1];
  }
  double sum = 0.0;
  for (std::size_t m = kTerms + 1; m-- > 0;) {
    const double term = h[m] / boost::math::factorial<double>(static_cast<unsigned>(m + k));
    sum += ((m + k) % 2 == 0) ? term : -term;
  }
  return std::exp(-lo) * sum;
}

class DividedDifference {
 public:
  explicit DividedDifference(std::vector<double> nodes) : t_(std::move(nodes)) {
    std::sort(t_.begin(), t_.end());
    memo_.assign(t_.size() * t_.size(), std::numeric_limits<double>::quiet_NaN());
  }

  double operator()() { return get(0, t_.size() - 1); }

 private:
  double get(std::size_t lo, std::size_t hi) {
    double& slot = memo_[lo * t_.size() + hi];
    if (!std::isnan(slot)) return slot;
    const double spread = t_[hi] - t_[lo];
    if (spread <= 1.0)
      slot = dd_series(t_.data() + lo, hi - lo + 1);
    else
      slot = (get(lo + 1, hi) - get(lo, hi - 1)) / spread;
    return slot;
  }

  std::vector<double> t_;
  std::vector<double> memo_;
};

}  // namespace

double exp_divided_difference(std::span<const double> nodes) {
  if (nodes.empty()) throw Error(ErrorCode::InvalidInput, "divided difference of zero nodes");
  return DividedDifference(std::vector<double>(nodes.begin(), nodes.end()))();
}

// ---------------------------------------------------------------- ExpIntegrator

ExpIntegrator::ExpIntegrator(const Polyhedron& p) : p_(p) {
  const auto vs = vertices(p_);
  if (vs.empty()) throw Error(ErrorCode::NotPointed, "exponential integrals need a pointed polyhedron");
  const auto n = static_cast<Eigen::Index>(p_.dim());
  const Cone rec = recession_cone(p_);
  for (const auto& g : rec.generators()) rays_.push_back(to_eigen(g));
  for (const auto& v : vs) {
    VertexCone c;
    c.point = to_eigen(v.point);
    c.simple = v.edges.size() == p_.dim();
    all_simple_ = all_simple_ && c.simple;
    if (c.simple) {
      c.edges.resize(n, n);
      for (Eigen::Index j = 0; j < n; ++j) c.edges.col(j) = to_eigen(v.edges[static_cast<std::size_t>(j)]);
      c.abs_det = std::abs(c.edges.determinant());
    }
    cones_.push_back(std::move(c));
  }
  for (const auto& cell : triangulate(p_)) {
    Cell c;
    c.points.resize(n, static_cast<Eigen::Index>(cell.points.size()));
    c.rays.resize(n, static_cast<Eigen::Index>(cell.rays.size()));
    for (std::size_t i = 0; i < cell.points.size(); ++i) c.points.col(static_cast<Eigen::Index>(i)) = to_eigen(cell.points[i]);
    for (std::size_t j = 0; j < cell.rays.size(); ++j) c.rays.col(static_cast<Eigen::Index>(j)) = to_eigen(cell.rays[j]);
    c.volume_factor = to_double(cell.volume_factor);
    cells_.push_back(std::move(c));
  }
}

bool ExpIntegrator::in_domain(const Eigen::VectorXd& b) const {
  if (static_cast<std::size_t>(b.size()) != p_.dim() || !b.allFinite()) return false;
  return std::all_of(rays_.begin(), rays_.end(), [&](const Eigen::VectorXd& g) { return b.dot(g) > 0.0; });
}

void ExpIntegrator::check_domain(const Eigen::VectorXd& b) const {
  if (static_cast<std::size_t>(b.size()) != p_.dim())
    throw Error(ErrorCode::InvalidInput, "exponent has wrong dimension");
  if (!in_domain(b))
    throw Error(ErrorCode::DomainViolation, "b is not in the interior of the dual recession cone; the integral diverges");
}

ExpMoments ExpIntegrator::moments(const Eigen::VectorXd& b, int order) const {
  check_domain(b);
  if (auto r = brion(b, order)) return *r;
  return triangulated(b, order);
}

std::optional<ExpMoments> ExpIntegrator::brion(const Eigen::VectorXd& b, int order) const {
  check_domain(b);
  const double bn = b.norm();
  if (!all_simple_ || bn == 0.0) return std::nullopt;
  const auto n = static_cast<Eigen::Index>(p_.dim());

  CompensatedSum value;
  double abs_value = 0.0, abs_first = 0.0, abs_second = 0.0, vmax = 0.0;
  ExpMoments out;
  out.method = IntegralMethod::Brion;
  if (order >= 1) out.first = Eigen::VectorXd::Zero(n);
  if (order >= 2) out.second = Eigen::MatrixXd::Zero(n, n);

  for (const auto& c : cones_) {
    const Eigen::VectorXd q = c.edges.transpose() * b;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(q[j]) < kDegenerateEdge * bn * c.edges.col(j).norm()) return std::nullopt;
    const double t = std::exp(-b.dot(c.point)) * c.abs_det / q.prod();
    value.add(t);
    abs_value += std::abs(t);
    vmax = std::max(vmax, c.point.norm());
    if (order >= 1) {
      const Eigen::VectorXd m = c.point + c.edges * q.cwiseInverse();
      out.first += t * m;
      abs_first += std::abs(t) * m.norm();
      if (order >= 2) {
        Eigen::MatrixXd s = m * m.transpose();
        for (Eigen::Index j = 0; j < n; ++j) s += c.edges.col(j) * c.edges.col(j).transpose() / (q[j] * q[j]);
        out.second += t * s;
        abs_second += std::abs(t) * s.norm();
      }
    }
  }
  out.value = value.value();
  const double scale = std::abs(out.value);
  const double len = 1.0 + vmax;
  if (!(abs_value <= kMaxCancellation * scale) || !(abs_first <= kMaxCancellation * scale * len) ||
      !(abs_second <= kMaxCancellation * scale * len * len))
    return std::nullopt;
  return out;
}

ExpMoments ExpIntegrator::triangulated(const Eigen::VectorXd& b, int order) const {
  check_domain(b);
  const auto n = static_cast<Eigen::Index>(p_.dim());
  ExpMoments out;
  out.method = IntegralMethod::Triangulated;
  if (order >= 1) out.first = Eigen::VectorXd::Zero(n);
  if (order >= 2) out.second = Eigen::MatrixXd::Zero(n, n);
  CompensatedSum value;

  for (const auto& c : cells_) {
    const Eigen::Index np = c.points.cols();
    const Eigen::VectorXd t = c.points.transpose() * b;
    const Eigen::VectorXd q = c.rays.transpose() * b;
    const double sign = (np - 1) % 2 == 0 ? 1.0 : -1.0;
    const double qprod = q.size() ? q.cwiseInverse().prod() : 1.0;
    const double scale = c.volume_factor * sign;

    std::vector<double> nodes(t.data(), t.data() + np);
    const double g = DividedDifference(nodes)();
    value.add(scale * g * qprod);
    if (order < 1) continue;

    // Node derivatives: d/dt_i repeats node i; d2/dt_i^2 carries a factor 2.
    auto with = [&](std::initializer_list<Eigen::Index> extra) {
      std::vector<double> ns = nodes;
      for (auto i : extra) ns.push_back(t[i]);
      return DividedDifference(std::move(ns))();
    };
    Eigen::VectorXd dg = Eigen::VectorXd::Zero(n);
    std::vector<double> gi(static_cast<std::size_t>(np));
    for (Eigen::Index i = 0; i < np; ++i) {
      gi[static_cast<std::size_t>(i)] = with({i});
      dg += gi[static_cast<std::size_t>(i)] * c.points.col(i);
    }
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < q.size(); ++j) s += c.rays.col(j) / q[j];
    const Eigen::VectorXd dq = -qprod * s;
    out.first -= scale * (dg * qprod + g * dq);
    if (order < 2) continue;

    Eigen::MatrixXd d2g = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < np; ++i) {
      for (Eigen::Index l = i; l < np; ++l) {
        const double gil = i == l ? 2.0 * with({i, i}) : with({i, l});
        Eigen::MatrixXd outer = c.points.col(i) * c.points.col(l).transpose();
        if (i != l) outer += outer.transpose().eval();
        d2g += gil * outer;
      }
    }
    Eigen::MatrixXd d2q = s * s.transpose();
    for (Eigen::Index j = 0; j < q.size(); ++j) d2q += c.rays.col(j) * c.rays.col(j).transpose() / (q[j] * q[j]);
    d2q *= qprod;
    out.second += scale * (d2g * qprod + dg * dq.transpose() + dq * dg.transpose() + g * d2q);
  }
  out.value = value.value();
  return out;
}

double integrate_exp(const Polyhedron& p, const Eigen::VectorXd& b, IntegralMethod* method) {
  auto m = ExpIntegrator(p).moments(b, 0);
  if (method) *method = m.method;
  return m.value;
}

ExpMoments integrate_exp_moments(const Polyhedron& p, const Eigen::VectorXd& b) {
  return ExpIntegrator(p).moments(b, 2);
}

// ---------------------------------------------------------------- tails

GrowthCertificate linear_growth_certificate(const Polyhedron& p, const Eigen::VectorXd& b) {
  ExpIntegrator ei(p);
  if (!ei.in_domain(b)) throw Error(ErrorCode::NonIntegrable, "linear weight does not grow along the recession cone");
  double c1 = std::numeric_limits<double>::infinity();
  for (const auto& g : ei.recession_rays()) c1 = std::min(c1, b.dot(g) / g.norm());
  if (ei.bounded()) c1 = 0.0;
  double vmax = 0.0, amin = std::numeric_limits<double>::infinity();
  for (const auto& v : vertices(p)) {
    const Eigen::VectorXd x = to_eigen(v.point);
    vmax = std::max(vmax, x.norm());
    amin = std::min(amin, b.dot(x));
  }
  return {c1, c1 * vmax - amin};
}

double tail_bound(std::size_t dim, const GrowthCertificate& cert, const PolynomialBound& g, double r) {
  if (!(cert.c1 > 0.0)) throw Error(ErrorCode::NonIntegrable, "growth rate c1 must be positive");
  if (r < 1.0) throw Error(ErrorCode::InvalidInput, "tail bound needs radius >= 1");
  const double n = static_cast<double>(dim);
  const double k = static_cast<double>(g.degree);
  const double sphere = 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
  const double a = n + k;
  // log of the bound, to stay finite for large constants.
  const double log_gamma_tail = std::log(boost::math::tgamma(a, cert.c1 * r));
  const double lb = std::log(g.constant) + cert.c2 + std::log(sphere) + k * std::log(2.0) + log_gamma_tail -
                    a * std::log(cert.c1);
  return std::exp(lb);
}

double truncation_radius(std::size_t dim, const GrowthCertificate& cert, const PolynomialBound& g, double tol) {
  for (double r = 1.0; r <= 1e12; r *= 2.0)
    if (tail_bound(dim, cert, g, r) <= tol) return r;
  throw Error(ErrorCode::NonIntegrable, "tail bound cannot be brought below the tolerance");
}

TruncatedDomain truncate_domain(const Polyhedron& p, const std::optional<GrowthCertificate>& cert,
                                const PolynomialBound& g_bound, double truncation_tol) {
  if (recession_cone(p).is_trivial()) return {p, 0.0, 0.0};
  if (!cert) throw Error(ErrorCode::NoTailBound, "unbounded domain needs a growth certificate");
  double r = truncation_radius(p.dim(), *cert, g_bound, truncation_tol);
  double vmax = 0.0;
  for (const auto& v : vertices(p)) vmax = std::max(vmax, to_eigen(v.point).lpNorm<Eigen::Infinity>());
  while (r < 2.0 * vmax + 1.0) r *= 2.0;
  const double tail = tail_bound(p.dim(), *cert, g_bound, r);
  return {clip_to_box(p, Rational(static_cast<long long>(r))), r, tail};
}

// ---------------------------------------------------------------- quadrature mesh

namespace {

template <unsigned N>
std::vector<std::pair<double, double>> unit_gauss() {
  using G = boost::math::quadrature::gauss<double, N>;
  std::vector<std::pair<double, double>> out;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.emplace_back(0.5 * (1.0 + x[i]), 0.5 * w[i]);
    if (x[i] != 0.0) out.emplace_back(0.5 * (1.0 - x[i]), 0.5 * w[i]);
  }
  return out;
}

std::vector<std::pair<double, double>> unit_gauss(int points) {
  switch (points) {
    case 3: return unit_gauss<3>();
    case 4: return unit_gauss<4>();
    case 5: return unit_gauss<5>();
    case 6: return unit_gauss<6>();
    case 7: return unit_gauss<7>();
    case 8: return unit_gauss<8>();
    case 10: return unit_gauss<10>();
    case 12: return unit_gauss<12>();
    default: throw Error(ErrorCode::InvalidInput, "unsupported quadrature order");
  }
}

// Collapsed (Duffy) product rule on the unit simplex, weights scaled by n!
// so that they sum to one.
void simplex_rule(std::size_t n, int points, Eigen::MatrixXd& pts, Eigen::VectorXd& wts) {
  const auto g = unit_gauss(points);
  const std::size_t m = g.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= m;
  pts.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(total));
  wts.resize(static_cast<Eigen::Index>(total));
  const double nfact = boost::math::factorial<double>(static_cast<unsigned>(n));
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rem = p;
    for (std::size_t i = 0; i < n; ++i) {
      idx[i] = rem % m;
      rem /= m;
    }
    double remaining = 1.0, w = nfact;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [u, wu] = g[idx[i]];
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = remaining * u;
      w *= wu * std::pow(1.0 - u, static_cast<double>(n - i - 1));
      remaining *= 1.0 - u;
    }
    wts[static_cast<Eigen::Index>(p)] = w;
  }
}

}  // namespace

QuadratureMesh::QuadratureMesh(const Polyhedron& bounded, const QuadratureOptions& opts)
    : dim_(bounded.dim()), opts_(opts) {
  simplex_rule(dim_, opts_.points_per_axis, ref_points_, ref_weights_);
  simplex_rule(dim_, std::max(3, opts_.points_per_axis - 3), ref_points_low_, ref_weights_low_);
  const double nfact = boost::math::factorial<double>(static_cast<unsigned>(dim_));
  for (const auto& cell : triangulate(bounded)) {
    if (!cell.rays.empty()) throw Error(ErrorCode::InvalidInput, "quadrature mesh needs a bounded domain");
    Simplex s;
    s.v.resize(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(cell.points.size()));
    for (std::size_t i = 0; i < cell.points.size(); ++i) s.v.col(static_cast<Eigen::Index>(i)) = to_eigen(cell.points[i]);
    s.volume = to_double(cell.volume_factor) / nfact;
    cells_.push_back(std::move(s));
  }
  // Longest-edge pre-refinement to the requested edge length.
  if (std::isfinite(opts_.max_initial_edge)) {
    std::vector<Simplex> done, todo = std::move(cells_);
    while (!todo.empty()) {
      Simplex s = std::move(todo.back());
      todo.pop_back();
      double best = 0;
      Eigen::Index bi = 0, bj = 1;
      for (Eigen::Index i = 0; i < s.v.cols(); ++i)
        for (Eigen::Index j = i + 1; j < s.v.cols(); ++j)
          if (double d = (s.v.col(i) - s.v.col(j)).norm(); d > best) {
            best = d;
            bi = i;
            bj = j;
          }
      if (best <= opts_.max_initial_edge) {
        done.push_back(std::move(s));
        continue;
      }
      const Eigen::VectorXd mid = 0.5 * (s.v.col(bi) + s.v.col(bj));
      Simplex a = s, b = s;
      a.v.col(bi) = mid;
      b.v.col(bj) = mid;
      a.volume = b.volume = 0.5 * s.volume;
      todo.push_back(std::move(a));
      todo.push_back(std::move(b));
    }
    cells_ = std::move(done);
  }
}

double QuadratureMesh::cell_integral(const Simplex& s, const ScalarField& f, bool low) const {
  const Eigen::MatrixXd& ref = low ? ref_points_low_ : ref_points_;
  const Eigen::VectorXd& w = low ? ref_weights_low_ : ref_weights_;
  const Eigen::MatrixXd edges = s.v.rightCols(s.v.cols() - 1).colwise() - s.v.col(0);
  CompensatedSum acc;
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim_));
  for (Eigen::Index p = 0; p < ref.cols(); ++p) {
    x.noalias() = s.v.col(0) + edges * ref.col(p);
    acc.add(w[p] * f(x));
  }
  return s.volume * acc.value();
}

void QuadratureMesh::adapt(const std::vector<ScalarField>& integrands) {
  auto error_of = [&](const Simplex& s) {
    double e = 0.0;
    for (const auto& f : integrands) {
      const double d = std::abs(cell_integral(s, f, false) - cell_integral(s, f, true));
      e = std::max(e, std::isfinite(d) ? d : std::numeric_limits<double>::infinity());
    }
    return e;
  };
  std::vector<double> err(cells_.size());
  parallel_for(cells_.size(), [&](std::size_t i) { err[i] = error_of(cells_[i]); });
  std::priority_queue<std::pair<double, std::size_t>> heap;
  double total = 0.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    heap.emplace(err[i], i);
    total += err[i];
  }
  while (total > opts_.tol && cells_.size() < opts_.max_cells && !heap.empty()) {
    const auto [e, i] = heap.top();
    heap.pop();
    Simplex s = cells_[i];
    double best = 0;
    Eigen::Index bi = 0, bj = 1;
    for (Eigen::Index a = 0; a < s.v.cols(); ++a)
      for (Eigen::Index c = a + 1; c < s.v.cols(); ++c)
        if (double d = (s.v.col(a) - s.v.col(c)).norm(); d > best) {
          best = d;
          bi = a;
          bj = c;
        }
    const Eigen::VectorXd mid = 0.5 * (s.v.col(bi) + s.v.col(bj));
    Simplex a = s, b = s;
    a.v.col(bi) = mid;
    b.v.col(bj) = mid;
    a.volume = b.volume = 0.5 * s.volume;
    const double ea = error_of(a), eb = error_of(b);
    total += ea + eb - e;
    cells_[i] = std::move(a);
    cells_.push_back(std::move(b));
    heap.emplace(ea, i);
    heap.emplace(eb, cells_.size() - 1);
  }
}

double QuadratureMesh::integrate(const ScalarField& f) const {
  std::vector<double> parts(cells_.size());
  parallel_for(cells_.size(), [&](std::size_t i) { parts[i] = cell_integral(cells_[i], f, false); });
  CompensatedSum acc;
  for (double v : parts) acc.add(v);
  return acc.value();
}

double QuadratureMesh::integrate_low(const ScalarField& f) const {
  std::vector<double> parts(cells_.size());
  parallel_for(cells_.size(), [&](std::size_t i) { parts[i] = cell_integral(cells_[i], f, true); });
  CompensatedSum acc;
  for (double v : parts) acc.add(v);
  return acc.value();
}

WeightedResult integrate_weighted(const Polyhedron& p, const ScalarField& a, const ScalarField& g,
                                  const std::optional<GrowthCertificate>& cert, const PolynomialBound& g_bound,
                                  const WeightedOptions& opts) {
  const auto dom = truncate_domain(p, cert, g_bound, opts.truncation_tol);
  QuadratureOptions qo = opts.quadrature;
  if (dom.radius > 0.0) qo.max_initial_edge = std::max(4.0 / cert->c1, dom.radius / 16.0);
  QuadratureMesh mesh(dom.region, qo);
  const ScalarField f = [&](const Eigen::VectorXd& x) { return g(x) * std::exp(-a(x)); };
  mesh.adapt({f});
  WeightedResult r;
  r.value = mesh.integrate(f);
  r.error_estimate = std::abs(r.value - mesh.integrate_low(f)) + dom.tail;
  r.radius = dom.radius;
  r.tail_bound = dom.tail;
  r.cells = mesh.num_cells();
  if (!std::isfinite(r.value)) throw Error(ErrorCode::NonIntegrable, "integrand is not finite on the domain");
  return r;
}

// ---------------------------------------------------------------- Monte Carlo

MonteCarloMoment monte_carlo_first_moment(const Polyhedron& p, const Eigen::VectorXd& b, std::size_t samples,
                                          std::uint64_t seed) {
  const std::size_t n = p.dim();
  // Smallest-mass simplicial cone cut out by n facets whose edges all pair
  // positively with b; P lies inside it.
  double best_weight = std::numeric_limits<double>::infinity();
  Eigen::VectorXd apex, q;
  Eigen::MatrixXd edges;
  std::vector<std::size_t> idx(n);
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      Eigen::MatrixXd nm(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
      for (std::size_t r = 0; r < n; ++r) {
        nm.row(static_cast<Eigen::Index>(r)) = to_eigen(p.normals()[idx[r]]).transpose();
        rhs[static_cast<Eigen::Index>(r)] = -to_double(p.offsets()[idx[r]]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(nm);
      if (!lu.isInvertible()) return;
      Eigen::MatrixXd e = lu.inverse();
      Eigen::VectorXd qq = e.transpose() * b;
      if ((qq.array() <= 0.0).any()) return;
      Eigen::VectorXd x0 = lu.solve(rhs);
      const double w = std::abs(e.determinant()) * std::exp(-b.dot(x0)) / qq.prod();
      if (w < best_weight) {
        best_weight = w;
        apex = x0;
        q = qq;
        edges = e;
      }
      return;
    }
    for (std::size_t i = start; i < p.num_facets(); ++i) {
      idx[depth] = i;
      choose(i + 1, depth + 1);
    }
  };
  choose(0, 0);
  if (!std::isfinite(best_weight))
    throw Error(ErrorCode::DomainViolation, "no simplicial facet cone admits exponential sampling for this b");

  std::mt19937_64 rng(seed);
  std::vector<std::exponential_distribution<double>> dists;
  for (Eigen::Index j = 0; j < q.size(); ++j) dists.emplace_back(q[j]);
  const auto dn = static_cast<Eigen::Index>(n);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dn), sumsq = Eigen::VectorXd::Zero(dn), s(dn);
  for (std::size_t k = 0; k < samples; ++k) {
    for (Eigen::Index j = 0; j < dn; ++j) s[j] = dists[static_cast<std::size_t>(j)](rng);
    const Eigen::VectorXd x = apex + edges * s;
    if (!p.contains(x, 0.0)) continue;
    const Eigen::VectorXd y = best_weight * x;
    sum += y;
    sumsq += y.cwiseProduct(y);
  }
  const double m = static_cast<double>(samples);
  MonteCarloMoment out;
  out.samples = samples;
  out.mean = sum / m;
  out.std_error = ((sumsq / m - out.mean.cwiseProduct(out.mean)).cwiseMax(0.0) / (m - 1.0)).cwiseSqrt();
  return out;
}

}  // namespace toric
