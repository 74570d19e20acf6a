#include "toric/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "toric/ding.hpp"
#include "toric/error.hpp"
#include "toric/weighted_volume.hpp"

namespace toric {

namespace {

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

// Fubini-Study on [-1, 1]: u = 1/2 ((1+x) log(1+x) + (1-x) log(1-x)), phi = log cosh.
Potential fs_u() {
  return Potential(
      1, [](const Eigen::VectorXd& x) { return 0.5 * ((1 + x[0]) * std::log1p(x[0]) + (1 - x[0]) * std::log1p(-x[0])); },
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return v1(std::atanh(x[0])); },
      [](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return Eigen::MatrixXd::Constant(1, 1, 1 / (1 - x[0] * x[0])); });
}

Potential fs_phi() {
  return Potential(
      1, [](const Eigen::VectorXd& y) { return std::log(std::cosh(y[0])); },
      [](const Eigen::VectorXd& y) -> Eigen::VectorXd { return v1(std::tanh(y[0])); },
      [](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
        return Eigen::MatrixXd::Constant(1, 1, 1 / std::pow(std::cosh(y[0]), 2));
      });
}

// Flat Gaussian on [-1, inf): u = 1/2 (x+1) log(2(x+1)), phi = e^{2 xi} / 4e - xi.
Potential gauss_u() {
  return Potential(
      1, [](const Eigen::VectorXd& x) { return 0.5 * (x[0] + 1) * std::log(2 * (x[0] + 1)); },
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return v1(0.5 * std::log(2 * (x[0] + 1)) + 0.5); },
      [](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return Eigen::MatrixXd::Constant(1, 1, 0.5 / (x[0] + 1)); });
}

Potential gauss_phi() {
  constexpr double e = std::numbers::e;
  return Potential(
      1, [](const Eigen::VectorXd& y) { return std::exp(2 * y[0]) / (4 * e) - y[0]; },
      [](const Eigen::VectorXd& y) -> Eigen::VectorXd { return v1(std::exp(2 * y[0]) / (2 * e) - 1); },
      [](const Eigen::VectorXd& y) -> Eigen::MatrixXd { return Eigen::MatrixXd::Constant(1, 1, std::exp(2 * y[0]) / e); });
}

std::vector<CatalogEntry> build() {
  std::vector<CatalogEntry> out;
  auto entry = [&](std::string name, std::string notes, std::vector<IntVec> rays) -> CatalogEntry& {
    CatalogEntry e;
    e.name = std::move(name);
    e.notes = std::move(notes);
    e.polyhedron = anticanonical_polyhedron(rays);
    e.rays = std::move(rays);
    out.push_back(std::move(e));
    return out.back();
  };

  auto& g1 = entry("gaussian-1d", "flat C; b_P = 1 in closed form", {{1}});
  g1.u = gauss_u();
  g1.phi = gauss_phi();
  g1.expected_b = v1(1.0);
  g1.u_box = {{-1, 4, 501}};
  g1.phi_box = {{-2, 1.5, 141}};

  auto& g2 = entry("gaussian-2d", "flat C^2; b_P = (1, 1) in closed form", {{1, 0}, {0, 1}});
  g2.u = direct_sum(gauss_u(), gauss_u());
  g2.phi = direct_sum(gauss_phi(), gauss_phi());
  g2.expected_b = v2(1.0, 1.0);
  g2.u_box = {{-1, 3, 101}, {-1, 3, 101}};
  g2.phi_box = {{-2, 1.5, 71}, {-2, 1.5, 71}};

  auto& cp1 = entry("cp1", "Fubini-Study on CP^1; b_P = 0 by symmetry", {{1}, {-1}});
  cp1.u = fs_u();
  cp1.phi = fs_phi();
  cp1.expected_b = v1(0.0);
  cp1.u_box = {{-1, 1, 401}};
  cp1.phi_box = {{-4, 4, 161}};

  auto& cyl = entry("cylinder", "CP^1 x C product soliton; b_P = (0, 1)", {{1, 0}, {-1, 0}, {0, 1}});
  cyl.u = direct_sum(fs_u(), gauss_u());
  cyl.phi = direct_sum(fs_phi(), gauss_phi());
  cyl.expected_b = v2(0.0, 1.0);
  cyl.u_box = {{-1, 1, 101}, {-1, 3, 201}};
  cyl.phi_box = {{-3, 3, 121}, {-2, 1.5, 71}};

  entry("o-minus-1",
        "total space of O(-1) over CP^1; b_P = (beta, beta) from the solver with a seeded Monte Carlo check, "
        "no closed form",
        {{1, 0}, {0, 1}, {1, 1}});

  CatalogEntry fut;
  fut.name = "futaki-n2-k3";
  fut.notes = "rational Futaki profile with n = 2, kappa = 3; mu solves phi(0) = 0";
  fut.futaki = FutakiParams{2, 3.0, solve_futaki_mu(2, 3.0)};
  out.push_back(std::move(fut));
  return out;
}

CheckResult check(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value, tol, std::isfinite(value) && value <= tol, std::move(detail)};
}

// Mean of the vertices, pushed one unit along the mean recession direction.
Eigen::VectorXd inner_point(const Polyhedron& p) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.dim()));
  const auto vs = vertices(p);
  for (const auto& v : vs) x += to_eigen(v.point);
  x /= static_cast<double>(vs.size());
  const Cone c = recession_cone(p);
  if (!c.is_trivial()) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(x.size());
    for (const auto& g : c.generators()) r += to_eigen(g).normalized();
    x += r / static_cast<double>(c.generators().size());
  }
  return x;
}

void futaki_checks(const FutakiParams& p, EntryReport& rep) {
  const double mu = solve_futaki_mu(p.n, p.kappa);
  rep.checks.push_back(check("futaki_phi0", std::abs(futaki_phi({p.n, p.kappa, mu}, 0.0)), 1e-10));
  const FutakiProfile prof = futaki_profile(p);
  rep.checks.push_back(check("futaki_order_phi", std::abs(prof.orders[0] - 1.0), 0.05));
  rep.checks.push_back(check("futaki_order_dphi", std::abs(prof.orders[1] - 0.0), 0.05));
  rep.checks.push_back(check("futaki_order_ddphi", std::abs(prof.orders[2] + 3.0), 0.05));
  rep.checks.push_back(check("futaki_ricci_ratio_order", prof.ricci_ratio_order + 1.0, 0.05));
  rep.checks.push_back(check("futaki_min_phi_positive", prof.min_phi > 0 ? 0.0 : 1.0, 0.0));
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = build();
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw Error(ErrorCode::InvalidInput, "unknown catalog entry '" + name + "'");
}

EntryReport run_entry(const CatalogEntry& entry, std::uint64_t seed) {
  EntryReport rep;
  rep.name = entry.name;
  if (entry.futaki) futaki_checks(*entry.futaki, rep);
  if (entry.polyhedron) {
    const Polyhedron& p = *entry.polyhedron;
    const auto n = static_cast<Eigen::Index>(p.dim());
    const DelzantCertificate cert = is_delzant(p);
    rep.checks.push_back(check("delzant", cert.delzant ? 0.0 : 1.0, 0.0, cert.reason));
    rep.checks.push_back(check("anticanonical", anticanonical_polyhedron(entry.rays) == p ? 0.0 : 1.0, 0.0));

    const SolveReport sr = solve_bp(p);
    rep.b_P = sr.b_P;
    rep.checks.push_back(check("solve_bp_converged", sr.converged ? 0.0 : 1.0, 0.0));
    if (entry.expected_b) {
      rep.checks.push_back(check("b_P", (sr.b_P - *entry.expected_b).lpNorm<Eigen::Infinity>(), 1e-6));
    } else {
      // Independent confirmation: int x e^{-<b,x>} by importance sampling is
      // zero within four standard errors.
      const MonteCarloMoment mc = monte_carlo_first_moment(p, sr.b_P, 400000, seed);
      double z = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) z = std::max(z, std::abs(mc.mean[i]) / mc.std_error[i]);
      rep.checks.push_back(check("b_P_monte_carlo_sigma", z, 4.0));
    }
    double pairing = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      pairing = std::max(pairing, std::abs(futaki_pairing(p, sr.b_P, Eigen::VectorXd::Unit(n, i))));
    rep.checks.push_back(check("futaki_pairing", pairing / sr.value, 1e-8));

    const Eigen::VectorXd b = entry.expected_b ? *entry.expected_b : sr.b_P;
    if (entry.u) {
      const PotentialGrid g = PotentialGrid::sample(entry.u_box, PotentialKind::Symplectic, *entry.u, p, false);
      const ResidualField f = rho(g, b);
      const double model = residual_truncation_model(*entry.u, f);
      rep.checks.push_back(check("soliton_residual_over_model", f.sup_norm / model, 5.0));
    }
    if (entry.phi) {
      const PotentialGrid g = PotentialGrid::sample(entry.phi_box, PotentialKind::Kahler, *entry.phi);
      rep.checks.push_back(check("complex_side_residual", complex_side_residual(g, b), 1e-2));
    }

    // Ding invariance for A = <b_P, x>, with u_P standing in when there is no
    // closed-form solution.
    const Potential u = entry.u ? *entry.u : guillemin_potential(p);
    const WeightA a = WeightA::linear(p, b);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd b1(n);
    for (Eigen::Index i = 0; i < n; ++i) b1[i] = unif(rng);
    const double c = unif(rng);
    const Potential shifted = add_affine(u, b1, c);
    const DingEvaluator ev(a, {u, shifted});
    rep.checks.push_back(check("ding_invariance", std::abs(ev.ding(shifted) - ev.ding(u)), 1e-8));

    if (entry.u) {
      const Eigen::VectorXd x0 = inner_point(p);
      const double r = 0.5 * std::min(1.0, p.min_facet_distance(x0));
      const FirstVariationReport fv = first_variation_check(*entry.u, a, bump(x0, r, 0.01 * r * r));
      rep.checks.push_back(check("first_variation_rel", fv.relative_error, 1e-4));
      rep.checks.push_back(check("ding_derivative_at_solution", std::abs(fv.fd_ding), 1e-5));
    }
  }
  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& c) { return c.passed; });
  return rep;
}

}  // namespace toric
