#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "toric/error.hpp"
#include "toric/soliton.hpp"

using namespace toric;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<Rational> ones(std::size_t n) { return std::vector<Rational>(n, Rational(1)); }

const Polyhedron kInterval = Polyhedron::make({{1}, {-1}}, ones(2));
const Polyhedron kHalfLine = Polyhedron::make({{1}}, ones(1));
const Polyhedron kCylinder = Polyhedron::make({{1, 0}, {-1, 0}, {0, 1}}, ones(3));

// Closed forms, written out here independently of the library.
double fs_u(double x) { return 0.5 * ((1 + x) * std::log(1 + x) + (1 - x) * std::log(1 - x)); }
double gauss_u(double x) { return x > -1 ? 0.5 * (x + 1) * std::log(2 * (x + 1)) : 0.0; }
double gauss_phi(double xi) { return std::exp(2 * xi) / (4 * std::numbers::e) - xi; }

Potential fs_potential() {
  return Potential(
      1, [](const Eigen::VectorXd& x) { return fs_u(x[0]); },
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return vec({0.5 * std::log((1 + x[0]) / (1 - x[0]))}); },
      [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        return Eigen::MatrixXd::Constant(1, 1, 1.0 / (1 - x[0] * x[0]));
      });
}

Potential gauss_potential() {
  return Potential(
      1, [](const Eigen::VectorXd& x) { return gauss_u(x[0]); },
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return vec({0.5 * std::log(2 * (x[0] + 1)) + 0.5}); },
      [](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return Eigen::MatrixXd::Constant(1, 1, 0.5 / (x[0] + 1)); });
}

PotentialGrid sample(std::vector<GridAxis> axes, const Potential& u, const Polyhedron& p) {
  return PotentialGrid::sample(std::move(axes), PotentialKind::Symplectic, u, p, false);
}

template <typename F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST(Rho, PointwiseClosedForms) {
  for (double x : {-0.8, 0.0, 0.5}) EXPECT_NEAR(rho_at(fs_potential(), vec({x})), 0.0, 1e-14);
  for (double x : {-0.9, 0.0, 3.0}) EXPECT_NEAR(rho_at(gauss_potential(), vec({x})), x, 1e-13);
  const Potential cyl = direct_sum(fs_potential(), gauss_potential());
  EXPECT_NEAR(rho_at(cyl, vec({0.3, 1.7})), 1.7, 1e-13);
  // Quadratic: rho = |x|^2.
  EXPECT_NEAR(rho_at(quadratic_potential(2), vec({0.5, -1.0})), 1.25, 1e-14);
}

TEST(Rho, LegendreSideIdentity) {
  // rho_u(phi'(xi)) = 2 phi(xi) + log phi''(xi).
  for (double xi : {-1.0, 0.2, 1.1}) {
    const double x = std::exp(2 * xi) / (2 * std::numbers::e) - 1;
    const double phi2 = std::exp(2 * xi) / std::numbers::e;
    EXPECT_NEAR(rho_at(gauss_potential(), vec({x})), 2 * gauss_phi(xi) + std::log(phi2), 1e-12);
  }
}

TEST(Rho, MetricSample) {
  const MetricSample m = metric_sample(direct_sum(fs_potential(), gauss_potential()), vec({0.5, 0.0}));
  EXPECT_NEAR(m.hessian_u(0, 0), 1.0 / 0.75, 1e-14);
  EXPECT_NEAR(m.inverse(1, 1), 2.0, 1e-14);
  const Potential concave(1, [](const Eigen::VectorXd& x) { return -x[0] * x[0]; });
  EXPECT_EQ(code_of([&] { metric_sample(concave, vec({0.1})); }), ErrorCode::HessianNotSPD);
}

TEST(Rho, QuadraticGridIsExact) {
  const PotentialGrid u = PotentialGrid::sample(uniform_axes(vec({-1, -1}), vec({1, 1}), 21), PotentialKind::Symplectic,
                                                quadratic_potential(2));
  const ResidualField f = rho(u);
  EXPECT_EQ(f.interior_cells, 15u * 15u);
  EXPECT_EQ(f.excluded_band, 21u * 21u - 15u * 15u);
  for (std::size_t k = 0; k < u.size(); ++k)
    if (f.rho.present(k)) EXPECT_NEAR(f.rho[k], u.point(k).squaredNorm(), 1e-12);
}

TEST(Rho, AffineCovarianceIsExact) {
  const PotentialGrid u = sample({{-1, 1, 101}}, fs_potential(), kInterval);
  PotentialGrid shifted = u, lifted = u;
  for (std::size_t k = 0; k < u.size(); ++k) {
    shifted[k] += 0.75;
    lifted[k] += 1.5 * u.point(k)[0] - 0.25;
  }
  const ResidualField a = rho(u), b = rho(shifted), c = rho(lifted);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!a.rho.present(k)) continue;
    EXPECT_NEAR(b.rho[k], a.rho[k] - 1.5, 1e-10);
    EXPECT_NEAR(c.rho[k], a.rho[k] + 0.5, 1e-10);  // linear part drops, constant -0.25 gives +0.5
  }
}

TEST(Rho, AdditivityOverProducts) {
  const std::vector<GridAxis> axes{{-1, 1, 41}, {-1, 3, 81}};
  const PotentialGrid u = sample(axes, direct_sum(fs_potential(), gauss_potential()), kCylinder);
  const PotentialGrid a = sample({axes[0]}, fs_potential(), kInterval);
  const PotentialGrid b = sample({axes[1]}, gauss_potential(), kHalfLine);
  const ResidualField fu = rho(u), fa = rho(a), fb = rho(b);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!fu.rho.present(k)) continue;
    const auto idx = u.unflatten(k);
    EXPECT_NEAR(fu.rho[k], fa.rho[idx[0]] + fb.rho[idx[1]], 1e-9);
  }
}

TEST(Residual, CatalogSolutionsWithinTruncationModel) {
  struct Case {
    PotentialGrid grid;
    Potential u;
    Eigen::VectorXd b;
  };
  std::vector<Case> cases;
  cases.push_back({sample({{-1, 1, 401}}, fs_potential(), kInterval), fs_potential(), vec({0.0})});
  cases.push_back({sample({{-1, 4, 501}}, gauss_potential(), kHalfLine), gauss_potential(), vec({1.0})});
  const Potential cyl = direct_sum(fs_potential(), gauss_potential());
  cases.push_back({sample({{-1, 1, 101}, {-1, 3, 201}}, cyl, kCylinder), cyl, vec({0.0, 1.0})});
  for (const auto& c : cases) {
    const ResidualField f = rho(c.grid, c.b);
    const double model = residual_truncation_model(c.u, f);
    EXPECT_GT(model, 0.0);
    EXPECT_LE(f.sup_norm, 5 * model);
    EXPECT_GE(f.sup_norm, 0.2 * model);  // the model is not vacuous
  }
}

TEST(Residual, ConvergesAwayFromTheBoundary) {
  // On a fixed subinterval the residual is O(h^2).
  auto err = [](std::size_t n) {
    const PotentialGrid u = sample({{-1, 4, n}}, gauss_potential(), kHalfLine);
    const ResidualField f = rho(u, vec({1.0}));
    double e = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
      if (f.residual.present(k) && u.point(k)[0] > 0.0 && u.point(k)[0] < 3.0) e = std::max(e, std::abs(f.residual[k]));
    return e;
  };
  const double e1 = err(101), e2 = err(201);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
}

TEST(Residual, SingularSubtractionIsExactForGuilleminPotentials) {
  const PotentialGrid u = sample({{-1, 1, 101}}, fs_potential(), kInterval);
  RhoOptions opts;
  opts.singular_reference = kInterval;
  EXPECT_LT(soliton_residual(u, vec({0.0}), opts), 1e-10);
  const PotentialGrid g = sample({{-1, 4, 101}}, gauss_potential(), kHalfLine);
  opts.singular_reference = kHalfLine;
  EXPECT_LT(soliton_residual(g, vec({1.0}), opts), 1e-10);
}

TEST(Residual, NegativeControl) {
  const PotentialGrid u = PotentialGrid::sample({{-2, 2, 201}}, PotentialKind::Symplectic, quadratic_potential(1));
  EXPECT_GE(soliton_residual(u, vec({0.0})), 0.5);
}

TEST(Residual, ConcaveGridReportsSample) {
  const PotentialGrid u = PotentialGrid::sample({{-1, 1, 21}}, PotentialKind::Symplectic,
                                                Potential(1, [](const Eigen::VectorXd& x) { return -x[0] * x[0]; }));
  EXPECT_EQ(code_of([&] { rho(u); }), ErrorCode::HessianNotSPD);
}

TEST(ComplexSide, GaussianSolves) {
  const Potential phi(2, [](const Eigen::VectorXd& y) { return gauss_phi(y[0]) + gauss_phi(y[1]); });
  auto res = [&](std::size_t n) {
    const PotentialGrid g = PotentialGrid::sample(uniform_axes(vec({-2, -2}), vec({1.5, 1.5}), n), PotentialKind::Kahler, phi);
    return complex_side_residual(g, vec({1.0, 1.0}));
  };
  const double r1 = res(81), r2 = res(161);
  EXPECT_LT(r2, 1e-2);
  EXPECT_NEAR(std::log2(r1 / r2), 2.0, 0.1);
}

TEST(ComplexSide, QuadraticIsNotASoliton) {
  const PotentialGrid g = PotentialGrid::sample({{-2, 2, 81}}, PotentialKind::Kahler, quadratic_potential(1));
  const double xmax = 2.0 - 0.05;
  EXPECT_NEAR(complex_side_residual(g, vec({0.0})), 1 - std::exp(-xmax * xmax), 1e-12);
}

TEST(ComplexSide, AffineNormalizationRestoresSolution) {
  const Potential phi(1, [](const Eigen::VectorXd& y) { return gauss_phi(y[0]) + 0.3 * y[0] + 0.2; });
  const PotentialGrid g = PotentialGrid::sample({{-2, 1.5, 141}}, PotentialKind::Kahler, phi);
  const AffineNormalization a = affine_normalize(g, vec({1.0}));
  EXPECT_GT(a.residual_before, 0.3);
  EXPECT_LT(a.residual_after, 1e-3);
  EXPECT_NEAR(a.slope[0], 0.3, 1e-3);
  EXPECT_NEAR(a.constant, 0.2, 1e-3);
}

TEST(BoundaryNormalization, AnticanonicalIntervalHasNoLogTerm) {
  const PotentialGrid u = sample({{-1, 1, 1001}}, fs_potential(), kInterval);
  const auto rep = boundary_normalization_check(u, kInterval);
  ASSERT_EQ(rep.size(), 2u);
  for (const auto& f : rep) {
    EXPECT_LE(std::abs(f.log_coefficient), 0.05);
    EXPECT_EQ(f.expected, 0.0);
    EXPECT_LT(f.smooth_proxy, 1e-6);
    EXPECT_GE(f.samples, 20u);
  }
}

TEST(BoundaryNormalization, MistranslatedIntervalPicksUpLogs) {
  const Polyhedron shifted = Polyhedron::make({{1}, {-1}}, {Rational(2), Rational(0)});
  const PotentialGrid u = sample({{-2, 0, 1001}}, facet_log_potential(shifted), shifted);
  const auto rep = boundary_normalization_check(u, shifted);
  ASSERT_EQ(rep.size(), 2u);
  for (const auto& f : rep) {
    EXPECT_NEAR(f.log_coefficient, f.expected, 0.05);
    EXPECT_GE(std::abs(f.log_coefficient), 0.5);
  }
}

TEST(BoundaryNormalization, BumpDoesNotChangeBoundaryType) {
  const Potential u = fs_potential() + bump(vec({0.0}), 0.4, 0.05);
  const PotentialGrid g = sample({{-1, 1, 1001}}, u, kInterval);
  for (const auto& f : boundary_normalization_check(g, kInterval)) EXPECT_LE(std::abs(f.log_coefficient), 0.05);
}

TEST(BoundaryNormalization, CoarseMeshIsRejected) {
  const PotentialGrid u = sample({{-1, 1, 11}}, fs_potential(), kInterval);
  EXPECT_EQ(code_of([&] { boundary_normalization_check(u, kInterval); }), ErrorCode::InsufficientMeshResolution);
}

TEST(CompareSolutions, RecoversAffineDifference) {
  const Potential cyl = direct_sum(fs_potential(), gauss_potential());
  const std::vector<GridAxis> axes{{-1, 1, 41}, {-1, 3, 81}};
  const PotentialGrid u0 = sample(axes, cyl, kCylinder);
  const PotentialGrid u1 = sample(axes, add_affine(cyl, vec({0.3, -0.7}), 1.25), kCylinder);
  const auto c = compare_solutions(u0, u1);
  EXPECT_NEAR(c.slope[0], 0.3, 1e-10);
  EXPECT_NEAR(c.slope[1], -0.7, 1e-10);
  EXPECT_NEAR(c.constant, 1.25, 1e-10);
  EXPECT_LT(c.residual, 1e-10);
  PotentialGrid u2 = u0;
  for (std::size_t k = 0; k < u2.size(); ++k) u2[k] += u0.point(k).squaredNorm();
  EXPECT_GT(compare_solutions(u0, u2).residual, 0.1);
}

TEST(FutakiProfile, GoldenRatioRoot) {
  // n = 2, kappa = 3: phi(0) = 1/mu - (1 + mu)/mu^3 vanishes at mu^2 = mu + 1.
  const double mu = solve_futaki_mu(2, 3.0);
  EXPECT_NEAR(mu, std::numbers::phi, 1e-12);
  EXPECT_LE(std::abs(futaki_phi({2, 3.0, mu}, 0.0)), 1e-10);
}

TEST(FutakiProfile, ProfileOrders) {
  const FutakiParams p{2, 3.0, solve_futaki_mu(2, 3.0)};
  const FutakiProfile prof = futaki_profile(p);
  EXPECT_NEAR(prof.leading_coefficient, 1.0 / p.mu, 1e-15);
  EXPECT_NEAR(prof.orders[0], 1.0, 0.05);
  EXPECT_NEAR(prof.orders[1], 0.0, 0.05);
  EXPECT_NEAR(prof.orders[2], -3.0, 0.05);
  EXPECT_LE(prof.ricci_ratio_order, -1.0 + 0.05);
  EXPECT_GT(prof.min_phi, 0.0);
  EXPECT_NEAR(prof.phi.back() / prof.tau.back(), prof.leading_coefficient, 1e-3);
}

TEST(FutakiProfile, DerivativesMatchDifferences) {
  const FutakiParams p{3, 4.0, 0.8};
  for (double t : {0.5, 2.0, 10.0}) {
    const double h = 1e-4;
    EXPECT_NEAR(futaki_phi(p, t, 1), (futaki_phi(p, t + h) - futaki_phi(p, t - h)) / (2 * h), 1e-7);
    EXPECT_NEAR(futaki_phi(p, t, 2), (futaki_phi(p, t + h, 1) - futaki_phi(p, t - h, 1)) / (2 * h),
                1e-7 * (1 + std::abs(futaki_phi(p, t, 2))));
  }
}

TEST(FutakiProfile, InvalidParams) {
  EXPECT_EQ(code_of([] { futaki_profile({2, 2.0, 1.0}); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([] { futaki_profile({2, 3.0, -1.0}); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([] { futaki_profile({1, 3.0, 1.0}); }), ErrorCode::InvalidParams);
}
