#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "toric/ding.hpp"
#include "toric/error.hpp"
#include "toric/legendre.hpp"

using namespace toric;

namespace {

constexpr double kE = std::numbers::e;

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

double fs_u(double x) { return 0.5 * ((1 + x) * std::log(1 + x) + (1 - x) * std::log(1 - x)); }
double gauss_u(double x) { return 0.5 * (x + 1) * std::log(2 * (x + 1)); }

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

Potential cylinder_potential() { return direct_sum(fs_potential(), gauss_potential()); }

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

TEST(Admissibility, HalfLineUnitWeight) {
  const auto r = check_admissible(WeightA::linear(kHalfLine, vec({1})));
  EXPECT_NEAR(r.volume, kE, 1e-12);
  EXPECT_NEAR(r.first_moments[0], 0.0, 1e-12);
  // int_{-1}^inf (x+1)/2 log(x+1) e^{-x} = e/2 (1 - gamma).
  EXPECT_NEAR(r.up_integral, 0.5 * kE * (1 - std::numbers::egamma), 1e-8);
  EXPECT_TRUE(r.admissible);
}

TEST(Admissibility, UnbalancedWeight) {
  const auto r = check_admissible(WeightA::linear(kHalfLine, vec({2})));
  EXPECT_NEAR(r.volume, kE * kE / 2, 1e-12);
  EXPECT_NEAR(r.first_moments[0], -kE * kE / 4, 1e-12);
  EXPECT_FALSE(r.balanced);
  EXPECT_FALSE(r.admissible);
}

TEST(Admissibility, SymmetricInterval) {
  const auto r = check_admissible(WeightA::linear(kInterval, vec({0})));
  EXPECT_DOUBLE_EQ(r.volume, 2.0);
  EXPECT_TRUE(r.admissible);
  EXPECT_NEAR(r.up_integral, 2 * std::log(2.0) - 1, 1e-9);
}

TEST(Admissibility, GeneralWeightNeedsCertificate) {
  const ScalarField a = [](const Eigen::VectorXd& x) { return x[0]; };
  EXPECT_EQ(code_of([&] { WeightA::general(kHalfLine, a, std::nullopt); }), ErrorCode::NoTailBound);
  EXPECT_EQ(code_of([&] { WeightA::linear(kHalfLine, vec({-1})); }), ErrorCode::NonIntegrable);
  const auto w = WeightA::general(kHalfLine, a, GrowthCertificate{1.0, 1.0});
  EXPECT_NEAR(w.volume(), kE, 1e-9);
  const auto r = check_admissible(w);
  EXPECT_NEAR(r.first_moments[0], 0.0, 1e-9);
  EXPECT_TRUE(r.admissible);
}

TEST(Ding1, ClosedForms) {
  EXPECT_NEAR(ding1(fs_potential(), WeightA::linear(kInterval, vec({0}))), 2.0, 1e-9);
  EXPECT_NEAR(ding1(gauss_potential(), WeightA::linear(kHalfLine, vec({1}))), kE, 1e-9);
  EXPECT_NEAR(ding1(cylinder_potential(), WeightA::linear(kCylinder, vec({0, 1}))), 2 * kE, 1e-8);
}

TEST(Ding1, ConstantShiftScales) {
  const auto a = WeightA::linear(kHalfLine, vec({1}));
  const double c = 0.37;
  const Potential u = gauss_potential();
  EXPECT_NEAR(ding1(add_affine(u, vec({0}), c), a) / ding1(u, a), std::exp(2 * c), 1e-9);
}

TEST(Ding, IntervalValue) {
  // (1/2) int_{-1}^{1} u_P - (1/2) log 2, with int u_P = 2 log 2 - 1.
  const double expected = 0.5 * (2 * std::log(2.0) - 1) - 0.5 * std::log(2.0);
  EXPECT_NEAR(ding(fs_potential(), WeightA::linear(kInterval, vec({0}))), expected, 1e-9);
}

TEST(Ding, HalfLineValueAgainstQuadrature) {
  boost::math::quadrature::exp_sinh<double> q;
  const double pi = q.integrate([](double s) { return s > 0 && s < 700 ? 0.5 * s * std::log(2 * s) * std::exp(1 - s) : 0.0; }, 0.0,
                                std::numeric_limits<double>::infinity());
  EXPECT_NEAR(ding(gauss_potential(), WeightA::linear(kHalfLine, vec({1}))), pi / kE - 0.5, 1e-9);
}

TEST(Ding, AffineInvariance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  struct Case {
    Polyhedron p;
    Eigen::VectorXd b;
    Potential u;
  };
  const std::vector<Case> cases{{kInterval, vec({0}), fs_potential()},
                                {kHalfLine, vec({1}), gauss_potential()},
                                {kCylinder, vec({0, 1}), cylinder_potential()}};
  for (const auto& c : cases) {
    const auto a = WeightA::linear(c.p, c.b);
    const double base = ding(c.u, a);
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXd b1(c.b.size());
      for (Eigen::Index i = 0; i < b1.size(); ++i) b1[i] = d(rng);
      EXPECT_NEAR(ding(add_affine(c.u, b1, 2 * d(rng)), a), base, 1e-8);
    }
  }
}

TEST(Ding, GrowthFit) {
  const auto c = fit_linear_growth(kHalfLine, [](const Eigen::VectorXd& x) { return 3 * x[0]; });
  EXPECT_GT(c.c1, 0.0);
  EXPECT_LE(c.c1, 3.0);
  for (double x : {-1.0, 0.0, 5.0, 300.0}) EXPECT_GE(3 * x, c.c1 * std::abs(x) - c.c2);
  EXPECT_EQ(code_of([] { fit_linear_growth(kHalfLine, [](const Eigen::VectorXd& x) { return -x[0]; }); }),
            ErrorCode::NonIntegrablePotential);
}

TEST(Normalize, ConstantAndIdempotence) {
  const auto a = WeightA::linear(kInterval, vec({0}));
  const Potential u = fs_potential();
  const Potential nu = normalize(u, a);
  const Eigen::VectorXd x = vec({0.3});
  EXPECT_NEAR(nu(x) - u(x), -0.5 * (2 * std::log(2.0) - 1), 1e-10);
  EXPECT_NEAR(normalize(nu, a)(x), nu(x), 1e-12);
  // Arithmetic case: a constant potential with int u = 5 and V_A = 2.
  const Potential five(1, [](const Eigen::VectorXd&) { return 2.5; });
  EXPECT_NEAR(normalize(five, a)(x), 0.0, 1e-12);
  EXPECT_NEAR(DingEvaluator(a, {five}, {}, false).normalization_constant(five), -2.5, 1e-12);
}

TEST(Normalize, GridVersion) {
  const auto a = WeightA::linear(kInterval, vec({0}));
  const auto g = PotentialGrid::sample({{-1, 1, 201}}, PotentialKind::Symplectic, fs_potential(), kInterval, false);
  const auto ng = normalize(g, a);
  EXPECT_NEAR(ng[100] - g[100], -0.5 * (2 * std::log(2.0) - 1), 1e-5);
  const auto nng = normalize(ng, a);
  EXPECT_NEAR(nng[100], ng[100], 1e-12);
}

TEST(Ding1, GridPotentialOfBumpedSolution) {
  const auto a = WeightA::linear(kInterval, vec({0}));
  const Potential u = fs_potential() + bump(vec({0.2}), 0.5, 0.02);
  const double exact = ding1(u, a);
  double prev_err = 0.0;
  for (std::size_t n : {101, 201}) {
    const auto g = PotentialGrid::sample({{-1, 1, n}}, PotentialKind::Symplectic, u, kInterval, false);
    const double err = std::abs(ding1(g, a) - exact);
    EXPECT_LT(err, 1e-3);
    if (prev_err > 0) EXPECT_GT(prev_err / err, 3.0);
    prev_err = err;
  }
}

TEST(Geodesic, BumpScanIsConvex) {
  const auto a = WeightA::linear(kInterval, vec({0}));
  const Potential u0 = fs_potential();
  const Potential u1 = u0 + bump(vec({0.2}), 0.5, 0.02);
  const auto r = geodesic_convexity_scan(u0, u1, a);
  ASSERT_EQ(r.t.size(), 9u);
  EXPECT_DOUBLE_EQ(r.t.front(), 0.0);
  EXPECT_DOUBLE_EQ(r.t.back(), 1.0);
  EXPECT_TRUE(r.convex);
  EXPECT_TRUE(r.log_concave);
  EXPECT_FALSE(r.equality_flag);
  EXPECT_GE(r.min_second_difference, -1e-6);
  EXPECT_NEAR(r.d_values.front(), ding(u0, a), 1e-9);
}

TEST(Geodesic, AffineDifferenceFlagsEquality) {
  const auto a = WeightA::linear(kCylinder, vec({0, 1}));
  const Potential u0 = cylinder_potential();
  const Potential u1 = add_affine(u0, vec({0.3, -0.2}), 0.7);
  const auto r = geodesic_convexity_scan(u0, u1, a);
  EXPECT_TRUE(r.equality_flag);
  for (double d : r.d_values) EXPECT_NEAR(d, r.d_values.front(), 1e-8);
  EXPECT_NEAR(r.affine_fit.slope[0], 0.3, 1e-10);
  EXPECT_NEAR(r.affine_fit.slope[1], -0.2, 1e-10);
  EXPECT_NEAR(r.affine_fit.constant, 0.7, 1e-10);
  EXPECT_LT(r.affine_fit.residual, 1e-10);
}

TEST(Geodesic, LeavingTheConeIsReported) {
  const auto a = WeightA::linear(kInterval, vec({0}));
  const Potential u0 = fs_potential();
  const Potential u1 = u0 + bump(vec({0.0}), 0.3, -5.0);
  EXPECT_EQ(code_of([&] { geodesic_convexity_scan(u0, u1, a); }), ErrorCode::PathLeavesCone);
  EXPECT_EQ(code_of([&] { geodesic_convexity_scan(u0, u0, a, 5); }), ErrorCode::InvalidInput);
}

TEST(Geodesic, GridEndpoints) {
  const auto a = WeightA::linear(kInterval, vec({0}));
  const Potential u0 = fs_potential();
  const Potential u1 = u0 + bump(vec({-0.3}), 0.4, 0.01);
  const std::vector<GridAxis> ax{{-1, 1, 401}};
  const auto g0 = PotentialGrid::sample(ax, PotentialKind::Symplectic, u0, kInterval, false);
  const auto g1 = PotentialGrid::sample(ax, PotentialKind::Symplectic, u1, kInterval, false);
  const auto r = geodesic_convexity_scan(g0, g1, a);
  EXPECT_TRUE(r.convex);
  EXPECT_FALSE(r.equality_flag);
}

TEST(Geodesic, TimeDerivativeIdentity) {
  const Potential u0 = cylinder_potential();
  const Potential u1 = u0 + bump(vec({0.1, 0.5}), 0.6, 0.02);
  for (const auto& x : {vec({0.1, 0.5}), vec({-0.2, 0.8}), vec({0.4, 0.3})}) {
    for (double t : {0.25, 0.5}) {
      const double lhs = geodesic_time_derivative(u0, u1, t, x);
      EXPECT_NEAR(lhs, u1(x) - u0(x), 1e-7);
    }
  }
}

TEST(FirstVariation, GaussianSolution) {
  const auto a = WeightA::linear(kHalfLine, vec({1}));
  const Potential w = bump(vec({0.5}), 0.5, 0.01);
  const auto r = first_variation_check(gauss_potential(), a, w);
  // Oracle for 2 int w e^{-x}.
  boost::math::quadrature::tanh_sinh<double> q;
  const double pred =
      2 * q.integrate([&](double x) { return w(vec({x})) * std::exp(-x); }, 0.0, 1.0);
  EXPECT_NEAR(r.predicted, pred, 1e-9 * pred);
  EXPECT_LT(r.relative_error, 1e-4);
  EXPECT_LT(std::abs(r.fd_ding), 1e-8);
}

TEST(FirstVariation, ZeroDirection) {
  const auto a = WeightA::linear(kHalfLine, vec({1}));
  const Potential zero(1, [](const Eigen::VectorXd&) { return 0.0; },
                       [](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(1); },
                       [](const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(1, 1); });
  const auto r = first_variation_check(gauss_potential(), a, zero);
  EXPECT_EQ(r.fd_ding1, 0.0);
  EXPECT_EQ(r.predicted, 0.0);
  EXPECT_EQ(r.relative_error, 0.0);
}

TEST(FirstVariation, NonSolutionControl) {
  const auto a = WeightA::linear(kHalfLine, vec({1}));
  const Potential u = guillemin_potential(kHalfLine) + quadratic_potential(1) + quadratic_potential(1);
  const auto r = first_variation_check(u, a, bump(vec({0.5}), 0.5, 0.01));
  EXPECT_GT(std::abs(r.fd_ding), 1e-4);
  EXPECT_GT(r.relative_error, 1e-2);
}

TEST(FirstVariation, ConvexityLost) {
  const auto a = WeightA::linear(kInterval, vec({0}));
  EXPECT_EQ(code_of([&] { first_variation_check(fs_potential(), a, bump(vec({0.0}), 0.3, 1.0), 1.0); }),
            ErrorCode::ConvexityLost);
}

TEST(ChangeOfVariables, ConjugateSideAgrees) {
  // phi for the Gaussian and for the Fubini-Study interval, sampled on boxes
  // wide enough for the tails to drop below 1e-8.
  auto gauss_phi = [](double xi) { return std::exp(2 * xi) / (4 * kE) - xi; };
  const Potential gp(1, [&](const Eigen::VectorXd& x) { return gauss_phi(x[0]); });
  const auto phi1 = PotentialGrid::sample({{-12, 4, 16001}}, PotentialKind::Kahler, gp);
  const double x_side = ding1(gauss_potential(), WeightA::linear(kHalfLine, vec({1})));
  EXPECT_NEAR(conjugate_side_ding1(phi1) / x_side, 1.0, 1e-4);

  const Potential cyl_phi(2, [&](const Eigen::VectorXd& x) { return std::log(std::cosh(x[0])) + gauss_phi(x[1]); });
  const auto phi2 = PotentialGrid::sample({{-12, 12, 481}, {-12, 4, 321}}, PotentialKind::Kahler, cyl_phi);
  const double x_side2 = ding1(cylinder_potential(), WeightA::linear(kCylinder, vec({0, 1})));
  EXPECT_NEAR(conjugate_side_ding1(phi2) / x_side2, 1.0, 1e-4);
}

TEST(ChangeOfVariables, LegendreGridAgrees) {
  // Discrete conjugate of u_P sampled with its endpoint values; past the
  // last chord the conjugate is |xi| - log 2, which carries the tails.
  auto xlogx = [](double s) { return s > 0 ? s * std::log(s) : 0.0; };
  const Potential up(1, [&](const Eigen::VectorXd& x) { return 0.5 * (xlogx(1 + x[0]) + xlogx(1 - x[0])); });
  const auto u = PotentialGrid::sample({{-1, 1, 4001}}, PotentialKind::Symplectic, up, kInterval, false);
  const auto phi = legendre(u, std::vector<GridAxis>{{-12, 12, 9601}});
  const double x_side = ding1(fs_potential(), WeightA::linear(kInterval, vec({0})));
  EXPECT_NEAR(conjugate_side_ding1(phi) / x_side, 1.0, 1e-4);
}
