#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "toric/error.hpp"
#include "toric/legendre.hpp"

using namespace toric;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Potential func1(double (*f)(double)) {
  return Potential(1, [f](const Eigen::VectorXd& x) { return f(x[0]); });
}

PotentialGrid sample1(double lo, double hi, std::size_t n, const Potential& f,
                      PotentialKind kind = PotentialKind::Kahler) {
  return PotentialGrid::sample({{lo, hi, n}}, kind, f);
}

double sup_error(const PotentialGrid& g, double (*exact)(double)) {
  double e = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.reliable(k)) e = std::max(e, std::abs(g[k] - exact(g.point(k)[0])));
  return e;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;  // sentinel; tests compare against other codes
}

const Polyhedron kInterval = Polyhedron::make({{1}, {-1}}, {Rational(1), Rational(1)});

}  // namespace

// --- potentials ----------------------------------------------------------

TEST(Potential, FiniteDifferenceFallbackMatchesAnalytic) {
  const Potential q = quadratic_potential(2);
  const Potential plain(2, [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); });
  const Eigen::VectorXd x = vec({0.3, -1.2});
  EXPECT_LT((plain.gradient(x) - q.gradient(x)).norm(), 1e-8);
  EXPECT_LT((plain.hessian(x) - q.hessian(x)).norm(), 1e-5);
}

TEST(Potential, Combinators) {
  const Potential q = quadratic_potential(1);
  const Potential e = func1([](double x) { return std::exp(x); });
  const Eigen::VectorXd x = vec({0.4});
  EXPECT_NEAR((q + e)(x), 0.08 + std::exp(0.4), 1e-15);
  EXPECT_NEAR(scale(q, 3.0)(x), 0.24, 1e-15);
  EXPECT_NEAR(interpolate(q, e, 0.25)(x), 0.75 * 0.08 + 0.25 * std::exp(0.4), 1e-15);
  EXPECT_NEAR(add_affine(q, vec({2.0}), 1.0)(x), 0.08 + 0.8 + 1.0, 1e-15);
  EXPECT_NEAR(add_affine(q, vec({2.0}), 1.0).gradient(x)[0], 2.4, 1e-15);
  const Potential s = direct_sum(q, e);
  EXPECT_EQ(s.dim(), 2u);
  EXPECT_NEAR(s(vec({0.4, 1.0})), 0.08 + std::exp(1.0), 1e-15);
  EXPECT_NEAR(s.hessian(vec({0.4, 1.0}))(1, 1), std::exp(1.0), 1e-5);
  EXPECT_EQ(s.hessian(vec({0.4, 1.0}))(0, 1), 0.0);
}

TEST(Potential, GuilleminInterval) {
  const Potential u = guillemin_potential(kInterval);
  for (double x : {-0.9, -0.2, 0.0, 0.7}) {
    const double v = 0.5 * ((1 + x) * std::log(1 + x) + (1 - x) * std::log(1 - x));
    EXPECT_NEAR(u(vec({x})), v, 1e-15);
    EXPECT_NEAR(u.gradient(vec({x}))[0], 0.5 * std::log((1 + x) / (1 - x)), 1e-14);
    EXPECT_NEAR(u.hessian(vec({x}))(0, 0), 1.0 / (1 - x * x), 1e-13);
  }
  EXPECT_NEAR(u(vec({1.0})), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isnan(u(vec({1.5}))));
}

TEST(Potential, GuilleminRejectsNonDelzant) {
  const Polyhedron tri = Polyhedron::make({{1, 0}, {0, 1}, {-1, -2}}, {Rational(1), Rational(1), Rational(1)});
  EXPECT_EQ(code_of([&] { guillemin_potential(tri); }), ErrorCode::NotDelzant);
  EXPECT_NO_THROW(facet_log_potential(tri));
}

TEST(Potential, BumpDerivatives) {
  const Potential b = bump(vec({0.1, -0.2}), 0.5, 0.3);
  const Potential plain(2, [b](const Eigen::VectorXd& x) { return b(x); });
  for (const auto& x : {vec({0.2, -0.1}), vec({0.0, -0.3}), vec({0.4, -0.2})}) {
    EXPECT_LT((b.gradient(x) - plain.gradient(x)).norm(), 1e-8);
    EXPECT_LT((b.hessian(x) - plain.hessian(x)).norm(), 1e-5);
  }
  EXPECT_EQ(b(vec({1.0, 1.0})), 0.0);
}

TEST(Potential, PointwiseConjugate) {
  const Potential e = func1([](double x) { return std::exp(x); });
  for (double x : {0.2, 1.0, 5.0}) {
    const auto c = legendre_at(e, vec({x}), vec({0.0}));
    EXPECT_TRUE(c.converged);
    EXPECT_NEAR(c.value, x * std::log(x) - x, 1e-12);
    EXPECT_NEAR(c.argmax[0], std::log(x), 1e-9);  // limited by the differenced gradient
  }
}

TEST(Potential, HessianDualityAtConjugatePoints) {
  // f(xi) = xi1^2/2 + cosh(xi2) + 0.3 xi1 xi2; u = f* has Hess u(grad f) = (Hess f)^-1.
  const Potential f(2, [](const Eigen::VectorXd& y) { return 0.5 * y[0] * y[0] + std::cosh(y[1]) + 0.3 * y[0] * y[1]; });
  const Potential u(2, [f](const Eigen::VectorXd& x) { return legendre_at(f, x, Eigen::VectorXd::Zero(2)).value; });
  for (const auto& xi : {vec({0.2, 0.5}), vec({-1.0, 1.3})}) {
    const Eigen::VectorXd x = f.gradient(xi);
    const auto c = legendre_at(f, x, Eigen::VectorXd::Zero(2));
    EXPECT_LT((c.argmax - xi).norm(), 1e-8);
    EXPECT_LT((u.gradient(x) - xi).norm(), 1e-6);
    const Eigen::MatrixXd prod = u.hessian(x) * f.hessian(xi);
    EXPECT_LT((prod - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-4);
  }
}

// --- grids ---------------------------------------------------------------

TEST(Grid, LayoutAndInterpolation) {
  const Potential lin(2, [](const Eigen::VectorXd& x) { return 2 * x[0] - x[1] + 0.5; });
  const PotentialGrid g = PotentialGrid::sample({{0, 1, 3}, {-1, 1, 5}}, PotentialKind::Kahler, lin);
  EXPECT_EQ(g.size(), 15u);
  EXPECT_EQ(g.stride(0), 5u);
  EXPECT_EQ(g.stride(1), 1u);
  EXPECT_EQ(g.flatten(g.unflatten(7)), 7u);
  EXPECT_NEAR(g.point(7)[0], 0.5, 0);
  EXPECT_NEAR(g.point(7)[1], 0.0, 0);
  EXPECT_NEAR(g.interpolate(vec({0.3, 0.1})), 0.6 - 0.1 + 0.5, 1e-14);
  EXPECT_TRUE(std::isnan(g.interpolate(vec({1.3, 0.1}))));
  EXPECT_EQ(g.convexity_defect(), 0.0);
}

TEST(Grid, DomainMasksSamples) {
  const PotentialGrid g =
      PotentialGrid::sample({{-2, 2, 9}}, PotentialKind::Symplectic, guillemin_potential(kInterval), kInterval);
  std::size_t present = 0;
  for (std::size_t k = 0; k < g.size(); ++k) present += g.present(k);
  EXPECT_EQ(present, 3u);  // -0.5, 0, 0.5; the boundary nodes are excluded
}

TEST(Grid, NotConvexIsReported) {
  const PotentialGrid g = sample1(-1, 1, 21, func1([](double x) { return -x * x; }));
  EXPECT_GT(g.convexity_defect(), 1.0);
  EXPECT_EQ(code_of([&] { g.check_convex(1e-8); }), ErrorCode::NotConvex);
  EXPECT_EQ(code_of([&] { legendre(g); }), ErrorCode::NotConvex);
}

TEST(Grid, CsvAndBinaryRoundTrip) {
  PotentialGrid g = PotentialGrid::sample({{-1, 1, 4}, {0, 2, 3}}, PotentialKind::Symplectic,
                                          Potential(2, [](const Eigen::VectorXd& x) { return std::exp(x[0]) / 3 + x[1]; }));
  g[5] = std::numeric_limits<double>::quiet_NaN();
  for (auto enc : {GridEncoding::Csv, GridEncoding::Binary}) {
    std::stringstream ss;
    write_grid(ss, g, enc);
    const PotentialGrid r = read_grid(ss);
    ASSERT_EQ(r.axes(), g.axes());
    EXPECT_EQ(r.kind(), g.kind());
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!g.present(k))
        EXPECT_FALSE(r.present(k));
      else
        EXPECT_EQ(r[k], g[k]);  // bit-exact
    }
  }
}

TEST(Grid, ReaderAcceptsSeparatorsAndRejectsGarbage) {
  std::istringstream ok("toric-grid 1\ndim 1\naxis 0 1 3\nkind kahler\nencoding csv\nvalues\n1, 2;3\n");
  const PotentialGrid g = read_grid(ok);
  EXPECT_EQ(g[2], 3.0);
  std::istringstream bad("toric-grid 1\ndim 1\naxis 0 1 3\nkind kahler\nencoding csv\nvalues\n1 2\n");
  EXPECT_THROW(read_grid(bad), Error);
  std::istringstream magic("not-a-grid\n");
  EXPECT_THROW(read_grid(magic), Error);
}

TEST(Grid, GridPotentialDerivatives) {
  const PotentialGrid g = PotentialGrid::sample(uniform_axes(vec({-1, -1}), vec({1, 1}), 41), PotentialKind::Kahler,
                                                Potential(2, [](const Eigen::VectorXd& x) {
                                                  return x[0] * x[0] + x[0] * x[1] + 2 * x[1] * x[1];
                                                }));
  const Potential p = grid_potential(g);
  const Eigen::VectorXd x = vec({0.25, -0.5});
  EXPECT_NEAR(p(x), 0.0625 - 0.125 + 0.5, 1e-12);
  EXPECT_LT((p.gradient(x) - vec({0.0, -1.75})).norm(), 1e-10);
  Eigen::MatrixXd h(2, 2);
  h << 2, 1, 1, 4;
  EXPECT_LT((p.hessian(x) - h).norm(), 1e-8);
}

// --- discrete Legendre transform ----------------------------------------

TEST(Legendre, QuadraticRoundTripIsExact) {
  const PotentialGrid f = sample1(-2, 2, 41, quadratic_potential(1));
  const PotentialGrid g = legendre(f);
  EXPECT_EQ(g.kind(), PotentialKind::Symplectic);
  // Default targets are the chord slopes; the hull vertices are the samples.
  ASSERT_EQ(g.axes()[0].count, 40u);
  EXPECT_NEAR(g.axes()[0].min, -1.95, 1e-12);
  const auto rep = involution_error(f);
  EXPECT_FALSE(rep.degenerate);
  EXPECT_GT(rep.samples, 30u);
  EXPECT_LT(rep.error, 1e-13);
}

TEST(Legendre, ExponentialConjugate) {
  const PotentialGrid f = sample1(-5, 3, 801, func1([](double x) { return std::exp(x); }));
  const PotentialGrid g = legendre(f, std::vector<GridAxis>{{0.1, 10.0, 60}});
  std::size_t reliable = 0;
  for (std::size_t k = 0; k < g.size(); ++k) reliable += g.reliable(k);
  EXPECT_EQ(reliable, 60u);
  // Discrete sup error <= h^2/8 * max f'' on the active range.
  EXPECT_LT(sup_error(g, [](double x) { return x * std::log(x) - x; }), 1e-4 / 8 * 21);
  // Slopes beyond the sampled range are flagged.
  const PotentialGrid wide = legendre(f, std::vector<GridAxis>{{0.001, 30.0, 10}});
  EXPECT_FALSE(wide.reliable(0));
  EXPECT_FALSE(wide.reliable(9));
}

TEST(Legendre, GuilleminRoundTrip) {
  const PotentialGrid u = PotentialGrid::sample({{-1, 1, 201}}, PotentialKind::Symplectic,
                                                guillemin_potential(kInterval), kInterval, false);
  const auto rep = involution_error(u, std::vector<GridAxis>{{-2.0, 2.0, 201}});
  EXPECT_GT(rep.samples, 100u);
  EXPECT_LT(rep.error, 1e-4);
  // u_P is the conjugate of log cosh.
  const PotentialGrid g = legendre(u, std::vector<GridAxis>{{-2.0, 2.0, 41}});
  // Discrete sup error <= h^2/8 * u''(x*), u'' = cosh^2 at the maximizer.
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = g.point(k)[0];
    EXPECT_NEAR(g[k], std::log(std::cosh(s)), 1e-4 / 8 * std::cosh(s) * std::cosh(s) + 1e-14);
  }
}

TEST(Legendre, AffineInputIsDegenerate) {
  const PotentialGrid f = sample1(-1, 1, 11, func1([](double x) { return 3 * x + 1; }));
  const auto t = default_targets(f);
  EXPECT_EQ(t[0].count, 1u);
  EXPECT_NEAR(t[0].min, 3.0, 1e-12);
  const auto rep = involution_error(f);
  EXPECT_TRUE(rep.degenerate);
}

TEST(Legendre, TwoDimensionalSeparable) {
  const PotentialGrid f = PotentialGrid::sample(uniform_axes(vec({-2, -2}), vec({2, 2}), 41), PotentialKind::Kahler,
                                                quadratic_potential(2));
  const auto rep = involution_error(f);
  EXPECT_LT(rep.error, 1e-12);
  EXPECT_GT(rep.samples, 1000u);
  const PotentialGrid g = legendre(f);
  // At chord-midpoint slopes the discrete conjugate sits h^2/8 below x^2/2 per axis.
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(g[k], 0.5 * g.point(k).squaredNorm() - 2 * 0.01 / 8, 1e-12);
}

TEST(Legendre, GradientInversion) {
  // Coupled 2D potential; grad u at grad f(xi) is xi.
  const Potential f(2, [](const Eigen::VectorXd& y) { return 0.5 * y[0] * y[0] + std::cosh(y[1]) + 0.3 * y[0] * y[1]; });
  const PotentialGrid fg = PotentialGrid::sample(uniform_axes(vec({-3, -3}), vec({3, 3}), 241), PotentialKind::Kahler, f);
  const PotentialGrid ug = legendre(fg, std::vector<GridAxis>{{-1.5, 1.5, 61}, {-2.0, 2.0, 81}});
  const Potential u = grid_potential(ug);
  const Eigen::VectorXd xi = vec({0.4, 0.6});
  const Eigen::VectorXd x = f.gradient(xi);
  EXPECT_LT((u.gradient(x) - xi).norm(), 2e-2);
  EXPECT_LT(ug.convexity_defect(), 1e-8);
}

TEST(Legendre, ConjugateIsConvex) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(0.1, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = coef(rng), b = coef(rng), c = coef(rng);
    const Potential f(1, [=](const Eigen::VectorXd& x) { return a * std::exp(b * x[0]) + c * x[0] * x[0]; });
    const PotentialGrid g = legendre(sample1(-3, 3, 301, f, PotentialKind::Kahler));
    EXPECT_LE(g.convexity_defect(), 1e-9);
  }
}

TEST(Legendre, AffineActionLaws) {
  const PotentialGrid f = sample1(-3, 3, 61, quadratic_potential(1));
  const std::vector<GridAxis> t{{-1.0, 1.0, 21}};
  // phi(xi - 1) has conjugate x^2/2 + x.
  const PotentialGrid shifted = legendre(affine_action(f, AffineAction::domain_shift(vec({1.0}))), t);
  for (std::size_t k = 0; k < shifted.size(); ++k) {
    const double x = shifted.point(k)[0];
    EXPECT_NEAR(shifted[k], 0.5 * x * x + x, 1e-12);
  }
  // phi + xi has conjugate (x - 1)^2/2.
  const PotentialGrid sloped = legendre(affine_action(f, AffineAction::slope_shift(vec({1.0}))), t);
  for (std::size_t k = 0; k < sloped.size(); ++k) {
    const double x = sloped.point(k)[0];
    EXPECT_NEAR(sloped[k], 0.5 * (x - 1) * (x - 1), 1e-12);
  }
  const PotentialGrid same = affine_action(f, AffineAction::glnz({{-1}}));
  for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(same[k], f[k], 1e-14);
}

TEST(Legendre, GlnzActionOnPlane) {
  const Potential p(2, [](const Eigen::VectorXd& y) { return y[0] * y[0] + 0.5 * y[1] * y[1]; });
  const PotentialGrid f = PotentialGrid::sample(uniform_axes(vec({-2, -2}), vec({2, 2}), 21), PotentialKind::Kahler, p);
  const PotentialGrid g = affine_action(f, AffineAction::glnz({{1, 1}, {0, 1}}));
  const Eigen::VectorXd xi = vec({0.4, -0.6});
  const Eigen::VectorXd bxi = vec({-0.2, -0.6});
  EXPECT_NEAR(g.interpolate(xi), p(bxi), 2e-2);
  EXPECT_TRUE(std::isnan(g.interpolate(vec({1.8, 1.8}))));
  EXPECT_EQ(code_of([&] { affine_action(f, AffineAction::glnz({{2, 0}, {0, 1}})); }), ErrorCode::NotUnimodular);
}

TEST(Legendre, Properness) {
  const PotentialGrid q = sample1(-3, 3, 61, quadratic_potential(1));
  const auto pb = properness_bound(q, 1.0);
  EXPECT_NEAR(pb.offset, 0.5, 1e-12);
  EXPECT_TRUE(pb.verified);
  // Kahler potential of the Gaussian soliton: slopes cover (-1, inf).
  const PotentialGrid gauss =
      sample1(-4, 3, 141, func1([](double x) { return std::exp(2 * x) / (4 * std::exp(1.0)) - x; }));
  const auto pg = properness_bound(gauss, 0.5);
  EXPECT_TRUE(pg.verified);
  EXPECT_GT(pg.offset, 0.0);
  const PotentialGrid e = sample1(-5, 3, 81, func1([](double x) { return std::exp(x); }));
  EXPECT_EQ(code_of([&] { properness_bound(e, 0.5); }), ErrorCode::ZeroNotInterior);
  const PotentialGrid q2 = PotentialGrid::sample(uniform_axes(vec({-3, -3}), vec({3, 3}), 31), PotentialKind::Kahler,
                                                 quadratic_potential(2));
  const auto p2 = properness_bound(q2, 1.0);
  EXPECT_NEAR(p2.offset, 0.5, 2e-2);
  EXPECT_TRUE(p2.verified);
}
