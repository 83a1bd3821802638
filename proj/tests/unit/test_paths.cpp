#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mylab/error.hpp"
#include "mylab/paths.hpp"
#include "mylab/specialfn.hpp"
#include "mylab/stats.hpp"

namespace pa = mylab::paths;
using mylab::RngStream;

TEST(TimeGrid, Basics) {
  const pa::TimeGrid g(2.0, 400);
  EXPECT_DOUBLE_EQ(g.dt(), 0.005);
  EXPECT_NEAR(g.time(400), 2.0, 1e-14);
  EXPECT_EQ(g.index_of(1.0), 200u);
  EXPECT_THROW(pa::TimeGrid(0.0, 10), mylab::DomainError);
  EXPECT_THROW(pa::TimeGrid(1.0, 0), mylab::DomainError);
}

TEST(BrownianPaths, ReproducibleAndStartAtZero) {
  const pa::TimeGrid g(1.0, 100);
  RngStream a(3, 1), b(3, 1);
  const auto p = pa::sample_bm(g, 0.0, a);
  const auto q = pa::sample_bm(g, 0.0, b);
  EXPECT_EQ(p.values, q.values);
  EXPECT_EQ(p.values.front(), 0.0);
  EXPECT_EQ(p.values.size(), 101u);
}

TEST(BrownianPaths, TerminalVarianceAndDrift) {
  const pa::TimeGrid g(2.0, 20);
  const int n = 40000;
  double m = 0.0, v = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream r(11, i);
    const double x = pa::sample_bm(g, 0.5, r).back();
    m += x;
    v += x * x;
  }
  m /= n;
  v = v / n - m * m;
  EXPECT_NEAR(m, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(v, 2.0, 5.0 * 2.0 * std::sqrt(2.0 / n));
}

TEST(ExponentialFunctional, TrapezoidOnKnownPath) {
  const pa::TimeGrid g(1.0, 4);
  const pa::ScalarPath b{g, {0.0, 0.1, -0.2, 0.3, 0.25}};
  const auto eta = pa::eta_functional(b);
  double integral = 0.0;
  for (int k = 1; k <= 4; ++k) {
    integral += 0.125 * (std::exp(2 * b.values[k - 1]) + std::exp(2 * b.values[k]));
    EXPECT_NEAR(eta.values[k], std::exp(-b.values[k]) * integral, 1e-15);
  }
  EXPECT_EQ(eta.values[0], 0.0);
}

TEST(ExponentialFunctional, LogDomainBranchAgreesWithLongDouble) {
  const pa::TimeGrid g(1.0, 50);
  std::vector<double> v(51);
  for (int k = 0; k <= 50; ++k) v[k] = 40.0 * std::sin(0.2 * k);
  const auto eta = pa::exponential_functional(pa::ScalarPath{g, v}, 2.0);
  long double integral = 0.0L;
  for (int k = 1; k <= 50; ++k) {
    integral += 0.01L * (std::exp(2.0L * v[k - 1]) + std::exp(2.0L * v[k]));
    const long double expected = std::exp(-static_cast<long double>(v[k])) * integral;
    EXPECT_NEAR(eta.values[k] / static_cast<double>(expected), 1.0, 1e-12);
  }
}

TEST(ExponentialFunctional, PositiveAndSmallTimeBehaviour) {
  const pa::TimeGrid g(0.1, 1000);
  for (int i = 0; i < 200; ++i) {
    RngStream r(4, i);
    const auto eta = pa::eta_functional(pa::sample_bm(g, 0.0, r));
    for (std::size_t k = 1; k < eta.values.size(); ++k) ASSERT_GT(eta.values[k], 0.0);
    EXPECT_NEAR(eta.values[1], g.dt(), 0.1 * std::sqrt(g.dt()) * g.dt());
  }
}

TEST(PitmanTransform, NonnegativeAndExact) {
  const pa::TimeGrid g(1.0, 5);
  const pa::ScalarPath b{g, {0.0, -1.0, 0.5, 0.2, 1.0, -0.3}};
  const auto p = pa::pitman_transform(b);
  const std::vector<double> expected{0.0, 1.0, 0.5, 0.8, 1.0, 2.3};
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(p.values[k], expected[k], 1e-15);
  RngStream r(2, 2);
  for (double x : pa::pitman_transform(pa::sample_bm(pa::TimeGrid(1.0, 500), 0.0, r)).values) {
    ASSERT_GE(x, 0.0);
  }
}

TEST(HyperbolicRadial, QEqualsOneIsAbsoluteValue) {
  const pa::TimeGrid g(1.0, 200);
  RngStream r(8, 0);
  const auto b = pa::sample_bm(g, 0.0, r);
  const auto d = pa::hyperbolic_radial(1, b, RngStream(8, 1));
  for (std::size_t k = 0; k < b.values.size(); ++k) {
    EXPECT_NEAR(d.values[k], std::abs(b.values[k]), 1e-9);
  }
}

TEST(HyperbolicRadial, ApproachesLogQPlusLogEta) {
  const pa::TimeGrid g(1.0, 1000);
  RngStream r(21, 0);
  const auto b = pa::sample_bm(g, 0.0, r);
  const auto eta = pa::eta_functional(b);
  const auto d = pa::hyperbolic_radial(20000, b, RngStream(21, 1));
  EXPECT_NEAR(d.back() - std::log(20000.0), std::log(eta.back()), 0.05);
}

TEST(Drift, ValueAtZeroIsBesselRatio) {
  EXPECT_NEAR(pa::my_drift(0.0, 0.0), std::cyl_bessel_k(1.0, 1.0) / std::cyl_bessel_k(0.0, 1.0),
              1e-12);
}

TEST(Drift, Asymptotics) {
  // K_0(x) ~ -log(x/2) - gamma as x -> 0, so the drift decays like 1/(r + ln 2 - gamma).
  const double r = 10.0;
  EXPECT_NEAR(pa::my_drift(r, 0.0) * (r + std::numbers::ln2 - std::numbers::egamma), 1.0, 1e-3);
  const double wall = pa::my_drift(-3.0, 0.0);
  EXPECT_GT(wall, 0.8 * std::exp(3.0));
  EXPECT_LT(wall, 1.2 * std::exp(3.0));
}

TEST(Drift, TabulatedMatchesDirect) {
  const pa::TabulatedDrift t(0.5);
  for (double r : {-9.3, -2.0, -0.1, 0.0, 0.77, 5.5, 19.0, 25.0, -12.0}) {
    EXPECT_NEAR(t(r), pa::my_drift(r, 0.5), 1e-8 * (1.0 + std::abs(pa::my_drift(r, 0.5))));
  }
}

TEST(EulerDiffusion, ZeroDriftIsBrownianMotion) {
  const pa::TimeGrid g(1.0, 100);
  RngStream a(6, 6), b(6, 6);
  const auto x = pa::euler_diffusion([](double) { return 0.0; }, g, 1.5, a);
  const auto w = pa::sample_bm(g, 0.0, b);
  for (std::size_t k = 0; k < x.values.size(); ++k) EXPECT_NEAR(x.values[k], 1.5 + w.values[k], 1e-12);
}

TEST(EulerDiffusion, OrnsteinUhlenbeckStationaryVariance) {
  const pa::TimeGrid g(8.0, 800);
  const int n = 20000;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream r(13, i);
    const double x = pa::euler_diffusion([](double y) { return -y; }, g, 0.0, r).back();
    s2 += x * x;
  }
  // Euler bias for step dt: variance 1 / (2 - dt).
  EXPECT_NEAR(s2 / n, 1.0 / (2.0 - g.dt()), 5.0 * 0.5 * std::sqrt(2.0 / n));
}

TEST(EulerDiffusion, BlowUpGuard) {
  const pa::TimeGrid g(1.0, 100);
  RngStream r(1, 1);
  EXPECT_THROW(pa::euler_diffusion([](double y) { return 1e8 * (1.0 + y * y); }, g, 0.0, r),
               mylab::IntegratorError);
}

TEST(EulerDiffusion, GroundStateMarginalMatchesDirectEta) {
  // log eta started from its value at t0 = 0.05 vs direct simulation, at t = 1.
  const double t0 = 0.05;
  const pa::TimeGrid g0(t0, 50);
  const pa::TimeGrid rest(1.0 - t0, 950);
  const pa::TimeGrid full(1.0, 1000);
  const pa::TabulatedDrift drift(0.0);
  const int n = 3000;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    RngStream r0(31, i);
    const double x0 = std::log(pa::eta_functional(pa::sample_bm(g0, 0.0, r0)).back());
    RngStream r1(32, i);
    a[i] = pa::euler_diffusion(std::cref(drift), rest, x0, r1).back();
    RngStream r2(33, i);
    b[i] = std::log(pa::eta_functional(pa::sample_bm(full, 0.0, r2)).back());
  }
  EXPECT_TRUE(mylab::stats::ks_two_sample(a, b, 0.001).passed());
}
