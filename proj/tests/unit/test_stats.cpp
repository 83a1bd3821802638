#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mylab/error.hpp"
#include "mylab/paths.hpp"
#include "mylab/rng.hpp"
#include "mylab/stats.hpp"

namespace st = mylab::stats;
using mylab::RngStream;

namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n, double shift = 0.0) {
  RngStream r(seed, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = r.normal() + shift;
  return x;
}

}  // namespace

TEST(Kolmogorov, TailValues) {
  EXPECT_NEAR(st::kolmogorov_tail(1.3581), 0.05, 2e-4);
  EXPECT_NEAR(st::kolmogorov_tail(1.6276), 0.01, 1e-4);
  EXPECT_NEAR(st::kolmogorov_tail(1.2238), 0.10, 2e-4);
  EXPECT_EQ(st::kolmogorov_tail(0.0), 1.0);
}

TEST(KolmogorovSmirnov, StatisticOnKnownSamples) {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{3, 4, 5, 6};
  EXPECT_DOUBLE_EQ(st::ks_statistic(a, b), 0.5);
  EXPECT_DOUBLE_EQ(st::ks_statistic(a, a), 0.0);
}

TEST(KolmogorovSmirnov, IdenticalBatchesPass) {
  const auto x = normals(1, 500);
  const auto r = st::ks_two_sample(x, x, 0.01);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_TRUE(r.passed());
}

TEST(KolmogorovSmirnov, TooFewSamples) {
  const auto x = normals(1, 50);
  EXPECT_THROW(st::ks_two_sample(x, x, 0.01), mylab::SampleError);
}

TEST(KolmogorovSmirnov, NullCalibration) {
  int passes = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = normals(1000 + 2 * rep, 10000);
    const auto b = normals(1001 + 2 * rep, 10000);
    passes += st::ks_two_sample(a, b, 0.01).passed();
  }
  EXPECT_GE(passes, 98);
}

TEST(KolmogorovSmirnov, DetectsShift) {
  const auto a = normals(5, 10000);
  const auto b = normals(6, 10000, 0.5);
  const auto r = st::ks_two_sample(a, b, 0.01);
  EXPECT_FALSE(r.passed());
  EXPECT_LT(r.p_value, 1e-10);
}

TEST(KolmogorovSmirnov, BatchOverload) {
  st::SampleBatch a{normals(7, 2000), 7, 2000, 0.01, 1.0, 3};
  st::SampleBatch b{normals(8, 2000), 8, 2000, 0.01, 1.0, 3};
  EXPECT_TRUE(st::ks_two_sample(a, b, 0.01).passed());
}

TEST(TestFunctions, BumpDerivatives) {
  const auto f = st::TestFunction::gaussian_bump(0.3, 0.7);
  const double h = 1e-4;
  for (double x : {-1.0, 0.1, 0.3, 1.2}) {
    EXPECT_NEAR(f.df(x), (f.f(x + h) - f.f(x - h)) / (2 * h), 1e-7);
    EXPECT_NEAR(f.d2f(x), (f.f(x + h) - 2 * f.f(x) + f.f(x - h)) / (h * h), 1e-5);
  }
}

TEST(MeanEstimate, KnownValues) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto m = st::mean_with_error(x);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.standard_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-14);
}

namespace {

struct OuSample {
  std::vector<double> x, y;
};

OuSample ou_pairs(double theta, double h, std::size_t n) {
  RngStream r(31, 0);
  OuSample s{std::vector<double>(n), std::vector<double>(n)};
  const double sd0 = theta > 0 ? std::sqrt(0.5 / theta) : 1.0;
  const double decay = std::exp(-theta * h);
  const double sd = theta > 0 ? std::sqrt((1 - decay * decay) / (2 * theta)) : std::sqrt(h);
  for (std::size_t i = 0; i < n; ++i) {
    s.x[i] = sd0 * r.normal();
    s.y[i] = s.x[i] * decay + sd * r.normal();
  }
  return s;
}

}  // namespace

TEST(GeneratorTest, AcceptsCorrectDrift) {
  const auto f = st::TestFunction::gaussian_bump(0.5, 0.5);
  const auto bm = ou_pairs(0.0, 0.01, 100000);
  EXPECT_TRUE(st::generator_test(bm.x, bm.y, [](double) { return 0.0; }, f, 0.01).passed());
  const auto ou = ou_pairs(1.0, 0.01, 100000);
  EXPECT_TRUE(st::generator_test(ou.x, ou.y, [](double x) { return -x; }, f, 0.01).passed());
}

TEST(GeneratorTest, RejectsWrongDrift) {
  const auto f = st::TestFunction::gaussian_bump(0.5, 0.5);
  const auto ou = ou_pairs(1.0, 0.01, 100000);
  const auto r = st::generator_test(ou.x, ou.y, [](double) { return 0.0; }, f, 0.01);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.statistic, 5.0);
}

TEST(MarkovTest, IndependentFuturePasses) {
  const auto cur = normals(41, 20000);
  const auto fut = normals(42, 20000);
  const auto aux = normals(43, 20000);
  EXPECT_TRUE(st::markov_property_test(cur, fut, aux, 10, 0.01).passed());
}

TEST(MarkovTest, MemoryIsDetected) {
  const auto cur = normals(41, 20000);
  const auto noise = normals(42, 20000);
  const auto aux = normals(43, 20000);
  std::vector<double> fut(cur.size());
  for (std::size_t i = 0; i < fut.size(); ++i) fut[i] = 0.5 * cur[i] + aux[i] + noise[i];
  EXPECT_FALSE(st::markov_property_test(cur, fut, aux, 10, 0.01).passed());
}

TEST(MarkovTest, SparseBinsThrow) {
  const auto x = normals(1, 1000);
  EXPECT_THROW(st::markov_property_test(x, x, x, 10, 0.01), mylab::SampleError);
}

TEST(ConditionalLaw, ZeroLambdaIsExact) {
  const auto b = normals(3, 1000);
  std::vector<double> eta(1000, 0.7);
  const auto res = st::conditional_law_estimates(b, eta, 0.0, {[](double) { return 1.0; }});
  EXPECT_TRUE(res.report.passed());
  ASSERT_EQ(res.estimates.size(), 1u);
  EXPECT_EQ(res.estimates[0].mean, 0.0);
}

TEST(ConditionalLaw, BrownianPairsPass) {
  namespace pa = mylab::paths;
  const pa::TimeGrid grid(1.0, 200);
  const std::size_t n = 20000;
  std::vector<double> b(n), eta(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r(77, i);
    const auto path = pa::sample_bm(grid, 0.0, r);
    b[i] = path.back();
    eta[i] = pa::eta_functional(path).back();
  }
  const std::vector<std::function<double(double)>> g{
      [](double) { return 1.0; }, [](double e) { return e < 1.0 ? 1.0 : 0.0; },
      [](double e) { return std::exp(-e); }};
  const auto res = st::conditional_law_estimates(b, eta, 0.5, g);
  EXPECT_TRUE(res.report.passed()) << res.report.statistic;
}
