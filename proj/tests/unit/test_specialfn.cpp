#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mylab/error.hpp"
#include "mylab/specialfn.hpp"

namespace sf = mylab::specialfn;

TEST(Gamma, MatchesStdTgamma) {
  for (double z : {0.05, 0.5, 1.0, 1.3, 2.5, 7.7, 23.5, 49.9, -0.5, -2.5, -7.3}) {
    EXPECT_NEAR(sf::gamma(z) / std::tgamma(z), 1.0, 5e-14) << z;
  }
}

TEST(Gamma, LogGammaSignAndMagnitude) {
  const auto g = sf::log_gamma(-2.5);
  EXPECT_EQ(g.sign, -1);
  EXPECT_NEAR(g.log_abs, std::lgamma(-2.5), 1e-13);
  EXPECT_NEAR(sf::log_gamma(150.0).log_abs, std::lgamma(150.0), 1e-11);
}

TEST(Gamma, PolesThrow) {
  EXPECT_THROW(sf::gamma(0.0), mylab::PoleError);
  EXPECT_THROW(sf::gamma(-3.0), mylab::PoleError);
}

TEST(Macdonald, HalfOrderClosedForm) {
  for (double x : {0.01, 0.3, 2.0, 15.0}) {
    const double exact = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
    EXPECT_NEAR(sf::macdonald_k(0.5, x) / exact, 1.0, 1e-13);
  }
}

TEST(Macdonald, MatchesStdCylBesselK) {
  for (double lambda = -4.0; lambda <= 4.0; lambda += 0.37) {
    for (double x : {1e-3, 0.01, 0.1, 1.0, 5.0, 20.0, 200.0}) {
      const double ref = std::cyl_bessel_k(std::abs(lambda), x);
      EXPECT_NEAR(sf::macdonald_k(lambda, x) / ref, 1.0, 1e-12) << lambda << " " << x;
    }
  }
}

TEST(Macdonald, EvenInLambda) {
  EXPECT_NEAR(sf::macdonald_k(1.7, 0.4), sf::macdonald_k(-1.7, 0.4), 1e-13);
}

TEST(Macdonald, LogFormSurvivesUnderflow) {
  const double x = 2000.0;
  const double expected = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x;
  EXPECT_NEAR(sf::log_macdonald_k(0.5, x), expected, 1e-10);
  EXPECT_NEAR(sf::macdonald_k_ratio(1.0, 0.0, x), 1.0 + 0.5 / x, 1e-6);
}

TEST(Macdonald, XDerivativeOracles) {
  for (double x : {0.05, 1.0, 1.3, 7.0}) {
    EXPECT_NEAR(sf::macdonald_k_dx(0.0, x) / -std::cyl_bessel_k(1.0, x), 1.0, 1e-12);
    const double nu = 0.7;
    const double recurrence =
        -0.5 * (std::cyl_bessel_k(std::abs(nu - 1.0), x) + std::cyl_bessel_k(nu + 1.0, x));
    EXPECT_NEAR(sf::macdonald_k_dx(nu, x) / recurrence, 1.0, 1e-12);
    EXPECT_NEAR(sf::macdonald_k_log_slope(nu, x), recurrence / std::cyl_bessel_k(nu, x), 1e-12);
  }
}

TEST(Macdonald, LambdaDerivativesMatchRichardsonDifferences) {
  const double x = 0.8;
  const auto k = [&](double l) { return sf::macdonald_k(l, x); };
  const auto d2 = [&](double h) { return (k(h) - 2.0 * k(0.0) + k(-h)) / (h * h); };
  const double d2_rich = (4.0 * d2(0.01) - d2(0.02)) / 3.0;
  EXPECT_NEAR(sf::macdonald_k_dlambda(2, x), d2_rich, 1e-7);
  const auto d4 = [&](double h) {
    return (k(2 * h) - 4 * k(h) + 6 * k(0.0) - 4 * k(-h) + k(-2 * h)) / std::pow(h, 4);
  };
  EXPECT_NEAR(sf::macdonald_k_dlambda(4, x), (4.0 * d4(0.05) - d4(0.1)) / 3.0, 1e-3);
  EXPECT_NEAR(sf::macdonald_k_dlambda(1, x), 0.0, 1e-14);
  EXPECT_EQ(sf::macdonald_k_dlambda(0, x), sf::macdonald_k(0.0, x));
}

TEST(Macdonald, DomainErrors) {
  EXPECT_THROW(sf::macdonald_k(0.3, 0.0), mylab::DomainError);
  EXPECT_THROW(sf::macdonald_k(0.3, -1.0), mylab::DomainError);
  EXPECT_THROW(sf::macdonald_k_dlambda(-1, 1.0), mylab::DomainError);
}

TEST(SmallDeterminant, KnownValues) {
  EXPECT_DOUBLE_EQ(sf::small_determinant({2.0}, 1), 2.0);
  EXPECT_NEAR(sf::small_determinant({0, 1, 1, 0}, 2), -1.0, 1e-15);
  EXPECT_NEAR(sf::small_determinant({2, -1, 0, -1, 2, -1, 0, -1, 2}, 3), 4.0, 1e-14);
  EXPECT_EQ(sf::small_determinant({1, 2, 2, 4}, 2), 0.0);
}

TEST(KTilde, RankOneIsK0) {
  const sf::ChamberVector r({0.7});
  EXPECT_NEAR(sf::ktilde_det(r), std::cyl_bessel_k(0.0, std::exp(-0.7)), 1e-13);
}

TEST(Multiplicities, Families) {
  EXPECT_EQ(sf::Multiplicities::from_group(sf::GroupFamily::SO, 5), (sf::Multiplicities{4, 0}));
  EXPECT_EQ(sf::Multiplicities::from_group(sf::GroupFamily::SU, 5), (sf::Multiplicities{8, 1}));
  EXPECT_EQ(sf::Multiplicities::from_group(sf::GroupFamily::Sp, 5), (sf::Multiplicities{16, 3}));
  EXPECT_DOUBLE_EQ((sf::Multiplicities{8, 1}).rho(), 5.0);
}

TEST(CFunction, ClosedFormSU15) {
  const sf::Multiplicities m{8, 1};
  const double lambda = 0.2;
  const double expected =
      std::pow(2.0, 4.8) * 24.0 * std::tgamma(lambda) / std::pow(std::tgamma(2.6), 2);
  EXPECT_NEAR(sf::c_function(lambda, m) / expected, 1.0, 1e-13);
}

TEST(CFunction, RealHyperbolicThreeSpace) {
  // SO(1,3): c(lambda) = 1/lambda.
  const sf::Multiplicities m{2, 0};
  for (double l : {0.1, 0.45, 1.3, -0.7}) EXPECT_NEAR(sf::c_function(l, m), 1.0 / l, 1e-13);
}

TEST(ANormalizer, SquaredVariantValues) {
  const sf::Multiplicities m{8, 1};
  const double expected = std::pow(std::tgamma(4.0), 2) / (std::tgamma(8.0) * std::pow(2.0, 2.5));
  EXPECT_NEAR(sf::a_normalizer(m) / expected, 1.0, 1e-13);
  const double unsq = std::tgamma(4.0) / (std::tgamma(8.0) * std::pow(2.0, 2.5));
  EXPECT_NEAR(sf::a_normalizer(m, sf::NormalizerVariant::Unsquared) / unsq, 1.0, 1e-13);
  EXPECT_THROW(sf::a_normalizer(sf::Multiplicities{1, 0}), mylab::DomainError);
}

TEST(ChamberVector, Ordering) {
  EXPECT_NO_THROW(sf::ChamberVector({2.0, 2.0, 1.0}));
  EXPECT_THROW(sf::ChamberVector({2.0, 2.0}, true), mylab::DomainError);
  EXPECT_THROW(sf::ChamberVector({1.0, 2.0}), mylab::DomainError);
}
