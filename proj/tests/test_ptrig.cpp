#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pgap/ptrig.hpp"

using pgap::PExponent;

TEST(PExponent, RejectsInvalid) {
  EXPECT_THROW(PExponent{1.0}, pgap::DomainError);
  EXPECT_THROW(PExponent{0.5}, pgap::DomainError);
  EXPECT_THROW(PExponent{INFINITY}, pgap::DomainError);
  EXPECT_THROW(PExponent{NAN}, pgap::DomainError);
  EXPECT_NO_THROW(PExponent{1.0001});
}

TEST(PiP, ClosedForm) {
  EXPECT_NEAR(pgap::pi_p(PExponent(2.0)), std::numbers::pi, 1e-15);
  EXPECT_NEAR(pgap::pi_p(PExponent(3.0)), 4.0 * std::numbers::pi / (3.0 * std::sqrt(3.0)), 1e-14);
  EXPECT_NEAR(pgap::pi_p(PExponent(3.0)), 2.41840, 1e-5);
}

class PiPQuadrature : public ::testing::TestWithParam<double> {};

TEST_P(PiPQuadrature, MatchesDefiningIntegral) {
  const double p = GetParam();
  const double q = oracle::pi_p_quadrature(p);
  EXPECT_NEAR(pgap::pi_p(PExponent(p)) / q, 1.0, 1e-8) << "p = " << p;
}

INSTANTIATE_TEST_SUITE_P(Exponents, PiPQuadrature, ::testing::Values(1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 8.0));

TEST(SinP, SpecialValues) {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const PExponent pe(p);
    EXPECT_EQ(pgap::sin_p(pe, 0.0), 0.0);
    EXPECT_NEAR(pgap::sin_p(pe, 0.5 * pe.pi_p()), 1.0, 1e-14);
    EXPECT_NEAR(pgap::cos_p(pe, 0.0), 1.0, 1e-14);
    EXPECT_NEAR(pgap::cos_p(pe, 0.5 * pe.pi_p()), 0.0, 1e-10);
  }
  const PExponent two(2.0);
  EXPECT_NEAR(pgap::sin_p(two, 1.0), std::sin(1.0), 1e-14);
  EXPECT_NEAR(pgap::cos_p(two, 2.5), std::cos(2.5), 1e-14);
}

TEST(SinP, InvertsDefiningIntegral) {
  for (double p : {1.3, 2.0, 3.0, 6.0}) {
    const PExponent pe(p);
    for (double y : {0.1, 0.4, 0.7, 0.9, 0.99}) {
      const double t = oracle::sine_integral(p, y);
      EXPECT_NEAR(pgap::sin_p(pe, t), y, 1e-10) << "p=" << p << " y=" << y;
    }
  }
}

TEST(SinP, ReflectionOddnessPeriodicity) {
  std::mt19937_64 rng(7);
  for (double p : {1.2, 1.5, 2.0, 3.0, 5.0}) {
    const PExponent pe(p);
    const double P = pe.pi_p();
    std::uniform_real_distribution<double> U(-3 * P, 3 * P);
    for (int i = 0; i < 200; ++i) {
      const double t = U(rng);
      EXPECT_NEAR(pgap::sin_p(pe, t + 2 * P), pgap::sin_p(pe, t), 1e-10);
      EXPECT_NEAR(pgap::sin_p(pe, -t), -pgap::sin_p(pe, t), 1e-12);
      EXPECT_NEAR(pgap::sin_p(pe, P - t), pgap::sin_p(pe, t), 1e-10);
    }
  }
}

TEST(SinP, PythagoreanIdentity) {
  std::mt19937_64 rng(11);
  for (double p : {1.2, 1.5, 2.0, 3.0, 5.0}) {
    const PExponent pe(p);
    std::uniform_real_distribution<double> U(-4 * pe.pi_p(), 4 * pe.pi_p());
    for (int i = 0; i < 1000; ++i) {
      const auto sc = pgap::sincos_p(pe, U(rng));
      EXPECT_NEAR(std::pow(std::abs(sc.sin), p) + std::pow(std::abs(sc.cos), p), 1.0, 1e-10);
    }
  }
  const PExponent three(3.0);
  const auto sc = pgap::sincos_p(three, 0.7);
  EXPECT_NEAR(std::pow(std::abs(sc.sin), 3) + std::pow(std::abs(sc.cos), 3), 1.0, 1e-10);
}

TEST(SinP, DerivativeIsCosP) {
  const double h = 1e-5;
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const PExponent pe(p);
    const double P = pe.pi_p();
    // away from the critical points +-pi_p/2, where sin_p is only C^{1,alpha}
    for (double t = -0.45 * P; t <= 0.45 * P; t += 0.013 * P) {
      const double fd = (pgap::sin_p(pe, t + h) - pgap::sin_p(pe, t - h)) / (2 * h);
      EXPECT_NEAR(fd, pgap::cos_p(pe, t), 1e-6) << "p=" << p << " t=" << t;
    }
  }
}

TEST(ArctanP, ValuesAndRoundTrip) {
  const PExponent two(2.0);
  EXPECT_NEAR(pgap::arctan_p(two, 1.0), std::numbers::pi / 4, 1e-15);
  for (double p : {1.2, 1.5, 2.0, 3.0, 5.0}) {
    const PExponent pe(p);
    EXPECT_EQ(pgap::arctan_p(pe, 0.0), 0.0);
    EXPECT_NEAR(pgap::arctan_p(pe, INFINITY), 0.5 * pe.pi_p(), 1e-15);
    EXPECT_NEAR(pgap::arctan_p(pe, -INFINITY), -0.5 * pe.pi_p(), 1e-15);
    for (double t = -0.49 * pe.pi_p(); t < 0.49 * pe.pi_p(); t += 0.01 * pe.pi_p())
      EXPECT_NEAR(pgap::arctan_p(pe, pgap::tan_p(pe, t)), t, 1e-9);
  }
  const PExponent three(3.0);
  EXPECT_NEAR(pgap::arctan_p(three, pgap::tan_p(three, 0.5)), 0.5, 1e-9);
}

TEST(ArctanP, DerivativeContract) {
  const double h = 1e-5;
  for (double p : {1.5, 2.0, 3.0}) {
    const PExponent pe(p);
    for (double x = -4.0; x <= 4.0; x += 0.37) {
      const double fd = (pgap::arctan_p(pe, x + h) - pgap::arctan_p(pe, x - h)) / (2 * h);
      EXPECT_NEAR(fd, 1.0 / (1.0 + std::pow(std::abs(x), p)), 1e-7);
    }
  }
}

TEST(OddPower, Basics) {
  EXPECT_EQ(pgap::odd_power(-2.0, 3.0), -8.0);
  EXPECT_EQ(pgap::odd_power(0.0, 0.5), 0.0);
  EXPECT_EQ(pgap::odd_power(0.0, 0.0), 0.0);
  EXPECT_EQ(pgap::odd_power(-3.0, 0.0), -1.0);
  EXPECT_THROW(pgap::odd_power(1.0, -0.5), pgap::DomainError);
}

TEST(OddPower, ConvexOddSuperadditivity) {
  // odd_power(t - 2 delta, q) - odd_power(t, q) <= -2 odd_power(delta, q), q >= 1, delta >= 0
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> T(-5.0, 5.0), D(0.0, 3.0), Q(1.0, 6.0);
  for (int i = 0; i < 10000; ++i) {
    const double t = T(rng), d = D(rng), q = Q(rng);
    const double lhs = pgap::odd_power(t - 2 * d, q) - pgap::odd_power(t, q);
    const double rhs = -2.0 * pgap::odd_power(d, q);
    EXPECT_LE(lhs, rhs + 1e-12 * (1.0 + std::abs(rhs) + std::abs(lhs))) << t << " " << d << " " << q;
  }
}
