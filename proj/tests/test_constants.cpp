#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "../vendor/doctest.h"
#include "sausagelab/constants.hpp"

using namespace sausagelab::constants;

namespace {
const double kPi = 3.14159265358979323846;

// independent oracle: bisection on a 3-term-recurrence-free J evaluation via
// the integral representation J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt
double bessel_j_quadrature(double order, double x) {
    const int n = 2000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) * kPi / n;
        sum += std::cos(order * t - x * std::sin(t));
    }
    // valid for integer order; used with order 0 and 1 below
    return sum / n;
}

double bisect_zero(double order, double lo, double hi) {
    double flo = bessel_j_quadrature(order, lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = bessel_j_quadrature(order, mid);
        if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("bessel_first_zero") {
    CHECK(bessel_first_zero(0.5) == doctest::Approx(kPi).epsilon(1e-10));
    // oracle: independent quadrature-based bisection for integer orders
    CHECK(bessel_first_zero(0.0) ==
          doctest::Approx(bisect_zero(0.0, 2.0, 3.0)).epsilon(1e-9));
    CHECK(bessel_first_zero(1.0) ==
          doctest::Approx(bisect_zero(1.0, 3.0, 4.0)).epsilon(1e-9));
    CHECK(bessel_first_zero(0.0) == doctest::Approx(2.404825557695773).epsilon(1e-12));
    CHECK(bessel_first_zero(1.0) == doctest::Approx(3.831705970207512).epsilon(1e-12));
    CHECK_THROWS_AS(bessel_first_zero(-0.1), std::domain_error);
    CHECK_THROWS_AS(bessel_first_zero(10.5), std::domain_error);

    // the returned zero is a genuine sign change of J_order
    for (double order : {0.0, 0.3, 1.0, 2.5}) {
        const double z = bessel_first_zero(order);
        CHECK(bessel_j(order, z - 1e-8) * bessel_j(order, z + 1e-8) <= 0);
    }
}

TEST_CASE("lambda_ball") {
    CHECK(lambda_ball(3) == doctest::Approx(kPi * kPi / 2).epsilon(1e-12));
    CHECK(lambda_ball(1) == doctest::Approx(kPi * kPi / 8).epsilon(1e-12));
    CHECK(lambda_ball(2) == doctest::Approx(2.891592981).epsilon(1e-9));
    CHECK_THROWS_AS(lambda_ball(0), std::domain_error);
    CHECK_THROWS_AS(lambda_ball(11), std::domain_error);
}

TEST_CASE("unit_ball_volume") {
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
    CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));
    CHECK(unit_ball_volume(4) == doctest::Approx(kPi * kPi / 2.0));
    CHECK_THROWS_AS(unit_ball_volume(0), std::domain_error);
}

TEST_CASE("variational_constant and optimal_radius closed forms") {
    CHECK(variational_constant(2, 0.0) == 0.0);
    CHECK(variational_constant(2, 1.0) ==
          doctest::Approx(2.0 * std::sqrt(kPi * lambda_ball(2))).epsilon(1e-12));
    CHECK(variational_constant(3, 1.0) ==
          doctest::Approx(2.5 * std::pow(4 * kPi / 3, 0.4) *
                          std::pow(kPi * kPi / 3, 0.6))
              .epsilon(1e-12));
    CHECK(optimal_radius(2, 1.0) ==
          doctest::Approx(std::pow(lambda_ball(2) / kPi, 0.25)).epsilon(1e-12));
    CHECK(optimal_radius(2, lambda_ball(2) / kPi) == doctest::Approx(1.0));
    CHECK(optimal_radius(3, 1.0) ==
          doctest::Approx(std::pow(kPi / 4.0, 0.2)).epsilon(1e-12));
    CHECK_THROWS_AS(optimal_radius(2, 0.0), std::domain_error);

    // the ball attains the infimum: nu*omega*r0^d + lambda/r0^2 == c
    for (int d = 1; d <= 5; ++d)
        for (double nu : {0.5, 1.0, 2.0}) {
            const double r0 = optimal_radius(d, nu);
            const double lhs = nu * unit_ball_volume(d) * std::pow(r0, d) +
                               lambda_ball(d) / (r0 * r0);
            CHECK(lhs ==
                  doctest::Approx(variational_constant(d, nu)).epsilon(1e-10));
        }

    // scaling law c(d, s nu) = s^{2/(d+2)} c(d, nu)
    std::mt19937_64 eng(42);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 20; ++i) {
        const double s = u(eng);
        for (int d : {2, 3}) {
            CHECK(variational_constant(d, s) ==
                  doctest::Approx(std::pow(s, 2.0 / (d + 2)) *
                                  variational_constant(d, 1.0))
                      .epsilon(1e-12));
        }
    }

    // minimization property at 100 random radii
    for (int i = 0; i < 100; ++i) {
        const double r = u(eng);
        const double f = unit_ball_volume(2) * r * r + lambda_ball(2) / (r * r);
        CHECK(f >= variational_constant(2, 1.0) - 1e-9);
    }
}

TEST_CASE("rate_function") {
    for (int d : {2, 3})
        for (double nu : {0.5, 1.0, 2.0}) {
            const double x_star =
                unit_ball_volume(d) * std::pow(optimal_radius(d, nu), d);
            CHECK(std::fabs(rate_function(x_star, d, nu)) <= 1e-10);
            CHECK(rate_function(x_star * 1.1, d, nu) > 0);
            CHECK(rate_function(x_star * 0.9, d, nu) > 0);
        }
    // direct formula evaluation at (d=2, nu=1, x=pi)
    CHECK(rate_function(kPi, 2, 1.0) ==
          doctest::Approx(kPi + lambda_ball(2) - variational_constant(2, 1.0))
              .epsilon(1e-12));
    CHECK_THROWS_AS(rate_function(0.0, 2, 1.0), std::domain_error);
    CHECK_THROWS_AS(rate_function(-1.0, 2, 1.0), std::domain_error);

    // midpoint convexity on sampled triples
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> u(0.2, 8.0);
    for (int i = 0; i < 50; ++i) {
        double x1 = u(eng), x2 = u(eng);
        const double mid = 0.5 * (x1 + x2);
        CHECK(rate_function(mid, 2, 1.0) <=
              0.5 * (rate_function(x1, 2, 1.0) + rate_function(x2, 2, 1.0)) + 1e-12);
    }
}

TEST_CASE("derivative identity") {
    CHECK(derivative_identity_check(2, 1.0, 1e-4) <= 1e-6);
    CHECK(derivative_identity_check(3, 1.0, 1e-4) <= 1e-6);
    CHECK(derivative_identity_check(1, 1.0, 1e-4) <= 1e-6);
    // exact value omega_2 R0^2 = pi sqrt(lambda_2/pi)
    const double want = kPi * std::sqrt(lambda_ball(2) / kPi);
    CHECK(unit_ball_volume(2) * std::pow(optimal_radius(2, 1.0), 2) ==
          doctest::Approx(want).epsilon(1e-12));
    CHECK(want == doctest::Approx(3.013981).epsilon(1e-5));
    // O(h^2) falloff
    const double e1 = derivative_identity_check(2, 1.0, 1e-2);
    const double e2 = derivative_identity_check(2, 1.0, 1e-3);
    CHECK(e2 <= e1 / 50.0);
}

TEST_CASE("Constants bundle") {
    const auto c = Constants::make(2, 1.0);
    CHECK(c.omega_d == doctest::Approx(kPi));
    CHECK(c.lambda_d == doctest::Approx(lambda_ball(2)));
    CHECK(c.c == doctest::Approx(variational_constant(2, 1.0)));
    CHECK(c.r0 == doctest::Approx(optimal_radius(2, 1.0)));
    CHECK(c.x_star() == doctest::Approx(kPi * c.r0 * c.r0));
    const auto z = Constants::make(2, 0.0);
    CHECK(z.c == 0.0);
    CHECK(z.r0 == 0.0);
}
