#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "../vendor/doctest.h"
#include "../vendor/json.hpp"
#include "sausagelab/constants.hpp"
#include "sausagelab/spectral.hpp"

using namespace sausagelab;
using namespace sausagelab::spectral;

TEST_CASE("unit square eigenvalues") {
    // -1/2 Laplacian on (0,1)^2: lambda_1 = pi^2, lambda_2 = 5 pi^2 / 2
    const double lo[2] = {0, 0}, hi[2] = {1, 1};
    const auto dom = GridDomain::box(2, lo, hi, 1.0 / 128);
    const auto res = eigen_dirichlet(dom);
    CHECK(res.lambda1 == doctest::Approx(M_PI * M_PI).epsilon(0.005));
    CHECK(res.lambda2 == doctest::Approx(2.5 * M_PI * M_PI).epsilon(0.01));
    CHECK(res.residual <= 1e-8);
    // phi1 normalization and positivity
    double s = 0;
    for (double v : res.phi1) {
        CHECK(v >= 0.0);
        s += v * v;
    }
    CHECK(s * dom.h * dom.h == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("grid convergence is second order") {
    const double lo[2] = {0, 0}, hi[2] = {1, 1};
    const double e1 =
        std::fabs(eigen_dirichlet(GridDomain::box(2, lo, hi, 1.0 / 32)).lambda1 -
                  M_PI * M_PI);
    const double e2 =
        std::fabs(eigen_dirichlet(GridDomain::box(2, lo, hi, 1.0 / 64)).lambda1 -
                  M_PI * M_PI);
    CHECK(e2 <= e1 / 3.0);
}

TEST_CASE("unit disk and interval eigenvalues") {
    const auto disk = GridDomain::ball(2, 1.0, 1.0 / 96);
    const auto res = eigen_dirichlet(disk);
    CHECK(res.lambda1 == doctest::Approx(constants::lambda_ball(2)).epsilon(0.01));
    const auto ball3 = GridDomain::ball(3, 1.0, 1.0 / 40);
    const auto res3 = eigen_dirichlet(ball3, {}, {.want_lambda2 = false});
    CHECK(res3.lambda1 == doctest::Approx(M_PI * M_PI / 2).epsilon(0.02));
}

TEST_CASE("constant potential shifts the spectrum exactly") {
    const double lo[2] = {0, 0}, hi[2] = {1, 1};
    const auto dom = GridDomain::box(2, lo, hi, 1.0 / 64);
    const auto base = eigen_dirichlet(dom);
    const std::vector<double> pot(dom.cells(), 3.7);
    const auto shifted = eigen_dirichlet(dom, pot);
    CHECK(shifted.lambda1 == doctest::Approx(base.lambda1 + 3.7).epsilon(1e-8));
    CHECK(shifted.lambda2 == doctest::Approx(base.lambda2 + 3.7).epsilon(1e-7));
}

TEST_CASE("domain monotonicity and potential monotonicity") {
    const double lo[2] = {0, 0}, hi_small[2] = {0.8, 0.8}, hi_big[2] = {1, 1};
    const double l_small =
        eigen_dirichlet(GridDomain::box(2, lo, hi_small, 1.0 / 64)).lambda1;
    const double l_big =
        eigen_dirichlet(GridDomain::box(2, lo, hi_big, 1.0 / 64)).lambda1;
    CHECK(l_small > l_big);

    const auto dom = GridDomain::box(2, lo, hi_big, 1.0 / 64);
    std::vector<double> pot(dom.cells(), 0.0);
    for (std::size_t i = 0; i < pot.size(); ++i) pot[i] = (i % 7) * 0.1;
    const double with_pot = eigen_dirichlet(dom, pot).lambda1;
    CHECK(with_pot >= l_big);
}

TEST_CASE("faber krahn") {
    // ball minimizes lambda_1 among equal-volume domains; ratio >= 1 with
    // equality (up to discretization) iff the domain is a ball
    const double lo[2] = {0, 0}, hi[2] = {1, 1};
    const auto square = faber_krahn_check(GridDomain::box(2, lo, hi, 1.0 / 96));
    CHECK(square.ratio > 1.0);
    CHECK(square.ratio < 1.2);
    CHECK(square.lambda_ball_same_volume ==
          doctest::Approx(constants::lambda_ball(2) * M_PI).epsilon(0.01));

    const auto disk = faber_krahn_check(GridDomain::ball(2, 1.0, 1.0 / 96));
    CHECK(disk.ratio == doctest::Approx(1.0).epsilon(0.02));

    // L-shape: remove a quadrant from the square
    auto dom = GridDomain::box(2, lo, hi, 1.0 / 96);
    for (int j = 0; j < dom.n[1]; ++j)
        for (int i = 0; i < dom.n[0]; ++i)
            if (dom.center(0, i) > 0.5 && dom.center(1, j) > 0.5)
                dom.mask[dom.idx(i, j)] = 0;
    const auto lshape = faber_krahn_check(dom);
    CHECK(lshape.ratio > square.ratio);
}

TEST_CASE("capacity of a ball in 3d") {
    // Newtonian capacity wrt -1/2 Laplacian of B(0,r) is 2 pi r
    Ball b;
    b.radius = 0.5;
    CapacityParams p;
    p.n_walkers = 200000;
    p.seed = 9;
    const double cap_mc = capacity({b}, 3, CapacityMethod::hitting_mc, p);
    CHECK(cap_mc == doctest::Approx(2 * M_PI * 0.5).epsilon(0.05));

    CapacityParams pg;
    pg.h = 1.0 / 24;
    pg.truncation_radius = 4.0;
    const double cap_grid = capacity({b}, 3, CapacityMethod::grid_solve, pg);
    CHECK(cap_grid == doctest::Approx(2 * M_PI * 0.5).epsilon(0.10));

    // linearity in r for the MC solver
    Ball b2;
    b2.radius = 1.0;
    const double cap2 = capacity({b2}, 3, CapacityMethod::hitting_mc, p);
    CHECK(cap2 / cap_mc == doctest::Approx(2.0).epsilon(0.08));
}

TEST_CASE("capacity subadditivity and separation") {
    // two far-apart balls: capacity ~ sum; overlapping balls: strictly less
    Ball a, b;
    a.radius = b.radius = 0.4;
    a.center = {-3.0, 0, 0};
    b.center = {3.0, 0, 0};
    CapacityParams p;
    p.n_walkers = 150000;
    p.launch_radius = 12.0;
    p.seed = 4;
    const double far = capacity({a, b}, 3, CapacityMethod::hitting_mc, p);
    const double one = capacity({a}, 3, CapacityMethod::hitting_mc, p);
    CHECK(far == doctest::Approx(2 * one).epsilon(0.08));
    a.center = {0, 0, 0};
    b.center = {0.1, 0, 0};
    const double near_cap = capacity({a, b}, 3, CapacityMethod::hitting_mc, p);
    CHECK(near_cap < 1.3 * one);
}

TEST_CASE("2d massive capacity positive and monotone") {
    Ball b;
    b.radius = 0.3;
    CapacityParams p;
    p.h = 1.0 / 48;
    p.truncation_radius = 5.0;
    const double c1 = capacity({b}, 2, CapacityMethod::grid_solve, p);
    CHECK(c1 > 0);
    Ball big;
    big.radius = 0.6;
    const double c2 = capacity({big}, 2, CapacityMethod::grid_solve, p);
    CHECK(c2 > c1);
    // 2-d capacity has no MC solver
    CHECK_THROWS_AS(capacity({b}, 2, CapacityMethod::hitting_mc, p),
                    std::domain_error);
}

TEST_CASE("eigenvalue shift from a small obstacle tracks the capacity scale") {
    // carving an eps-ball out of B(0,R) raises lambda_1 by ~ c(R) * cap(eps);
    // the ratio shift / cap_scaled should stabilize as eps -> 0
    const double R = 1.0;
    const auto s1 = eigen_shift_vs_capacity(R, 0.06, 2, 1.0 / 128);
    const auto s2 = eigen_shift_vs_capacity(R, 0.03, 2, 1.0 / 256);
    CHECK(s1.shift > 0);
    CHECK(s2.shift > 0);
    CHECK(s2.shift < s1.shift);
    const double r1 = s1.shift / s1.cap_scaled;
    const double r2 = s2.shift / s2.cap_scaled;
    CHECK(r1 == doctest::Approx(r2).epsilon(0.25));
    CHECK_THROWS_AS(eigen_shift_vs_capacity(R, 0.5, 2), std::domain_error);
}

TEST_CASE("grid domain invariants and json round trip") {
    const auto dom = GridDomain::ball(2, 1.0, 1.0 / 32);
    CHECK_NOTHROW(dom.validate());
    CHECK(dom.interior_count() > 0);
    const auto j = dom.to_json();
    const auto back = GridDomain::from_json(j);
    CHECK(back.d == dom.d);
    CHECK(back.h == dom.h);
    CHECK(back.n == dom.n);
    CHECK(back.lo == dom.lo);
    CHECK(back.mask == dom.mask);

    GridDomain bad;
    bad.n = {4, 4, 1};
    bad.mask.assign(15, 1);  // wrong size
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("variational_minimize matches closed form") {
    for (int d : {1, 2, 3})
        for (double nu : {0.5, 1.0, 2.0}) {
            const auto m = variational_minimize(d, nu);
            CHECK(m.c_num ==
                  doctest::Approx(constants::variational_constant(d, nu))
                      .epsilon(1e-8));
            CHECK(m.r_num ==
                  doctest::Approx(constants::optimal_radius(d, nu)).epsilon(1e-8));
        }
}
