#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>
#include <vector>

#include "../vendor/doctest.h"
#include "sausagelab/brownian.hpp"
#include "sausagelab/constants.hpp"
#include "sausagelab/obstacles.hpp"

using namespace sausagelab;
using namespace sausagelab::brownian;
using obstacles::Box;
using obstacles::ObstacleGeometry;

TEST_CASE("path shape and determinism") {
    double x0[2] = {1.0, -2.0};
    const auto p = simulate_path(1.0, 1e-2, 2, x0, 42);
    CHECK(p.size() == 101);
    CHECK(p.point(0)[0] == 1.0);
    CHECK(p.point(0)[1] == -2.0);
    CHECK(p.time(100) == doctest::Approx(1.0));
    const auto q = simulate_path(1.0, 1e-2, 2, x0, 42);
    CHECK(p.pos == q.pos);
    const auto r = simulate_path(1.0, 1e-2, 2, x0, 43);
    CHECK(p.pos != r.pos);
    CHECK(p.sup_norm > 0.0);
    double sup = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        sup = std::max(sup, std::hypot(p.point(i)[0], p.point(i)[1]));
    CHECK(p.sup_norm == doctest::Approx(sup));
}

TEST_CASE("mean square displacement is d*t") {
    for (int d : {1, 2, 3}) {
        const double t = 0.7;
        double acc = 0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            const auto p = simulate_path(t, 1e-2, d, nullptr, 1000 + i);
            const double* e = p.point(p.size() - 1);
            for (int c = 0; c < d; ++c) acc += e[c] * e[c];
        }
        const double msd = acc / n;
        // Var(|Z_t|^2) = 2 d t^2, so 4-sigma band for the mean
        const double band = 4.0 * t * std::sqrt(2.0 * d / n);
        CHECK(msd == doctest::Approx(d * t).epsilon(band / (d * t)));
    }
}

TEST_CASE("first_hit_hard: discrete hit and bridge correction") {
    const auto box = Box::centered(2, 10.0);
    ObstacleGeometry g;
    g.hard_radius = 1.0;
    g.sausage_radius = 1.0;
    // single trap on the x-axis; a path forced through it must report a hit
    auto f = obstacles::make_field_with_points(box, g, 1.0, 0.0, 0,
                                               {{{3.0, 0.0, 0.0}}}, {});
    PathSample p;
    p.d = 2;
    p.dt = 0.1;
    for (int i = 0; i <= 10; ++i) {
        p.pos.push_back(0.6 * i);
        p.pos.push_back(0.0);
    }
    const auto hit = first_hit_hard(p, f, false);
    REQUIRE(hit.has_value());
    // first index with 0.6*i inside [2,4] is i=4 (x=2.4)
    CHECK(*hit == doctest::Approx(0.4));

    // path that stays far away never hits, bridge or not
    PathSample far;
    far.d = 2;
    far.dt = 0.1;
    for (int i = 0; i <= 10; ++i) {
        far.pos.push_back(-0.1 * i);
        far.pos.push_back(0.0);
    }
    CHECK_FALSE(first_hit_hard(far, f, false).has_value());
    CHECK_FALSE(first_hit_hard(far, f, true).has_value());

    // bridge correction can only make hitting earlier/more likely
    double x0[2] = {0.0, 0.0};
    int n_bridge = 0, n_plain = 0;
    for (int i = 0; i < 300; ++i) {
        const auto path = simulate_path(4.0, 5e-2, 2, x0, 7000 + i);
        const auto hb = first_hit_hard(path, f, true, 555);
        const auto hp = first_hit_hard(path, f, false);
        if (hb) ++n_bridge;
        if (hp) ++n_plain;
        if (hp) {
            REQUIRE(hb.has_value());
            CHECK(*hb <= *hp + 1e-12);
        }
    }
    CHECK(n_bridge >= n_plain);

    // bridge decisions are deterministic given the seed
    const auto path = simulate_path(4.0, 5e-2, 2, x0, 7003);
    CHECK(first_hit_hard(path, f, true, 555) == first_hit_hard(path, f, true, 555));
}

TEST_CASE("bridge correction converges to fine-dt truth") {
    // Hitting probability of a disk over a fixed horizon: coarse-dt with bridge
    // correction should be close to a fine-dt discrete estimate (the oracle),
    // while coarse-dt without correction undercounts.
    const auto box = Box::centered(2, 8.0);
    ObstacleGeometry g;
    g.hard_radius = 0.5;
    g.sausage_radius = 0.5;
    auto f = obstacles::make_field_with_points(box, g, 1.0, 0.0, 0,
                                               {{{1.5, 0.0, 0.0}}}, {});
    double x0[2] = {0.0, 0.0};
    const int n = 3000;
    int hit_fine = 0, hit_coarse = 0, hit_bridge = 0;
    for (int i = 0; i < n; ++i) {
        const auto pf = simulate_path(1.0, 2e-4, 2, x0, 90000 + i);
        if (first_hit_hard(pf, f, false)) ++hit_fine;
        const auto pc = simulate_path(1.0, 2e-2, 2, x0, 90000 + i);
        if (first_hit_hard(pc, f, false)) ++hit_coarse;
        if (first_hit_hard(pc, f, true, 99)) ++hit_bridge;
    }
    const double p_fine = double(hit_fine) / n;
    const double p_coarse = double(hit_coarse) / n;
    const double p_bridge = double(hit_bridge) / n;
    CHECK(p_fine > 0.1);
    // uncorrected coarse estimate is visibly biased low
    CHECK(p_coarse < p_fine - 0.02);
    // bridge-corrected coarse estimate lands within MC noise of the oracle
    CHECK(std::fabs(p_bridge - p_fine) < 4.0 * std::sqrt(p_fine * (1 - p_fine) / n) + 0.01);
}

TEST_CASE("soft_survival_weight") {
    const auto box = Box::centered(2, 5.0);
    ObstacleGeometry g;
    g.hard_radius = 0.0;
    g.soft_radius = 100.0;  // covers everything: V == soft_height everywhere
    g.soft_height = 0.7;
    g.sausage_radius = 0.5;
    auto f = obstacles::make_field_with_points(box, g, 0.0, 1.0, 0, {},
                                               {{{0.0, 0.0, 0.0}}});
    PathSample p;
    p.d = 2;
    p.dt = 0.1;
    for (int i = 0; i <= 20; ++i) {
        p.pos.push_back(0.01 * i);
        p.pos.push_back(0.0);
    }
    // left-endpoint sum: 20 steps of V=0.7, weight exp(-0.7*2.0)
    CHECK(soft_survival_weight(p, f, 0.1) ==
          doctest::Approx(std::exp(-0.7 * 2.0)).epsilon(1e-12));
    // no soft obstacles -> weight 1
    auto empty = obstacles::make_field_with_points(box, g, 0.0, 0.0, 0, {}, {});
    CHECK(soft_survival_weight(p, empty, 0.1) == doctest::Approx(1.0));
}

TEST_CASE("exit_time") {
    PathSample p;
    p.d = 2;
    p.dt = 0.5;
    for (int i = 0; i <= 6; ++i) {
        p.pos.push_back(0.3 * i);
        p.pos.push_back(0.0);
    }
    double c[2] = {0.0, 0.0};
    const auto e = exit_time(p, c, 1.0);
    REQUIRE(e.has_value());
    // first index with 0.3*i > 1 is i=4, time 2.0
    CHECK(*e == doctest::Approx(2.0));
    CHECK_FALSE(exit_time(p, c, 5.0).has_value());
    double c2[2] = {1.8, 0.0};
    const auto e2 = exit_time(p, c2, 0.5);
    REQUIRE(e2.has_value());
    CHECK(*e2 == doctest::Approx(0.0));  // already outside at the start
}

TEST_CASE("ball_eigenfunction properties") {
    for (int d : {1, 2, 3}) {
        const double R = 1.7;
        // vanishes at the boundary, positive inside, decreasing in r
        CHECK(ball_eigenfunction(R, R, d) == doctest::Approx(0.0).epsilon(1e-9));
        double prev = ball_eigenfunction(0.0, R, d);
        CHECK(prev > 0);
        for (int i = 1; i <= 40; ++i) {
            const double v = ball_eigenfunction(R * i / 41.0, R, d);
            CHECK(v > 0);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
        // L2 normalization: int phi(r)^2 surface(r) dr = 1 (midpoint rule)
        const int n = 20000;
        double s = 0;
        for (int i = 0; i < n; ++i) {
            const double r = (i + 0.5) * R / n;
            const double phi = ball_eigenfunction(r, R, d);
            const double surf =
                d * constants::unit_ball_volume(d) * std::pow(r, d - 1);
            s += phi * phi * surf * (R / n);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("conditioned sampler stays inside and matches the stationary law") {
    const double R = 1.0, tau = 40.0, dt = 2e-3;
    const int n_paths = 60;
    // occupation histogram of |Z| over the later half of each path
    const int nb = 10;
    std::vector<double> hist(nb, 0.0);
    double total = 0;
    for (int k = 0; k < n_paths; ++k) {
        const auto cp = sample_conditioned_in_ball(tau, dt, R, 2, 3000 + k);
        CHECK(cp.path.sup_norm <= R + 1e-12);
        CHECK(cp.end_eigenfunction ==
              doctest::Approx(ball_eigenfunction(
                  std::hypot(cp.path.point(cp.path.size() - 1)[0],
                             cp.path.point(cp.path.size() - 1)[1]),
                  R, 2)));
        for (std::size_t i = cp.path.size() / 2; i < cp.path.size(); ++i) {
            const double r = std::hypot(cp.path.point(i)[0], cp.path.point(i)[1]);
            const int b = std::min(nb - 1, static_cast<int>(r / R * nb));
            hist[b] += 1.0;
            total += 1.0;
        }
    }
    // oracle: stationary radial density of the h-process is phi(r)^2 * 2 pi r
    double chi2 = 0;
    for (int b = 0; b < nb; ++b) {
        const int nq = 200;
        double pb = 0;
        for (int i = 0; i < nq; ++i) {
            const double r = (b + (i + 0.5) / nq) * R / nb;
            const double phi = ball_eigenfunction(r, R, 2);
            pb += phi * phi * 2 * M_PI * r * (R / (nb * nq));
        }
        const double obs = hist[b] / total;
        chi2 += (obs - pb) * (obs - pb) / std::max(pb, 1e-12);
        CHECK(obs == doctest::Approx(pb).epsilon(0.25));
    }
    CHECK(chi2 < 0.05);
}

TEST_CASE("conditioned walk streaming variant agrees") {
    const double R = 1.2, tau = 5.0, dt = 1e-3;
    const auto cp = sample_conditioned_in_ball(tau, dt, R, 3, 777);
    std::size_t n_seen = 0;
    double sup = 0;
    const auto res = conditioned_walk_stream(
        tau, dt, R, 3, 777, 1000, [&](const double* x) {
            ++n_seen;
            sup = std::max(sup,
                           std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
        });
    CHECK(n_seen == cp.path.size());
    CHECK(res.sup_norm == doctest::Approx(cp.path.sup_norm));
    CHECK(res.end_phi == doctest::Approx(cp.end_eigenfunction));
    const double* e = cp.path.point(cp.path.size() - 1);
    CHECK(res.end[0] == doctest::Approx(e[0]));
    CHECK(res.end[1] == doctest::Approx(e[1]));
    CHECK(res.end[2] == doctest::Approx(e[2]));
    CHECK(res.resamples == cp.resample_count);
}

TEST_CASE("splitting survival curve decays at the Dirichlet rate") {
    // oracle: -d/ds log P(T_exit > s) -> lambda_d(R)/R^2 (principal Dirichlet
    // eigenvalue of -1/2 Laplacian on B(0,R))
    for (int d : {1, 2}) {
        const double R = 1.0;
        const auto curve =
            ball_survival_splitting(R, 6.0, 0.25, 4000, 5e-4, true, 99, d);
        REQUIRE(curve.s.size() == curve.log_survival.size());
        REQUIRE(curve.s.back() == doctest::Approx(6.0));
        // monotone decreasing log-survival
        for (std::size_t i = 1; i < curve.log_survival.size(); ++i)
            CHECK(curve.log_survival[i] <= curve.log_survival[i - 1] + 1e-12);
        const double rate = curve.fitted_rate(2.0, 6.0);
        CHECK(rate == doctest::Approx(constants::lambda_ball(d)).epsilon(0.05));
    }
}

TEST_CASE("splitting curve scales as 1/R^2") {
    const auto c1 = ball_survival_splitting(1.0, 5.0, 0.25, 3000, 5e-4, true, 7, 2);
    const auto c2 = ball_survival_splitting(2.0, 20.0, 1.0, 3000, 2e-3, true, 7, 2);
    const double r1 = c1.fitted_rate(2.0, 5.0);
    const double r2 = c2.fitted_rate(8.0, 20.0);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
}
