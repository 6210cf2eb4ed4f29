#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <vector>

#include "../vendor/doctest.h"
#include "sausagelab/coarse_grain.hpp"
#include "sausagelab/obstacles.hpp"

using namespace sausagelab;
using namespace sausagelab::coarse_grain;
using obstacles::Box;
using obstacles::ObstacleField;
using obstacles::ObstacleGeometry;

namespace {

ObstacleField unit_box_field(std::vector<std::array<double, 3>> pts, double a_eps,
                             int d = 2) {
    Box box;
    box.d = d;
    box.lo = {0, 0, 0};
    box.hi = {1, 1, d == 3 ? 1.0 : 0.0};
    ObstacleGeometry g;
    g.hard_radius = a_eps;
    g.sausage_radius = a_eps;
    return obstacles::make_field_with_points(box, g, 1.0, 0.0, 0, std::move(pts),
                                             {});
}

}  // namespace

TEST_CASE("l_adic_box geometry") {
    LAdicIndex idx;
    idx.base = {0, 0, 0};
    idx.digits = {{{1, 1, 0}}};
    const auto b = l_adic_box(idx, 2, 2);
    CHECK(b.side == doctest::Approx(0.5));
    CHECK(b.corner[0] == doctest::Approx(0.5));
    CHECK(b.corner[1] == doctest::Approx(0.5));

    // deeper digits with L = 3
    LAdicIndex idx3;
    idx3.base = {-1, 2, 0};
    idx3.digits = {{{2, 0, 0}}, {{1, 2, 0}}};
    const auto b3 = l_adic_box(idx3, 3, 2);
    CHECK(b3.side == doctest::Approx(1.0 / 9));
    CHECK(b3.corner[0] == doctest::Approx(-1 + 2.0 / 3 + 1.0 / 9));
    CHECK(b3.corner[1] == doctest::Approx(2 + 0.0 / 3 + 2.0 / 9));

    // truncation nests: the level-k box contains the full box
    const auto parent = l_adic_box(idx3.truncated(1), 3, 2);
    CHECK(parent.side == doctest::Approx(1.0 / 3));
    for (int c = 0; c < 2; ++c) {
        CHECK(parent.corner[c] <= b3.corner[c] + 1e-12);
        CHECK(b3.corner[c] + b3.side <= parent.corner[c] + parent.side + 1e-12);
    }
    CHECK(idx3.truncated(0).level() == 0);
    CHECK_THROWS_AS(idx3.truncated(5), std::domain_error);
}

TEST_CASE("ancestor coordinates") {
    // level-3 box (5, 7) with L=2 has level-1 ancestor (1, 1)
    BoxCoords c = {5, 7, 0};
    const auto a = ancestor(c, 3, 1, 2);
    CHECK(a[0] == 1);
    CHECK(a[1] == 1);
    // negative coordinates floor-divide
    BoxCoords neg = {-1, -4, 0};
    const auto an = ancestor(neg, 2, 1, 2);
    CHECK(an[0] == -1);
    CHECK(an[1] == -2);
    // identity at the same level
    const auto same = ancestor(c, 3, 3, 2);
    CHECK(same == c);
}

TEST_CASE("MoeParams::make picks bracketing levels") {
    for (double eps : {0.1, 0.07, 1.0 / 32, 0.011}) {
        const auto p = MoeParams::make(eps, 0.5, 0.05);
        // L^{-n-1} <= eps^x < L^{-n} for each exponent
        const auto check_bracket = [&](int n, double x) {
            const double target = std::pow(eps, x);
            CHECK(std::pow(p.L, -(n + 1)) <= target * (1 + 1e-12));
            CHECK(target < std::pow(p.L, -n) * (1 + 1e-12));
        };
        check_bracket(p.n_alpha, p.alpha);
        check_bracket(p.n_gamma, p.gamma);
        check_bracket(p.n_beta, p.beta);
        CHECK(p.n_gamma > p.n_alpha);
        CHECK(p.n_beta >= p.n_gamma);
        CHECK_NOTHROW(p.validate());
    }
    // scale separation: traps must be much smaller than the gamma boxes
    CHECK_THROWS_AS(MoeParams::make(0.3, 0.5, 0.05), std::domain_error);
}

TEST_CASE("skeleton capacity: empty box and single trap") {
    const double eps = 1.0 / 32;
    auto params = MoeParams::make(eps, 0.5, 0.05, 2, 0.2, 0.5, 0.8, 3);
    params.cap.n_walkers = 200000;
    params.cap.seed = 3;

    auto field = unit_box_field({{{0.4, 0.4, 0.4}}}, params.a * eps, 3);
    // the box containing the point at level n_gamma
    const long scale = static_cast<long>(std::pow(params.L, params.n_gamma));
    BoxCoords occ = {static_cast<long>(0.4 * scale), static_cast<long>(0.4 * scale),
                     static_cast<long>(0.4 * scale)};
    const double cap = skeleton_capacity(field, occ, params.n_gamma, params);
    // rescaled single ball of radius L^k a eps: Newtonian capacity 2 pi r
    const double r = std::pow(params.L, params.n_gamma) * params.a * eps;
    CHECK(cap == doctest::Approx(2 * M_PI * r).epsilon(0.05));

    // a box far from the point is empty
    BoxCoords empty_box = {0, 0, 0};
    CHECK(skeleton_capacity(field, empty_box, params.n_gamma, params) == 0.0);
}

TEST_CASE("skeleton capacity grows under unions") {
    const double eps = 1.0 / 32;
    auto params = MoeParams::make(eps, 0.5, 0.05, 2, 0.2, 0.5, 0.8, 3);
    params.cap.n_walkers = 150000;
    params.cap.seed = 5;
    const double ae = params.a * eps;
    const int k = params.n_alpha + 1;
    const double side = std::pow(params.L, -k);
    // both fields occupy the same level-k box; the second has an extra trap
    auto one = unit_box_field({{{side * 0.3, side * 0.3, side * 0.3}}}, ae, 3);
    auto two = unit_box_field({{{side * 0.3, side * 0.3, side * 0.3}},
                               {{side * 0.7, side * 0.7, side * 0.7}}},
                              ae, 3);
    BoxCoords box0 = {0, 0, 0};
    const double c1 = skeleton_capacity(one, box0, k, params);
    const double c2 = skeleton_capacity(two, box0, k, params);
    CHECK(c2 > c1 * 1.2);
    CHECK(c2 < c1 * 2.3);  // subadditive: less than the sum plus noise
}

TEST_CASE("density classification: dense cluster passes, empty fails") {
    const double eps = 1.0 / 64;
    auto params = MoeParams::make(eps, 0.5, 0.4, 2, 0.2, 0.5, 0.8, 3);
    params.cap.n_walkers = 60000;
    params.cap.seed = 11;

    // empty field: nothing is occupied, so no density boxes
    auto empty = unit_box_field({}, params.a * eps, 3);
    CHECK(classify_density_boxes(empty, params).empty());

    // pack the whole unit box with a regular grid of traps: every ancestor
    // level carries substantial capacity, so occupied gamma-boxes qualify
    std::vector<std::array<double, 3>> pts;
    const int m = 12;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k2 = 0; k2 < m; ++k2)
                pts.push_back({(i + 0.5) / m, (j + 0.5) / m, (k2 + 0.5) / m});
    auto dense = unit_box_field(pts, params.a * eps, 3);
    CoarseGrainResult res;
    const auto density = classify_density_boxes(dense, params, &res);
    CHECK(density.size() > 0);
    CHECK(res.skeleton_caps.size() > 0);

    // with a delta demanding far more capacity than any skeleton can carry,
    // nothing passes
    auto strict = params;
    strict.delta = 50.0;
    CHECK(classify_density_boxes(dense, strict).empty());
}

TEST_CASE("bad boxes are occupied, disjoint from density descendants") {
    const double eps = 1.0 / 64;
    auto params = MoeParams::make(eps, 0.5, 0.4, 2, 0.2, 0.5, 0.8, 3);
    params.cap.n_walkers = 60000;
    params.cap.seed = 13;
    // one isolated trap: its skeleton capacity at every level is tiny, so its
    // gamma-box fails the Wiener sum and its beta-box lands in the bad set
    auto lone = unit_box_field({{{0.53, 0.53, 0.53}}}, params.a * eps, 3);
    const auto result = classify(lone, params);
    CHECK(result.density_boxes.empty());
    CHECK(result.bad_boxes.size() >= 1);
    CHECK(result.bad_volume ==
          doctest::Approx(result.bad_boxes.size() *
                          std::pow(params.L, -3.0 * params.n_beta)));
    // every bad box contains a trap center
    const long sb = static_cast<long>(std::pow(params.L, params.n_beta));
    for (const auto& b : result.bad_boxes) {
        bool holds_point = false;
        const auto& hp = lone.hard_points();
        for (std::size_t i = 0; i < hp.size(); ++i) {
            const auto p = hp.point(i);
            bool in = true;
            for (int c = 0; c < 3; ++c) {
                const double lo = static_cast<double>(b[c]) / sb;
                if (p[c] < lo || p[c] >= lo + 1.0 / sb) in = false;
            }
            holds_point |= in;
        }
        CHECK(holds_point);
    }

    // determinism of the full pipeline
    const auto again = classify(lone, params);
    CHECK(again.bad_boxes == result.bad_boxes);
    CHECK(again.density_boxes == result.density_boxes);
}

TEST_CASE("bad set shrinks when delta is loosened") {
    const double eps = 1.0 / 64;
    auto params = MoeParams::make(eps, 0.5, 0.3, 2, 0.2, 0.5, 0.8, 3);
    params.cap.n_walkers = 50000;
    params.cap.seed = 17;
    const auto field = ObstacleField::sample(
        400.0, 0.0, unit_box_field({}, params.a * eps, 3).box(),
        unit_box_field({}, params.a * eps, 3).geometry(), 23, false);
    auto loose = params;
    loose.delta = 1e-6;
    const auto strict_res = classify(field, params);
    const auto loose_res = classify(field, loose);
    // smaller delta admits more density boxes, hence fewer bad boxes
    CHECK(loose_res.density_boxes.size() >= strict_res.density_boxes.size());
    CHECK(loose_res.bad_boxes.size() <= strict_res.bad_boxes.size());
}

TEST_CASE("volume control diagnostic runs and stays bounded") {
    auto proto = MoeParams::make(1.0 / 32, 0.5, 0.3, 2, 0.2, 0.5, 0.8, 3);
    proto.cap.n_walkers = 8000;
    const std::vector<double> sweep = {1.0 / 16, 1.0 / 32};
    const auto rows = volume_control_diagnostic(0.2, sweep, 0.2, 2, proto, 29, 4);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.max_stat >= r.mean_stat);
        CHECK(r.mean_stat >= 0.0);
        CHECK(std::isfinite(r.max_stat));
    }
}
