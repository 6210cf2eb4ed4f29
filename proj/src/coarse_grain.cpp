#include "sausagelab/coarse_grain.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "sausagelab/parallel.hpp"
#include "sausagelab/rng.hpp"

namespace sausagelab::coarse_grain {

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long ipow(long base, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// n with L^{-n-1} <= y < L^{-n}
int n_of_scale(double y, int L) {
    if (!(y > 0) || !(y < 1)) throw std::domain_error("scale out of (0,1)");
    int n = static_cast<int>(std::ceil(-std::log(y) / std::log(double(L)) - 1e-12)) - 1;
    // settle floating-point edge cases exactly
    while (std::pow(double(L), -n - 1) > y) ++n;
    while (std::pow(double(L), -n) <= y) --n;
    return n;
}

}  // namespace

LAdicIndex LAdicIndex::truncated(int k) const {
    if (k < 0 || k > level())
        throw std::domain_error("LAdicIndex::truncated: bad level");
    LAdicIndex out;
    out.base = base;
    out.digits.assign(digits.begin(), digits.begin() + k);
    return out;
}

LAdicBox l_adic_box(const LAdicIndex& index, int L, int d) {
    if (L < 2 || d < 1 || d > 3) throw std::domain_error("l_adic_box: bad L or d");
    LAdicBox box;
    for (int c = 0; c < d; ++c) box.corner[c] = static_cast<double>(index.base[c]);
    double side = 1.0;
    for (const auto& digit : index.digits) {
        side /= L;
        for (int c = 0; c < d; ++c) {
            if (digit[c] < 0 || digit[c] >= L)
                throw std::domain_error("l_adic_box: digit out of {0..L-1}");
            box.corner[c] += side * digit[c];
        }
    }
    box.side = side;
    return box;
}

BoxCoords ancestor(const BoxCoords& c, int from_level, int to_level, int L) {
    if (to_level > from_level)
        throw std::domain_error("ancestor: to_level must be <= from_level");
    const long f = ipow(L, from_level - to_level);
    return {floor_div(c[0], f), floor_div(c[1], f), floor_div(c[2], f)};
}

MoeParams MoeParams::make(double epsilon, double a, double delta, int L,
                          double alpha, double gamma, double beta, int d) {
    MoeParams p;
    p.d = d;
    p.L = L;
    p.alpha = alpha;
    p.gamma = gamma;
    p.beta = beta;
    p.delta = delta;
    p.epsilon = epsilon;
    p.a = a;
    p.n_alpha = n_of_scale(std::pow(epsilon, alpha), L);
    p.n_gamma = n_of_scale(std::pow(epsilon, gamma), L);
    p.n_beta = n_of_scale(std::pow(epsilon, beta), L);
    p.validate();
    return p;
}

void MoeParams::validate() const {
    if (d != 2 && d != 3) throw std::domain_error("MoeParams: d must be 2 or 3");
    if (L < 2) throw std::domain_error("MoeParams: L must be >= 2");
    if (!(0 < alpha && alpha < gamma && gamma < beta && beta < 1))
        throw std::domain_error("MoeParams: need 0 < alpha < gamma < beta < 1");
    if (!(delta > 0)) throw std::domain_error("MoeParams: delta must be > 0");
    if (!(epsilon > 0) || !(epsilon < 1))
        throw std::domain_error("MoeParams: epsilon must be in (0,1)");
    if (!(a > 0)) throw std::domain_error("MoeParams: a must be > 0");
    auto check = [&](double y, int n) {
        if (!(std::pow(double(L), -n - 1) <= y && y < std::pow(double(L), -n)))
            throw std::domain_error("MoeParams: n_* violates its bracketing");
    };
    check(std::pow(epsilon, alpha), n_alpha);
    check(std::pow(epsilon, gamma), n_gamma);
    check(std::pow(epsilon, beta), n_beta);
    if (n_gamma <= n_alpha)
        throw std::domain_error(
            "MoeParams: no levels between n_alpha and n_gamma; epsilon too large "
            "for these exponents");
    if (n_beta < n_gamma)
        throw std::domain_error("MoeParams: n_beta must be >= n_gamma");
    if (!(4.0 * a * epsilon < std::pow(double(L), -n_gamma)))
        throw std::domain_error(
            "MoeParams: scale separation 4 a epsilon < L^{-n_gamma} violated");
}

double skeleton_capacity(const obstacles::ObstacleField& field,
                         const BoxCoords& coords, int level,
                         const MoeParams& params) {
    const int d = params.d;
    const double side = std::pow(double(params.L), -level);
    const double scale = 1.0 / side;  // L^k
    const auto& pts = field.hard_points();
    std::vector<spectral::Ball> balls;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto p = pts.point(i);
        bool inside = true;
        for (int c = 0; c < d; ++c) {
            const double lo = coords[c] * side;
            if (!(p[c] >= lo && p[c] < lo + side)) inside = false;
        }
        if (!inside) continue;
        spectral::Ball b;
        for (int c = 0; c < d; ++c) b.center[c] = p[c] * scale;
        b.radius = scale * params.a * params.epsilon;
        balls.push_back(b);
    }
    if (balls.empty()) return 0.0;
    const auto method = d == 2 ? spectral::CapacityMethod::grid_solve
                               : spectral::CapacityMethod::hitting_mc;
    return spectral::capacity(balls, d, method, params.cap);
}

std::set<BoxCoords> classify_density_boxes(const obstacles::ObstacleField& field,
                                           const MoeParams& params,
                                           CoarseGrainResult* result) {
    params.validate();
    const int d = params.d;
    const int L = params.L;
    const int k0 = params.n_alpha + 1;  // coarsest level entering the sum
    const auto& pts = field.hard_points();

    // candidate n_gamma-boxes: descendants of occupied level-k0 boxes
    std::set<BoxCoords> coarse_occupied;
    const double inv_side0 = std::pow(double(L), k0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto p = pts.point(i);
        BoxCoords c{0, 0, 0};
        for (int ax = 0; ax < d; ++ax)
            c[ax] = static_cast<long>(std::floor(p[ax] * inv_side0));
        coarse_occupied.insert(c);
    }

    std::map<std::pair<int, BoxCoords>, double> local_caps;
    auto& caps = result ? result->skeleton_caps : local_caps;
    auto cap_of = [&](const BoxCoords& c, int level) {
        const auto key = std::make_pair(level, c);
        auto it = caps.find(key);
        if (it == caps.end())
            it = caps.emplace(key, skeleton_capacity(field, c, level, params)).first;
        return it->second;
    };

    std::set<BoxCoords> density;
    const long span = ipow(L, params.n_gamma - k0);
    const double threshold = params.delta * (params.n_gamma - params.n_alpha);
    for (const auto& coarse : coarse_occupied) {
        BoxCoords off{0, 0, 0};
        const long nz = d == 3 ? span : 1;
        for (off[2] = 0; off[2] < nz; ++off[2])
            for (off[1] = 0; off[1] < span; ++off[1])
                for (off[0] = 0; off[0] < span; ++off[0]) {
                    BoxCoords fine;
                    for (int ax = 0; ax < 3; ++ax)
                        fine[ax] = coarse[ax] * (ax < d ? span : 1) + off[ax];
                    double sum = 0.0;
                    for (int k = k0; k <= params.n_gamma; ++k)
                        sum += cap_of(ancestor(fine, params.n_gamma, k, L), k);
                    if (sum >= threshold) density.insert(fine);
                }
    }
    return density;
}

std::set<BoxCoords> classify_bad_boxes(const obstacles::ObstacleField& field,
                                       const MoeParams& params,
                                       const std::set<BoxCoords>& density_set) {
    params.validate();
    const int d = params.d;
    const auto& pts = field.hard_points();
    const double inv_side = std::pow(double(params.L), params.n_beta);
    std::set<BoxCoords> bad;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto p = pts.point(i);
        BoxCoords c{0, 0, 0};
        for (int ax = 0; ax < d; ++ax)
            c[ax] = static_cast<long>(std::floor(p[ax] * inv_side));
        if (density_set.count(ancestor(c, params.n_beta, params.n_gamma, params.L)))
            continue;  // box lies inside the density set
        bad.insert(c);
    }
    return bad;
}

CoarseGrainResult classify(const obstacles::ObstacleField& field,
                           const MoeParams& params) {
    CoarseGrainResult res;
    res.density_boxes = classify_density_boxes(field, params, &res);
    res.bad_boxes = classify_bad_boxes(field, params, res.density_boxes);
    res.bad_volume = static_cast<double>(res.bad_boxes.size()) *
                     std::pow(double(params.L), -params.d * params.n_beta);
    return res;
}

std::vector<VolumeControlRow> volume_control_diagnostic(
    double nu, const std::vector<double>& eps_sweep, double kappa,
    std::size_t n_trials, const MoeParams& proto, std::uint64_t seed,
    unsigned workers) {
    if (!(kappa > 0)) throw std::domain_error("volume_control: kappa must be > 0");
    for (std::size_t i = 1; i < eps_sweep.size(); ++i)
        if (!(eps_sweep[i] < eps_sweep[i - 1]))
            throw std::domain_error("volume_control: eps sweep must decrease");
    std::vector<VolumeControlRow> rows;
    for (double eps : eps_sweep) {
        MoeParams params = MoeParams::make(eps, proto.a, proto.delta, proto.L,
                                           proto.alpha, proto.gamma, proto.beta,
                                           proto.d);
        params.cap = proto.cap;
        // scaled system: intensity nu eps^{-d}, traps B(x, a eps), unit box C_q
        obstacles::Box box;
        box.d = params.d;
        for (int c = 0; c < params.d; ++c) {
            box.lo[c] = 0.0;
            box.hi[c] = 1.0;
        }
        obstacles::ObstacleGeometry geom;
        geom.hard_radius = params.a * eps;
        geom.sausage_radius = params.a * eps;
        const double intensity = nu * std::pow(eps, -params.d);
        std::vector<double> vol(n_trials, 0.0);
        parallel_for(n_trials, workers, [&](std::size_t trial) {
            const auto field = obstacles::ObstacleField::sample(
                intensity, 0.0, box, geom,
                derive_seed(seed, {0x40e0cULL, static_cast<std::uint64_t>(trial)}),
                false);
            const auto res = classify(field, params);
            // count only bad boxes inside the unit box C_q
            const long n1 = ipow(params.L, params.n_beta);
            std::size_t inside = 0;
            for (const auto& b : res.bad_boxes) {
                bool in = true;
                for (int c = 0; c < params.d; ++c)
                    if (b[c] < 0 || b[c] >= n1) in = false;
                if (in) ++inside;
            }
            vol[trial] = static_cast<double>(inside) *
                         std::pow(double(params.L), -params.d * params.n_beta);
        });
        VolumeControlRow row;
        row.epsilon = eps;
        const double scale = std::pow(eps, -kappa);
        for (double v : vol) {
            row.max_stat = std::max(row.max_stat, scale * v);
            row.mean_stat += scale * v / static_cast<double>(n_trials);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sausagelab::coarse_grain
