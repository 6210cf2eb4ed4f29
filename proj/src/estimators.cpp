#include "sausagelab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "sausagelab/brownian.hpp"
#include "sausagelab/constants.hpp"
#include "sausagelab/parallel.hpp"
#include "sausagelab/rng.hpp"
#include "sausagelab/sausage.hpp"

namespace sausagelab::estimators {

namespace {

// Interpolate log P(T_{B(0,1)} > s) from a splitting curve; beyond the
// measured horizon, extrapolate with the analytic decay rate lambda_d.
double log_unit_ball_survival(const brownian::SurvivalCurve& curve, double s,
                              double lambda_d) {
    if (curve.s.empty()) throw std::domain_error("empty survival curve");
    if (s <= curve.s.front())
        return curve.log_survival.front() * (s / curve.s.front());
    for (std::size_t i = 1; i < curve.s.size(); ++i) {
        if (s <= curve.s[i]) {
            const double f = (s - curve.s[i - 1]) / (curve.s[i] - curve.s[i - 1]);
            return curve.log_survival[i - 1] +
                   f * (curve.log_survival[i] - curve.log_survival[i - 1]);
        }
    }
    // prefactor pinned at the last measured point, pure eigen-decay after
    return curve.log_survival.back() - lambda_d * (s - curve.s.back());
}

const brownian::SurvivalCurve& cached_unit_curve(int d, std::size_t population,
                                                 double dt, std::uint64_t seed) {
    static std::mutex mtx;
    static std::map<std::tuple<int, std::size_t, double, std::uint64_t>,
                    brownian::SurvivalCurve>
        cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(d, population, dt, seed);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache
                 .emplace(key, brownian::ball_survival_splitting(
                                   1.0, 8.0, 0.25, population, dt, true,
                                   derive_seed(seed, {0xc1ea41ULL}), d))
                 .first;
    }
    return it->second;
}

struct WalkStats {
    double weight = 0.0;
    double sup = 0.0;
    double scaled_volume = 0.0;
};

}  // namespace

double ConditionedStats::effective_sample_size() const {
    double s = 0, s2 = 0;
    for (double w : weights) {
        s += w;
        s2 += w * w;
    }
    return s2 > 0 ? s * s / s2 : 0.0;
}

double ConditionedStats::weighted_mean_volume() const {
    double s = 0, sv = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        s += weights[i];
        sv += weights[i] * scaled_volume_samples[i];
    }
    return s > 0 ? sv / s : 0.0;
}

SurvivalEstimate estimate_survival_naive(double mu, double nu, double t,
                                         std::size_t n_fields,
                                         std::size_t n_paths, double dt,
                                         std::uint64_t seed,
                                         const EstimatorParams& params) {
    if (mu < 0 || nu < 0 || !(t > 0) || !(dt > 0) || n_fields == 0 || n_paths == 0)
        throw std::domain_error("estimate_survival_naive: bad parameters");
    params.geometry.validate();
    const int d = params.d;
    if (mu + nu > 0) {
        const double c = constants::variational_constant(d, mu + nu);
        const double log_guard = -c * std::pow(t, static_cast<double>(d) / (d + 2));
        if (log_guard < std::log(1e-4))
            throw std::domain_error(
                "estimate_survival_naive: survival probability below the 1e-4 "
                "guard at this (t, mu+nu); use estimate_survival_clearing");
    }
    const double a = params.geometry.envelope();
    const auto box =
        obstacles::Box::centered(d, 5.0 * std::sqrt(t) + a + 1.0);
    double origin[3] = {0, 0, 0};

    std::vector<double> field_means(n_fields, 0.0);
    parallel_for(n_fields, params.workers, [&](std::size_t i) {
        const auto field = obstacles::ObstacleField::sample(
            nu, mu, box, params.geometry, derive_seed(seed, {0xf1e1dULL, i}));
        double acc = 0.0;
        for (std::size_t j = 0; j < n_paths; ++j) {
            const auto path = brownian::simulate_path(
                t, dt, d, origin, derive_seed(seed, {0x9a7bULL, i, j}));
            const auto hit = brownian::first_hit_hard(
                path, field, true, derive_seed(seed, {0xb21dULL, i, j}));
            if (!hit) acc += brownian::soft_survival_weight(path, field, dt);
        }
        field_means[i] = acc / static_cast<double>(n_paths);
    });

    SurvivalEstimate est;
    est.t = t;
    est.mu = mu;
    est.nu = nu;
    est.n_fields = n_fields;
    est.n_paths = n_paths;
    est.estimator = Estimator::naive;
    double m = 0;
    for (double v : field_means) m += v;
    m /= static_cast<double>(n_fields);
    est.mean = m;
    est.log_mean = m > 0 ? std::log(m) : -std::numeric_limits<double>::infinity();
    if (n_fields > 1) {
        double ss = 0;
        for (double v : field_means) ss += (v - m) * (v - m);
        est.stderr_ = std::sqrt(ss / (static_cast<double>(n_fields) *
                                      static_cast<double>(n_fields - 1)));
    }
    return est;
}

SurvivalEstimate estimate_survival_clearing(double mu, double nu, double t,
                                            double r, std::size_t n_paths,
                                            double dt, std::uint64_t seed,
                                            const EstimatorParams& params) {
    if (!(r > 0) || !(t > 0) || !(dt > 0) || mu < 0 || nu < 0 || n_paths == 0)
        throw std::domain_error("estimate_survival_clearing: bad parameters");
    params.geometry.validate();
    const int d = params.d;
    const double a = params.geometry.envelope();
    const double wd = constants::unit_ball_volume(d);
    const double lambda_d = constants::lambda_ball(d);
    // clearing factor: no trap center in B(0, r+a)
    const double log_clear = -(mu + nu) * wd * std::pow(r + a, d);
    // confinement factor by Brownian scaling: P(T_{B(0,r)} > t) = P_unit(t/r^2)
    const auto& curve = cached_unit_curve(d, n_paths, dt, seed);
    const double s = t / (r * r);
    const double log_conf = log_unit_ball_survival(curve, s, lambda_d);

    SurvivalEstimate est;
    est.t = t;
    est.mu = mu;
    est.nu = nu;
    est.n_fields = 1;
    est.n_paths = n_paths;
    est.estimator = Estimator::clearing;
    est.log_mean = log_clear + log_conf;
    est.mean = std::exp(est.log_mean);  // may underflow to 0; log_mean is exact
    // rough error bar: per-checkpoint binomial noise of the splitting curve,
    // independent intervals summed in quadrature up to min(s, horizon)
    const double cp = curve.s.size() > 1 ? curve.s[1] - curve.s[0] : curve.s[0];
    const double n_cp = std::min(s, curve.s.back()) / cp;
    const double f = std::exp(-lambda_d * cp);  // typical per-interval survival
    const double var_log =
        std::max(n_cp, 1.0) * (1.0 - f) / (f * static_cast<double>(n_paths));
    est.stderr_ = est.mean * std::sqrt(var_log);
    return est;
}

ConditionedStats conditioned_sausage_stats(double mu, double nu, double t,
                                           double dt, std::size_t n_samples,
                                           std::uint64_t seed, double slack,
                                           const EstimatorParams& params) {
    if (!(t > 0) || !(dt > 0) || n_samples == 0 || slack < 0 || mu < 0 || nu < 0)
        throw std::domain_error("conditioned_sausage_stats: bad parameters");
    params.geometry.validate();
    const int d = params.d;
    if (d != 2 && d != 3)
        throw std::domain_error("conditioned_sausage_stats: d must be 2 or 3");
    const auto consts = constants::Constants::make(d, mu + nu > 0 ? mu + nu : 1.0);
    const double r0 = consts.r0;
    const auto sc = obstacles::scaled_parameters(t, d);
    const double eps = sc.epsilon;
    const double dt_s = dt * eps * eps;  // dt is in original time units
    const double rho = params.geometry.sausage_radius;
    const double extent = r0 / eps + rho;  // original-unit confinement radius

    std::vector<WalkStats> stats(n_samples);
    parallel_for(n_samples, params.workers, [&](std::size_t k) {
        const std::uint64_t s = derive_seed(seed, {0xc0bd17ULL, k});
        if (d == 2) {
            sausage::OccupancyGrid2D grid(-extent - 1, -extent - 1, extent + 1,
                                          extent + 1, rho / 16.0, rho);
            double prev[2];
            bool have_prev = false;
            auto res = brownian::conditioned_walk_stream(
                sc.tau, dt_s, r0, d, s, 1000, [&](const double* z) {
                    const double x = z[0] / eps, y = z[1] / eps;
                    if (have_prev)
                        grid.add_segment(prev[0], prev[1], x, y);
                    else
                        grid.add_point(x, y);
                    prev[0] = x;
                    prev[1] = y;
                    have_prev = true;
                });
            stats[k] = {1.0 / res.end_phi, res.sup_norm,
                        std::pow(eps, d) * grid.volume()};
        } else {
            // 3-d: stamp rho-balls at recorded points (spacing sqrt(dt) << rho)
            const double h = rho / 8.0;
            const long n1 = 2 * static_cast<long>(std::ceil((extent + 1) / h)) + 1;
            const long half = n1 / 2;
            std::vector<std::uint8_t> marked(
                static_cast<std::size_t>(n1) * n1 * n1, 0);
            // precomputed ball offsets
            std::vector<std::array<long, 3>> offs;
            const long rad = static_cast<long>(std::ceil(rho / h)) + 1;
            for (long z = -rad; z <= rad; ++z)
                for (long y = -rad; y <= rad; ++y)
                    for (long x = -rad; x <= rad; ++x)
                        if ((x * x + y * y + z * z) * h * h <= rho * rho)
                            offs.push_back({x, y, z});
            double last[3] = {1e300, 0, 0};
            auto stamp = [&](const double* p) {
                const double moved = std::hypot(p[0] - last[0], p[1] - last[1],
                                                p[2] - last[2]);
                if (moved < h / 4.0) return;
                for (int c = 0; c < 3; ++c) last[c] = p[c];
                long base[3];
                for (int c = 0; c < 3; ++c)
                    base[c] = static_cast<long>(std::floor(p[c] / h)) + half;
                for (const auto& o : offs) {
                    const long x = base[0] + o[0], y = base[1] + o[1],
                               z = base[2] + o[2];
                    if (x < 0 || y < 0 || z < 0 || x >= n1 || y >= n1 || z >= n1)
                        continue;
                    marked[(static_cast<std::size_t>(z) * n1 + y) * n1 + x] = 1;
                }
            };
            auto res = brownian::conditioned_walk_stream(
                sc.tau, dt_s, r0, d, s, 1000, [&](const double* z) {
                    const double p[3] = {z[0] / eps, z[1] / eps, z[2] / eps};
                    stamp(p);
                });
            std::size_t count = 0;
            for (auto m : marked) count += m;
            stats[k] = {1.0 / res.end_phi, res.sup_norm,
                        std::pow(eps, d) * count * h * h * h};
        }
    });

    ConditionedStats out;
    out.t = t;
    out.scaled_volume_samples.reserve(n_samples);
    out.weights.reserve(n_samples);
    double wsum = 0, confined = 0, moment = 0;
    for (const auto& st : stats) {
        if (!(st.weight > 0) || !std::isfinite(st.weight))
            throw std::runtime_error("conditioned_sausage_stats: bad weight");
        out.scaled_volume_samples.push_back(st.scaled_volume);
        out.weights.push_back(st.weight);
        wsum += st.weight;
        if (st.sup <= r0 + slack) confined += st.weight;
        moment += st.weight * std::exp(st.sup);  // eta = 1, scaled sup-norm
    }
    out.confinement_fraction = confined / wsum;
    out.sup_norm_exp_moment = moment / wsum;
    out.low_ess = out.effective_sample_size() < 30.0;
    return out;
}

std::vector<LdpPoint> ldp_curve(double nu, double t,
                                const std::vector<double>& radii,
                                std::size_t population, double dt,
                                std::uint64_t seed,
                                const EstimatorParams& params) {
    if (!(nu > 0) || !(t > 0)) throw std::domain_error("ldp_curve: bad parameters");
    for (double r : radii)
        if (!(r > 0)) throw std::domain_error("ldp_curve: radii must be positive");
    params.geometry.validate();
    const int d = params.d;
    const double wd = constants::unit_ball_volume(d);
    const double c = constants::variational_constant(d, nu);
    const double a = params.geometry.envelope();
    const double eps = obstacles::scaled_parameters(t, d).epsilon;
    // measured unit-ball decay rate, rescaled to each strategy radius by 1/r^2
    const double lambda_hat =
        brownian::ball_survival_splitting(1.0, 6.0, 0.5, population, dt, true,
                                          derive_seed(seed, {0x1d9cULL}), d)
            .fitted_rate(2.0, 6.0);
    std::vector<LdpPoint> out;
    out.reserve(radii.size());
    for (double r : radii) {
        LdpPoint p;
        p.radius = r;
        p.x = wd * std::pow(r, d);
        p.empirical_rate =
            nu * wd * std::pow(r + a * eps, d) + lambda_hat / (r * r) - c;
        p.i_of_x = constants::rate_function(p.x, d, nu);
        out.push_back(p);
    }
    return out;
}

std::vector<TightnessPoint> exponential_tightness_scan(
    double mu, double nu, const std::vector<double>& t_grid, double eta,
    double dt, std::size_t n_samples, std::uint64_t seed,
    const EstimatorParams& params) {
    if (!(eta >= 0) || n_samples == 0 || !(dt > 0))
        throw std::domain_error("exponential_tightness_scan: bad parameters");
    const int d = params.d;
    const auto consts = constants::Constants::make(d, mu + nu > 0 ? mu + nu : 1.0);
    std::vector<TightnessPoint> out;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const double t = t_grid[ti];
        const auto sc = obstacles::scaled_parameters(t, d);
        const double dt_s = dt * sc.epsilon * sc.epsilon;
        std::vector<double> w(n_samples), m(n_samples);
        parallel_for(n_samples, params.workers, [&](std::size_t k) {
            auto cp = brownian::sample_conditioned_in_ball(
                sc.tau, dt_s, consts.r0, d, derive_seed(seed, {0x719417ULL, ti, k}),
                false);
            w[k] = 1.0 / cp.end_eigenfunction;
            // eta * t^{-1/(d+2)} sup|Z| = eta * (scaled sup-norm)
            m[k] = w[k] * std::exp(eta * cp.path.sup_norm);
        });
        double ws = 0, ms = 0;
        for (std::size_t k = 0; k < n_samples; ++k) {
            ws += w[k];
            ms += m[k];
        }
        out.push_back({t, ms / ws});
    }
    return out;
}

}  // namespace sausagelab::estimators
