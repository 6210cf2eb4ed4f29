#include "sausagelab/brownian.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>

#include "sausagelab/constants.hpp"
#include "sausagelab/rng.hpp"

namespace sausagelab::brownian {

std::vector<double> PathSample::times() const {
    std::vector<double> t(size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = time(i);
    return t;
}

void PathSample::recompute_sup_norm() {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const double* p = point(i);
        double n2 = 0;
        for (int c = 0; c < d; ++c) n2 += p[c] * p[c];
        m = std::max(m, n2);
    }
    sup_norm = std::sqrt(m);
}

void PathSample::dump_csv(const std::string& file) const {
    std::FILE* f = std::fopen(file.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + file);
    std::fprintf(f, "t");
    for (int c = 0; c < d; ++c) std::fprintf(f, ",x%d", c + 1);
    std::fprintf(f, "\n");
    for (std::size_t i = 0; i < size(); ++i) {
        std::fprintf(f, "%.17g", time(i));
        for (int c = 0; c < d; ++c) std::fprintf(f, ",%.17g", point(i)[c]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

PathSample simulate_path(double t, double dt, int d, const double* start,
                         std::uint64_t seed) {
    if (!(t > 0) || !(dt > 0) || dt > t)
        throw std::domain_error("simulate_path: need 0 < dt <= t");
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(t / dt));
    PathSample p;
    p.d = d;
    p.dt = dt;
    p.pos.resize((n_steps + 1) * d);
    Rng rng(derive_seed(seed, {0xb7041ULL}));
    const double sq = std::sqrt(dt);
    double cur[3] = {0, 0, 0};
    for (int c = 0; c < d; ++c) cur[c] = start ? start[c] : 0.0;
    double m2 = 0;
    for (int c = 0; c < d; ++c) {
        p.pos[c] = cur[c];
        m2 += cur[c] * cur[c];
    }
    double sup2 = m2;
    for (std::size_t i = 1; i <= n_steps; ++i) {
        double n2 = 0;
        for (int c = 0; c < d; ++c) {
            cur[c] += sq * rng.normal();
            p.pos[i * d + c] = cur[c];
            n2 += cur[c] * cur[c];
        }
        sup2 = std::max(sup2, n2);
    }
    p.sup_norm = std::sqrt(sup2);
    return p;
}

std::optional<double> first_hit_hard(const PathSample& path,
                                     const obstacles::ObstacleField& field,
                                     bool bridge_correction,
                                     std::uint64_t bridge_seed) {
    const double aK = field.geometry().hard_radius;
    if (aK <= 0 || field.hard_points().size() == 0) return std::nullopt;
    const double dt = path.dt;
    const double cutoff = 8.0 * std::sqrt(dt);  // beyond this the bridge
                                                // crossing probability is nil
    if (field.in_hard_set(path.point(0))) return 0.0;
    Rng rng(derive_seed(bridge_seed, {0xb41d6eULL}));
    double prev_clear =
        bridge_correction ? field.hard_clearance(path.point(0), cutoff)
                          : std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double* x = path.point(i);
        if (field.in_hard_set(x)) return path.time(i);
        if (!bridge_correction) continue;
        const double clear = field.hard_clearance(x, cutoff);
        // one uniform per step regardless of geometry, so the decision is
        // monotone under adding traps on a frozen path
        const double u = rng.u01();
        if (std::isfinite(prev_clear) && std::isfinite(clear)) {
            const double p_cross = std::exp(-2.0 * prev_clear * clear / dt);
            if (u < p_cross) return path.time(i);
        }
        prev_clear = clear;
    }
    return std::nullopt;
}

double soft_survival_weight(const PathSample& path,
                            const obstacles::ObstacleField& field, double dt) {
    if (field.geometry().soft_height <= 0 || field.soft_points().size() == 0)
        return 1.0;
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        integral += field.soft_potential(path.point(i)) * dt;
    return std::exp(-integral);
}

std::optional<double> exit_time(const PathSample& path, const double* center,
                                double radius) {
    if (!(radius > 0)) throw std::domain_error("exit_time: radius must be > 0");
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double* p = path.point(i);
        double d2 = 0;
        for (int c = 0; c < path.d; ++c) {
            const double dd = p[c] - (center ? center[c] : 0.0);
            d2 += dd * dd;
        }
        if (d2 > r2) return path.time(i);
    }
    return std::nullopt;
}

double ball_eigenfunction(double r, double radius, int d) {
    // phi(r) = C r^{-p} J_p(j r / R), p = d/2 - 1, with L2(B(0,R)) norm 1:
    // C = 1 / (sqrt(S_d / 2) * R * |J_{p+1}(j)|), S_d the sphere surface area.
    using constants::bessel_first_zero;
    using constants::bessel_j;
    const double p = d / 2.0 - 1.0;
    const double j = (d == 1) ? M_PI / 2.0 : bessel_first_zero(p);
    const double sd = d * constants::unit_ball_volume(d);
    const double C = 1.0 / (std::sqrt(0.5 * sd) * radius *
                            std::fabs(bessel_j(p + 1.0, j)));
    const double u = j * r / radius;
    double radial;
    if (r < 1e-9 * radius) {
        // r^{-p} J_p(j r/R) -> (j/(2R))^p / Gamma(p+1)
        radial = std::pow(j / (2.0 * radius), p) / std::tgamma(p + 1.0);
    } else {
        radial = std::pow(r, -p) * bessel_j(p, u);
    }
    return C * radial;
}

namespace {

// drift b(r) = d/dr log phi = -(j/R) J_{p+1}(u)/J_p(u), tabulated via the
// smooth product q(r) = b(r) * (R - r) (q -> -1 at the boundary).
struct DriftTable {
    double radius;
    int d;
    std::vector<double> q;
    double dr;

    DriftTable(double R, int dim) : radius(R), d(dim) {
        using constants::bessel_first_zero;
        using constants::bessel_j;
        const double p = d / 2.0 - 1.0;
        const double j = (d == 1) ? M_PI / 2.0 : bessel_first_zero(p);
        const int n = 4096;
        q.resize(n + 1);
        dr = R / n;
        for (int i = 0; i <= n; ++i) {
            const double r = i * dr;
            const double u = j * r / R;
            double b;
            if (i == 0) {
                b = 0.0;
            } else if (i == n) {
                q[i] = -1.0;
                continue;
            } else {
                const double jp = bessel_j(p, u);
                const double jp1 = bessel_j(p + 1.0, u);
                b = -(j / R) * jp1 / std::max(jp, 1e-300);
            }
            q[i] = b * (R - r);
        }
    }

    double drift(double r) const {
        if (r >= radius) return -std::numeric_limits<double>::infinity();
        const double x = r / dr;
        const int i = std::min(static_cast<int>(x), static_cast<int>(q.size()) - 2);
        const double f = x - i;
        const double qi = q[i] * (1 - f) + q[i + 1] * f;
        return qi / (radius - r);
    }
};

}  // namespace

// Core conditioned walk; invokes on_step for every recorded position
// (including the start).
static ConditionedWalkResult conditioned_walk(
    double tau, double dt, double radius, int d, std::uint64_t seed,
    std::size_t resample_cap, const std::function<void(const double*)>& on_step) {
    if (!(tau > 0) || !(radius > 0) || !(dt > 0))
        throw std::domain_error("sample_conditioned_in_ball: bad parameters");
    static thread_local std::unique_ptr<DriftTable> table;
    if (!table || table->radius != radius || table->d != d)
        table = std::make_unique<DriftTable>(radius, d);

    const std::size_t n_steps = static_cast<std::size_t>(std::llround(tau / dt));
    Rng rng(derive_seed(seed, {0xc0de4ULL}));
    const double sq = std::sqrt(dt);
    const double drift_cap = 1.0 / sq;
    double z[3] = {0, 0, 0};
    double sup2 = 0.0;
    std::size_t resamples = 0;
    if (on_step) on_step(z);
    for (std::size_t i = 1; i <= n_steps; ++i) {
        double r2 = 0;
        for (int c = 0; c < d; ++c) r2 += z[c] * z[c];
        const double r = std::sqrt(r2);
        double b = table->drift(r);
        b = std::max(b, -drift_cap);
        double bx[3] = {0, 0, 0};
        if (r > 0) {
            for (int c = 0; c < d; ++c) bx[c] = b * z[c] / r;
        }
        std::size_t tries = 0;
        double nz[3];
        for (;;) {
            double n2 = 0;
            for (int c = 0; c < d; ++c) {
                nz[c] = z[c] + bx[c] * dt + sq * rng.normal();
                n2 += nz[c] * nz[c];
            }
            if (n2 < radius * radius) {
                sup2 = std::max(sup2, n2);
                break;
            }
            ++resamples;
            if (++tries > resample_cap)
                throw std::runtime_error(
                    "sample_conditioned_in_ball: resample cap exceeded; "
                    "reduce dt");
        }
        for (int c = 0; c < d; ++c) z[c] = nz[c];
        if (on_step) on_step(z);
    }
    ConditionedWalkResult res;
    double r = 0;
    for (int c = 0; c < d; ++c) {
        res.end[c] = z[c];
        r += z[c] * z[c];
    }
    res.end_phi = ball_eigenfunction(std::sqrt(r), radius, d);
    res.sup_norm = std::sqrt(sup2);
    res.resamples = resamples;
    return res;
}

ConditionedWalkResult conditioned_walk_stream(
    double tau, double dt, double radius, int d, std::uint64_t seed,
    std::size_t resample_cap, const std::function<void(const double*)>& on_step) {
    return conditioned_walk(tau, dt, radius, d, seed, resample_cap, on_step);
}

ConditionedPath sample_conditioned_in_ball(double tau, double dt, double radius,
                                           int d, std::uint64_t seed,
                                           bool record_path,
                                           std::size_t resample_cap) {
    ConditionedPath cp;
    cp.path.d = d;
    cp.path.dt = dt;
    std::function<void(const double*)> rec;
    if (record_path) {
        const std::size_t n_steps = static_cast<std::size_t>(std::llround(tau / dt));
        cp.path.pos.reserve((n_steps + 1) * d);
        rec = [&](const double* z) {
            for (int c = 0; c < d; ++c) cp.path.pos.push_back(z[c]);
        };
    }
    auto res = conditioned_walk(tau, dt, radius, d, seed, resample_cap, rec);
    cp.resample_count = res.resamples;
    cp.end_eigenfunction = res.end_phi;
    cp.path.sup_norm = res.sup_norm;
    if (!record_path) {
        cp.path.pos.assign(res.end, res.end + d);
    }
    return cp;
}

double SurvivalCurve::fitted_rate(double s_lo, double s_hi) const {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < s_lo - 1e-12 || s[i] > s_hi + 1e-12) continue;
        sx += s[i];
        sy += log_survival[i];
        sxx += s[i] * s[i];
        sxy += s[i] * log_survival[i];
        ++n;
    }
    if (n < 2) throw std::domain_error("fitted_rate: fewer than 2 points in range");
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

SurvivalCurve ball_survival_splitting(double radius, double horizon,
                                      double checkpoint, std::size_t population,
                                      double dt, bool bridge_correction,
                                      std::uint64_t seed, int d) {
    if (!(radius > 0) || !(horizon > 0) || !(checkpoint > 0) || population == 0)
        throw std::domain_error("ball_survival_splitting: bad parameters");
    if (d < 1 || d > 3)
        throw std::domain_error("ball_survival_splitting: d must be 1, 2, or 3");
    const std::size_t steps_per_cp =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(checkpoint / dt)));
    const std::size_t n_cp =
        static_cast<std::size_t>(std::llround(horizon / checkpoint));
    Rng rng(derive_seed(seed, {0x5b711ULL}));
    std::vector<double> pos(population * d, 0.0);
    std::vector<double> clear_prev(population, radius);
    SurvivalCurve curve;
    double log_s = 0.0;
    const double sq = std::sqrt(dt);
    const double r2max = radius * radius;
    for (std::size_t cp = 0; cp < n_cp; ++cp) {
        std::size_t alive = 0;
        const std::size_t n = clear_prev.size();
        for (std::size_t p = 0; p < n; ++p) {
            double z[3] = {0, 0, 0};
            for (int c = 0; c < d; ++c) z[c] = pos[p * d + c];
            double dprev = clear_prev[p];
            bool dead = false;
            for (std::size_t s = 0; s < steps_per_cp; ++s) {
                double r2 = 0;
                for (int c = 0; c < d; ++c) {
                    z[c] += sq * rng.normal();
                    r2 += z[c] * z[c];
                }
                if (r2 >= r2max) {
                    dead = true;
                    break;
                }
                const double dcur = radius - std::sqrt(r2);
                if (bridge_correction) {
                    const double e = 2.0 * dprev * dcur / dt;
                    if (e < 30.0 && rng.u01() < std::exp(-e)) {
                        dead = true;
                        break;
                    }
                }
                dprev = dcur;
            }
            if (!dead) {
                for (int c = 0; c < d; ++c) pos[alive * d + c] = z[c];
                clear_prev[alive] = dprev;
                ++alive;
            }
        }
        if (alive == 0)
            throw std::runtime_error("ball_survival_splitting: population died out");
        log_s += std::log(static_cast<double>(alive) / static_cast<double>(n));
        curve.s.push_back((cp + 1) * checkpoint);
        curve.log_survival.push_back(log_s);
        // resample survivors back to the target population
        std::vector<double> npos(population * d);
        std::vector<double> nc(population);
        for (std::size_t p = 0; p < population; ++p) {
            const std::size_t pick =
                static_cast<std::size_t>(rng.u01() * static_cast<double>(alive));
            const std::size_t i = std::min(pick, alive - 1);
            for (int c = 0; c < d; ++c) npos[p * d + c] = pos[i * d + c];
            nc[p] = clear_prev[i];
        }
        pos.swap(npos);
        clear_prev.swap(nc);
    }
    return curve;
}

}  // namespace sausagelab::brownian
