#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sausagelab/obstacles.hpp"

namespace sausagelab::brownian {

struct PathSample {
    int d = 2;
    double dt = 1e-3;
    std::vector<double> pos;  // n_steps+1 points, interleaved (n*d doubles)
    std::optional<double> killed_at;
    double soft_integral = 0.0;
    std::map<std::string, std::optional<double>> exited_at;
    double sup_norm = 0.0;

    std::size_t size() const { return pos.size() / d; }
    double time(std::size_t i) const { return static_cast<double>(i) * dt; }
    const double* point(std::size_t i) const { return pos.data() + i * d; }
    std::vector<double> times() const;

    void recompute_sup_norm();
    void dump_csv(const std::string& path) const;
};

// Standard Brownian path, Gaussian increments scaled by sqrt(dt).
PathSample simulate_path(double t, double dt, int d, const double* start,
                         std::uint64_t seed);

// First entry into the hard set S(omega). With bridge_correction, between
// consecutive endpoints a crossing of the nearest trap is declared with the
// half-space Brownian-bridge probability exp(-2*dx*dy/dt); the decision is a
// pure function of (path, field, path seed-independent stream).
std::optional<double> first_hit_hard(const PathSample& path,
                                     const obstacles::ObstacleField& field,
                                     bool bridge_correction,
                                     std::uint64_t bridge_seed = 0x6b71d6e5ULL);

// exp(-sum_k V(Z_{t_k}) dt), left-endpoint quadrature over [0, end of path].
double soft_survival_weight(const PathSample& path,
                            const obstacles::ObstacleField& field, double dt);

// First recorded time with |Z_s - center| > radius.
std::optional<double> exit_time(const PathSample& path, const double* center,
                                double radius);

struct ConditionedPath {
    PathSample path;
    std::size_t resample_count = 0;
    double end_eigenfunction = 1.0;  // phi(Z_tau), for importance weights
};

// Euler scheme for the eigenfunction-drift (Doob transform) diffusion
// conditioned to stay in B(0,R): dZ = grad log phi(Z) dt + dB, phi the radial
// principal Dirichlet eigenfunction. Never exits by construction.
ConditionedPath sample_conditioned_in_ball(double tau, double dt, double radius,
                                           int d, std::uint64_t seed,
                                           bool record_path = true,
                                           std::size_t resample_cap = 1000);

// Radial principal eigenfunction of -1/2 Laplacian on B(0,R), L2-normalized.
double ball_eigenfunction(double r, double radius, int d);

// Streaming variant of the conditioned sampler: positions are handed to
// on_step instead of being stored (used for long horizons where a PathSample
// would not fit in memory).
struct ConditionedWalkResult {
    double end_phi = 1.0;
    double sup_norm = 0.0;
    std::size_t resamples = 0;
    double end[3] = {0, 0, 0};
};
ConditionedWalkResult conditioned_walk_stream(
    double tau, double dt, double radius, int d, std::uint64_t seed,
    std::size_t resample_cap, const std::function<void(const double*)>& on_step);

// Survival curve of BM in B(0,radius) by fixed-population splitting:
// checkpoints every `checkpoint` up to `horizon`, per-interval survival
// fractions multiplied into log S(s). Population is resampled back to size N
// at each checkpoint, so the curve reaches far smaller probabilities than
// naive MC with the same path budget.
struct SurvivalCurve {
    std::vector<double> s;
    std::vector<double> log_survival;

    // least-squares slope of log S over s in [s_lo, s_hi]; returns the decay
    // rate (positive number)
    double fitted_rate(double s_lo, double s_hi) const;
};

SurvivalCurve ball_survival_splitting(double radius, double horizon,
                                      double checkpoint, std::size_t population,
                                      double dt, bool bridge_correction,
                                      std::uint64_t seed, int d = 2);

}  // namespace sausagelab::brownian
