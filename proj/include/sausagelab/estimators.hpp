#pragma once

#include <cstdint>
#include <vector>

#include "sausagelab/obstacles.hpp"

namespace sausagelab::estimators {

enum class Estimator { naive, clearing };

struct SurvivalEstimate {
    double t = 0.0;
    double mu = 0.0, nu = 0.0;
    double mean = 0.0;      // in [0,1]; may underflow to 0 for the clearing
    double log_mean = 0.0;  // estimator at large t -- log_mean stays exact
    double stderr_ = 0.0;
    std::size_t n_fields = 0, n_paths = 0;
    Estimator estimator = Estimator::naive;
};

struct ConditionedStats {
    double t = 0.0;
    std::vector<double> scaled_volume_samples;  // t^{-d/(d+2)} |W_t^C|
    std::vector<double> weights;                // 1/phi(Z_tau), positive
    double confinement_fraction = 1.0;
    double sup_norm_exp_moment = 1.0;  // weighted mean exp(t^{-1/(d+2)} sup|Z|)
    bool low_ess = false;              // flagged when ESS < 30

    double effective_sample_size() const;
    double weighted_mean_volume() const;
};

struct EstimatorParams {
    int d = 2;
    obstacles::ObstacleGeometry geometry;  // a = envelope(), rho_C = sausage_radius
    unsigned workers = 0;                  // 0 = hardware concurrency
};

// Plain Monte Carlo over fields x paths: soft weight times hard-survival
// indicator, stderr by batch means over fields. Refuses (std::domain_error)
// when exp(-c(d, mu+nu) t^{d/(d+2)}) < 1e-4 -- use the clearing estimator.
SurvivalEstimate estimate_survival_naive(double mu, double nu, double t,
                                         std::size_t n_fields,
                                         std::size_t n_paths, double dt,
                                         std::uint64_t seed,
                                         const EstimatorParams& params = {});

// Lower-bound estimator from the clearing event: no trap center in B(0,r+a)
// and confinement to B(0,r) up to time t. The confinement factor is
// exp(-lambda_d t/r^2) times an O(1) prefactor estimated once on the unit
// ball by population splitting (n_paths = population size) and rescaled.
SurvivalEstimate estimate_survival_clearing(double mu, double nu, double t,
                                            double r, std::size_t n_paths,
                                            double dt, std::uint64_t seed,
                                            const EstimatorParams& params = {});

// Conditioned-in-ball proxy for Q_t: paths in B(0, R0 t^{1/(d+2)}) via the
// scaled system (radius R0, time tau = t^{d/(d+2)}), importance weights
// 1/phi(Z_tau), streaming sausage volume at radius rho_C.
ConditionedStats conditioned_sausage_stats(double mu, double nu, double t,
                                           double dt, std::size_t n_samples,
                                           std::uint64_t seed, double slack,
                                           const EstimatorParams& params = {});

struct LdpPoint {
    double radius = 0.0;          // strategy radius, scaled units
    double x = 0.0;               // omega_d r^d
    double empirical_rate = 0.0;  // strategy cost minus c(d, nu)
    double i_of_x = 0.0;          // analytic rate function
};

// Strategy-cost curve: clearing cost nu omega_d (r + a eps)^d plus measured
// eigen-decay lambda_hat(r) = lambda_hat(1)/r^2, minus c(d, nu). lambda_hat(1)
// comes from a splitting survival curve on the unit ball (fit over s in [2,6]).
std::vector<LdpPoint> ldp_curve(double nu, double t,
                                const std::vector<double>& radii,
                                std::size_t population, double dt,
                                std::uint64_t seed,
                                const EstimatorParams& params = {});

struct TightnessPoint {
    double t = 0.0;
    double moment = 0.0;  // weighted mean exp(eta t^{-1/(d+2)} sup|Z|)
};

std::vector<TightnessPoint> exponential_tightness_scan(
    double mu, double nu, const std::vector<double>& t_grid, double eta,
    double dt, std::size_t n_samples, std::uint64_t seed,
    const EstimatorParams& params = {});

}  // namespace sausagelab::estimators
