#include "sausagelab/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace sausagelab::constants {

double bessel_j(double order, double x) {
    // J_nu(x) = sum_k (-1)^k / (k! Gamma(k+nu+1)) (x/2)^{2k+nu}
    // Adequate in double for the zero range used here (x <= ~15).
    const double half = x / 2.0;
    const double l2 = std::log(half);
    double sum = 0.0;
    int min_terms = 30;
    for (int k = 0; k < 200; ++k) {
        const double lt = (2.0 * k + order) * l2 - std::lgamma(k + 1.0) -
                          std::lgamma(k + order + 1.0);
        const double term = std::exp(lt);
        sum += (k % 2 == 0) ? term : -term;
        if (k >= min_terms && term < 1e-20 * (std::fabs(sum) + 1e-300)) break;
    }
    return sum;
}

double bessel_first_zero(double order) {
    if (!(order >= 0.0 && order <= 10.0))
        throw std::domain_error("bessel_first_zero: order must be in [0, 10]");
    // J_nu > 0 on (0, j_{nu,1}); scan for the sign change, then bisect.
    double lo = order > 0 ? order : 0.05;
    double f_lo = bessel_j(order, lo);
    double hi = lo;
    const double step = 0.05;
    for (int i = 0; i < 4000; ++i) {
        hi = lo + step;
        const double f_hi = bessel_j(order, hi);
        if (f_lo > 0.0 && f_hi <= 0.0) break;
        lo = hi;
        f_lo = f_hi;
    }
    for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (bessel_j(order, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double lambda_ball(int d) {
    if (d < 1) throw std::domain_error("lambda_ball: d must be >= 1");
    if (d > 10) throw std::domain_error("lambda_ball: d must be <= 10");
    if (d == 1) {
        // ground mode cos(pi x / 2) on (-1,1)
        return M_PI * M_PI / 8.0;
    }
    const double j = bessel_first_zero(d / 2.0 - 1.0);
    return 0.5 * j * j;
}

double unit_ball_volume(int d) {
    if (d < 1) throw std::domain_error("unit_ball_volume: d must be >= 1");
    // omega_d = omega_{d-2} * 2 pi / d, omega_1 = 2, omega_2 = pi
    double v = (d % 2 == 1) ? 2.0 : M_PI;
    for (int k = (d % 2 == 1) ? 3 : 4; k <= d; k += 2) v *= 2.0 * M_PI / k;
    return v;
}

double variational_constant(int d, double nu) {
    if (d < 1) throw std::domain_error("variational_constant: d must be >= 1");
    if (nu < 0.0) throw std::domain_error("variational_constant: nu must be >= 0");
    if (nu == 0.0) return 0.0;
    const double wd = unit_ball_volume(d);
    const double ld = lambda_ball(d);
    return 0.5 * (d + 2) * std::pow(nu * wd, 2.0 / (d + 2)) *
           std::pow(2.0 * ld / d, static_cast<double>(d) / (d + 2));
}

double optimal_radius(int d, double nu) {
    if (d < 1) throw std::domain_error("optimal_radius: d must be >= 1");
    if (!(nu > 0.0))
        throw std::domain_error("optimal_radius: nu must be > 0 (infimum not attained)");
    const double wd = unit_ball_volume(d);
    const double ld = lambda_ball(d);
    return std::pow(2.0 * ld / (d * nu * wd), 1.0 / (d + 2));
}

double rate_function(double x, int d, double nu) {
    if (!(x > 0.0)) throw std::domain_error("rate_function: x must be > 0");
    if (!(nu > 0.0)) throw std::domain_error("rate_function: nu must be > 0");
    const double wd = unit_ball_volume(d);
    const double ld = lambda_ball(d);
    return nu * x + ld * std::pow(wd / x, 2.0 / d) - variational_constant(d, nu);
}

double derivative_identity_check(int d, double nu, double h) {
    if (!(nu > h && h > 0.0))
        throw std::domain_error("derivative_identity_check: need nu > h > 0");
    const double fd =
        (variational_constant(d, nu + h) - variational_constant(d, nu - h)) / (2.0 * h);
    const double exact =
        unit_ball_volume(d) * std::pow(optimal_radius(d, nu), d);
    return std::fabs(fd - exact);
}

Constants Constants::make(int d, double nu) {
    Constants c;
    c.d = d;
    c.nu = nu;
    c.omega_d = unit_ball_volume(d);
    c.lambda_d = lambda_ball(d);
    c.c = variational_constant(d, nu);
    c.r0 = nu > 0.0 ? optimal_radius(d, nu) : 0.0;
    return c;
}

}  // namespace sausagelab::constants
