#pragma once

#include <cmath>

namespace sausagelab::constants {

// First positive zero of the Bessel function J_order, order in [0, 10].
// Power-series evaluation bracketed by scan + bisection; abs error <= 1e-10.
double bessel_first_zero(double order);

// Bessel J_nu(x) by its power series (exposed for tests and the conditioned
// path sampler's eigenfunction profile).
double bessel_j(double order, double x);

// Principal Dirichlet eigenvalue of -1/2 Laplacian on the unit ball B(0,1):
// j_{d/2-1,1}^2 / 2. Supported for 1 <= d <= 10.
double lambda_ball(int d);

// Volume of the d-dimensional unit ball, by the half-integer recurrence.
double unit_ball_volume(int d);

// c(d,nu) = (d+2)/2 * (nu*omega_d)^{2/(d+2)} * (2*lambda_d/d)^{d/(d+2)}
double variational_constant(int d, double nu);

// R0(d,nu) = (2*lambda_d / (d*nu*omega_d))^{1/(d+2)}; requires nu > 0.
double optimal_radius(int d, double nu);

// I(x) = nu*x + lambda_d*(omega_d/x)^{2/d} - c(d,nu); requires x > 0.
double rate_function(double x, int d, double nu);

// |central difference of c(d,.) at nu with step h  -  omega_d*R0^d|.
double derivative_identity_check(int d, double nu, double h);

struct Constants {
    int d = 2;
    double nu = 1.0;
    double omega_d = 0.0;
    double lambda_d = 0.0;
    double c = 0.0;   // variational constant
    double r0 = 0.0;  // optimal radius (0 when nu == 0)

    static Constants make(int d, double nu);

    double x_star() const { return omega_d * std::pow(r0, d); }
};

}  // namespace sausagelab::constants
