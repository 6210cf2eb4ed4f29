#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sausagelab/nlohmann_fwd.hpp"

namespace sausagelab::spectral {

// Masked finite-difference lattice. Cell (i,j[,k]) has center
// lo + (i+1/2, j+1/2[, k+1/2])*h; mask true = interior (Dirichlet zero
// outside). The outermost cell ring is forced off-mask.
struct GridDomain {
    int d = 2;
    double h = 1.0 / 64;
    std::array<int, 3> n = {0, 0, 1};       // extents; n[2]==1 for d==2
    std::array<double, 3> lo = {0, 0, 0};   // box corner
    std::vector<std::uint8_t> mask;

    std::size_t cells() const {
        return static_cast<std::size_t>(n[0]) * n[1] * n[2];
    }
    std::size_t idx(int i, int j, int k = 0) const {
        return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
    }
    double center(int axis, int i) const { return lo[axis] + (i + 0.5) * h; }
    std::size_t interior_count() const;
    void clear_boundary_ring();
    void validate() const;  // throws std::domain_error on violated invariants

    // rectangle (lo, hi) interior; mask all cells strictly inside
    static GridDomain box(int d, const double* lo, const double* hi, double h);
    // ball of given radius about the origin, embedded in a padded box
    static GridDomain ball(int d, double radius, double h);

    // unmask every cell whose center lies within r of c
    void carve_ball(const double* c, double r);

    nlohmann::json to_json() const;  // mask as run-length encoding
    static GridDomain from_json(const nlohmann::json& j);
};

struct SpectralResult {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::vector<double> phi1;  // L2-normalized: sum phi^2 h^d == 1
    int iterations = 0;
    double residual = 0.0;

    void dump_csv(const GridDomain& dom, const std::string& path) const;
};

struct EigenOptions {
    double tol = 1e-9;          // eigenvalue increment stop
    double residual_tol = 1e-8; // required final residual
    int max_iterations = 400;
    bool want_lambda2 = true;
};

// Two smallest eigenpairs of -1/2 Laplacian + V with Dirichlet exterior,
// shifted inverse iteration with CG inner solves and deflation for the
// second eigenvalue. `potential` is empty (== 0) or one value per cell.
SpectralResult eigen_dirichlet(const GridDomain& domain,
                               const std::vector<double>& potential = {},
                               const EigenOptions& opts = {});

struct FaberKrahnResult {
    double lambda_domain = 0.0;
    double lambda_ball_same_volume = 0.0;
    double ratio = 0.0;
};
FaberKrahnResult faber_krahn_check(const GridDomain& domain);

struct Ball {
    std::array<double, 3> center = {0, 0, 0};
    double radius = 0.0;
};

enum class CapacityMethod { hitting_mc, grid_solve };

struct CapacityParams {
    double h = 1.0 / 64;
    double truncation_radius = 10.0;  // half-side of the grid_solve box
    std::size_t n_walkers = 100000;   // hitting_mc
    double launch_radius = 8.0;       // hitting_mc start sphere |x|
    std::uint64_t seed = 1;
    double cg_tol = 1e-9;
};

// d==3: Newtonian capacity wrt -1/2 Laplacian (hitting_mc or grid_solve);
// d==2: capacity wrt 1 - 1/2 Laplacian (grid_solve only).
double capacity(const std::vector<Ball>& compact, int d, CapacityMethod method,
                const CapacityParams& params = {});

struct ShiftVsCapacity {
    double shift = 0.0;       // lambda(B(0,R) minus small ball) - lambda(B(0,R))
    double cap_scaled = 0.0;  // 1/log(1/eps) for d==2, eps^{d-2} for d>=3
};
ShiftVsCapacity eigen_shift_vs_capacity(double R, double eps, int d,
                                        double h = 1.0 / 256);

struct VariationalMinimum {
    double c_num = 0.0;
    double r_num = 0.0;
};
// golden-section minimization of nu*omega_d*r^d + lambda_d/r^2
VariationalMinimum variational_minimize(int d, double nu);

}  // namespace sausagelab::spectral
