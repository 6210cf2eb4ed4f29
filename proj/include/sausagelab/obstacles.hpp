#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nlohmann_fwd.hpp"

namespace sausagelab::obstacles {

struct Box {
    int d = 2;
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};

    double volume() const;
    bool nondegenerate() const;
    static Box centered(int d, double half_side);
};

// Trap shapes are closed balls: hard trap K = B(0, hard_radius), soft shape
// W = soft_height * 1_{B(0, soft_radius)}, sausage body C = B(0, sausage_radius).
struct ObstacleGeometry {
    double hard_radius = 0.5;
    double soft_radius = 0.0;
    double soft_height = 0.0;
    double sausage_radius = 0.5;

    // envelope radius a: max of the trap/shape radii
    double envelope() const;
    void validate() const;
};

// Structure-of-arrays point set with a uniform-grid CSR index (cell = envelope
// radius so radius-a queries touch <= 3^d cells).
class PointSet {
public:
    PointSet() = default;
    PointSet(int d, double cell_size, const Box& bounds,
             std::vector<std::array<double, 3>> pts);

    std::size_t size() const { return xs_.size(); }
    int dim() const { return d_; }

    // exact minimum squared distance to any point within rmax (inf if none)
    double min_dist_sq(const double* q, double rmax) const;
    std::size_t count_within(const double* q, double r) const;

    // raw coordinates (index order), for linear-scan oracles and serialization
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }
    const std::vector<double>& zs() const { return zs_; }
    std::array<double, 3> point(std::size_t i) const;

private:
    void cell_of(const double* q, int* c) const;

    int d_ = 2;
    double cell_ = 1.0;
    std::array<double, 3> lo_{};
    std::array<int, 3> ncell_{1, 1, 1};
    std::vector<double> xs_, ys_, zs_;       // sorted by cell
    std::vector<std::uint32_t> cell_start_;  // CSR offsets, size ncells+1
};

class ObstacleField {
public:
    // Poisson field: hard points ~ Poisson(nu * |padded box|), soft points ~
    // Poisson(mu * |padded box|), i.i.d. uniform in the box padded by the
    // envelope radius on every side (pad=false turns padding off for tests).
    static ObstacleField sample(double nu, double mu, const Box& box,
                                const ObstacleGeometry& geometry,
                                std::uint64_t seed, bool pad = true);

    bool in_hard_set(const double* x) const;
    double soft_potential(const double* x) const;

    // distance from x to the nearest hard-trap *surface* (can be negative
    // inside a trap); +inf if no trap center within cutoff + hard_radius
    double hard_clearance(const double* x, double cutoff) const;

    int dim() const { return box_.d; }
    const Box& box() const { return box_; }
    const ObstacleGeometry& geometry() const { return geom_; }
    double nu() const { return nu_; }
    double mu() const { return mu_; }
    std::uint64_t seed() const { return seed_; }
    const PointSet& hard_points() const { return hard_; }
    const PointSet& soft_points() const { return soft_; }

    nlohmann::json to_json() const;
    static ObstacleField from_json(const nlohmann::json& j);

private:
    Box box_;
    ObstacleGeometry geom_;
    double nu_ = 0.0, mu_ = 0.0;
    std::uint64_t seed_ = 0;
    PointSet hard_, soft_;

    friend ObstacleField make_field_with_points(
        const Box& box, const ObstacleGeometry& geom, double nu, double mu,
        std::uint64_t seed, std::vector<std::array<double, 3>> hard,
        std::vector<std::array<double, 3>> soft);
};

// Deterministic field construction for tests and deserialization.
ObstacleField make_field_with_points(const Box& box, const ObstacleGeometry& geom,
                                     double nu, double mu, std::uint64_t seed,
                                     std::vector<std::array<double, 3>> hard,
                                     std::vector<std::array<double, 3>> soft);

struct ScaledParameters {
    double epsilon;           // t^{-1/(d+2)}
    double tau;               // t * epsilon^2 = t^{d/(d+2)}
    double scaled_nu_factor;  // epsilon^{-d}
};
ScaledParameters scaled_parameters(double t, int d);

}  // namespace sausagelab::obstacles
