#pragma once

#include <cstdint>

#include "sausagelab/brownian.hpp"

namespace sausagelab::sausage {

enum class Method { grid, hit_or_miss };

struct SausageEstimate {
    double volume = 0.0;  // length^d
    double stderr_ = 0.0; // 0 for the deterministic grid method
    Method method = Method::grid;
    double resolution = 0.0;  // grid spacing, or sample count for MC
};

// Occupancy count over an origin-anchored grid of spacing h: cells whose
// centers lie within rho of the polyline through the recorded positions.
// Requires h <= rho/4. Deterministic.
SausageEstimate sausage_volume_grid(const brownian::PathSample& path, double rho,
                                    double h);

// Hit-or-miss over the rho-padded bounding box of the path.
SausageEstimate sausage_volume_mc(const brownian::PathSample& path, double rho,
                                  std::size_t n_samples, std::uint64_t seed);

// Cross-section bound: directional extent times omega_{d-1} rho^{d-1}.
// Always <= the true sausage volume.
double ballistic_lower_bound(const brownian::PathSample& path, double rho,
                             const double* direction);

// Streaming 2-d occupancy accumulator for paths too long to store: capsule
// segments are rasterized into a fixed bitmap as the walk progresses.
class OccupancyGrid2D {
public:
    // grid covers [lo, hi]^2, origin-anchored cells of spacing h
    OccupancyGrid2D(double lo_x, double lo_y, double hi_x, double hi_y, double h,
                    double rho);

    void add_point(double x, double y);           // stamp a rho-disk
    void add_segment(double x0, double y0,
                     double x1, double y1);       // stamp a capsule
    double volume() const;                        // marked cells * h^2

private:
    void mark_row_interval(int row, double x_lo, double x_hi);

    double h_, rho_, lo_x_, lo_y_;
    int nx_, ny_;
    std::vector<std::uint64_t> bits_;
};

}  // namespace sausagelab::sausage
