#include "sausagelab/sausage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sausagelab/constants.hpp"
#include "sausagelab/rng.hpp"

namespace sausagelab::sausage {

namespace {

double dist_sq_point_segment(const double* p, const double* a, const double* b,
                             int d) {
    double ab2 = 0, ap_ab = 0;
    for (int c = 0; c < d; ++c) {
        const double ab = b[c] - a[c];
        ab2 += ab * ab;
        ap_ab += (p[c] - a[c]) * ab;
    }
    double t = ab2 > 0 ? std::clamp(ap_ab / ab2, 0.0, 1.0) : 0.0;
    double d2 = 0;
    for (int c = 0; c < d; ++c) {
        const double q = a[c] + t * (b[c] - a[c]) - p[c];
        d2 += q * q;
    }
    return d2;
}

}  // namespace

OccupancyGrid2D::OccupancyGrid2D(double lo_x, double lo_y, double hi_x,
                                 double hi_y, double h, double rho)
    : h_(h), rho_(rho) {
    // snap to the global origin-anchored lattice so that grids over different
    // bounding boxes mark identical cells
    const long ix0 = static_cast<long>(std::floor(lo_x / h));
    const long iy0 = static_cast<long>(std::floor(lo_y / h));
    lo_x_ = ix0 * h;
    lo_y_ = iy0 * h;
    nx_ = static_cast<int>(std::ceil((hi_x - lo_x_) / h)) + 1;
    ny_ = static_cast<int>(std::ceil((hi_y - lo_y_) / h)) + 1;
    bits_.assign((static_cast<std::size_t>(nx_) * ny_ + 63) / 64, 0);
}

void OccupancyGrid2D::mark_row_interval(int row, double x_lo, double x_hi) {
    if (row < 0 || row >= ny_) return;
    // cells whose center (lo_x_ + (i+0.5) h) lies in [x_lo, x_hi]
    int i0 = static_cast<int>(std::ceil((x_lo - lo_x_) / h_ - 0.5 - 1e-12));
    int i1 = static_cast<int>(std::floor((x_hi - lo_x_) / h_ - 0.5 + 1e-12));
    i0 = std::max(i0, 0);
    i1 = std::min(i1, nx_ - 1);
    const std::size_t base = static_cast<std::size_t>(row) * nx_;
    for (int i = i0; i <= i1; ++i) {
        const std::size_t k = base + i;
        bits_[k >> 6] |= 1ULL << (k & 63);
    }
}

void OccupancyGrid2D::add_point(double x, double y) {
    const int j0 = static_cast<int>(std::floor((y - rho_ - lo_y_) / h_ - 0.5));
    const int j1 = static_cast<int>(std::ceil((y + rho_ - lo_y_) / h_ - 0.5));
    for (int j = j0; j <= j1; ++j) {
        const double yc = lo_y_ + (j + 0.5) * h_;
        const double dy = yc - y;
        const double s = rho_ * rho_ - dy * dy;
        if (s < 0) continue;
        const double w = std::sqrt(s);
        mark_row_interval(j, x - w, x + w);
    }
}

void OccupancyGrid2D::add_segment(double x0, double y0, double x1, double y1) {
    const double dx = x1 - x0, dy = y1 - y0;
    const double len = std::hypot(dx, dy);
    if (len < 1e-300) {
        add_point(x0, y0);
        return;
    }
    const double tx = dx / len, ty = dy / len;  // tangent
    const double nx = -ty, ny = tx;             // normal
    const double ylo = std::min(y0, y1) - rho_, yhi = std::max(y0, y1) + rho_;
    const int j0 = static_cast<int>(std::floor((ylo - lo_y_) / h_ - 0.5));
    const int j1 = static_cast<int>(std::ceil((yhi - lo_y_) / h_ - 0.5));
    const double inf = std::numeric_limits<double>::infinity();
    for (int j = j0; j <= j1; ++j) {
        const double yc = lo_y_ + (j + 0.5) * h_;
        double lo = inf, hi = -inf;
        // end disks
        for (int e = 0; e < 2; ++e) {
            const double cx = e ? x1 : x0, cy = e ? y1 : y0;
            const double d = yc - cy;
            const double s = rho_ * rho_ - d * d;
            if (s >= 0) {
                const double w = std::sqrt(s);
                lo = std::min(lo, cx - w);
                hi = std::max(hi, cx + w);
            }
        }
        // oriented rectangle: 0 <= (p-A).t <= len, |(p-A).n| <= rho;
        // for fixed y both are linear inequalities in x
        double rlo = -inf, rhi = inf;
        bool empty = false;
        auto clip = [&](double coef, double lo_b, double hi_b, double off) {
            // coef*x in [lo_b - off, hi_b - off]
            if (std::fabs(coef) < 1e-300) {
                if (off < lo_b || off > hi_b) empty = true;
                return;
            }
            double a = (lo_b - off) / coef, b = (hi_b - off) / coef;
            if (a > b) std::swap(a, b);
            rlo = std::max(rlo, a);
            rhi = std::min(rhi, b);
        };
        clip(tx, 0.0, len, (yc - y0) * ty);   // (x-x0)*tx + (yc-y0)*ty in [0,len]
        clip(nx, -rho_, rho_, (yc - y0) * ny);
        if (!empty && rlo <= rhi) {
            lo = std::min(lo, x0 + rlo);
            hi = std::max(hi, x0 + rhi);
        }
        if (lo <= hi) mark_row_interval(j, lo, hi);
    }
}

double OccupancyGrid2D::volume() const {
    std::size_t count = 0;
    for (std::uint64_t w : bits_) count += std::popcount(w);
    return static_cast<double>(count) * h_ * h_;
}

SausageEstimate sausage_volume_grid(const brownian::PathSample& path, double rho,
                                    double h) {
    if (!(h > 0) || h > rho / 4.0 + 1e-15)
        throw std::domain_error("sausage_volume_grid: need h <= rho/4");
    if (path.size() == 0)
        throw std::domain_error("sausage_volume_grid: empty path");
    const int d = path.d;
    SausageEstimate est;
    est.method = Method::grid;
    est.resolution = h;
    if (d == 2) {
        double lo[2] = {path.pos[0], path.pos[1]}, hi[2] = {path.pos[0], path.pos[1]};
        for (std::size_t i = 0; i < path.size(); ++i) {
            for (int c = 0; c < 2; ++c) {
                lo[c] = std::min(lo[c], path.point(i)[c]);
                hi[c] = std::max(hi[c], path.point(i)[c]);
            }
        }
        OccupancyGrid2D grid(lo[0] - rho - h, lo[1] - rho - h, hi[0] + rho + h,
                             hi[1] + rho + h, h, rho);
        if (path.size() == 1) {
            grid.add_point(path.pos[0], path.pos[1]);
        } else {
            for (std::size_t i = 0; i + 1 < path.size(); ++i)
                grid.add_segment(path.point(i)[0], path.point(i)[1],
                                 path.point(i + 1)[0], path.point(i + 1)[1]);
        }
        est.volume = grid.volume();
        return est;
    }
    // d == 3: direct per-cell distance over segment AABBs
    double lo[3], hi[3];
    for (int c = 0; c < 3; ++c) lo[c] = hi[c] = path.pos[c];
    for (std::size_t i = 0; i < path.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            lo[c] = std::min(lo[c], path.point(i)[c]);
            hi[c] = std::max(hi[c], path.point(i)[c]);
        }
    }
    long i0[3], n[3];
    for (int c = 0; c < 3; ++c) {
        i0[c] = static_cast<long>(std::floor((lo[c] - rho - h) / h));
        n[c] = static_cast<long>(std::ceil((hi[c] + rho + h) / h)) - i0[c] + 1;
    }
    std::vector<std::uint8_t> marked(static_cast<std::size_t>(n[0]) * n[1] * n[2], 0);
    const double r2 = rho * rho;
    const std::size_t nseg = path.size() > 1 ? path.size() - 1 : 1;
    for (std::size_t s = 0; s < nseg; ++s) {
        const double* a = path.point(s);
        const double* b = path.point(path.size() > 1 ? s + 1 : s);
        long c0[3], c1[3];
        for (int c = 0; c < 3; ++c) {
            const double slo = std::min(a[c], b[c]) - rho;
            const double shi = std::max(a[c], b[c]) + rho;
            c0[c] = std::max<long>(static_cast<long>(std::floor(slo / h - 0.5)) - i0[c], 0);
            c1[c] = std::min<long>(static_cast<long>(std::ceil(shi / h - 0.5)) - i0[c],
                                   n[c] - 1);
        }
        for (long z = c0[2]; z <= c1[2]; ++z)
            for (long y = c0[1]; y <= c1[1]; ++y)
                for (long x = c0[0]; x <= c1[0]; ++x) {
                    const std::size_t k =
                        (static_cast<std::size_t>(z) * n[1] + y) * n[0] + x;
                    if (marked[k]) continue;
                    const double p[3] = {(i0[0] + x + 0.5) * h,
                                         (i0[1] + y + 0.5) * h,
                                         (i0[2] + z + 0.5) * h};
                    if (dist_sq_point_segment(p, a, b, 3) <= r2) marked[k] = 1;
                }
    }
    std::size_t count = 0;
    for (auto m : marked) count += m;
    est.volume = static_cast<double>(count) * h * h * h;
    return est;
}

SausageEstimate sausage_volume_mc(const brownian::PathSample& path, double rho,
                                  std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 1000)
        throw std::domain_error("sausage_volume_mc: need n_samples >= 1000");
    if (path.size() == 0)
        throw std::domain_error("sausage_volume_mc: empty path");
    const int d = path.d;
    double lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int c = 0; c < d; ++c) lo[c] = hi[c] = path.pos[c];
    for (std::size_t i = 0; i < path.size(); ++i)
        for (int c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], path.point(i)[c]);
            hi[c] = std::max(hi[c], path.point(i)[c]);
        }
    double box_vol = 1.0;
    for (int c = 0; c < d; ++c) {
        lo[c] -= rho;
        hi[c] += rho;
        box_vol *= hi[c] - lo[c];
    }
    if (!(box_vol > 0))
        throw std::domain_error("sausage_volume_mc: degenerate bounding box");
    Rng rng(derive_seed(seed, {0x5a05a9eULL}));
    const double r2 = rho * rho;
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        double p[3] = {0, 0, 0};
        for (int c = 0; c < d; ++c) p[c] = lo[c] + (hi[c] - lo[c]) * rng.u01();
        bool hit = false;
        if (path.size() == 1) {
            hit = dist_sq_point_segment(p, path.point(0), path.point(0), d) <= r2;
        } else {
            for (std::size_t i = 0; i + 1 < path.size() && !hit; ++i)
                hit = dist_sq_point_segment(p, path.point(i), path.point(i + 1), d) <= r2;
        }
        hits += hit;
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(n_samples);
    SausageEstimate est;
    est.method = Method::hit_or_miss;
    est.resolution = static_cast<double>(n_samples);
    est.volume = box_vol * frac;
    est.stderr_ = box_vol * std::sqrt(std::max(frac * (1.0 - frac), 0.0) /
                                      static_cast<double>(n_samples));
    return est;
}

double ballistic_lower_bound(const brownian::PathSample& path, double rho,
                             const double* direction) {
    const int d = path.d;
    double norm = 0;
    for (int c = 0; c < d; ++c) norm += direction[c] * direction[c];
    norm = std::sqrt(norm);
    if (!(norm > 0))
        throw std::domain_error("ballistic_lower_bound: zero direction");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < path.size(); ++i) {
        double s = 0;
        for (int c = 0; c < d; ++c) s += path.point(i)[c] * direction[c] / norm;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    const double wd1 = constants::unit_ball_volume(d - 1);
    return (hi - lo) * wd1 * std::pow(rho, d - 1);
}

}  // namespace sausagelab::sausage
