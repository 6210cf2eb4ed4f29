#include "sausagelab/simd.hpp"

#include <limits>

namespace sausagelab::simd {
namespace {

double s_dot(const double* x, const double* y, std::size_t n) {
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 += x[i] * y[i];
        a1 += x[i + 1] * y[i + 1];
        a2 += x[i + 2] * y[i + 2];
        a3 += x[i + 3] * y[i + 3];
    }
    double r = (a0 + a1) + (a2 + a3);
    for (; i < n; ++i) r += x[i] * y[i];
    return r;
}

double s_nrm2sq(const double* x, std::size_t n) { return s_dot(x, x, n); }

void s_axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_xpay(const double* x, double a, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void s_scal(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void s_stencil2d(const double* u, double* v, const std::uint8_t* mask,
                 const double* pot, double cdiag, double coff, int nx, int ny) {
    for (int i = 0; i < nx; ++i) v[i] = 0.0;
    for (int j = 1; j < ny - 1; ++j) {
        const int row = j * nx;
        v[row] = 0.0;
        for (int i = 1; i < nx - 1; ++i) {
            const int k = row + i;
            if (!mask[k]) {
                v[k] = 0.0;
                continue;
            }
            const double diag = pot ? cdiag + pot[k] : cdiag;
            v[k] = diag * u[k] -
                   coff * (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx]);
        }
        v[row + nx - 1] = 0.0;
    }
    for (int i = (ny - 1) * nx; i < ny * nx; ++i) v[i] = 0.0;
}

void s_stencil3d(const double* u, double* v, const std::uint8_t* mask,
                 const double* pot, double cdiag, double coff,
                 int nx, int ny, int nz) {
    const long plane = static_cast<long>(nx) * ny;
    const long total = plane * nz;
    for (long k = 0; k < total; ++k) v[k] = 0.0;
    for (int z = 1; z < nz - 1; ++z) {
        for (int j = 1; j < ny - 1; ++j) {
            const long row = static_cast<long>(z) * plane + static_cast<long>(j) * nx;
            for (int i = 1; i < nx - 1; ++i) {
                const long k = row + i;
                if (!mask[k]) continue;
                const double diag = pot ? cdiag + pot[k] : cdiag;
                v[k] = diag * u[k] -
                       coff * (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx] +
                               u[k - plane] + u[k + plane]);
            }
        }
    }
}

double s_min_dist_sq_2d(const double* xs, const double* ys, std::size_t n,
                        double qx, double qy) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - qx, dy = ys[i] - qy;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best) best = d2;
    }
    return best;
}

double s_min_dist_sq_3d(const double* xs, const double* ys, const double* zs,
                        std::size_t n, double qx, double qy, double qz) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - qx, dy = ys[i] - qy, dz = zs[i] - qz;
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < best) best = d2;
    }
    return best;
}

std::size_t s_count_within_2d(const double* xs, const double* ys, std::size_t n,
                              double qx, double qy, double r2) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - qx, dy = ys[i] - qy;
        if (dx * dx + dy * dy <= r2) ++c;
    }
    return c;
}

std::size_t s_count_within_3d(const double* xs, const double* ys, const double* zs,
                              std::size_t n, double qx, double qy, double qz,
                              double r2) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - qx, dy = ys[i] - qy, dz = zs[i] - qz;
        if (dx * dx + dy * dy + dz * dz <= r2) ++c;
    }
    return c;
}

const Kernels kScalar = {
    "scalar",
    s_dot, s_nrm2sq, s_axpy, s_xpay, s_scal,
    s_stencil2d, s_stencil3d,
    s_min_dist_sq_2d, s_min_dist_sq_3d,
    s_count_within_2d, s_count_within_3d,
};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace sausagelab::simd
