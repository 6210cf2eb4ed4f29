#include "sausagelab/simd.hpp"

#include <immintrin.h>
#include <limits>

namespace sausagelab::simd {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double a_dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    }
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i] * y[i];
    return r;
}

double a_nrm2sq(const double* x, std::size_t n) { return a_dot(x, x, n); }

void a_axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void a_xpay(const double* x, double a, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, vy, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void a_scal(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] *= a;
}

void a_stencil2d(const double* u, double* v, const std::uint8_t* mask,
                 const double* pot, double cdiag, double coff, int nx, int ny) {
    for (int i = 0; i < nx; ++i) v[i] = 0.0;
    const __m256d vcd = _mm256_set1_pd(cdiag);
    const __m256d vco = _mm256_set1_pd(coff);
    for (int j = 1; j < ny - 1; ++j) {
        const int row = j * nx;
        v[row] = 0.0;
        int i = 1;
        for (; i + 4 <= nx - 1; i += 4) {
            const int k = row + i;
            // mask as 0/1 multiplier
            __m256d m = _mm256_set_pd(double(mask[k + 3]), double(mask[k + 2]),
                                      double(mask[k + 1]), double(mask[k]));
            __m256d uc = _mm256_loadu_pd(u + k);
            __m256d nb = _mm256_add_pd(
                _mm256_add_pd(_mm256_loadu_pd(u + k - 1), _mm256_loadu_pd(u + k + 1)),
                _mm256_add_pd(_mm256_loadu_pd(u + k - nx), _mm256_loadu_pd(u + k + nx)));
            __m256d diag = vcd;
            if (pot) diag = _mm256_add_pd(diag, _mm256_loadu_pd(pot + k));
            __m256d r = _mm256_fnmadd_pd(vco, nb, _mm256_mul_pd(diag, uc));
            _mm256_storeu_pd(v + k, _mm256_mul_pd(m, r));
        }
        for (; i < nx - 1; ++i) {
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

void a_stencil3d(const double* u, double* v, const std::uint8_t* mask,
                 const double* pot, double cdiag, double coff,
                 int nx, int ny, int nz) {
    const long plane = static_cast<long>(nx) * ny;
    const long total = plane * nz;
    for (long k = 0; k < total; ++k) v[k] = 0.0;
    const __m256d vcd = _mm256_set1_pd(cdiag);
    const __m256d vco = _mm256_set1_pd(coff);
    for (int z = 1; z < nz - 1; ++z) {
        for (int j = 1; j < ny - 1; ++j) {
            const long row = static_cast<long>(z) * plane + static_cast<long>(j) * nx;
            int i = 1;
            for (; i + 4 <= nx - 1; i += 4) {
                const long k = row + i;
                __m256d m = _mm256_set_pd(double(mask[k + 3]), double(mask[k + 2]),
                                          double(mask[k + 1]), double(mask[k]));
                __m256d uc = _mm256_loadu_pd(u + k);
                __m256d nb = _mm256_add_pd(
                    _mm256_add_pd(_mm256_loadu_pd(u + k - 1), _mm256_loadu_pd(u + k + 1)),
                    _mm256_add_pd(
                        _mm256_add_pd(_mm256_loadu_pd(u + k - nx), _mm256_loadu_pd(u + k + nx)),
                        _mm256_add_pd(_mm256_loadu_pd(u + k - plane),
                                      _mm256_loadu_pd(u + k + plane))));
                __m256d diag = vcd;
                if (pot) diag = _mm256_add_pd(diag, _mm256_loadu_pd(pot + k));
                __m256d r = _mm256_fnmadd_pd(vco, nb, _mm256_mul_pd(diag, uc));
                _mm256_storeu_pd(v + k, _mm256_mul_pd(m, r));
            }
            for (; i < nx - 1; ++i) {
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

double a_min_dist_sq_2d(const double* xs, const double* ys, std::size_t n,
                        double qx, double qy) {
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    const __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
        __m256d d2 = _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx));
        best = _mm256_min_pd(best, d2);
    }
    alignas(32) double b[4];
    _mm256_store_pd(b, best);
    double r = std::min(std::min(b[0], b[1]), std::min(b[2], b[3]));
    for (; i < n; ++i) {
        const double dx = xs[i] - qx, dy = ys[i] - qy;
        const double d2 = dx * dx + dy * dy;
        if (d2 < r) r = d2;
    }
    return r;
}

double a_min_dist_sq_3d(const double* xs, const double* ys, const double* zs,
                        std::size_t n, double qx, double qy, double qz) {
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    const __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy),
                  vqz = _mm256_set1_pd(qz);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
        __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vqz);
        __m256d d2 = _mm256_fmadd_pd(dz, dz,
                     _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx)));
        best = _mm256_min_pd(best, d2);
    }
    alignas(32) double b[4];
    _mm256_store_pd(b, best);
    double r = std::min(std::min(b[0], b[1]), std::min(b[2], b[3]));
    for (; i < n; ++i) {
        const double dx = xs[i] - qx, dy = ys[i] - qy, dz = zs[i] - qz;
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < r) r = d2;
    }
    return r;
}

std::size_t a_count_within_2d(const double* xs, const double* ys, std::size_t n,
                              double qx, double qy, double r2) {
    const __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy),
                  vr2 = _mm256_set1_pd(r2);
    std::size_t c = 0, i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
        __m256d d2 = _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx));
        const int m = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
        c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(m)));
    }
    for (; i < n; ++i) {
        const double dx = xs[i] - qx, dy = ys[i] - qy;
        if (dx * dx + dy * dy <= r2) ++c;
    }
    return c;
}

std::size_t a_count_within_3d(const double* xs, const double* ys, const double* zs,
                              std::size_t n, double qx, double qy, double qz,
                              double r2) {
    const __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy),
                  vqz = _mm256_set1_pd(qz), vr2 = _mm256_set1_pd(r2);
    std::size_t c = 0, i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
        __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vqz);
        __m256d d2 = _mm256_fmadd_pd(dz, dz,
                     _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx)));
        const int m = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
        c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(m)));
    }
    for (; i < n; ++i) {
        const double dx = xs[i] - qx, dy = ys[i] - qy, dz = zs[i] - qz;
        if (dx * dx + dy * dy + dz * dz <= r2) ++c;
    }
    return c;
}

const Kernels kAvx2 = {
    "avx2",
    a_dot, a_nrm2sq, a_axpy, a_xpay, a_scal,
    a_stencil2d, a_stencil3d,
    a_min_dist_sq_2d, a_min_dist_sq_3d,
    a_count_within_2d, a_count_within_3d,
};

}  // namespace

const Kernels& avx2_kernels_impl();
const Kernels& avx2_kernels_impl() { return kAvx2; }

}  // namespace sausagelab::simd
