#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace sausagelab::simd {

// Kernel table for the data-parallel inner loops: BLAS-1 pieces of the CG /
// inverse-iteration solver, the masked Laplacian stencil apply, and point-set
// distance queries. A scalar reference implementation always exists; an AVX2
// variant is selected at runtime when the CPU supports it. The two must agree
// to rounding (equivalence-tested).
struct Kernels {
    const char* name;

    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*nrm2sq)(const double* x, std::size_t n);
    void (*axpy)(double a, const double* x, double* y, std::size_t n);   // y += a*x
    void (*xpay)(const double* x, double a, double* y, std::size_t n);   // y = x + a*y
    void (*scal)(double a, double* x, std::size_t n);

    // v = mask ? (cdiag + pot)*u - coff*(sum of 2d neighbors) : 0
    // pot may be null. Grid boundary ring must be masked off.
    void (*stencil2d)(const double* u, double* v, const std::uint8_t* mask,
                      const double* pot, double cdiag, double coff,
                      int nx, int ny);
    void (*stencil3d)(const double* u, double* v, const std::uint8_t* mask,
                      const double* pot, double cdiag, double coff,
                      int nx, int ny, int nz);

    // min over i of (xs[i]-qx)^2 + (ys[i]-qy)^2  (+inf if n == 0)
    double (*min_dist_sq_2d)(const double* xs, const double* ys, std::size_t n,
                             double qx, double qy);
    double (*min_dist_sq_3d)(const double* xs, const double* ys, const double* zs,
                             std::size_t n, double qx, double qy, double qz);
    std::size_t (*count_within_2d)(const double* xs, const double* ys, std::size_t n,
                                   double qx, double qy, double r2);
    std::size_t (*count_within_3d)(const double* xs, const double* ys, const double* zs,
                                   std::size_t n, double qx, double qy, double qz,
                                   double r2);
};

const Kernels& scalar_kernels();
bool avx2_available();

// Active kernel table ("auto" policy unless overridden).
const Kernels& kernels();

// Force a backend for testing: "auto", "scalar", or "avx2".
// Throws std::invalid_argument for unknown/unavailable backends.
void select_backend(const std::string& name);
std::string active_backend();

}  // namespace sausagelab::simd
