#include "sausagelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "../vendor/json.hpp"
#include "sausagelab/constants.hpp"
#include "sausagelab/rng.hpp"
#include "sausagelab/simd.hpp"

namespace sausagelab::spectral {

namespace {

using json = nlohmann::json;

void apply_op(const GridDomain& dom, const double* pot, double mass,
              const double* u, double* v) {
    const double coff = 1.0 / (2.0 * dom.h * dom.h);
    const double cdiag = dom.d * 2.0 * coff + mass;
    const auto& k = simd::kernels();
    if (dom.d == 2)
        k.stencil2d(u, v, dom.mask.data(), pot, cdiag, coff, dom.n[0], dom.n[1]);
    else
        k.stencil3d(u, v, dom.mask.data(), pot, cdiag, coff, dom.n[0], dom.n[1],
                    dom.n[2]);
}

// CG for the SPD masked operator; x holds the initial guess on entry.
// Returns iterations used, -1 if the tolerance was not reached.
int cg_solve(const GridDomain& dom, const double* pot, double mass,
             const std::vector<double>& b, std::vector<double>& x, double rel_tol,
             int max_iter) {
    const auto& k = simd::kernels();
    const std::size_t n = dom.cells();
    std::vector<double> r(n), p(n), v(n);
    apply_op(dom, pot, mass, x.data(), v.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - v[i];
    p = r;
    double rr = k.nrm2sq(r.data(), n);
    const double b2 = k.nrm2sq(b.data(), n);
    const double stop = rel_tol * rel_tol * (b2 > 0 ? b2 : 1.0);
    if (rr <= stop) return 0;
    for (int it = 1; it <= max_iter; ++it) {
        apply_op(dom, pot, mass, p.data(), v.data());
        const double pv = k.dot(p.data(), v.data(), n);
        if (!(pv > 0)) throw std::runtime_error("cg: operator not positive definite");
        const double alpha = rr / pv;
        k.axpy(alpha, p.data(), x.data(), n);
        k.axpy(-alpha, v.data(), r.data(), n);
        const double rr_new = k.nrm2sq(r.data(), n);
        if (rr_new <= stop) return it;
        k.xpay(r.data(), rr_new / rr, p.data(), n);  // p = r + beta*p
        rr = rr_new;
    }
    return -1;
}

void project_out(std::vector<double>& x, const std::vector<double>& q) {
    const auto& k = simd::kernels();
    const double qq = k.nrm2sq(q.data(), q.size());
    if (qq <= 0) return;
    const double c = k.dot(x.data(), q.data(), x.size()) / qq;
    k.axpy(-c, q.data(), x.data(), x.size());
}

// Smallest eigenpair of the masked operator, orthogonal to `deflate` if given.
// x: in = initial guess (may be zero), out = unit-l2 eigenvector.
struct EigPair {
    double lambda = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

EigPair inverse_iterate(const GridDomain& dom, const double* pot,
                        std::vector<double>& x, const std::vector<double>* deflate,
                        const EigenOptions& opts, std::uint64_t seed_salt) {
    const auto& k = simd::kernels();
    const std::size_t n = dom.cells();
    double norm = std::sqrt(k.nrm2sq(x.data(), n));
    if (!(norm > 0)) {
        Rng rng(derive_seed(0x51bec7a1ULL, {seed_salt}));
        for (std::size_t i = 0; i < n; ++i)
            x[i] = dom.mask[i] ? rng.u01() + 0.1 : 0.0;
        if (deflate) project_out(x, *deflate);
        norm = std::sqrt(k.nrm2sq(x.data(), n));
        if (!(norm > 0)) throw std::domain_error("eigen: empty mask");
    }
    k.scal(1.0 / norm, x.data(), n);

    std::vector<double> y(n, 0.0), w(n);
    EigPair out;
    double lambda_prev = std::numeric_limits<double>::infinity();
    double res_prev = std::numeric_limits<double>::infinity();
    const int cg_cap = static_cast<int>(20 * std::sqrt(static_cast<double>(n))) + 200;
    double inner_tol = 1e-4;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        y = x;  // warm start: previous direction
        cg_solve(dom, pot, 0.0, x, y, inner_tol, cg_cap);
        if (deflate) project_out(y, *deflate);
        const double yn = std::sqrt(k.nrm2sq(y.data(), n));
        if (!(yn > 0)) throw std::runtime_error("eigen: iterate collapsed");
        k.scal(1.0 / yn, y.data(), n);
        x = y;
        apply_op(dom, pot, 0.0, x.data(), w.data());
        const double lambda = k.dot(x.data(), w.data(), n);
        k.axpy(-lambda, x.data(), w.data(), n);
        const double res = std::sqrt(k.nrm2sq(w.data(), n));
        out.lambda = lambda;
        out.residual = res;
        out.iterations = it;
        // deflation error against the numerically-computed phi1 puts a floor
        // under the residual; accept a stalled residual near the tolerance
        // once the eigenvalue itself has converged
        const bool dl_ok =
            std::fabs(lambda - lambda_prev) <= opts.tol * std::max(1.0, lambda);
        const bool res_ok =
            res <= opts.residual_tol ||
            (res <= 100.0 * opts.residual_tol && res >= 0.99 * res_prev);
        if (dl_ok && res_ok) return out;
        res_prev = res;
        lambda_prev = lambda;
        // tighten the inner solve as the eigenpair converges
        inner_tol = std::clamp(0.01 * res / std::max(1.0, lambda), 1e-12, 1e-4);
    }
    throw std::runtime_error("eigen_dirichlet: no convergence after " +
                             std::to_string(opts.max_iterations) +
                             " iterations (residual " +
                             std::to_string(out.residual) + ")");
}

double dist_to_balls(const std::vector<Ball>& balls, const double* p, int d) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : balls) {
        double r2 = 0;
        for (int c = 0; c < d; ++c) {
            const double q = p[c] - b.center[c];
            r2 += q * q;
        }
        best = std::min(best, std::sqrt(r2) - b.radius);
    }
    return best;
}

double capacity_grid(const std::vector<Ball>& balls, int d,
                     const CapacityParams& params) {
    // translate the centroid to the origin; capacity is translation-invariant
    double mid[3] = {0, 0, 0};
    for (const auto& b : balls)
        for (int c = 0; c < d; ++c) mid[c] += b.center[c] / balls.size();
    double rmin = std::numeric_limits<double>::infinity(), extent = 0;
    for (const auto& b : balls) {
        rmin = std::min(rmin, b.radius);
        double r2 = 0;
        for (int c = 0; c < d; ++c) {
            const double q = b.center[c] - mid[c];
            r2 += q * q;
        }
        extent = std::max(extent, std::sqrt(r2) + b.radius);
    }
    const double h = std::min(params.h, rmin / 2.0);
    // d = 2 equilibrium potentials of (1 - Laplacian/2) decay like
    // exp(-sqrt(2) |x|), so a short pad suffices; Newtonian decay is only 1/|x|
    const double pad = d == 2 ? 2.0 : 4.0;
    const double T = std::max(params.truncation_radius, extent + pad);
    double lo[3], hi[3];
    for (int c = 0; c < d; ++c) {
        lo[c] = -T;
        hi[c] = T;
    }
    GridDomain dom = GridDomain::box(d, lo, hi, h);
    // compact cells: center within some ball (shifted)
    std::vector<std::uint8_t> compact(dom.cells(), 0);
    const int nz = d == 3 ? dom.n[2] : 1;
    for (int z = 0; z < nz; ++z)
        for (int j = 0; j < dom.n[1]; ++j)
            for (int i = 0; i < dom.n[0]; ++i) {
                double p[3] = {dom.center(0, i) + mid[0], dom.center(1, j) + mid[1],
                               d == 3 ? dom.center(2, z) + mid[2] : 0.0};
                if (dist_to_balls(balls, p, d) <= 0) {
                    const auto k = dom.idx(i, j, z);
                    compact[k] = 1;
                    dom.mask[k] = 0;  // solve only in the exterior
                }
            }
    std::size_t inside = 0;
    for (auto c : compact) inside += c;
    if (inside == 0)
        throw std::domain_error("capacity: grid too coarse to resolve the compact");

    const double mass = d == 2 ? 1.0 : 0.0;
    const double coff = 1.0 / (2.0 * h * h);
    // rhs: exterior cells adjacent to a compact cell see u = 1 across the edge
    std::vector<double> b_vec(dom.cells(), 0.0), u(dom.cells(), 0.0);
    const long strides[3] = {1, dom.n[0], static_cast<long>(dom.n[0]) * dom.n[1]};
    for (int z = 0; z < nz; ++z)
        for (int j = 1; j < dom.n[1] - 1; ++j)
            for (int i = 1; i < dom.n[0] - 1; ++i) {
                const long k = static_cast<long>(dom.idx(i, j, z));
                if (!dom.mask[k]) continue;
                int touching = 0;
                for (int axis = 0; axis < d; ++axis) {
                    if (z == 0 && axis == 2) continue;
                    touching += compact[k - strides[axis]] + compact[k + strides[axis]];
                }
                if (touching) b_vec[k] = coff * touching;
            }
    const std::size_t n = dom.cells();
    const int cg_cap = static_cast<int>(30 * std::sqrt(static_cast<double>(n))) + 500;
    if (cg_solve(dom, nullptr, mass, b_vec, u, params.cg_tol, cg_cap) < 0)
        throw std::runtime_error("capacity: CG did not converge");
    // equilibrium potential energy; u = 1 on the compact
    for (std::size_t k = 0; k < n; ++k)
        if (compact[k]) u[k] = 1.0;
    const double hd = std::pow(h, d);
    double energy = 0.0;
    for (int z = 0; z < nz; ++z)
        for (int j = 0; j < dom.n[1]; ++j)
            for (int i = 0; i < dom.n[0]; ++i) {
                const long k = static_cast<long>(dom.idx(i, j, z));
                if (mass > 0) energy += u[k] * u[k] * hd;
                for (int axis = 0; axis < d; ++axis) {
                    const int extent_ax = dom.n[axis];
                    const int coord = axis == 0 ? i : axis == 1 ? j : z;
                    if (coord + 1 >= extent_ax) continue;
                    const double du = u[k + strides[axis]] - u[k];
                    energy += 0.5 * (du / h) * (du / h) * hd;
                }
            }
    return energy;
}

double capacity_hitting_mc(const std::vector<Ball>& balls,
                           const CapacityParams& params) {
    double mid[3] = {0, 0, 0};
    for (const auto& b : balls)
        for (int c = 0; c < 3; ++c) mid[c] += b.center[c] / balls.size();
    std::vector<Ball> shifted = balls;
    double extent = 0, rmin = std::numeric_limits<double>::infinity();
    for (auto& b : shifted) {
        for (int c = 0; c < 3; ++c) b.center[c] -= mid[c];
        double r2 = 0;
        for (int c = 0; c < 3; ++c) r2 += b.center[c] * b.center[c];
        extent = std::max(extent, std::sqrt(r2) + b.radius);
        rmin = std::min(rmin, b.radius);
    }
    const double L = std::max(params.launch_radius, 2.0 * extent);
    const double r_out = 8.0 * L;  // re-entry sphere; uniform re-entry bias O(size/r_out)
    const double hit_tol = 1e-4 * rmin;
    Rng rng(derive_seed(params.seed, {0xca9ac17fULL}));
    auto on_sphere = [&](double radius, double* p) {
        double g[3], n2 = 0;
        do {
            n2 = 0;
            for (double& v : g) {
                v = rng.normal();
                n2 += v * v;
            }
        } while (n2 == 0);
        const double s = radius / std::sqrt(n2);
        for (int c = 0; c < 3; ++c) p[c] = g[c] * s;
    };
    std::size_t hits = 0;
    for (std::size_t w = 0; w < params.n_walkers; ++w) {
        double p[3];
        on_sphere(L, p);
        for (;;) {
            const double dist = dist_to_balls(shifted, p, 3);
            if (dist <= hit_tol) {
                ++hits;
                break;
            }
            double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
            if (norm > r_out) {
                if (rng.u01() >= r_out / norm) break;  // escapes to infinity
                on_sphere(r_out, p);
                continue;
            }
            double step[3];
            on_sphere(dist, step);
            for (int c = 0; c < 3; ++c) p[c] += step[c];
        }
    }
    const double p_hit = static_cast<double>(hits) / params.n_walkers;
    return p_hit * 2.0 * M_PI * L;  // G(x) = 1/(2 pi |x|)
}

}  // namespace

std::size_t GridDomain::interior_count() const {
    std::size_t c = 0;
    for (auto m : mask) c += m;
    return c;
}

void GridDomain::clear_boundary_ring() {
    const int nz = d == 3 ? n[2] : 1;
    for (int z = 0; z < nz; ++z)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                const bool edge = i == 0 || j == 0 || i == n[0] - 1 ||
                                  j == n[1] - 1 ||
                                  (d == 3 && (z == 0 || z == n[2] - 1));
                if (edge) mask[idx(i, j, z)] = 0;
            }
}

void GridDomain::validate() const {
    if (d != 2 && d != 3) throw std::domain_error("GridDomain: d must be 2 or 3");
    if (!(h > 0)) throw std::domain_error("GridDomain: h must be positive");
    if (d == 2 && n[2] != 1) throw std::domain_error("GridDomain: n[2] != 1 for d=2");
    if (mask.size() != cells()) throw std::domain_error("GridDomain: mask size");
    if (interior_count() == 0) throw std::domain_error("GridDomain: empty mask");
    const int nz = d == 3 ? n[2] : 1;
    for (int z = 0; z < nz; ++z)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                const bool edge = i == 0 || j == 0 || i == n[0] - 1 ||
                                  j == n[1] - 1 ||
                                  (d == 3 && (z == 0 || z == n[2] - 1));
                if (edge && mask[idx(i, j, z)])
                    throw std::domain_error("GridDomain: boundary ring not masked off");
            }
}

GridDomain GridDomain::box(int d, const double* lo, const double* hi, double h) {
    GridDomain dom;
    dom.d = d;
    dom.h = h;
    for (int c = 0; c < d; ++c) {
        dom.lo[c] = lo[c] - h;  // one ring of exterior cells on each side
        dom.n[c] = static_cast<int>(std::ceil((hi[c] - lo[c]) / h)) + 2;
    }
    if (d == 2) {
        dom.n[2] = 1;
        dom.lo[2] = 0;
    }
    dom.mask.assign(dom.cells(), 0);
    const int nz = d == 3 ? dom.n[2] : 1;
    for (int z = 0; z < nz; ++z)
        for (int j = 0; j < dom.n[1]; ++j)
            for (int i = 0; i < dom.n[0]; ++i) {
                bool in = dom.center(0, i) > lo[0] && dom.center(0, i) < hi[0] &&
                          dom.center(1, j) > lo[1] && dom.center(1, j) < hi[1];
                if (d == 3)
                    in = in && dom.center(2, z) > lo[2] && dom.center(2, z) < hi[2];
                dom.mask[dom.idx(i, j, z)] = in;
            }
    dom.clear_boundary_ring();
    return dom;
}

GridDomain GridDomain::ball(int d, double radius, double h) {
    double lo[3], hi[3];
    for (int c = 0; c < d; ++c) {
        lo[c] = -radius - 2 * h;
        hi[c] = radius + 2 * h;
    }
    GridDomain dom = box(d, lo, hi, h);
    const double r2 = radius * radius;
    const int nz = d == 3 ? dom.n[2] : 1;
    for (int z = 0; z < nz; ++z)
        for (int j = 0; j < dom.n[1]; ++j)
            for (int i = 0; i < dom.n[0]; ++i) {
                double q = dom.center(0, i) * dom.center(0, i) +
                           dom.center(1, j) * dom.center(1, j);
                if (d == 3) q += dom.center(2, z) * dom.center(2, z);
                if (q >= r2) dom.mask[dom.idx(i, j, z)] = 0;
            }
    return dom;
}

void GridDomain::carve_ball(const double* c, double r) {
    const double r2 = r * r;
    const int nz = d == 3 ? n[2] : 1;
    for (int z = 0; z < nz; ++z)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                double q = (center(0, i) - c[0]) * (center(0, i) - c[0]) +
                           (center(1, j) - c[1]) * (center(1, j) - c[1]);
                if (d == 3) q += (center(2, z) - c[2]) * (center(2, z) - c[2]);
                if (q <= r2) mask[idx(i, j, z)] = 0;
            }
}

nlohmann::json GridDomain::to_json() const {
    json rle = json::array();
    std::size_t i = 0;
    const std::size_t total = mask.size();
    std::uint8_t cur = 0;  // runs alternate starting with the off-mask value
    while (i < total) {
        std::size_t run = 0;
        while (i + run < total && mask[i + run] == cur) ++run;
        rle.push_back(run);
        i += run;
        cur = !cur;
    }
    return json{{"d", d},
                {"h", h},
                {"n", {n[0], n[1], n[2]}},
                {"lo", {lo[0], lo[1], lo[2]}},
                {"mask_rle", rle}};
}

GridDomain GridDomain::from_json(const nlohmann::json& j) {
    GridDomain dom;
    dom.d = j.at("d").get<int>();
    dom.h = j.at("h").get<double>();
    for (int c = 0; c < 3; ++c) {
        dom.n[c] = j.at("n").at(c).get<int>();
        dom.lo[c] = j.at("lo").at(c).get<double>();
    }
    dom.mask.assign(dom.cells(), 0);
    std::size_t i = 0;
    std::uint8_t cur = 0;
    for (const auto& run : j.at("mask_rle")) {
        const std::size_t len = run.get<std::size_t>();
        if (i + len > dom.mask.size())
            throw std::domain_error("GridDomain::from_json: RLE overruns mask");
        std::fill_n(dom.mask.begin() + i, len, cur);
        i += len;
        cur = !cur;
    }
    if (i != dom.mask.size())
        throw std::domain_error("GridDomain::from_json: RLE short of mask");
    dom.validate();
    return dom;
}

void SpectralResult::dump_csv(const GridDomain& dom, const std::string& path) const {
    std::ofstream out(path);
    out << "i,j,k,x,y,z,phi\n";
    const int nz = dom.d == 3 ? dom.n[2] : 1;
    for (int z = 0; z < nz; ++z)
        for (int j = 0; j < dom.n[1]; ++j)
            for (int i = 0; i < dom.n[0]; ++i)
                out << i << ',' << j << ',' << z << ',' << dom.center(0, i) << ','
                    << dom.center(1, j) << ','
                    << (dom.d == 3 ? dom.center(2, z) : 0.0) << ','
                    << phi1[dom.idx(i, j, z)] << '\n';
}

SpectralResult eigen_dirichlet(const GridDomain& domain,
                               const std::vector<double>& potential,
                               const EigenOptions& opts) {
    domain.validate();
    const std::size_t n = domain.cells();
    const double* pot = nullptr;
    if (!potential.empty()) {
        if (potential.size() != n)
            throw std::domain_error("eigen_dirichlet: potential size mismatch");
        for (double v : potential)
            if (!(v >= 0) || !std::isfinite(v))
                throw std::domain_error("eigen_dirichlet: potential must be finite, >= 0");
        pot = potential.data();
    }
    // Reflected-ghost Dirichlet condition: adding coff to the diagonal per
    // off-mask neighbor places the zero boundary on the cell face instead of
    // the ghost center, which restores second-order accuracy on box domains.
    const double coff = 1.0 / (2.0 * domain.h * domain.h);
    std::vector<double> pot_eff(n, 0.0);
    if (pot) pot_eff.assign(potential.begin(), potential.end());
    const int nz = domain.d == 3 ? domain.n[2] : 1;
    for (int z = 0; z < nz; ++z)
        for (int j = 0; j < domain.n[1]; ++j)
            for (int i = 0; i < domain.n[0]; ++i) {
                const std::size_t q = domain.idx(i, j, z);
                if (!domain.mask[q]) continue;
                int missing = 0;
                missing += !domain.mask[q - 1] + !domain.mask[q + 1];
                missing += !domain.mask[q - domain.n[0]] + !domain.mask[q + domain.n[0]];
                if (domain.d == 3) {
                    const std::size_t sz =
                        static_cast<std::size_t>(domain.n[0]) * domain.n[1];
                    missing += !domain.mask[q - sz] + !domain.mask[q + sz];
                }
                pot_eff[q] += coff * missing;
            }
    pot = pot_eff.data();
    SpectralResult res;
    std::vector<double> x(n, 0.0);
    EigPair first = inverse_iterate(domain, pot, x, nullptr, opts, 1);
    res.lambda1 = first.lambda;
    res.residual = first.residual;
    res.iterations = first.iterations;
    // Perron eigenvector: orient positive, scrub roundoff-negative entries
    double total = 0;
    for (double v : x) total += v;
    if (total < 0)
        simd::kernels().scal(-1.0, x.data(), n);
    for (double& v : x) v = std::max(v, 0.0);
    // l2-unit -> L2(grid measure)-unit
    const double scale = 1.0 / std::pow(domain.h, domain.d * 0.5);
    res.phi1 = x;
    simd::kernels().scal(scale, res.phi1.data(), n);
    if (opts.want_lambda2) {
        std::vector<double> x2(n, 0.0);
        EigPair second = inverse_iterate(domain, pot, x2, &x, opts, 2);
        res.lambda2 = std::max(second.lambda, first.lambda);
        res.iterations += second.iterations;
    } else {
        res.lambda2 = first.lambda;
    }
    return res;
}

FaberKrahnResult faber_krahn_check(const GridDomain& domain) {
    EigenOptions opts;
    opts.want_lambda2 = false;
    FaberKrahnResult out;
    out.lambda_domain = eigen_dirichlet(domain, {}, opts).lambda1;
    const double vol =
        static_cast<double>(domain.interior_count()) * std::pow(domain.h, domain.d);
    const double r =
        std::pow(vol / constants::unit_ball_volume(domain.d), 1.0 / domain.d);
    out.lambda_ball_same_volume = constants::lambda_ball(domain.d) / (r * r);
    out.ratio = out.lambda_domain / out.lambda_ball_same_volume;
    return out;
}

double capacity(const std::vector<Ball>& compact, int d, CapacityMethod method,
                const CapacityParams& params) {
    if (d != 2 && d != 3) throw std::domain_error("capacity: d must be 2 or 3");
    if (compact.empty()) throw std::domain_error("capacity: empty compact");
    for (const auto& b : compact)
        if (!(b.radius > 0)) throw std::domain_error("capacity: nonpositive radius");
    if (method == CapacityMethod::hitting_mc) {
        if (d != 3)
            throw std::domain_error("capacity: hitting_mc is the d=3 Newtonian backend");
        return capacity_hitting_mc(compact, params);
    }
    return capacity_grid(compact, d, params);
}

ShiftVsCapacity eigen_shift_vs_capacity(double R, double eps, int d, double h) {
    if (!(eps > 0) || eps > R / 10.0)
        throw std::domain_error("eigen_shift_vs_capacity: need 0 < eps <= R/10");
    if (h > eps / 3.0)
        throw std::domain_error("eigen_shift_vs_capacity: grid too coarse for eps");
    EigenOptions opts;
    opts.want_lambda2 = false;
    GridDomain dom = GridDomain::ball(d, R, h);
    const double base = eigen_dirichlet(dom, {}, opts).lambda1;
    double x0[3] = {R / 2.0, 0.0, 0.0};
    dom.carve_ball(x0, eps);
    const double carved = eigen_dirichlet(dom, {}, opts).lambda1;
    ShiftVsCapacity out;
    out.shift = carved - base;
    out.cap_scaled = d == 2 ? 1.0 / std::log(1.0 / eps) : std::pow(eps, d - 2);
    return out;
}

VariationalMinimum variational_minimize(int d, double nu) {
    if (!(nu > 0)) throw std::domain_error("variational_minimize: nu must be > 0");
    const double wd = constants::unit_ball_volume(d);
    const double ld = constants::lambda_ball(d);
    auto f = [&](double r) { return nu * wd * std::pow(r, d) + ld / (r * r); };
    // golden section bracket, then Newton on f' for the last digits
    double a = 1e-3, b = 1e3;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
    double f1 = f(c1), f2 = f(c2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - phi * (b - a);
            f1 = f(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + phi * (b - a);
            f2 = f(c2);
        }
    }
    double r = 0.5 * (a + b);
    for (int it = 0; it < 40; ++it) {
        const double g = d * nu * wd * std::pow(r, d - 1) - 2.0 * ld / (r * r * r);
        const double gp =
            d * (d - 1) * nu * wd * std::pow(r, d - 2) + 6.0 * ld / (r * r * r * r);
        const double step = g / gp;
        r -= step;
        if (std::fabs(step) < 1e-14 * r) break;
    }
    return {f(r), r};
}

}  // namespace sausagelab::spectral
