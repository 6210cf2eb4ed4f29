#include "sausagelab/obstacles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "sausagelab/rng.hpp"
#include "sausagelab/simd.hpp"

namespace sausagelab::obstacles {

double Box::volume() const {
    double v = 1.0;
    for (int i = 0; i < d; ++i) v *= hi[i] - lo[i];
    return v;
}

bool Box::nondegenerate() const {
    if (d < 1 || d > 3) return false;
    for (int i = 0; i < d; ++i)
        if (!(hi[i] > lo[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
            return false;
    return true;
}

Box Box::centered(int d, double half_side) {
    Box b;
    b.d = d;
    for (int i = 0; i < d; ++i) {
        b.lo[i] = -half_side;
        b.hi[i] = half_side;
    }
    return b;
}

double ObstacleGeometry::envelope() const {
    return std::max({hard_radius, soft_radius, sausage_radius});
}

void ObstacleGeometry::validate() const {
    if (hard_radius < 0 || soft_radius < 0 || soft_height < 0 ||
        sausage_radius <= 0)
        throw std::domain_error("ObstacleGeometry: radii must be nonnegative, "
                                "sausage_radius positive");
}

PointSet::PointSet(int d, double cell_size, const Box& bounds,
                   std::vector<std::array<double, 3>> pts)
    : d_(d), cell_(cell_size > 0 ? cell_size : 1.0) {
    for (int i = 0; i < d_; ++i) {
        lo_[i] = bounds.lo[i];
        ncell_[i] = std::max(
            1, static_cast<int>(std::ceil((bounds.hi[i] - bounds.lo[i]) / cell_)));
    }
    const std::size_t ncells = static_cast<std::size_t>(ncell_[0]) * ncell_[1] *
                               (d_ == 3 ? ncell_[2] : 1);
    // counting sort by cell id
    std::vector<std::uint32_t> cell_id(pts.size());
    cell_start_.assign(ncells + 1, 0);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        int c[3] = {0, 0, 0};
        cell_of(pts[p].data(), c);
        std::uint32_t id = static_cast<std::uint32_t>(c[0]);
        id += static_cast<std::uint32_t>(c[1]) * ncell_[0];
        if (d_ == 3) id += static_cast<std::uint32_t>(c[2]) * ncell_[0] * ncell_[1];
        cell_id[p] = id;
        ++cell_start_[id + 1];
    }
    for (std::size_t i = 1; i <= ncells; ++i) cell_start_[i] += cell_start_[i - 1];
    xs_.resize(pts.size());
    ys_.resize(pts.size());
    if (d_ == 3) zs_.resize(pts.size());
    std::vector<std::uint32_t> cursor(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const std::uint32_t at = cursor[cell_id[p]]++;
        xs_[at] = pts[p][0];
        ys_[at] = pts[p][1];
        if (d_ == 3) zs_[at] = pts[p][2];
    }
}

void PointSet::cell_of(const double* q, int* c) const {
    for (int i = 0; i < d_; ++i) {
        int v = static_cast<int>(std::floor((q[i] - lo_[i]) / cell_));
        c[i] = std::clamp(v, 0, ncell_[i] - 1);
    }
}

std::array<double, 3> PointSet::point(std::size_t i) const {
    return {xs_[i], ys_[i], d_ == 3 ? zs_[i] : 0.0};
}

namespace {
template <typename Fn>
void visit_cells(const int* c0, const int* c1, int d, Fn&& fn) {
    for (int z = c0[2]; z <= c1[2]; ++z)
        for (int y = c0[1]; y <= c1[1]; ++y) fn(c0[0], c1[0], y, z);
    (void)d;
}
}  // namespace

double PointSet::min_dist_sq(const double* q, double rmax) const {
    if (xs_.empty()) return std::numeric_limits<double>::infinity();
    const auto& k = simd::kernels();
    const int ring = std::max(1, static_cast<int>(std::ceil(rmax / cell_)));
    int c[3] = {0, 0, 0};
    cell_of(q, c);
    int c0[3] = {0, 0, 0}, c1[3] = {0, 0, 0};
    for (int i = 0; i < d_; ++i) {
        c0[i] = std::max(0, c[i] - ring);
        c1[i] = std::min(ncell_[i] - 1, c[i] + ring);
    }
    double best = std::numeric_limits<double>::infinity();
    visit_cells(c0, c1, d_, [&](int x0, int x1, int y, int z) {
        // contiguous run of cells along x
        const std::uint32_t id0 =
            static_cast<std::uint32_t>(x0) + static_cast<std::uint32_t>(y) * ncell_[0] +
            (d_ == 3 ? static_cast<std::uint32_t>(z) * ncell_[0] * ncell_[1] : 0u);
        const std::uint32_t id1 = id0 + static_cast<std::uint32_t>(x1 - x0);
        const std::uint32_t b = cell_start_[id0], e = cell_start_[id1 + 1];
        if (b == e) return;
        double d2;
        if (d_ == 2)
            d2 = k.min_dist_sq_2d(xs_.data() + b, ys_.data() + b, e - b, q[0], q[1]);
        else
            d2 = k.min_dist_sq_3d(xs_.data() + b, ys_.data() + b, zs_.data() + b,
                                  e - b, q[0], q[1], q[2]);
        if (d2 < best) best = d2;
    });
    if (best > rmax * rmax) return std::numeric_limits<double>::infinity();
    return best;
}

std::size_t PointSet::count_within(const double* q, double r) const {
    if (xs_.empty() || r < 0) return 0;
    const auto& k = simd::kernels();
    const int ring = std::max(1, static_cast<int>(std::ceil(r / cell_)));
    int c[3] = {0, 0, 0};
    cell_of(q, c);
    int c0[3] = {0, 0, 0}, c1[3] = {0, 0, 0};
    for (int i = 0; i < d_; ++i) {
        c0[i] = std::max(0, c[i] - ring);
        c1[i] = std::min(ncell_[i] - 1, c[i] + ring);
    }
    std::size_t total = 0;
    const double r2 = r * r;
    visit_cells(c0, c1, d_, [&](int x0, int x1, int y, int z) {
        const std::uint32_t id0 =
            static_cast<std::uint32_t>(x0) + static_cast<std::uint32_t>(y) * ncell_[0] +
            (d_ == 3 ? static_cast<std::uint32_t>(z) * ncell_[0] * ncell_[1] : 0u);
        const std::uint32_t id1 = id0 + static_cast<std::uint32_t>(x1 - x0);
        const std::uint32_t b = cell_start_[id0], e = cell_start_[id1 + 1];
        if (b == e) return;
        if (d_ == 2)
            total += k.count_within_2d(xs_.data() + b, ys_.data() + b, e - b,
                                       q[0], q[1], r2);
        else
            total += k.count_within_3d(xs_.data() + b, ys_.data() + b,
                                       zs_.data() + b, e - b, q[0], q[1], q[2], r2);
    });
    return total;
}

ObstacleField ObstacleField::sample(double nu, double mu, const Box& box,
                                    const ObstacleGeometry& geometry,
                                    std::uint64_t seed, bool pad) {
    if (!std::isfinite(nu) || !std::isfinite(mu) || nu < 0 || mu < 0)
        throw std::domain_error("ObstacleField::sample: intensity must be finite and >= 0");
    if (!box.nondegenerate())
        throw std::domain_error("ObstacleField::sample: degenerate box");
    geometry.validate();

    Box padded = box;
    const double a = pad ? geometry.envelope() : 0.0;
    for (int i = 0; i < box.d; ++i) {
        padded.lo[i] -= a;
        padded.hi[i] += a;
    }
    const double vol = padded.volume();

    auto draw = [&](double intensity, std::uint64_t stream)
        -> std::vector<std::array<double, 3>> {
        Rng rng(derive_seed(seed, {0x0b57ac1eULL, stream}));
        const std::uint64_t n = rng.poisson(intensity * vol);
        std::vector<std::array<double, 3>> pts(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            for (int c = 0; c < box.d; ++c)
                pts[i][c] = padded.lo[c] + (padded.hi[c] - padded.lo[c]) * rng.u01();
        }
        return pts;
    };

    return make_field_with_points(box, geometry, nu, mu, seed, draw(nu, 1),
                                  draw(mu, 2));
}

ObstacleField make_field_with_points(const Box& box, const ObstacleGeometry& geom,
                                     double nu, double mu, std::uint64_t seed,
                                     std::vector<std::array<double, 3>> hard,
                                     std::vector<std::array<double, 3>> soft) {
    ObstacleField f;
    f.box_ = box;
    f.geom_ = geom;
    f.nu_ = nu;
    f.mu_ = mu;
    f.seed_ = seed;
    Box padded = box;
    const double a = geom.envelope();
    for (int i = 0; i < box.d; ++i) {
        padded.lo[i] -= a;
        padded.hi[i] += a;
    }
    f.hard_ = PointSet(box.d, a, padded, std::move(hard));
    f.soft_ = PointSet(box.d, a, padded, std::move(soft));
    return f;
}

bool ObstacleField::in_hard_set(const double* x) const {
    const double aK = geom_.hard_radius;
    if (aK <= 0 || hard_.size() == 0) return false;
    const double d2 = hard_.min_dist_sq(x, aK + 1e-12);
    return d2 <= aK * aK;
}

double ObstacleField::soft_potential(const double* x) const {
    if (geom_.soft_height <= 0 || geom_.soft_radius <= 0 || soft_.size() == 0)
        return 0.0;
    return geom_.soft_height *
           static_cast<double>(soft_.count_within(x, geom_.soft_radius));
}

double ObstacleField::hard_clearance(const double* x, double cutoff) const {
    const double aK = geom_.hard_radius;
    const double d2 = hard_.min_dist_sq(x, cutoff + aK);
    if (!std::isfinite(d2)) return std::numeric_limits<double>::infinity();
    return std::sqrt(d2) - aK;
}

namespace {
nlohmann::json points_to_json(const PointSet& ps) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto p = ps.point(i);
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < ps.dim(); ++c) row.push_back(p[c]);
        arr.push_back(std::move(row));
    }
    return arr;
}

std::vector<std::array<double, 3>> points_from_json(const nlohmann::json& arr) {
    std::vector<std::array<double, 3>> pts;
    pts.reserve(arr.size());
    for (const auto& row : arr) {
        std::array<double, 3> p{};
        for (std::size_t c = 0; c < row.size() && c < 3; ++c) p[c] = row[c];
        pts.push_back(p);
    }
    return pts;
}
}  // namespace

nlohmann::json ObstacleField::to_json() const {
    nlohmann::json j;
    j["box"] = {{"d", box_.d},
                {"lo", std::vector<double>(box_.lo.begin(), box_.lo.begin() + box_.d)},
                {"hi", std::vector<double>(box_.hi.begin(), box_.hi.begin() + box_.d)}};
    j["nu"] = nu_;
    j["mu"] = mu_;
    j["geometry"] = {{"hard_radius", geom_.hard_radius},
                     {"soft_radius", geom_.soft_radius},
                     {"soft_height", geom_.soft_height},
                     {"sausage_radius", geom_.sausage_radius}};
    j["seed"] = seed_;
    j["points"] = {{"hard", points_to_json(hard_)}, {"soft", points_to_json(soft_)}};
    return j;
}

ObstacleField ObstacleField::from_json(const nlohmann::json& j) {
    Box box;
    box.d = j.at("box").at("d");
    const auto& lo = j.at("box").at("lo");
    const auto& hi = j.at("box").at("hi");
    for (int i = 0; i < box.d; ++i) {
        box.lo[i] = lo[i];
        box.hi[i] = hi[i];
    }
    ObstacleGeometry g;
    g.hard_radius = j.at("geometry").at("hard_radius");
    g.soft_radius = j.at("geometry").at("soft_radius");
    g.soft_height = j.at("geometry").at("soft_height");
    g.sausage_radius = j.at("geometry").at("sausage_radius");
    return make_field_with_points(box, g, j.at("nu"), j.at("mu"), j.at("seed"),
                                  points_from_json(j.at("points").at("hard")),
                                  points_from_json(j.at("points").at("soft")));
}

ScaledParameters scaled_parameters(double t, int d) {
    if (!(t > 0)) throw std::domain_error("scaled_parameters: t must be > 0");
    ScaledParameters s;
    s.epsilon = std::pow(t, -1.0 / (d + 2));
    s.tau = t * s.epsilon * s.epsilon;
    s.scaled_nu_factor = std::pow(s.epsilon, -d);
    return s;
}

}  // namespace sausagelab::obstacles
