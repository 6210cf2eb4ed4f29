#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "sausagelab/obstacles.hpp"
#include "sausagelab/spectral.hpp"

namespace sausagelab::coarse_grain {

// Hierarchical L-adic index: integer base box plus per-level digits in
// {0..L-1}^d. The box is q + L^{-k}[0,1]^d with q accumulated from the digits.
struct LAdicIndex {
    std::array<long, 3> base{};
    std::vector<std::array<int, 3>> digits;

    int level() const { return static_cast<int>(digits.size()); }
    LAdicIndex truncated(int k) const;  // [index]_k, k <= level
};

struct LAdicBox {
    std::array<double, 3> corner{};
    double side = 1.0;
};

LAdicBox l_adic_box(const LAdicIndex& index, int L, int d);

// Flat alternative used by the classifiers: a level-k box is identified by its
// integer corner coordinates at spacing L^{-k} (corner = coords * L^{-k}).
using BoxCoords = std::array<long, 3>;

BoxCoords ancestor(const BoxCoords& c, int from_level, int to_level, int L);

struct MoeParams {
    int d = 2;
    int L = 2;
    double alpha = 0.2, gamma = 0.5, beta = 0.8;
    double delta = 0.05;
    double epsilon = 0.0;
    double a = 0.5;  // trap radius (geometry envelope)
    int n_alpha = 0, n_gamma = 0, n_beta = 0;
    spectral::CapacityParams cap;  // capacity solver knobs for the skeletons

    // computes n_* from (epsilon, alpha/gamma/beta, L) and validates the
    // scale-separation preconditions
    static MoeParams make(double epsilon, double a, double delta, int L = 2,
                          double alpha = 0.2, double gamma = 0.5,
                          double beta = 0.8, int d = 2);
    void validate() const;
};

struct CoarseGrainResult {
    std::set<BoxCoords> density_boxes;  // level n_gamma
    std::set<BoxCoords> bad_boxes;      // level n_beta
    std::map<std::pair<int, BoxCoords>, double> skeleton_caps;
    double bad_volume = 0.0;  // |bad set| = #bad_boxes * L^{-d n_beta}
};

// Capacity of the rescaled trap skeleton K = L^k (union of B(x_q, a eps)) over
// the hard points x_q in the level-k box; 0 for an empty box. Convention from
// the spectral module: 1 - Laplacian/2 for d = 2, -Laplacian/2 for d = 3.
double skeleton_capacity(const obstacles::ObstacleField& field,
                         const BoxCoords& coords, int level,
                         const MoeParams& params);

// Quantitative Wiener criterion over levels n_alpha < k <= n_gamma; caps are
// cached in (and reused from) `result.skeleton_caps` when provided.
std::set<BoxCoords> classify_density_boxes(const obstacles::ObstacleField& field,
                                           const MoeParams& params,
                                           CoarseGrainResult* result = nullptr);

// Occupied level-n_beta boxes not contained in the density set.
std::set<BoxCoords> classify_bad_boxes(const obstacles::ObstacleField& field,
                                       const MoeParams& params,
                                       const std::set<BoxCoords>& density_set);

CoarseGrainResult classify(const obstacles::ObstacleField& field,
                           const MoeParams& params);

struct VolumeControlRow {
    double epsilon = 0.0;
    double max_stat = 0.0;  // max over fields of eps^{-kappa} |bad set in C_q|
    double mean_stat = 0.0;
};

// Diagnostic sweep: Poisson fields of intensity nu on the unit box, bad-set
// volume scaled by eps^{-kappa}; the statistic should not grow as eps falls.
std::vector<VolumeControlRow> volume_control_diagnostic(
    double nu, const std::vector<double>& eps_sweep, double kappa,
    std::size_t n_trials, const MoeParams& proto, std::uint64_t seed,
    unsigned workers = 0);

}  // namespace sausagelab::coarse_grain
