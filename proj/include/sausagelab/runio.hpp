#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sausagelab/nlohmann_fwd.hpp"
#include "sausagelab/obstacles.hpp"

namespace sausagelab::runio {

inline constexpr const char* kVersion = "0.1.0";

struct MoeConfig {
    std::vector<double> eps_sweep = {1.0 / 16, 1.0 / 32};
    int L = 2;
    double alpha = 0.2, gamma = 0.5, beta = 0.8;
    double delta = 0.05;
    double kappa = 0.2;  // (1-beta)*d/2 for the defaults
    std::size_t n_trials = 100;
};

struct ExperimentConfig {
    std::string experiment;  // constants|survive|sausage|lln|ldp|confine|
                             // tightness|spectral|capacity|moe
    int d = 2;
    double nu = 1.0;
    double mu = 0.0;
    double t = 100.0;
    std::vector<double> t_grid;
    double dt = 1e-3;
    obstacles::ObstacleGeometry geometry;
    std::size_t n_fields = 100;
    std::size_t n_paths = 100;
    std::size_t n_samples = 16;
    double h = 1.0 / 128;       // solver grid spacing
    double tol = 1e-8;
    double r = 1.0;             // clearing / capacity radius
    std::vector<double> radii;  // ldp strategy radii (units of R0)
    double slack = 0.25;
    double eta = 1.0;
    MoeConfig moe;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    unsigned workers = 0;

    // throws std::invalid_argument listing *every* violated precondition
    void validate() const;
    nlohmann::json to_json() const;  // canonical form
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    std::uint64_t hash() const;  // FNV-1a over the canonical serialization
};

struct Metric {
    double value = 0.0;
    double stderr_ = 0.0;
};

struct RunRecord {
    std::uint64_t config_hash = 0;
    std::uint64_t input_hash = 0;  // hash of config + seed
    std::string started_at;        // ISO-8601 UTC
    std::string finished_at;
    std::map<std::string, Metric> metrics;
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::string experiment;
    std::string error;  // nonempty when the run partially failed

    nlohmann::json to_json() const;
    static RunRecord from_json(const nlohmann::json& j);
};

// Line-atomic append (single write syscall per record).
void append_jsonl(const std::string& path, const nlohmann::json& record);
std::vector<RunRecord> read_jsonl(const std::string& path);

void write_summary_csv(const std::string& path,
                       const std::vector<RunRecord>& records);

// Minimal SVG emitters.
struct Series {
    std::vector<double> x, y;
    std::string color = "#1f77b4";
    std::string label;
};
void write_svg_lines(const std::string& path, const std::vector<Series>& series,
                     const std::string& title, const std::string& xlabel,
                     const std::string& ylabel);
void write_svg_histogram(const std::string& path,
                         const std::vector<double>& samples,
                         const std::vector<double>& weights, int bins,
                         double ref_line, const std::string& title);
// 2-d box classification map: 0 neutral, 1 density, 2 bad
void write_svg_boxmap(const std::string& path, int n,
                      const std::vector<int>& classes, const std::string& title);

std::string iso8601_now();

}  // namespace sausagelab::runio
