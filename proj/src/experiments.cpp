#include "sausagelab/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "../vendor/json.hpp"
#include "sausagelab/brownian.hpp"
#include "sausagelab/coarse_grain.hpp"
#include "sausagelab/constants.hpp"
#include "sausagelab/estimators.hpp"
#include "sausagelab/rng.hpp"
#include "sausagelab/sausage.hpp"
#include "sausagelab/spectral.hpp"

namespace sausagelab::experiments {

namespace {

namespace fs = std::filesystem;
using runio::ExperimentConfig;
using runio::Metric;
using runio::RunRecord;

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

std::string t_tag(double t) {
    std::ostringstream os;
    os << "t" << t;
    return os.str();
}

estimators::EstimatorParams est_params(const ExperimentConfig& cfg) {
    estimators::EstimatorParams p;
    p.d = cfg.d;
    p.geometry = cfg.geometry;
    p.workers = cfg.workers;
    return p;
}

std::vector<double> grid_or_single(const ExperimentConfig& cfg) {
    return cfg.t_grid.empty() ? std::vector<double>{cfg.t} : cfg.t_grid;
}

void run_constants(const ExperimentConfig& cfg, RunRecord& rec) {
    const auto c = constants::Constants::make(cfg.d, cfg.nu);
    rec.metrics["omega_d"] = {c.omega_d, 0};
    rec.metrics["lambda_d"] = {c.lambda_d, 0};
    rec.metrics["c"] = {c.c, 0};
    rec.metrics["r0"] = {c.r0, 0};
    rec.metrics["x_star"] = {c.x_star(), 0};
    if (cfg.nu > 0) {
        rec.metrics["derivative_identity_gap"] = {
            constants::derivative_identity_check(cfg.d, cfg.nu, 1e-4), 0};
        rec.metrics["rate_at_x_star"] = {
            constants::rate_function(c.x_star(), cfg.d, cfg.nu), 0};
    }
}

void run_survive(const ExperimentConfig& cfg, RunRecord& rec) {
    const auto params = est_params(cfg);
    const double c = constants::variational_constant(cfg.d, cfg.mu + cfg.nu);
    const double exponent =
        c * std::pow(cfg.t, static_cast<double>(cfg.d) / (cfg.d + 2));
    if (std::exp(-exponent) >= 1e-4) {
        const auto naive = estimators::estimate_survival_naive(
            cfg.mu, cfg.nu, cfg.t, cfg.n_fields, cfg.n_paths, cfg.dt, cfg.seed,
            params);
        rec.metrics["naive_mean"] = {naive.mean, naive.stderr_};
    }
    const double r_opt = constants::optimal_radius(cfg.d, cfg.mu + cfg.nu) *
                         std::pow(cfg.t, 1.0 / (cfg.d + 2));
    const auto clearing = estimators::estimate_survival_clearing(
        cfg.mu, cfg.nu, cfg.t, r_opt, cfg.n_paths, cfg.dt, cfg.seed, params);
    rec.metrics["clearing_mean"] = {clearing.mean, clearing.stderr_};
    rec.metrics["clearing_log_mean"] = {clearing.log_mean, 0};
    rec.metrics["clearing_exponent_ratio"] = {-clearing.log_mean / exponent, 0};
    // eigen-decay fit plot for the confinement factor
    const auto curve = brownian::ball_survival_splitting(
        1.0, 6.0, 0.5, cfg.n_paths, cfg.dt, true, cfg.seed, cfg.d);
    const double rate = curve.fitted_rate(2.0, 6.0);
    rec.metrics["unit_ball_decay_rate"] = {rate, 0};
    runio::Series meas{curve.s, curve.log_survival, "#1f77b4", "measured"};
    runio::Series fit;
    fit.color = "#d62728";
    fit.label = "fit slope";
    for (double s : curve.s) {
        fit.x.push_back(s);
        fit.y.push_back(curve.log_survival.back() - rate * (s - curve.s.back()));
    }
    runio::write_svg_lines(out_path(cfg, "eigen_decay.svg"), {meas, fit},
                           "unit-ball survival decay", "s", "log P(T > s)");
}

void run_sausage(const ExperimentConfig& cfg, RunRecord& rec) {
    double mean_grid = 0, mean_mc = 0, max_z = 0;
    double origin[3] = {0, 0, 0};
    const double rho = cfg.geometry.sausage_radius;
    for (std::size_t k = 0; k < cfg.n_samples; ++k) {
        const auto path = brownian::simulate_path(
            cfg.t, cfg.dt, cfg.d, origin, derive_seed(cfg.seed, {0x5a6eULL, k}));
        const auto g = sausage::sausage_volume_grid(path, rho, rho / 16.0);
        const auto m = sausage::sausage_volume_mc(path, rho, 200000,
                                                 derive_seed(cfg.seed, {0x3cULL, k}));
        mean_grid += g.volume / cfg.n_samples;
        mean_mc += m.volume / cfg.n_samples;
        if (m.stderr_ > 0)
            max_z = std::max(max_z, std::fabs(g.volume - m.volume) / m.stderr_);
    }
    rec.metrics["mean_volume_grid"] = {mean_grid, 0};
    rec.metrics["mean_volume_mc"] = {mean_mc, 0};
    rec.metrics["max_grid_vs_mc_z"] = {max_z, 0};
}

void run_lln(const ExperimentConfig& cfg, RunRecord& rec) {
    const auto params = est_params(cfg);
    const auto consts = constants::Constants::make(cfg.d, cfg.mu + cfg.nu);
    runio::Series trend;
    trend.label = "weighted mean";
    estimators::ConditionedStats last;
    for (double t : grid_or_single(cfg)) {
        const auto stats = estimators::conditioned_sausage_stats(
            cfg.mu, cfg.nu, t, cfg.dt, cfg.n_samples, cfg.seed, cfg.slack, params);
        const double mean = stats.weighted_mean_volume();
        rec.metrics["scaled_volume_" + t_tag(t)] = {mean, 0};
        rec.metrics["ess_" + t_tag(t)] = {stats.effective_sample_size(), 0};
        trend.x.push_back(std::log10(t));
        trend.y.push_back(mean);
        last = stats;
    }
    runio::Series ref;
    ref.color = "#d62728";
    ref.label = "limit";
    for (double x : trend.x) {
        ref.x.push_back(x);
        ref.y.push_back(consts.x_star());
    }
    runio::write_svg_lines(out_path(cfg, "lln_trend.svg"), {trend, ref},
                           "scaled sausage volume vs t", "log10 t",
                           "t^{-d/(d+2)} |W_t|");
    runio::write_svg_histogram(out_path(cfg, "lln_hist.svg"),
                               last.scaled_volume_samples, last.weights, 24,
                               consts.x_star(), "scaled volume, largest t");
}

void run_ldp(const ExperimentConfig& cfg, RunRecord& rec) {
    const auto params = est_params(cfg);
    const double r0 = constants::optimal_radius(cfg.d, cfg.nu);
    std::vector<double> radii;
    for (double m : cfg.radii.empty() ? std::vector<double>{0.8, 1.0, 1.3}
                                      : cfg.radii)
        radii.push_back(m * r0);
    const auto curve = estimators::ldp_curve(cfg.nu, cfg.t, radii, cfg.n_paths,
                                             cfg.dt, cfg.seed, params);
    runio::Series emp{{}, {}, "#1f77b4", "empirical"};
    runio::Series ana{{}, {}, "#d62728", "I(x)"};
    const double c = constants::variational_constant(cfg.d, cfg.nu);
    double max_rel = 0;
    for (const auto& p : curve) {
        emp.x.push_back(p.x);
        emp.y.push_back(p.empirical_rate);
        ana.x.push_back(p.x);
        ana.y.push_back(p.i_of_x);
        max_rel = std::max(max_rel, std::fabs(p.empirical_rate - p.i_of_x) / c);
        std::ostringstream tag;
        tag << "rate_r" << p.radius / r0;
        rec.metrics[tag.str()] = {p.empirical_rate, 0};
    }
    rec.metrics["max_rate_rel_err"] = {max_rel, 0};
    runio::write_svg_lines(out_path(cfg, "ldp_curve.svg"), {emp, ana},
                           "strategy rate vs analytic rate", "x", "I(x)");
}

void run_confine(const ExperimentConfig& cfg, RunRecord& rec) {
    const auto params = est_params(cfg);
    for (double t : grid_or_single(cfg)) {
        const auto stats = estimators::conditioned_sausage_stats(
            cfg.mu, cfg.nu, t, cfg.dt, cfg.n_samples, cfg.seed, cfg.slack, params);
        rec.metrics["confinement_" + t_tag(t)] = {stats.confinement_fraction, 0};
    }
}

void run_tightness(const ExperimentConfig& cfg, RunRecord& rec) {
    const auto params = est_params(cfg);
    const auto rows = estimators::exponential_tightness_scan(
        cfg.mu, cfg.nu, grid_or_single(cfg), cfg.eta, cfg.dt, cfg.n_samples,
        cfg.seed, params);
    runio::Series s;
    s.label = "moment";
    for (const auto& row : rows) {
        rec.metrics["moment_" + t_tag(row.t)] = {row.moment, 0};
        s.x.push_back(std::log10(row.t));
        s.y.push_back(row.moment);
    }
    runio::write_svg_lines(out_path(cfg, "tightness.svg"), {s},
                           "conditioned exponential moment", "log10 t",
                           "E exp(eta scaled sup)");
}

void run_spectral(const ExperimentConfig& cfg, RunRecord& rec) {
    spectral::EigenOptions opts;
    opts.residual_tol = cfg.tol;
    const auto disk = spectral::GridDomain::ball(cfg.d, cfg.r, cfg.h);
    const auto res = spectral::eigen_dirichlet(disk, {}, opts);
    rec.metrics["lambda1_ball"] = {res.lambda1, 0};
    rec.metrics["lambda2_ball"] = {res.lambda2, 0};
    rec.metrics["lambda1_ball_exact"] = {
        constants::lambda_ball(cfg.d) / (cfg.r * cfg.r), 0};
    const auto fk = spectral::faber_krahn_check(disk);
    rec.metrics["faber_krahn_ratio_ball"] = {fk.ratio, 0};
    res.dump_csv(disk, out_path(cfg, "phi1.csv"));
}

void run_capacity(const ExperimentConfig& cfg, RunRecord& rec) {
    spectral::CapacityParams params;
    params.h = cfg.h;
    params.seed = cfg.seed;
    params.n_walkers = cfg.n_samples > 64 ? cfg.n_samples : 100000;
    spectral::Ball ball;
    ball.radius = cfg.r;
    if (cfg.d == 3) {
        rec.metrics["cap_hitting_mc"] = {
            spectral::capacity({ball}, 3, spectral::CapacityMethod::hitting_mc,
                               params),
            0};
        rec.metrics["cap_exact"] = {2.0 * M_PI * cfg.r, 0};
    } else {
        rec.metrics["cap_grid"] = {
            spectral::capacity({ball}, 2, spectral::CapacityMethod::grid_solve,
                               params),
            0};
    }
}

void run_moe(const ExperimentConfig& cfg, RunRecord& rec) {
    coarse_grain::MoeParams proto = coarse_grain::MoeParams::make(
        cfg.moe.eps_sweep.front(), cfg.geometry.envelope(), cfg.moe.delta,
        cfg.moe.L, cfg.moe.alpha, cfg.moe.gamma, cfg.moe.beta, cfg.d);
    proto.cap.truncation_radius = 2.5;
    proto.cap.h = 1.0 / 96;
    proto.cap.cg_tol = 1e-7;
    const auto rows = coarse_grain::volume_control_diagnostic(
        cfg.nu, cfg.moe.eps_sweep, cfg.moe.kappa, cfg.moe.n_trials, proto,
        cfg.seed, cfg.workers);
    std::ostringstream csv;
    csv << "epsilon,max_stat,mean_stat\n";
    for (const auto& row : rows) {
        std::ostringstream tag;
        tag << "volstat_eps" << row.epsilon;
        rec.metrics[tag.str()] = {row.max_stat, 0};
        csv << row.epsilon << ',' << row.max_stat << ',' << row.mean_stat << '\n';
    }
    {
        std::ofstream out(out_path(cfg, "moe_volume_control.csv"));
        out << csv.str();
    }
    // classification map of one field at the finest epsilon
    const double eps = cfg.moe.eps_sweep.back();
    coarse_grain::MoeParams params = coarse_grain::MoeParams::make(
        eps, cfg.geometry.envelope(), cfg.moe.delta, cfg.moe.L, cfg.moe.alpha,
        cfg.moe.gamma, cfg.moe.beta, cfg.d);
    params.cap = proto.cap;
    obstacles::Box box;
    box.d = cfg.d;
    for (int c = 0; c < cfg.d; ++c) {
        box.lo[c] = 0;
        box.hi[c] = 1;
    }
    obstacles::ObstacleGeometry geom;
    geom.hard_radius = params.a * eps;
    geom.sausage_radius = params.a * eps;
    const auto field = obstacles::ObstacleField::sample(
        cfg.nu * std::pow(eps, -cfg.d), 0.0, box, geom,
        derive_seed(cfg.seed, {0x40e0cULL, 0}), false);
    const auto cls = coarse_grain::classify(field, params);
    if (cfg.d == 2) {
        const long nb = static_cast<long>(std::lround(
            std::pow(double(params.L), params.n_beta)));
        const long ng = static_cast<long>(std::lround(
            std::pow(double(params.L), params.n_gamma)));
        std::vector<int> classes(nb * nb, 0);
        const long per = nb / ng;
        for (const auto& dbox : cls.density_boxes)
            for (long j = 0; j < per; ++j)
                for (long i = 0; i < per; ++i) {
                    const long x = dbox[0] * per + i, y = dbox[1] * per + j;
                    if (x >= 0 && x < nb && y >= 0 && y < nb)
                        classes[y * nb + x] = 1;
                }
        for (const auto& bbox : cls.bad_boxes)
            if (bbox[0] >= 0 && bbox[0] < nb && bbox[1] >= 0 && bbox[1] < nb)
                classes[bbox[1] * nb + bbox[0]] = 2;
        runio::write_svg_boxmap(out_path(cfg, "moe_map.svg"),
                                static_cast<int>(nb), classes,
                                "density (green) and bad (red) boxes");
    }
}

}  // namespace

runio::RunRecord run(const runio::ExperimentConfig& config) {
    config.validate();
    fs::create_directories(config.out_dir);
    RunRecord rec;
    rec.experiment = config.experiment;
    rec.seed = config.seed;
    rec.config_hash = config.hash();
    rec.input_hash = rec.config_hash ^ mix64(config.seed);
    rec.started_at = runio::iso8601_now();
    try {
        if (config.experiment == "constants")
            run_constants(config, rec);
        else if (config.experiment == "survive")
            run_survive(config, rec);
        else if (config.experiment == "sausage")
            run_sausage(config, rec);
        else if (config.experiment == "lln")
            run_lln(config, rec);
        else if (config.experiment == "ldp")
            run_ldp(config, rec);
        else if (config.experiment == "confine")
            run_confine(config, rec);
        else if (config.experiment == "tightness")
            run_tightness(config, rec);
        else if (config.experiment == "spectral")
            run_spectral(config, rec);
        else if (config.experiment == "capacity")
            run_capacity(config, rec);
        else if (config.experiment == "moe")
            run_moe(config, rec);
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    rec.finished_at = runio::iso8601_now();
    const std::string jsonl = out_path(config, "runs.jsonl");
    runio::append_jsonl(jsonl, rec.to_json());
    runio::write_summary_csv(out_path(config, "summary.csv"),
                             runio::read_jsonl(jsonl));
    return rec;
}

std::string report(const std::vector<runio::RunRecord>& records, bool* ok) {
    if (records.empty()) throw std::invalid_argument("report: no records");
    const std::string& kind = records.front().experiment;
    for (const auto& r : records)
        if (r.experiment != kind)
            throw std::invalid_argument(
                "report: mixed experiments ('" + kind + "' vs '" + r.experiment +
                "'); report one series at a time");
    bool all_ok = true;
    std::ostringstream os;
    os << "experiment: " << kind << ", records: " << records.size() << "\n";
    for (const auto& r : records) {
        if (!r.error.empty()) {
            all_ok = false;
            os << "  run " << r.input_hash << " failed: " << r.error << "\n";
        }
        for (const auto& [name, m] : r.metrics)
            os << "  " << name << " = " << m.value
               << (m.stderr_ > 0 ? " +- " + std::to_string(m.stderr_) : "")
               << "\n";
    }
    if (kind == "lln") {
        // monotone trend of the weighted-mean scaled volume across the t-grid
        std::vector<std::pair<double, double>> series;
        for (const auto& r : records)
            for (const auto& [name, m] : r.metrics)
                if (name.rfind("scaled_volume_t", 0) == 0)
                    series.emplace_back(std::stod(name.substr(15)), m.value);
        std::sort(series.begin(), series.end());
        for (std::size_t i = 1; i < series.size(); ++i)
            if (series[i].second < series[i - 1].second) {
                all_ok = false;
                os << "  TREND VIOLATION: scaled volume decreased from t="
                   << series[i - 1].first << " to t=" << series[i].first << "\n";
            }
        if (!series.empty())
            os << "  trend: " << series.front().second << " -> "
               << series.back().second << " over " << series.size()
               << " points\n";
    }
    if (ok) *ok = all_ok;
    return os.str();
}

}  // namespace sausagelab::experiments
