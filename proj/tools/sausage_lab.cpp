#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "../vendor/CLI11.hpp"
#include "../vendor/json.hpp"
#include "sausagelab/constants.hpp"
#include "sausagelab/experiments.hpp"
#include "sausagelab/runio.hpp"

namespace {

using sausagelab::runio::ExperimentConfig;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out_dir;
};

int run_experiment(const std::string& experiment, const CommonOpts& opts) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = ExperimentConfig::load(opts.config_path);
    cfg.experiment = experiment;
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.workers) cfg.workers = *opts.workers;
    if (opts.out_dir) cfg.out_dir = *opts.out_dir;
    if (const char* env = std::getenv("SAUSAGE_LAB_WORKERS"); env && !opts.workers)
        cfg.workers = static_cast<unsigned>(std::stoul(env));
    const auto rec = sausagelab::experiments::run(cfg);
    if (!rec.error.empty()) {
        std::cerr << "run failed: " << rec.error << "\n";
        return 1;
    }
    for (const auto& [name, m] : rec.metrics) {
        std::cout << name << " = " << m.value;
        if (m.stderr_ > 0) std::cout << " +- " << m.stderr_;
        std::cout << "\n";
    }
    std::cout << "record appended to " << cfg.out_dir << "/runs.jsonl\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Brownian motion among Poissonian obstacles: simulation and "
                 "numerical verification toolkit"};
    app.require_subcommand(1);

    // quick closed-form mode: sausage-lab constants --dim D --nu NU [--json]
    int dim = 2;
    double nu = 1.0;
    bool as_json = false;
    CommonOpts const_opts;
    auto* sc_const = app.add_subcommand("constants", "closed-form constants");
    sc_const->add_option("--dim", dim, "dimension")->check(CLI::Range(1, 10));
    sc_const->add_option("--nu", nu, "obstacle intensity")
        ->check(CLI::NonNegativeNumber);
    sc_const->add_flag("--json", as_json, "emit JSON");
    sc_const->add_option("--config", const_opts.config_path, "run as experiment");
    sc_const->add_option("--seed", const_opts.seed);
    sc_const->add_option("--workers", const_opts.workers);
    sc_const->add_option("--out", const_opts.out_dir);

    const std::vector<std::string> experiments = {
        "survive", "sausage", "lln",      "ldp", "confine",
        "tightness", "spectral", "capacity", "moe"};
    std::map<std::string, CommonOpts> opts;
    for (const auto& name : experiments) {
        auto* sc = app.add_subcommand(name, name + " experiment");
        auto& o = opts[name];
        sc->add_option("--config", o.config_path, "JSON config file")
            ->check(CLI::ExistingFile);
        sc->add_option("--seed", o.seed, "master seed");
        sc->add_option("--workers", o.workers, "worker threads (0 = all cores)");
        sc->add_option("--out", o.out_dir, "output directory");
    }

    std::string runs_path = "runs.jsonl";
    auto* sc_report = app.add_subcommand("report", "summarize run records");
    sc_report->add_option("--runs", runs_path, "runs.jsonl path")
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_const->parsed()) {
            if (!const_opts.config_path.empty() || const_opts.out_dir)
                return run_experiment("constants", const_opts);
            const auto c = sausagelab::constants::Constants::make(dim, nu);
            if (as_json) {
                nlohmann::json j{{"d", c.d},           {"nu", c.nu},
                                 {"omega_d", c.omega_d}, {"lambda_d", c.lambda_d},
                                 {"c", c.c},           {"r0", c.r0}};
                std::cout << j.dump(2) << "\n";
            } else {
                std::printf("d        = %d\nnu       = %.10g\n", c.d, c.nu);
                std::printf("omega_d  = %.10f\nlambda_d = %.10f\n", c.omega_d,
                            c.lambda_d);
                std::printf("c        = %.10f\nr0       = %.10f\n", c.c, c.r0);
            }
            return 0;
        }
        if (sc_report->parsed()) {
            const auto records = sausagelab::runio::read_jsonl(runs_path);
            bool ok = true;
            std::cout << sausagelab::experiments::report(records, &ok);
            return ok ? 0 : 2;
        }
        for (const auto& name : experiments)
            if (app.get_subcommand(name)->parsed())
                return run_experiment(name, opts[name]);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
