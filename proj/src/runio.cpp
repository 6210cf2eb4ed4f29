#include "sausagelab/runio.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "../vendor/json.hpp"

namespace sausagelab::runio {

namespace {

using json = nlohmann::json;

const std::set<std::string> kExperiments = {
    "constants", "survive", "sausage",  "lln",      "ldp",
    "confine",   "tightness", "spectral", "capacity", "moe"};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

void ExperimentConfig::validate() const {
    std::vector<std::string> errs;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) errs.push_back(msg);
    };
    need(kExperiments.count(experiment) == 1,
         "experiment: unknown name '" + experiment + "'");
    need(d >= 1 && d <= 3, "d: must be 1, 2, or 3");
    need(nu >= 0, "nu: must be >= 0");
    need(mu >= 0, "mu: must be >= 0");
    need(t > 0, "t: must be > 0");
    need(dt > 0, "dt: must be > 0");
    for (double tg : t_grid) need(tg > 0, "t_grid: entries must be > 0");
    need(std::is_sorted(t_grid.begin(), t_grid.end()),
         "t_grid: must be increasing");
    try {
        geometry.validate();
    } catch (const std::exception& e) {
        errs.push_back(std::string("geometry: ") + e.what());
    }
    need(n_fields > 0, "n_fields: must be > 0");
    need(n_paths > 0, "n_paths: must be > 0");
    need(n_samples > 0, "n_samples: must be > 0");
    need(h > 0, "h: must be > 0");
    need(tol > 0, "tol: must be > 0");
    need(r > 0, "r: must be > 0");
    for (double rr : radii) need(rr > 0, "radii: entries must be > 0");
    need(slack >= 0, "slack: must be >= 0");
    need(eta >= 0, "eta: must be >= 0");
    need(!out_dir.empty(), "out: directory must be nonempty");
    if (experiment == "moe") {
        need(!moe.eps_sweep.empty(), "moe.eps_sweep: must be nonempty");
        for (double e : moe.eps_sweep)
            need(e > 0 && e < 1, "moe.eps_sweep: entries must be in (0,1)");
        for (std::size_t i = 1; i < moe.eps_sweep.size(); ++i)
            need(moe.eps_sweep[i] < moe.eps_sweep[i - 1],
                 "moe.eps_sweep: must be decreasing");
        need(moe.L >= 2, "moe.L: must be >= 2");
        need(0 < moe.alpha && moe.alpha < moe.gamma && moe.gamma < moe.beta &&
                 moe.beta < 1,
             "moe: need 0 < alpha < gamma < beta < 1");
        need(moe.delta > 0, "moe.delta: must be > 0");
        need(moe.kappa > 0, "moe.kappa: must be > 0");
        need(moe.n_trials > 0, "moe.n_trials: must be > 0");
    }
    if (!errs.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    return json{{"experiment", experiment},
                {"d", d},
                {"nu", nu},
                {"mu", mu},
                {"t", t},
                {"t_grid", t_grid},
                {"dt", dt},
                {"geometry",
                 {{"hard_radius", geometry.hard_radius},
                  {"soft_radius", geometry.soft_radius},
                  {"soft_height", geometry.soft_height},
                  {"sausage_radius", geometry.sausage_radius}}},
                {"n_fields", n_fields},
                {"n_paths", n_paths},
                {"n_samples", n_samples},
                {"h", h},
                {"tol", tol},
                {"r", r},
                {"radii", radii},
                {"slack", slack},
                {"eta", eta},
                {"moe",
                 {{"eps_sweep", moe.eps_sweep},
                  {"L", moe.L},
                  {"alpha", moe.alpha},
                  {"gamma", moe.gamma},
                  {"beta", moe.beta},
                  {"delta", moe.delta},
                  {"kappa", moe.kappa},
                  {"n_trials", moe.n_trials}}},
                {"seed", seed},
                {"out", out_dir},
                {"workers", workers}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    auto get = [&j](const char* key, auto& into) {
        if (j.contains(key)) into = j.at(key).template get<std::decay_t<decltype(into)>>();
    };
    get("experiment", c.experiment);
    get("d", c.d);
    get("nu", c.nu);
    get("mu", c.mu);
    get("t", c.t);
    get("t_grid", c.t_grid);
    get("dt", c.dt);
    if (j.contains("geometry")) {
        const auto& g = j.at("geometry");
        auto gget = [&g](const char* key, double& into) {
            if (g.contains(key)) into = g.at(key).get<double>();
        };
        gget("hard_radius", c.geometry.hard_radius);
        gget("soft_radius", c.geometry.soft_radius);
        gget("soft_height", c.geometry.soft_height);
        gget("sausage_radius", c.geometry.sausage_radius);
    }
    get("n_fields", c.n_fields);
    get("n_paths", c.n_paths);
    get("n_samples", c.n_samples);
    get("h", c.h);
    get("tol", c.tol);
    get("r", c.r);
    get("radii", c.radii);
    get("slack", c.slack);
    get("eta", c.eta);
    if (j.contains("moe")) {
        const auto& m = j.at("moe");
        auto mget = [&m](const char* key, auto& into) {
            if (m.contains(key))
                into = m.at(key).template get<std::decay_t<decltype(into)>>();
        };
        mget("eps_sweep", c.moe.eps_sweep);
        mget("L", c.moe.L);
        mget("alpha", c.moe.alpha);
        mget("gamma", c.moe.gamma);
        mget("beta", c.moe.beta);
        mget("delta", c.moe.delta);
        mget("kappa", c.moe.kappa);
        mget("n_trials", c.moe.n_trials);
    }
    get("seed", c.seed);
    get("out", c.out_dir);
    get("workers", c.workers);
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j = json::parse(in);
    return from_json(j);
}

std::uint64_t ExperimentConfig::hash() const {
    json j = to_json();
    // operational knobs don't change what the run computes
    j.erase("out");
    j.erase("workers");
    return fnv1a(j.dump());
}

nlohmann::json RunRecord::to_json() const {
    json m = json::object();
    for (const auto& [name, metric] : metrics)
        m[name] = {{"value", metric.value}, {"stderr", metric.stderr_}};
    json j{{"config_hash", config_hash}, {"input_hash", input_hash},
           {"started_at", started_at},   {"finished_at", finished_at},
           {"metrics", m},               {"seed", seed},
           {"version", version},         {"experiment", experiment}};
    if (!error.empty()) j["error"] = error;
    return j;
}

RunRecord RunRecord::from_json(const nlohmann::json& j) {
    RunRecord r;
    r.config_hash = j.at("config_hash").get<std::uint64_t>();
    r.input_hash = j.at("input_hash").get<std::uint64_t>();
    r.started_at = j.at("started_at").get<std::string>();
    r.finished_at = j.at("finished_at").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.version = j.at("version").get<std::string>();
    r.experiment = j.at("experiment").get<std::string>();
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    for (const auto& [name, m] : j.at("metrics").items())
        r.metrics[name] = {m.at("value").get<double>(),
                           m.at("stderr").get<double>()};
    return r;
}

void append_jsonl(const std::string& path, const nlohmann::json& record) {
    const std::string line = record.dump() + "\n";
    // line-atomic: one buffered write, append mode
    std::FILE* f = std::fopen(path.c_str(), "ab");
    if (!f) throw std::runtime_error("cannot open for append: " + path);
    const std::size_t n = std::fwrite(line.data(), 1, line.size(), f);
    std::fclose(f);
    if (n != line.size())
        throw std::runtime_error("short write appending to " + path);
}

std::vector<RunRecord> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) return {};  // a run log that doesn't exist yet is empty
    std::vector<RunRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(RunRecord::from_json(json::parse(line)));
    }
    return out;
}

void write_summary_csv(const std::string& path,
                       const std::vector<RunRecord>& records) {
    std::set<std::string> names;
    for (const auto& r : records)
        for (const auto& [name, m] : r.metrics) names.insert(name);
    std::ofstream out(path);
    out << "experiment,seed,config_hash,started_at";
    for (const auto& n : names) out << ',' << n << ',' << n << "_stderr";
    out << '\n';
    out.precision(12);
    for (const auto& r : records) {
        out << r.experiment << ',' << r.seed << ',' << r.config_hash << ','
            << r.started_at;
        for (const auto& n : names) {
            auto it = r.metrics.find(n);
            if (it == r.metrics.end())
                out << ",,";
            else
                out << ',' << it->second.value << ',' << it->second.stderr_;
        }
        out << '\n';
    }
}

namespace {

struct Frame {
    double x0, x1, y0, y1;  // data range
    static constexpr int w = 640, h = 440;
    static constexpr int ml = 70, mr = 20, mt = 40, mb = 50;

    double px(double x) const {
        return ml + (x - x0) / (x1 - x0 + 1e-300) * (w - ml - mr);
    }
    double py(double y) const {
        return h - mb - (y - y0) / (y1 - y0 + 1e-300) * (h - mt - mb);
    }
};

void svg_open(std::ostream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::w
        << "\" height=\"" << Frame::h << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << Frame::w / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           "font-size=\"15\">"
        << title << "</text>\n";
}

void svg_axes(std::ostream& out, const Frame& f, const std::string& xlabel,
              const std::string& ylabel) {
    out << "<rect x=\"" << Frame::ml << "\" y=\"" << Frame::mt << "\" width=\""
        << Frame::w - Frame::ml - Frame::mr << "\" height=\""
        << Frame::h - Frame::mt - Frame::mb
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
        const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
        out << "<text x=\"" << f.px(x) << "\" y=\"" << Frame::h - Frame::mb + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << x << "</text>\n"
            << "<text x=\"" << Frame::ml - 8 << "\" y=\"" << f.py(y) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << y << "</text>\n";
    }
    out << "<text x=\"" << Frame::w / 2 << "\" y=\"" << Frame::h - 10
        << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n"
        << "<text x=\"16\" y=\"" << Frame::h / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << Frame::h / 2 << ")\">" << ylabel << "</text>\n";
}

}  // namespace

void write_svg_lines(const std::string& path, const std::vector<Series>& series,
                     const std::string& title, const std::string& xlabel,
                     const std::string& ylabel) {
    Frame f{std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            f.x0 = std::min(f.x0, s.x[i]);
            f.x1 = std::max(f.x1, s.x[i]);
            f.y0 = std::min(f.y0, s.y[i]);
            f.y1 = std::max(f.y1, s.y[i]);
        }
    if (!(f.x0 <= f.x1)) f = {0, 1, 0, 1};
    const double pad = 0.05 * (f.y1 - f.y0 + 1e-12);
    f.y0 -= pad;
    f.y1 += pad;
    std::ofstream out(path);
    svg_open(out, title);
    svg_axes(out, f, xlabel, ylabel);
    int li = 0;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << f.px(s.x[i]) << ',' << f.py(s.y[i]) << ' ';
        out << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << "<circle cx=\"" << f.px(s.x[i]) << "\" cy=\"" << f.py(s.y[i])
                << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
        if (!s.label.empty())
            out << "<text x=\"" << Frame::w - Frame::mr - 6 << "\" y=\""
                << Frame::mt + 16 + 16 * li++ << "\" text-anchor=\"end\" "
                << "font-size=\"12\" fill=\"" << s.color << "\">" << s.label
                << "</text>\n";
    }
    out << "</svg>\n";
}

void write_svg_histogram(const std::string& path,
                         const std::vector<double>& samples,
                         const std::vector<double>& weights, int bins,
                         double ref_line, const std::string& title) {
    if (samples.empty() || bins < 1) return;
    double lo = *std::min_element(samples.begin(), samples.end());
    double hi = *std::max_element(samples.begin(), samples.end());
    lo = std::min(lo, ref_line);
    hi = std::max(hi, ref_line);
    const double span = (hi - lo) * 0.05 + 1e-12;
    lo -= span;
    hi += span;
    std::vector<double> counts(bins, 0.0);
    double wtot = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        int b = static_cast<int>((samples[i] - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        counts[b] += w;
        wtot += w;
    }
    Frame f{lo, hi, 0, *std::max_element(counts.begin(), counts.end()) / wtot * 1.1};
    std::ofstream out(path);
    svg_open(out, title);
    svg_axes(out, f, "scaled volume", "weighted fraction");
    for (int b = 0; b < bins; ++b) {
        const double xa = lo + (hi - lo) * b / bins;
        const double xb = lo + (hi - lo) * (b + 1) / bins;
        const double y = counts[b] / wtot;
        out << "<rect x=\"" << f.px(xa) << "\" y=\"" << f.py(y) << "\" width=\""
            << f.px(xb) - f.px(xa) << "\" height=\"" << f.py(0) - f.py(y)
            << "\" fill=\"#1f77b4\" fill-opacity=\"0.7\"/>\n";
    }
    out << "<line x1=\"" << f.px(ref_line) << "\" y1=\"" << f.py(f.y0)
        << "\" x2=\"" << f.px(ref_line) << "\" y2=\"" << f.py(f.y1)
        << "\" stroke=\"#d62728\" stroke-dasharray=\"5,3\"/>\n</svg>\n";
}

void write_svg_boxmap(const std::string& path, int n,
                      const std::vector<int>& classes, const std::string& title) {
    if (n < 1 || classes.size() != static_cast<std::size_t>(n) * n) return;
    std::ofstream out(path);
    const int size = 400, m = 40;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * m
        << "\" height=\"" << size + 2 * m << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << m + size / 2
        << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
        << "</text>\n";
    const double cell = static_cast<double>(size) / n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const char* color = "#eeeeee";
            if (classes[static_cast<std::size_t>(j) * n + i] == 1)
                color = "#2ca02c";
            else if (classes[static_cast<std::size_t>(j) * n + i] == 2)
                color = "#d62728";
            out << "<rect x=\"" << m + i * cell << "\" y=\""
                << m + (n - 1 - j) * cell << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"" << color
                << "\" stroke=\"#999\" stroke-width=\"0.4\"/>\n";
        }
    out << "</svg>\n";
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace sausagelab::runio
