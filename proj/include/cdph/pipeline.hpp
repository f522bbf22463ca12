#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdph/bottleneck.hpp"
#include "cdph/christoffel.hpp"
#include "cdph/core.hpp"
#include "cdph/filtration.hpp"
#include "cdph/freudenthal.hpp"
#include "cdph/persistence.hpp"
#include "cdph/pointcloud.hpp"
#include "cdph/shapes.hpp"
#include "cdph/svg.hpp"
#include "cdph/transport.hpp"

namespace cdph {

enum class FiltrationKind { christoffel, distance_function };

inline std::string to_string(FiltrationKind k) { return k == FiltrationKind::christoffel ? "christoffel" : "distance-function"; }

inline FiltrationKind filtration_kind_from_string(const std::string& s) {
    if (s == "christoffel") return FiltrationKind::christoffel;
    if (s == "distance-function") return FiltrationKind::distance_function;
    throw ConfigError("unknown filtration kind '" + s + "'");
}

/**
 * One end-to-end pipeline run: cloud -> vertex function (log10 Lambda or
 * d_X) on the Freudenthal grid -> lower-star persistence.
 */
struct RunConfig {
    std::string input_path;        // cloud file (.csv or .json); empty = sample shapes
    bool csv_weights = false;      // last CSV column is a weight
    std::vector<ShapeSpec> shapes;

    std::size_t degree = 8;        // basis degree d (christoffel kind)
    BasisFamily family = BasisFamily::chebyshev_tensor;
    std::size_t resolution = 250;  // grid resolution m
    double eps = 0.0;              // moment matrix regularization
    FiltrationKind kind = FiltrationKind::christoffel;
    std::size_t max_homology_degree = SIZE_MAX;  // default: n - 1

    std::string out_prefix;  // writes <prefix>.diagram.json/.diagram.csv/.report.json
    std::string svg_path;
    bool has_seed_override = false;
    std::uint64_t rng_seed = 0;  // reseeds shape i with rng_seed + i
    std::size_t simplex_cap = FreudenthalComplex::default_simplex_cap;
    std::size_t wasserstein_max_support = 0;  // 0 = exact, no subsampling
};

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        if (j.contains("input")) {
            const auto& in = j.at("input");
            if (in.is_string())
                c.input_path = in.get<std::string>();
            else if (in.is_object() && in.contains("shapes"))
                for (const auto& s : in.at("shapes")) c.shapes.push_back(shape_from_json(s));
            else if (in.is_object())
                c.shapes.push_back(shape_from_json(in));
            else
                throw ConfigError("'input' must be a path or a shape spec");
        }
        c.csv_weights = j.value("csv_weights", false);
        c.degree = j.value("degree", std::size_t{8});
        if (j.contains("family")) c.family = basis_family_from_string(j.at("family").get<std::string>());
        c.resolution = j.value("resolution", std::size_t{250});
        c.eps = j.value("eps", 0.0);
        if (j.contains("kind")) c.kind = filtration_kind_from_string(j.at("kind").get<std::string>());
        if (j.contains("max_homology_degree")) c.max_homology_degree = j.at("max_homology_degree").get<std::size_t>();
        c.out_prefix = j.value("out", std::string{});
        c.svg_path = j.value("svg", std::string{});
        if (j.contains("rng_seed")) {
            c.has_seed_override = true;
            c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        }
        c.simplex_cap = j.value("simplex_cap", FreudenthalComplex::default_simplex_cap);
        c.wasserstein_max_support = j.value("wasserstein_max_support", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad run config: ") + e.what());
    }
    if (c.resolution < 1) throw ConfigError("resolution must be >= 1");
    return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    if (!c.input_path.empty()) {
        j["input"] = c.input_path;
        j["csv_weights"] = c.csv_weights;
    } else {
        nlohmann::json shapes = nlohmann::json::array();
        for (const ShapeSpec& s : c.shapes) shapes.push_back(shape_to_json(s));
        j["input"] = {{"shapes", shapes}};
    }
    j["degree"] = c.degree;
    j["family"] = to_string(c.family);
    j["resolution"] = c.resolution;
    j["eps"] = c.eps;
    j["kind"] = to_string(c.kind);
    if (c.max_homology_degree != SIZE_MAX) j["max_homology_degree"] = c.max_homology_degree;
    if (!c.out_prefix.empty()) j["out"] = c.out_prefix;
    if (!c.svg_path.empty()) j["svg"] = c.svg_path;
    if (c.has_seed_override) j["rng_seed"] = c.rng_seed;
    return j;
}

struct StageTimings {
    double sample = 0.0, fit = 0.0, sweep = 0.0, reduce = 0.0, metrics = 0.0, total = 0.0;

    nlohmann::json to_json() const {
        return {{"sample", sample}, {"fit", fit}, {"sweep", sweep}, {"reduce", reduce}, {"metrics", metrics}, {"total", total}};
    }
};

struct ExperimentReport {
    nlohmann::json config_echo;
    PersistenceDiagram diagram;
    nlohmann::json stats;
    StageTimings timings;
};

namespace detail {

class StageClock {
public:
    double* slot;
    std::chrono::steady_clock::time_point start;
    explicit StageClock(double* s) : slot(s), start(std::chrono::steady_clock::now()) {}
    ~StageClock() { *slot += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

/// Shared, immutable complexes keyed by (n, m, top_dim); experiment loops
/// reuse the triangulation across many filtrations.
inline std::shared_ptr<const FreudenthalComplex> get_complex(std::size_t n, std::size_t m, std::size_t max_dim, std::size_t cap) {
    static std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::weak_ptr<const FreudenthalComplex>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_tuple(n, m, std::min(max_dim, n));
    if (auto it = cache.find(key); it != cache.end())
        if (auto live = it->second.lock()) return live;
    auto built = std::make_shared<const FreudenthalComplex>(n, m, max_dim, cap);
    cache[key] = built;
    return built;
}

}  // namespace detail

/// Evaluate f on every grid vertex, data-parallel over vertex blocks with
/// one slot per vertex (deterministic regardless of thread count).
inline std::vector<double> sweep_vertex_values(const FreudenthalComplex& K, const std::function<double(const Point&)>& f) {
    const std::size_t count = K.vertex_count();
    std::vector<double> values(count);
    const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (workers == 1 || count < 4096) {
        for (std::size_t v = 0; v < count; ++v) values[v] = f(K.vertex_coords(static_cast<FreudenthalComplex::VertexId>(v)));
        return values;
    }
    std::vector<std::thread> pool;
    const std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * block, end = std::min(count, begin + block);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            for (std::size_t v = begin; v < end; ++v) values[v] = f(K.vertex_coords(static_cast<FreudenthalComplex::VertexId>(v)));
        });
    }
    for (std::thread& t : pool) t.join();
    return values;
}

inline EmpiricalMeasure load_input_measure(const RunConfig& config) {
    if (!config.input_path.empty()) {
        const std::string& p = config.input_path;
        if (p.size() >= 5 && p.substr(p.size() - 5) == ".json") return load_cloud_json(p);
        return load_cloud_csv(p, config.csv_weights);
    }
    if (config.shapes.empty()) throw ConfigError("no input: provide a cloud path or shape specs");
    std::vector<ShapeSpec> shapes = config.shapes;
    if (config.has_seed_override)
        for (std::size_t i = 0; i < shapes.size(); ++i) shapes[i].noise.rng_seed = config.rng_seed + i;
    return sample_shapes(shapes);
}

/**
 * The full scheme: load or sample the cloud, fit the Christoffel model
 * (unless the distance-function baseline is requested), sweep the vertex
 * function over the grid, run lower-star persistence, and emit diagrams,
 * stats and stage timings.
 */
inline ExperimentReport cmd_compute(const RunConfig& config) {
    ExperimentReport report;
    report.config_echo = config_to_json(config);
    const auto t_total = std::chrono::steady_clock::now();

    EmpiricalMeasure cloud = [&] {
        detail::StageClock clock(&report.timings.sample);
        return load_input_measure(config);
    }();
    const std::size_t n = cloud.dim();
    const std::size_t max_p = config.max_homology_degree == SIZE_MAX ? (n > 0 ? n - 1 : 0) : config.max_homology_degree;
    if (max_p > n) throw ConfigError("max homology degree " + std::to_string(max_p) + " exceeds ambient dimension " + std::to_string(n));

    std::unique_ptr<ChristoffelModel> model;
    if (config.kind == FiltrationKind::christoffel) {
        detail::StageClock clock(&report.timings.fit);
        model = std::make_unique<ChristoffelModel>(fit(cloud, BasisSpec(n, config.degree, config.family), config.eps));
    }

    std::shared_ptr<const FreudenthalComplex> complex;
    std::vector<double> values;
    {
        detail::StageClock clock(&report.timings.sweep);
        complex = detail::get_complex(n, config.resolution, max_p + 1, config.simplex_cap);
        if (model) {
            values = sweep_vertex_values(*complex, [&](const Point& x) { return model->log_christoffel_eval(x); });
            model->set_log_sup_norm(*std::max_element(values.begin(), values.end()));
        } else {
            values = sweep_vertex_values(*complex, [&](const Point& x) { return distance_function(cloud.points(), x); });
        }
    }

    {
        detail::StageClock clock(&report.timings.reduce);
        Filtration filt = lower_star(complex, std::move(values));
        report.diagram = compute_persistence(filt, max_p);
    }
    report.diagram.basis_degree = config.kind == FiltrationKind::christoffel ? config.degree : 0;
    report.diagram.kind = to_string(config.kind);

    {
        detail::StageClock clock(&report.timings.metrics);
        nlohmann::json significant = nlohmann::json::object();
        nlohmann::json counts = nlohmann::json::object();
        for (std::size_t p = 0; p < report.diagram.degrees.size(); ++p) {
            significant[std::to_string(p)] = significant_count(report.diagram, p, 3.0);
            counts[std::to_string(p)] = report.diagram.degrees[p].size();
        }
        report.stats["significant_intervals"] = significant;
        report.stats["interval_counts"] = counts;
        report.stats["cloud_size"] = cloud.size();
        if (model && model->log_sup_norm()) report.stats["log10_sup_norm"] = *model->log_sup_norm();

        if (!config.out_prefix.empty()) {
            save_diagram_json(report.diagram, config.out_prefix + ".diagram.json");
            save_diagram_csv(report.diagram, config.out_prefix + ".diagram.csv");
        }
        if (!config.svg_path.empty()) save_diagram_svg(report.diagram, config.svg_path);
    }

    report.timings.total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_total).count();
    if (!config.out_prefix.empty()) {
        nlohmann::json rj;
        rj["config"] = report.config_echo;
        rj["stats"] = report.stats;
        rj["timings"] = report.timings.to_json();
        std::ofstream out(config.out_prefix + ".report.json");
        if (!out) throw IoError("cannot open " + config.out_prefix + ".report.json for writing");
        out << rj.dump(2) << '\n';
    }
    return report;
}

/// Run two configurations over the same cloud and grid and report
/// side-by-side diagrams plus the bottleneck distance per degree.
struct CompareReport {
    ExperimentReport a, b;
    std::vector<double> bottleneck_per_degree;
};

inline CompareReport cmd_compare(const RunConfig& config_a, const RunConfig& config_b) {
    if (config_a.resolution != config_b.resolution) throw ConfigError("compare requires the same grid resolution");
    CompareReport rep;
    rep.a = cmd_compute(config_a);
    rep.b = cmd_compute(config_b);
    const std::size_t degrees = std::max(rep.a.diagram.degrees.size(), rep.b.diagram.degrees.size());
    for (std::size_t p = 0; p < degrees; ++p) rep.bottleneck_per_degree.push_back(bottleneck(rep.a.diagram, rep.b.diagram, p).first);
    return rep;
}

/**
 * Signal-to-noise table: for the distance-function baseline and one
 * Christoffel filtration per degree in `degrees`, across the uniform-noise
 * counts in `noise_counts`, run `trials` seeded experiments and report the
 * per-cell median H_1 signal-to-noise ratio (k = true_count).
 *
 * All filtrations within a trial share the same sampled cloud, so the
 * comparison is paired. A trial whose diagram has fewer than `true_count`
 * H_1 intervals contributes a 0 ratio (the features were not recovered).
 */
struct SnrTable {
    std::vector<std::string> row_labels;             // e.g. "distance-function", "christoffel d=6"
    std::vector<std::size_t> noise_counts;           // columns
    std::vector<std::vector<double>> medians;        // [row][column]
    std::vector<std::vector<std::vector<double>>> raw;  // [row][column][trial]
    std::size_t trials = 0;
};

inline SnrTable cmd_snr_table(const ShapeSpec& base, const std::vector<std::size_t>& degrees, const std::vector<std::size_t>& noise_counts,
                              std::size_t trials, std::size_t resolution, std::size_t true_count = 5, std::uint64_t base_seed = 1) {
    if (trials < 1) throw ConfigError("snr table requires trials >= 1");
    SnrTable table;
    table.noise_counts = noise_counts;
    table.trials = trials;
    table.row_labels.push_back("distance-function");
    for (std::size_t d : degrees) table.row_labels.push_back("christoffel d=" + std::to_string(d));
    table.medians.assign(table.row_labels.size(), std::vector<double>(noise_counts.size(), 0.0));
    table.raw.assign(table.row_labels.size(), std::vector<std::vector<double>>(noise_counts.size()));

    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        if (v.size() % 2 == 1) return v[h];
        return std::isinf(v[h - 1]) && std::isinf(v[h]) ? kInfiniteDeath : (v[h - 1] + v[h]) / 2.0;
    };

    for (std::size_t mcol = 0; mcol < noise_counts.size(); ++mcol) {
        for (std::size_t trial = 0; trial < trials; ++trial) {
            ShapeSpec spec = base;
            spec.noise.uniform_count = noise_counts[mcol];
            spec.noise.rng_seed = base_seed + 977 * trial + 31 * mcol;

            RunConfig run;
            run.shapes = {spec};
            run.resolution = resolution;
            run.max_homology_degree = 1;

            for (std::size_t row = 0; row < table.row_labels.size(); ++row) {
                run.kind = row == 0 ? FiltrationKind::distance_function : FiltrationKind::christoffel;
                if (row > 0) run.degree = degrees[row - 1];
                ExperimentReport rep = cmd_compute(run);
                double ratio;
                try {
                    ratio = signal_to_noise(rep.diagram, 1, true_count);
                } catch (const InsufficientIntervals&) {
                    ratio = 0.0;
                }
                table.raw[row][mcol].push_back(ratio);
            }
        }
        for (std::size_t row = 0; row < table.row_labels.size(); ++row) table.medians[row][mcol] = median(table.raw[row][mcol]);
    }
    return table;
}

/// CSV rendering of the table; infinite medians print the ">>10" sentinel.
inline std::string snr_table_to_csv(const SnrTable& t) {
    std::ostringstream out;
    out.precision(6);
    if (t.trials == 1) out << "# single run per cell (not a median)\n";
    out << "filtration";
    for (std::size_t m : t.noise_counts) out << ",M=" << m;
    out << '\n';
    for (std::size_t row = 0; row < t.row_labels.size(); ++row) {
        out << t.row_labels[row];
        for (std::size_t col = 0; col < t.noise_counts.size(); ++col) {
            out << ',';
            if (std::isinf(t.medians[row][col]))
                out << ">>10";
            else
                out << t.medians[row][col];
        }
        out << '\n';
    }
    return out.str();
}

/// Consecutive-resolution bottleneck deltas for a fixed cloud, optionally
/// with the PL error bound when a Lipschitz estimate is supplied.
struct ResolutionSweep {
    std::vector<std::size_t> resolutions;
    std::vector<PersistenceDiagram> diagrams;
    std::vector<std::vector<double>> deltas_per_degree;  // [step][degree]
    std::vector<double> deltas_max;                      // max over degrees per step
    std::vector<double> bounds;                          // per step, 0 when no L_f given
};

inline ResolutionSweep cmd_resolution_sweep(const RunConfig& config, const std::vector<std::size_t>& resolutions, double lipschitz_estimate = 0.0) {
    if (resolutions.size() < 2) throw ConfigError("resolution sweep requires at least two resolutions");
    for (std::size_t i = 1; i < resolutions.size(); ++i)
        if (resolutions[i] <= resolutions[i - 1]) throw ConfigError("resolution list must be strictly increasing");

    ResolutionSweep sweep;
    sweep.resolutions = resolutions;
    const std::size_t n = load_input_measure(config).dim();
    std::size_t degrees = 0;
    for (std::size_t m : resolutions) {
        RunConfig run = config;
        run.resolution = m;
        run.out_prefix.clear();
        run.svg_path.clear();
        ExperimentReport rep = cmd_compute(run);
        sweep.diagrams.push_back(std::move(rep.diagram));
        degrees = std::max<std::size_t>(degrees, sweep.diagrams.back().degrees.size());
    }
    for (std::size_t i = 1; i < sweep.diagrams.size(); ++i) {
        std::vector<double> deltas;
        double worst = 0.0;
        for (std::size_t p = 0; p < degrees; ++p) {
            const double d = bottleneck(sweep.diagrams[i - 1], sweep.diagrams[i], p).first;
            deltas.push_back(d);
            worst = std::max(worst, d);
        }
        sweep.deltas_per_degree.push_back(std::move(deltas));
        sweep.deltas_max.push_back(worst);
        // triangle inequality through the true diagram between the two grids
        sweep.bounds.push_back(lipschitz_estimate > 0.0
                                   ? pl_error_bound(lipschitz_estimate, n, resolutions[i - 1]) + pl_error_bound(lipschitz_estimate, n, resolutions[i])
                                   : 0.0);
    }
    return sweep;
}

}  // namespace cdph
