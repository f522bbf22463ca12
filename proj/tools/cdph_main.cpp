// Command-line front end for the Christoffel-Darboux persistence pipeline.
//
// Exit codes: 0 success, 2 config error, 3 degenerate sample set,
// 4 resource limit, 5 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdph/pipeline.hpp"

namespace {

using nlohmann::json;

cdph::RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cdph::IoError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw cdph::ConfigError(path + ": " + e.what());
    }
    return cdph::config_from_json(j);
}

struct Overrides {
    std::string config_path;
    int degree = -1;
    int resolution = -1;
    double eps = -1.0;
    std::string kind;
    std::string family;
    long long seed = -1;
    std::string out;
    std::string svg;
    std::string input;
    bool csv_weights = false;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run config JSON");
        cmd->add_option("--input", input, "cloud file (.csv or .json)");
        cmd->add_flag("--csv-weights", csv_weights, "treat the last CSV column as a weight");
        cmd->add_option("--degree", degree, "basis degree d");
        cmd->add_option("--resolution", resolution, "grid resolution m");
        cmd->add_option("--eps", eps, "moment matrix regularization");
        cmd->add_option("--kind", kind, "filtration kind: christoffel | distance-function");
        cmd->add_option("--family", family, "basis family: chebyshev-tensor | monomial");
        cmd->add_option("--seed", seed, "override the shape rng seeds");
        cmd->add_option("--out", out, "output prefix");
        cmd->add_option("--svg", svg, "diagram SVG path");
    }

    cdph::RunConfig resolve() const {
        cdph::RunConfig c;
        if (!config_path.empty()) c = load_config(config_path);
        if (!input.empty()) {
            c.input_path = input;
            c.shapes.clear();
        }
        if (csv_weights) c.csv_weights = true;
        if (degree >= 0) c.degree = static_cast<std::size_t>(degree);
        if (resolution >= 0) c.resolution = static_cast<std::size_t>(resolution);
        if (eps >= 0.0) c.eps = eps;
        if (!kind.empty()) c.kind = cdph::filtration_kind_from_string(kind);
        if (!family.empty()) c.family = cdph::basis_family_from_string(family);
        if (seed >= 0) {
            c.has_seed_override = true;
            c.rng_seed = static_cast<std::uint64_t>(seed);
        }
        if (!out.empty()) c.out_prefix = out;
        if (!svg.empty()) c.svg_path = svg;
        if (c.input_path.empty() && c.shapes.empty()) throw cdph::ConfigError("no input cloud: pass --input or a config with shapes");
        return c;
    }
};

void print_summary(const cdph::ExperimentReport& rep) {
    std::cout << "intervals per degree:";
    for (std::size_t p = 0; p < rep.diagram.degrees.size(); ++p) std::cout << " H" << p << "=" << rep.diagram.degrees[p].size();
    std::cout << "\nsignificant (gap factor 3):";
    for (std::size_t p = 0; p < rep.diagram.degrees.size(); ++p) std::cout << " H" << p << "=" << cdph::significant_count(rep.diagram, p, 3.0);
    std::cout << "\ntimings: sample " << rep.timings.sample << "s, fit " << rep.timings.fit << "s, sweep " << rep.timings.sweep << "s, reduce "
              << rep.timings.reduce << "s, metrics " << rep.timings.metrics << "s, total " << rep.timings.total << "s\n";
}

std::vector<std::size_t> parse_size_list(const std::string& csv) {
    std::vector<std::size_t> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoul(cell));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Christoffel-Darboux persistent homology of point clouds in [-1,1]^n"};
    app.require_subcommand(1);

    Overrides compute_opts;
    auto* compute = app.add_subcommand("compute", "cloud -> Christoffel (or distance) filtration -> persistence diagram");
    compute_opts.add_flags(compute);

    Overrides cmp_a, cmp_b;
    auto* compare = app.add_subcommand("compare", "run two filtrations on the same cloud and report bottleneck distances");
    cmp_a.add_flags(compare);
    std::string kind_b = "distance-function";
    int degree_b = -1;
    compare->add_option("--kind-b", kind_b, "filtration kind of the second run");
    compare->add_option("--degree-b", degree_b, "basis degree of the second run");

    auto* snr = app.add_subcommand("snr-table", "median H1 signal-to-noise table across uniform noise levels");
    std::string snr_shape_path, snr_out;
    std::string snr_degrees = "6,8,10", snr_noise = "25,250";
    std::size_t snr_trials = 10, snr_resolution = 50, snr_k = 5;
    std::uint64_t snr_seed = 1;
    bool snr_full = false;
    snr->add_option("--shape", snr_shape_path, "base shape spec JSON")->required();
    snr->add_option("--degrees", snr_degrees, "christoffel degrees, comma separated");
    snr->add_option("--noise", snr_noise, "uniform noise counts M, comma separated");
    snr->add_option("--trials", snr_trials, "experiments per cell");
    snr->add_option("--resolution", snr_resolution, "grid resolution m");
    snr->add_option("--true-count", snr_k, "number of true features in H1");
    snr->add_option("--seed", snr_seed, "base seed");
    snr->add_flag("--full", snr_full, "full sweep: 100 trials, M in {25,50,100,250,500,1000}");
    snr->add_option("--out", snr_out, "write the CSV table here");

    Overrides sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "bottleneck deltas between consecutive grid resolutions");
    sweep_opts.add_flags(sweep);
    std::string sweep_resolutions = "50,100,150,200,250";
    double sweep_lipschitz = 0.0;
    sweep->add_option("--resolutions", sweep_resolutions, "ascending resolutions, comma separated");
    sweep->add_option("--lipschitz", sweep_lipschitz, "Lipschitz estimate for the PL error bound");

    auto* plot = app.add_subcommand("plot", "render a diagram JSON as SVG");
    std::string plot_in, plot_out;
    plot->add_option("--in", plot_in, "diagram JSON")->required();
    plot->add_option("--out", plot_out, "output SVG")->required();

    auto* wass = app.add_subcommand("wasserstein", "exact 1-Wasserstein distance between two clouds");
    std::string wass_a, wass_b, wass_plan;
    bool wass_weights = false;
    std::size_t wass_max_support = 0;
    wass->add_option("a", wass_a, "first cloud (.csv or .json)")->required();
    wass->add_option("b", wass_b, "second cloud")->required();
    wass->add_flag("--csv-weights", wass_weights, "treat the last CSV column as a weight");
    wass->add_option("--max-support", wass_max_support, "subsample larger supports to this size (0 = exact)");
    wass->add_option("--plan", wass_plan, "write the optimal coupling JSON here");

    auto* bott = app.add_subcommand("bottleneck", "bottleneck distance between two diagram JSON files");
    std::string bott_a, bott_b, bott_match;
    std::size_t bott_degree = 0;
    bott->add_option("a", bott_a, "first diagram JSON")->required();
    bott->add_option("b", bott_b, "second diagram JSON")->required();
    bott->add_option("--degree", bott_degree, "homology degree");
    bott->add_option("--matching", bott_match, "write the optimal matching JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*compute) {
            print_summary(cdph::cmd_compute(compute_opts.resolve()));
        } else if (*compare) {
            cdph::RunConfig a = cmp_a.resolve();
            cdph::RunConfig b = a;
            b.kind = cdph::filtration_kind_from_string(kind_b);
            if (degree_b >= 0) b.degree = static_cast<std::size_t>(degree_b);
            if (!a.out_prefix.empty()) {
                a.out_prefix += ".a";
                b.out_prefix += ".b";
            }
            cdph::CompareReport rep = cdph::cmd_compare(a, b);
            std::cout << "A: " << cdph::to_string(a.kind) << "\n";
            print_summary(rep.a);
            std::cout << "B: " << cdph::to_string(b.kind) << "\n";
            print_summary(rep.b);
            for (std::size_t p = 0; p < rep.bottleneck_per_degree.size(); ++p)
                std::cout << "bottleneck H" << p << ": " << rep.bottleneck_per_degree[p] << "\n";
        } else if (*snr) {
            std::ifstream in(snr_shape_path);
            if (!in) throw cdph::IoError("cannot open " + snr_shape_path);
            json j;
            in >> j;
            cdph::ShapeSpec base = cdph::shape_from_json(j);
            if (snr_full) {
                snr_trials = 100;
                snr_noise = "25,50,100,250,500,1000";
            }
            cdph::SnrTable table = cdph::cmd_snr_table(base, parse_size_list(snr_degrees), parse_size_list(snr_noise), snr_trials, snr_resolution,
                                                       snr_k, snr_seed);
            const std::string csv = cdph::snr_table_to_csv(table);
            std::cout << csv;
            if (!snr_out.empty()) {
                std::ofstream out(snr_out);
                if (!out) throw cdph::IoError("cannot open " + snr_out + " for writing");
                out << csv;
            }
        } else if (*sweep) {
            cdph::RunConfig config = sweep_opts.resolve();
            cdph::ResolutionSweep rep = cdph::cmd_resolution_sweep(config, parse_size_list(sweep_resolutions), sweep_lipschitz);
            for (std::size_t i = 1; i < rep.resolutions.size(); ++i) {
                std::cout << "m " << rep.resolutions[i - 1] << " -> " << rep.resolutions[i] << ": max delta " << rep.deltas_max[i - 1];
                if (sweep_lipschitz > 0.0) std::cout << " (bound " << rep.bounds[i - 1] << ")";
                std::cout << "\n";
            }
        } else if (*plot) {
            cdph::save_diagram_svg(cdph::load_diagram_json(plot_in), plot_out);
        } else if (*wass) {
            auto load = [&](const std::string& p) {
                if (p.size() >= 5 && p.substr(p.size() - 5) == ".json") return cdph::load_cloud_json(p);
                return cdph::load_cloud_csv(p, wass_weights);
            };
            auto [dist, plan] = cdph::wasserstein(load(wass_a), load(wass_b), wass_max_support);
            std::cout << dist << "\n";
            if (!wass_plan.empty()) {
                json pj;
                pj["cost"] = plan.cost;
                pj["entries"] = json::array();
                for (const auto& e : plan.entries) pj["entries"].push_back({e.from, e.to, e.mass});
                std::ofstream out(wass_plan);
                if (!out) throw cdph::IoError("cannot open " + wass_plan + " for writing");
                out << pj.dump(2) << '\n';
            }
        } else if (*bott) {
            auto [dist, match] = cdph::bottleneck(cdph::load_diagram_json(bott_a), cdph::load_diagram_json(bott_b), bott_degree);
            std::cout << dist << "\n";
            if (!bott_match.empty()) {
                std::ofstream out(bott_match);
                if (!out) throw cdph::IoError("cannot open " + bott_match + " for writing");
                out << cdph::matching_to_json(match).dump(2) << '\n';
            }
        }
    } catch (const cdph::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_class();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
