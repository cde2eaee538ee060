#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ascent.hpp"
#include "bandselect.hpp"
#include "config.hpp"
#include "cube.hpp"
#include "evaluation.hpp"
#include "infotheory.hpp"
#include "synthetic.hpp"

namespace hsi {

namespace detail {

struct LoadedData {
    HyperCube cube;
    GroundTruthMap gt;
};

inline LoadedData load_inputs(const RunConfig& cfg) {
    if (cfg.cube_path.empty()) throw io_error("no cube path configured (--cube_path)");
    if (cfg.gt_path.empty()) throw io_error("no ground truth path configured (--gt_path)");
    LoadedData d;
    d.cube = load_cube(cfg.cube_path, parse_cube_format(cfg.cube_format));
    d.gt = load_ground_truth(cfg.gt_path);
    if (d.cube.width != d.gt.width || d.cube.height != d.gt.height)
        throw domain_error("cube and ground truth dimensions differ");
    return d;
}

inline std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir = cfg.out.empty() ? "." : cfg.out;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory: " + dir.string());
    return dir;
}

inline std::string fixed2(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << v;
    return ss.str();
}

} // namespace detail

struct MiProfileResult {
    std::vector<double> profile;
    std::string csv_path;
};

inline MiProfileResult cmd_mi_profile(const RunConfig& cfg, std::ostream& log = std::cout) {
    auto data = detail::load_inputs(cfg);
    auto dir = detail::ensure_out_dir(cfg);
    MiProfileResult res;
    res.profile = mi_profile(data.cube, data.gt, cfg.levels, cfg.labeled_only);
    res.csv_path = (dir / "mi_profile.csv").string();

    std::ofstream f(res.csv_path);
    if (!f) throw io_error("cannot write file: " + res.csv_path);
    f << "band_index,mi_bits\n";
    for (std::size_t i = 0; i < res.profile.size(); ++i)
        f << i << ',' << format_double(res.profile[i]) << "\n";
    if (!f) throw io_error("write failed: " + res.csv_path);

    auto mx = std::max_element(res.profile.begin(), res.profile.end());
    auto mn = std::min_element(res.profile.begin(), res.profile.end());
    log << "bands: " << res.profile.size() << ", levels: " << cfg.levels << "\n";
    log << "mi min: " << format_double(*mn) << " (band " << (mn - res.profile.begin()) << ")\n";
    log << "mi max: " << format_double(*mx) << " (band " << (mx - res.profile.begin()) << ")\n";
    log << "wrote " << res.csv_path << "\n";
    return res;
}

struct SelectResult {
    BandSubset subset;
    std::string csv_path;
};

inline SelectResult cmd_select(const RunConfig& cfg, double th_relevance, double th_redundancy,
                               std::ostream& log = std::cout) {
    auto data = detail::load_inputs(cfg);
    auto dir = detail::ensure_out_dir(cfg);
    SelectResult res;
    res.subset = select_bands(data.cube, data.gt, {th_relevance, th_redundancy}, cfg.levels,
                              cfg.membership_mode());
    res.csv_path = (dir / "selection.csv").string();

    std::ofstream f(res.csv_path);
    if (!f) throw io_error("cannot write file: " + res.csv_path);
    f << "th_relevance,th_redundancy,n_bands,band_list\n";
    f << format_double(th_relevance) << ',' << format_double(th_redundancy) << ','
      << res.subset.size() << ','
      << join(res.subset.bands, ';', [](int b) { return std::to_string(b); }) << "\n";
    if (!f) throw io_error("write failed: " + res.csv_path);

    log << "selected " << res.subset.size() << " of " << data.cube.n_bands << " bands\n";
    log << "wrote " << res.csv_path << "\n";
    return res;
}

struct GridResult {
    std::vector<EvaluationRecord> records; // redundancy-major, relevance-minor
    long classifier_invocations = 0;
    std::string long_csv_path;
    std::string table_path;
};

inline GridResult cmd_grid(const RunConfig& cfg, std::ostream& log = std::cout) {
    auto data = detail::load_inputs(cfg);
    auto dir = detail::ensure_out_dir(cfg);
    ThresholdGrid grid = cfg.grid();
    LabeledSplit split = random_split(data.gt, cfg.split_fraction, cfg.split_seed, cfg.stratified);

    EvaluationCache cache(cfg.cache);
    cache.load();
    ThresholdEvaluator evaluator(data.cube, data.gt, split, cfg.classifier_spec(), cfg.levels,
                                 &cache, cfg.membership_mode());

    GridResult res;
    res.long_csv_path = (dir / "grid_long.csv").string();
    res.table_path = (dir / "grid_table.txt").string();
    for (double th_red : grid.redundancy_axis)
        for (double th_rel : grid.relevance_axis) {
            try {
                res.records.push_back(evaluator.evaluate({th_rel, th_red}));
            } catch (const classifier_error& e) {
                throw classifier_error("at couple (th_redundancy=" + format_double(th_red) +
                                       ", th_relevance=" + format_double(th_rel) + "): " + e.what());
            }
        }

    std::ofstream f(res.long_csv_path);
    if (!f) throw io_error("cannot write file: " + res.long_csv_path);
    f << "th_redundancy,th_relevance,n_bands,accuracy,defined\n";
    for (const auto& rec : res.records)
        f << format_double(rec.thresholds.th_redundancy) << ','
          << format_double(rec.thresholds.th_relevance) << ',' << rec.n_bands << ','
          << format_double(rec.accuracy) << ',' << (rec.defined ? 1 : 0) << "\n";
    if (!f) throw io_error("write failed: " + res.long_csv_path);

    // pivoted view: one row per redundancy threshold, cells "n_bands/accuracy"
    std::ofstream t(res.table_path);
    if (!t) throw io_error("cannot write file: " + res.table_path);
    const int w = 14;
    t << std::left << std::setw(w) << "TH \\ MI";
    for (double th_rel : grid.relevance_axis)
        t << std::setw(w) << ("MI > " + format_double(th_rel));
    t << "\n";
    std::size_t idx = 0;
    for (double th_red : grid.redundancy_axis) {
        t << std::left << std::setw(w) << format_double(th_red);
        for (std::size_t m = 0; m < grid.relevance_axis.size(); ++m, ++idx) {
            const auto& rec = res.records[idx];
            t << std::setw(w)
              << (rec.defined ? std::to_string(rec.n_bands) + "/" + detail::fixed2(rec.accuracy)
                              : std::string("-"));
        }
        t << "\n";
    }
    if (!t) throw io_error("write failed: " + res.table_path);

    res.classifier_invocations = evaluator.classifier_invocations();
    cache.save();
    log << "grid: " << grid.redundancy_axis.size() << " x " << grid.relevance_axis.size()
        << " couples, classifier invocations: " << res.classifier_invocations << "\n";
    log << "wrote " << res.long_csv_path << " and " << res.table_path << "\n";
    return res;
}

struct SearchCmdResult {
    MultistartResult search;
    long classifier_invocations = 0;
    std::vector<std::string> trajectory_paths;
    std::string summary_path;
};

inline SearchCmdResult cmd_search(const RunConfig& cfg, std::ostream& log = std::cout) {
    if (cfg.restarts < 1) throw io_error("restarts must be >= 1");
    auto data = detail::load_inputs(cfg);
    auto dir = detail::ensure_out_dir(cfg);
    ThresholdGrid grid = cfg.grid();
    LabeledSplit split = random_split(data.gt, cfg.split_fraction, cfg.split_seed, cfg.stratified);

    EvaluationCache cache(cfg.cache);
    cache.load();
    ThresholdEvaluator evaluator(data.cube, data.gt, split, cfg.classifier_spec(), cfg.levels,
                                 &cache, cfg.membership_mode());
    GridEvaluator ge(grid, [&](SelectionThresholds th) { return evaluator.evaluate(th); });

    SearchCmdResult res;
    res.search = multistart(ge, cfg.restarts, cfg.seed);
    for (const auto& r : res.search.all) {
        std::string path = (dir / ("trajectory_" + std::to_string(r.restart_index) + ".csv")).string();
        write_trajectory_csv(r, path);
        res.trajectory_paths.push_back(path);
    }
    res.summary_path = (dir / "search_summary.csv").string();
    write_search_summary_csv(res.search.all, grid, res.summary_path);
    res.classifier_invocations = evaluator.classifier_invocations();
    cache.save();

    const auto& best = res.search.best;
    auto th = thresholds_at(grid, best.final_point);
    log << "best couple: th_redundancy=" << format_double(th.th_redundancy)
        << ", th_relevance=" << format_double(th.th_relevance)
        << " -> " << best.final_record.n_bands << " bands, accuracy "
        << detail::fixed2(best.final_record.accuracy) << " (restart " << best.restart_index
        << ")\n";
    log << "classifier invocations: " << res.classifier_invocations << "\n";
    log << "wrote " << res.summary_path << " and " << res.trajectory_paths.size()
        << " trajectory files\n";
    return res;
}

struct SynthResult {
    std::string cube_path;
    std::string gt_path;
    std::string provenance_path;
};

inline SynthResult cmd_synth(const SyntheticSpec& spec, std::uint64_t seed, const RunConfig& cfg,
                             std::ostream& log = std::cout) {
    SyntheticData data = generate_synthetic(spec, seed); // validates before any file is touched
    auto dir = detail::ensure_out_dir(cfg);
    SynthResult res;
    res.cube_path = (dir / "synthetic_cube.bin").string();
    res.gt_path = (dir / "synthetic_gt.txt").string();
    res.provenance_path = (dir / "synthetic_provenance.csv").string();
    write_binary_cube(data.cube, res.cube_path);
    write_ground_truth(data.gt, res.gt_path);
    write_provenance(data.provenance, res.provenance_path);
    log << "wrote " << res.cube_path << " (" << data.cube.n_bands << " bands, " << data.cube.width
        << "x" << data.cube.height << ", " << data.gt.num_classes << " classes)\n";
    log << "wrote " << res.gt_path << " and " << res.provenance_path << "\n";
    return res;
}

} // namespace hsi
