#pragma once

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "synthetic.hpp"

namespace hsi {

// exit codes: 0 ok, 1 domain error, 2 config/IO error, 3 external classifier
// protocol error
inline int cli_main(int argc, const char* const* argv, std::ostream& log = std::cout,
                    std::ostream& err = std::cerr) {
    RunConfig cfg;

    // the config file seeds the defaults, flags override: read it first
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") {
            try {
                load_config_file(cfg, argv[i + 1]);
            } catch (const io_error& e) {
                err << "error: " << e.what() << "\n";
                return 2;
            }
        }

    CLI::App app{"band selection for hyperspectral cubes: mutual-information relevance "
                 "filtering, symmetric-uncertainty redundancy pruning, and steepest-ascent "
                 "search over the threshold grid"};
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file (flags override it)");
    app.add_option("--cube_path", cfg.cube_path, "input cube file");
    app.add_option("--cube_format", cfg.cube_format, "binary-cube or pixel-csv");
    app.add_option("--gt_path", cfg.gt_path, "ground truth text file");
    app.add_option("--levels", cfg.levels, "quantization levels for MI/SU estimation");
    app.add_option("--split_fraction", cfg.split_fraction, "training fraction of labeled pixels");
    app.add_option("--split_seed", cfg.split_seed, "train/test split seed");
    app.add_flag("--stratified", cfg.stratified, "stratify the split per class");
    app.add_option("--classifier", cfg.classifier, "nearest-centroid, knn or external");
    app.add_option("--knn_k", cfg.knn_k, "neighbor count for knn");
    app.add_option("--classifier_command", cfg.classifier_command,
                   "external classifier command (gets train.csv test.csv)");
    app.add_option("--normalize", cfg.normalize, "min-max scale features from train statistics");
    app.add_option("--redundancy_axis", cfg.redundancy_axis, "grid values for th_redundancy")
        ->delimiter(',');
    app.add_option("--relevance_axis", cfg.relevance_axis, "grid values for th_relevance")
        ->delimiter(',');
    app.add_option("--cache", cfg.cache, "persistent evaluation cache file");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--restarts", cfg.restarts, "randomized restarts for search");
    app.add_option("--seed", cfg.seed, "search / synthesis seed");
    app.add_flag("--literal_d_matrix,--literal-d-matrix", cfg.literal_d_matrix,
                 "redundancy membership test reads the consumed working matrix");
    app.add_option("--labeled_only", cfg.labeled_only,
                   "restrict relevance estimation to labeled pixels");
    app.require_subcommand(1);

    auto* sc_profile = app.add_subcommand("mi-profile", "per-band MI with the ground truth");

    auto* sc_select = app.add_subcommand("select", "run the two-threshold band selection");
    double th_relevance = 0.0, th_redundancy = 1.0;
    sc_select->add_option("--th_relevance", th_relevance, "MI relevance cutoff (bits)")
        ->required();
    sc_select->add_option("--th_redundancy", th_redundancy, "SU redundancy cutoff in [0,1]")
        ->required();

    auto* sc_grid = app.add_subcommand("grid", "evaluate every threshold couple on the grid");
    auto* sc_search = app.add_subcommand("search", "steepest-ascent search with restarts");

    auto* sc_synth = app.add_subcommand("synth", "generate a synthetic cube + ground truth");
    SyntheticSpec spec;
    sc_synth->add_option("--width", spec.width, "cube width");
    sc_synth->add_option("--height", spec.height, "cube height");
    sc_synth->add_option("--classes", spec.n_classes, "number of classes");
    sc_synth->add_option("--relevant", spec.relevant_bands, "class-correlated bands");
    sc_synth->add_option("--copies", spec.redundant_copies_per_relevant,
                         "near-duplicate copies per relevant band");
    sc_synth->add_option("--noise", spec.noise_bands, "label-independent bands");
    sc_synth->add_option("--amplitude", spec.noise_amplitude,
                         "noise amplitude as a fraction of dynamic range");
    sc_synth->add_option("--copy_noise_scale", spec.copy_noise_scale,
                         "copy noise as a fraction of the base amplitude");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            return app.exit(e);
        }
        err << "error: " << e.get_name() << ": " << e.what() << "\n";
        return 2;
    }

    try {
        if (sc_profile->parsed()) cmd_mi_profile(cfg, log);
        else if (sc_select->parsed()) cmd_select(cfg, th_relevance, th_redundancy, log);
        else if (sc_grid->parsed()) cmd_grid(cfg, log);
        else if (sc_search->parsed()) cmd_search(cfg, log);
        else if (sc_synth->parsed()) cmd_synth(spec, cfg.seed, cfg, log);
        return 0;
    } catch (const classifier_error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace hsi
