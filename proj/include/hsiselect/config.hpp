#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "ascent.hpp"
#include "classifier.hpp"
#include "csv.hpp"
#include "cube.hpp"
#include "errors.hpp"

namespace hsi {

// One flat record for everything a run needs; every field is a config-file
// key and a CLI flag of the same name.
struct RunConfig {
    std::string cube_path;
    std::string cube_format = "binary-cube";
    std::string gt_path;
    int levels = 256;
    double split_fraction = 0.5;
    std::uint64_t split_seed = 1;
    bool stratified = false;
    std::string classifier = "knn";
    int knn_k = 1;
    std::string classifier_command;
    bool normalize = true;
    std::vector<double> redundancy_axis = {0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.43,
                                           0.45, 0.46, 0.47, 0.48, 0.49, 0.50, 0.51, 0.52,
                                           0.53, 0.54, 0.55, 0.56, 0.70, 0.90, 1.00};
    std::vector<double> relevance_axis = {0.0, 0.4, 0.45, 0.57, 0.6, 0.9, 0.91, 0.93};
    std::string cache;     // persistent evaluation cache path; empty = in-memory only
    std::string out = "."; // output directory
    int restarts = 3;
    std::uint64_t seed = 1; // search / synthesis seed
    bool literal_d_matrix = false;
    bool labeled_only = true;

    ClassifierSpec classifier_spec() const {
        ClassifierSpec spec;
        spec.kind = parse_classifier_kind(classifier);
        spec.k = knn_k;
        spec.command = classifier_command;
        spec.normalize = normalize;
        spec.validate();
        return spec;
    }

    ThresholdGrid grid() const {
        ThresholdGrid g{redundancy_axis, relevance_axis};
        g.validate();
        return g;
    }

    MembershipMode membership_mode() const {
        return literal_d_matrix ? MembershipMode::working : MembershipMode::pristine;
    }
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw io_error("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

inline std::vector<double> parse_double_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split(v, ','))
        out.push_back(parse_double(trim(tok), "config value for " + key));
    return out;
}

} // namespace detail

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "cube_path") cfg.cube_path = value;
    else if (key == "cube_format") cfg.cube_format = value;
    else if (key == "gt_path") cfg.gt_path = value;
    else if (key == "levels") cfg.levels = int(parse_int(value, "levels"));
    else if (key == "split_fraction") cfg.split_fraction = parse_double(value, "split_fraction");
    else if (key == "split_seed") cfg.split_seed = std::uint64_t(parse_int(value, "split_seed"));
    else if (key == "stratified") cfg.stratified = detail::parse_bool(value, key);
    else if (key == "classifier") cfg.classifier = value;
    else if (key == "knn_k") cfg.knn_k = int(parse_int(value, "knn_k"));
    else if (key == "classifier_command") cfg.classifier_command = value;
    else if (key == "normalize") cfg.normalize = detail::parse_bool(value, key);
    else if (key == "redundancy_axis") cfg.redundancy_axis = detail::parse_double_list(value, key);
    else if (key == "relevance_axis") cfg.relevance_axis = detail::parse_double_list(value, key);
    else if (key == "cache") cfg.cache = value;
    else if (key == "out") cfg.out = value;
    else if (key == "restarts") cfg.restarts = int(parse_int(value, "restarts"));
    else if (key == "seed") cfg.seed = std::uint64_t(parse_int(value, "seed"));
    else if (key == "literal_d_matrix") cfg.literal_d_matrix = detail::parse_bool(value, key);
    else if (key == "labeled_only") cfg.labeled_only = detail::parse_bool(value, key);
    else throw io_error("config: unknown key '" + key + "'");
}

// flat key=value lines; '#' starts a comment; blank lines ignored
inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw io_error(path + ": line " + std::to_string(line_no) + ": expected key=value");
        std::string key(trim(t.substr(0, eq)));
        std::string value(trim(t.substr(eq + 1)));
        try {
            apply_config_entry(cfg, key, value);
        } catch (const io_error& e) {
            throw io_error(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

} // namespace hsi
