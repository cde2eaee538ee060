#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#ifdef _WIN32
#include <process.h>
#define HSI_POPEN _popen
#define HSI_PCLOSE _pclose
#else
#include <sys/wait.h>
#include <unistd.h>
#define HSI_POPEN popen
#define HSI_PCLOSE pclose
#endif

#include "bandselect.hpp"
#include "csv.hpp"
#include "cube.hpp"
#include "errors.hpp"

namespace hsi {

struct ClassifierSpec {
    enum class Kind { nearest_centroid, knn, external };
    Kind kind = Kind::knn;
    int k = 1;           // knn only
    std::string command; // external only: executable + fixed arguments
    bool normalize = true;

    void validate() const {
        if (kind == Kind::knn && k < 1) throw domain_error("knn needs k >= 1");
        if (kind == Kind::external && command.empty())
            throw domain_error("external classifier needs a command");
    }

    // cache key component; must distinguish any two specs that can predict differently
    std::string identity() const {
        std::string id;
        switch (kind) {
            case Kind::nearest_centroid: id = "nearest-centroid"; break;
            case Kind::knn: id = "knn:k=" + std::to_string(k); break;
            case Kind::external: id = "external:" + command; break;
        }
        return id + (normalize ? ":norm=1" : ":norm=0");
    }
};

inline ClassifierSpec::Kind parse_classifier_kind(const std::string& s) {
    if (s == "nearest-centroid") return ClassifierSpec::Kind::nearest_centroid;
    if (s == "knn") return ClassifierSpec::Kind::knn;
    if (s == "external") return ClassifierSpec::Kind::external;
    throw io_error("unknown classifier '" + s + "' (expected nearest-centroid, knn or external)");
}

namespace detail {

struct FeatureTable {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels; // train only
};

inline std::vector<double> pixel_features(const HyperCube& cube, const BandSubset& subset,
                                          std::uint32_t row, std::uint32_t col) {
    std::vector<double> f;
    f.reserve(subset.size());
    const std::size_t idx = std::size_t(row) * cube.width + col;
    for (int b : subset.bands) f.push_back(double(cube.bands[std::size_t(b)][idx]));
    return f;
}

// min-max scaling fitted on the training rows only
inline void normalize_features(FeatureTable& train, FeatureTable& test) {
    if (train.rows.empty()) return;
    const std::size_t d = train.rows[0].size();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (const auto& r : train.rows)
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], r[j]);
            hi[j] = std::max(hi[j], r[j]);
        }
    auto apply = [&](std::vector<std::vector<double>>& rows) {
        for (auto& r : rows)
            for (std::size_t j = 0; j < d; ++j)
                r[j] = hi[j] > lo[j] ? (r[j] - lo[j]) / (hi[j] - lo[j]) : 0.0;
    };
    apply(train.rows);
    apply(test.rows);
}

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline std::vector<int> predict_nearest_centroid(const FeatureTable& train,
                                                 const FeatureTable& test) {
    std::map<int, std::pair<std::vector<double>, long long>> acc; // class -> (sum, count)
    const std::size_t d = train.rows[0].size();
    for (std::size_t i = 0; i < train.rows.size(); ++i) {
        auto& [sum, count] = acc[train.labels[i]];
        if (sum.empty()) sum.assign(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) sum[j] += train.rows[i][j];
        ++count;
    }
    std::vector<std::pair<int, std::vector<double>>> centroids;
    for (auto& [cls, sc] : acc) {
        auto c = sc.first;
        for (double& v : c) v /= double(sc.second);
        centroids.emplace_back(cls, std::move(c));
    }
    std::vector<int> out;
    out.reserve(test.rows.size());
    for (const auto& r : test.rows) {
        int best_cls = centroids[0].first;
        double best_d = sq_dist(r, centroids[0].second);
        for (std::size_t c = 1; c < centroids.size(); ++c) {
            double dist = sq_dist(r, centroids[c].second);
            if (dist < best_d) { // map order makes ties go to the smallest class id
                best_d = dist;
                best_cls = centroids[c].first;
            }
        }
        out.push_back(best_cls);
    }
    return out;
}

inline std::vector<int> predict_knn(const FeatureTable& train, const FeatureTable& test, int k) {
    const std::size_t n = train.rows.size();
    const std::size_t kk = std::min(std::size_t(k), n);
    std::vector<int> out;
    out.reserve(test.rows.size());
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (const auto& r : test.rows) {
        for (std::size_t i = 0; i < n; ++i) dist[i] = {sq_dist(r, train.rows[i]), i};
        std::partial_sort(dist.begin(), dist.begin() + std::ptrdiff_t(kk), dist.end());
        std::map<int, int> votes;
        for (std::size_t i = 0; i < kk; ++i) ++votes[train.labels[dist[i].second]];
        int best_cls = 0, best_votes = -1;
        for (auto [cls, v] : votes)
            if (v > best_votes) { // map order: tie -> smallest class id
                best_votes = v;
                best_cls = cls;
            }
        out.push_back(best_cls);
    }
    return out;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path = base / (tag + "-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

inline std::vector<int> predict_external(const ClassifierSpec& spec, const FeatureTable& train,
                                         const FeatureTable& test, int num_classes) {
    TempDir dir("hsiselect-clf");
    const std::string train_path = (dir.path / "train.csv").string();
    const std::string test_path = (dir.path / "test.csv").string();
    const std::size_t d = train.rows[0].size();
    {
        std::ofstream f(train_path);
        f << "label";
        for (std::size_t j = 0; j < d; ++j) f << ",f" << j;
        f << "\n";
        for (std::size_t i = 0; i < train.rows.size(); ++i) {
            f << train.labels[i];
            for (double v : train.rows[i]) f << ',' << format_double(v);
            f << "\n";
        }
        if (!f) throw io_error("cannot write " + train_path);
    }
    {
        std::ofstream f(test_path);
        for (std::size_t j = 0; j < d; ++j) f << (j ? "," : "") << 'f' << j;
        f << "\n";
        for (const auto& r : test.rows) {
            for (std::size_t j = 0; j < d; ++j) f << (j ? "," : "") << format_double(r[j]);
            f << "\n";
        }
        if (!f) throw io_error("cannot write " + test_path);
    }

    const std::string cmd = spec.command + " \"" + train_path + "\" \"" + test_path + "\"";
    FILE* pipe = HSI_POPEN(cmd.c_str(), "r");
    if (!pipe) throw classifier_error("failed to launch external classifier: " + spec.command);
    std::string output;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, got);
    int status = HSI_PCLOSE(pipe);
#ifndef _WIN32
    if (WIFEXITED(status)) status = WEXITSTATUS(status);
#endif
    if (status != 0)
        throw classifier_error("external classifier exited with status " +
                               std::to_string(status) + ": " + spec.command);

    std::vector<int> out;
    std::size_t start = 0, line_no = 0;
    while (start < output.size()) {
        std::size_t end = output.find('\n', start);
        if (end == std::string::npos) end = output.size();
        auto line = trim(std::string_view(output).substr(start, end - start));
        start = end + 1;
        if (line.empty()) continue;
        ++line_no;
        long long v;
        auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc{} || p != line.data() + line.size())
            throw classifier_error("external classifier output line " + std::to_string(line_no) +
                                   " is not an integer: '" + std::string(line) + "'");
        if (v < 1 || v > num_classes)
            throw classifier_error("external classifier predicted class " + std::to_string(v) +
                                   " outside [1," + std::to_string(num_classes) + "]");
        out.push_back(int(v));
    }
    if (out.size() != test.rows.size())
        throw classifier_error("external classifier returned " + std::to_string(out.size()) +
                               " predictions for " + std::to_string(test.rows.size()) +
                               " test rows");
    return out;
}

} // namespace detail

inline std::vector<int> train_predict(const ClassifierSpec& spec, const HyperCube& cube,
                                      const GroundTruthMap& gt, const LabeledSplit& split,
                                      const BandSubset& subset) {
    spec.validate();
    if (subset.empty()) throw domain_error("train_predict: empty band subset");
    if (split.train_pixels.empty()) throw domain_error("train_predict: empty training split");
    if (split.test_pixels.empty()) throw domain_error("train_predict: empty test split");

    detail::FeatureTable train, test;
    train.rows.reserve(split.train_pixels.size());
    for (auto [r, c] : split.train_pixels) {
        train.rows.push_back(detail::pixel_features(cube, subset, r, c));
        train.labels.push_back(gt.labels[std::size_t(r) * gt.width + c]);
    }
    test.rows.reserve(split.test_pixels.size());
    for (auto [r, c] : split.test_pixels)
        test.rows.push_back(detail::pixel_features(cube, subset, r, c));

    if (spec.normalize) detail::normalize_features(train, test);

    switch (spec.kind) {
        case ClassifierSpec::Kind::nearest_centroid:
            return detail::predict_nearest_centroid(train, test);
        case ClassifierSpec::Kind::knn:
            return detail::predict_knn(train, test, spec.k);
        default:
            return detail::predict_external(spec, train, test, gt.num_classes);
    }
}

inline double overall_accuracy(const std::vector<int>& predicted, const std::vector<int>& actual) {
    if (predicted.size() != actual.size())
        throw domain_error("overall_accuracy: length mismatch");
    if (predicted.empty()) throw domain_error("overall_accuracy: empty prediction list");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == actual[i]) ++hits;
    return 100.0 * double(hits) / double(predicted.size());
}

inline std::vector<int> test_labels(const GroundTruthMap& gt, const LabeledSplit& split) {
    std::vector<int> out;
    out.reserve(split.test_pixels.size());
    for (auto [r, c] : split.test_pixels) out.push_back(gt.labels[std::size_t(r) * gt.width + c]);
    return out;
}

} // namespace hsi
