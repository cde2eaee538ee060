#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bandselect.hpp"
#include "classifier.hpp"
#include "csv.hpp"
#include "cube.hpp"
#include "errors.hpp"
#include "infotheory.hpp"

namespace hsi {

struct EvaluationRecord {
    SelectionThresholds thresholds;
    int n_bands = 0;
    std::vector<int> bands;
    double accuracy = 0.0; // percent
    bool defined = false;  // false when the selection is empty
};

struct CacheKey {
    double th_relevance = 0.0;
    double th_redundancy = 0.0;
    std::uint64_t split_seed = 0;
    std::string classifier_id;
    int n_levels = 0;

    auto tie() const {
        return std::tie(th_relevance, th_redundancy, split_seed, classifier_id, n_levels);
    }
    bool operator<(const CacheKey& o) const { return tie() < o.tie(); }
};

// Persistent memo of wrapper evaluations. Linearizable map: any number of
// concurrent readers/writers see a consistent entry set.
class EvaluationCache {
  public:
    EvaluationCache() = default;
    explicit EvaluationCache(std::string backing_path) : path_(std::move(backing_path)) {}

    std::optional<EvaluationRecord> find(const CacheKey& key) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void insert(const CacheKey& key, const EvaluationRecord& rec) {
        std::lock_guard<std::mutex> lock(mu_);
        entries_[key] = rec;
    }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return entries_.size();
    }

    const std::string& backing_path() const { return path_; }

    void save() const {
        if (path_.empty()) return;
        save_as(path_);
    }

    void save_as(const std::string& path) const {
        std::lock_guard<std::mutex> lock(mu_);
        std::ofstream f(path);
        if (!f) throw io_error("cannot write cache file: " + path);
        f << "th_relevance,th_redundancy,split_seed,classifier_id,n_levels,n_bands,accuracy,"
             "defined,band_list\n";
        for (const auto& [key, rec] : entries_) {
            f << format_double(key.th_relevance) << ',' << format_double(key.th_redundancy) << ','
              << key.split_seed << ',' << key.classifier_id << ',' << key.n_levels << ','
              << rec.n_bands << ',' << format_double(rec.accuracy) << ',' << (rec.defined ? 1 : 0)
              << ',' << join(rec.bands, ';', [](int b) { return std::to_string(b); }) << "\n";
        }
        if (!f) throw io_error("cache write failed: " + path);
    }

    // missing file is an empty cache, not an error
    void load() {
        if (path_.empty()) return;
        std::ifstream f(path_);
        if (!f) return;
        load_stream(f, path_);
    }

    void load_from(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw io_error("cannot open cache file: " + path);
        load_stream(f, path);
    }

  private:
    void load_stream(std::ifstream& f, const std::string& path) {
        std::string line;
        if (!std::getline(f, line)) return; // empty file: nothing cached
        std::size_t line_no = 1;
        std::lock_guard<std::mutex> lock(mu_);
        while (std::getline(f, line)) {
            ++line_no;
            auto t = trim(line);
            if (t.empty()) continue;
            // classifier_id may itself contain commas (external command
            // lines), so split 3 fields off the left and 5 off the right
            std::vector<std::string_view> left, right;
            std::string_view rest = t;
            for (int i = 0; i < 3; ++i) {
                auto p = rest.find(',');
                if (p == std::string_view::npos)
                    throw io_error(path + ": line " + std::to_string(line_no) + ": too few fields");
                left.push_back(rest.substr(0, p));
                rest.remove_prefix(p + 1);
            }
            for (int i = 0; i < 5; ++i) {
                auto p = rest.rfind(',');
                if (p == std::string_view::npos)
                    throw io_error(path + ": line " + std::to_string(line_no) + ": too few fields");
                right.push_back(rest.substr(p + 1));
                rest.remove_suffix(rest.size() - p);
            }
            CacheKey key;
            key.th_relevance = parse_double(left[0], "th_relevance");
            key.th_redundancy = parse_double(left[1], "th_redundancy");
            key.split_seed = std::uint64_t(parse_int(left[2], "split_seed"));
            key.classifier_id = std::string(rest);
            key.n_levels = int(parse_int(right[4], "n_levels"));
            EvaluationRecord rec;
            rec.thresholds = {key.th_relevance, key.th_redundancy};
            rec.n_bands = int(parse_int(right[3], "n_bands"));
            rec.accuracy = parse_double(right[2], "accuracy");
            rec.defined = parse_int(right[1], "defined") != 0;
            if (!right[0].empty())
                for (const auto& b : split(right[0], ';'))
                    rec.bands.push_back(int(parse_int(b, "band index")));
            if (int(rec.bands.size()) != rec.n_bands)
                throw io_error(path + ": line " + std::to_string(line_no) +
                               ": band list length disagrees with n_bands");
            entries_[key] = rec;
        }
    }

    std::map<CacheKey, EvaluationRecord> entries_;
    std::string path_;
    mutable std::mutex mu_;
};

// Wrapper evaluation with every reusable intermediate memoized: the MI
// profile and pairwise SU are threshold-independent, and distinct threshold
// couples frequently select the identical subset, whose accuracy is then a
// pure replay.
class ThresholdEvaluator {
  public:
    ThresholdEvaluator(const HyperCube& cube, const GroundTruthMap& gt, const LabeledSplit& split,
                       ClassifierSpec spec, int n_levels, EvaluationCache* cache = nullptr,
                       MembershipMode mode = MembershipMode::pristine)
        : cube_(cube), gt_(gt), split_(split), spec_(std::move(spec)), n_levels_(n_levels),
          cache_(cache), mode_(mode) {}

    EvaluationRecord evaluate(SelectionThresholds thresholds) {
        thresholds.validate();
        CacheKey key{thresholds.th_relevance, thresholds.th_redundancy, split_.seed,
                     spec_.identity(), n_levels_};
        if (cache_)
            if (auto hit = cache_->find(key)) return *hit;

        EvaluationRecord rec;
        rec.thresholds = thresholds;
        BandSubset subset = select(thresholds);
        rec.bands = subset.bands;
        rec.n_bands = int(subset.size());
        if (!subset.empty()) {
            rec.defined = true;
            rec.accuracy = subset_accuracy(subset);
        }
        if (cache_) cache_->insert(key, rec);
        return rec;
    }

    long classifier_invocations() const { return invocations_.load(); }

    const std::vector<double>& profile() {
        if (profile_.empty()) profile_ = mi_profile(cube_, gt_, n_levels_);
        return profile_;
    }

  private:
    BandSubset select(SelectionThresholds thresholds) {
        BandSubset relevant = relevance_filter(profile(), thresholds.th_relevance);
        if (relevant.empty()) {
            relevant.provenance = thresholds;
            return relevant;
        }
        auto matrix = build_redundancy_matrix(relevant, [&](int a, int b) { return su(a, b); });
        BandSubset out = redundancy_filter(std::move(matrix), thresholds.th_redundancy, mode_);
        out.provenance = thresholds;
        return out;
    }

    double su(int a, int b) {
        auto key = std::minmax(a, b); // canonical fp orientation, same as select_bands
        auto it = su_.find(key);
        if (it != su_.end()) return it->second;
        double v = symmetric_uncertainty(quantized(key.first), quantized(key.second));
        su_.emplace(key, v);
        return v;
    }

    const DiscretizedBand& quantized(int band) {
        auto it = qbands_.find(band);
        if (it == qbands_.end())
            it = qbands_.emplace(band, quantize_band(cube_.bands[std::size_t(band)], n_levels_))
                     .first;
        return it->second;
    }

    double subset_accuracy(const BandSubset& subset) {
        auto it = accuracy_by_subset_.find(subset.bands);
        if (it != accuracy_by_subset_.end()) return it->second;
        ++invocations_;
        auto predicted = train_predict(spec_, cube_, gt_, split_, subset);
        double acc = overall_accuracy(predicted, test_labels(gt_, split_));
        accuracy_by_subset_.emplace(subset.bands, acc);
        return acc;
    }

    const HyperCube& cube_;
    const GroundTruthMap& gt_;
    const LabeledSplit& split_;
    ClassifierSpec spec_;
    int n_levels_;
    EvaluationCache* cache_;
    MembershipMode mode_;

    std::vector<double> profile_;
    std::map<std::pair<int, int>, double> su_;
    std::map<int, DiscretizedBand> qbands_;
    std::map<std::vector<int>, double> accuracy_by_subset_;
    std::atomic<long> invocations_{0};
};

inline EvaluationRecord evaluate_thresholds(const HyperCube& cube, const GroundTruthMap& gt,
                                            const LabeledSplit& split,
                                            SelectionThresholds thresholds,
                                            const ClassifierSpec& spec, EvaluationCache& cache,
                                            int n_levels) {
    ThresholdEvaluator ev(cube, gt, split, spec, n_levels, &cache);
    return ev.evaluate(thresholds);
}

} // namespace hsi
