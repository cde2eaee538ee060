#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cube.hpp"
#include "errors.hpp"

namespace hsi {

struct DiscretizedBand {
    std::vector<int> values; // bin indices, length H*W
    int n_levels = 0;
};

struct JointHistogram {
    std::vector<std::vector<long long>> counts; // n_a x n_b
    long long total = 0;

    std::size_t n_a() const { return counts.size(); }
    std::size_t n_b() const { return counts.empty() ? 0 : counts[0].size(); }
};

struct FanoBounds {
    double conditional_entropy = 0.0;
    double lower_bound_pe = 0.0;
    int num_classes = 0;
};

// uniform-width binning of the full 16-bit range; n_levels = 65536 is the
// identity on raw counts
inline DiscretizedBand quantize_band(const std::vector<std::uint16_t>& band, int n_levels) {
    if (n_levels < 1) throw domain_error("quantize_band: n_levels must be >= 1");
    DiscretizedBand out;
    out.n_levels = n_levels;
    out.values.reserve(band.size());
    for (std::uint16_t v : band)
        out.values.push_back(int((std::uint64_t(v) * std::uint64_t(n_levels)) >> 16));
    return out;
}

inline DiscretizedBand labels_as_band(const GroundTruthMap& gt) {
    DiscretizedBand out;
    out.n_levels = gt.num_classes + 1; // level 0 = unlabeled
    out.values.assign(gt.labels.begin(), gt.labels.end());
    return out;
}

inline std::vector<long long> histogram(const DiscretizedBand& b,
                                        const std::vector<std::size_t>* mask = nullptr) {
    std::vector<long long> h(std::size_t(b.n_levels), 0);
    if (mask) {
        for (std::size_t i : *mask) ++h[std::size_t(b.values[i])];
    } else {
        for (int v : b.values) ++h[std::size_t(v)];
    }
    return h;
}

inline double entropy(const std::vector<long long>& hist) {
    long long total = 0;
    for (long long c : hist) total += c;
    if (hist.empty() || total <= 0) throw domain_error("entropy: empty histogram");
    double h = 0.0;
    for (long long c : hist)
        if (c > 0) {
            double p = double(c) / double(total);
            h -= p * std::log2(p);
        }
    return h;
}

inline JointHistogram joint_histogram(const DiscretizedBand& a, const DiscretizedBand& b,
                                      const std::vector<std::size_t>* mask = nullptr) {
    if (a.values.size() != b.values.size())
        throw domain_error("joint_histogram: length mismatch");
    if (mask && mask->empty()) throw domain_error("joint_histogram: empty mask");
    JointHistogram j;
    j.counts.assign(std::size_t(a.n_levels), std::vector<long long>(std::size_t(b.n_levels), 0));
    auto add = [&](std::size_t i) {
        ++j.counts[std::size_t(a.values[i])][std::size_t(b.values[i])];
        ++j.total;
    };
    if (mask) for (std::size_t i : *mask) add(i);
    else for (std::size_t i = 0; i < a.values.size(); ++i) add(i);
    return j;
}

// I(A,B) = H(A) + H(B) - H(A,B), all terms from the same joint counts; an
// independently coded direct double sum cross-checks this in the tests
inline double mutual_information(const JointHistogram& j) {
    if (j.total <= 0) throw domain_error("mutual_information: empty joint histogram");
    std::vector<long long> ha(j.n_a(), 0), hb(j.n_b(), 0);
    double h_ab = 0.0;
    const double total = double(j.total);
    for (std::size_t x = 0; x < j.n_a(); ++x)
        for (std::size_t y = 0; y < j.n_b(); ++y) {
            long long c = j.counts[x][y];
            if (c <= 0) continue;
            ha[x] += c;
            hb[y] += c;
            double p = double(c) / total;
            h_ab -= p * std::log2(p);
        }
    return entropy(ha) + entropy(hb) - h_ab;
}

inline double conditional_entropy(double mi, double h_c) {
    if (mi > h_c + 1e-9)
        throw domain_error("conditional_entropy: mutual information exceeds class entropy");
    double h = h_c - mi;
    return h > 0.0 ? h : 0.0;
}

inline double symmetric_uncertainty(const DiscretizedBand& a, const DiscretizedBand& b) {
    if (a.values.size() != b.values.size())
        throw domain_error("symmetric_uncertainty: length mismatch");
    JointHistogram j = joint_histogram(a, b);
    std::vector<long long> ha(j.n_a(), 0), hb(j.n_b(), 0);
    for (std::size_t x = 0; x < j.n_a(); ++x)
        for (std::size_t y = 0; y < j.n_b(); ++y) {
            ha[x] += j.counts[x][y];
            hb[y] += j.counts[x][y];
        }
    double h_a = entropy(ha), h_b = entropy(hb);
    if (h_a == 0.0 && h_b == 0.0) return 1.0; // two constants are trivially redundant
    return 2.0 * mutual_information(j) / (h_a + h_b);
}

inline std::vector<double> mi_profile(const HyperCube& cube, const GroundTruthMap& gt,
                                      int n_levels, bool labeled_only = true) {
    if (cube.width != gt.width || cube.height != gt.height)
        throw domain_error("mi_profile: cube and ground truth dimensions differ");
    DiscretizedBand labels = labels_as_band(gt);
    std::vector<std::size_t> mask;
    const std::vector<std::size_t>* mask_ptr = nullptr;
    if (labeled_only) {
        mask = gt.labeled_indices();
        mask_ptr = &mask;
    }
    std::vector<double> profile;
    profile.reserve(cube.n_bands);
    for (const auto& band : cube.bands) {
        DiscretizedBand q = quantize_band(band, n_levels);
        profile.push_back(mutual_information(joint_histogram(q, labels, mask_ptr)));
    }
    return profile;
}

inline FanoBounds fano_lower_bound(double h_c_given_x, int num_classes) {
    if (num_classes < 2) throw domain_error("fano_lower_bound: need at least 2 classes");
    if (h_c_given_x < 0.0) throw domain_error("fano_lower_bound: negative conditional entropy");
    FanoBounds fb;
    fb.conditional_entropy = h_c_given_x;
    fb.num_classes = num_classes;
    fb.lower_bound_pe = (h_c_given_x - 1.0) / std::log2(double(num_classes));
    if (fb.lower_bound_pe < 0.0) fb.lower_bound_pe = 0.0;
    return fb;
}

} // namespace hsi
