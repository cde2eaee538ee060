#pragma once

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "infotheory.hpp"

namespace hsi {

struct SelectionThresholds {
    double th_relevance = 0.0;  // MI-with-GT cutoff, bits
    double th_redundancy = 1.0; // pairwise SU cutoff, in [0,1]

    void validate() const {
        if (th_relevance < 0.0) throw domain_error("th_relevance must be >= 0");
        if (!(th_redundancy >= 0.0 && th_redundancy <= 1.0))
            throw domain_error("th_redundancy must lie in [0,1]");
    }
};

struct BandSubset {
    std::vector<int> bands; // original band indices
    SelectionThresholds provenance;

    std::size_t size() const { return bands.size(); }
    bool empty() const { return bands.empty(); }
};

// Bands ordered ascending by relevance; `pristine` keeps the true pairwise SU
// forever, `cells` is the working copy the greedy loop consumes (diagonal and
// lower triangle start at the 1.0 sentinel, consumed cells join them).
struct RedundancyMatrix {
    std::vector<int> order;
    std::vector<std::vector<double>> pristine;
    std::vector<std::vector<double>> cells;

    static RedundancyMatrix from_pristine(std::vector<int> order_,
                                          std::vector<std::vector<double>> su) {
        RedundancyMatrix m;
        m.order = std::move(order_);
        m.pristine = std::move(su);
        const std::size_t n = m.order.size();
        m.cells.assign(n, std::vector<double>(n, 1.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) m.cells[i][j] = m.pristine[i][j];
        return m;
    }
};

// consumed-aware mode reads the working matrix in the membership test instead
// of the pristine values, i.e. the greedy loop's own sentinel writes are
// allowed to shadow real SU values
enum class MembershipMode { pristine, working };

inline BandSubset relevance_filter(const std::vector<double>& profile, double th_relevance) {
    if (profile.empty()) throw domain_error("relevance_filter: empty MI profile");
    std::vector<std::pair<double, int>> keep;
    for (int i = 0; i < int(profile.size()); ++i)
        if (profile[std::size_t(i)] > th_relevance) keep.emplace_back(profile[std::size_t(i)], i);
    std::sort(keep.begin(), keep.end()); // MI ascending, band index breaks ties
    BandSubset out;
    out.provenance.th_relevance = th_relevance;
    for (const auto& [mi, idx] : keep) out.bands.push_back(idx);
    return out;
}

inline RedundancyMatrix
build_redundancy_matrix(const BandSubset& subset,
                        const std::function<double(int, int)>& su_of_pair) {
    if (subset.empty()) throw domain_error("build_redundancy_matrix: empty subset");
    const std::size_t n = subset.size();
    std::vector<std::vector<double>> su(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            su[i][j] = su[j][i] = su_of_pair(subset.bands[i], subset.bands[j]);
    return RedundancyMatrix::from_pristine(subset.bands, std::move(su));
}

inline RedundancyMatrix build_redundancy_matrix(const HyperCube& cube, const BandSubset& subset,
                                                int n_levels) {
    for (int b : subset.bands)
        if (b < 0 || b >= int(cube.n_bands))
            throw domain_error("build_redundancy_matrix: band index out of range");
    std::vector<DiscretizedBand> q;
    q.reserve(subset.size());
    std::unordered_map<int, std::size_t> pos;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        pos[subset.bands[i]] = i;
        q.push_back(quantize_band(cube.bands[std::size_t(subset.bands[i])], n_levels));
    }
    return build_redundancy_matrix(subset, [&](int a, int b) {
        // SU is symmetric only up to summation order; pin one fp orientation
        // so the matrix does not depend on the candidate ordering
        if (a > b) std::swap(a, b);
        return symmetric_uncertainty(q[pos.at(a)], q[pos.at(b)]);
    });
}

// Greedy pruning: repeatedly take the least-redundant remaining pair and admit
// each of its two bands unless some already-kept band is too close to it.
inline BandSubset redundancy_filter(RedundancyMatrix m, double th_redundancy,
                                    MembershipMode mode = MembershipMode::pristine) {
    if (!(th_redundancy >= 0.0 && th_redundancy <= 1.0))
        throw domain_error("redundancy_filter: th_redundancy must lie in [0,1]");
    const std::size_t n = m.order.size();
    std::vector<std::size_t> kept; // positions in m.order, insertion order
    std::vector<char> in_kept(n, 0);

    auto membership_su = [&](std::size_t a, std::size_t b) {
        if (mode == MembershipMode::pristine) return m.pristine[a][b];
        std::size_t lo = std::min(a, b), hi = std::max(a, b);
        return m.cells[lo][hi]; // consumed cells read back as the sentinel
    };
    auto admit = [&](std::size_t cand) {
        if (in_kept[cand]) return;
        for (std::size_t member : kept)
            if (!(membership_su(cand, member) < th_redundancy)) return;
        kept.push_back(cand);
        in_kept[cand] = 1;
    };

    for (;;) {
        double best = 1.0;
        std::size_t bx = n, by = n;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (m.cells[i][j] < best) {
                    best = m.cells[i][j];
                    bx = i;
                    by = j;
                }
        if (!(best < th_redundancy)) break;
        admit(bx);
        admit(by);
        m.cells[bx][by] = 1.0;
    }

    BandSubset out;
    out.provenance.th_redundancy = th_redundancy;
    for (std::size_t pos : kept) out.bands.push_back(m.order[pos]);
    return out;
}

inline BandSubset select_bands(const HyperCube& cube, const GroundTruthMap& gt,
                               SelectionThresholds thresholds, int n_levels,
                               MembershipMode mode = MembershipMode::pristine) {
    thresholds.validate();
    BandSubset relevant = relevance_filter(mi_profile(cube, gt, n_levels), thresholds.th_relevance);
    if (relevant.empty()) {
        relevant.provenance = thresholds;
        return relevant;
    }
    BandSubset out = redundancy_filter(build_redundancy_matrix(cube, relevant, n_levels),
                                       thresholds.th_redundancy, mode);
    out.provenance = thresholds;
    return out;
}

} // namespace hsi
