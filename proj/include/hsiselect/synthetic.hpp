#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "cube.hpp"
#include "errors.hpp"
#include "random.hpp"

namespace hsi {

struct SyntheticSpec {
    std::uint32_t width = 64;
    std::uint32_t height = 64;
    int n_classes = 4;
    int relevant_bands = 4;
    int redundant_copies_per_relevant = 2;
    int noise_bands = 8;
    double noise_amplitude = 0.15; // fraction of dynamic range
    // copies carry noise_amplitude * copy_noise_scale; small by default so a
    // copy stays a near-duplicate of its parent rather than an independent
    // re-measurement of the labels
    double copy_noise_scale = 0.05;

    int total_bands() const {
        return relevant_bands * (1 + redundant_copies_per_relevant) + noise_bands;
    }

    void validate() const {
        if (width < 1 || height < 1) throw domain_error("synthetic spec: zero dimension");
        if (n_classes < 1) throw domain_error("synthetic spec: need at least 1 class");
        if (relevant_bands < 0 || redundant_copies_per_relevant < 0 || noise_bands < 0)
            throw domain_error("synthetic spec: negative band count");
        if (total_bands() < 2) throw domain_error("synthetic spec: total bands must be >= 2");
        if (!(noise_amplitude >= 0.0 && noise_amplitude <= 1.0))
            throw domain_error("synthetic spec: noise_amplitude must lie in [0,1]");
        if (!(copy_noise_scale >= 0.0 && copy_noise_scale <= 1.0))
            throw domain_error("synthetic spec: copy_noise_scale must lie in [0,1]");
        if (std::uint64_t(width) * height < std::uint64_t(n_classes))
            throw domain_error("synthetic spec: fewer pixels than classes");
    }
};

enum class BandRole { relevant, redundant, noise };

struct BandProvenance {
    int band_index = 0;
    BandRole role = BandRole::noise;
    int parent_index = -1; // set only for redundant copies
};

struct SyntheticData {
    HyperCube cube;
    GroundTruthMap gt;
    std::vector<BandProvenance> provenance;
};

inline SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    const std::size_t n = std::size_t(spec.width) * spec.height;

    SyntheticData out;
    out.gt.width = spec.width;
    out.gt.height = spec.height;
    out.gt.num_classes = spec.n_classes;
    out.gt.labels.reserve(n);
    for (int c = 1; c <= spec.n_classes; ++c) out.gt.labels.push_back(c); // every class present
    for (std::size_t i = spec.n_classes; i < n; ++i)
        out.gt.labels.push_back(1 + int(bounded_rand(rng, std::uint64_t(spec.n_classes))));
    shuffle_vec(out.gt.labels, rng);

    out.cube.width = spec.width;
    out.cube.height = spec.height;
    out.cube.n_bands = std::uint32_t(spec.total_bands());

    const double class_step = 60000.0 / spec.n_classes;
    auto clamp16 = [](double v) {
        double r = std::round(v);
        if (r < 0.0) r = 0.0;
        if (r > 65535.0) r = 65535.0;
        return std::uint16_t(r);
    };
    auto noisy = [&](double base, double half_width) {
        return clamp16(base + (2.0 * unit_real(rng) - 1.0) * half_width);
    };

    const double signal_noise = spec.noise_amplitude * 60000.0 / 2.0;
    const double copy_noise = signal_noise * spec.copy_noise_scale;

    // parents first, then copies grouped per parent, then noise bands
    for (int p = 0; p < spec.relevant_bands; ++p) {
        std::vector<std::uint16_t> band(n);
        for (std::size_t i = 0; i < n; ++i)
            band[i] = noisy(out.gt.labels[i] * class_step, signal_noise);
        out.provenance.push_back({int(out.cube.bands.size()), BandRole::relevant, -1});
        out.cube.bands.push_back(std::move(band));
    }
    for (int p = 0; p < spec.relevant_bands; ++p)
        for (int c = 0; c < spec.redundant_copies_per_relevant; ++c) {
            const auto& parent = out.cube.bands[std::size_t(p)];
            std::vector<std::uint16_t> band(n);
            for (std::size_t i = 0; i < n; ++i) band[i] = noisy(parent[i], copy_noise);
            out.provenance.push_back({int(out.cube.bands.size()), BandRole::redundant, p});
            out.cube.bands.push_back(std::move(band));
        }
    for (int b = 0; b < spec.noise_bands; ++b) {
        std::vector<std::uint16_t> band(n);
        for (auto& s : band) s = std::uint16_t(bounded_rand(rng, 65536));
        out.provenance.push_back({int(out.cube.bands.size()), BandRole::noise, -1});
        out.cube.bands.push_back(std::move(band));
    }

    out.cube.validate();
    out.gt.validate();
    return out;
}

inline const char* role_name(BandRole r) {
    switch (r) {
        case BandRole::relevant: return "relevant";
        case BandRole::redundant: return "redundant";
        default: return "noise";
    }
}

inline void write_provenance(const std::vector<BandProvenance>& prov, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw io_error("cannot write file: " + path);
    f << "band_index,role,parent_index\n";
    for (const auto& p : prov) {
        f << p.band_index << ',' << role_name(p.role) << ',';
        if (p.role == BandRole::redundant) f << p.parent_index;
        f << "\n";
    }
    if (!f) throw io_error("write failed: " + path);
}

inline std::vector<BandProvenance> load_provenance(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(f, line) || std::string(trim(line)) != "band_index,role,parent_index")
        throw io_error(path + ": bad provenance header");
    std::vector<BandProvenance> out;
    std::size_t line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty()) continue;
        auto cells = split(std::string(t), ',');
        if (cells.size() != 3)
            throw io_error(path + ": line " + std::to_string(line_no) + ": expected 3 columns");
        BandProvenance p;
        p.band_index = int(parse_int(cells[0], "band_index"));
        if (cells[1] == "relevant") p.role = BandRole::relevant;
        else if (cells[1] == "redundant") p.role = BandRole::redundant;
        else if (cells[1] == "noise") p.role = BandRole::noise;
        else throw io_error(path + ": line " + std::to_string(line_no) + ": unknown role " + cells[1]);
        if (p.role == BandRole::redundant) p.parent_index = int(parse_int(cells[2], "parent_index"));
        out.push_back(p);
    }
    return out;
}

} // namespace hsi
