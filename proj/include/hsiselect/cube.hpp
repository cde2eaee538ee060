#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "csv.hpp"
#include "errors.hpp"
#include "random.hpp"

namespace hsi {

struct HyperCube {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t n_bands = 0;
    // one flat row-major grid per band, raw 16-bit radiance counts
    std::vector<std::vector<std::uint16_t>> bands;

    std::size_t n_pixels() const { return std::size_t(width) * height; }

    void validate() const {
        if (width < 1 || height < 1 || n_bands < 1)
            throw domain_error("cube dimensions must be at least 1x1x1");
        if (bands.size() != n_bands)
            throw domain_error("cube band count mismatch");
        for (const auto& b : bands)
            if (b.size() != n_pixels())
                throw domain_error("cube band sample count mismatch");
    }
};

struct GroundTruthMap {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<int> labels; // row-major, 0 = unlabeled
    int num_classes = 0;

    std::size_t n_pixels() const { return std::size_t(width) * height; }

    std::vector<std::size_t> labeled_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] != 0) out.push_back(i);
        return out;
    }

    void validate() const {
        if (labels.size() != n_pixels())
            throw domain_error("ground truth label count mismatch");
        int mx = 0;
        bool any = false;
        for (int l : labels) {
            if (l < 0) throw domain_error("negative class label");
            if (l > 0) any = true;
            mx = std::max(mx, l);
        }
        if (!any) throw domain_error("ground truth has no labeled pixels");
        if (num_classes != mx) throw domain_error("num_classes does not match max label");
    }
};

struct LabeledSplit {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> train_pixels; // (row, col)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> test_pixels;
    std::uint64_t seed = 0;
};

enum class CubeFormat { binary_cube, pixel_csv };

inline CubeFormat parse_cube_format(const std::string& s) {
    if (s == "binary-cube") return CubeFormat::binary_cube;
    if (s == "pixel-csv") return CubeFormat::pixel_csv;
    throw io_error("unknown cube format '" + s + "' (expected binary-cube or pixel-csv)");
}

namespace detail {

inline std::uint32_t read_u32_le(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}

inline void put_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char((v >> 8) & 0xff));
    out.push_back(char((v >> 16) & 0xff));
    out.push_back(char((v >> 24) & 0xff));
}

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return std::move(ss).str();
}

} // namespace detail

// binary-cube layout: "HSIC", u32 width, u32 height, u32 n_bands (little
// endian), then band-sequential row-major samples, each a little-endian u16.
inline HyperCube load_binary_cube(const std::string& path) {
    std::string data = detail::read_file_bytes(path);
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    if (data.size() < 16 || data.compare(0, 4, "HSIC") != 0)
        throw io_error(path + ": malformed header (byte offset 0: missing HSIC magic)");
    HyperCube cube;
    cube.width = detail::read_u32_le(p + 4);
    cube.height = detail::read_u32_le(p + 8);
    cube.n_bands = detail::read_u32_le(p + 12);
    if (cube.width < 1 || cube.height < 1 || cube.n_bands < 1)
        throw io_error(path + ": malformed header (byte offset 4: zero dimension)");
    const std::uint64_t n_px = std::uint64_t(cube.width) * cube.height;
    const std::uint64_t need = 16 + n_px * cube.n_bands * 2;
    if (n_px > (std::uint64_t(1) << 32) || need > (std::uint64_t(1) << 40))
        throw io_error(path + ": malformed header (dimension overflow)");
    if (data.size() < need)
        throw io_error(path + ": truncated payload (byte offset " + std::to_string(data.size()) +
                       ", expected " + std::to_string(need) + " bytes)");
    cube.bands.assign(cube.n_bands, std::vector<std::uint16_t>(n_px));
    std::size_t off = 16;
    for (auto& band : cube.bands)
        for (auto& s : band) {
            s = std::uint16_t(p[off] | (p[off + 1] << 8));
            off += 2;
        }
    cube.validate();
    return cube;
}

inline void write_binary_cube(const HyperCube& cube, const std::string& path) {
    cube.validate();
    std::string out = "HSIC";
    detail::put_u32_le(out, cube.width);
    detail::put_u32_le(out, cube.height);
    detail::put_u32_le(out, cube.n_bands);
    for (const auto& band : cube.bands)
        for (std::uint16_t s : band) {
            out.push_back(char(s & 0xff));
            out.push_back(char(s >> 8));
        }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot write file: " + path);
    f.write(out.data(), std::streamsize(out.size()));
    if (!f) throw io_error("write failed: " + path);
}

// pixel-csv layout: header "row,col,b0,b1,...", one line per pixel, every
// pixel present exactly once; dimensions are inferred from the coordinates.
inline HyperCube load_pixel_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(f, line)) throw io_error(path + ": empty file");
    auto header = split(std::string(trim(line)), ',');
    if (header.size() < 3 || header[0] != "row" || header[1] != "col")
        throw io_error(path + ": line 1: expected header row,col,b0,...");
    const std::size_t nb = header.size() - 2;

    struct Px { std::uint32_t row, col; std::vector<std::uint16_t> v; };
    std::vector<Px> pixels;
    std::uint32_t max_row = 0, max_col = 0;
    std::size_t line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty()) continue;
        auto cells = split(std::string(t), ',');
        if (cells.size() != header.size())
            throw io_error(path + ": line " + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " columns, got " + std::to_string(cells.size()));
        Px px;
        long long r = parse_int(cells[0], "row");
        long long c = parse_int(cells[1], "col");
        if (r < 0 || c < 0)
            throw io_error(path + ": line " + std::to_string(line_no) + ": negative coordinate");
        px.row = std::uint32_t(r);
        px.col = std::uint32_t(c);
        px.v.reserve(nb);
        for (std::size_t i = 2; i < cells.size(); ++i) {
            long long s = parse_int(cells[i], "sample");
            if (s < 0 || s > 65535)
                throw io_error(path + ": line " + std::to_string(line_no) +
                               ": sample out of 16-bit range: " + cells[i]);
            px.v.push_back(std::uint16_t(s));
        }
        max_row = std::max(max_row, px.row);
        max_col = std::max(max_col, px.col);
        pixels.push_back(std::move(px));
    }
    if (pixels.empty()) throw io_error(path + ": no pixel rows");

    HyperCube cube;
    cube.width = max_col + 1;
    cube.height = max_row + 1;
    cube.n_bands = std::uint32_t(nb);
    if (pixels.size() != cube.n_pixels())
        throw io_error(path + ": expected " + std::to_string(cube.n_pixels()) +
                       " pixel rows for " + std::to_string(cube.height) + "x" +
                       std::to_string(cube.width) + ", got " + std::to_string(pixels.size()));
    cube.bands.assign(nb, std::vector<std::uint16_t>(cube.n_pixels()));
    std::vector<char> seen(cube.n_pixels(), 0);
    for (const auto& px : pixels) {
        std::size_t idx = std::size_t(px.row) * cube.width + px.col;
        if (seen[idx])
            throw io_error(path + ": duplicate pixel (" + std::to_string(px.row) + "," +
                           std::to_string(px.col) + ")");
        seen[idx] = 1;
        for (std::size_t b = 0; b < nb; ++b) cube.bands[b][idx] = px.v[b];
    }
    cube.validate();
    return cube;
}

inline void write_pixel_csv(const HyperCube& cube, const std::string& path) {
    cube.validate();
    std::ofstream f(path);
    if (!f) throw io_error("cannot write file: " + path);
    f << "row,col";
    for (std::uint32_t b = 0; b < cube.n_bands; ++b) f << ",b" << b;
    f << "\n";
    for (std::uint32_t r = 0; r < cube.height; ++r)
        for (std::uint32_t c = 0; c < cube.width; ++c) {
            f << r << ',' << c;
            std::size_t idx = std::size_t(r) * cube.width + c;
            for (std::uint32_t b = 0; b < cube.n_bands; ++b) f << ',' << cube.bands[b][idx];
            f << "\n";
        }
    if (!f) throw io_error("write failed: " + path);
}

inline HyperCube load_cube(const std::string& path, CubeFormat format) {
    return format == CubeFormat::binary_cube ? load_binary_cube(path) : load_pixel_csv(path);
}

// plain text: one row of space-separated non-negative integers per image row
inline GroundTruthMap load_ground_truth(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open file: " + path);
    GroundTruthMap gt;
    std::string line;
    std::size_t line_no = 0;
    std::size_t cols = 0;
    while (std::getline(f, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty()) continue;
        std::istringstream ss{std::string(t)};
        std::string tok;
        std::size_t n = 0;
        while (ss >> tok) {
            long long v = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || p != tok.data() + tok.size())
                throw io_error(path + ": line " + std::to_string(line_no) +
                               ": non-integer token '" + tok + "'");
            if (v < 0)
                throw io_error(path + ": line " + std::to_string(line_no) + ": negative label");
            gt.labels.push_back(int(v));
            ++n;
        }
        if (cols == 0) cols = n;
        else if (n != cols)
            throw io_error(path + ": line " + std::to_string(line_no) + ": ragged row (" +
                           std::to_string(n) + " vs " + std::to_string(cols) + " columns)");
        ++gt.height;
    }
    if (gt.labels.empty()) throw io_error(path + ": empty ground truth file");
    gt.width = std::uint32_t(cols);
    gt.num_classes = *std::max_element(gt.labels.begin(), gt.labels.end());
    if (gt.num_classes == 0) throw domain_error(path + ": ground truth has no labeled pixels");
    gt.validate();
    return gt;
}

inline void write_ground_truth(const GroundTruthMap& gt, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw io_error("cannot write file: " + path);
    for (std::uint32_t r = 0; r < gt.height; ++r) {
        for (std::uint32_t c = 0; c < gt.width; ++c) {
            if (c) f << ' ';
            f << gt.labels[std::size_t(r) * gt.width + c];
        }
        f << "\n";
    }
    if (!f) throw io_error("write failed: " + path);
}

inline LabeledSplit random_split(const GroundTruthMap& gt, double fraction, std::uint64_t seed,
                                 bool stratified = false) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw domain_error("split fraction must lie in (0,1)");
    auto labeled = gt.labeled_indices();
    if (labeled.size() < 2) throw domain_error("need at least 2 labeled pixels to split");

    std::mt19937_64 rng(seed);
    LabeledSplit out;
    out.seed = seed;
    auto coord = [&](std::size_t idx) {
        return std::make_pair(std::uint32_t(idx / gt.width), std::uint32_t(idx % gt.width));
    };
    auto draw = [&](std::vector<std::size_t>& pool, std::size_t n_train) {
        shuffle_vec(pool, rng);
        for (std::size_t i = 0; i < pool.size(); ++i)
            (i < n_train ? out.train_pixels : out.test_pixels).push_back(coord(pool[i]));
    };
    if (!stratified) {
        std::size_t n_train = std::size_t(std::llround(fraction * double(labeled.size())));
        draw(labeled, n_train);
    } else {
        std::map<int, std::vector<std::size_t>> by_class;
        for (std::size_t idx : labeled) by_class[gt.labels[idx]].push_back(idx);
        for (auto& [cls, pool] : by_class) {
            std::size_t n_train = std::size_t(std::llround(fraction * double(pool.size())));
            draw(pool, n_train);
        }
    }
    // the split is a pair of sets; canonical order keeps downstream
    // distance-tie handling independent of the draw order
    std::sort(out.train_pixels.begin(), out.train_pixels.end());
    std::sort(out.test_pixels.begin(), out.test_pixels.end());
    return out;
}

} // namespace hsi
