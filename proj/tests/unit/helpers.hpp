#pragma once

// Shared fixtures for the unit tests: tiny cube/label builders and
// throwaway directories under the system temp root.

#include <hsiselect/cube.hpp>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace testutil {

inline std::filesystem::path fresh_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() / "hsiselect-tests" /
               (tag + "-" + std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline hsi::HyperCube make_cube(std::uint32_t width, std::uint32_t height,
                                std::vector<std::vector<std::uint16_t>> bands) {
    hsi::HyperCube cube;
    cube.width = width;
    cube.height = height;
    cube.n_bands = static_cast<std::uint32_t>(bands.size());
    cube.bands = std::move(bands);
    cube.validate();
    return cube;
}

inline hsi::GroundTruthMap make_gt(std::uint32_t width, std::uint32_t height,
                                   std::vector<int> labels) {
    hsi::GroundTruthMap gt;
    gt.width = width;
    gt.height = height;
    gt.labels = std::move(labels);
    gt.num_classes = 0;
    for (int v : gt.labels) gt.num_classes = std::max(gt.num_classes, v);
    gt.validate();
    return gt;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testutil
