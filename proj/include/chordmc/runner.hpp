#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "chordmc/scene.hpp"

namespace chordmc {

struct RunConfig {
    std::filesystem::path scene_path;
    std::vector<std::string> methods{"chord", "ray", "dd", "oracle"};
    int64_t n_lines = 1'000'000;
    int64_t n_rays = 1'000'000;
    int64_t n_pairs = 1'000'000;
    int n_bins = 512;
    std::optional<double> l_max_override;
    uint64_t seed = 20240601;
    int workers = 1;
    std::filesystem::path out_dir = "out";
};

// Full batch run: estimates D(phi) for the scene with every requested
// method, writes reports.json, per-histogram CSVs, the matrix manifest for
// multi-zone scenes, and the cross-method comparison table. Returns 0 on
// success, 3 when any cross-method z-score exceeds 5.
int run(const RunConfig& config);

}  // namespace chordmc
