#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "chordmc/kernel.hpp"
#include "chordmc/multibody.hpp"

namespace chordmc {

// Scene document errors carry the offending field path in the message.
class SceneError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parsed scene: validated labeled bodies plus the normalized document
// (defaults filled in, table kernels inlined) that emit_scene() returns, so
// parse(emit(scene)) reproduces an identical zone set.
struct Scene {
    ZoneSet zones;
    nlohmann::json kernel_spec;
    nlohmann::json document;
};

Scene parse_scene(const nlohmann::json& doc,
                  const std::filesystem::path& base_dir = std::filesystem::path());
Scene load_scene(const std::filesystem::path& path);
nlohmann::json emit_scene(const Scene& scene);

// Kernel from the normalized spec; table kernels get antiderivatives
// tabulated on the (l_max, n_bins) histogram grid.
Kernel make_kernel(const nlohmann::json& kernel_spec, double l_max, int n_bins);

// FNV-1a of the normalized document; recorded in reports for provenance.
uint64_t scene_hash(const Scene& scene);

}  // namespace chordmc
