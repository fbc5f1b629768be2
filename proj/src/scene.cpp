#include "chordmc/scene.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace chordmc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SceneError(path + ": " + what);
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

Vec3 get_vec3(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
    return {get_number(j[0], path + "[0]"), get_number(j[1], path + "[1]"),
            get_number(j[2], path + "[2]")};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path, std::string("missing field '") + key + "'");
    return j.at(key);
}

// Builds the body and the normalized shape document together.
BodyPtr parse_shape(const json& j, const std::string& path, json& normalized) {
    if (!j.is_object()) fail(path, "expected an object");
    std::string type = require(j, "type", path).get<std::string>();
    normalized = json::object();
    normalized["type"] = type;

    if (type == "sphere") {
        Vec3 c = get_vec3(require(j, "center", path), path + ".center");
        double r = get_number(require(j, "radius", path), path + ".radius");
        normalized["center"] = vec3_to_json(c);
        normalized["radius"] = r;
        try {
            return make_sphere(c, r);
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
    }
    if (type == "box") {
        Vec3 lo = get_vec3(require(j, "lo", path), path + ".lo");
        Vec3 hi = get_vec3(require(j, "hi", path), path + ".hi");
        normalized["lo"] = vec3_to_json(lo);
        normalized["hi"] = vec3_to_json(hi);
        try {
            return make_box(lo, hi);
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
    }
    if (type == "cylinder") {
        Vec3 p0 = get_vec3(require(j, "p0", path), path + ".p0");
        Vec3 p1 = get_vec3(require(j, "p1", path), path + ".p1");
        double r = get_number(require(j, "radius", path), path + ".radius");
        normalized["p0"] = vec3_to_json(p0);
        normalized["p1"] = vec3_to_json(p1);
        normalized["radius"] = r;
        try {
            return make_cylinder(p0, p1, r);
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
    }
    if (type == "union" || type == "intersection" || type == "difference") {
        json na, nb;
        BodyPtr a = parse_shape(require(j, "a", path), path + ".a", na);
        BodyPtr b = parse_shape(require(j, "b", path), path + ".b", nb);
        normalized["a"] = na;
        normalized["b"] = nb;
        if (type == "union") return make_union(a, b);
        if (type == "intersection") return make_intersection(a, b);
        return make_difference(a, b);
    }
    if (type == "translate") {
        Vec3 off = get_vec3(require(j, "offset", path), path + ".offset");
        json nc;
        BodyPtr child = parse_shape(require(j, "child", path), path + ".child", nc);
        normalized["offset"] = vec3_to_json(off);
        normalized["child"] = nc;
        return translate(child, off);
    }
    if (type == "rotate") {
        Vec3 axis = get_vec3(require(j, "axis", path), path + ".axis");
        double deg = get_number(require(j, "angle_deg", path), path + ".angle_deg");
        Vec3 pivot{0, 0, 0};
        if (j.contains("pivot")) pivot = get_vec3(j.at("pivot"), path + ".pivot");
        json nc;
        BodyPtr child = parse_shape(require(j, "child", path), path + ".child", nc);
        normalized["axis"] = vec3_to_json(axis);
        normalized["angle_deg"] = deg;
        normalized["pivot"] = vec3_to_json(pivot);
        normalized["child"] = nc;
        return rotate(child, axis, deg * kPi / 180.0, pivot);
    }
    fail(path + ".type", "unknown shape type '" + type + "'");
}

std::pair<std::vector<double>, std::vector<double>> read_kernel_csv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SceneError("kernel.path: cannot open '" + path.string() + "'");
    std::vector<double> xs, phis;
    std::string linebuf;
    while (std::getline(in, linebuf)) {
        std::replace(linebuf.begin(), linebuf.end(), ',', ' ');
        std::istringstream ls(linebuf);
        double x, p;
        if (ls >> x >> p) {
            xs.push_back(x);
            phis.push_back(p);
        }
    }
    if (xs.size() < 2) throw SceneError("kernel.path: table needs at least 2 rows");
    return {xs, phis};
}

json normalize_kernel(const json& j, const std::filesystem::path& base_dir) {
    if (j.is_null()) return json{{"type", "exponential"}, {"sigma", 1.0}};
    if (!j.is_object()) throw SceneError("kernel: expected an object");
    std::string type = require(j, "type", "kernel").get<std::string>();
    json n = json::object();
    n["type"] = type;
    if (type == "exponential") {
        n["sigma"] = get_number(require(j, "sigma", "kernel"), "kernel.sigma");
        return n;
    }
    if (type == "constant") {
        n["value"] = j.contains("value") ? get_number(j.at("value"), "kernel.value") : 1.0;
        return n;
    }
    if (type == "buildup") {
        n["sigma"] = get_number(require(j, "sigma", "kernel"), "kernel.sigma");
        const json& c = require(j, "coefficients", "kernel");
        if (!c.is_array() || c.empty()) fail("kernel.coefficients", "expected a non-empty array");
        n["coefficients"] = c;
        return n;
    }
    if (type == "table") {
        if (j.contains("x") && j.contains("phi")) {
            n["x"] = j.at("x");
            n["phi"] = j.at("phi");
            return n;
        }
        std::string rel = require(j, "path", "kernel").get<std::string>();
        auto [xs, phis] = read_kernel_csv(base_dir / rel);
        n["x"] = xs;
        n["phi"] = phis;
        return n;
    }
    fail("kernel.type", "unknown kernel type '" + type + "'");
}

}  // namespace

Scene parse_scene(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw SceneError("document: expected a JSON object");
    const json& bodies = require(doc, "bodies", "document");
    if (!bodies.is_array() || bodies.empty())
        throw SceneError("bodies: expected a non-empty array");

    std::vector<Zone> zones;
    json nbodies = json::array();
    for (size_t i = 0; i < bodies.size(); ++i) {
        std::string path = "bodies[" + std::to_string(i) + "]";
        const json& entry = bodies[i];
        std::string label = require(entry, "label", path).get<std::string>();
        for (const auto& z : zones)
            if (z.label == label) fail(path + ".label", "duplicate label '" + label + "'");
        json nshape;
        BodyPtr body = parse_shape(require(entry, "shape", path), path + ".shape", nshape);
        zones.push_back({label, body});
        nbodies.push_back(json{{"label", label}, {"shape", nshape}});
    }

    json kernel = normalize_kernel(doc.contains("kernel") ? doc.at("kernel") : json(), base_dir);
    json normalized = json{{"bodies", nbodies}, {"kernel", kernel}};
    return Scene{ZoneSet(std::move(zones)), kernel, normalized};
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SceneError("cannot open scene file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw SceneError("scene file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_scene(doc, path.parent_path());
}

nlohmann::json emit_scene(const Scene& scene) { return scene.document; }

Kernel make_kernel(const nlohmann::json& spec, double l_max, int n_bins) {
    std::string type = spec.at("type").get<std::string>();
    if (type == "exponential") return Kernel::exponential(spec.at("sigma").get<double>());
    if (type == "constant") return Kernel::constant(spec.at("value").get<double>());
    if (type == "buildup")
        return Kernel::buildup(spec.at("sigma").get<double>(),
                               spec.at("coefficients").get<std::vector<double>>());
    if (type == "table")
        return Kernel::from_samples(spec.at("x").get<std::vector<double>>(),
                                    spec.at("phi").get<std::vector<double>>(), l_max, n_bins);
    throw SceneError("kernel.type: unknown kernel type '" + type + "'");
}

uint64_t scene_hash(const Scene& scene) {
    std::string s = scene.document.dump();
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace chordmc
