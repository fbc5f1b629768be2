#include "chordmc/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace chordmc {

Vec3 sample_isotropic_direction(RngStream& rng) {
    double z = 2.0 * rng.uniform() - 1.0;
    double phi = 2.0 * kPi * rng.uniform();
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

Vec3 sample_point_in_body(const Body& body, RngStream& rng) {
    const BoundingSphere& bs = body.bounds();
    double r = bs.radius;
    // Acceptance from the cube is at worst V / (2R)^3; bail out once the
    // implied efficiency drops below 1e-6.
    constexpr int64_t kMaxAttempts = 5'000'000;
    for (int64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Vec3 p{bs.center.x + rng.uniform(-r, r),
               bs.center.y + rng.uniform(-r, r),
               bs.center.z + rng.uniform(-r, r)};
        if (body.contains(p)) return p;
    }
    throw std::runtime_error(
        "sample_point_in_body: rejection efficiency below 1e-6 (degenerate body?)");
}

Line sample_kinematic_line(const BoundingSphere& sphere, RngStream& rng) {
    Vec3 w = sample_isotropic_direction(rng);
    // orthonormal frame perpendicular to w
    Vec3 helper = std::abs(w.x) < 0.5 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 e1 = normalized(cross(w, helper));
    Vec3 e2 = cross(w, e1);
    double rho = sphere.radius * std::sqrt(rng.uniform());
    double psi = 2.0 * kPi * rng.uniform();
    Vec3 anchor = sphere.center + e1 * (rho * std::cos(psi)) + e2 * (rho * std::sin(psi));
    return {anchor, w};
}

ValueWithError estimate_line_measure(const Body& body, int64_t n_lines, RngStream& rng) {
    if (n_lines < 1) throw std::invalid_argument("n_lines must be >= 1");
    BoundingSphere bs = body.bounds();
    bs.radius *= 1.0 + 1e-6;
    const double total = line_measure_total(bs);
    int64_t hits = 0;
    CrossingList xs;
    for (int64_t i = 0; i < n_lines; ++i) {
        Line line = sample_kinematic_line(bs, rng);
        body.line_crossings(line, xs);
        if (!xs.empty()) ++hits;
    }
    double p = static_cast<double>(hits) / static_cast<double>(n_lines);
    double se = total * std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(n_lines)));
    return {total * p, se};
}

ValueWithError estimate_volume(const Body& body, int64_t n_samples, RngStream& rng) {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    const BoundingSphere& bs = body.bounds();
    double r = bs.radius;
    double cube = 8.0 * r * r * r;
    int64_t hits = 0;
    for (int64_t i = 0; i < n_samples; ++i) {
        Vec3 p{bs.center.x + rng.uniform(-r, r),
               bs.center.y + rng.uniform(-r, r),
               bs.center.z + rng.uniform(-r, r)};
        if (body.contains(p)) ++hits;
    }
    double p = static_cast<double>(hits) / static_cast<double>(n_samples);
    double se = cube * std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(n_samples)));
    return {cube * p, se};
}

BoundingSphere scene_bounding_sphere(const std::vector<BodyPtr>& bodies) {
    if (bodies.empty()) throw std::invalid_argument("scene has no bodies");
    BoundingSphere acc = bodies.front()->bounds();
    for (size_t i = 1; i < bodies.size(); ++i)
        acc = enclosing_sphere(acc, bodies[i]->bounds());
    acc.radius *= 1.0 + 1e-6;
    return acc;
}

namespace {

// at least one in-body interval of positive length (tangent-only grazes
// carry no chord and are not counted as hits)
bool has_positive_chord(const CrossingList& xs) {
    for (size_t k = 0; k + 1 < xs.size(); k += 2)
        if (xs[k + 1] > xs[k]) return true;
    return false;
}

}  // namespace

void accumulate_chords(const Body& body, const BoundingSphere& domain, int64_t n_lines,
                       RngStream& rng, SignedHistogram& hist) {
    for (int64_t i = 0; i < n_lines; ++i) {
        Line line = sample_kinematic_line(domain, rng);
        CrossingList xs = intersect_line(body, line);
        if (!has_positive_chord(xs)) continue;
        hist.record_line_chords(xs);
    }
}

void accumulate_rays(const Body& body, int64_t n_rays, RngStream& rng, SignedHistogram& hist) {
    for (int64_t done = 0; done < n_rays;) {
        Vec3 origin = sample_point_in_body(body, rng);
        Vec3 dir = sample_isotropic_direction(rng);
        auto xs = intersect_ray(body, origin, dir);
        if (!xs) continue;  // boundary graze: rejected sample
        hist.record_ray(*xs);
        ++done;
    }
}

}  // namespace chordmc
