#pragma once

#include <vector>

#include "chordmc/body.hpp"
#include "chordmc/histogram.hpp"
#include "chordmc/rng.hpp"

namespace chordmc {

struct ValueWithError {
    double value = 0.0;
    double std_error = 0.0;
};

// Uniform direction on the unit sphere.
Vec3 sample_isotropic_direction(RngStream& rng);

// Uniform point inside the body, by rejection from the bounding cube.
// Throws if the acceptance rate collapses (degenerate body).
Vec3 sample_point_in_body(const Body& body, RngStream& rng);

// Random line from the motion-invariant measure restricted to lines meeting
// the given sphere: isotropic direction, anchor uniform on the perpendicular
// disk of radius R through the center.
Line sample_kinematic_line(const BoundingSphere& sphere, RngStream& rng);

// Total measure carried by sample_kinematic_line: pi * (sphere surface area).
inline double line_measure_total(const BoundingSphere& sphere) {
    return 4.0 * kPi * kPi * sphere.radius * sphere.radius;
}

// Measure of the set of lines meeting the body (pi * S for a convex body),
// estimated by the hit fraction of kinematic lines from its bounding sphere.
ValueWithError estimate_line_measure(const Body& body, int64_t n_lines, RngStream& rng);

// Monte Carlo volume by containment sampling over the bounding cube.
ValueWithError estimate_volume(const Body& body, int64_t n_samples, RngStream& rng);

// Smallest sphere enclosing every body's bounding sphere, inflated by a
// 1e-6 relative margin so no tangent line gets clipped.
BoundingSphere scene_bounding_sphere(const std::vector<BodyPtr>& bodies);

// Monte Carlo passes feeding a signed histogram. n counts sampled lines
// (hitting or not) for chords and recorded rays for rays.
void accumulate_chords(const Body& body, const BoundingSphere& domain, int64_t n_lines,
                       RngStream& rng, SignedHistogram& hist);
void accumulate_rays(const Body& body, int64_t n_rays, RngStream& rng, SignedHistogram& hist);

}  // namespace chordmc
