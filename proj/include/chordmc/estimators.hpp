#pragma once

#include <optional>
#include <string>

#include "chordmc/body.hpp"
#include "chordmc/histogram.hpp"
#include "chordmc/kernel.hpp"
#include "chordmc/rng.hpp"
#include "chordmc/sampling.hpp"

namespace chordmc {

struct EstimateReport {
    double value = 0.0;
    double std_error = 0.0;
    std::string method;           // chord | ray | dd | oracle-radial | oracle-pairwise
    int64_t n_samples = 0;
    std::string normalizer = "none";  // V-over-meanl | S-over-4 | none
    uint64_t seed = 0;
    double runtime_seconds = 0.0;
};

// Volume (with MC standard error when not analytic) and optional surface
// area of a body; the inputs every normalizer needs.
struct BodyMetrics {
    double volume = 0.0;
    double volume_std_error = 0.0;
    std::optional<double> area;
};

BodyMetrics measure_body(const Body& body, RngStream& rng, int64_t n_volume_samples = 2'000'000);

enum class Normalizer { VOverMeanLength, SOver4 };

// Chord route: value = s_B * sum_j density_j I2(mid_j) dl with the
// normalizer s_B = V / <l> (or S/4 when the area is known).
EstimateReport chord_estimate(const QuasiDensity& qd, const Kernel& kernel,
                              const BodyMetrics& metrics,
                              Normalizer norm = Normalizer::VOverMeanLength);

// Ray route: value = V * sum_j density_j I1(mid_j) dl.
EstimateReport ray_estimate(const QuasiDensity& qd, const Kernel& kernel,
                            const BodyMetrics& metrics);

// Distance-distribution route: value = V^2 * sum_j density_j phi(mid_j)
// / (4 pi mid_j^2) dl.
EstimateReport dd_estimate(const DistanceHistogram& ddh, const Kernel& kernel,
                           const BodyMetrics& metrics);

// Independent ground truth: uniform source point, isotropic direction,
// uniform radius on (0, l_max); finite variance for bounded phi.
EstimateReport oracle_radial(const Body& src, const BodyMetrics& src_metrics, const Body& tgt,
                             const Kernel& kernel, int64_t n, RngStream& rng, double l_max);

// Plain two-point oracle; diverging second moment for touching or
// overlapping bodies, so it refuses to run on them.
EstimateReport oracle_pairwise(const Body& src, const BodyMetrics& src_metrics, const Body& tgt,
                               const BodyMetrics& tgt_metrics, const Kernel& kernel, int64_t n,
                               RngStream& rng);

// Monte Carlo containment probe for overlap between two bodies.
bool bodies_overlap(const Body& a, const Body& b, RngStream& rng, int64_t probes = 4096);

// Pairwise discrepancy in combined standard errors.
double z_score(const EstimateReport& a, const EstimateReport& b);

// Distance histogram of point pairs, uniform in src x tgt (same body twice
// for the single-body distance distribution).
DistanceHistogram sample_distance_histogram(const Body& src, const Body& tgt, int64_t n_pairs,
                                            int n_bins, double l_max, RngStream& rng);

}  // namespace chordmc
