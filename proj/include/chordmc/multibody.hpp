#pragma once

#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "chordmc/body.hpp"
#include "chordmc/estimators.hpp"
#include "chordmc/histogram.hpp"

namespace chordmc {

struct Zone {
    std::string label;
    BodyPtr body;
};

// Labeled bodies sharing one sampling domain. Labels are unique.
class ZoneSet {
public:
    explicit ZoneSet(std::vector<Zone> zones);

    const std::vector<Zone>& zones() const { return zones_; }
    int size() const { return static_cast<int>(zones_.size()); }
    const Zone& zone(int i) const { return zones_[static_cast<size_t>(i)]; }

    BodyPtr union_body() const;
    BoundingSphere bounding_sphere() const;

    // index of the first zone containing p, -1 if none
    int zone_of(const Vec3& p) const;

    std::vector<std::pair<int, int>> overlapping_pairs(RngStream& rng,
                                                       int64_t probes = 4096) const;

private:
    std::vector<Zone> zones_;
};

struct TaggedCrossing {
    double t;
    int zone;
};

// Merged zone-tagged boundary crossings of the line (even per zone), sorted
// by parameter. Coincident boundaries of adjacent zones stay as separate
// entries with equal t.
std::vector<TaggedCrossing> tagged_line_crossings(const ZoneSet& zs, const Line& line);

// Ray variant: strictly positive crossings, plus the source zone of the
// origin. nullopt when the origin grazes any boundary or the parity check
// fails (rejected sample).
struct TaggedRay {
    int source_zone;
    std::vector<TaggedCrossing> crossings;
};
std::optional<TaggedRay> tagged_ray_crossings(const ZoneSet& zs, const Vec3& origin,
                                              const Vec3& dir);

// Per-pair signed histograms filled in a single pass. Chord mode keeps the
// symmetric upper triangle {s,t}; ray mode keeps the full (source, target)
// matrix. A separate union histogram accumulates the same contributions
// untagged, so the count partition is exact by construction.
class HistogramMatrix {
public:
    HistogramMatrix(DensityMode mode, int n_zones, int n_bins, double l_max);

    void record_line(std::span<const TaggedCrossing> merged);
    void record_ray(int source_zone, std::span<const TaggedCrossing> merged);
    void merge(const HistogramMatrix& other);

    DensityMode mode() const { return mode_; }
    int n_zones() const { return m_; }
    const SignedHistogram& cell(int s, int t) const;
    const SignedHistogram& union_histogram() const { return union_; }

    // elementwise cell sum, for the partition identity against union_histogram()
    std::vector<int64_t> sum_of_cell_counts() const;

private:
    int cell_index(int s, int t) const;
    void flush_scratch();

    DensityMode mode_;
    int m_;
    std::vector<SignedHistogram> cells_;
    SignedHistogram union_;
    std::vector<std::tuple<int, int, int>> scratch_;  // (cell, bin, sign)
};

// Monte Carlo passes (single stream; callers parallelize by merging).
void accumulate_chord_matrix(const ZoneSet& zs, const BoundingSphere& domain, int64_t n_lines,
                             RngStream& rng, HistogramMatrix& matrix);
void accumulate_ray_matrix(const ZoneSet& zs, const std::vector<double>& zone_volumes,
                           int64_t n_rays, RngStream& rng, HistogramMatrix& matrix);

// Union-normalized pair integral A_{Bs}^{Bt} from the chord matrix.
EstimateReport pair_integral_chord(const HistogramMatrix& matrix, const Kernel& kernel, int s,
                                   int t, const BodyMetrics& union_metrics,
                                   Normalizer norm = Normalizer::VOverMeanLength);

// Same from the ray matrix; off-diagonal cells use the symmetrized sum
// H_st + H_ts (they are not individually normalizable for disjoint bodies).
EstimateReport pair_integral_ray(const HistogramMatrix& matrix, const Kernel& kernel, int s,
                                 int t, const BodyMetrics& union_metrics);

struct McRunParams {
    int64_t n_lines = 1'000'000;
    int n_bins = 512;
    uint64_t seed = 1;
    int64_t n_volume_samples = 2'000'000;
};

// Chord-method estimate of the self integral of one body, from its own line
// set (used by the identity checks below).
EstimateReport single_body_chord_run(const Body& body, const Kernel& kernel,
                                     const McRunParams& params, const std::string& stream_tag);

// Decomposition plan for a pair: overlap detected by containment probes.
// On the overlap path the subtraction terms are the exclusive parts
// B1 \ B2 and B2 \ B1; with those, 2 A12 = D_union + D_intersection
// - D_excl1 - D_excl2 holds for the full pair integral and reduces to the
// disjoint three-term identity when the intersection is empty.
struct OverlapDecomposition {
    BodyPtr union_body;
    BodyPtr intersection_body;  // null on the disjoint path
    BodyPtr a_exclusive;        // equals a on the disjoint path
    BodyPtr b_exclusive;        // equals b on the disjoint path
    bool disjoint = false;
};
OverlapDecomposition decompose_overlap(BodyPtr a, BodyPtr b, RngStream& rng,
                                       int64_t probes = 4096);

// A_{B1}^{B2} via the subtraction identities above.
EstimateReport two_body_integral(BodyPtr a, BodyPtr b, const Kernel& kernel,
                                 const McRunParams& params);

// Cross-check of the matrix pair integral against the subtraction identity,
// each side from independent streams.
struct SubtractionCheck {
    EstimateReport pair_from_matrix;
    EstimateReport identity;
    EstimateReport d_union, d_a, d_b;
    double z = 0.0;
};
SubtractionCheck subtraction_identity_check(BodyPtr a, BodyPtr b, const Kernel& kernel,
                                            const McRunParams& params);

}  // namespace chordmc
