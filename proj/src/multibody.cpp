#include "chordmc/multibody.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "chordmc/sampling.hpp"

namespace chordmc {

ZoneSet::ZoneSet(std::vector<Zone> zones) : zones_(std::move(zones)) {
    if (zones_.empty()) throw std::invalid_argument("zone set must not be empty");
    std::set<std::string> seen;
    for (const auto& z : zones_) {
        if (!z.body) throw std::invalid_argument("zone body must be non-null");
        if (!seen.insert(z.label).second)
            throw std::invalid_argument("duplicate zone label: " + z.label);
    }
}

BodyPtr ZoneSet::union_body() const {
    BodyPtr b = zones_.front().body;
    for (size_t i = 1; i < zones_.size(); ++i) b = make_union(b, zones_[i].body);
    return b;
}

BoundingSphere ZoneSet::bounding_sphere() const {
    std::vector<BodyPtr> bodies;
    bodies.reserve(zones_.size());
    for (const auto& z : zones_) bodies.push_back(z.body);
    return scene_bounding_sphere(bodies);
}

int ZoneSet::zone_of(const Vec3& p) const {
    for (size_t i = 0; i < zones_.size(); ++i)
        if (zones_[i].body->contains(p)) return static_cast<int>(i);
    return -1;
}

std::vector<std::pair<int, int>> ZoneSet::overlapping_pairs(RngStream& rng,
                                                            int64_t probes) const {
    std::vector<std::pair<int, int>> out;
    for (int s = 0; s < size(); ++s)
        for (int t = s + 1; t < size(); ++t)
            if (bodies_overlap(*zones_[s].body, *zones_[t].body, rng, probes))
                out.emplace_back(s, t);
    return out;
}

std::vector<TaggedCrossing> tagged_line_crossings(const ZoneSet& zs, const Line& line) {
    std::vector<TaggedCrossing> merged;
    for (int z = 0; z < zs.size(); ++z) {
        CrossingList xs = intersect_line(*zs.zone(z).body, line);
        for (double t : xs) merged.push_back({t, z});
    }
    std::sort(merged.begin(), merged.end(), [](const TaggedCrossing& a, const TaggedCrossing& b) {
        return a.t != b.t ? a.t < b.t : a.zone < b.zone;
    });
    return merged;
}

std::optional<TaggedRay> tagged_ray_crossings(const ZoneSet& zs, const Vec3& origin,
                                              const Vec3& dir) {
    TaggedRay ray;
    ray.source_zone = zs.zone_of(origin);
    if (ray.source_zone < 0) return std::nullopt;
    Line line{origin, dir};
    for (int z = 0; z < zs.size(); ++z) {
        const Body& body = *zs.zone(z).body;
        CrossingList xs = intersect_line(body, line);
        double eps = 1e-9 * body.bounds().radius;
        for (double t : xs) {
            if (std::abs(t) <= eps) return std::nullopt;  // origin grazes a boundary
            if (t > 0.0) ray.crossings.push_back({t, z});
        }
    }
    if (ray.crossings.size() % 2 == 0) return std::nullopt;
    std::sort(ray.crossings.begin(), ray.crossings.end(),
              [](const TaggedCrossing& a, const TaggedCrossing& b) {
                  return a.t != b.t ? a.t < b.t : a.zone < b.zone;
              });
    return ray;
}

HistogramMatrix::HistogramMatrix(DensityMode mode, int n_zones, int n_bins, double l_max)
    : mode_(mode), m_(n_zones), union_(n_bins, l_max) {
    if (n_zones < 1) throw std::invalid_argument("matrix needs at least one zone");
    int n_cells = mode == DensityMode::Chord ? n_zones * (n_zones + 1) / 2 : n_zones * n_zones;
    cells_.reserve(static_cast<size_t>(n_cells));
    for (int i = 0; i < n_cells; ++i) cells_.emplace_back(n_bins, l_max);
}

int HistogramMatrix::cell_index(int s, int t) const {
    if (s < 0 || t < 0 || s >= m_ || t >= m_) throw std::out_of_range("zone index");
    if (mode_ == DensityMode::Chord) {
        if (s > t) std::swap(s, t);  // symmetric: {s,t} and {t,s} share a cell
        return s * m_ - s * (s - 1) / 2 + (t - s);
    }
    return s * m_ + t;
}

const SignedHistogram& HistogramMatrix::cell(int s, int t) const {
    return cells_[static_cast<size_t>(cell_index(s, t))];
}

void HistogramMatrix::record_line(std::span<const TaggedCrossing> merged) {
    if (mode_ != DensityMode::Chord)
        throw std::logic_error("record_line requires a chord-mode matrix");
    size_t k_count = merged.size();
    if (k_count < 2 || k_count % 2 != 0)
        throw std::invalid_argument("merged crossing count must be even and >= 2");
    scratch_.clear();
    for (size_t k = 1; k < k_count; ++k) {
        for (size_t j = 0; j < k; ++j) {
            double l = merged[k].t - merged[j].t;
            if (l == 0.0) continue;  // coinciding zone boundaries
            int sign = ((k - j) % 2 == 1) ? +1 : -1;
            int ci = cell_index(merged[j].zone, merged[k].zone);
            int bin = union_.bin_index(l);
            scratch_.emplace_back(ci, bin, sign);
            cells_[static_cast<size_t>(ci)].length_sum_ += sign * l;
            union_.length_sum_ += sign * l;
        }
    }
    flush_scratch();
}

void HistogramMatrix::record_ray(int source_zone, std::span<const TaggedCrossing> merged) {
    if (mode_ != DensityMode::Ray)
        throw std::logic_error("record_ray requires a ray-mode matrix");
    if (merged.empty() || merged.size() % 2 == 0)
        throw std::invalid_argument("ray crossing count must be odd");
    scratch_.clear();
    for (size_t k = 0; k < merged.size(); ++k) {
        int sign = (k % 2 == 0) ? +1 : -1;
        int ci = cell_index(source_zone, merged[k].zone);
        int bin = union_.bin_index(merged[k].t);
        scratch_.emplace_back(ci, bin, sign);
        cells_[static_cast<size_t>(ci)].length_sum_ += sign * merged[k].t;
        union_.length_sum_ += sign * merged[k].t;
    }
    flush_scratch();
}

void HistogramMatrix::merge(const HistogramMatrix& other) {
    if (other.mode_ != mode_ || other.m_ != m_)
        throw std::invalid_argument("cannot merge incompatible matrices");
    for (size_t i = 0; i < cells_.size(); ++i) cells_[i].merge(other.cells_[i]);
    union_.merge(other.union_);
}

std::vector<int64_t> HistogramMatrix::sum_of_cell_counts() const {
    std::vector<int64_t> sum(static_cast<size_t>(union_.n_bins()), 0);
    for (const auto& c : cells_)
        for (int j = 0; j < c.n_bins(); ++j) sum[static_cast<size_t>(j)] += c.counts()[j];
    return sum;
}

void HistogramMatrix::flush_scratch() {
    // fold per-line contributions per (cell, bin): exact counts and the
    // per-line squared contribution for the variance estimate
    std::sort(scratch_.begin(), scratch_.end());
    std::vector<std::pair<int, int64_t>> union_bins;  // (bin, contribution)
    for (size_t i = 0; i < scratch_.size();) {
        auto [ci, bin, sign] = scratch_[i];
        int64_t c = 0;
        while (i < scratch_.size() && std::get<0>(scratch_[i]) == ci &&
               std::get<1>(scratch_[i]) == bin) {
            c += std::get<2>(scratch_[i]);
            ++i;
        }
        auto& cell = cells_[static_cast<size_t>(ci)];
        cell.counts_[static_cast<size_t>(bin)] += c;
        cell.sumsq_[static_cast<size_t>(bin)] += static_cast<double>(c) * static_cast<double>(c);
        cell.n_chords_ += c;
        union_bins.emplace_back(bin, c);
    }
    for (auto& c : cells_) ++c.n_lines_;
    std::sort(union_bins.begin(), union_bins.end());
    for (size_t i = 0; i < union_bins.size();) {
        int bin = union_bins[i].first;
        int64_t c = 0;
        while (i < union_bins.size() && union_bins[i].first == bin) {
            c += union_bins[i].second;
            ++i;
        }
        union_.counts_[static_cast<size_t>(bin)] += c;
        union_.sumsq_[static_cast<size_t>(bin)] += static_cast<double>(c) * static_cast<double>(c);
        union_.n_chords_ += c;
    }
    ++union_.n_lines_;
}

void accumulate_chord_matrix(const ZoneSet& zs, const BoundingSphere& domain, int64_t n_lines,
                             RngStream& rng, HistogramMatrix& matrix) {
    std::vector<TaggedCrossing> merged;
    for (int64_t i = 0; i < n_lines; ++i) {
        Line line = sample_kinematic_line(domain, rng);
        merged.clear();
        bool has_chord = false;
        for (int z = 0; z < zs.size(); ++z) {
            CrossingList xs = intersect_line(*zs.zone(z).body, line);
            for (size_t k = 0; k + 1 < xs.size(); k += 2)
                if (xs[k + 1] > xs[k]) has_chord = true;
            for (double t : xs) merged.push_back({t, z});
        }
        if (!has_chord) continue;  // tangent-only grazes carry no chord
        std::sort(merged.begin(), merged.end(),
                  [](const TaggedCrossing& a, const TaggedCrossing& b) {
                      return a.t != b.t ? a.t < b.t : a.zone < b.zone;
                  });
        matrix.record_line(merged);
    }
}

void accumulate_ray_matrix(const ZoneSet& zs, const std::vector<double>& zone_volumes,
                           int64_t n_rays, RngStream& rng, HistogramMatrix& matrix) {
    if (static_cast<int>(zone_volumes.size()) != zs.size())
        throw std::invalid_argument("zone volume count mismatch");
    double vtot = 0.0;
    for (double v : zone_volumes) vtot += v;
    for (int64_t done = 0; done < n_rays;) {
        // equivalent source density over all zones: pick a zone by volume
        double u = rng.uniform() * vtot;
        int z = 0;
        for (; z + 1 < zs.size(); ++z) {
            u -= zone_volumes[static_cast<size_t>(z)];
            if (u < 0.0) break;
        }
        Vec3 origin = sample_point_in_body(*zs.zone(z).body, rng);
        Vec3 dir = sample_isotropic_direction(rng);
        auto ray = tagged_ray_crossings(zs, origin, dir);
        if (!ray) continue;  // boundary graze: rejected sample
        matrix.record_ray(ray->source_zone, ray->crossings);
        ++done;
    }
}

namespace {

struct CellQuadrature {
    double integral = 0.0;
    double variance = 0.0;
};

template <typename WeightFn>
CellQuadrature integrate_cell_counts(const std::vector<int64_t>& counts,
                                     const std::vector<double>& sumsq, double bin_width,
                                     double denom, WeightFn&& weight) {
    CellQuadrature q;
    double scale = 1.0 / (denom * bin_width);
    for (size_t j = 0; j < counts.size(); ++j) {
        double mid = (static_cast<double>(j) + 0.5) * bin_width;
        double w = weight(mid) * bin_width;
        q.integral += static_cast<double>(counts[j]) * scale * w;
        double se = std::sqrt(sumsq[j]) * scale;
        q.variance += se * se * w * w;
    }
    return q;
}

}  // namespace

EstimateReport pair_integral_chord(const HistogramMatrix& matrix, const Kernel& kernel, int s,
                                   int t, const BodyMetrics& union_metrics, Normalizer norm) {
    if (matrix.mode() != DensityMode::Chord)
        throw std::invalid_argument("pair_integral_chord needs a chord-mode matrix");
    const SignedHistogram& uh = matrix.union_histogram();
    if (uh.n_chords() <= 0) throw std::runtime_error("matrix holds no chords");
    QuasiDensity qd_union = normalize_chord(uh);

    double s_hat;
    std::string norm_name;
    double s_hat_rel_err = 0.0;
    if (norm == Normalizer::SOver4) {
        if (!union_metrics.area)
            throw std::invalid_argument("S/4 normalizer requires analytic surface areas");
        s_hat = *union_metrics.area / 4.0;
        norm_name = "S-over-4";
    } else {
        s_hat = union_metrics.volume / qd_union.mean_length;
        s_hat_rel_err =
            union_metrics.volume > 0.0 ? union_metrics.volume_std_error / union_metrics.volume
                                       : 0.0;
        norm_name = "V-over-meanl";
    }

    const SignedHistogram& cell = matrix.cell(s, t);
    auto q = integrate_cell_counts(cell.counts(), cell.contribution_sq(), cell.bin_width(),
                                   static_cast<double>(uh.n_chords()),
                                   [&](double mid) { return kernel.I2(mid); });
    double factor = (s == t) ? 1.0 : 0.5;  // symmetric cell stores both orderings
    EstimateReport rep;
    rep.method = "pair-chord";
    rep.normalizer = norm_name;
    rep.n_samples = uh.n_lines();
    rep.value = s_hat * factor * q.integral;
    rep.std_error = std::sqrt(s_hat * s_hat * factor * factor * q.variance +
                              std::pow(s_hat_rel_err * rep.value, 2));
    return rep;
}

EstimateReport pair_integral_ray(const HistogramMatrix& matrix, const Kernel& kernel, int s,
                                 int t, const BodyMetrics& union_metrics) {
    if (matrix.mode() != DensityMode::Ray)
        throw std::invalid_argument("pair_integral_ray needs a ray-mode matrix");
    const SignedHistogram& uh = matrix.union_histogram();
    if (uh.n_lines() <= 0) throw std::runtime_error("matrix holds no rays");

    int nb = uh.n_bins();
    std::vector<int64_t> counts(static_cast<size_t>(nb), 0);
    std::vector<double> sumsq(static_cast<size_t>(nb), 0.0);
    double factor = 1.0;
    if (s == t) {
        counts = matrix.cell(s, s).counts();
        sumsq = matrix.cell(s, s).contribution_sq();
    } else {
        // H_st + H_ts; distinct source zones, so the variances add
        const auto& a = matrix.cell(s, t);
        const auto& b = matrix.cell(t, s);
        for (int j = 0; j < nb; ++j) {
            counts[static_cast<size_t>(j)] = a.counts()[j] + b.counts()[j];
            sumsq[static_cast<size_t>(j)] = a.contribution_sq()[j] + b.contribution_sq()[j];
        }
        factor = 0.5;
    }
    auto q = integrate_cell_counts(counts, sumsq, uh.bin_width(),
                                   static_cast<double>(uh.n_lines()),
                                   [&](double mid) { return kernel.I1(mid); });
    double w12 = union_metrics.volume;  // sum of zone volumes
    EstimateReport rep;
    rep.method = "pair-ray";
    rep.normalizer = "none";
    rep.n_samples = uh.n_lines();
    rep.value = w12 * factor * q.integral;
    double vol_term = union_metrics.volume_std_error * factor * q.integral;
    rep.std_error = std::sqrt(w12 * w12 * factor * factor * q.variance + vol_term * vol_term);
    return rep;
}

EstimateReport single_body_chord_run(const Body& body, const Kernel& kernel,
                                     const McRunParams& params, const std::string& stream_tag) {
    BoundingSphere domain = body.bounds();
    domain.radius *= 1.0 + 1e-6;
    double l_max = 2.0 * domain.radius * 1.0001;
    SignedHistogram hist(params.n_bins, l_max);
    RngStream rng(params.seed, stream_id(stream_tag));
    accumulate_chords(body, domain, params.n_lines, rng, hist);
    QuasiDensity qd = normalize_chord(hist);
    RngStream vol_rng(params.seed, stream_id(stream_tag + "/volume"));
    BodyMetrics metrics = measure_body(body, vol_rng, params.n_volume_samples);
    Kernel k = kernel.for_grid(l_max, params.n_bins);
    EstimateReport rep = chord_estimate(qd, k, metrics);
    rep.seed = params.seed;
    return rep;
}

OverlapDecomposition decompose_overlap(BodyPtr a, BodyPtr b, RngStream& rng, int64_t probes) {
    OverlapDecomposition plan;
    plan.union_body = make_union(a, b);
    if (!bodies_overlap(*a, *b, rng, probes)) {
        plan.disjoint = true;  // zero-volume intersection: disjoint path
        plan.a_exclusive = std::move(a);
        plan.b_exclusive = std::move(b);
        return plan;
    }
    plan.intersection_body = make_intersection(a, b);
    plan.a_exclusive = make_difference(a, b);
    plan.b_exclusive = make_difference(b, a);
    return plan;
}

namespace {

bool has_positive_volume(const Body& body, RngStream& rng, int64_t probes = 50'000) {
    return estimate_volume(body, probes, rng).value > 0.0;
}

}  // namespace

EstimateReport two_body_integral(BodyPtr a, BodyPtr b, const Kernel& kernel,
                                 const McRunParams& params) {
    RngStream probe_rng(params.seed, stream_id("two-body/overlap-probe"));
    OverlapDecomposition plan = decompose_overlap(a, b, probe_rng);

    EstimateReport rep;
    rep.method = plan.disjoint ? "two-body-subtraction" : "two-body-overlap-decomposition";
    rep.seed = params.seed;

    EstimateReport du = single_body_chord_run(*plan.union_body, kernel, params, "two-body/D-union");
    double value = du.value;
    double var = du.std_error * du.std_error;
    rep.n_samples = du.n_samples;

    if (!plan.disjoint) {
        EstimateReport di =
            single_body_chord_run(*plan.intersection_body, kernel, params, "two-body/D-isect");
        value += di.value;
        var += di.std_error * di.std_error;
        rep.n_samples += di.n_samples;
    }

    // exclusive parts can be empty when one body swallows the other
    auto subtract_part = [&](const BodyPtr& part, const char* tag) {
        RngStream vol_rng(params.seed, stream_id(std::string("two-body/empty-probe/") + tag));
        if (!plan.disjoint && !has_positive_volume(*part, vol_rng)) return;
        EstimateReport d = single_body_chord_run(*part, kernel, params,
                                                 std::string("two-body/D-") + tag);
        value -= d.value;
        var += d.std_error * d.std_error;
        rep.n_samples += d.n_samples;
    };
    subtract_part(plan.a_exclusive, "a");
    subtract_part(plan.b_exclusive, "b");

    rep.value = 0.5 * value;
    rep.std_error = 0.5 * std::sqrt(var);
    return rep;
}

SubtractionCheck subtraction_identity_check(BodyPtr a, BodyPtr b, const Kernel& kernel,
                                            const McRunParams& params) {
    SubtractionCheck check;

    ZoneSet zs({{"a", a}, {"b", b}});
    BoundingSphere domain = zs.bounding_sphere();
    double l_max = 2.0 * domain.radius * 1.0001;
    HistogramMatrix matrix(DensityMode::Chord, 2, params.n_bins, l_max);
    RngStream rng(params.seed, stream_id("subtraction/matrix"));
    accumulate_chord_matrix(zs, domain, params.n_lines, rng, matrix);

    RngStream vol_rng(params.seed, stream_id("subtraction/volume"));
    BodyMetrics union_metrics = measure_body(*zs.union_body(), vol_rng, params.n_volume_samples);
    Kernel k = kernel.for_grid(l_max, params.n_bins);
    check.pair_from_matrix = pair_integral_chord(matrix, k, 0, 1, union_metrics);

    check.d_union =
        single_body_chord_run(*zs.union_body(), kernel, params, "subtraction/D-union");
    check.d_a = single_body_chord_run(*a, kernel, params, "subtraction/D-a");
    check.d_b = single_body_chord_run(*b, kernel, params, "subtraction/D-b");

    check.identity.method = "subtraction-identity";
    check.identity.value = 0.5 * (check.d_union.value - check.d_a.value - check.d_b.value);
    check.identity.std_error =
        0.5 * std::sqrt(check.d_union.std_error * check.d_union.std_error +
                        check.d_a.std_error * check.d_a.std_error +
                        check.d_b.std_error * check.d_b.std_error);
    check.identity.seed = params.seed;
    check.z = z_score(check.pair_from_matrix, check.identity);
    return check;
}

}  // namespace chordmc
