#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chordmc {

// Integer-signed bin counts over [0, l_max] plus the two counters of the
// sampling scheme: the number of contributing lines (or rays) and the net
// signed total, which for chord recording equals the number of in-body
// chords. Counts stay exact 64-bit integers until normalization so the
// count-level identities hold with no tolerance.
class SignedHistogram {
public:
    SignedHistogram(int n_bins, double l_max);

    // Ray rule: crossing distances 0 < l1 < l2 < ... (odd count for an
    // interior origin); the k-th crossing adds +1 for odd k, -1 for even k.
    void record_ray(std::span<const double> crossings);

    // Chord rule: boundary params x0 <= ... <= x_{2n-1}; every ordered pair
    // (x_j, x_k), j < k contributes sign (-1)^(k-j+1) at length x_k - x_j.
    // Zero-length pairs are skipped. Net gain per line is the number of
    // positive-length in-body chords.
    void record_line_chords(std::span<const double> crossings);

    void merge(const SignedHistogram& other);

    int n_bins() const { return static_cast<int>(counts_.size()); }
    double l_max() const { return l_max_; }
    double bin_width() const { return width_; }
    double midpoint(int j) const { return (j + 0.5) * width_; }
    int64_t n_lines() const { return n_lines_; }
    int64_t n_chords() const { return n_chords_; }
    const std::vector<int64_t>& counts() const { return counts_; }
    const std::vector<double>& contribution_sq() const { return sumsq_; }
    int64_t total_count() const;
    double signed_length_sum() const { return length_sum_; }

    // floor(l / bin_width); l == l_max lands in the last bin, l > l_max throws.
    int bin_index(double l) const;

private:
    friend class HistogramMatrix;
    void flush_line_scratch();

    double l_max_;
    double width_;
    std::vector<int64_t> counts_;
    std::vector<double> sumsq_;  // sum over lines of (per-line bin contribution)^2
    int64_t n_lines_ = 0;
    int64_t n_chords_ = 0;
    double length_sum_ = 0.0;  // signed sum of recorded lengths
    std::vector<std::pair<int, int>> scratch_;
};

enum class DensityMode { Chord, Ray };

// Normalized signed density: integral over [0, l_max] is exactly 1.
struct QuasiDensity {
    DensityMode mode = DensityMode::Chord;
    double l_max = 0.0;
    double bin_width = 0.0;
    std::vector<double> values;
    std::vector<double> std_errors;
    double m_hat = 0.0;        // chords per line (1 for convex bodies)
    double mean_length = 0.0;  // multi-chord mean (chord mode) / mean signed ray length
    int64_t n_lines = 0;
    int64_t n_chords = 0;

    double midpoint(int j) const { return (j + 0.5) * bin_width; }
    int n_bins() const { return static_cast<int>(values.size()); }
};

QuasiDensity normalize_chord(const SignedHistogram& hist);
QuasiDensity normalize_ray(const SignedHistogram& hist);

double mean_chord(const QuasiDensity& qd);

// Central finite differences of the density at bin midpoints (one-sided at
// the ends), with the propagated per-bin standard error.
struct BinDerivative {
    std::vector<double> values;
    std::vector<double> std_errors;
};
BinDerivative finite_difference_derivative(const QuasiDensity& qd);

// Plain non-negative histogram of pair distances (distance distribution).
class DistanceHistogram {
public:
    DistanceHistogram(int n_bins, double l_max);
    void record(double distance);
    void merge(const DistanceHistogram& other);

    int n_bins() const { return static_cast<int>(counts_.size()); }
    double l_max() const { return l_max_; }
    double bin_width() const { return width_; }
    double midpoint(int j) const { return (j + 0.5) * width_; }
    int64_t n_pairs() const { return n_pairs_; }
    const std::vector<int64_t>& counts() const { return counts_; }

    double density(int j) const;
    double density_std_error(int j) const;

private:
    double l_max_;
    double width_;
    std::vector<int64_t> counts_;
    int64_t n_pairs_ = 0;
};

// CSV export: metadata line, column header, one row per bin.
void write_histogram_csv(std::ostream& os, const SignedHistogram& hist, const QuasiDensity& qd,
                         uint64_t seed);
void write_distance_csv(std::ostream& os, const DistanceHistogram& hist, uint64_t seed);

}  // namespace chordmc
