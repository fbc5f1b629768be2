#include "chordmc/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace chordmc {

SignedHistogram::SignedHistogram(int n_bins, double l_max) : l_max_(l_max) {
    if (n_bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
    if (!(l_max > 0.0)) throw std::invalid_argument("l_max must be positive");
    width_ = l_max / n_bins;
    counts_.assign(n_bins, 0);
    sumsq_.assign(n_bins, 0.0);
}

int SignedHistogram::bin_index(double l) const {
    if (l > l_max_ || l < 0.0)
        throw std::runtime_error("length outside [0, l_max]; l_max must exceed the scene diameter");
    int j = static_cast<int>(l / width_);
    if (j >= static_cast<int>(counts_.size())) j = static_cast<int>(counts_.size()) - 1;
    return j;
}

void SignedHistogram::flush_line_scratch() {
    std::sort(scratch_.begin(), scratch_.end());
    for (size_t i = 0; i < scratch_.size();) {
        int bin = scratch_[i].first;
        int64_t c = 0;
        while (i < scratch_.size() && scratch_[i].first == bin) {
            c += scratch_[i].second;
            ++i;
        }
        counts_[bin] += c;
        sumsq_[bin] += static_cast<double>(c) * static_cast<double>(c);
    }
    scratch_.clear();
}

void SignedHistogram::record_ray(std::span<const double> crossings) {
    if (crossings.empty() || crossings.size() % 2 == 0)
        throw std::invalid_argument("ray recording expects an odd number of crossings");
    scratch_.clear();
    for (size_t k = 0; k < crossings.size(); ++k) {
        int sign = (k % 2 == 0) ? +1 : -1;  // 1-based odd index -> +1
        scratch_.emplace_back(bin_index(crossings[k]), sign);
        length_sum_ += sign * crossings[k];
    }
    flush_line_scratch();
    ++n_lines_;
}

void SignedHistogram::record_line_chords(std::span<const double> crossings) {
    size_t m = crossings.size();
    if (m < 2 || m % 2 != 0)
        throw std::invalid_argument("chord recording expects an even number of crossings (>= 2)");
    scratch_.clear();
    int64_t net = 0;
    for (size_t k = 1; k < m; ++k) {
        for (size_t j = 0; j < k; ++j) {
            double l = crossings[k] - crossings[j];
            if (l == 0.0) continue;  // coincident boundaries contribute nothing
            int sign = ((k - j) % 2 == 1) ? +1 : -1;
            scratch_.emplace_back(bin_index(l), sign);
            length_sum_ += sign * l;
            net += sign;
        }
    }
    flush_line_scratch();
    ++n_lines_;
    n_chords_ += net;  // equals the number of positive-length in-body chords
}

void SignedHistogram::merge(const SignedHistogram& other) {
    if (other.n_bins() != n_bins() || other.l_max_ != l_max_)
        throw std::invalid_argument("cannot merge histograms with different binning");
    for (int j = 0; j < n_bins(); ++j) {
        counts_[j] += other.counts_[j];
        sumsq_[j] += other.sumsq_[j];
    }
    n_lines_ += other.n_lines_;
    n_chords_ += other.n_chords_;
    length_sum_ += other.length_sum_;
}

int64_t SignedHistogram::total_count() const {
    int64_t s = 0;
    for (int64_t c : counts_) s += c;
    return s;
}

namespace {

QuasiDensity normalize(const SignedHistogram& hist, DensityMode mode, int64_t denom) {
    if (denom <= 0) throw std::runtime_error("histogram holds no data to normalize");
    QuasiDensity qd;
    qd.mode = mode;
    qd.l_max = hist.l_max();
    qd.bin_width = hist.bin_width();
    qd.n_lines = hist.n_lines();
    qd.n_chords = hist.n_chords();
    int nb = hist.n_bins();
    qd.values.resize(nb);
    qd.std_errors.resize(nb);
    double dn = static_cast<double>(denom);
    double scale = 1.0 / (dn * hist.bin_width());
    double mean_len = 0.0;
    for (int j = 0; j < nb; ++j) {
        qd.values[j] = static_cast<double>(hist.counts()[j]) * scale;
        // per-line contribution-square estimate; signed counts invalidate
        // the Poisson form
        qd.std_errors[j] = std::sqrt(hist.contribution_sq()[j]) * scale;
        mean_len += static_cast<double>(hist.counts()[j]) * hist.midpoint(j);
    }
    qd.mean_length = mean_len / dn;
    qd.m_hat = static_cast<double>(denom) / static_cast<double>(hist.n_lines());
    return qd;
}

}  // namespace

QuasiDensity normalize_chord(const SignedHistogram& hist) {
    return normalize(hist, DensityMode::Chord, hist.n_chords());
}

QuasiDensity normalize_ray(const SignedHistogram& hist) {
    // net gain per ray is +1, so the signed total equals the line counter
    return normalize(hist, DensityMode::Ray, hist.n_lines());
}

double mean_chord(const QuasiDensity& qd) { return qd.mean_length; }

BinDerivative finite_difference_derivative(const QuasiDensity& qd) {
    int nb = qd.n_bins();
    BinDerivative d;
    d.values.resize(nb);
    d.std_errors.resize(nb);
    auto& v = qd.values;
    auto& e = qd.std_errors;
    double h = qd.bin_width;
    for (int j = 0; j < nb; ++j) {
        if (j == 0) {
            d.values[j] = (v[1] - v[0]) / h;
            d.std_errors[j] = std::sqrt(e[1] * e[1] + e[0] * e[0]) / h;
        } else if (j == nb - 1) {
            d.values[j] = (v[j] - v[j - 1]) / h;
            d.std_errors[j] = std::sqrt(e[j] * e[j] + e[j - 1] * e[j - 1]) / h;
        } else {
            d.values[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
            d.std_errors[j] = std::sqrt(e[j + 1] * e[j + 1] + e[j - 1] * e[j - 1]) / (2.0 * h);
        }
    }
    return d;
}

DistanceHistogram::DistanceHistogram(int n_bins, double l_max) : l_max_(l_max) {
    if (n_bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
    if (!(l_max > 0.0)) throw std::invalid_argument("l_max must be positive");
    width_ = l_max / n_bins;
    counts_.assign(n_bins, 0);
}

void DistanceHistogram::record(double distance) {
    if (distance > l_max_ || distance < 0.0)
        throw std::runtime_error("distance outside [0, l_max]");
    int j = static_cast<int>(distance / width_);
    if (j >= static_cast<int>(counts_.size())) j = static_cast<int>(counts_.size()) - 1;
    ++counts_[j];
    ++n_pairs_;
}

void DistanceHistogram::merge(const DistanceHistogram& other) {
    if (other.n_bins() != n_bins() || other.l_max_ != l_max_)
        throw std::invalid_argument("cannot merge histograms with different binning");
    for (int j = 0; j < n_bins(); ++j) counts_[j] += other.counts_[j];
    n_pairs_ += other.n_pairs_;
}

double DistanceHistogram::density(int j) const {
    return static_cast<double>(counts_[j]) / (static_cast<double>(n_pairs_) * width_);
}

double DistanceHistogram::density_std_error(int j) const {
    return std::sqrt(static_cast<double>(counts_[j])) /
           (static_cast<double>(n_pairs_) * width_);
}

void write_histogram_csv(std::ostream& os, const SignedHistogram& hist, const QuasiDensity& qd,
                         uint64_t seed) {
    os << "# n_lines=" << hist.n_lines() << " n_chords=" << hist.n_chords()
       << " m_hat=" << qd.m_hat << " seed=" << seed << "\n";
    os << "bin_lo,bin_hi,signed_count,density,stderr\n";
    if (qd.values.empty()) return;  // no data: header-only file
    os.precision(17);
    for (int j = 0; j < hist.n_bins(); ++j) {
        os << j * hist.bin_width() << ',' << (j + 1) * hist.bin_width() << ','
           << hist.counts()[j] << ',' << qd.values[j] << ',' << qd.std_errors[j] << "\n";
    }
}

void write_distance_csv(std::ostream& os, const DistanceHistogram& hist, uint64_t seed) {
    os << "# n_pairs=" << hist.n_pairs() << " seed=" << seed << "\n";
    os << "bin_lo,bin_hi,count,density,stderr\n";
    os.precision(17);
    for (int j = 0; j < hist.n_bins(); ++j) {
        os << j * hist.bin_width() << ',' << (j + 1) * hist.bin_width() << ','
           << hist.counts()[j] << ',' << hist.density(j) << ',' << hist.density_std_error(j)
           << "\n";
    }
}

}  // namespace chordmc
