#include "chordmc/estimators.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace chordmc {

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(Clock::now() - start_).count();
    }

private:
    using Clock = std::chrono::steady_clock;
    Clock::time_point start_ = Clock::now();
};

// running mean / variance (Welford)
struct Accumulator {
    int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double std_error_of_mean() const {
        if (n < 2) return 0.0;
        return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
};

}  // namespace

BodyMetrics measure_body(const Body& body, RngStream& rng, int64_t n_volume_samples) {
    BodyMetrics m;
    if (auto v = body.analytic_volume()) {
        m.volume = *v;
    } else {
        auto est = estimate_volume(body, n_volume_samples, rng);
        m.volume = est.value;
        m.volume_std_error = est.std_error;
    }
    m.area = body.analytic_area();
    return m;
}

EstimateReport chord_estimate(const QuasiDensity& qd, const Kernel& kernel,
                              const BodyMetrics& metrics, Normalizer norm) {
    Stopwatch timer;
    if (qd.mode != DensityMode::Chord)
        throw std::invalid_argument("chord_estimate needs a chord-mode density");
    EstimateReport rep;
    rep.method = "chord";
    rep.n_samples = qd.n_lines;

    double s_hat;
    double s_hat_rel_err = 0.0;
    if (norm == Normalizer::SOver4) {
        if (!metrics.area)
            throw std::invalid_argument("S/4 normalizer requires an analytic surface area");
        s_hat = *metrics.area / 4.0;
        rep.normalizer = "S-over-4";
    } else {
        if (!(qd.mean_length > 0.0))
            throw std::runtime_error("chord histogram has non-positive mean length");
        s_hat = metrics.volume / qd.mean_length;
        s_hat_rel_err = metrics.volume > 0.0 ? metrics.volume_std_error / metrics.volume : 0.0;
        rep.normalizer = "V-over-meanl";
    }

    double integral = 0.0, var = 0.0;
    double dl = qd.bin_width;
    for (int j = 0; j < qd.n_bins(); ++j) {
        double w = kernel.I2(qd.midpoint(j)) * dl;
        integral += qd.values[j] * w;
        var += qd.std_errors[j] * qd.std_errors[j] * w * w;
    }
    rep.value = s_hat * integral;
    // per-bin errors in quadrature plus the normalizer's volume error;
    // bin covariance ignored
    rep.std_error = std::sqrt(s_hat * s_hat * var +
                              (s_hat_rel_err * rep.value) * (s_hat_rel_err * rep.value));
    rep.runtime_seconds = timer.seconds();
    return rep;
}

EstimateReport ray_estimate(const QuasiDensity& qd, const Kernel& kernel,
                            const BodyMetrics& metrics) {
    Stopwatch timer;
    if (qd.mode != DensityMode::Ray)
        throw std::invalid_argument("ray_estimate needs a ray-mode density");
    EstimateReport rep;
    rep.method = "ray";
    rep.n_samples = qd.n_lines;
    rep.normalizer = "none";

    double integral = 0.0, var = 0.0;
    double dl = qd.bin_width;
    for (int j = 0; j < qd.n_bins(); ++j) {
        double w = kernel.I1(qd.midpoint(j)) * dl;
        integral += qd.values[j] * w;
        var += qd.std_errors[j] * qd.std_errors[j] * w * w;
    }
    rep.value = metrics.volume * integral;
    double vol_term = metrics.volume_std_error * integral;
    rep.std_error = std::sqrt(metrics.volume * metrics.volume * var + vol_term * vol_term);
    rep.runtime_seconds = timer.seconds();
    return rep;
}

EstimateReport dd_estimate(const DistanceHistogram& ddh, const Kernel& kernel,
                           const BodyMetrics& metrics) {
    Stopwatch timer;
    EstimateReport rep;
    rep.method = "dd";
    rep.n_samples = ddh.n_pairs();
    rep.normalizer = "none";

    double integral = 0.0, var = 0.0;
    double dl = ddh.bin_width();
    for (int j = 0; j < ddh.n_bins(); ++j) {
        double mid = ddh.midpoint(j);  // (j + 1/2) dl, never zero
        double w = kernel.phi(mid) / (4.0 * kPi * mid * mid) * dl;
        integral += ddh.density(j) * w;
        double se = ddh.density_std_error(j);
        var += se * se * w * w;
    }
    double v2 = metrics.volume * metrics.volume;
    rep.value = v2 * integral;
    double vol_term = 2.0 * metrics.volume * metrics.volume_std_error * integral;
    rep.std_error = std::sqrt(v2 * v2 * var + vol_term * vol_term);
    rep.runtime_seconds = timer.seconds();
    return rep;
}

EstimateReport oracle_radial(const Body& src, const BodyMetrics& src_metrics, const Body& tgt,
                             const Kernel& kernel, int64_t n, RngStream& rng, double l_max) {
    Stopwatch timer;
    if (n < 2) throw std::invalid_argument("oracle_radial needs n >= 2");
    if (!(l_max > 0.0)) throw std::invalid_argument("oracle_radial needs l_max > 0");
    Accumulator acc;
    double v = src_metrics.volume;
    for (int64_t i = 0; i < n; ++i) {
        Vec3 p = sample_point_in_body(src, rng);
        Vec3 w = sample_isotropic_direction(rng);
        double r = l_max * rng.uniform();
        double x = tgt.contains(p + w * r) ? v * l_max * kernel.phi(r) : 0.0;
        acc.add(x);
    }
    EstimateReport rep;
    rep.method = "oracle-radial";
    rep.n_samples = n;
    rep.value = acc.mean;
    double mc_err = acc.std_error_of_mean();
    double vol_term = v > 0.0 ? src_metrics.volume_std_error / v * acc.mean : 0.0;
    rep.std_error = std::sqrt(mc_err * mc_err + vol_term * vol_term);
    rep.runtime_seconds = timer.seconds();
    return rep;
}

bool bodies_overlap(const Body& a, const Body& b, RngStream& rng, int64_t probes) {
    const auto& sa = a.bounds();
    const auto& sb = b.bounds();
    if (norm(sa.center - sb.center) >= sa.radius + sb.radius) return false;
    for (int64_t i = 0; i < probes; ++i)
        if (b.contains(sample_point_in_body(a, rng))) return true;
    for (int64_t i = 0; i < probes; ++i)
        if (a.contains(sample_point_in_body(b, rng))) return true;
    return false;
}

EstimateReport oracle_pairwise(const Body& src, const BodyMetrics& src_metrics, const Body& tgt,
                               const BodyMetrics& tgt_metrics, const Kernel& kernel, int64_t n,
                               RngStream& rng) {
    Stopwatch timer;
    if (n < 2) throw std::invalid_argument("oracle_pairwise needs n >= 2");
    if (bodies_overlap(src, tgt, rng))
        throw std::runtime_error(
            "oracle_pairwise: bodies overlap (diverging variance); use oracle_radial");
    Accumulator acc;
    double vv = src_metrics.volume * tgt_metrics.volume;
    for (int64_t i = 0; i < n; ++i) {
        Vec3 p1 = sample_point_in_body(src, rng);
        Vec3 p2 = sample_point_in_body(tgt, rng);
        double r2 = norm2(p1 - p2);
        acc.add(vv * kernel.phi(std::sqrt(r2)) / (4.0 * kPi * r2));
    }
    EstimateReport rep;
    rep.method = "oracle-pairwise";
    rep.n_samples = n;
    rep.value = acc.mean;
    double mc_err = acc.std_error_of_mean();
    double rel = 0.0;
    if (src_metrics.volume > 0.0)
        rel += std::pow(src_metrics.volume_std_error / src_metrics.volume, 2);
    if (tgt_metrics.volume > 0.0)
        rel += std::pow(tgt_metrics.volume_std_error / tgt_metrics.volume, 2);
    rep.std_error = std::sqrt(mc_err * mc_err + rel * acc.mean * acc.mean);
    rep.runtime_seconds = timer.seconds();
    return rep;
}

double z_score(const EstimateReport& a, const EstimateReport& b) {
    double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    if (se == 0.0) return a.value == b.value ? 0.0 : INFINITY;
    return std::abs(a.value - b.value) / se;
}

DistanceHistogram sample_distance_histogram(const Body& src, const Body& tgt, int64_t n_pairs,
                                            int n_bins, double l_max, RngStream& rng) {
    DistanceHistogram h(n_bins, l_max);
    for (int64_t i = 0; i < n_pairs; ++i) {
        Vec3 p1 = sample_point_in_body(src, rng);
        Vec3 p2 = sample_point_in_body(tgt, rng);
        h.record(norm(p1 - p2));
    }
    return h;
}

}  // namespace chordmc
