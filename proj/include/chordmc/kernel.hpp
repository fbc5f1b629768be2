#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace chordmc {

// Point kernel phi(x) for x >= 0 together with its antiderivatives
// I1(l) = integral_0^l phi(x) dx and I2(l) = integral_0^l I1(r) dr,
// analytic where possible, Simpson-tabulated otherwise. Immutable value
// object, freely shareable.
class Kernel {
public:
    static Kernel exponential(double sigma);
    static Kernel constant(double value = 1.0);

    // phi(x) = B(x) * sigma * exp(-sigma x) with polynomial build-up factor
    // B(x) = sum_k coeffs[k] x^k, B(0) = 1.
    static Kernel buildup(double sigma, std::vector<double> coeffs);

    // Arbitrary callable phi with antiderivatives tabulated by cumulative
    // Simpson on a grid aligned with the histogram bin midpoints (step is
    // bin width / 8).
    static Kernel tabulated(std::string name, std::function<double(double)> phi, double l_max,
                            int n_bins);

    // Linear interpolation of sampled (x, phi) points; phi is 0 beyond the
    // last sample. Antiderivatives tabulated as above.
    static Kernel from_samples(std::vector<double> xs, std::vector<double> phis, double l_max,
                               int n_bins);

    double phi(double x) const;
    double I1(double l) const;
    double I2(double l) const;

    bool has_analytic_antiderivatives() const;
    const std::string& name() const;

    // Same kernel with antiderivatives re-tabulated for a histogram grid;
    // no-op for analytic kernels.
    Kernel for_grid(double l_max, int n_bins) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    explicit Kernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
};

// Cumulative integral of uniformly spaced samples f[0..m] with step h,
// composite Simpson with the half-panel correction at odd nodes. Exact for
// cubics; returns values at every node, out[0] = 0.
std::vector<double> cumulative_simpson(const std::vector<double>& f, double h);

}  // namespace chordmc
