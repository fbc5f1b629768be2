#include "chordmc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chordmc {

std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
    size_t m = f.size();
    if (m < 3) throw std::invalid_argument("cumulative_simpson needs at least 3 samples");
    if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
    std::vector<double> out(m, 0.0);
    for (size_t i = 2; i < m; i += 2)
        out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    // odd nodes: cubic Newton-Cotes partial steps keep cubic exactness
    for (size_t i = 1; i < m; i += 2) {
        if (m == 3) {
            out[i] = out[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
        } else if (i == 1) {
            out[i] = out[0] + h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        } else if (i + 1 < m) {
            out[i] = out[i - 1] +
                     h / 24.0 * (-f[i - 2] + 13.0 * f[i - 1] + 13.0 * f[i] - f[i + 1]);
        } else {
            out[i] = out[i - 1] +
                     h / 24.0 * (f[i - 3] - 5.0 * f[i - 2] + 19.0 * f[i - 1] + 9.0 * f[i]);
        }
    }
    return out;
}

struct Kernel::Impl {
    std::string name;
    std::function<double(double)> phi;
    std::function<double(double)> i1;
    std::function<double(double)> i2;
    bool analytic = false;

    double grid_h = 0.0;
    std::vector<double> tab_i1;
    std::vector<double> tab_i2;

    double interp(const std::vector<double>& tab, double l) const {
        if (l <= 0.0) return 0.0;
        double u = l / grid_h;
        auto last = static_cast<double>(tab.size() - 1);
        if (u >= last) return tab.back();
        auto k = static_cast<size_t>(u);
        double frac = u - static_cast<double>(k);
        return tab[k] + frac * (tab[k + 1] - tab[k]);
    }

    void build_tables(double l_max, int n_bins) {
        if (!(l_max > 0.0) || n_bins < 2)
            throw std::invalid_argument("bad grid for tabulated antiderivatives");
        grid_h = l_max / n_bins / 8.0;  // bin midpoints fall on grid nodes
        size_t m = static_cast<size_t>(n_bins) * 8 + 1;
        std::vector<double> samples(m);
        for (size_t i = 0; i < m; ++i) {
            double v = phi(static_cast<double>(i) * grid_h);
            if (!std::isfinite(v))
                throw std::runtime_error("kernel evaluation produced a non-finite value");
            samples[i] = v;
        }
        tab_i1 = cumulative_simpson(samples, grid_h);
        tab_i2 = cumulative_simpson(tab_i1, grid_h);
    }
};

namespace {

// E_k(l) = integral_0^l x^k exp(-sigma x) dx
double exp_moment(int k, double sigma, double l) {
    double sl = sigma * l;
    if (sl < 0.5) {
        // alternating series avoids the cancellation of the closed form
        double sum = 0.0;
        double term = std::pow(l, k + 1);  // m = 0
        double fact = 1.0;
        for (int m = 0; m < 40; ++m) {
            double contrib = term / (fact * (k + m + 1));
            sum += contrib;
            if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
            term *= -sigma * l;
            fact *= (m + 1);
        }
        return sum;
    }
    double poly = 1.0, t = 1.0, kfac = 1.0;
    for (int i = 1; i <= k; ++i) {
        t *= sl / i;
        poly += t;
        kfac *= i;
    }
    return kfac / std::pow(sigma, k + 1) * (1.0 - std::exp(-sl) * poly);
}

}  // namespace

Kernel Kernel::exponential(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("exponential kernel needs sigma > 0");
    auto impl = std::make_shared<Impl>();
    impl->name = "exponential(sigma=" + std::to_string(sigma) + ")";
    impl->analytic = true;
    impl->phi = [sigma](double x) { return sigma * std::exp(-sigma * x); };
    impl->i1 = [sigma](double l) { return -std::expm1(-sigma * l); };
    impl->i2 = [sigma](double l) { return l + std::expm1(-sigma * l) / sigma; };
    return Kernel(impl);
}

Kernel Kernel::constant(double value) {
    auto impl = std::make_shared<Impl>();
    impl->name = "constant(" + std::to_string(value) + ")";
    impl->analytic = true;
    impl->phi = [value](double) { return value; };
    impl->i1 = [value](double l) { return value * l; };
    impl->i2 = [value](double l) { return 0.5 * value * l * l; };
    return Kernel(impl);
}

Kernel Kernel::buildup(double sigma, std::vector<double> coeffs) {
    if (!(sigma > 0.0)) throw std::invalid_argument("buildup kernel needs sigma > 0");
    if (coeffs.empty() || coeffs[0] != 1.0)
        throw std::invalid_argument("build-up polynomial must satisfy B(0) = 1");
    auto impl = std::make_shared<Impl>();
    impl->name = "buildup(sigma=" + std::to_string(sigma) + ")";
    impl->analytic = true;
    impl->phi = [sigma, coeffs](double x) {
        double b = 0.0;
        for (size_t k = coeffs.size(); k-- > 0;) b = b * x + coeffs[k];
        return b * sigma * std::exp(-sigma * x);
    };
    impl->i1 = [sigma, coeffs](double l) {
        double s = 0.0;
        for (size_t k = 0; k < coeffs.size(); ++k)
            s += coeffs[k] * exp_moment(static_cast<int>(k), sigma, l);
        return sigma * s;
    };
    impl->i2 = [sigma, coeffs](double l) {
        // integral of E_k: (k!/sigma^{k+1}) [l - sum_i (sigma^i / i!) E_i(l)]
        int kmax = static_cast<int>(coeffs.size()) - 1;
        std::vector<double> em(kmax + 1);
        for (int i = 0; i <= kmax; ++i) em[i] = exp_moment(i, sigma, l);
        double s = 0.0;
        double kfac = 1.0;
        for (int k = 0; k <= kmax; ++k) {
            if (k > 0) kfac *= k;
            double inner = l;
            double ifac = 1.0, spow = 1.0;
            for (int i = 0; i <= k; ++i) {
                if (i > 0) {
                    ifac *= i;
                    spow *= sigma;
                }
                inner -= spow / ifac * em[i];
            }
            s += coeffs[k] * kfac / std::pow(sigma, k + 1) * inner;
        }
        return sigma * s;
    };
    return Kernel(impl);
}

Kernel Kernel::tabulated(std::string name, std::function<double(double)> phi, double l_max,
                         int n_bins) {
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->phi = std::move(phi);
    impl->build_tables(l_max, n_bins);
    return Kernel(impl);
}

Kernel Kernel::from_samples(std::vector<double> xs, std::vector<double> phis, double l_max,
                            int n_bins) {
    if (xs.size() != phis.size() || xs.size() < 2)
        throw std::invalid_argument("kernel table needs >= 2 (x, phi) samples");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw std::invalid_argument("kernel table x values must be ascending");
    auto phi = [xs = std::move(xs), phis = std::move(phis)](double x) {
        if (x <= xs.front()) return phis.front();
        if (x >= xs.back()) return 0.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        size_t k = static_cast<size_t>(it - xs.begin()) - 1;
        double f = (x - xs[k]) / (xs[k + 1] - xs[k]);
        return phis[k] + f * (phis[k + 1] - phis[k]);
    };
    return tabulated("table", std::move(phi), l_max, n_bins);
}

double Kernel::phi(double x) const { return impl_->phi(x); }

double Kernel::I1(double l) const {
    if (impl_->analytic) return impl_->i1(l);
    if (impl_->tab_i1.empty()) throw std::logic_error("kernel has no antiderivative tables");
    return impl_->interp(impl_->tab_i1, l);
}

double Kernel::I2(double l) const {
    if (impl_->analytic) return impl_->i2(l);
    if (impl_->tab_i2.empty()) throw std::logic_error("kernel has no antiderivative tables");
    return impl_->interp(impl_->tab_i2, l);
}

bool Kernel::has_analytic_antiderivatives() const { return impl_->analytic; }

const std::string& Kernel::name() const { return impl_->name; }

Kernel Kernel::for_grid(double l_max, int n_bins) const {
    if (impl_->analytic) return *this;
    auto impl = std::make_shared<Impl>(*impl_);
    impl->build_tables(l_max, n_bins);
    return Kernel(impl);
}

}  // namespace chordmc
