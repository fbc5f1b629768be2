#include <doctest.h>

#include <cmath>
#include <vector>

#include "chordmc/kernel.hpp"

using namespace chordmc;

namespace {

// quadrature oracle, independent of the Kernel internals
double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("exponential kernel closed forms") {
    auto k = Kernel::exponential(2.0);
    CHECK(k.I1(0.0) == 0.0);
    CHECK(k.I2(0.0) == 0.0);
    CHECK(k.I1(100.0) == doctest::Approx(1.0));
    CHECK(k.I2(100.0) / 100.0 == doctest::Approx(1.0).epsilon(1e-2));

    for (double l : {0.1, 0.7, 1.9, 4.2}) {
        double i1 = simpson([&](double x) { return k.phi(x); }, 0.0, l);
        double i2 = simpson([&](double r) { return k.I1(r); }, 0.0, l);
        CHECK(k.I1(l) == doctest::Approx(i1).epsilon(1e-10));
        CHECK(k.I2(l) == doctest::Approx(i2).epsilon(1e-10));
    }
}

TEST_CASE("constant kernel") {
    auto k = Kernel::constant();
    CHECK(k.phi(3.0) == 1.0);
    CHECK(k.I1(3.0) == 3.0);
    CHECK(k.I2(3.0) == doctest::Approx(4.5));
    auto zero = Kernel::constant(0.0);
    CHECK(zero.phi(1.0) == 0.0);
    CHECK(zero.I2(5.0) == 0.0);
}

TEST_CASE("buildup kernel matches quadrature and the linear closed form") {
    double sigma = 1.3, b = 0.8;
    auto k = Kernel::buildup(sigma, {1.0, b});
    for (double l : {0.05, 0.3, 1.1, 2.7, 6.0}) {
        double i1_quad = simpson([&](double x) { return k.phi(x); }, 0.0, l);
        CHECK(k.I1(l) == doctest::Approx(i1_quad).epsilon(1e-9));
        double i2_quad = simpson([&](double r) { return k.I1(r); }, 0.0, l);
        CHECK(k.I2(l) == doctest::Approx(i2_quad).epsilon(1e-9));
        // closed form for B(x) = 1 + b x
        double closed = (1.0 - std::exp(-sigma * l)) +
                        b * (1.0 / sigma - std::exp(-sigma * l) * (l + 1.0 / sigma));
        CHECK(k.I1(l) == doctest::Approx(closed).epsilon(1e-12));
    }

    // B == 1 reduces to the exponential kernel
    auto plain = Kernel::buildup(2.0, {1.0});
    auto expk = Kernel::exponential(2.0);
    for (double l : {0.2, 1.0, 3.0}) {
        CHECK(plain.I1(l) == doctest::Approx(expk.I1(l)).epsilon(1e-12));
        CHECK(plain.I2(l) == doctest::Approx(expk.I2(l)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(Kernel::buildup(1.0, {2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Kernel::buildup(1.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(Kernel::buildup(-1.0, {1.0}), std::invalid_argument);
}

TEST_CASE("quadratic buildup stays accurate at small arguments") {
    auto k = Kernel::buildup(0.7, {1.0, 0.4, 0.05});
    for (double l : {1e-6, 1e-3, 0.05, 0.4}) {
        double i1_quad = simpson([&](double x) { return k.phi(x); }, 0.0, l);
        CHECK(k.I1(l) == doctest::Approx(i1_quad).epsilon(1e-8));
    }
}

TEST_CASE("cumulative Simpson on known integrands") {
    int n = 80;
    double h = 1.0 / n;
    std::vector<double> ones(n + 1, 1.0), cubes(n + 1), quads(n + 1);
    for (int i = 0; i <= n; ++i) {
        double x = i * h;
        cubes[i] = x * x * x;
        quads[i] = x * x;
    }
    auto i_ones = cumulative_simpson(ones, h);
    auto i_cubes = cumulative_simpson(cubes, h);
    auto i_quads = cumulative_simpson(quads, h);
    for (int i = 0; i <= n; ++i) {
        double x = i * h;
        CHECK(i_ones[i] == doctest::Approx(x).epsilon(1e-14));
        CHECK(i_cubes[i] == doctest::Approx(x * x * x * x / 4.0).epsilon(1e-12));
        CHECK(i_quads[i] == doctest::Approx(x * x * x / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("tabulated antiderivatives track the analytic ones") {
    double l_max = 4.0;
    int n_bins = 256;
    auto exact = Kernel::exponential(1.0);
    auto tab = Kernel::tabulated("exp-tab", [&](double x) { return exact.phi(x); }, l_max, n_bins);
    CHECK(!tab.has_analytic_antiderivatives());
    for (int j = 0; j < n_bins; ++j) {
        double mid = (j + 0.5) * l_max / n_bins;
        CHECK(tab.I1(mid) == doctest::Approx(exact.I1(mid)).epsilon(1e-8));
        CHECK(tab.I2(mid) == doctest::Approx(exact.I2(mid)).epsilon(1e-8));
    }

    auto sq = Kernel::tabulated("x^2", [](double x) { return x * x; }, 3.0, 128);
    for (double l : {0.75, 1.5, 2.25})
        CHECK(sq.I1(l) == doctest::Approx(l * l * l / 3.0).epsilon(1e-10));
}

TEST_CASE("sampled tables interpolate and clip") {
    std::vector<double> xs{0.0, 1.0, 2.0};
    std::vector<double> ph{1.0, 0.5, 0.0};
    auto k = Kernel::from_samples(xs, ph, 4.0, 64);
    CHECK(k.phi(0.5) == doctest::Approx(0.75));
    CHECK(k.phi(3.0) == 0.0);  // beyond the table support
    CHECK(k.I1(4.0) == doctest::Approx(1.0).epsilon(1e-6));  // area of the triangle-ish table

    CHECK_THROWS_AS(Kernel::from_samples({0.0}, {1.0}, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(Kernel::from_samples({1.0, 0.0}, {1.0, 2.0}, 1.0, 8), std::invalid_argument);
}

TEST_CASE("finite differences recover the integrand chain") {
    double h = 1e-4;
    for (auto k :
         {Kernel::exponential(1.5), Kernel::constant(), Kernel::buildup(0.9, {1.0, 0.3})}) {
        for (double l : {0.5, 1.5, 3.0}) {
            double d_i2 = (k.I2(l + h) - k.I2(l - h)) / (2 * h);
            CHECK(d_i2 == doctest::Approx(k.I1(l)).epsilon(1e-6));
            double d_i1 = (k.I1(l + h) - k.I1(l - h)) / (2 * h);
            CHECK(d_i1 == doctest::Approx(k.phi(l)).epsilon(1e-6));
        }
    }

    // tabulated kernels: differencing on their own grid nodes
    double l_max = 5.0;
    int n_bins = 512;
    auto tab =
        Kernel::tabulated("t", [](double x) { return std::exp(-x) * (1 + x); }, l_max, n_bins);
    double grid_h = l_max / n_bins / 8.0;
    for (int node : {100, 1000, 2000, 3500}) {
        double l = node * grid_h;
        double d_i2 = (tab.I2(l + grid_h) - tab.I2(l - grid_h)) / (2 * grid_h);
        CHECK(d_i2 == doctest::Approx(tab.I1(l)).epsilon(1e-6));
        double d_i1 = (tab.I1(l + grid_h) - tab.I1(l - grid_h)) / (2 * grid_h);
        CHECK(d_i1 == doctest::Approx(tab.phi(l)).epsilon(1e-6));
    }
}
