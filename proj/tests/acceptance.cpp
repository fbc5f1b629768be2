// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Sample counts and tolerances are pinned here, not

// calibrated afterwards.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chordmc/estimators.hpp"
#include "chordmc/multibody.hpp"
#include "chordmc/runner.hpp"
#include "chordmc/sampling.hpp"

using namespace chordmc;

namespace {

constexpr uint64_t kSeed = 987654321;

int g_failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
    std::printf("criterion %2d [%s]: %s  %s\n", criterion, name.c_str(), ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

struct SceneData {
    std::string name;
    BodyPtr body;
    BoundingSphere domain;
    double l_max = 0.0;
    SignedHistogram chords{2, 1.0};
    SignedHistogram rays{2, 1.0};
    DistanceHistogram dd{2, 1.0};
    BodyMetrics metrics;
    double chord_seconds = 0.0;
};

SceneData build_scene(const std::string& name, BodyPtr body, int64_t n_lines, int64_t n_rays,
                      int64_t n_pairs, int n_bins) {
    SceneData s;
    s.name = name;
    s.body = std::move(body);
    s.domain = scene_bounding_sphere({s.body});
    s.l_max = 2.0 * s.domain.radius * 1.0001;
    s.chords = SignedHistogram(n_bins, s.l_max);
    s.rays = SignedHistogram(n_bins, s.l_max);
    s.dd = DistanceHistogram(n_bins, s.l_max);

    RngStream chord_rng(kSeed, stream_id(name + "/chords"));
    auto t0 = std::chrono::steady_clock::now();
    accumulate_chords(*s.body, s.domain, n_lines, chord_rng, s.chords);
    s.chord_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    RngStream ray_rng(kSeed, stream_id(name + "/rays"));
    accumulate_rays(*s.body, n_rays, ray_rng, s.rays);

    RngStream dd_rng(kSeed, stream_id(name + "/dd"));
    for (int64_t i = 0; i < n_pairs; ++i) {
        Vec3 p1 = sample_point_in_body(*s.body, dd_rng);
        Vec3 p2 = sample_point_in_body(*s.body, dd_rng);
        s.dd.record(norm(p1 - p2));
    }

    RngStream vol_rng(kSeed, stream_id(name + "/volume"));
    s.metrics = measure_body(*s.body, vol_rng, 4'000'000);
    return s;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

BodyPtr make_two_lobes() {
    return make_union(make_sphere({0, 0, 0}, 1.0), make_sphere({4, 0, 0}, 1.0));
}

BodyPtr make_notched_box() {
    return make_difference(make_box({0, 0, 0}, {1, 1, 1}),
                           make_box({0.35, 0.35, 0.5}, {0.65, 0.65, 1.1}));
}

// ---- criteria ----

void criterion_1_cauchy(const SceneData& sphere, const SceneData& cube) {
    double mc_sphere = mean_chord(normalize_chord(sphere.chords));
    double mc_cube = mean_chord(normalize_chord(cube.chords));
    double runtime = sphere.chord_seconds + cube.chord_seconds;
    bool ok = std::abs(mc_sphere - 4.0 / 3.0) / (4.0 / 3.0) < 0.005 &&
              std::abs(mc_cube - 2.0 / 3.0) / (2.0 / 3.0) < 0.005 && runtime < 30.0;
    report(1, "Cauchy mean chord 4V/S", ok,
           "sphere " + fmt(mc_sphere) + " (want 4/3), cube " + fmt(mc_cube) +
               " (want 2/3), chord runtime " + fmt(runtime) + " s single-threaded");
}

void criterion_2_mcd_cauchy(const SceneData& lobes) {
    QuasiDensity qd = normalize_chord(lobes.chords);
    double mc = mean_chord(qd);
    bool ok = std::abs(mc - 4.0 / 3.0) / (4.0 / 3.0) < 0.005 && qd.m_hat > 1.0 && qd.m_hat < 2.0;
    report(2, "nonconvex MCD Cauchy", ok,
           "two disjoint unit spheres: mean chord " + fmt(mc) + " (want 4/3), m_hat " +
               fmt(qd.m_hat) + " in (1,2)");
}

void criterion_3_convex_nonnegative(const SceneData& sphere, const SceneData& cube) {
    bool ok = true;
    for (const SceneData* s : {&sphere, &cube}) {
        QuasiDensity qm = normalize_chord(s->chords);
        QuasiDensity qr = normalize_ray(s->rays);
        if (qm.m_hat != 1.0) ok = false;
        for (int64_t c : s->chords.counts())
            if (c < 0) ok = false;
        for (int64_t c : s->rays.counts())
            if (c < 0) ok = false;
        if (s->chords.n_chords() != s->chords.n_lines()) ok = false;
        (void)qr;
    }
    report(3, "convex specialization", ok,
           "all bins non-negative at count level, m_hat exactly 1 on sphere and cube");
}

void criterion_4_negative_density(const SceneData& lobes) {
    QuasiDensity qm = normalize_chord(lobes.chords);
    QuasiDensity qr = normalize_ray(lobes.rays);
    int neg_chord_bins = 0, neg_ray_bins = 0;
    double worst_chord = 0.0, worst_ray = 0.0;
    for (int j = 0; j < qm.n_bins(); ++j) {
        if (qm.std_errors[j] > 0.0 && qm.values[j] < -3.0 * qm.std_errors[j]) {
            ++neg_chord_bins;
            worst_chord = std::min(worst_chord, qm.values[j] / qm.std_errors[j]);
        }
        if (qr.std_errors[j] > 0.0 && qr.values[j] < -3.0 * qr.std_errors[j]) {
            ++neg_ray_bins;
            worst_ray = std::min(worst_ray, qr.values[j] / qr.std_errors[j]);
        }
    }
    bool ok = neg_chord_bins >= 1 && neg_ray_bins >= 1;
    report(4, "negative quasi-density", ok,
           "chord bins below -3 sigma: " + std::to_string(neg_chord_bins) + " (worst z " +
               fmt(worst_chord) + "), ray bins: " + std::to_string(neg_ray_bins) + " (worst z " +
               fmt(worst_ray) + ")");
}

void criterion_5_concordance(const std::vector<const SceneData*>& scenes) {
    auto kernel = Kernel::exponential(1.0);
    bool ok = true;
    std::string detail;
    for (const SceneData* s : scenes) {
        std::vector<EstimateReport> reps;
        reps.push_back(chord_estimate(normalize_chord(s->chords), kernel, s->metrics));
        reps.push_back(ray_estimate(normalize_ray(s->rays), kernel, s->metrics));
        reps.push_back(dd_estimate(s->dd, kernel, s->metrics));
        RngStream rng(kSeed, stream_id(s->name + "/oracle"));
        reps.push_back(
            oracle_radial(*s->body, s->metrics, *s->body, kernel, 2'000'000, rng, s->l_max));
        double worst = 0.0;
        for (size_t i = 0; i < reps.size(); ++i)
            for (size_t j = i + 1; j < reps.size(); ++j)
                worst = std::max(worst, z_score(reps[i], reps[j]));
        if (worst >= 3.0) ok = false;
        detail += s->name + " worst z " + fmt(worst) + " (oracle " + fmt(reps[3].value) + "); ";
    }
    report(5, "method concordance", ok, detail);
}

void criterion_6_normalizers(const std::vector<const SceneData*>& scenes) {
    auto kernel = Kernel::exponential(1.0);
    bool ok = true;
    std::string detail;
    for (const SceneData* s : scenes) {
        if (!s->metrics.area) continue;
        QuasiDensity qd = normalize_chord(s->chords);
        EstimateReport v_route = chord_estimate(qd, kernel, s->metrics);
        EstimateReport s_route = chord_estimate(qd, kernel, s->metrics, Normalizer::SOver4);
        double z = z_score(v_route, s_route);
        if (z >= 3.0) ok = false;
        detail += s->name + " z " + fmt(z) + "; ";
    }
    report(6, "normalizer concordance V/<l> vs S/4", ok, detail);
}

void criterion_7_derivative_chain(const std::vector<const SceneData*>& scenes) {
    bool ok = true;
    std::string detail;
    for (const SceneData* s : scenes) {
        QuasiDensity qm = normalize_chord(s->chords);
        QuasiDensity qr = normalize_ray(s->rays);
        BinDerivative d = finite_difference_derivative(qr);
        double mean_len = qm.mean_length;
        int occupied = 0, good = 0;
        for (int j = 1; j + 1 < qm.n_bins(); ++j) {
            if (s->chords.counts()[j] == 0 && s->rays.counts()[j] == 0) continue;
            ++occupied;
            double lhs = -mean_len * d.values[j];
            double se = std::hypot(mean_len * d.std_errors[j], qm.std_errors[j]);
            if (se == 0.0 ? lhs == qm.values[j] : std::abs(lhs - qm.values[j]) < 5.0 * se) ++good;
        }
        double frac = occupied > 0 ? static_cast<double>(good) / occupied : 0.0;
        if (frac < 0.95) ok = false;
        detail += s->name + " " + fmt(100.0 * frac) + "% of " + std::to_string(occupied) +
                  " bins; ";
    }
    report(7, "derivative chain -<l> rho' = mu", ok, detail);
}

void criterion_8_two_body() {
    auto kernel = Kernel::exponential(0.5);
    auto a = make_sphere({0, 0, 0}, 1.0);
    auto b = make_sphere({4, 0, 0}, 1.0);

    McRunParams params;
    params.n_lines = 1'000'000;
    params.n_bins = 512;
    params.seed = kSeed;
    params.n_volume_samples = 2'000'000;

    SubtractionCheck check = subtraction_identity_check(a, b, kernel, params);

    RngStream orng(kSeed, stream_id("accept/pairwise"));
    BodyMetrics ma{4.0 / 3.0 * kPi, 0.0, 4.0 * kPi};
    EstimateReport pairwise = oracle_pairwise(*a, ma, *b, ma, kernel, 2'000'000, orng);
    double z_oracle = z_score(check.pair_from_matrix, pairwise);

    // overlapping pair: half-shifted spheres against the radial oracle
    auto c = make_sphere({1.0, 0, 0}, 1.0);
    EstimateReport decomposed = two_body_integral(a, c, kernel, params);
    RngStream rrng(kSeed, stream_id("accept/overlap-radial"));
    double l_max = 2.0 * make_union(a, c)->bounds().radius * 1.01;
    EstimateReport radial = oracle_radial(*a, ma, *c, kernel, 2'000'000, rrng, l_max);
    double z_overlap = z_score(decomposed, radial);

    bool ok = check.z < 3.0 && z_oracle < 3.0 && z_overlap < 3.0;
    report(8, "two-body identities", ok,
           "pair vs subtraction z " + fmt(check.z) + ", vs pairwise oracle z " + fmt(z_oracle) +
               ", overlap decomposition vs radial oracle z " + fmt(z_overlap));
}

void criterion_9_exact_counts(const std::vector<const SceneData*>& scenes) {
    bool ok = true;
    std::string detail;

    // sum of signed bin counts equals the chord counter, per scene
    for (const SceneData* s : scenes) {
        if (s->chords.total_count() != s->chords.n_chords()) {
            ok = false;
            detail += s->name + " count sum mismatch; ";
        }
    }

    // per-line identity, checked through the integer pair coefficients:
    // every crossing must carry net coefficient (-1)^k -> alternating, which
    // makes the signed length sum equal the in-body chord sum identically
    auto lobes = make_two_lobes();
    BoundingSphere domain = scene_bounding_sphere({lobes});
    RngStream rng(kSeed, stream_id("accept/per-line"));
    int64_t checked = 0;
    for (int64_t i = 0; i < 200000 && checked < 20000; ++i) {
        Line line = sample_kinematic_line(domain, rng);
        CrossingList xs = intersect_line(*lobes, line);
        if (xs.size() < 2) continue;
        std::vector<int64_t> coeff(xs.size(), 0);
        for (size_t k = 1; k < xs.size(); ++k) {
            for (size_t j = 0; j < k; ++j) {
                if (xs[k] == xs[j]) continue;
                int sign = ((k - j) % 2 == 1) ? 1 : -1;
                coeff[k] += sign;
                coeff[j] -= sign;
            }
        }
        for (size_t k = 0; k < coeff.size(); ++k) {
            int64_t expect = (k % 2 == 1) ? 1 : -1;
            if (coeff[k] != expect) ok = false;
        }
        ++checked;
    }
    detail += "alternating coefficients on " + std::to_string(checked) + " lines; ";

    // matrix cells partition the union histogram, count for count, and the
    // union equals the elementwise cell sum
    ZoneSet zs({{"left", make_sphere({0, 0, 0}, 1.0)}, {"right", make_sphere({4, 0, 0}, 1.0)}});
    double l_max = 2.0 * domain.radius * 1.0001;
    HistogramMatrix matrix(DensityMode::Chord, 2, 256, l_max);
    RngStream mrng(kSeed, stream_id("accept/matrix"));
    accumulate_chord_matrix(zs, domain, 300000, mrng, matrix);
    SignedHistogram union_direct(256, l_max);
    RngStream urng(kSeed, stream_id("accept/matrix"));
    accumulate_chords(*zs.union_body(), domain, 300000, urng, union_direct);

    auto cell_sum = matrix.sum_of_cell_counts();
    bool partition_ok = true;
    for (int j = 0; j < 256; ++j) {
        if (cell_sum[j] != matrix.union_histogram().counts()[j]) partition_ok = false;
        if (union_direct.counts()[j] != matrix.union_histogram().counts()[j])
            partition_ok = false;
    }
    if (union_direct.n_chords() != matrix.union_histogram().n_chords()) partition_ok = false;
    if (!partition_ok) {
        ok = false;
        detail += "matrix partition mismatch; ";
    } else {
        detail += "matrix cells partition the union exactly";
    }
    report(9, "exact count identities", ok, detail);
}

void criterion_10_line_measure() {
    auto box = make_box({0, 0, 0}, {1, 1, 1});
    RngStream rng(kSeed, stream_id("accept/line-measure"));
    auto est = estimate_line_measure(*box, 10'000'000, rng);
    double expect = kPi * 6.0;
    double rel = std::abs(est.value - expect) / expect;
    bool ok = rel < 0.01;
    report(10, "line measure pi*S", ok,
           "unit cube: " + fmt(est.value) + " vs " + fmt(expect) + " (rel err " + fmt(rel) +
               ", 1e7 lines)");
}

void criterion_11_determinism() {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "chordmc_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "scene.json");
        f << R"({"bodies":[{"label":"ball","shape":{"type":"sphere","center":[0,0,0],)"
          << R"("radius":1.0}}],"kernel":{"type":"exponential","sigma":1.0}})";
    }
    RunConfig config;
    config.scene_path = dir / "scene.json";
    config.methods = {"chord", "ray", "dd", "oracle"};
    config.n_lines = 100000;
    config.n_rays = 100000;
    config.n_pairs = 100000;
    config.n_bins = 128;
    config.seed = kSeed;
    config.workers = 2;

    config.out_dir = dir / "a";
    int rc1 = run(config);
    config.out_dir = dir / "b";
    int rc2 = run(config);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    bool ok = rc1 == 0 && rc2 == 0;
    for (const char* name :
         {"chord.hist.csv", "ray.hist.csv", "dd.hist.csv", "comparison.csv"}) {
        std::string x = slurp(dir / "a" / name);
        std::string y = slurp(dir / "b" / name);
        if (x.empty() || x != y) ok = false;
    }
    fs::remove_all(dir);
    report(11, "determinism", ok, "two seeded runs produced byte-identical histogram CSVs");
}

}  // namespace

int main() {
    std::printf("building scene statistics (seed %llu)\n",
                static_cast<unsigned long long>(kSeed));
    const int64_t n_lines = 1'000'000, n_rays = 1'000'000, n_pairs = 1'000'000;
    const int n_bins = 512;

    SceneData sphere = build_scene("sphere", make_sphere({0, 0, 0}, 1.0), n_lines, n_rays,
                                   n_pairs, n_bins);
    SceneData cube =
        build_scene("cube", make_box({0, 0, 0}, {1, 1, 1}), n_lines, n_rays, n_pairs, n_bins);
    SceneData lobes = build_scene("two-lobe", make_two_lobes(), n_lines, n_rays, n_pairs, n_bins);
    SceneData notched =
        build_scene("box-with-notch", make_notched_box(), n_lines, n_rays, n_pairs, n_bins);

    std::vector<const SceneData*> all{&sphere, &cube, &lobes, &notched};
    std::vector<const SceneData*> with_area{&sphere, &cube, &lobes};
    std::vector<const SceneData*> chain{&sphere, &cube, &lobes};

    criterion_1_cauchy(sphere, cube);
    criterion_2_mcd_cauchy(lobes);
    criterion_3_convex_nonnegative(sphere, cube);
    criterion_4_negative_density(lobes);
    criterion_5_concordance(all);
    criterion_6_normalizers(with_area);
    criterion_7_derivative_chain(chain);
    criterion_8_two_body();
    criterion_9_exact_counts(all);
    criterion_10_line_measure();
    criterion_11_determinism();

    if (g_failures == 0)
        std::printf("acceptance: all criteria PASS\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
