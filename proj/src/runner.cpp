#include "chordmc/runner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "chordmc/estimators.hpp"
#include "chordmc/sampling.hpp"

namespace chordmc {

namespace {

using nlohmann::json;

// Deterministic worker-parallel accumulation: worker w draws its share from
// stream (seed, hash(tag, w)); partial states merge in worker order, so a
// fixed (seed, workers) pair reproduces results bit for bit.
template <typename State, typename Work, typename Merge>
State parallel_mc(int workers, uint64_t seed, const std::string& tag, int64_t n,
                  const State& prototype, Work work, Merge merge_into) {
    if (workers <= 1) {
        State state = prototype;
        RngStream rng(seed, stream_id(tag, 0));
        work(state, rng, n);
        return state;
    }
    std::vector<State> states(static_cast<size_t>(workers), prototype);
    std::vector<std::thread> pool;
    int64_t base = n / workers;
    int64_t rem = n % workers;
    for (int w = 0; w < workers; ++w) {
        int64_t count = base + (w < rem ? 1 : 0);
        pool.emplace_back([&, w, count] {
            RngStream rng(seed, stream_id(tag, static_cast<uint64_t>(w)));
            work(states[static_cast<size_t>(w)], rng, count);
        });
    }
    for (auto& t : pool) t.join();
    for (int w = 1; w < workers; ++w) merge_into(states[0], states[static_cast<size_t>(w)]);
    return states[0];
}

EstimateReport combine_worker_reports(const std::vector<EstimateReport>& parts) {
    EstimateReport rep = parts.front();
    double total_n = 0.0;
    for (const auto& p : parts) total_n += static_cast<double>(p.n_samples);
    double value = 0.0, var = 0.0, runtime = 0.0;
    for (const auto& p : parts) {
        double w = static_cast<double>(p.n_samples) / total_n;
        value += w * p.value;
        var += w * w * p.std_error * p.std_error;
        runtime = std::max(runtime, p.runtime_seconds);
    }
    rep.value = value;
    rep.std_error = std::sqrt(var);
    rep.n_samples = static_cast<int64_t>(total_n);
    rep.runtime_seconds = runtime;
    return rep;
}

json report_to_json(const EstimateReport& r) {
    return json{{"method", r.method},     {"value", r.value},
                {"stderr", r.std_error},  {"n_samples", r.n_samples},
                {"normalizer", r.normalizer}, {"seed", r.seed},
                {"runtime_seconds", r.runtime_seconds}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
    out << text;
}

std::string sanitize(const std::string& label) {
    std::string s = label;
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return s;
}

}  // namespace

int run(const RunConfig& config) {
    if (config.n_lines < 1 || config.n_rays < 1 || config.n_pairs < 1)
        throw std::invalid_argument("sample counts must be >= 1");
    if (config.n_bins < 2) throw std::invalid_argument("n_bins must be >= 2");
    if (config.workers < 1) throw std::invalid_argument("workers must be >= 1");

    Scene scene = load_scene(config.scene_path);
    const ZoneSet& zones = scene.zones;
    const int m = zones.size();
    BodyPtr union_body = zones.union_body();
    BoundingSphere domain = zones.bounding_sphere();

    double diameter = 2.0 * domain.radius;
    double l_max = diameter * 1.0001;
    if (config.l_max_override) {
        if (*config.l_max_override < diameter)
            throw std::invalid_argument("l_max override is below the scene diameter");
        l_max = *config.l_max_override;
    }

    Kernel kernel = make_kernel(scene.kernel_spec, l_max, config.n_bins);

    std::filesystem::create_directories(config.out_dir);

    // zone metrics and (disjoint) union metrics
    RngStream metrics_rng(config.seed, stream_id("metrics"));
    std::vector<BodyMetrics> zone_metrics;
    for (int z = 0; z < m; ++z)
        zone_metrics.push_back(measure_body(*zones.zone(z).body, metrics_rng));

    if (m > 1) {
        RngStream overlap_rng(config.seed, stream_id("overlap-probe"));
        auto overlaps = zones.overlapping_pairs(overlap_rng);
        if (!overlaps.empty())
            throw std::runtime_error(
                "zones '" + zones.zone(overlaps[0].first).label + "' and '" +
                zones.zone(overlaps[0].second).label +
                "' overlap; decompose the pair (union/intersection subtraction) instead");
    }

    BodyMetrics union_metrics;
    if (m == 1) {
        union_metrics = zone_metrics[0];
    } else {
        double var = 0.0;
        bool all_areas = true;
        double area_sum = 0.0;
        for (const auto& zm : zone_metrics) {
            union_metrics.volume += zm.volume;
            var += zm.volume_std_error * zm.volume_std_error;
            if (zm.area)
                area_sum += *zm.area;
            else
                all_areas = false;
        }
        union_metrics.volume_std_error = std::sqrt(var);
        if (all_areas) union_metrics.area = area_sum;
    }

    auto wants = [&](const std::string& method) {
        return std::find(config.methods.begin(), config.methods.end(), method) !=
               config.methods.end();
    };

    std::vector<EstimateReport> union_reports;  // cross-method comparable D(phi)
    json extra_reports = json::array();

    // ---- chord method ----
    if (wants("chord")) {
        if (m == 1) {
            SignedHistogram proto(config.n_bins, l_max);
            const Body& body = *zones.zone(0).body;
            auto hist = parallel_mc(
                config.workers, config.seed, "chord", config.n_lines, proto,
                [&](SignedHistogram& h, RngStream& rng, int64_t n) {
                    accumulate_chords(body, domain, n, rng, h);
                },
                [](SignedHistogram& a, const SignedHistogram& b) { a.merge(b); });
            QuasiDensity qd;
            if (hist.n_lines() > 0) qd = normalize_chord(hist);
            std::ostringstream csv;
            write_histogram_csv(csv, hist, qd, config.seed);
            write_text_file(config.out_dir / "chord.hist.csv", csv.str());

            if (hist.n_lines() > 0) {
                EstimateReport rep = chord_estimate(qd, kernel, union_metrics);
                rep.seed = config.seed;
                union_reports.push_back(rep);
                if (union_metrics.area) {
                    EstimateReport s4 =
                        chord_estimate(qd, kernel, union_metrics, Normalizer::SOver4);
                    s4.seed = config.seed;
                    s4.method = "chord-S4";
                    extra_reports.push_back(report_to_json(s4));
                    extra_reports.back()["discrepancy_vs_V_over_meanl"] = s4.value - rep.value;
                }
            }
        } else {
            HistogramMatrix proto(DensityMode::Chord, m, config.n_bins, l_max);
            auto matrix = parallel_mc(
                config.workers, config.seed, "chord", config.n_lines, proto,
                [&](HistogramMatrix& mtx, RngStream& rng, int64_t n) {
                    accumulate_chord_matrix(zones, domain, n, rng, mtx);
                },
                [](HistogramMatrix& a, const HistogramMatrix& b) { a.merge(b); });

            QuasiDensity qd = normalize_chord(matrix.union_histogram());
            std::ostringstream csv;
            write_histogram_csv(csv, matrix.union_histogram(), qd, config.seed);
            write_text_file(config.out_dir / "chord.hist.csv", csv.str());

            EstimateReport rep = chord_estimate(qd, kernel, union_metrics);
            rep.seed = config.seed;
            union_reports.push_back(rep);
            if (union_metrics.area) {
                EstimateReport s4 = chord_estimate(qd, kernel, union_metrics, Normalizer::SOver4);
                s4.seed = config.seed;
                s4.method = "chord-S4";
                extra_reports.push_back(report_to_json(s4));
                extra_reports.back()["discrepancy_vs_V_over_meanl"] = s4.value - rep.value;
            }

            json manifest;
            manifest["labels"] = json::array();
            for (int z = 0; z < m; ++z) manifest["labels"].push_back(zones.zone(z).label);
            manifest["n_lines"] = matrix.union_histogram().n_lines();
            manifest["n_chords_union"] = matrix.union_histogram().n_chords();
            manifest["normalizer_V"] = union_metrics.volume;
            manifest["normalizer_mean_chord"] = qd.mean_length;
            if (union_metrics.area) manifest["normalizer_S"] = *union_metrics.area;
            manifest["cells"] = json::array();
            for (int s = 0; s < m; ++s) {
                for (int t = s; t < m; ++t) {
                    std::string name = "chord_cell_" + sanitize(zones.zone(s).label) + "_" +
                                       sanitize(zones.zone(t).label) + ".hist.csv";
                    const SignedHistogram& cell = matrix.cell(s, t);
                    // cell densities use the union normalization
                    QuasiDensity cell_qd;
                    cell_qd.mode = DensityMode::Chord;
                    cell_qd.l_max = cell.l_max();
                    cell_qd.bin_width = cell.bin_width();
                    cell_qd.n_lines = matrix.union_histogram().n_lines();
                    cell_qd.n_chords = matrix.union_histogram().n_chords();
                    cell_qd.m_hat = qd.m_hat;
                    cell_qd.mean_length = qd.mean_length;
                    double denom =
                        static_cast<double>(matrix.union_histogram().n_chords()) *
                        cell.bin_width();
                    cell_qd.values.resize(static_cast<size_t>(cell.n_bins()));
                    cell_qd.std_errors.resize(static_cast<size_t>(cell.n_bins()));
                    for (int j = 0; j < cell.n_bins(); ++j) {
                        cell_qd.values[static_cast<size_t>(j)] =
                            static_cast<double>(cell.counts()[j]) / denom;
                        cell_qd.std_errors[static_cast<size_t>(j)] =
                            std::sqrt(cell.contribution_sq()[j]) / denom;
                    }
                    std::ostringstream cell_csv;
                    write_histogram_csv(cell_csv, cell, cell_qd, config.seed);
                    write_text_file(config.out_dir / name, cell_csv.str());
                    EstimateReport pair = pair_integral_chord(matrix, kernel, s, t, union_metrics);
                    pair.seed = config.seed;
                    json pj = report_to_json(pair);
                    pj["source"] = zones.zone(s).label;
                    pj["target"] = zones.zone(t).label;
                    extra_reports.push_back(pj);
                    manifest["cells"].push_back(json{{"s", zones.zone(s).label},
                                                     {"t", zones.zone(t).label},
                                                     {"file", name},
                                                     {"net_count", cell.n_chords()}});
                }
            }
            write_text_file(config.out_dir / "chord_matrix_manifest.json", manifest.dump(2) + "\n");
        }
    }

    // ---- ray method ----
    if (wants("ray")) {
        if (m == 1) {
            SignedHistogram proto(config.n_bins, l_max);
            const Body& body = *zones.zone(0).body;
            auto hist = parallel_mc(
                config.workers, config.seed, "ray", config.n_rays, proto,
                [&](SignedHistogram& h, RngStream& rng, int64_t n) {
                    accumulate_rays(body, n, rng, h);
                },
                [](SignedHistogram& a, const SignedHistogram& b) { a.merge(b); });
            QuasiDensity qd = normalize_ray(hist);
            std::ostringstream csv;
            write_histogram_csv(csv, hist, qd, config.seed);
            write_text_file(config.out_dir / "ray.hist.csv", csv.str());
            EstimateReport rep = ray_estimate(qd, kernel, union_metrics);
            rep.seed = config.seed;
            union_reports.push_back(rep);
        } else {
            std::vector<double> volumes;
            for (const auto& zm : zone_metrics) volumes.push_back(zm.volume);
            HistogramMatrix proto(DensityMode::Ray, m, config.n_bins, l_max);
            auto matrix = parallel_mc(
                config.workers, config.seed, "ray", config.n_rays, proto,
                [&](HistogramMatrix& mtx, RngStream& rng, int64_t n) {
                    accumulate_ray_matrix(zones, volumes, n, rng, mtx);
                },
                [](HistogramMatrix& a, const HistogramMatrix& b) { a.merge(b); });
            QuasiDensity qd = normalize_ray(matrix.union_histogram());
            std::ostringstream csv;
            write_histogram_csv(csv, matrix.union_histogram(), qd, config.seed);
            write_text_file(config.out_dir / "ray.hist.csv", csv.str());
            EstimateReport rep = ray_estimate(qd, kernel, union_metrics);
            rep.seed = config.seed;
            union_reports.push_back(rep);
            for (int s = 0; s < m; ++s) {
                for (int t = s; t < m; ++t) {
                    EstimateReport pair = pair_integral_ray(matrix, kernel, s, t, union_metrics);
                    pair.seed = config.seed;
                    json pj = report_to_json(pair);
                    pj["source"] = zones.zone(s).label;
                    pj["target"] = zones.zone(t).label;
                    extra_reports.push_back(pj);
                }
            }
        }
    }

    // ---- distance-distribution method ----
    if (wants("dd")) {
        DistanceHistogram proto(config.n_bins, l_max);
        auto hist = parallel_mc(
            config.workers, config.seed, "dd", config.n_pairs, proto,
            [&](DistanceHistogram& h, RngStream& rng, int64_t n) {
                for (int64_t i = 0; i < n; ++i) {
                    Vec3 p1 = sample_point_in_body(*union_body, rng);
                    Vec3 p2 = sample_point_in_body(*union_body, rng);
                    h.record(norm(p1 - p2));
                }
            },
            [](DistanceHistogram& a, const DistanceHistogram& b) { a.merge(b); });
        std::ostringstream csv;
        write_distance_csv(csv, hist, config.seed);
        write_text_file(config.out_dir / "dd.hist.csv", csv.str());
        EstimateReport rep = dd_estimate(hist, kernel, union_metrics);
        rep.seed = config.seed;
        union_reports.push_back(rep);
    }

    // ---- radial oracle ----
    if (wants("oracle")) {
        std::vector<EstimateReport> parts;
        int64_t base = config.n_rays / config.workers;
        int64_t rem = config.n_rays % config.workers;
        for (int w = 0; w < config.workers; ++w) {
            int64_t count = base + (w < rem ? 1 : 0);
            if (count < 2) continue;
            RngStream rng(config.seed, stream_id("oracle", static_cast<uint64_t>(w)));
            parts.push_back(
                oracle_radial(*union_body, union_metrics, *union_body, kernel, count, rng, l_max));
        }
        if (parts.empty())
            throw std::invalid_argument("oracle needs at least 2 samples per worker");
        EstimateReport rep = combine_worker_reports(parts);
        rep.seed = config.seed;
        union_reports.push_back(rep);

        if (m > 1) {
            for (int s = 0; s < m; ++s) {
                for (int t = s + 1; t < m; ++t) {
                    RngStream rng(config.seed, stream_id("oracle-pairwise/" +
                                                         std::to_string(s) + "/" +
                                                         std::to_string(t)));
                    EstimateReport pair = oracle_pairwise(
                        *zones.zone(s).body, zone_metrics[static_cast<size_t>(s)],
                        *zones.zone(t).body, zone_metrics[static_cast<size_t>(t)], kernel,
                        config.n_pairs, rng);
                    pair.seed = config.seed;
                    json pj = report_to_json(pair);
                    pj["source"] = zones.zone(s).label;
                    pj["target"] = zones.zone(t).label;
                    extra_reports.push_back(pj);
                }
            }
        }
    }

    // ---- comparison table over the union estimates ----
    double max_z = 0.0;
    std::ostringstream cmp;
    cmp.precision(17);
    cmp << "method_a,method_b,value_a,value_b,z_score\n";
    for (size_t i = 0; i < union_reports.size(); ++i) {
        for (size_t j = i + 1; j < union_reports.size(); ++j) {
            double z = z_score(union_reports[i], union_reports[j]);
            max_z = std::max(max_z, z);
            cmp << union_reports[i].method << ',' << union_reports[j].method << ','
                << union_reports[i].value << ',' << union_reports[j].value << ',' << z << "\n";
        }
    }
    write_text_file(config.out_dir / "comparison.csv", cmp.str());

    json out;
    out["seed"] = config.seed;
    out["workers"] = config.workers;
    out["scene_hash"] = scene_hash(scene);
    out["scene"] = emit_scene(scene);
    out["kernel"] = kernel.name();
    out["l_max"] = l_max;
    out["n_bins"] = config.n_bins;
    out["reports"] = json::array();
    for (const auto& r : union_reports) out["reports"].push_back(report_to_json(r));
    out["pair_reports"] = extra_reports;
    out["max_cross_method_z"] = max_z;
    write_text_file(config.out_dir / "reports.json", out.dump(2) + "\n");

    return max_z > 5.0 ? 3 : 0;
}

}  // namespace chordmc
