#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "chordmc/estimators.hpp"
#include "chordmc/kernel.hpp"
#include "chordmc/multibody.hpp"
#include "chordmc/runner.hpp"
#include "chordmc/sampling.hpp"

namespace py = pybind11;
using namespace chordmc;

namespace {

using Triple = std::array<double, 3>;

Vec3 to_vec(const Triple& a) { return {a[0], a[1], a[2]}; }
Triple from_vec(const Vec3& v) { return {v.x, v.y, v.z}; }

// python-facing value wrapper around the immutable body pointer
struct PyBody {
    BodyPtr ptr;
    const Body& ref() const { return *ptr; }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Monte Carlo point-kernel integrals over CSG solids via quasi-probability "
              "chord/ray length distributions";

    py::class_<PyBody>(m, "Body")
        .def("contains",
             [](const PyBody& b, const Triple& p) { return b.ref().contains(to_vec(p)); })
        .def("bounding_sphere",
             [](const PyBody& b) {
                 return py::make_tuple(from_vec(b.ref().bounds().center),
                                       b.ref().bounds().radius);
             })
        .def_property_readonly("volume",
                               [](const PyBody& b) { return b.ref().analytic_volume(); })
        .def_property_readonly("surface_area",
                               [](const PyBody& b) { return b.ref().analytic_area(); });

    m.def("sphere",
          [](const Triple& c, double r) { return PyBody{make_sphere(to_vec(c), r)}; },
          py::arg("center"), py::arg("radius"));
    m.def("box",
          [](const Triple& lo, const Triple& hi) {
              return PyBody{make_box(to_vec(lo), to_vec(hi))};
          },
          py::arg("lo"), py::arg("hi"));
    m.def("cylinder",
          [](const Triple& p0, const Triple& p1, double r) {
              return PyBody{make_cylinder(to_vec(p0), to_vec(p1), r)};
          },
          py::arg("p0"), py::arg("p1"), py::arg("radius"));
    m.def("union_",
          [](const PyBody& a, const PyBody& b) { return PyBody{make_union(a.ptr, b.ptr)}; },
          py::arg("a"), py::arg("b"));
    m.def("intersection",
          [](const PyBody& a, const PyBody& b) {
              return PyBody{make_intersection(a.ptr, b.ptr)};
          },
          py::arg("a"), py::arg("b"));
    m.def("difference",
          [](const PyBody& a, const PyBody& b) { return PyBody{make_difference(a.ptr, b.ptr)}; },
          py::arg("a"), py::arg("b"));
    m.def("translate",
          [](const PyBody& b, const Triple& off) { return PyBody{translate(b.ptr, to_vec(off))}; },
          py::arg("body"), py::arg("offset"));
    m.def("rotate",
          [](const PyBody& b, const Triple& axis, double angle_rad, const Triple& pivot) {
              return PyBody{rotate(b.ptr, to_vec(axis), angle_rad, to_vec(pivot))};
          },
          py::arg("body"), py::arg("axis"), py::arg("angle_rad"),
          py::arg("pivot") = Triple{0.0, 0.0, 0.0});

    m.def("intersect_line",
          [](const PyBody& b, const Triple& anchor, const Triple& dir) {
              return intersect_line(b.ref(), Line{to_vec(anchor), normalized(to_vec(dir))});
          },
          py::arg("body"), py::arg("anchor"), py::arg("direction"),
          "Sorted boundary crossing parameters, tangents duplicated.");
    m.def("intersect_ray",
          [](const PyBody& b, const Triple& origin, const Triple& dir) {
              return intersect_ray(b.ref(), to_vec(origin), normalized(to_vec(dir)));
          },
          py::arg("body"), py::arg("origin"), py::arg("direction"),
          "Positive boundary distances from an interior origin; None for a rejected sample.");

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<uint64_t, uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
        .def("uniform", [](RngStream& r) { return r.uniform(); });

    m.def("sample_isotropic_direction",
          [](RngStream& rng) { return from_vec(sample_isotropic_direction(rng)); });
    m.def("sample_point_in_body", [](const PyBody& b, RngStream& rng) {
        return from_vec(sample_point_in_body(b.ref(), rng));
    });
    m.def("estimate_volume",
          [](const PyBody& b, int64_t n, RngStream& rng) {
              auto v = estimate_volume(b.ref(), n, rng);
              return py::make_tuple(v.value, v.std_error);
          },
          py::arg("body"), py::arg("n"), py::arg("rng"));
    m.def("estimate_line_measure",
          [](const PyBody& b, int64_t n, RngStream& rng) {
              auto v = estimate_line_measure(b.ref(), n, rng);
              return py::make_tuple(v.value, v.std_error);
          },
          py::arg("body"), py::arg("n"), py::arg("rng"),
          "Invariant measure of lines meeting the body (pi*S for convex bodies).");

    py::class_<SignedHistogram>(m, "SignedHistogram")
        .def(py::init<int, double>(), py::arg("n_bins"), py::arg("l_max"))
        .def("record_ray",
             [](SignedHistogram& h, const std::vector<double>& xs) { h.record_ray(xs); })
        .def("record_line_chords",
             [](SignedHistogram& h, const std::vector<double>& xs) { h.record_line_chords(xs); })
        .def("merge", &SignedHistogram::merge)
        .def_property_readonly("counts", [](const SignedHistogram& h) { return h.counts(); })
        .def_property_readonly("n_lines", &SignedHistogram::n_lines)
        .def_property_readonly("n_chords", &SignedHistogram::n_chords)
        .def_property_readonly("l_max", &SignedHistogram::l_max)
        .def_property_readonly("bin_width", &SignedHistogram::bin_width);

    py::class_<QuasiDensity>(m, "QuasiDensity")
        .def_readonly("values", &QuasiDensity::values)
        .def_readonly("std_errors", &QuasiDensity::std_errors)
        .def_readonly("m_hat", &QuasiDensity::m_hat)
        .def_readonly("mean_length", &QuasiDensity::mean_length)
        .def_readonly("bin_width", &QuasiDensity::bin_width)
        .def("midpoint", &QuasiDensity::midpoint);

    m.def("normalize_chord", &normalize_chord);
    m.def("normalize_ray", &normalize_ray);
    m.def("mean_chord", &mean_chord);

    m.def("accumulate_chords",
          [](const PyBody& body, int64_t n_lines, SignedHistogram& hist, RngStream& rng) {
              BoundingSphere domain = body.ref().bounds();
              domain.radius *= 1.0 + 1e-6;
              accumulate_chords(body.ref(), domain, n_lines, rng, hist);
          },
          py::arg("body"), py::arg("n_lines"), py::arg("hist"), py::arg("rng"),
          "Sample kinematic lines over the body's bounding sphere and record chords.");
    m.def("accumulate_rays",
          [](const PyBody& body, int64_t n_rays, SignedHistogram& hist, RngStream& rng) {
              accumulate_rays(body.ref(), n_rays, rng, hist);
          },
          py::arg("body"), py::arg("n_rays"), py::arg("hist"), py::arg("rng"));

    py::class_<Kernel>(m, "Kernel")
        .def_static("exponential", &Kernel::exponential, py::arg("sigma"))
        .def_static("constant", &Kernel::constant, py::arg("value") = 1.0)
        .def_static("buildup", &Kernel::buildup, py::arg("sigma"), py::arg("coefficients"))
        .def_static("tabulated", &Kernel::tabulated, py::arg("name"), py::arg("phi"),
                    py::arg("l_max"), py::arg("n_bins"))
        .def("phi", &Kernel::phi)
        .def("I1", &Kernel::I1)
        .def("I2", &Kernel::I2)
        .def_property_readonly("name", &Kernel::name);

    py::class_<BodyMetrics>(m, "BodyMetrics")
        .def_readonly("volume", &BodyMetrics::volume)
        .def_readonly("volume_std_error", &BodyMetrics::volume_std_error)
        .def_readonly("area", &BodyMetrics::area);

    m.def("measure_body",
          [](const PyBody& b, RngStream& rng, int64_t n) { return measure_body(b.ref(), rng, n); },
          py::arg("body"), py::arg("rng"), py::arg("n_volume_samples") = 2'000'000);

    py::class_<EstimateReport>(m, "EstimateReport")
        .def_readonly("value", &EstimateReport::value)
        .def_readonly("std_error", &EstimateReport::std_error)
        .def_readonly("method", &EstimateReport::method)
        .def_readonly("n_samples", &EstimateReport::n_samples)
        .def_readonly("normalizer", &EstimateReport::normalizer)
        .def("__repr__", [](const EstimateReport& r) {
            return "<EstimateReport " + r.method + " value=" + std::to_string(r.value) +
                   " stderr=" + std::to_string(r.std_error) + ">";
        });

    py::enum_<Normalizer>(m, "Normalizer")
        .value("V_OVER_MEAN_LENGTH", Normalizer::VOverMeanLength)
        .value("S_OVER_4", Normalizer::SOver4);

    m.def("chord_estimate", &chord_estimate, py::arg("qd"), py::arg("kernel"), py::arg("metrics"),
          py::arg("normalizer") = Normalizer::VOverMeanLength);
    m.def("ray_estimate", &ray_estimate, py::arg("qd"), py::arg("kernel"), py::arg("metrics"));

    py::class_<DistanceHistogram>(m, "DistanceHistogram")
        .def(py::init<int, double>(), py::arg("n_bins"), py::arg("l_max"))
        .def("record", &DistanceHistogram::record)
        .def_property_readonly("counts", [](const DistanceHistogram& h) { return h.counts(); })
        .def_property_readonly("n_pairs", &DistanceHistogram::n_pairs);

    m.def("sample_distance_histogram",
          [](const PyBody& src, const PyBody& tgt, int64_t n_pairs, int n_bins, double l_max,
             RngStream& rng) {
              return sample_distance_histogram(src.ref(), tgt.ref(), n_pairs, n_bins, l_max, rng);
          },
          py::arg("src"), py::arg("tgt"), py::arg("n_pairs"), py::arg("n_bins"), py::arg("l_max"),
          py::arg("rng"));
    m.def("dd_estimate", &dd_estimate, py::arg("ddh"), py::arg("kernel"), py::arg("metrics"));

    m.def("oracle_radial",
          [](const PyBody& src, const BodyMetrics& sm, const PyBody& tgt, const Kernel& k,
             int64_t n, RngStream& rng, double l_max) {
              return oracle_radial(src.ref(), sm, tgt.ref(), k, n, rng, l_max);
          },
          py::arg("src"), py::arg("src_metrics"), py::arg("tgt"), py::arg("kernel"), py::arg("n"),
          py::arg("rng"), py::arg("l_max"));
    m.def("oracle_pairwise",
          [](const PyBody& src, const BodyMetrics& sm, const PyBody& tgt, const BodyMetrics& tm,
             const Kernel& k, int64_t n, RngStream& rng) {
              return oracle_pairwise(src.ref(), sm, tgt.ref(), tm, k, n, rng);
          },
          py::arg("src"), py::arg("src_metrics"), py::arg("tgt"), py::arg("tgt_metrics"),
          py::arg("kernel"), py::arg("n"), py::arg("rng"));

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("scene_path", &RunConfig::scene_path)
        .def_readwrite("methods", &RunConfig::methods)
        .def_readwrite("n_lines", &RunConfig::n_lines)
        .def_readwrite("n_rays", &RunConfig::n_rays)
        .def_readwrite("n_pairs", &RunConfig::n_pairs)
        .def_readwrite("n_bins", &RunConfig::n_bins)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("workers", &RunConfig::workers)
        .def_readwrite("out_dir", &RunConfig::out_dir);

    m.def("run", &run, py::arg("config"),
          "Batch run over a scene file; writes reports and histogram CSVs, returns the exit "
          "code (3 when any cross-method z-score exceeds 5).");
}
