"""Monte Carlo point-kernel integrals over CSG solids.

Reduces six-dimensional point-kernel integrals to one-dimensional integrals
against sampled chord- and ray-length quasi-probability distributions, with
independent oracles for verification.
"""

from chordmc._core import (  # noqa: F401
    Body,
    BodyMetrics,
    DistanceHistogram,
    EstimateReport,
    Kernel,
    Normalizer,
    QuasiDensity,
    RngStream,
    RunConfig,
    SignedHistogram,
    accumulate_chords,
    accumulate_rays,
    box,
    chord_estimate,
    cylinder,
    dd_estimate,
    difference,
    estimate_line_measure,
    estimate_volume,
    intersect_line,
    intersect_ray,
    intersection,
    mean_chord,
    measure_body,
    normalize_chord,
    normalize_ray,
    oracle_pairwise,
    oracle_radial,
    ray_estimate,
    rotate,
    run,
    sample_distance_histogram,
    sample_isotropic_direction,
    sample_point_in_body,
    sphere,
    translate,
    union_,
)

__version__ = "0.1.0"
