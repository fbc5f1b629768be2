"""Smoke tests for the python bindings."""

import math

import pytest

import chordmc


def test_geometry_roundtrip():
    ball = chordmc.sphere((0, 0, 0), 1.0)
    assert ball.contains((0, 0, 0))
    assert not ball.contains((2, 0, 0))
    assert ball.volume == pytest.approx(4.0 / 3.0 * math.pi)
    assert ball.surface_area == pytest.approx(4.0 * math.pi)

    crossings = chordmc.intersect_line(ball, (0, 0, 0), (1, 0, 0))
    assert crossings == pytest.approx([-1.0, 1.0])

    lobes = chordmc.union_(ball, chordmc.sphere((4, 0, 0), 1.0))
    ray = chordmc.intersect_ray(lobes, (0, 0, 0), (1, 0, 0))
    assert ray == pytest.approx([1.0, 3.0, 5.0])
    assert chordmc.intersect_ray(ball, (2, 0, 0), (1, 0, 0)) is None


def test_csg_and_transforms():
    notched = chordmc.difference(
        chordmc.box((0, 0, 0), (1, 1, 1)),
        chordmc.box((0.4, 0.4, -1), (0.6, 0.6, 2)),
    )
    assert not notched.contains((0.5, 0.5, 0.5))
    moved = chordmc.translate(notched, (10, 0, 0))
    assert moved.contains((10.1, 0.1, 0.1))


def test_chord_pipeline_mean_chord():
    ball = chordmc.sphere((0, 0, 0), 1.0)
    hist = chordmc.SignedHistogram(128, 2.1)
    rng = chordmc.RngStream(7, 0)
    chordmc.accumulate_chords(ball, 100_000, hist, rng)
    qd = chordmc.normalize_chord(hist)
    assert qd.m_hat == 1.0
    assert chordmc.mean_chord(qd) == pytest.approx(4.0 / 3.0, rel=0.02)
    assert sum(v * qd.bin_width for v in qd.values) == pytest.approx(1.0, abs=1e-12)


def test_signed_recording_rules():
    hist = chordmc.SignedHistogram(8, 8.0)
    hist.record_line_chords([0.0, 1.0, 3.0, 5.0])
    counts = hist.counts
    assert counts[1] == 1 and counts[2] == 2 and counts[5] == 1
    assert counts[3] == -1 and counts[4] == -1
    assert hist.n_chords == 2


def test_estimates_agree_with_oracle():
    ball = chordmc.sphere((0, 0, 0), 1.0)
    kernel = chordmc.Kernel.exponential(1.0)
    rng = chordmc.RngStream(99, 0)
    metrics = chordmc.measure_body(ball, rng)

    l_max = 2.0 * 1.0001
    hist = chordmc.SignedHistogram(256, l_max)
    chordmc.accumulate_chords(ball, 200_000, hist, rng)
    chord = chordmc.chord_estimate(chordmc.normalize_chord(hist), kernel, metrics)

    oracle = chordmc.oracle_radial(ball, metrics, ball, kernel, 400_000, rng, l_max)
    combined = math.hypot(chord.std_error, oracle.std_error)
    assert abs(chord.value - oracle.value) < 3.0 * combined


def test_run_writes_reports(tmp_path):
    scene = tmp_path / "scene.json"
    scene.write_text(
        '{"bodies":[{"label":"ball","shape":'
        '{"type":"sphere","center":[0,0,0],"radius":1.0}}],'
        '"kernel":{"type":"exponential","sigma":1.0}}'
    )
    config = chordmc.RunConfig()
    config.scene_path = scene
    config.methods = ["chord", "oracle"]
    config.n_lines = 20_000
    config.n_rays = 20_000
    config.n_pairs = 1
    config.n_bins = 64
    config.seed = 5
    config.out_dir = tmp_path / "out"
    assert chordmc.run(config) == 0
    assert (tmp_path / "out" / "reports.json").exists()
    assert (tmp_path / "out" / "chord.hist.csv").exists()

    comparison = (tmp_path / "out" / "comparison.csv").read_text().splitlines()
    assert comparison[0] == "method_a,method_b,value_a,value_b,z_score"
    assert len(comparison) == 2  # one z-score row for the chord/oracle pair
