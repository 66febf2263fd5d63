"""Softmax codec: reference layout, encode/decode, and roundtrip accuracy."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from novact.codec import (
    CodecSpec,
    JointTrajectory,
    build_reference_points,
    decode_softmax,
    decode_trajectory,
    encode_analog,
    encode_frame,
    encode_trajectory,
)
from novact.dataset import SynthConfig, synthesize_boxing_set, training_stats
from novact.errors import AllZero, DegenerateRange, DimensionMismatch


def scalar_roundtrip_error(lo, hi, units=10, sigma=0.5, samples=2001):
    """Oracle: worst |decode(encode(x)) - x| over a dense sweep of the range."""
    refs = np.linspace(lo, hi, units)
    worst = 0.0
    for x in np.linspace(lo, hi, samples):
        err = abs(decode_softmax(encode_analog(x, refs, sigma), refs) - x)
        worst = max(worst, err)
    return worst


class TestReferencePoints:
    def test_linear_spacing_over_observed_range(self):
        traj = JointTrajectory(values=np.linspace([0.0], [0.9], 11), name="ramp")
        spec = build_reference_points([traj], units=10)
        np.testing.assert_allclose(spec.references[0], np.arange(10) * 0.1, atol=1e-12)

    def test_default_width_is_80(self, boxing_set):
        spec = build_reference_points(boxing_set)
        assert spec.references.shape == (8, 10)
        assert spec.width == 80

    def test_constant_joint_raises(self):
        values = np.zeros((5, 2))
        values[:, 0] = np.linspace(0, 1, 5)
        with pytest.raises(DegenerateRange):
            build_reference_points([JointTrajectory(values=values, name="c")])


class TestEncode:
    def test_two_unit_example(self):
        # distance to the far reference equals the spacing, so its weight
        # is exp(-1/sigma) = exp(-2) at sigma = 0.5
        out = encode_analog(0.0, np.array([0.0, 1.0]), sigma=0.5)
        expected = np.array([1.0, math.exp(-2.0)]) / (1.0 + math.exp(-2.0))
        np.testing.assert_allclose(out, expected, atol=1e-12)
        np.testing.assert_allclose(out, [0.8808, 0.1192], atol=5e-5)

    def test_midpoint_is_symmetric(self):
        out = encode_analog(0.5, np.array([0.0, 1.0]), sigma=0.5)
        np.testing.assert_allclose(out, [0.5, 0.5], atol=1e-12)

    @given(st.floats(min_value=-2.0, max_value=2.0))
    @settings(max_examples=100, deadline=None)
    def test_output_is_probability_vector(self, x):
        # strictly positive within double precision up to a few spacings
        # beyond the span; farther out the smallest units underflow to 0
        out = encode_analog(x, np.linspace(-1.0, 1.0, 10), sigma=0.5)
        assert np.all(out > 0)
        assert abs(out.sum() - 1.0) < 1e-9

    def test_out_of_range_values_encode(self):
        refs = np.linspace(0.0, 1.0, 10)
        out = encode_analog(7.5, refs, sigma=0.5)
        assert np.all(out >= 0)
        assert abs(out.sum() - 1.0) < 1e-9

    def test_continuity(self):
        refs = np.linspace(-0.4, 0.4, 10)
        rng = np.random.default_rng(5)
        for x in rng.uniform(-0.4, 0.4, size=50):
            a = encode_analog(x, refs, 0.5)
            b = encode_analog(x + 1e-6, refs, 0.5)
            assert np.max(np.abs(a - b)) <= 1e-4


class TestDecode:
    def test_one_hot_decodes_to_reference_exactly(self):
        refs = np.linspace(-0.3, 0.6, 10)
        for j in range(10):
            vec = np.zeros(10)
            vec[j] = 1.0
            assert decode_softmax(vec, refs) == refs[j]

    def test_uniform_decodes_to_mean(self):
        refs = np.linspace(-1.0, 1.0, 10)
        assert abs(decode_softmax(np.full(10, 0.1), refs) - refs.mean()) < 1e-12

    def test_renormalizes_filtered_input(self):
        refs = np.linspace(0.0, 1.0, 4)
        vec = np.array([0.0, 0.2, 0.2, 0.0])
        assert abs(decode_softmax(vec, refs) - 0.5) < 1e-12

    def test_all_zero_raises(self):
        with pytest.raises(AllZero):
            decode_softmax(np.zeros(10), np.linspace(0, 1, 10))


class TestRoundtrip:
    def test_scalar_roundtrip_below_tolerance_on_training_ranges(self, boxing_set):
        stats = training_stats(boxing_set)
        for lo, hi in zip(stats.joint_min, stats.joint_max):
            assert scalar_roundtrip_error(lo, hi) <= 1e-2

    def test_error_scales_with_reference_spacing(self):
        # worst-case error is ~0.12 * spacing at the range edges
        err = scalar_roundtrip_error(0.0, 0.9)
        assert 0.8e-2 <= err <= 1.2e-2

    def test_trajectory_roundtrip(self, boxing_set):
        spec = build_reference_points(boxing_set)
        for _, traj in boxing_set.patterns:
            back = decode_trajectory(encode_trajectory(traj, spec), spec)
            assert np.max(np.abs(back.values - traj.values)) <= 1e-2


class TestTrajectoryCodec:
    def test_shapes(self, boxing_set):
        spec = build_reference_points(boxing_set)
        label, traj = boxing_set.patterns[0]
        seq = encode_trajectory(traj, spec)
        assert seq.values.shape == (traj.steps, 80)

    def test_blocks_sum_to_one(self, boxing_set):
        spec = build_reference_points(boxing_set)
        seq = encode_trajectory(boxing_set.patterns[0][1], spec)
        sums = seq.values.reshape(seq.steps, 8, 10).sum(axis=2)
        np.testing.assert_allclose(sums, 1.0, atol=1e-9)

    def test_dimension_mismatch(self, boxing_set):
        spec = build_reference_points(boxing_set)
        bad = JointTrajectory(values=np.zeros((5, 3)) + np.linspace(0, 1, 5)[:, None], name="bad")
        with pytest.raises(DimensionMismatch):
            encode_trajectory(bad, spec)

    def test_empty_trajectory_rejected(self):
        with pytest.raises(DimensionMismatch):
            JointTrajectory(values=np.zeros((0, 8)), name="empty")

    def test_encode_frame_matches_trajectory_row(self, boxing_set):
        spec = build_reference_points(boxing_set)
        traj = boxing_set.patterns[2][1]
        seq = encode_trajectory(traj, spec)
        np.testing.assert_array_equal(encode_frame(traj.values[0], spec), seq.values[0])
