import numpy as np
import pytest

from steplacer.context import (
    Frame,
    FrameWindow,
    GazeTarget,
    HandSample,
    HandTarget,
    MotionScript,
    MotionSegment,
    TraceError,
    eye_midpoint,
    frame_from_json,
    frame_to_json,
    gaze_angular_speeds,
    frame_weights_from_speeds,
    gaze_forward,
    generate_synthetic_trace,
    get_frame_weights,
    minmax_normalize,
)
from steplacer.geometry import Ray, Vec3
from steplacer.importance import project_joints


def gaze_frame(t, left_dir=(0, 0, 1), right_dir=(0, 0, 1), left_org=(0, 0, 0), right_org=(0.06, 0, 0)):
    return Frame(
        t=t,
        gaze_left=Ray(Vec3.from_seq(left_org), Vec3.from_seq(left_dir).normalized()),
        gaze_right=Ray(Vec3.from_seq(right_org), Vec3.from_seq(right_dir).normalized()),
        left=HandSample.missing(),
        right=HandSample.missing(),
    )


def rotated_dir(deg):
    a = np.radians(deg)
    return (np.sin(a), 0.0, np.cos(a))


class TestFrameBasics:
    def test_eye_midpoint(self):
        f = gaze_frame(0.0)
        assert eye_midpoint(f).as_tuple() == pytest.approx((0.03, 0, 0))

    def test_gaze_forward_identical(self):
        f = gaze_frame(0.0)
        assert gaze_forward(f).as_tuple() == pytest.approx((0, 0, 1))

    def test_gaze_forward_mean(self):
        f = gaze_frame(0.0, left_dir=(1, 0, 0), right_dir=(0, 1, 0))
        s = np.sqrt(2) / 2
        assert gaze_forward(f).as_tuple() == pytest.approx((s, s, 0))

    def test_degenerate_gaze(self):
        f = gaze_frame(0.0, left_dir=(0, 0, 1), right_dir=(0, 0, -1))
        with pytest.raises(TraceError):
            gaze_forward(f)

    def test_window_needs_two_frames(self):
        with pytest.raises(TraceError):
            FrameWindow([gaze_frame(0.0)])

    def test_window_needs_increasing_time(self):
        with pytest.raises(TraceError):
            FrameWindow([gaze_frame(0.0), gaze_frame(0.0)])


class TestAngularSpeeds:
    def test_static_gaze_is_zero(self):
        w = FrameWindow([gaze_frame(0.1 * i) for i in range(5)])
        v_left, v_right = gaze_angular_speeds(w)
        assert np.allclose(v_left, 0.0)
        assert np.allclose(v_right, 0.0)

    def test_nine_degrees_in_tenth_second(self):
        w = FrameWindow([gaze_frame(0.0), gaze_frame(0.1, left_dir=rotated_dir(9), right_dir=rotated_dir(9))])
        v_left, v_right = gaze_angular_speeds(w)
        assert v_left[1] == pytest.approx(90.0, abs=1e-9)
        assert v_right[1] == pytest.approx(90.0, abs=1e-9)
        assert v_left[0] == v_left[1]  # first frame copies its successor

    def test_alternating_rotate_hold_matches_hand_quotients(self):
        angles = [0, 10, 10, 25, 25]
        times = [0.0, 0.1, 0.3, 0.4, 0.8]
        w = FrameWindow(
            [gaze_frame(t, left_dir=rotated_dir(a), right_dir=rotated_dir(a)) for t, a in zip(times, angles)]
        )
        v_left, _ = gaze_angular_speeds(w)
        expected = [100.0, 100.0, 0.0, 150.0, 0.0]
        assert np.allclose(v_left, expected, atol=1e-9)


def reference_frame_weights(v_left, v_right, t):
    """Straight-line re-implementation used as the oracle."""
    n = len(t)
    w_speed = np.array([(abs(v_left[i]) + abs(v_right[i])) / 2 for i in range(n)])
    w_time = np.array([(t[i] - t[0]) / (t[-1] - t[0]) for i in range(n)])

    def mmn(x):
        if x.max() == x.min():
            return np.zeros_like(x)
        return (x - x.min()) / (x.max() - x.min())

    raw = (1 - mmn(w_speed)) * mmn(w_time)
    if raw.sum() <= 0:
        return np.full(n, 1.0 / n)
    return raw / raw.sum()


class TestFrameWeights:
    def test_two_frames_equal_speed(self):
        w = FrameWindow(
            [gaze_frame(0.0), gaze_frame(1.0, left_dir=rotated_dir(5), right_dir=rotated_dir(5))]
        )
        # equal speeds (frame 0 copies frame 1): speed carries no signal
        assert np.allclose(get_frame_weights(w), [0.0, 1.0], atol=1e-12)

    def test_three_frames_hand_computed(self):
        # speeds min-max to [1, 0, 0] over uniform timestamps -> [0, 1/3, 2/3]
        weights = frame_weights_from_speeds(
            np.array([10.0, 0.0, 0.0]), np.array([10.0, 0.0, 0.0]), np.array([0.0, 1.0, 2.0])
        )
        assert np.allclose(weights, [0.0, 1 / 3, 2 / 3], atol=1e-12)

    def test_sum_to_one_and_nonnegative(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(2, 40))
            ts = np.cumsum(rng.uniform(0.01, 0.1, size=n))
            frames = [
                gaze_frame(float(t), left_dir=rotated_dir(float(a)), right_dir=rotated_dir(float(b)))
                for t, a, b in zip(ts, rng.uniform(0, 40, n), rng.uniform(0, 40, n))
            ]
            weights = get_frame_weights(FrameWindow(frames))
            assert weights.sum() == pytest.approx(1.0, abs=1e-9)
            assert (weights >= 0).all()

    def test_matches_reference_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n = int(rng.integers(2, 30))
            ts = np.cumsum(rng.uniform(0.01, 0.1, size=n))
            angles = np.cumsum(rng.uniform(0, 5, size=n))
            frames = [
                gaze_frame(float(t), left_dir=rotated_dir(float(a)), right_dir=rotated_dir(float(a)))
                for t, a in zip(ts, angles)
            ]
            w = FrameWindow(frames)
            v_left, v_right = gaze_angular_speeds(w)
            expected = reference_frame_weights(v_left, v_right, [f.t for f in frames])
            assert np.allclose(get_frame_weights(w), expected, atol=1e-12)

    def test_recency_preference_with_equal_speeds(self):
        w = FrameWindow([gaze_frame(float(t)) for t in range(6)])
        weights = get_frame_weights(w)
        assert (np.diff(weights) >= -1e-12).all()

    def test_uniform_fallback(self):
        # N=2 with differing speeds: both products vanish -> uniform
        w = FrameWindow(
            [
                gaze_frame(0.0),
                gaze_frame(1.0, left_dir=rotated_dir(5)),
                gaze_frame(2.0, left_dir=rotated_dir(45), right_dir=rotated_dir(45)),
            ]
        )
        # craft: last frame fastest -> w_speed[-1]=1 -> product[-1]=0; first time=0
        weights = get_frame_weights(w)
        assert weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_minmax_constant_vector_is_zero(self):
        assert np.allclose(minmax_normalize(np.array([3.0, 3.0, 3.0])), 0.0)


class TestSyntheticTrace:
    def test_projects_onto_scripted_block(self, kitchen_profile):
        wall = kitchen_profile.key_object("wall")
        script = MotionScript(
            segments=(
                MotionSegment(
                    duration_s=0.5,
                    eye=Vec3(0.45, 1.1, 1.2),
                    gaze=GazeTarget("left", (5, 5)),
                    right_hand=HandTarget("left", (5, 5), block=3),
                ),
            )
        )
        frames = generate_synthetic_trace(script, kitchen_profile, seed=1)
        assert len(frames) == 45
        hits = project_joints(frames[0], "right", wall)
        assert not hits["right"]
        block = {(r, c) for r in (4, 5, 6) for c in (4, 5, 6)}
        assert set(hits["left"]) == block

    def test_deterministic_per_seed(self, kitchen_profile):
        script = MotionScript(
            segments=(
                MotionSegment(
                    duration_s=0.3,
                    eye=Vec3(0.45, 1.1, 1.2),
                    gaze=GazeTarget("left", (3, 3), jitter_deg=1.0),
                ),
            )
        )
        a = generate_synthetic_trace(script, kitchen_profile, seed=9)
        b = generate_synthetic_trace(script, kitchen_profile, seed=9)
        c = generate_synthetic_trace(script, kitchen_profile, seed=10)
        assert [frame_to_json(f) for f in a] == [frame_to_json(f) for f in b]
        assert [frame_to_json(f) for f in a] != [frame_to_json(f) for f in c]

    def test_zero_duration_rejected(self, kitchen_profile):
        script = MotionScript(
            segments=(
                MotionSegment(duration_s=0.0, eye=Vec3(0, 1, 1), gaze=GazeTarget("left", (0, 0))),
            )
        )
        with pytest.raises(TraceError):
            generate_synthetic_trace(script, kitchen_profile, seed=0)

    def test_unknown_surface_rejected(self, kitchen_profile):
        script = MotionScript(
            segments=(
                MotionSegment(duration_s=0.1, eye=Vec3(0, 1, 1), gaze=GazeTarget("nope", (0, 0))),
            )
        )
        with pytest.raises(KeyError):
            generate_synthetic_trace(script, kitchen_profile, seed=0)


class TestTraceIO:
    def test_round_trip(self, kitchen_profile, tmp_path):
        from steplacer.context import read_trace, write_trace

        script = MotionScript(
            segments=(
                MotionSegment(
                    duration_s=0.2,
                    eye=Vec3(0.45, 1.1, 1.2),
                    gaze=GazeTarget("left", (5, 5), jitter_deg=0.3),
                    left_hand=HandTarget("left", (8, 8)),
                ),
            )
        )
        frames = generate_synthetic_trace(script, kitchen_profile, seed=2)
        path = tmp_path / "trace.jsonl"
        write_trace(frames, path)
        again = read_trace(path)
        assert [frame_to_json(f) for f in frames] == [frame_to_json(f) for f in again]

    def test_missing_hand_round_trips_as_null(self):
        f = gaze_frame(0.5)
        line = frame_to_json(f)
        assert '"left": null' in line
        again = frame_from_json(line)
        assert not again.left.present

    def test_malformed_line_rejected(self):
        with pytest.raises(TraceError):
            frame_from_json('{"t": 0}')
