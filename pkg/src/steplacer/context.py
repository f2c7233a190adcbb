"""Gaze/hand context: frame streams, frame weights, synthetic traces.

A frame weight combines two signals over a sliding window: slower gaze
motion and more recent timestamps both increase a frame's weight.  The
weights always sum to 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .geometry import Ray, Vec3, angle_between
from .spatial import SpatialProfile, cell_center

JOINTS_PER_HAND = 15


class TraceError(ValueError):
    """Raised for malformed context traces or motion scripts."""


@dataclass(frozen=True)
class HandSample:
    joints: tuple[Vec3, ...]
    palm: Vec3
    forward: Vec3  # unit, the direction the palm faces
    present: bool = True

    def __post_init__(self):
        if self.present:
            if len(self.joints) != JOINTS_PER_HAND:
                raise TraceError(f"hand sample needs {JOINTS_PER_HAND} joints, got {len(self.joints)}")
            if not self.forward.is_unit(1e-5):
                object.__setattr__(self, "forward", self.forward.normalized())

    @classmethod
    def missing(cls) -> "HandSample":
        zero = Vec3(0.0, 0.0, 0.0)
        return cls(joints=(), palm=zero, forward=Vec3(0.0, 0.0, 1.0), present=False)


@dataclass(frozen=True)
class Frame:
    t: float
    gaze_left: Ray
    gaze_right: Ray
    left: HandSample
    right: HandSample

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise TraceError("frame timestamp must be finite")

    def hand(self, side: str) -> HandSample:
        if side == "left":
            return self.left
        if side == "right":
            return self.right
        raise ValueError(f"unknown hand side {side!r}")


def eye_midpoint(f: Frame) -> Vec3:
    return (f.gaze_left.origin + f.gaze_right.origin) * 0.5


def gaze_forward(f: Frame) -> Vec3:
    s = f.gaze_left.direction + f.gaze_right.direction
    if s.norm() < 1e-9:
        raise TraceError("degenerate gaze: left and right directions cancel")
    return s.normalized()


@dataclass
class FrameWindow:
    frames: list[Frame]
    _hand_arrays: Optional[dict] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if len(self.frames) < 2:
            raise TraceError("frame window needs at least 2 frames")
        ts = [f.t for f in self.frames]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise TraceError("frame timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def latest(self) -> Frame:
        return self.frames[-1]

    def hand_arrays(self) -> dict:
        """Stacked per-frame hand data for vectorized cost evaluation."""
        if self._hand_arrays is None:
            n = len(self.frames)
            palms = np.zeros((n, 2, 3))
            forwards = np.zeros((n, 2, 3))
            present = np.zeros((n, 2), dtype=bool)
            for i, f in enumerate(self.frames):
                for j, hand in enumerate((f.left, f.right)):
                    if hand.present:
                        palms[i, j] = hand.palm.as_tuple()
                        forwards[i, j] = hand.forward.as_tuple()
                        present[i, j] = True
            self._hand_arrays = {"palms": palms, "forwards": forwards, "present": present}
        return self._hand_arrays


def minmax_normalize(values: np.ndarray) -> np.ndarray:
    """Scale to [0, 1]; a constant vector maps to all zeros."""
    values = np.asarray(values, dtype=float)
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def gaze_angular_speeds(w: FrameWindow) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame instantaneous angular speed of each gaze ray, in deg/s.

    The first frame has no predecessor and copies the second frame's speed.
    """
    n = len(w.frames)
    v_left = np.zeros(n)
    v_right = np.zeros(n)
    for i in range(1, n):
        dt = w.frames[i].t - w.frames[i - 1].t
        v_left[i] = angle_between(w.frames[i].gaze_left.direction, w.frames[i - 1].gaze_left.direction) / dt
        v_right[i] = angle_between(w.frames[i].gaze_right.direction, w.frames[i - 1].gaze_right.direction) / dt
    v_left[0] = v_left[1]
    v_right[0] = v_right[1]
    return v_left, v_right


def frame_weights_from_speeds(
    v_left: np.ndarray, v_right: np.ndarray, t: np.ndarray
) -> np.ndarray:
    """Weights from per-frame gaze speeds and timestamps.

    Slower frames and later frames weigh more; both signals are min-max
    scaled (a constant signal scales to zero) before being multiplied and
    normalized to sum to 1.
    """
    t = np.asarray(t, dtype=float)
    w_speed = minmax_normalize((np.abs(v_left) + np.abs(v_right)) / 2.0)
    w_time = minmax_normalize((t - t[0]) / (t[-1] - t[0]))
    raw = (1.0 - w_speed) * w_time
    total = raw.sum()
    if total <= 0.0:
        # No frame carries signal; fall back to a uniform distribution.
        return np.full(len(t), 1.0 / len(t))
    return raw / total


def get_frame_weights(w: FrameWindow) -> np.ndarray:
    """Relative importance of each frame; non-negative, sums to 1."""
    v_left, v_right = gaze_angular_speeds(w)
    return frame_weights_from_speeds(v_left, v_right, np.array([f.t for f in w.frames]))


# ---------------------------------------------------------------------------
# Synthetic traces


@dataclass(frozen=True)
class GazeTarget:
    surface_id: str
    cell: tuple[int, int]
    jitter_deg: float = 0.0


@dataclass(frozen=True)
class HandTarget:
    surface_id: str
    cell: tuple[int, int]  # center of the dwell block
    block: int = 3  # block x block cells
    depth_fraction: float = 0.8  # joint position along the eye-to-cell segment


@dataclass(frozen=True)
class MotionSegment:
    duration_s: float
    eye: Vec3
    gaze: GazeTarget
    left_hand: Optional[HandTarget] = None
    right_hand: Optional[HandTarget] = None


@dataclass(frozen=True)
class MotionScript:
    segments: tuple[MotionSegment, ...]
    frame_rate_hz: float = 90.0
    eye_separation_m: float = 0.06


def _cell_midpoint(profile: SpatialProfile, surface_id: str, cell: tuple[int, int]) -> Vec3:
    s = profile.surface_by_id(surface_id)
    half = 0.015
    return cell_center(s, cell[0], cell[1]) + s.right_dir * half - s.up_dir * half


def _lateral_axis(direction: Vec3) -> Vec3:
    up = Vec3(0.0, 1.0, 0.0)
    lateral = direction.cross(up)
    if lateral.norm() < 1e-9:
        lateral = direction.cross(Vec3(1.0, 0.0, 0.0))
    return lateral.normalized()


def _jittered(direction: Vec3, jitter_deg: float, rng: np.random.Generator) -> Vec3:
    if jitter_deg <= 0.0:
        return direction
    axis = _lateral_axis(direction)
    other = direction.cross(axis).normalized()
    a, b = rng.normal(0.0, math.radians(jitter_deg), size=2)
    return (direction + axis * a + other * b).normalized()


def _hand_sample(
    profile: SpatialProfile, eye: Vec3, target: HandTarget, rng: np.random.Generator
) -> HandSample:
    s = profile.surface_by_id(target.surface_id)
    r0, c0 = target.cell
    span = target.block // 2
    cells = []
    for dr in range(-span, target.block - span):
        for dc in range(-span, target.block - span):
            r, c = r0 + dr, c0 + dc
            if 0 <= r < s.grid_w and 0 <= c < s.grid_h:
                cells.append((r, c))
    if not cells:
        raise TraceError(f"hand dwell block falls outside surface {target.surface_id!r}")
    joints = []
    for j in range(JOINTS_PER_HAND):
        r, c = cells[j % len(cells)]
        point = _cell_midpoint(profile, target.surface_id, (r, c))
        joints.append(eye + (point - eye) * target.depth_fraction)
    palm = Vec3(
        sum(j.x for j in joints) / len(joints),
        sum(j.y for j in joints) / len(joints),
        sum(j.z for j in joints) / len(joints),
    )
    aim = _cell_midpoint(profile, target.surface_id, target.cell)
    forward = (aim - palm).normalized()
    return HandSample(joints=tuple(joints), palm=palm, forward=forward)


def generate_synthetic_trace(
    script: MotionScript, profile: SpatialProfile, seed: int
) -> list[Frame]:
    """Deterministic frame stream for a scripted fixation/dwell sequence."""
    rng = np.random.Generator(np.random.Philox(seed))
    dt = 1.0 / script.frame_rate_hz
    frames: list[Frame] = []
    t = 0.0
    for seg in script.segments:
        count = round(seg.duration_s * script.frame_rate_hz)
        target = _cell_midpoint(profile, seg.gaze.surface_id, seg.gaze.cell)
        for _ in range(count):
            mid_dir = (target - seg.eye).normalized()
            lateral = _lateral_axis(mid_dir)
            left_origin = seg.eye - lateral * (script.eye_separation_m / 2.0)
            right_origin = seg.eye + lateral * (script.eye_separation_m / 2.0)
            left_dir = _jittered((target - left_origin).normalized(), seg.gaze.jitter_deg, rng)
            right_dir = _jittered((target - right_origin).normalized(), seg.gaze.jitter_deg, rng)
            left_hand = (
                _hand_sample(profile, seg.eye, seg.left_hand, rng)
                if seg.left_hand
                else HandSample.missing()
            )
            right_hand = (
                _hand_sample(profile, seg.eye, seg.right_hand, rng)
                if seg.right_hand
                else HandSample.missing()
            )
            frames.append(
                Frame(
                    t=t,
                    gaze_left=Ray(left_origin, left_dir),
                    gaze_right=Ray(right_origin, right_dir),
                    left=left_hand,
                    right=right_hand,
                )
            )
            t += dt
    if not frames:
        raise TraceError("motion script produces an empty stream")
    return frames


# ---------------------------------------------------------------------------
# Trace files (JSON Lines, one frame per line)


def _ray_to_json(ray: Ray) -> dict:
    return {"origin": list(ray.origin.as_tuple()), "dir": list(ray.direction.as_tuple())}


def _hand_to_json(hand: HandSample) -> Optional[dict]:
    if not hand.present:
        return None
    return {
        "joints": [list(j.as_tuple()) for j in hand.joints],
        "pos": list(hand.palm.as_tuple()),
        "forward": list(hand.forward.as_tuple()),
    }


def frame_to_json(f: Frame) -> str:
    return json.dumps(
        {
            "t": f.t,
            "gaze": {"left": _ray_to_json(f.gaze_left), "right": _ray_to_json(f.gaze_right)},
            "hands": {"left": _hand_to_json(f.left), "right": _hand_to_json(f.right)},
        }
    )


def _ray_from_json(data: dict) -> Ray:
    return Ray(Vec3.from_seq(data["origin"]), Vec3.from_seq(data["dir"]))


def _hand_from_json(data: Optional[dict]) -> HandSample:
    if data is None:
        return HandSample.missing()
    return HandSample(
        joints=tuple(Vec3.from_seq(j) for j in data["joints"]),
        palm=Vec3.from_seq(data["pos"]),
        forward=Vec3.from_seq(data["forward"]),
    )


def frame_from_json(line: str) -> Frame:
    try:
        data = json.loads(line)
        return Frame(
            t=float(data["t"]),
            gaze_left=_ray_from_json(data["gaze"]["left"]),
            gaze_right=_ray_from_json(data["gaze"]["right"]),
            left=_hand_from_json(data["hands"]["left"]),
            right=_hand_from_json(data["hands"]["right"]),
        )
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise TraceError(f"malformed trace frame: {exc}") from exc


def write_trace(frames: Sequence[Frame], path: Union[str, Path]) -> None:
    Path(path).write_text("".join(frame_to_json(f) + "\n" for f in frames))


def read_trace(path: Union[str, Path]) -> list[Frame]:
    lines = Path(path).read_text().splitlines()
    return [frame_from_json(line) for line in lines if line.strip()]
