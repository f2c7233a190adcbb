#!/usr/bin/env python3
"""Regenerate the bundled demo kitchen profile and context trace.

Run from the repository root:  python3 tools/make_demo_data.py
"""

from pathlib import Path

from steplacer.context import (
    GazeTarget,
    HandTarget,
    MotionScript,
    MotionSegment,
    generate_synthetic_trace,
    write_trace,
)
from steplacer.geometry import Vec3
from steplacer.spatial import (
    AnchoringSurface,
    KeyObject,
    SpatialProfile,
    write_spatial_profile,
)

ROOT = Path(__file__).parent.parent
OUT = ROOT / "data" / "demo"

X, Y, Z = Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)


def vertical(sid, top_left, width, height):
    return AnchoringSurface(
        id=sid, top_left=top_left, right_dir=X, up_dir=Y,
        width_m=width, height_m=height, orientation="vertical",
    )


def horizontal(sid, top_left, width, height):
    # grid rows march away from the wall toward the viewer (+z)
    return AnchoringSurface(
        id=sid, top_left=top_left, right_dir=X, up_dir=Vec3(0, 0, -1),
        width_m=width, height_m=height, orientation="horizontal",
    )


def build_profile() -> SpatialProfile:
    microwave = KeyObject(
        "microwave",
        [
            vertical("door", Vec3(0.10, 1.45, 0.05), 0.51, 0.36),
            vertical("keypad", Vec3(0.61, 1.45, 0.05), 0.15, 0.36),
        ],
    )
    sink = KeyObject(
        "sink",
        [
            vertical("sink_back", Vec3(1.00, 1.20, 0.00), 0.60, 0.30),
            horizontal("sink_left", Vec3(0.95, 0.90, 0.05), 0.15, 0.45),
            horizontal("sink_right", Vec3(1.66, 0.90, 0.05), 0.15, 0.45),
            horizontal("sink_basin", Vec3(1.10, 0.82, 0.08), 0.56, 0.38),
        ],
    )
    fridge = KeyObject("fridge", [vertical("fridge_door", Vec3(2.00, 1.70, 0.05), 0.60, 1.00)])
    countertop = KeyObject("countertop", [horizontal("counter", Vec3(0.10, 0.90, 0.05), 0.80, 0.50)])
    return SpatialProfile("office kitchen", [microwave, sink, fridge, countertop])


def build_trace(profile: SpatialProfile):
    eye = Vec3(0.45, 1.55, 0.95)
    script = MotionScript(
        segments=(
            # entering the cooking time on the keypad
            MotionSegment(
                duration_s=1.0,
                eye=eye,
                gaze=GazeTarget("keypad", (2, 6), jitter_deg=0.5),
                right_hand=HandTarget("keypad", (2, 6), block=3),
            ),
            # checking the food through the door, hand still at the keypad
            MotionSegment(
                duration_s=0.8,
                eye=eye,
                gaze=GazeTarget("door", (8, 6), jitter_deg=0.8),
                right_hand=HandTarget("keypad", (2, 6), block=3),
            ),
        )
    )
    return generate_synthetic_trace(script, profile, seed=2024)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    profile = build_profile()
    write_spatial_profile(profile, OUT / "kitchen.json")
    write_trace(build_trace(profile), OUT / "trace.jsonl")
    print(f"wrote {OUT / 'kitchen.json'} and {OUT / 'trace.jsonl'}")


if __name__ == "__main__":
    main()
