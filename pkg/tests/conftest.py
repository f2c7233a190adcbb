import numpy as np
import pytest

from steplacer.geometry import Vec3
from steplacer.spatial import AnchoringSurface, KeyObject, SpatialProfile


def random_frame(rng: np.random.Generator) -> tuple[Vec3, Vec3, Vec3]:
    """Random right-handed orthonormal (right, up, forward) triple."""
    a = rng.normal(size=3)
    b = rng.normal(size=3)
    right = Vec3.from_seq(a).normalized()
    up = Vec3.from_seq(b)
    up = (up - right * up.dot(right)).normalized()
    return right, up, right.cross(up)


def make_surface(
    sid="s0",
    top_left=Vec3(0.0, 1.0, 0.0),
    right=Vec3(1.0, 0.0, 0.0),
    up=Vec3(0.0, 1.0, 0.0),
    width=0.9,
    height=0.6,
    orientation="vertical",
) -> AnchoringSurface:
    return AnchoringSurface(
        id=sid,
        top_left=top_left,
        right_dir=right,
        up_dir=up,
        width_m=width,
        height_m=height,
        orientation=orientation,
    )


@pytest.fixture
def wall_object() -> KeyObject:
    """Two coplanar vertical tiles sharing the x = 0.9 edge."""
    left = make_surface("left", Vec3(0.0, 1.5, 0.0), width=0.9, height=0.75)
    right = make_surface("right", Vec3(0.9, 1.5, 0.0), width=0.69, height=0.75)
    return KeyObject("wall", [left, right])


@pytest.fixture
def kitchen_profile(wall_object) -> SpatialProfile:
    counter = make_surface(
        "counter",
        top_left=Vec3(0.0, 0.9, 0.6),
        right=Vec3(1.0, 0.0, 0.0),
        up=Vec3(0.0, 0.0, -1.0),
        width=0.9,
        height=0.6,
        orientation="horizontal",
    )
    return SpatialProfile(
        environment="kitchen",
        key_objects=[wall_object, KeyObject("countertop", [counter])],
    )
