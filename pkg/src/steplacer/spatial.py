"""Environment model: key objects, anchoring surfaces, and grid geometry.

Each anchoring surface is an oriented rectangle discretized into 3 cm cells.
Cell (r, c) is anchored at ``top_left + 0.03*right_dir*r - 0.03*up_dir*c``;
fractional trailing strips (width or height not a multiple of 3 cm) carry no
cells.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .geometry import Quat, Vec3

CELL_SIZE_M = 0.03
ORIENTATIONS = ("horizontal", "vertical")

# Direction frames are repaired by Gram-Schmidt up to this dot product and
# rejected beyond it.
ORTHO_REPAIR_TOL = 1e-3


class ProfileError(ValueError):
    """Raised when a spatial profile violates a structural invariant."""


@dataclass
class AnchoringSurface:
    id: str
    top_left: Vec3
    right_dir: Vec3
    up_dir: Vec3
    width_m: float
    height_m: float
    orientation: str

    # Derived on construction.
    forward_dir: Vec3 = field(init=False)
    rotation: Quat = field(init=False)
    grid_w: int = field(init=False)
    grid_h: int = field(init=False)
    cell_positions: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ProfileError(f"surface {self.id!r}: unknown orientation {self.orientation!r}")
        try:
            right = self.right_dir.normalized()
            up = self.up_dir.normalized()
        except ValueError as exc:
            raise ProfileError(f"surface {self.id!r}: zero-length direction") from exc
        d = right.dot(up)
        if abs(d) > ORTHO_REPAIR_TOL:
            raise ProfileError(
                f"surface {self.id!r}: right/up directions not orthogonal (dot={d:.6g})"
            )
        if abs(d) > 0.0:
            up = (up - right * d).normalized()
        self.right_dir = right
        self.up_dir = up
        self.forward_dir = right.cross(up)
        self.rotation = Quat.from_basis(right, up, self.forward_dir)
        # The epsilon absorbs float noise so e.g. 0.63 m yields 21 cells.
        self.grid_w = math.floor(self.width_m / CELL_SIZE_M + 1e-9)
        self.grid_h = math.floor(self.height_m / CELL_SIZE_M + 1e-9)
        if self.grid_w < 1 or self.grid_h < 1:
            raise ProfileError(
                f"surface {self.id!r}: extents {self.width_m}x{self.height_m} m hold no 3 cm cell"
            )
        rs = np.arange(self.grid_w, dtype=float)
        cs = np.arange(self.grid_h, dtype=float)
        tl = np.array(self.top_left.as_tuple())
        dr = np.array(self.right_dir.as_tuple())
        du = np.array(self.up_dir.as_tuple())
        self.cell_positions = (
            tl[None, None, :]
            + CELL_SIZE_M * rs[:, None, None] * dr[None, None, :]
            - CELL_SIZE_M * cs[None, :, None] * du[None, None, :]
        )

    @property
    def cell_count(self) -> int:
        return self.grid_w * self.grid_h

    def corners(self) -> list[Vec3]:
        w, h = self.width_m, self.height_m
        tl = self.top_left
        return [
            tl,
            tl + self.right_dir * w,
            tl - self.up_dir * h,
            tl + self.right_dir * w - self.up_dir * h,
        ]

    def cell_index_for(self, u: float, v: float) -> Optional[tuple[int, int]]:
        """Cell indices for in-plane offsets (u, v) in meters, or None.

        Hits on the fractional trailing strip fall outside the grid.
        """
        r = math.floor(u / CELL_SIZE_M)
        c = math.floor(v / CELL_SIZE_M)
        if 0 <= r < self.grid_w and 0 <= c < self.grid_h:
            return (r, c)
        return None


def cell_center(s: AnchoringSurface, r: int, c: int) -> Vec3:
    """World anchor point of cell (r, c) on surface s."""
    if not (0 <= r < s.grid_w and 0 <= c < s.grid_h):
        raise IndexError(f"cell ({r}, {c}) outside {s.grid_w}x{s.grid_h} grid of surface {s.id!r}")
    return s.top_left + s.right_dir * (CELL_SIZE_M * r) - s.up_dir * (CELL_SIZE_M * c)


@dataclass
class KeyObject:
    name: str
    surfaces: list[AnchoringSurface]

    def __post_init__(self):
        if not self.surfaces:
            raise ProfileError(f"key object {self.name!r} has no anchoring surfaces")
        ids = [s.id for s in self.surfaces]
        if len(set(ids)) != len(ids):
            raise ProfileError(f"key object {self.name!r} has duplicate surface ids")

    def surface_by_id(self, surface_id: str) -> AnchoringSurface:
        for s in self.surfaces:
            if s.id == surface_id:
                return s
        raise KeyError(f"no surface {surface_id!r} on key object {self.name!r}")

    def surface_index(self, surface_id: str) -> int:
        for i, s in enumerate(self.surfaces):
            if s.id == surface_id:
                return i
        raise KeyError(f"no surface {surface_id!r} on key object {self.name!r}")

    @property
    def cell_count(self) -> int:
        return sum(s.cell_count for s in self.surfaces)


def d_max(k: KeyObject) -> float:
    """Diameter of the corner-vertex set of all surfaces, in meters."""
    corners = [c for s in k.surfaces for c in s.corners()]
    return max(a.distance_to(b) for a, b in combinations(corners, 2))


@dataclass
class SpatialProfile:
    environment: str
    key_objects: list[KeyObject]

    def __post_init__(self):
        names = [k.name for k in self.key_objects]
        if len(set(names)) != len(names):
            raise ProfileError("duplicate key object names in spatial profile")

    def key_object(self, name: str) -> KeyObject:
        for k in self.key_objects:
            if k.name == name:
                return k
        raise KeyError(f"no key object {name!r} in profile {self.environment!r}")

    def surface_by_id(self, surface_id: str) -> AnchoringSurface:
        for k in self.key_objects:
            for s in k.surfaces:
                if s.id == surface_id:
                    return s
        raise KeyError(f"no surface {surface_id!r} in profile {self.environment!r}")


def load_spatial_profile(raw: Union[bytes, str]) -> SpatialProfile:
    """Parse and validate a spatial-profile JSON document."""
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProfileError(f"malformed spatial profile JSON: {exc}") from exc
    try:
        key_objects = []
        for ko in data["key_objects"]:
            surfaces = [
                AnchoringSurface(
                    id=s["id"],
                    top_left=Vec3.from_seq(s["top_left"]),
                    right_dir=Vec3.from_seq(s["right_dir"]),
                    up_dir=Vec3.from_seq(s["up_dir"]),
                    width_m=float(s["width_m"]),
                    height_m=float(s["height_m"]),
                    orientation=s["orientation"],
                )
                for s in ko["surfaces"]
            ]
            key_objects.append(KeyObject(name=ko["name"], surfaces=surfaces))
        return SpatialProfile(environment=data["environment"], key_objects=key_objects)
    except (KeyError, TypeError) as exc:
        raise ProfileError(f"spatial profile missing field: {exc}") from exc


def dump_spatial_profile(profile: SpatialProfile) -> str:
    data = {
        "environment": profile.environment,
        "key_objects": [
            {
                "name": k.name,
                "surfaces": [
                    {
                        "id": s.id,
                        "top_left": list(s.top_left.as_tuple()),
                        "right_dir": list(s.right_dir.as_tuple()),
                        "up_dir": list(s.up_dir.as_tuple()),
                        "width_m": s.width_m,
                        "height_m": s.height_m,
                        "orientation": s.orientation,
                    }
                    for s in k.surfaces
                ],
            }
            for k in profile.key_objects
        ],
    }
    return json.dumps(data, indent=2)


def read_spatial_profile(path: Union[str, Path]) -> SpatialProfile:
    return load_spatial_profile(Path(path).read_bytes())


def write_spatial_profile(profile: SpatialProfile, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_spatial_profile(profile) + "\n")
