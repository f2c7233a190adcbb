"""Vector, quaternion, and ray primitives plus the label rotation rule.

All angles are in degrees.  Directions are unit vectors; the world frame is
right-handed with the standard cross product, so a surface basis satisfies
``forward = right x up``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .spatial import AnchoringSurface

UNIT_TOL = 1e-6


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero-length vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def distance_to(self, other: "Vec3") -> float:
        return (self - other).norm()

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @classmethod
    def from_seq(cls, seq) -> "Vec3":
        x, y, z = seq
        return cls(float(x), float(y), float(z))


@dataclass(frozen=True)
class Quat:
    """Unit quaternion (w, x, y, z) acting on vectors by conjugation."""

    w: float
    x: float
    y: float
    z: float

    def __mul__(self, other: "Quat") -> "Quat":
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return Quat(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 + y1 * w2 + z1 * x2 - x1 * z2,
            w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
        )

    def conjugate(self) -> "Quat":
        return Quat(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    def normalized(self) -> "Quat":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero quaternion")
        return Quat(self.w / n, self.x / n, self.y / n, self.z / n)

    def rotate(self, v: Vec3) -> Vec3:
        p = Quat(0.0, v.x, v.y, v.z)
        r = self * p * self.conjugate()
        return Vec3(r.x, r.y, r.z)

    def right(self) -> Vec3:
        return self.rotate(Vec3(1.0, 0.0, 0.0))

    def up(self) -> Vec3:
        return self.rotate(Vec3(0.0, 1.0, 0.0))

    def forward(self) -> Vec3:
        return self.rotate(Vec3(0.0, 0.0, 1.0))

    def approx_equal(self, other: "Quat", tol: float = UNIT_TOL) -> bool:
        # q and -q encode the same rotation (double cover).
        same = all(
            abs(a - b) <= tol
            for a, b in zip((self.w, self.x, self.y, self.z), (other.w, other.x, other.y, other.z))
        )
        flipped = all(
            abs(a + b) <= tol
            for a, b in zip((self.w, self.x, self.y, self.z), (other.w, other.x, other.y, other.z))
        )
        return same or flipped

    @classmethod
    def identity(cls) -> "Quat":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_axis_angle(cls, axis: Vec3, angle_deg: float) -> "Quat":
        axis = axis.normalized()
        half = math.radians(angle_deg) / 2.0
        s = math.sin(half)
        return cls(math.cos(half), axis.x * s, axis.y * s, axis.z * s)

    @classmethod
    def from_euler_deg(cls, x_deg: float, y_deg: float, z_deg: float) -> "Quat":
        """Rotation applied about z, then x, then y (world axes).

        Only the composition order is a convention here; callers that pass a
        single nonzero angle get the plain axis rotation either way.
        """
        qx = cls.from_axis_angle(Vec3(1.0, 0.0, 0.0), x_deg)
        qy = cls.from_axis_angle(Vec3(0.0, 1.0, 0.0), y_deg)
        qz = cls.from_axis_angle(Vec3(0.0, 0.0, 1.0), z_deg)
        return qy * qx * qz

    @classmethod
    def from_basis(cls, right: Vec3, up: Vec3, forward: Vec3) -> "Quat":
        """Quaternion mapping the canonical axes x/y/z onto right/up/forward."""
        m00, m01, m02 = right.x, up.x, forward.x
        m10, m11, m12 = right.y, up.y, forward.y
        m20, m21, m22 = right.z, up.z, forward.z
        tr = m00 + m11 + m22
        if tr > 0.0:
            s = math.sqrt(tr + 1.0) * 2.0
            q = cls((0.25 * s), (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s)
        elif m00 > m11 and m00 > m22:
            s = math.sqrt(1.0 + m00 - m11 - m22) * 2.0
            q = cls((m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s)
        elif m11 > m22:
            s = math.sqrt(1.0 + m11 - m00 - m22) * 2.0
            q = cls((m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s)
        else:
            s = math.sqrt(1.0 + m22 - m00 - m11) * 2.0
            q = cls((m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s)
        return q.normalized()


@dataclass(frozen=True)
class Ray:
    origin: Vec3
    direction: Vec3  # unit length

    def __post_init__(self):
        if not self.direction.is_unit(1e-5):
            object.__setattr__(self, "direction", self.direction.normalized())

    def at(self, t: float) -> Vec3:
        return self.origin + self.direction * t


@dataclass(frozen=True)
class RectHit:
    point: Vec3
    u: float  # meters along the right direction from the top-left vertex
    v: float  # meters along minus the up direction from the top-left vertex
    t: float  # ray parameter


def angle_between(a: Vec3, b: Vec3) -> float:
    """Unsigned angle between two vectors, in degrees within [0, 180]."""
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        raise ValueError("angle_between requires non-zero vectors")
    return math.degrees(math.atan2(a.cross(b).norm(), a.dot(b)))


def ray_rect_intersect(ray: Ray, surface: "AnchoringSurface") -> Optional[RectHit]:
    """First intersection of a ray with an oriented rectangle, if any.

    Returns None for rays parallel to the plane, hits behind the origin
    (t <= 0), and plane crossings outside the rectangle extents.
    """
    denom = ray.direction.dot(surface.forward_dir)
    if abs(denom) < 1e-12:
        return None
    t = (surface.top_left - ray.origin).dot(surface.forward_dir) / denom
    if t <= 0.0:
        return None
    point = ray.at(t)
    rel = point - surface.top_left
    u = rel.dot(surface.right_dir)
    v = rel.dot(-surface.up_dir)
    if u < 0.0 or u > surface.width_m or v < 0.0 or v > surface.height_m:
        return None
    return RectHit(point=point, u=u, v=v, t=t)


def get_rotation(rot_s: Quat, p_a: Vec3, p_eye: Vec3, orientation: str) -> Quat:
    """Rotation of a label at p_a so its text faces an eye at p_eye.

    The surface basis is recovered from rot_s; the correction is applied in
    the surface's local frame.  Horizontal and vertical surfaces use
    different correction axes.
    """
    direction = p_a - p_eye
    if direction.norm() < 1e-12:
        raise ValueError("label position coincides with the eye position")
    du = rot_s.up()
    dr = rot_s.right()
    alpha_up = angle_between(du, direction)
    alpha_right = angle_between(dr, direction)
    if orientation == "horizontal":
        correction = Quat.from_euler_deg(90.0 - alpha_up, 0.0, 90.0 - alpha_right)
    elif orientation == "vertical":
        correction = Quat.from_euler_deg(90.0 - alpha_up, alpha_right - 90.0, 0.0)
    else:
        raise ValueError(f"unknown surface orientation: {orientation!r}")
    return (rot_s * correction).normalized()
