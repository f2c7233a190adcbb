"""Cost model for candidate label placements.

A placement is scored against the user's recent context: how much important
surface area the label would hide, how far it sits from the gaze ray,
how it relates to the hands, and how far it is from a preferred position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .context import Frame, FrameWindow, eye_midpoint, gaze_forward, get_frame_weights
from .geometry import Quat, Vec3, angle_between, get_rotation
from .importance import SurfaceGrids, get_overall_map
from .spatial import KeyObject, cell_center, d_max

BINOCULAR_LIMIT_DEG = 60.0


@dataclass(frozen=True)
class Placement:
    surface_id: str
    r: int
    c: int
    position: Vec3
    rotation: Optional[Quat] = None


@dataclass(frozen=True)
class LabelGeometry:
    width_m: float = 0.30
    height_m: float = 0.12

    def __post_init__(self):
        if self.width_m <= 0.0 or self.height_m <= 0.0:
            raise ValueError("label extents must be positive")


@dataclass(frozen=True)
class CostWeights:
    visibility: float = 0.24
    readability: float = 0.24
    hand_angle: float = 0.24
    preference: float = 0.28

    def __post_init__(self):
        if min(self.visibility, self.readability, self.hand_angle, self.preference) < 0.0:
            raise ValueError("cost weights must be non-negative")


def make_placement(k: KeyObject, surface_index: int, r: int, c: int) -> Placement:
    s = k.surfaces[surface_index]
    return Placement(surface_id=s.id, r=r, c=c, position=cell_center(s, r, c))


def _cell_rays(k: KeyObject, eye_arr: np.ndarray) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Per-surface (id, eye-to-cell vectors, degenerate-cell mask)."""
    rays = []
    for s in k.surfaces:
        d = s.cell_positions - eye_arr  # parameterize cells at t = 1
        degenerate = np.linalg.norm(d, axis=-1) < 1e-12
        rays.append((s.id, d, degenerate))
    return rays


def _occlusion_grids(
    rays: list[tuple[str, np.ndarray, np.ndarray]],
    rot: Quat,
    center: np.ndarray,
    eye_arr: np.ndarray,
    g: LabelGeometry,
) -> SurfaceGrids:
    label_right = np.array(rot.right().as_tuple())
    label_up = np.array(rot.up().as_tuple())
    label_normal = np.array(rot.forward().as_tuple())
    offset = center - eye_arr
    numer = offset @ label_normal
    out: SurfaceGrids = {}
    for sid, d, degenerate in rays:
        denom = d @ label_normal
        valid = np.abs(denom) > 1e-12
        t = np.where(valid, numer / np.where(valid, denom, 1.0), np.inf)
        occludable = valid & (t > 0.0) & (t < 1.0) & ~degenerate
        t_hit = np.where(occludable, t, 0.0)
        rel = t_hit[..., None] * d - offset
        inside = (np.abs(rel @ label_right) <= g.width_m / 2.0) & (
            np.abs(rel @ label_up) <= g.height_m / 2.0
        )
        out[sid] = (occludable & inside).astype(np.uint8)
    return out


def occlusion_map(
    a: Placement, g: LabelGeometry, eye: Vec3, k: KeyObject
) -> SurfaceGrids:
    """Binary mask of cells hidden behind the label from the eye midpoint.

    A cell counts as occluded when the eye-to-cell ray crosses the label
    rectangle strictly nearer than the cell itself.  Cells coincident with
    the eye are skipped.
    """
    surface = k.surface_by_id(a.surface_id)
    rot = a.rotation
    if rot is None:
        rot = get_rotation(surface.rotation, a.position, eye, surface.orientation)
    eye_arr = np.array(eye.as_tuple())
    return _occlusion_grids(_cell_rays(k, eye_arr), rot, np.array(a.position.as_tuple()), eye_arr, g)


def visibility_cost(I: SurfaceGrids, imap: SurfaceGrids) -> float:
    """Penalty for covering important cells; 0 when nothing overlaps."""
    if set(I) != set(imap):
        raise ValueError("occlusion and importance maps cover different surfaces")
    overlap = 0.0
    occluded = 0.0
    sq = 0.0
    for sid, mask in I.items():
        grid = imap[sid]
        if mask.shape != grid.shape:
            raise ValueError(f"grid shape mismatch on surface {sid!r}")
        overlap += float((mask * grid).sum())
        occluded += float(mask.sum())
        sq += float((grid * grid).sum())
    norm = math.sqrt(sq)
    if occluded == 0.0 or norm == 0.0:
        return 0.0
    return overlap**2 / (norm * occluded)


def readability_cost(a: Placement, f: Frame, max_dist: float) -> float:
    """Distance from the label to the gaze ray, normalized by max_dist.

    Outside the binocular cone the cost is additionally multiplied by the
    off-axis angle in degrees.
    """
    if max_dist <= 0.0:
        raise ValueError("max_dist must be positive")
    eye = eye_midpoint(f)
    forward = gaze_forward(f)
    rel = a.position - eye
    if rel.norm() < 1e-12:
        raise ValueError("placement coincides with the eye position")
    theta = angle_between(rel, forward)
    k = 1.0 if theta < BINOCULAR_LIMIT_DEG else theta
    perp = (forward * rel.dot(forward) - rel).norm()
    return k * perp / max_dist


def hand_angle_cost(a: Placement, w: FrameWindow, weights: np.ndarray) -> float:
    """Frame-weighted deviation of the label from where the palms point.

    Each present hand contributes its palm-forward-to-label angle; a missing
    hand contributes 0 for that frame.  Always within [0, 1].
    """
    arrays = w.hand_arrays()
    f = arrays["forwards"]
    rel = np.array(a.position.as_tuple())[None, None, :] - arrays["palms"]
    dots = np.einsum("ijk,ijk->ij", rel, f)
    cx = f[..., 1] * rel[..., 2] - f[..., 2] * rel[..., 1]
    cy = f[..., 2] * rel[..., 0] - f[..., 0] * rel[..., 2]
    cz = f[..., 0] * rel[..., 1] - f[..., 1] * rel[..., 0]
    theta = np.degrees(np.arctan2(np.sqrt(cx * cx + cy * cy + cz * cz), dots))
    theta = theta * arrays["present"]
    return float((np.asarray(weights) * theta.sum(axis=1)).sum() / 360.0)


def preference_cost(a: Placement, p_pref: Optional[Vec3], max_dist: float) -> float:
    if max_dist <= 0.0:
        raise ValueError("max_dist must be positive")
    if p_pref is None:
        return 0.0
    return a.position.distance_to(p_pref) / max_dist


@dataclass
class PlacementContext:
    """Placement-independent data shared by every cost evaluation."""

    key_object: KeyObject
    window: FrameWindow
    frame_weights: np.ndarray
    importance: SurfaceGrids
    label: LabelGeometry
    max_dist: float
    p_pref: Optional[Vec3] = None
    _importance_norm: Optional[float] = None
    _eye: Optional[Vec3] = None
    _cell_rays_cache: Optional[list] = None
    _rotations: Optional[dict] = None

    @classmethod
    def build(
        cls,
        k: KeyObject,
        window: FrameWindow,
        label: LabelGeometry = LabelGeometry(),
        p_pref: Optional[Vec3] = None,
    ) -> "PlacementContext":
        weights = get_frame_weights(window)
        imap = get_overall_map(window, weights, k)
        return cls(
            key_object=k,
            window=window,
            frame_weights=weights,
            importance=imap,
            label=label,
            max_dist=d_max(k),
            p_pref=p_pref,
        )

    @property
    def eye(self) -> Vec3:
        if self._eye is None:
            self._eye = eye_midpoint(self.window.latest)
        return self._eye

    @property
    def importance_norm(self) -> float:
        if self._importance_norm is None:
            self._importance_norm = math.sqrt(
                sum(float((g * g).sum()) for g in self.importance.values())
            )
        return self._importance_norm

    def cell_rays(self) -> list:
        if self._cell_rays_cache is None:
            self._cell_rays_cache = _cell_rays(self.key_object, np.array(self.eye.as_tuple()))
        return self._cell_rays_cache

    def rotation_at(self, a: Placement) -> Quat:
        """Eye-facing label rotation, memoized per cell (the eye is fixed)."""
        if self._rotations is None:
            self._rotations = {}
        key = (a.surface_id, a.r, a.c)
        rot = self._rotations.get(key)
        if rot is None:
            s = self.key_object.surface_by_id(a.surface_id)
            rot = get_rotation(s.rotation, a.position, self.eye, s.orientation)
            self._rotations[key] = rot
        return rot

    def finalize(self, a: Placement) -> Placement:
        """Attach the eye-facing rotation for reporting or rendering."""
        return replace(a, rotation=self.rotation_at(a))


def _visibility_term(a: Placement, ctx: PlacementContext) -> float:
    if ctx.importance_norm == 0.0:
        return 0.0  # nothing important can be occluded
    occlusion = _occlusion_grids(
        ctx.cell_rays(),
        ctx.rotation_at(a),
        np.array(a.position.as_tuple()),
        np.array(ctx.eye.as_tuple()),
        ctx.label,
    )
    return visibility_cost(occlusion, ctx.importance)


def weighted_total(
    c_v: float, c_r: float, c_ha: float, c_p: float, weights: CostWeights
) -> float:
    return (
        weights.visibility * c_v
        + weights.readability * c_r
        + weights.hand_angle * c_ha
        + weights.preference * c_p
    )


def total_cost(a: Placement, ctx: PlacementContext, weights: CostWeights) -> float:
    return weighted_total(
        _visibility_term(a, ctx),
        readability_cost(a, ctx.window.latest, ctx.max_dist),
        hand_angle_cost(a, ctx.window, ctx.frame_weights),
        preference_cost(a, ctx.p_pref, ctx.max_dist),
        weights,
    )


def cost_breakdown(a: Placement, ctx: PlacementContext, weights: CostWeights) -> dict[str, float]:
    c_v = _visibility_term(a, ctx)
    c_r = readability_cost(a, ctx.window.latest, ctx.max_dist)
    c_ha = hand_angle_cost(a, ctx.window, ctx.frame_weights)
    c_p = preference_cost(a, ctx.p_pref, ctx.max_dist)
    return {
        "visibility": c_v,
        "readability": c_r,
        "hand_angle": c_ha,
        "preference": c_p,
        "total": weighted_total(c_v, c_r, c_ha, c_p, weights),
    }
