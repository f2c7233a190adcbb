"""Importance maps: hand-joint projection, hull rasterization, softening.

A key object's map is a dict of per-surface float grids indexed [r, c]
(r along the width, c along the height), each value in [0, 1].
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy import ndimage

from .context import Frame, FrameWindow, eye_midpoint, minmax_normalize
from .geometry import Ray, ray_rect_intersect
from .spatial import AnchoringSurface, KeyObject

SurfaceGrids = dict[str, np.ndarray]


def project_joints(f: Frame, hand: str, k: KeyObject) -> dict[str, list[tuple[int, int]]]:
    """Cells hit by eye-to-joint rays, keyed by surface id.

    Each joint contributes at most one cell: the nearest surface of k along
    its ray.  An absent hand yields empty hit lists.
    """
    hits: dict[str, list[tuple[int, int]]] = {s.id: [] for s in k.surfaces}
    sample = f.hand(hand)
    if not sample.present:
        return hits
    eye = eye_midpoint(f)
    for joint in sample.joints:
        direction = joint - eye
        if direction.norm() < 1e-9:
            continue
        ray = Ray(eye, direction.normalized())
        best = None
        for s in k.surfaces:
            hit = ray_rect_intersect(ray, s)
            if hit is not None and (best is None or hit.t < best[0]):
                cell = s.cell_index_for(hit.u, hit.v)
                if cell is not None:
                    best = (hit.t, s.id, cell)
        if best is not None:
            hits[best[1]].append(best[2])
    return hits


def _convex_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Monotone-chain hull in counter-clockwise order, integer-exact."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def get_map(hits: Sequence[tuple[int, int]], s: AnchoringSurface) -> np.ndarray:
    """Binary mask of the filled convex hull of hit cells on one surface."""
    mask = np.zeros((s.grid_w, s.grid_h), dtype=np.uint8)
    if not hits:
        return mask
    for r, c in hits:
        mask[r, c] = 1
    hull = _convex_hull(list(hits))
    if len(hull) == 1:
        return mask
    if len(hull) == 2:
        # Degenerate hull: fill lattice cells exactly on the segment.
        (r0, c0), (r1, c1) = hull
        rr, cc = np.meshgrid(np.arange(s.grid_w), np.arange(s.grid_h), indexing="ij")
        cross = (r1 - r0) * (cc - c0) - (c1 - c0) * (rr - r0)
        on_segment = (
            (cross == 0)
            & (rr >= min(r0, r1))
            & (rr <= max(r0, r1))
            & (cc >= min(c0, c1))
            & (cc <= max(c0, c1))
        )
        mask[on_segment] = 1
        return mask
    rr, cc = np.meshgrid(np.arange(s.grid_w), np.arange(s.grid_h), indexing="ij")
    inside = np.ones((s.grid_w, s.grid_h), dtype=bool)
    for (r0, c0), (r1, c1) in zip(hull, hull[1:] + hull[:1]):
        # CCW hull: interior-or-boundary cells sit on the non-negative side.
        inside &= (r1 - r0) * (cc - c0) - (c1 - c0) * (rr - r0) >= 0
    mask[inside] = 1
    return mask


def soften(mask: np.ndarray) -> np.ndarray:
    """Distance-faded importance: marked cells get 1, the farthest cell 0.

    Distances are Euclidean in cell-index units.  An empty mask stays all
    zero; a full mask becomes all one.
    """
    if not mask.any():
        return np.zeros(mask.shape, dtype=float)
    e_min = ndimage.distance_transform_edt(mask == 0)
    peak = e_min.max()
    if peak == 0.0:
        return np.ones(mask.shape, dtype=float)
    return 1.0 - e_min / peak


def get_overall_map(w: FrameWindow, weights: np.ndarray, k: KeyObject) -> SurfaceGrids:
    """Frame-weighted aggregate of softened per-hand masks, scaled to [0, 1].

    The final min-max normalization runs jointly over all surfaces of the
    key object, so cross-surface importance stays comparable.  A window with
    no hands anywhere yields all-zero grids.
    """
    if len(weights) != len(w.frames):
        raise ValueError("weights and window length differ")
    acc = {s.id: np.zeros((s.grid_w, s.grid_h)) for s in k.surfaces}
    for weight, frame in zip(weights, w.frames):
        for hand in ("left", "right"):
            if not frame.hand(hand).present:
                continue
            hits = project_joints(frame, hand, k)
            for s in k.surfaces:
                acc[s.id] += weight * soften(get_map(hits[s.id], s))
    flat = np.concatenate([grid.ravel() for grid in acc.values()])
    scaled = minmax_normalize(flat)
    out: SurfaceGrids = {}
    offset = 0
    for s in k.surfaces:
        n = s.cell_count
        out[s.id] = scaled[offset : offset + n].reshape((s.grid_w, s.grid_h))
        offset += n
    return out


# ---------------------------------------------------------------------------
# Map export (PGM P2 plus raw CSV, one file pair per surface)


def write_pgm(grid: np.ndarray, path: Union[str, Path]) -> None:
    w, h = grid.shape
    lines = [f"P2", f"{w} {h}", "255"]
    for c in range(h):
        lines.append(" ".join(str(int(round(255.0 * grid[r, c]))) for r in range(w)))
    Path(path).write_text("\n".join(lines) + "\n")


def write_grid_csv(grid: np.ndarray, path: Union[str, Path]) -> None:
    w, h = grid.shape
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for c in range(h):
            writer.writerow([repr(float(grid[r, c])) for r in range(w)])


def export_maps(grids: SurfaceGrids, out_dir: Union[str, Path], prefix: str) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for sid in sorted(grids):
        pgm = out / f"{prefix}_{sid}.pgm"
        csv_path = out / f"{prefix}_{sid}.csv"
        write_pgm(grids[sid], pgm)
        write_grid_csv(grids[sid], csv_path)
        written += [pgm, csv_path]
    return written
