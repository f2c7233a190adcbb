"""Placement search: local moves, annealing with random jumps, exhaustive scan.

The annealer proposes the best of the 8 surrounding cells each iteration,
replaces uphill proposals by a uniformly random cell anywhere on the key
object, and accepts by the Metropolis rule under a 1/(i+1) temperature
decay.  All randomness flows from one counter-based generator, so a seed
fully determines the result.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .costs import Placement, make_placement
from .geometry import Vec3
from .spatial import CELL_SIZE_M, KeyObject

CostFn = Callable[[Placement], float]

NEIGHBOR_MOVES = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class AnnealingConfig:
    t1: float = 100.0
    i_max: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.t1 <= 0.0:
            raise ValueError("t1 must be positive")
        if self.i_max < 1:
            raise ValueError("i_max must be at least 1")


@dataclass(frozen=True)
class TraceStep:
    iteration: int
    surface_id: str
    r: int
    c: int
    cost: float
    accepted: bool
    evaluations: int  # cumulative cost calls when this step was recorded


@dataclass
class SearchResult:
    best: Placement
    best_cost: float
    evaluations: int
    trace: list[TraceStep]

    def evaluations_to_reach(self, cost: float, tol: float = 1e-9) -> Optional[int]:
        """Cost calls spent when the chain first got within tol of cost."""
        for step in self.trace:
            if step.cost <= cost + tol:
                return step.evaluations
        return None


class _CountingCost:
    def __init__(self, fn: CostFn):
        self.fn = fn
        self.calls = 0

    def __call__(self, a: Placement) -> float:
        self.calls += 1
        return self.fn(a)


def acceptance_probability(current_cost: float, proposal_cost: float, temperature: float) -> float:
    """Metropolis rule: downhill moves always pass, uphill ones decay with T."""
    delta = current_cost - proposal_cost
    if delta >= 0.0:
        return 1.0
    return math.exp(delta / temperature)


def cross_surface_fallback(
    p_out: Vec3, k: KeyObject, current_surface_id: str
) -> Optional[Placement]:
    """Cell on another surface closest to an out-of-bounds attempt.

    Single-surface objects have no neighbour to fall back to.
    """
    target = np.array(p_out.as_tuple())
    best: Optional[tuple[float, int, int, int]] = None
    for si, s in enumerate(k.surfaces):
        if s.id == current_surface_id:
            continue
        d2 = ((s.cell_positions - target) ** 2).sum(axis=-1)
        flat = int(np.argmin(d2))  # first flat index = lexicographic (r, c)
        r, c = divmod(flat, s.grid_h)
        score = float(d2[r, c])
        if best is None or score < best[0]:
            best = (score, si, r, c)
    if best is None:
        return None
    _, si, r, c = best
    return make_placement(k, si, r, c)


def _neighbor_candidates(a: Placement, k: KeyObject) -> list[Placement]:
    s = k.surface_by_id(a.surface_id)
    seen: set[tuple[str, int, int]] = set()
    candidates: list[Placement] = []
    si = k.surface_index(a.surface_id)
    for dr, dc in NEIGHBOR_MOVES:
        r, c = a.r + dr, a.c + dc
        if 0 <= r < s.grid_w and 0 <= c < s.grid_h:
            cand = make_placement(k, si, r, c)
        else:
            p_out = s.top_left + s.right_dir * (CELL_SIZE_M * r) - s.up_dir * (CELL_SIZE_M * c)
            cand = cross_surface_fallback(p_out, k, a.surface_id)
            if cand is None:
                continue
        key = (cand.surface_id, cand.r, cand.c)
        if key not in seen:
            seen.add(key)
            candidates.append(cand)
    return candidates


def _best_of(candidates: list[Placement], k: KeyObject, cost_fn: CostFn):
    best = None
    for cand in candidates:
        cost = cost_fn(cand)
        key = (cost, k.surface_index(cand.surface_id), cand.r, cand.c)
        if best is None or key < best[0]:
            best = (key, cand)
    if best is None:
        return None, math.inf
    return best[1], best[0][0]


def best_neighbor(a: Placement, k: KeyObject, cost_fn: CostFn) -> Optional[Placement]:
    """Cheapest of the up-to-8 neighbouring cells, ties lexicographic.

    Out-of-grid moves fall back to the closest cell on another surface; on a
    single-surface object they are discarded.  Returns None when every move
    is discarded (a 1x1 lone surface).
    """
    cand, _ = _best_of(_neighbor_candidates(a, k), k, cost_fn)
    return cand


def _random_cell(k: KeyObject, rng: np.random.Generator) -> Placement:
    sizes = [s.cell_count for s in k.surfaces]
    j = int(rng.integers(sum(sizes)))
    for si, size in enumerate(sizes):
        if j < size:
            r, c = divmod(j, k.surfaces[si].grid_h)
            return make_placement(k, si, r, c)
        j -= size
    raise AssertionError("unreachable")


def simulated_annealing(
    k: KeyObject, cost_fn: CostFn, cfg: AnnealingConfig = AnnealingConfig()
) -> SearchResult:
    counted = _CountingCost(cost_fn)
    rng = np.random.Generator(np.random.Philox(cfg.seed))

    si = int(rng.integers(len(k.surfaces)))
    s = k.surfaces[si]
    current = make_placement(k, si, int(rng.integers(s.grid_w)), int(rng.integers(s.grid_h)))
    current_cost = counted(current)
    trace = [
        TraceStep(0, current.surface_id, current.r, current.c, current_cost, True, counted.calls)
    ]
    best, best_cost = current, current_cost

    for i in range(cfg.i_max):
        proposal, proposal_cost = _best_of(_neighbor_candidates(current, k), k, counted)
        if proposal is None or proposal_cost > current_cost:
            # Uphill: jump to a uniformly random cell in the global space.
            proposal = _random_cell(k, rng)
            proposal_cost = counted(proposal)
        temperature = cfg.t1 / (i + 1)
        accepted = rng.random() < acceptance_probability(current_cost, proposal_cost, temperature)
        if accepted:
            current, current_cost = proposal, proposal_cost
            if current_cost < best_cost:
                best, best_cost = current, current_cost
        trace.append(
            TraceStep(
                i + 1, current.surface_id, current.r, current.c, current_cost, accepted, counted.calls
            )
        )
    return SearchResult(best=best, best_cost=best_cost, evaluations=counted.calls, trace=trace)


def greedy_search(k: KeyObject, cost_fn: CostFn) -> SearchResult:
    """Exhaustive scan of every cell; the oracle the annealer is tested against."""
    counted = _CountingCost(cost_fn)
    best: Optional[Placement] = None
    best_cost = math.inf
    trace: list[TraceStep] = []
    i = 0
    for si, s in enumerate(k.surfaces):
        for r in range(s.grid_w):
            for c in range(s.grid_h):
                cand = make_placement(k, si, r, c)
                cost = counted(cand)
                improved = cost < best_cost
                if improved:
                    best, best_cost = cand, cost
                trace.append(
                    TraceStep(i, cand.surface_id, cand.r, cand.c, cost, improved, counted.calls)
                )
                i += 1
    assert best is not None
    return SearchResult(best=best, best_cost=best_cost, evaluations=counted.calls, trace=trace)


def export_trace_csv(result: SearchResult, path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "surface", "r", "c", "cost", "accepted"])
        for step in result.trace:
            writer.writerow(
                [step.iteration, step.surface_id, step.r, step.c, repr(step.cost), int(step.accepted)]
            )
