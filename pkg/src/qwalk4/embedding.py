"""
Two-dimensional walks carried on a single time axis.

Two coin states move the walker by +-1 and the other two by +-N with N odd.
As long as the walk runs for at most (N - 1)/2 steps the x offset inside each
segment of length N never exceeds (N - 1)/2, so every occupied time bin
decodes to a unique lattice point (x, y) with n = x + N*y.

``oracle_2d_walk`` is a separate dense lattice simulation used to check the
embedding; it shares no code with the 1D engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .coins import CoinOperator
from .tensor_core import as_state
from .walk import ShiftVector, WalkConfig, WalkState, evolve

__all__ = [
    "DEFAULT_AXES",
    "EmbeddingParams",
    "OverlapReport",
    "embedded_shifts",
    "decode_position",
    "run_embedded_2d",
    "oracle_2d_walk",
    "overlap_check",
    "x_marginal",
    "y_marginal",
]

# direction taken by each coin state [H+, H-, V+, V-]
DEFAULT_AXES: tuple[str, str, str, str] = ("+x", "-x", "+y", "-y")

_DIRS = {"+x": (1, 0), "-x": (-1, 0), "+y": (0, 1), "-y": (0, -1)}


@dataclass(frozen=True)
class EmbeddingParams:
    N: int
    steps: int
    axis_assignment: tuple[str, str, str, str] = DEFAULT_AXES

    def __post_init__(self):
        if self.N < 3 or self.N % 2 == 0:
            raise ValueError(f"N must be an odd integer >= 3, got {self.N}")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.steps > self.budget:
            raise ValueError(
                f"{self.steps} steps exceed the overlap-free budget (N-1)/2 = {self.budget}"
            )
        axes = tuple(self.axis_assignment)
        if sorted(axes) != sorted(_DIRS):
            raise ValueError(f"axis_assignment must be a permutation of {sorted(_DIRS)}")
        object.__setattr__(self, "axis_assignment", axes)

    @property
    def budget(self) -> int:
        return (self.N - 1) // 2


def embedded_shifts(p: EmbeddingParams) -> ShiftVector:
    return ShiftVector(tuple(dx + p.N * dy for dx, dy in (_DIRS[a] for a in p.axis_assignment)))


def _round_half_toward_zero(x: float) -> int:
    r = math.floor(abs(x) + 0.5)
    if abs(x) + 0.5 == r:  # exact half
        r -= 1
    return int(math.copysign(r, x)) if r else 0


def decode_position(n: int, N: int) -> tuple[int, int]:
    """Split a time bin into (x, y) with ``n == x + N*y``."""
    if N % 2 == 0:
        raise ValueError("N must be odd")
    y = _round_half_toward_zero(n / N)
    return n - N * y, y


@dataclass(frozen=True)
class OverlapReport:
    ok: bool
    step: int | None = None
    position: int | None = None

    def __bool__(self):
        return self.ok


def _collision(t: int, N: int) -> int | None:
    """First time bin shared by two lattice points reachable in ``t`` steps."""
    owner: dict[int, tuple[int, int]] = {}
    for x in range(-t, t + 1):
        r = t - abs(x)
        for y in range(-r, r + 1, 2):
            n = x + N * y
            if n in owner:
                return n
            owner[n] = (x, y)
    return None


def overlap_check(p: EmbeddingParams | int, trajectory: list[WalkState]) -> OverlapReport:
    """Check that no time bin can be reached from two different lattice points.

    At every step the set of lattice points reachable in ``t`` moves is mapped
    through ``n = x + N*y``; the embedding is sound when that map is injective
    and every occupied bin decodes to one of those points. ``p`` may also be
    a bare odd N, which allows diagnosing trajectories that run past the step
    budget.
    """
    N = p if isinstance(p, int) else p.N
    for s in trajectory:
        clash = _collision(s.t, N)
        if clash is not None:
            return OverlapReport(False, s.t, clash)
        for n in s.amplitudes:
            raw = n + s.midpoint_offset
            x, y = decode_position(raw, N)
            if abs(x) + abs(y) > s.t or (x + y - s.t) % 2:
                return OverlapReport(False, s.t, raw)
    return OverlapReport(True)


def _embedded_trajectory(coin, initial, p):
    cfg = WalkConfig(coin=coin, shifts=embedded_shifts(p), steps=p.steps, initial_coin=initial)
    return evolve(cfg)


def run_embedded_2d(coin: CoinOperator, initial: ArrayLike, p: EmbeddingParams) -> dict[tuple[int, int], float]:
    """Run the 1D walk with +-1/+-N shifts and decode the final distribution.

    Returns a sparse map (x, y) -> probability.
    """
    traj = _embedded_trajectory(coin, initial, p)
    report = overlap_check(p, traj)
    if not report:
        raise RuntimeError(f"segments overlap at step {report.step}, bin {report.position}")
    grid: dict[tuple[int, int], float] = {}
    for n, v in traj[-1].amplitudes.items():
        grid[decode_position(n, p.N)] = float(np.sum(np.abs(v) ** 2))
    return dict(sorted(grid.items()))


def oracle_2d_walk(coin: CoinOperator, initial: ArrayLike, steps: int,
                   axis_assignment=DEFAULT_AXES) -> dict[tuple[int, int], float]:
    """Direct lattice walk: coin component j moves one site along its axis.

    Dense (4, 2T+1, 2T+1) array, shifted with slicing.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    v0 = as_state(initial, 4)
    size = 2 * steps + 1
    psi = np.zeros((4, size, size), dtype=np.complex128)  # [coin, x, y]
    psi[:, steps, steps] = v0
    c = coin.matrix
    moves = [_DIRS[a] for a in axis_assignment]
    for _ in range(steps):
        flipped = np.einsum("ij,jxy->ixy", c, psi)
        psi = np.zeros_like(flipped)
        for j, (dx, dy) in enumerate(moves):
            xs_src = slice(max(0, -dx), size - max(0, dx))
            xs_dst = slice(max(0, dx), size - max(0, -dx))
            ys_src = slice(max(0, -dy), size - max(0, dy))
            ys_dst = slice(max(0, dy), size - max(0, -dy))
            psi[j, xs_dst, ys_dst] += flipped[j, xs_src, ys_src]
    prob = np.sum(np.abs(psi) ** 2, axis=0)
    grid = {}
    for ix, iy in zip(*np.nonzero(np.any(psi != 0, axis=0))):
        grid[(int(ix) - steps, int(iy) - steps)] = float(prob[ix, iy])
    return dict(sorted(grid.items()))


def x_marginal(grid: dict[tuple[int, int], float]) -> dict[int, float]:
    out: dict[int, float] = {}
    for (x, _), p in sorted(grid.items()):
        out[x] = out.get(x, 0.0) + p
    return out


def y_marginal(grid: dict[tuple[int, int], float]) -> dict[int, float]:
    out: dict[int, float] = {}
    for (_, y), p in sorted(grid.items()):
        out[y] = out.get(y, 0.0) + p
    return out
