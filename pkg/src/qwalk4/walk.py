"""
Discrete-time walk on the integers with a four-state coin.

One step applies the coin to every site and then moves coin component ``j``
from site ``n`` to ``n + e[j]``. With ``apply_sagnac_swap`` the coin output is
passed through the |H-> <-> |V-> swap before the move, which is the same as
walking with ``modified_coin(coin)``.

States are stored sparsely, as a dict from position to a length-4 complex
array, because embedded 2D runs occupy only a small fraction of a wide line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .coins import CoinOperator, sagnac_swap
from .tensor_core import as_state

__all__ = [
    "DEFAULT_SHIFTS",
    "ShiftVector",
    "WalkState",
    "WalkConfig",
    "initial_state",
    "step",
    "evolve",
    "position_distribution",
    "coin_marginal",
    "recenter",
    "midpoint_offset",
    "total_probability",
    "PHI1",
    "PHI2",
    "PHI3",
]

NORM_TOL = 1e-12

PHI1 = np.array([1, 1, -1, -1], dtype=np.complex128) / 2
PHI2 = np.array([1, 1, 1, 1], dtype=np.complex128) / 2
PHI3 = np.array([1, 1, 1j, 1j], dtype=np.complex128) / 2
for _v in (PHI1, PHI2, PHI3):
    _v.flags.writeable = False


@dataclass(frozen=True)
class ShiftVector:
    """Displacement of each coin state, in time-bin units, ordered [H+, H-, V+, V-]."""

    e: tuple[int, int, int, int]

    def __post_init__(self):
        e = tuple(self.e)
        if len(e) != 4:
            raise ValueError(f"need 4 shifts, got {len(e)}")
        if any(isinstance(x, bool) or int(x) != x for x in e):
            raise ValueError(f"shifts must be integers, got {e}")
        object.__setattr__(self, "e", tuple(int(x) for x in e))

    @property
    def unbiased(self) -> bool:
        return sum(self.e) == 0

    def __iter__(self):
        return iter(self.e)

    def __getitem__(self, j):
        return self.e[j]


DEFAULT_SHIFTS = ShiftVector((1, -1, 2, -2))


@dataclass(frozen=True)
class WalkState:
    """Snapshot of the walker.

    ``amplitudes`` is keyed by displayed position. ``midpoint_offset`` is the
    total translation removed by recentering, so the raw time-bin index of a
    key ``n`` is ``n + midpoint_offset``.
    """

    amplitudes: Mapping[int, NDArray[np.complex128]]
    t: int = 0
    midpoint_offset: int = 0

    def support(self) -> list[int]:
        return sorted(self.amplitudes)

    def amplitude(self, n: int) -> NDArray[np.complex128]:
        v = self.amplitudes.get(n)
        return np.zeros(4, dtype=np.complex128) if v is None else v


@dataclass(frozen=True)
class WalkConfig:
    coin: CoinOperator
    shifts: ShiftVector = DEFAULT_SHIFTS
    steps: int = 12
    initial_coin: NDArray[np.complex128] = field(default_factory=lambda: PHI2.copy(), repr=False)
    initial_position: int = 0
    apply_sagnac_swap: bool = False
    recenter: bool = False

    def __post_init__(self):
        if not isinstance(self.shifts, ShiftVector):
            object.__setattr__(self, "shifts", ShiftVector(tuple(self.shifts)))
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        v = as_state(self.initial_coin, 4)
        if abs(np.linalg.norm(v) - 1) > NORM_TOL:
            raise ValueError("initial coin state must be normalized")
        object.__setattr__(self, "initial_coin", v)


def initial_state(cfg: WalkConfig) -> WalkState:
    v = np.array(cfg.initial_coin)
    v.flags.writeable = False
    return WalkState({cfg.initial_position: v}, t=0, midpoint_offset=0)


def midpoint_offset(shifts: ShiftVector, t: int) -> int:
    """Recentering offset after ``t`` steps: the midpoint of the reachable range.

    The range after t steps is [t*min(e), t*max(e)]; a half-integer midpoint
    is rounded toward zero. Rounding is applied to the cumulative value so it
    never drifts.
    """
    return math.trunc(t * (min(shifts.e) + max(shifts.e)) / 2)


def _effective_coin(cfg: WalkConfig) -> NDArray[np.complex128]:
    if cfg.apply_sagnac_swap:
        return sagnac_swap().matrix @ cfg.coin.matrix
    return cfg.coin.matrix


def step(s: WalkState, cfg: WalkConfig) -> WalkState:
    """Advance one step: coin, optional Sagnac swap, conditional shift."""
    coin = _effective_coin(cfg)
    e = cfg.shifts.e
    out: dict[int, NDArray[np.complex128]] = {}
    for n, v in s.amplitudes.items():
        w = coin @ v
        for j in range(4):
            if w[j] == 0:
                continue
            tgt = out.get(n + e[j])
            if tgt is None:
                tgt = out[n + e[j]] = np.zeros(4, dtype=np.complex128)
            tgt[j] += w[j]
    for v in out.values():
        v.flags.writeable = False
    new = WalkState(out, t=s.t + 1, midpoint_offset=s.midpoint_offset)
    if cfg.recenter:
        delta = midpoint_offset(cfg.shifts, new.t) - new.midpoint_offset
        new = recenter(new, delta)
    return new


def evolve(cfg: WalkConfig) -> list[WalkState]:
    """All states from t = 0 to t = ``cfg.steps`` inclusive."""
    states = [initial_state(cfg)]
    for _ in range(cfg.steps):
        states.append(step(states[-1], cfg))
    return states


def recenter(s: WalkState, offset: int) -> WalkState:
    """Translate every position by ``-offset`` and record it in the state."""
    if offset == 0:
        return s
    moved = {n - offset: v for n, v in s.amplitudes.items()}
    return replace(s, amplitudes=moved, midpoint_offset=s.midpoint_offset + offset)


def position_distribution(s: WalkState) -> dict[int, float]:
    return {n: float(np.sum(np.abs(v) ** 2)) for n, v in sorted(s.amplitudes.items())}


def coin_marginal(s: WalkState) -> NDArray[np.float64]:
    p = np.zeros(4)
    for v in s.amplitudes.values():
        p += np.abs(v) ** 2
    return p


def total_probability(s: WalkState) -> float:
    return float(coin_marginal(s).sum())
