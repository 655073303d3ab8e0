"""
Unitary models of the bench optics and what they compile to.

Polarization elements act on (H, V). OAM elements act on (+, -), the l = +1
and l = -1 Laguerre-Gaussian modes. The Dove prism is defined directly on the
4-dim coin space, and the q-plate on the 6-dim extended space

    (H,-1) (H,0) (H,+1) (V,-1) (V,0) (V,+1)

which is needed because the q-plate moves light into and out of l = 0.

Retarder convention: a plate with retardance ``delta`` and fast axis at
``angle`` is ``R(-angle) @ diag(1, e^{i delta}) @ R(angle)``. With this
convention a half-wave plate at pi/8 is exactly the Hadamard matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .coins import CNOT_MATRIX, CoinOperator, grover4, hadamard4, identity4, sagnac_swap
from .tensor_core import (
    ALGEBRAIC_TOL,
    COIN_INDEX,
    I2,
    as_matrix,
    as_state,
    equal_up_to_global_phase,
    is_unitary,
    tensor2x2,
)

__all__ = [
    "KET_H",
    "KET_V",
    "KET_D",
    "KET_A",
    "KET_R",
    "KET_L",
    "OAM_LEVELS",
    "OpticalElement",
    "half_wave_plate",
    "quarter_wave_plate",
    "polarization_rotator",
    "mode_converter_pi",
    "mode_converter_half_pi",
    "dove_prism",
    "q_plate",
    "element_unitary",
    "element_on_coin",
    "element_on_extended",
    "single_pass_dove",
    "sagnac_interior",
    "sagnac_composite",
    "SAGNAC_INPUT_ROTATION",
    "SAGNAC_POST_POLARIZATION",
    "SAGNAC_POST_OAM",
    "COUNTER_PROPAGATION_SIGN",
    "embed_coin_state",
    "restrict_to_coin",
    "qplate_roundtrip",
    "qplate_roundtrip_check",
    "InitialStatePreparation",
    "prepare_initial_state",
]

KET_H = np.array([1, 0], dtype=np.complex128)
KET_V = np.array([0, 1], dtype=np.complex128)
KET_D = (KET_H + KET_V) / np.sqrt(2)
KET_A = (KET_H - KET_V) / np.sqrt(2)
KET_R = (KET_H - 1j * KET_V) / np.sqrt(2)
KET_L = (KET_H + 1j * KET_V) / np.sqrt(2)
for _k in (KET_H, KET_V, KET_D, KET_A, KET_R, KET_L):
    _k.flags.writeable = False

OAM_LEVELS = (-1, 0, 1)
_POLS = ("H", "V")


def _ext_index(pol: str, m: int) -> int:
    return _POLS.index(pol) * 3 + OAM_LEVELS.index(m)


# coin index -> extended index; OAM label + is l=+1, - is l=-1
_COIN_TO_EXT = np.array([_ext_index("H", 1), _ext_index("H", -1),
                         _ext_index("V", 1), _ext_index("V", -1)])

_KINDS = {
    "half_wave_plate",
    "quarter_wave_plate",
    "polarization_rotator",
    "mode_converter_pi",
    "mode_converter_half_pi",
    "dove_prism",
    "q_plate",
}


@dataclass(frozen=True)
class OpticalElement:
    """A tagged optical element with its parameters.

    ``angle`` is in radians and is used by every kind except the q-plate;
    ``l_magnitude`` only matters for the Dove prism and ``q`` only for the
    q-plate.
    """

    kind: str
    angle: float = 0.0
    l_magnitude: int = 1
    q: Fraction = field(default=Fraction(1, 2))

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown optical element kind {self.kind!r}")
        if not np.isfinite(self.angle):
            raise ValueError("element angle must be finite")
        if self.l_magnitude < 1:
            raise ValueError("l_magnitude must be >= 1")
        q = Fraction(self.q).limit_denominator(2)
        if q == 0 or q.denominator not in (1, 2) or abs(float(q) - float(self.q)) > 1e-12:
            raise ValueError(f"q-plate charge must be a nonzero half-integer, got {self.q}")
        object.__setattr__(self, "q", q)

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "q_plate":
            d["q"] = str(self.q)
        else:
            d["angle"] = repr(float(self.angle))
        if self.kind == "dove_prism":
            d["l_magnitude"] = self.l_magnitude
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OpticalElement":
        return cls(
            kind=d["kind"],
            angle=float(d.get("angle", 0.0)),
            l_magnitude=int(d.get("l_magnitude", 1)),
            q=Fraction(d.get("q", "1/2")),
        )


def half_wave_plate(angle: float) -> OpticalElement:
    return OpticalElement("half_wave_plate", angle=angle)


def quarter_wave_plate(angle: float) -> OpticalElement:
    return OpticalElement("quarter_wave_plate", angle=angle)


def polarization_rotator(angle: float) -> OpticalElement:
    return OpticalElement("polarization_rotator", angle=angle)


def mode_converter_pi(angle: float = np.pi / 8) -> OpticalElement:
    """OAM analogue of a half-wave plate; the default angle gives H2 on (+, -)."""
    return OpticalElement("mode_converter_pi", angle=angle)


def mode_converter_half_pi(angle: float = 0.0) -> OpticalElement:
    """OAM analogue of a quarter-wave plate."""
    return OpticalElement("mode_converter_half_pi", angle=angle)


def dove_prism(theta: float, l_magnitude: int = 1) -> OpticalElement:
    return OpticalElement("dove_prism", angle=theta, l_magnitude=l_magnitude)


def q_plate(q=Fraction(1, 2)) -> OpticalElement:
    return OpticalElement("q_plate", q=Fraction(q))


# --------------------------------------------------------------------------
# element matrices
# --------------------------------------------------------------------------


def _rotation(t: float) -> NDArray[np.complex128]:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, s], [-s, c]], dtype=np.complex128)


def _retarder(delta: float, angle: float) -> NDArray[np.complex128]:
    return _rotation(-angle) @ np.diag([1, np.exp(1j * delta)]) @ _rotation(angle)


def single_pass_dove(theta: float, l_magnitude: int = 1) -> NDArray[np.complex128]:
    """One pass through a Dove prism at ``theta`` on the OAM (+, -) qubit.

    Flips the OAM sign: |+> -> e^{-2il theta}|->, |-> -> e^{+2il theta}|+>.
    """
    ph = np.exp(2j * l_magnitude * theta)
    return np.array([[0, ph], [1 / ph, 0]], dtype=np.complex128)


# Inside the Sagnac loop the V component travels the other way round and sees
# the prism mirrored (angle -> -angle) plus one extra reflection (sign -1).
COUNTER_PROPAGATION_SIGN = -1
_COUNTER_REFLECTION_PHASE = -1.0


def sagnac_interior(theta: float, l_magnitude: int = 1) -> NDArray[np.complex128]:
    """PBS path bookkeeping inside the loop: H clockwise, V counter-clockwise."""
    ph = np.diag([1.0, 0.0]).astype(np.complex128)
    pv = np.diag([0.0, 1.0]).astype(np.complex128)
    forward = single_pass_dove(theta, l_magnitude)
    backward = _COUNTER_REFLECTION_PHASE * single_pass_dove(
        COUNTER_PROPAGATION_SIGN * theta, l_magnitude
    )
    return np.kron(ph, forward) + np.kron(pv, backward)


def _dove_rule(theta: float, l_magnitude: int) -> NDArray[np.complex128]:
    # |H,+-> -> e^{-+2il theta}|H,-+>,  |V,+-> -> -e^{+-2il theta}|V,-+>
    e = np.exp(2j * l_magnitude * theta)
    m = np.zeros((4, 4), dtype=np.complex128)
    i = COIN_INDEX
    m[i["H-"], i["H+"]] = 1 / e
    m[i["H+"], i["H-"]] = e
    m[i["V-"], i["V+"]] = -e
    m[i["V+"], i["V-"]] = -1 / e
    return m


def _qplate_permutation(q: Fraction) -> tuple[NDArray[np.complex128], list[int]]:
    """q-plate on the extended space, written in the circular basis.

    Returns the 6x6 matrix in (L/R) x (-1, 0, +1) ordering and the list of
    circular-basis indices whose image would leave m in {-1, 0, +1}.
    """
    shift = int(2 * q)
    perm = np.eye(6, dtype=np.complex128)
    escaping = []

    def idx(c: int, m: int) -> int:  # c = 0 for L, 1 for R
        return c * 3 + OAM_LEVELS.index(m)

    paired = set()
    for m in OAM_LEVELS:
        if m + shift in OAM_LEVELS:
            a, b = idx(0, m), idx(1, m + shift)
            perm[a, a] = perm[b, b] = 0
            perm[b, a] = perm[a, b] = 1
            paired.update((a, b))
    for k in range(6):
        if k not in paired:
            escaping.append(k)
    return perm, escaping


# columns: |L>, |R> expressed in H/V
_CIRC = np.column_stack([KET_L, KET_R])
_CIRC_EXT = np.kron(_CIRC, np.eye(3))


def _qplate_matrix(q: Fraction) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    perm, escaping = _qplate_permutation(q)
    m = _CIRC_EXT @ perm @ _CIRC_EXT.conj().T
    # projector onto the part of the extended space that would be pushed out
    esc = np.zeros((6, 6), dtype=np.complex128)
    for k in escaping:
        col = _CIRC_EXT[:, k]
        esc += np.outer(col, col.conj())
    return m, esc


def element_unitary(e: OpticalElement) -> NDArray[np.complex128]:
    """Matrix of ``e`` on its native space.

    2x2 for polarization elements and OAM mode converters, 4x4 for the Dove
    prism, 6x6 for the q-plate.
    """
    k = e.kind
    if k == "half_wave_plate":
        m = _retarder(np.pi, e.angle)
    elif k == "quarter_wave_plate":
        m = _retarder(np.pi / 2, e.angle)
    elif k == "polarization_rotator":
        m = _rotation(-e.angle)
    elif k == "mode_converter_pi":
        m = _retarder(np.pi, e.angle)
    elif k == "mode_converter_half_pi":
        m = _retarder(np.pi / 2, e.angle)
    elif k == "dove_prism":
        m = _dove_rule(e.angle, e.l_magnitude)
    else:
        m = _qplate_matrix(e.q)[0]
    return as_matrix(m)


_OAM_KINDS = ("mode_converter_pi", "mode_converter_half_pi")
_POL_KINDS = ("half_wave_plate", "quarter_wave_plate", "polarization_rotator")


def element_on_coin(e: OpticalElement) -> NDArray[np.complex128]:
    """Lift ``e`` to a 4x4 matrix on the coin space."""
    if e.kind == "q_plate":
        raise ValueError("a q-plate changes |m| and needs the 6-dim extended space")
    m = element_unitary(e)
    if e.kind in _POL_KINDS:
        return tensor2x2(m, I2)
    if e.kind in _OAM_KINDS:
        return tensor2x2(I2, m)
    return m


def element_on_extended(e: OpticalElement) -> NDArray[np.complex128]:
    """Lift ``e`` to the 6-dim extended space.

    Mode converters act on the l = +-1 pair and leave l = 0 alone.
    """
    m = element_unitary(e)
    if e.kind in _POL_KINDS:
        return as_matrix(np.kron(m, np.eye(3)))
    if e.kind in _OAM_KINDS:
        # (+, -) ordering -> (-1, 0, +1) ordering
        oam = np.zeros((3, 3), dtype=np.complex128)
        oam[1, 1] = 1
        pos, neg = 2, 0
        oam[pos, pos], oam[pos, neg] = m[0, 0], m[0, 1]
        oam[neg, pos], oam[neg, neg] = m[1, 0], m[1, 1]
        return as_matrix(np.kron(np.eye(2), oam))
    if e.kind == "q_plate":
        return m
    raise ValueError("the Dove prism model is defined on the coin space only")


# --------------------------------------------------------------------------
# Sagnac composite
# --------------------------------------------------------------------------

# H -> D, V -> A before the loop
SAGNAC_INPUT_ROTATION = (half_wave_plate(np.pi / 8),)

# After the loop the coin reads R|-> for H+, iL|+> for H-, L|-> for V+ and
# iR|+> for V- (common phase e^{-i pi/4}). Sending R -> H, L -> V and
# |-> -> i|+>, |+> -> |-> turns that into the swap. The polarization part is
# a QWP at 0 then an HWP at pi/8; the OAM part is a pi/2 converter at 0 then
# a pi converter at pi/4.
SAGNAC_POST_POLARIZATION = (quarter_wave_plate(0.0), half_wave_plate(np.pi / 8))
SAGNAC_POST_OAM = (mode_converter_half_pi(0.0), mode_converter_pi(np.pi / 4))


def _chain_on_coin(elements) -> NDArray[np.complex128]:
    m = np.eye(4, dtype=np.complex128)
    for e in elements:
        m = element_on_coin(e) @ m
    return m


def sagnac_composite(theta: float = np.pi / 8, *, include_post: bool = True,
                     l_magnitude: int = 1) -> CoinOperator:
    """Coin-space unitary of the Sagnac interferometer with an internal Dove prism.

    ``include_post=False`` stops right after the loop, before the fixed
    polarization and OAM corrections.
    """
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    m = sagnac_interior(theta, l_magnitude) @ _chain_on_coin(SAGNAC_INPUT_ROTATION)
    if include_post:
        m = _chain_on_coin(SAGNAC_POST_POLARIZATION + SAGNAC_POST_OAM) @ m
    name = "sagnac_composite" if include_post else "sagnac_loop"
    return CoinOperator(f"{name}({theta:.6g})", m)


# --------------------------------------------------------------------------
# extended space, q-plate tricks
# --------------------------------------------------------------------------


def embed_coin_state(v: ArrayLike) -> NDArray[np.complex128]:
    """Coin vector -> 6-dim extended vector with zero l = 0 amplitude."""
    v = as_state(v, 4)
    out = np.zeros(6, dtype=np.complex128)
    out[_COIN_TO_EXT] = v
    return out


def restrict_to_coin(x: ArrayLike, tol: float = ALGEBRAIC_TOL) -> NDArray[np.complex128]:
    """Extended vector -> coin vector; rejects any weight left in l = 0."""
    x = as_state(x, 6)
    leak = np.abs(x[[_ext_index("H", 0), _ext_index("V", 0)]]) ** 2
    if leak.sum() > tol:
        raise ValueError(f"state has weight {leak.sum():.3g} in l = 0")
    return as_state(x[_COIN_TO_EXT], 4)


def apply_qplate(q, x: ArrayLike, tol: float = ALGEBRAIC_TOL) -> NDArray[np.complex128]:
    """Apply a q-plate to an extended vector.

    Raises if part of ``x`` would be pushed outside m in {-1, 0, +1}.
    """
    x = as_state(x, 6)
    m, esc = _qplate_matrix(Fraction(q))
    lost = np.real(np.vdot(x, esc @ x))
    if lost > tol:
        raise ValueError(f"q-plate would move weight {lost:.3g} outside the l in {{-1,0,1}} ladder")
    return as_state(m @ x, 6)


def _admitted_subspace(q: Fraction) -> NDArray[np.complex128]:
    """Orthonormal coin-space columns that the q-plate moves into l = 0."""
    shift = int(2 * q)
    cols = []
    # (L, m) -> (R, m + shift) and (R, m + shift) -> (L, m)
    for m in (-1, 1):
        if m + shift == 0:
            cols.append(np.kron(KET_L, _oam_ket(m)))
        if m - shift == 0:
            cols.append(np.kron(KET_R, _oam_ket(m)))
    if not cols:
        raise ValueError(f"a q = {q} plate moves no coin state into l = 0")
    return np.column_stack([restrict_to_coin(c) for c in
                            (np.asarray(c) for c in cols)])


def _oam_ket(m: int) -> NDArray[np.complex128]:
    k = np.zeros(3, dtype=np.complex128)
    k[OAM_LEVELS.index(m)] = 1
    return k


def qplate_roundtrip(q, inner: ArrayLike) -> NDArray[np.complex128]:
    """q-plate, then ``inner`` on the l = 0 polarization, then the q-plate again.

    Returned as a 6x6 matrix on the extended space. ``inner`` must be a 2x2
    unitary in the (H, V) basis.
    """
    inner = as_matrix(inner)
    if inner.shape != (2, 2) or not is_unitary(inner):
        raise ValueError("inner operation must be a 2x2 unitary")
    qp = _qplate_matrix(Fraction(q))[0]
    zero = np.zeros((3, 3))
    zero[1, 1] = 1
    rest = np.eye(3) - zero
    embedded = np.kron(inner, zero) + np.kron(np.eye(2), rest)
    return qp @ embedded @ qp


def qplate_roundtrip_check(q, inner: ArrayLike, tol: float = ALGEBRAIC_TOL) -> bool:
    """Verify the fibre trick for a q-plate pair around a 2x2 l = 0 operation.

    On the coin states the plate sends to l = 0 (for q = 1/2: |R,+> and
    |L,->), the round trip must stay in that subspace and act as ``inner``
    rewritten in the circular basis, ``C^dag inner C`` with ``C = [L, R]``.
    The full 4x4 restriction to l = +-1 must be unitary.
    """
    q = Fraction(q)
    rt = qplate_roundtrip(q, inner)
    idx = _COIN_TO_EXT
    block = rt[np.ix_(idx, idx)]
    if not is_unitary(block, tol):
        return False
    basis = _admitted_subspace(q)  # 4 x k
    # where each admitted state sits in l = 0 after the first plate
    qp = _qplate_matrix(q)[0]
    zero_pol = []
    for j in range(basis.shape[1]):
        x = qp @ embed_coin_state(basis[:, j])
        zero_pol.append(x[[_ext_index("H", 0), _ext_index("V", 0)]])
    carrier = np.column_stack(zero_pol)  # 2 x k, images in l = 0
    expected = carrier.conj().T @ np.asarray(inner) @ carrier
    actual = basis.conj().T @ block @ basis
    leak = block @ basis - basis @ actual
    return bool(np.max(np.abs(actual - expected)) <= tol and np.max(np.abs(leak)) <= tol)


# --------------------------------------------------------------------------
# initial state preparation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class InitialStatePreparation:
    """Bench recipe for a coin state starting from |H> with l = 0.

    ``elements`` brings the photon to |H,+>; ``residual`` is the U(4) coin
    operation that remains to be built, and ``achieved`` is the resulting
    coin vector.
    """

    elements: tuple[OpticalElement, ...]
    residual: CoinOperator
    achieved: NDArray[np.complex128] = field(repr=False)
    entangling: bool = False

    @property
    def reached_basis_state(self) -> str:
        return "H+"


# H -> L, then the q = 1/2 plate sends |L,0> -> |R,+1>, then R -> H.
_TO_BASIS = (quarter_wave_plate(-np.pi / 4), q_plate(Fraction(1, 2))) + SAGNAC_POST_POLARIZATION


def _local_column(a: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # reflection-type unitary whose first column is a; real a gives a HWP-like matrix
    return np.array([[a[0], np.conj(a[1])], [a[1], -np.conj(a[0])]], dtype=np.complex128)


def _residual_for(target: NDArray[np.complex128], tol: float) -> tuple[NDArray[np.complex128], bool, str]:
    """A U(4) mapping |H,+> to ``target``, non-entangling when possible.

    Named coins are tried first so that e.g. the uniform state is reported as
    "apply H4" rather than an equivalent but anonymous product of rotations.
    """
    for c in (identity4(), hadamard4(), grover4()):
        col = c.matrix[:, COIN_INDEX["H+"]]
        if equal_up_to_global_phase(target, col, tol):
            k = np.argmax(np.abs(col))
            return c.matrix * (target[k] / col[k]), False, c.name
    u, s, vh = np.linalg.svd(target.reshape(2, 2))
    if s[1] <= tol:
        a = u[:, 0] * s[0]
        b = vh[0, :]
        return np.kron(_local_column(a), _local_column(b)), False, "residual"
    # s0|00> + s1|11> from |00>, then rotate each factor onto the Schmidt vectors
    ry = np.array([[s[0], -s[1]], [s[1], s[0]]], dtype=np.complex128)
    local = np.kron(u, vh.T)
    return local @ CNOT_MATRIX @ np.kron(ry, np.eye(2)), True, "residual"


def prepare_initial_state(target: ArrayLike, tol: float = 1e-10) -> InitialStatePreparation:
    target = as_state(target, 4)
    if abs(np.linalg.norm(target) - 1) > tol:
        raise ValueError("target coin state is not normalized")
    x = np.zeros(6, dtype=np.complex128)
    x[_ext_index("H", 0)] = 1
    for e in _TO_BASIS:
        if e.kind == "q_plate":
            x = apply_qplate(e.q, x)
        else:
            x = element_on_extended(e) @ x
    reached = restrict_to_coin(x)
    # reached is |H,+> up to a phase; fold the phase into the residual
    phase = reached[COIN_INDEX["H+"]]
    if abs(abs(phase) - 1) > tol:
        raise RuntimeError("basis-state stage did not land on |H,+>")
    u, entangling, name = _residual_for(np.asarray(target), tol)
    residual = CoinOperator(name, u / phase)
    achieved = as_state(residual.matrix @ reached, 4)
    return InitialStatePreparation(tuple(_TO_BASIS), residual, achieved, entangling)


def sagnac_matches_swap(theta: float = np.pi / 8, tol: float = 1e-10) -> bool:
    return equal_up_to_global_phase(sagnac_composite(theta).matrix, sagnac_swap().matrix, tol)
