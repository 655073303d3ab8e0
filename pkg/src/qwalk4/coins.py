"""
Named coin operators, the Sagnac swap, and two-qubit gate circuits.

A coin is a 4x4 unitary on [H+, H-, V+, V-]. Circuits are lists of layers
acting on the polarization qubit ("pol"), the OAM qubit ("oam"), or a CNOT
with polarization as control and OAM as target. Layers are listed in time
order: ``layers[0]`` acts on the photon first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .tensor_core import (
    ALGEBRAIC_TOL,
    H2,
    I2,
    I4,
    as_matrix,
    is_unitary,
    tensor2x2,
)

__all__ = [
    "CoinOperator",
    "SingleQubitGate",
    "CNOT",
    "CNOT_MATRIX",
    "GateCircuit",
    "hadamard4",
    "grover4",
    "sagnac_swap",
    "identity4",
    "modified_coin",
    "compile_circuit",
    "grover_circuit",
    "hadamard_circuit",
    "PRINTED_GROVER_GATES",
    "GROVER_GATES",
    "COIN_REGISTRY",
    "coin_from_name",
    "load_coin_file",
]


@dataclass(frozen=True)
class CoinOperator:
    """A named 4x4 unitary acting on the coin space."""

    name: str
    matrix: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (4, 4):
            raise ValueError(f"coin {self.name!r} must be 4x4, got {m.shape}")
        if not is_unitary(m, ALGEBRAIC_TOL):
            raise ValueError(f"coin {self.name!r} is not unitary")
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other):
        if isinstance(other, CoinOperator):
            return CoinOperator(f"{self.name}*{other.name}", self.matrix @ other.matrix)
        return self.matrix @ np.asarray(other)


def hadamard4() -> CoinOperator:
    m = 0.5 * np.array(
        [
            [1, 1, 1, 1],
            [1, -1, 1, -1],
            [1, 1, -1, -1],
            [1, -1, -1, 1],
        ],
        dtype=np.complex128,
    )
    return CoinOperator("hadamard4", m)


def grover4() -> CoinOperator:
    """Grover diffusion coin: -1/2 on the diagonal, +1/2 elsewhere."""
    m = 0.5 * np.ones((4, 4), dtype=np.complex128) - np.eye(4, dtype=np.complex128)
    return CoinOperator("grover4", m)


def identity4() -> CoinOperator:
    return CoinOperator("identity4", I4)


def sagnac_swap() -> CoinOperator:
    """Permutation exchanging |H-> and |V->, identity on |H+> and |V+>."""
    m = np.eye(4, dtype=np.complex128)[[0, 3, 2, 1]]
    return CoinOperator("sagnac_swap", m)


def modified_coin(c: CoinOperator) -> CoinOperator:
    """Coin pre-compensated for the Sagnac swap: ``U_SI^-1 @ c``.

    The swap is its own inverse, so applying this twice returns ``c``.
    """
    swap = sagnac_swap().matrix
    name = c.name[:-1] if c.name.endswith("'") else c.name + "'"
    return CoinOperator(name, swap.conj().T @ c.matrix)


# --------------------------------------------------------------------------
# circuits
# --------------------------------------------------------------------------

CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
CNOT_MATRIX.flags.writeable = False


@dataclass(frozen=True)
class SingleQubitGate:
    qubit: str  # "pol" or "oam"
    matrix: NDArray[np.complex128] = field(repr=False)
    label: str = ""

    def __post_init__(self):
        if self.qubit not in ("pol", "oam"):
            raise ValueError(f"qubit must be 'pol' or 'oam', got {self.qubit!r}")
        m = as_matrix(self.matrix)
        if m.shape != (2, 2):
            raise ValueError("single-qubit gate must be 2x2")
        if not is_unitary(m, ALGEBRAIC_TOL):
            raise ValueError(f"gate {self.label or self.qubit!r} is not unitary")
        object.__setattr__(self, "matrix", m)

    def full_matrix(self) -> NDArray[np.complex128]:
        if self.qubit == "pol":
            return tensor2x2(self.matrix, I2)
        return tensor2x2(I2, self.matrix)


@dataclass(frozen=True)
class _Cnot:
    """CNOT with polarization as control and OAM as target."""

    label: str = "CNOT"

    def full_matrix(self) -> NDArray[np.complex128]:
        return CNOT_MATRIX


CNOT = _Cnot()

Layer = Union[SingleQubitGate, _Cnot]


@dataclass(frozen=True)
class GateCircuit:
    layers: tuple[Layer, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    def __add__(self, other: "GateCircuit") -> "GateCircuit":
        return GateCircuit(self.layers + other.layers)

    def __len__(self):
        return len(self.layers)


def compile_circuit(g: GateCircuit, name: str = "circuit") -> CoinOperator:
    """Multiply the layer unitaries so that ``g.layers[0]`` acts first."""
    if len(g.layers) == 0:
        raise ValueError("cannot compile an empty circuit")
    m = np.eye(4, dtype=np.complex128)
    for layer in g.layers:
        m = layer.full_matrix() @ m
    return CoinOperator(name, m)


_W = np.exp(-1j * np.pi / 4)

# Gates exactly as typeset next to the modified-Grover circuit diagram.
# U2's printed prefactor is 1/2, which makes it non-unitary.
PRINTED_GROVER_GATES: dict[str, NDArray[np.complex128]] = {
    "U1": _W / np.sqrt(2) * np.array([[1, 1], [-1, 1]], dtype=np.complex128),
    "U2": _W / 2 * np.array([[1, -1], [-1j, -1j]], dtype=np.complex128),
    "V1": _W / np.sqrt(2) * np.array([[1j, 1], [-1j, 1]], dtype=np.complex128),
    "V2": _W / np.sqrt(2) * np.array([[-1j, -1j], [1, -1]], dtype=np.complex128),
}

# Same gates with U2 carrying the 1/sqrt(2) prefactor of its siblings.
GROVER_GATES: dict[str, NDArray[np.complex128]] = dict(PRINTED_GROVER_GATES)
GROVER_GATES["U2"] = _W / np.sqrt(2) * np.array([[1, -1], [-1j, -1j]], dtype=np.complex128)
for _g in (*PRINTED_GROVER_GATES.values(), *GROVER_GATES.values()):
    _g.flags.writeable = False


def grover_circuit() -> GateCircuit:
    """Five-layer circuit realizing the swap-compensated Grover coin.

    The diagram is an operator product: U2 and V2 reach the photon first, then
    the CNOT, then U1 and V1. The result equals ``U_SI^-1 @ U_G``.
    """
    g = GROVER_GATES
    return GateCircuit(
        (
            SingleQubitGate("pol", g["U2"], "U2"),
            SingleQubitGate("oam", g["V2"], "V2"),
            CNOT,
            SingleQubitGate("pol", g["U1"], "U1"),
            SingleQubitGate("oam", g["V1"], "V1"),
        )
    )


def hadamard_circuit(corrected: bool = False) -> GateCircuit:
    """Half-wave plate on polarization and pi mode converter on OAM.

    With ``corrected`` a CNOT is applied before the Hadamards, because
    ``U_SI^-1 @ H4 == H4 @ CNOT``.
    """
    hadamards = (SingleQubitGate("pol", H2, "H2"), SingleQubitGate("oam", H2, "H2"))
    if corrected:
        return GateCircuit((CNOT, *hadamards))
    return GateCircuit(hadamards)


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

COIN_REGISTRY = {
    "hadamard4": hadamard4,
    "grover4": grover4,
    "sagnac_swap": sagnac_swap,
    "identity4": identity4,
}


def load_coin_file(path: str | Path) -> CoinOperator:
    """Read a 4x4 coin from JSON: a row-major list of 16 ``[re, im]`` pairs.

    A nested 4x4 list of pairs is accepted as well.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2 or arr.size != 32:
        raise ValueError(f"{path}: expected 16 [re, im] pairs")
    arr = arr.reshape(16, 2)
    m = (arr[:, 0] + 1j * arr[:, 1]).reshape(4, 4)
    return CoinOperator(f"file:{path}", m)


def coin_from_name(name: str) -> CoinOperator:
    """Resolve a registry identifier or ``file:<path>``."""
    if name.startswith("file:"):
        return load_coin_file(name[len("file:"):])
    try:
        return COIN_REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown coin {name!r}; known: {sorted(COIN_REGISTRY)}") from None


def coin_matrix_to_json(m: ArrayLike) -> list[list[float]]:
    m = np.asarray(m, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in m]
