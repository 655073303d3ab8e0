"""
Small dense complex linear algebra for the coin space.

All matrices are numpy ``complex128`` arrays of shape (d, d) with d in {2, 4, 6}.
The coin basis ordering is fixed once here and every other module indexes
coin states through it:

    index   label   computational
    -----   -----   -------------
      0      H+         |00>
      1      H-         |01>
      2      V+         |10>
      3      V-         |11>

Polarization is the first (most significant) qubit, OAM the second.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "COIN_BASIS",
    "COIN_INDEX",
    "ALLOWED_DIMS",
    "ALGEBRAIC_TOL",
    "CIRCUIT_TOL",
    "as_matrix",
    "as_state",
    "mat_mul",
    "tensor2x2",
    "is_unitary",
    "equal_up_to_global_phase",
    "I2",
    "I4",
    "H2",
    "X2",
]

COIN_BASIS: tuple[str, ...] = ("H+", "H-", "V+", "V-")
COIN_INDEX: dict[str, int] = {label: i for i, label in enumerate(COIN_BASIS)}

ALLOWED_DIMS = (2, 4, 6)

ALGEBRAIC_TOL = 1e-12
CIRCUIT_TOL = 1e-8


def _frozen(a: NDArray) -> NDArray[np.complex128]:
    a.flags.writeable = False
    return a


def as_matrix(m: ArrayLike) -> NDArray[np.complex128]:
    """Validate and return ``m`` as a read-only square complex matrix.

    Raises ``ValueError`` for non-square input, a dimension outside
    {2, 4, 6}, or non-finite entries.
    """
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] not in ALLOWED_DIMS:
        raise ValueError(f"matrix dimension must be one of {ALLOWED_DIMS}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return _frozen(a)


def as_state(v: ArrayLike, dim: int = 4) -> NDArray[np.complex128]:
    """Validate and return ``v`` as a read-only complex vector of length ``dim``."""
    a = np.array(v, dtype=np.complex128).reshape(-1)
    if a.shape != (dim,):
        raise ValueError(f"expected a vector of length {dim}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("state has non-finite amplitudes")
    return _frozen(a)


def mat_mul(a: ArrayLike, b: ArrayLike) -> NDArray[np.complex128]:
    """Matrix product ``a @ b``; both operands must share one allowed dimension."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return _frozen(a @ b)


def tensor2x2(p: ArrayLike, q: ArrayLike) -> NDArray[np.complex128]:
    """Kronecker product of a polarization 2x2 ``p`` and an OAM 2x2 ``q``.

    The polarization factor is the most significant qubit, so the result is
    ``np.kron(p, q)`` in the [H+, H-, V+, V-] ordering.
    """
    p, q = as_matrix(p), as_matrix(q)
    if p.shape != (2, 2) or q.shape != (2, 2):
        raise ValueError("tensor2x2 needs two 2x2 factors")
    return _frozen(np.kron(p, q))


def is_unitary(m: ArrayLike, tol: float = ALGEBRAIC_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    err = a.conj().T @ a - np.eye(a.shape[0])
    return bool(np.max(np.abs(err)) <= tol)


def equal_up_to_global_phase(a: ArrayLike, b: ArrayLike, tol: float = ALGEBRAIC_TOL) -> bool:
    """True if ``a == lam * b`` entrywise within ``tol`` for some |lam| = 1.

    ``lam`` is taken from the ratio at the largest-modulus entry of ``b`` so we
    never divide by a near-zero entry. Works for matrices and state vectors of
    matching shape.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if b[k] == 0:
        raise ValueError("reference operand is identically zero")
    ratio = a[k] / b[k]
    if ratio == 0:
        return False
    lam = ratio / abs(ratio)
    return bool(np.max(np.abs(a - lam * b)) <= tol)


I2 = _frozen(np.eye(2, dtype=np.complex128))
I4 = _frozen(np.eye(4, dtype=np.complex128))
H2 = _frozen(np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2))
X2 = _frozen(np.array([[0, 1], [1, 0]], dtype=np.complex128))
