"""Acceptance checks, one test per requirement.

Reference values come from the independent oracles in ``oracles.py`` or are
frozen literals computed from them before the library was written.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from qwalk4.coins import (
    compile_circuit,
    grover4,
    grover_circuit,
    hadamard4,
    hadamard_circuit,
    modified_coin,
    sagnac_swap,
)
from qwalk4.embedding import (
    EmbeddingParams,
    embedded_shifts,
    oracle_2d_walk,
    overlap_check,
    run_embedded_2d,
)
from qwalk4.experiments import PRESETS, emit, parse_csv, parse_json, preset_config, run_experiment, run_preset
from qwalk4.optics import (
    KET_H,
    KET_L,
    KET_R,
    OpticalElement,
    dove_prism,
    element_unitary,
    half_wave_plate,
    mode_converter_half_pi,
    mode_converter_pi,
    polarization_rotator,
    q_plate,
    qplate_roundtrip_check,
    quarter_wave_plate,
    sagnac_composite,
)
from qwalk4.tensor_core import H2, equal_up_to_global_phase, is_unitary, tensor2x2
from qwalk4.walk import PHI1, PHI2, PHI3, WalkConfig, evolve, position_distribution
from oracles import dense_walk, lattice_walk_2d, max_abs_diff

# written out by hand from the reference matrix product (swap rows 1 and 3 of the Grover coin)
GOLDEN_SWAP_GROVER = 0.5 * np.array(
    [[-1, 1, 1, 1], [1, 1, 1, -1], [1, 1, -1, 1], [1, -1, 1, 1]], dtype=complex
)
H4_LITERAL = 0.5 * np.array(
    [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], dtype=complex
)
GROVER_LITERAL = 0.5 * np.ones((4, 4), dtype=complex) - np.eye(4)
SHIFTS = (1, -1, 2, -2)


def _all_elements():
    angles = np.linspace(-np.pi, np.pi, 13)
    out = []
    for a in angles:
        out += [half_wave_plate(a), quarter_wave_plate(a), polarization_rotator(a),
                mode_converter_pi(a), mode_converter_half_pi(a), dove_prism(a), dove_prism(a, 3)]
    out += [q_plate(Fraction(k, 2)) for k in (-4, -3, -2, -1, 1, 2, 3, 4)]
    return out


def test_01_unitarity_suite():
    t0 = time.perf_counter()
    mats = [hadamard4().matrix, grover4().matrix, sagnac_swap().matrix,
            compile_circuit(grover_circuit()).matrix, compile_circuit(hadamard_circuit()).matrix,
            compile_circuit(hadamard_circuit(True)).matrix]
    mats += [element_unitary(e) for e in _all_elements()]
    ok = all(is_unitary(m, 1e-12) for m in mats)
    elapsed = time.perf_counter() - t0
    assert ok
    assert elapsed < 0.1, f"{elapsed:.3f} s"


def test_02_tensor_identity_exact():
    got = tensor2x2(H2, H2)
    # each entry is (1/sqrt 2)^2 in floating point; must equal +-1/2 bit for bit
    assert np.array_equal(got, H4_LITERAL), f"max deviation {np.max(np.abs(got - H4_LITERAL)):.3g}"


def test_03_grover_circuit_regression():
    oracle = sagnac_swap().matrix.conj().T @ GROVER_LITERAL
    assert np.array_equal(oracle, GOLDEN_SWAP_GROVER)
    compiled = compile_circuit(grover_circuit()).matrix
    assert equal_up_to_global_phase(compiled, GOLDEN_SWAP_GROVER, 1e-8)
    assert equal_up_to_global_phase(compiled, modified_coin(grover4()).matrix, 1e-8)


def test_04_sagnac_reconstruction():
    assert equal_up_to_global_phase(sagnac_composite(np.pi / 8).matrix, sagnac_swap().matrix, 1e-10)
    loop = sagnac_composite(np.pi / 8, include_post=False).matrix
    plus, minus = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    rng = np.random.default_rng(11)
    for _ in range(5):
        ab = rng.normal(size=2) + 1j * rng.normal(size=2)
        alpha, beta = ab / np.linalg.norm(ab)
        v = np.kron(KET_H, alpha * plus + beta * minus)
        want = alpha * np.kron(KET_R, minus) + 1j * beta * np.kron(KET_L, plus)
        assert equal_up_to_global_phase(loop @ v, want, 1e-10)


def test_05_norm_conservation():
    for name in sorted(PRESETS):
        res = run_experiment(preset_config(name))
        assert len(res.totals) == res.config.steps + 1
        worst = max(abs(t - 1) for t in res.totals)
        assert worst <= 1e-12, f"{name}: {worst:.3g}"


def _walk(coin, v, steps=12, shifts=SHIFTS, **kw):
    return evolve(WalkConfig(coin=coin, shifts=shifts, steps=steps, initial_coin=v, **kw))


def _argmax(dist):
    return max(dist, key=lambda n: (dist[n], -abs(n)))


def test_06_localization_contrast():
    t0 = time.perf_counter()
    loc = position_distribution(_walk(grover4(), PHI1)[-1])
    spread = position_distribution(_walk(grover4(), PHI2)[-1])
    elapsed = time.perf_counter() - t0
    for v, got in ((PHI1, loc), (PHI2, spread)):
        ref = dense_walk(GROVER_LITERAL, SHIFTS, 12, v)[-1]
        assert max_abs_diff(got, ref) <= 1e-12
    assert elapsed < 1.0
    midpoint = (12 * min(SHIFTS) + 12 * max(SHIFTS)) // 2
    assert _argmax(loc) == midpoint, f"phi1 peaks at {_argmax(loc)}, not {midpoint}"
    assert _argmax(spread) != midpoint, f"phi2 peaks at the midpoint {midpoint}"


def test_07_hadamard_walk():
    got = position_distribution(_walk(hadamard4(), PHI3)[-1])
    ref = dense_walk(H4_LITERAL, SHIFTS, 12, PHI3)[-1]
    assert max_abs_diff(got, ref) <= 1e-12


def test_08_two_dimensional_embedding():
    cases = [(21, 10), (3, 1), (5, 2)]
    for N, steps in cases:
        p = EmbeddingParams(N, steps)
        for coin in (hadamard4(), grover4()):
            for v in (PHI1, PHI2, PHI3):
                traj = _walk(coin, v, steps=steps, shifts=embedded_shifts(p).e)
                assert overlap_check(p, traj)
                got = run_embedded_2d(coin, v, p)
                assert max_abs_diff(got, oracle_2d_walk(coin, v, steps)) <= 1e-12
                assert max_abs_diff(got, lattice_walk_2d(coin.matrix, v, steps)) <= 1e-12


def test_09_swap_absorption():
    for coin in (hadamard4(), grover4()):
        for v in (PHI1, PHI2, PHI3):
            a = _walk(coin, v, apply_sagnac_swap=True)
            b = _walk(modified_coin(coin), v)
            for sa, sb in zip(a, b):
                keys = set(sa.amplitudes) | set(sb.amplitudes)
                diff = max(np.max(np.abs(sa.amplitude(n) - sb.amplitude(n))) for n in keys)
                assert diff <= 1e-12


def test_10_qplate_roundtrip():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(z)
        inner = q * (np.diag(r) / np.abs(np.diag(r)))
        assert qplate_roundtrip_check(Fraction(1, 2), inner, 1e-12)


def test_11_io_determinism(tmp_path):
    for name in sorted(PRESETS):
        a, b = tmp_path / f"{name}_a", tmp_path / f"{name}_b"
        a.mkdir()
        b.mkdir()
        for x, y in zip(run_preset(name, a), run_preset(name, b)):
            assert x.read_bytes() == y.read_bytes(), x.name
        res = run_experiment(preset_config(name))
        for fmt, parse in (("csv", parse_csv), ("json", parse_json)):
            back = parse(emit(res.records, fmt, res.metadata))
            assert sorted(back, key=repr) == sorted(res.records, key=repr)
