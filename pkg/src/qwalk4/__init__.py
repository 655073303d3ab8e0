"""Discrete-time quantum walks with a four-state polarization x OAM coin."""

from .coins import (
    CoinOperator,
    GateCircuit,
    compile_circuit,
    grover4,
    grover_circuit,
    hadamard4,
    hadamard_circuit,
    modified_coin,
    sagnac_swap,
)
from .embedding import EmbeddingParams, decode_position, oracle_2d_walk, overlap_check, run_embedded_2d
from .optics import prepare_initial_state, qplate_roundtrip_check, sagnac_composite
from .tensor_core import COIN_BASIS, equal_up_to_global_phase, is_unitary, tensor2x2
from .walk import PHI1, PHI2, PHI3, ShiftVector, WalkConfig, evolve, position_distribution, step

__version__ = "0.1.0"
