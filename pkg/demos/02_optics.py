"""Wave plates, the Dove prism inside a Sagnac loop, and q-plates."""

from fractions import Fraction

import numpy as np

from qwalk4 import optics
from qwalk4.coins import sagnac_swap
from qwalk4.tensor_core import H2, equal_up_to_global_phase

np.set_printoptions(precision=3, suppress=True)

hwp = optics.element_unitary(optics.half_wave_plate(np.pi / 8))
print("HWP at pi/8 is the Hadamard:", np.allclose(hwp, H2))

# Sweep the prism angle: only pi/8 turns the loop into the swap.
for theta in np.linspace(0, np.pi / 4, 5):
    ok = equal_up_to_global_phase(optics.sagnac_composite(theta).matrix, sagnac_swap().matrix, 1e-10)
    print(f"theta = {theta:.4f}  loop == swap: {ok}")

loop = optics.sagnac_composite(np.pi / 8, include_post=False).matrix
alpha, beta = 0.6, 0.8
v = np.kron(optics.KET_H, [alpha, beta])
out = loop @ v
want = alpha * np.kron(optics.KET_R, [0, 1]) + 1j * beta * np.kron(optics.KET_L, [1, 0])
print("state leaving the loop matches a|R,-> + i b|L,+>:", equal_up_to_global_phase(out, want, 1e-12))

# A pair of q = 1/2 plates sandwiching any polarization operation on l = 0.
inner = optics.element_unitary(optics.quarter_wave_plate(0.3))
print("q-plate roundtrip behaves:", optics.qplate_roundtrip_check(Fraction(1, 2), inner))

# Recipe for the uniform superposition starting from |H> with no OAM.
prep = optics.prepare_initial_state(np.full(4, 0.5))
print("preparation elements:", [e.kind for e in prep.elements])
print("then apply:", prep.residual.name, " entangling:", prep.entangling)
