"""Coins, the Sagnac swap, and the gate circuits that undo it.

Run with ``python demos/01_coins_and_circuits.py``.
"""

import numpy as np

from qwalk4 import coins
from qwalk4.tensor_core import H2, equal_up_to_global_phase, tensor2x2

np.set_printoptions(precision=3, suppress=True)

# The four-state Hadamard coin is a wave plate on polarization next to a
# mode converter on OAM.
h4 = coins.hadamard4()
print("H4 =\n", h4.matrix.real)
print("H2 (x) H2 - H4, largest entry:", np.max(np.abs(tensor2x2(H2, H2) - h4.matrix)))

# The Grover coin entangles the two qubits, so it needs a CNOT.
g = coins.grover4()
print("Grover coin =\n", g.matrix.real)

# The interferometer swaps |H-> and |V->; pre-compensating a coin means
# multiplying by the inverse swap.
swap = coins.sagnac_swap()
gp = coins.modified_coin(g)
print("swap-compensated Grover =\n", gp.matrix.real)

compiled = coins.compile_circuit(coins.grover_circuit(), "G'")
print("five-layer circuit reproduces it:", equal_up_to_global_phase(compiled.matrix, gp.matrix, 1e-12))

hp = coins.compile_circuit(coins.hadamard_circuit(corrected=True))
print("CNOT then two Hadamards gives H4':",
      equal_up_to_global_phase(hp.matrix, coins.modified_coin(h4).matrix, 1e-12))

# The U2 gate as typeset has prefactor 1/2 and is not unitary.
u2 = coins.PRINTED_GROVER_GATES["U2"]
print("printed U2: max |U2^dag U2 - I| =", np.max(np.abs(u2.conj().T @ u2 - np.eye(2))))
