"""Grover-coin walk with shifts (+1, -1, +2, -2) from the two uniform-magnitude states.

One of them stays near the origin, the other runs away ballistically.
"""

import numpy as np

from qwalk4.coins import grover4
from qwalk4.walk import PHI1, PHI2, WalkConfig, evolve, position_distribution


def bars(dist, width=50):
    top = max(dist.values())
    for n in range(min(dist), max(dist) + 1):
        p = dist.get(n, 0.0)
        print(f"{n:4d} {p:.4f} " + "#" * int(round(width * p / top)))


for label, v in (("phi1", PHI1), ("phi2", PHI2)):
    traj = evolve(WalkConfig(coin=grover4(), initial_coin=v, steps=12))
    final = position_distribution(traj[-1])
    peak = max(final, key=final.get)
    print(f"\n{label}: p(0) = {final.get(0, 0):.4f}, most likely position {peak}")
    bars(final)

# the state that stays put is the +1 eigenvector of the coin
g = grover4().matrix
print("\nG phi2 == phi2:", np.allclose(g @ PHI2, PHI2))
