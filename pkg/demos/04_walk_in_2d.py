"""A 2D lattice walk carried by one time-bin axis.

Shifts of +-1 move along x, shifts of +-N along y. With N = 21 the first ten
steps never let two lattice points land in the same bin.
"""

from qwalk4.coins import hadamard4
from qwalk4.embedding import EmbeddingParams, oracle_2d_walk, run_embedded_2d
from qwalk4.walk import PHI2

p = EmbeddingParams(N=21, steps=10)
grid = run_embedded_2d(hadamard4(), PHI2, p)
ref = oracle_2d_walk(hadamard4(), PHI2, p.steps)
print("largest difference from direct lattice walk:",
      max(abs(grid.get(k, 0) - ref.get(k, 0)) for k in set(grid) | set(ref)))

shades = " .:-=+*#%@"
top = max(grid.values())
for y in range(p.steps, -p.steps - 1, -1):
    row = ""
    for x in range(-p.steps, p.steps + 1):
        val = grid.get((x, y), 0.0)
        row += shades[min(len(shades) - 1, int(val / top * (len(shades) - 1) + 0.999))] if val else " "
    print(row)
