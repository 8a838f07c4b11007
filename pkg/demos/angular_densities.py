"""Tables of the conditional angular densities of the lattice walk (F) and of log det(I - U) for CUE (H).

Run with ``python demos/angular_densities.py``.
"""
import math

import numpy as np

from modgauss.largedev import cue_sector_density, lattice_axis_mass, lattice_conditional_density

theta = np.linspace(0, math.pi / 2, 7)
print("F(r, theta), simple walk on Z^2 given a large radius")
print("theta   " + "".join(f"r={r:<9g}" for r in (0.5, 1.0, 1.5, 2.0)))
for th in theta:
    print(f"{th:6.3f}  " + "".join(f"{lattice_conditional_density(r, th):<11.5f}" for r in (0.5, 1.0, 1.5, 2.0)))
print("\nmass within pi/16 of an axis:", ", ".join(f"r={r}: {lattice_axis_mass(r):.4f}" for r in (0, 1, 2)))

theta = np.linspace(0, math.pi, 7)
print("\nH(r, theta), CUE log-determinant")
print("theta   " + "".join(f"r={r:<9g}" for r in (0.3, 0.7, 0.8)))
for th in theta:
    print(f"{th:6.3f}  " + "".join(f"{cue_sector_density(r, th):<11.5f}" for r in (0.3, 0.7, 0.8)))
