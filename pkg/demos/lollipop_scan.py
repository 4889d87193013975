#!/usr/bin/env python3
"""Seeing the lollipop: sigma_min(Z_N - lambda) over a window of the plane.

Finite sections in the monomial basis are triangular and their eigenvalues
1, 1/2, 1/3, ... say nothing about the spectrum. Smallest singular values of
Legendre sections do. Pass a path to also write the SVG heat map.
"""

import sys
import time

import numpy as np

from hwlab import ScanGrid, lollipop_distance_profile, pseudospectrum, sigma_min, truncation_eigenvalues
from hwlab.cli import main as cli

# %% monomial eigenvalues vs the real picture
print("monomial section eigenvalues:", [f"{complex(v).real:.3f}" for v in truncation_eigenvalues("H - Mx", "monomial", 6)])
print("Legendre section eigenvalues:", np.round(sorted(truncation_eigenvalues("H - Mx", "legendre_orthonormal", 6), key=np.real), 3))

# %% a coarse character plot; darker means smaller sigma_min
grid = ScanGrid((-1.5, 2.5), (-1.5, 1.5), 65, 25)
t0 = time.perf_counter()
res = pseudospectrum("H - Mx", grid, N=64)
print(f"{grid.nx * grid.ny} points in {time.perf_counter() - t0:.2f} s")
shades = "@%#*+=-:. "
logs = np.log10(np.maximum(res.sigma_min, 1e-16)).reshape(grid.ny, grid.nx)
idx = np.clip(((logs + 4) / 4.5 * (len(shades) - 1)).round().astype(int), 0, len(shades) - 1)
for row in idx[::-1]:
    print("".join(shades[i] for i in row))

# %% sigma_min grows with the distance to the lollipop
prof = lollipop_distance_profile(res)
for (lo, hi), med, n in zip([(0, .05), (.05, .2), (.2, .5), (.5, np.inf)], prof.medians, prof.counts):
    print(f"dist in [{lo}, {hi}): median sigma_min {med:.3f} over {n} points")

# %% segment points are eigenvalues too; the section sees them as N grows
for N in (16, 32, 64):
    print(f"N={N:3}: sigma_min at -0.5 = {sigma_min('H - Mx', [-0.5], N=N)[0]:.2e}")

if len(sys.argv) > 1:
    sys.exit(cli(["scan", "--out", sys.argv[1]]))
