#!/usr/bin/env python3
"""Approximating the Volterra operator by finite ranks that factor through V."""

import numpy as np

from hwlab import KernelFunction, block_diagonal_norm, dyadic_approximation, is_triangular, rank_one_defect, volterra_kernel

v = volterra_kernel()
print("triangular:", is_triangular(v), "   norm at N=256:", round(np.linalg.norm(v.matrix(256), 2), 6), " 2/pi =", round(2 / np.pi, 6))

# %% the diagonal blocks shrink by half per level
for n in (1, 2, 4, 8, 16):
    print(f"{n:3} blocks: max block norm {block_diagonal_norm(v, n):.6f}")

# %% peel the off-diagonal blocks level by level
print(f"{'L':>2} {'bound':>9} {'error':>9} {'rank':>5}")
for L in range(1, 6):
    res = dyadic_approximation(v, L)
    print(f"{L:2} {res.bound:9.5f} {res.error:9.5f} {res.rank:5}")

# %% every piece phi (x) psi equals M_phi V M_psi^*
res = dyadic_approximation(v, 3)
worst = max(rank_one_defect(p.pair()) for p in res.pieces)
print(f"{res.rank} pieces, largest factorisation defect {worst:.1e}")

# %% a kernel above the diagonal is not reachable this way
try:
    dyadic_approximation(KernelFunction(lambda x, s: np.exp(-abs(x - s))), 2)
except Exception as exc:
    print(type(exc).__name__, "-", exc)
