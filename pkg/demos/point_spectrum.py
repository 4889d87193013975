#!/usr/bin/env python3
"""Eigenfunctions and generalized eigenvectors of Z = H - Mx."""

import numpy as np

from hwlab import (
    chain_numeric,
    chain_zero,
    chain_zero_family,
    classify,
    derivative_functional,
    eigen_residual,
    eigenfunction,
    growth_bound_check,
    threshold,
)

# %% eigenvalues fill the open disc |lambda - 1| < 1 and the segment (-1, 0]
for lam in (1, 1 + 0.5j, 0.2, 0, -0.25, -0.9):
    print(f"{str(lam):>11}  {classify(lam):5}  {eigenfunction(lam)!r:62}  residual {eigen_residual(lam):.1e}")

for lam in (2, 1 + 1j, -1, 3, -0.5 + 0.1j):
    print(f"{str(lam):>11}  {classify(lam)}")

# %% at 0 the chain is exp(-1/x) p_n(1/x) with exact rational p_n
for n, p in enumerate(chain_zero(4)):
    print(f"p_{n} = {p}")
print("residuals:", ", ".join(f"{r:.1e}" for r in chain_zero_family(4).residuals()))

# %% on the segment, longer chains need lambda closer to 0
for m in (1, 2, 3):
    print(f"order {m}: lambda must exceed {threshold(m):.4f}")

fam = chain_numeric(-0.3, 2)
print("chain residuals at -0.3:", ", ".join(f"{r:.1e}" for r in fam.residuals()))
for n, measured, bound in growth_bound_check(fam):
    print(f"  M_{n}: measured {measured:10.4g}   bound {bound:10.4g}")

# %% pairing p(Z) f_1 with the dual vector recovers p'(lambda)
rng = np.random.default_rng(1)
p = rng.normal(size=5)
dp = np.polynomial.polynomial.polyval(-0.4, np.polynomial.polynomial.polyder(p))
print(f"p'(-0.4) = {dp:.12f}")
print(f"apply    = {derivative_functional(-0.4, p, 'apply').real:.12f}")
