#!/usr/bin/env python3
"""Symbols modulo compacts, Fredholm indices and witness sequences."""

from hwlab import SymbolPair, fredholm_index, mixed_defect, parse_word, product_defect, spike_rows, symbol_of, upsilon_rows
from hwlab.calkin import fit_exponent



# %% V is compact, and so is any product mixing H with Mx: their symbols vanish
for text in ("H - Mx", "V", "H*Mx", "Mx^2 + 2i*H^3", "(H - Mx)^2 - 3*V*H"):
    print(f"{text:22} {symbol_of(parse_word(text))}")

# %% the symbol map is multiplicative only up to compacts; the defect decays with N
rep = product_defect(SymbolPair.identity(), SymbolPair.identity(), (16, 32, 64, 128))
print("sigma_(N/4) of gamma(f)gamma(g) - gamma(fg):", ", ".join(f"{v:.3e}" for v in rep.sigma_quarter))
print("successive ratios:", ", ".join(f"{r:.3f}" for r in rep.ratios))
rep = mixed_defect([0, 1], [0, 1])
print("mixed f(-Mx) g(H) defect:", ", ".join(f"{v:.3e}" for v in rep.sigma_quarter))

# %% index of Z - lambda: winding of the boundary curve around lambda
f = SymbolPair.identity()
for lam in (1, 1.5 + 0.3j, 3, -0.5 + 0.5j, -2):
    print(f"index at {lam}: {fredholm_index(f, lam)}")
cube = SymbolPair((-1,), (-1, 3, -3, 1))  # (z - 1)^3
print("f_plus = (z - 1)^3, index at 0:", fredholm_index(cube, 0))

# %% spike vectors concentrate at s; H kills them in the limit
rows = spike_rows(0.3, [8, 16, 32, 64, 128])
for r in rows:
    print(f"n={r.param:4}  <x^2 chi, chi> = {r.value:.8f}  (limit {r.predicted})  |H chi| = {r.extra:.4f}")
print("error exponent:", round(fit_exponent([r.param for r in rows], [r.error for r in rows]), 3))

# %% Upsilon_a for a -> 1: the x-moment tends to 0
for r in upsilon_rows(1, [0, 0.5, 0.9, 0.99, 0.999]):
    print(f"a={r.param.real:.3f}  <x U, U> = {r.value:.6f}  closed form {r.predicted:.6f}")
