"""Pseudospectral scans of finite sections.

Finite-section eigenvalues of a non-normal operator can be badly misleading:
the monomial compression of ``Z`` is lower triangular with diagonal
``1/(n+1)``, nowhere near the lollipop. The scans below therefore look at
``sigma_min(A_N - lambda)`` of Legendre compressions instead.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .calkin import Lollipop
from .errors import InvalidArgument
from .operators import assemble_word
from .words import OperatorWord, parse_word

BANDS = (0.0, 0.05, 0.2, 0.5, np.inf)


@dataclass(frozen=True)
class ScanGrid:
    re_range: tuple = (-1.5, 2.5)
    im_range: tuple = (-1.5, 1.5)
    nx: int = 121
    ny: int = 91

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise InvalidArgument("a scan grid needs at least 2 points per axis")
        if not all(np.isfinite(v) for v in (*self.re_range, *self.im_range)):
            raise InvalidArgument("scan ranges must be finite")
        if self.re_range[0] >= self.re_range[1] or self.im_range[0] >= self.im_range[1]:
            raise InvalidArgument("scan ranges must be increasing")

    def points(self):
        """Row-major: rows follow the imaginary axis, columns the real axis."""
        re = np.linspace(*self.re_range, self.nx)
        im = np.linspace(*self.im_range, self.ny)
        return (re[None, :] + 1j * im[:, None]).ravel()


@dataclass(frozen=True)
class ScanResult:
    points: np.ndarray = field(repr=False)
    sigma_min: np.ndarray = field(repr=False)
    N: int
    basis: str
    grid: ScanGrid = None

    def as_rows(self):
        return [(float(z.real), float(z.imag), float(s)) for z, s in zip(self.points, self.sigma_min)]


def _word(word):
    return parse_word(word) if isinstance(word, str) else word


def _smallest(A, lams):
    eye = np.eye(A.shape[0])
    stack = A[None, :, :] - lams[:, None, None] * eye
    return np.linalg.svd(stack, compute_uv=False)[:, -1]


def sigma_min(word, lams, N=64, basis="legendre_orthonormal", chunk=256):
    """``sigma_min(A_N - lambda)`` for every ``lambda`` in ``lams``, in order."""
    A = assemble_word(_word(word), basis, N).entries
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    parts = [lams[i:i + chunk] for i in range(0, lams.size, chunk)]
    workers = int(os.environ.get("HW_LAB_THREADS", "0")) or min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        out = list(pool.map(lambda p: _smallest(A, p), parts))
    return np.concatenate(out) if out else np.zeros(0)


def pseudospectrum(word, grid=None, N=64, basis="legendre_orthonormal"):
    grid = ScanGrid() if grid is None else grid
    pts = grid.points()
    return ScanResult(pts, sigma_min(word, pts, N, basis), int(N), basis, grid)


def truncation_eigenvalues(word, basis="legendre_orthonormal", N=8):
    """Eigenvalues of the size-N compression.

    Triangular compressions return their diagonal directly, so the monomial
    case gives exactly ``1, 1/2, ..., 1/N`` for ``H`` and ``Z``.
    """
    if N < 1:
        raise InvalidArgument("N must be positive")
    A = assemble_word(_word(word), basis, N).entries
    if np.allclose(np.triu(A, 1), 0, atol=0) or np.allclose(np.tril(A, -1), 0, atol=0):
        return list(np.diag(A))
    return list(np.linalg.eigvals(A))


def exact_monomial_diagonal(N):
    """Diagonal of the monomial compressions of ``H`` and ``Z``, as fractions."""
    return [Fraction(1, n + 1) for n in range(N)]


@dataclass(frozen=True)
class DistanceProfile:
    distances: np.ndarray = field(repr=False)
    sigma_min: np.ndarray = field(repr=False)
    medians: tuple
    counts: tuple

    @property
    def increasing(self):
        m = [v for v in self.medians if np.isfinite(v)]
        return all(a < b for a, b in zip(m, m[1:]))

    def band_of(self, z):
        d = float(Lollipop.distance(z))
        return int(np.searchsorted(BANDS, d, side="right") - 1)


def lollipop_distance_profile(result):
    """Median ``sigma_min`` within the distance bands to the lollipop."""
    d = np.asarray(Lollipop.distance(result.points), dtype=float)
    med, counts = [], []
    for lo, hi in zip(BANDS, BANDS[1:]):
        sel = (d >= lo) & (d < hi)
        counts.append(int(sel.sum()))
        med.append(float(np.median(result.sigma_min[sel])) if sel.any() else float("nan"))
    return DistanceProfile(d, np.asarray(result.sigma_min), tuple(med), tuple(counts))


def Z_word():
    return OperatorWord.from_terms([(1, ("H",)), (-1, ("Mx",))])
