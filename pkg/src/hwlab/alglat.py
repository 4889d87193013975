"""Rank-one pieces through V, triangular kernels and dyadic block peeling.

Kernels follow the operator convention ``(Tf)(x) = int_0^1 k(x, s) f(s) ds``:
a kernel is triangular when it vanishes for ``s > x``. Sampled kernels live on
the uniform midpoint grid ``x_i = (i + 1/2) / N`` and the operator matrix is
``K / N``. Because that grid has uniform weights, the matrix 2-norm equals
the L^2 operator norm of the sampled operator.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument, InvalidSupports, KernelFormatError, NotInAlgLat
from .forms import ClosedForm, evaluate
from .quadrature import GridFunction, aligned_grid, integration_matrix


def _threads():
    try:
        n = int(os.environ.get("HW_LAB_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


def midpoints(N):
    return (np.arange(N) + 0.5) / N


@dataclass(frozen=True)
class KernelFunction:
    """Kernel ``k(x, s)`` given by a vectorised callable or an N x N sample."""

    k: Optional[Callable] = None
    samples: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if (self.k is None) == (self.samples is None):
            raise InvalidArgument("give exactly one of a callable or a sampled array")
        if self.samples is not None:
            a = np.asarray(self.samples)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise KernelFormatError(f"sampled kernel must be square, got shape {a.shape}")
            if not np.all(np.isfinite(a)):
                raise KernelFormatError("sampled kernel has non-finite entries")
            object.__setattr__(self, "samples", a)

    @property
    def tag(self):
        return "callable" if self.k is not None else f"sampled({self.samples.shape[0]})"

    def sample(self, N=None):
        """Kernel values on the midpoint grid (rows x, columns s)."""
        if self.samples is not None:
            if N is not None and N != self.samples.shape[0]:
                raise InvalidArgument(f"kernel is sampled at N={self.samples.shape[0]}, not {N}")
            return self.samples
        N = 256 if N is None else N
        x = midpoints(N)
        vals = np.asarray(self.k(x[:, None], x[None, :]))
        vals = np.broadcast_to(vals, (N, N))
        if not np.all(np.isfinite(vals)):
            raise KernelFormatError("kernel produced non-finite values")
        return np.array(vals)

    def matrix(self, N=None):
        K = self.sample(N)
        return K / K.shape[0]


def volterra_kernel():
    """``chi_{s < x}``; the diagonal takes the midpoint value 1/2."""
    return KernelFunction(lambda x, s: np.where(s < x, 1.0, np.where(s == x, 0.5, 0.0)))


def load_kernel_csv(path):
    """Read N rows of N comma-separated reals (row index x, column index s)."""
    try:
        a = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except (ValueError, OSError) as exc:
        raise KernelFormatError(f"cannot read kernel from {path}: {exc}") from exc
    return KernelFunction(samples=a)


def is_triangular(kernel, tol=0.0, N=256):
    K = kernel.sample(None if kernel.samples is not None else N)
    return bool(np.all(np.abs(np.triu(K, 1)) <= tol))


@dataclass(frozen=True)
class RankOnePair:
    """``phi`` supported in ``[t, 1]`` and ``psi`` in ``[0, t]``.

    Both may be closed forms, grid functions on a common grid, or plain
    arrays sampled on the uniform midpoint grid.
    """

    phi: object
    psi: object
    t: float

    def __post_init__(self):
        if not 0.0 < self.t < 1.0:
            raise InvalidArgument(f"split point must lie in (0, 1), got {self.t}")


def _breaks(f):
    return f.breakpoints() if isinstance(f, ClosedForm) else ()


def _discretise(pair, N):
    """(nodes, weights, phi, psi, left-integration matrix)."""
    phi, psi = pair.phi, pair.psi
    if isinstance(phi, np.ndarray) or isinstance(psi, np.ndarray):
        phi, psi = np.asarray(phi, complex), np.asarray(psi, complex)
        if phi.shape != psi.shape or phi.ndim != 1:
            raise InvalidArgument("sampled phi and psi must be 1-d arrays of equal length")
        n = phi.size
        x = midpoints(n)
        w = np.full(n, 1.0 / n)
        L = np.tril(np.ones((n, n)), -1) / n + np.eye(n) / (2 * n)
        return x, w, phi, psi, L
    if isinstance(phi, GridFunction) or isinstance(psi, GridFunction):
        if not (isinstance(phi, GridFunction) and isinstance(psi, GridFunction)):
            raise InvalidArgument("mixing grid functions with other representations")
        if phi.grid != psi.grid:
            raise InvalidArgument("phi and psi live on different grids")
        g = phi.grid
        return g.nodes, g.weights, phi.values, psi.values, integration_matrix(g, "left")
    cuts = {pair.t, *_breaks(phi), *_breaks(psi)}
    points = max(4, N // (len(cuts) + 1))
    g = aligned_grid(cuts, points=points)
    return g.nodes, g.weights, evaluate(phi, g).values, evaluate(psi, g).values, integration_matrix(g, "left")


def rank_one_defect(pair, N=64):
    """Norm distance between ``phi (x) psi`` and ``M_phi V M_psi^*`` compressed to a grid.

    Raises
    ------
    InvalidSupports
        if ``phi`` is nonzero left of ``t`` or ``psi`` nonzero right of it.
    """
    x, w, phi, psi, L = _discretise(pair, N)
    tol = 1e-13 * max(1.0, np.max(np.abs(phi)), np.max(np.abs(psi)))
    if np.any(np.abs(phi[x < pair.t]) > tol):
        raise InvalidSupports(f"phi does not vanish on [0, {pair.t}]")
    if np.any(np.abs(psi[x > pair.t]) > tol):
        raise InvalidSupports(f"psi does not vanish on [{pair.t}, 1]")
    outer = np.outer(phi, np.conj(psi) * w)
    composed = phi[:, None] * L * np.conj(psi)[None, :]
    r = np.sqrt(w)
    return float(np.linalg.norm(r[:, None] * (outer - composed) / r[None, :], 2))


@dataclass(frozen=True)
class RankOnePiece:
    """``phi psi^H / N`` on the midpoint grid with supports split at ``t``."""

    phi: np.ndarray
    psi: np.ndarray
    t: float
    level: int

    def matrix(self):
        return np.outer(self.phi, np.conj(self.psi)) / self.phi.size

    def pair(self):
        return RankOnePair(self.phi, self.psi, self.t)


@dataclass(frozen=True)
class DyadicResult:
    N: int
    levels: int
    bounds: tuple  # block-diagonal residual norm after each level 1..L
    truncation: tuple  # SVD tail dropped at each level
    pieces: tuple
    approximation: np.ndarray = field(repr=False)
    error: float  # measured ||K/N - approximation||

    @property
    def bound(self):
        return self.bounds[-1]

    @property
    def rank(self):
        return len(self.pieces)


def _peel(A, a, b, level, eps):
    mid = (a + b) // 2
    B = A[mid:b, a:mid]
    u, s, vh = np.linalg.svd(B)
    cut = eps / 2 ** (level + 2)
    r = len(s)
    while r > 0 and s[r - 1] <= cut:
        r -= 1
    tail = float(s[r]) if r < len(s) else 0.0
    N = A.shape[0]
    pieces = []
    for j in range(r):
        phi = np.zeros(N, complex)
        psi = np.zeros(N, complex)
        scale = np.sqrt(N * s[j])
        phi[mid:b] = scale * u[:, j]
        psi[a:mid] = scale * np.conj(vh[j])
        pieces.append(RankOnePiece(phi, psi, mid / N, level))
    return pieces, tail


def block_norms(A, n):
    m = A.shape[0] // n
    return [float(np.linalg.norm(A[j * m:(j + 1) * m, j * m:(j + 1) * m], 2)) for j in range(n)]


def dyadic_approximation(kernel, L, N=256, eps=1e-8):
    """Peel lower-left dyadic blocks into rank-one pieces for ``L`` levels.

    Returns
    -------
    DyadicResult
        ``bounds[l-1]`` is the largest diagonal-block norm after level ``l``;
        ``error`` is the measured norm of what is left.
    """
    if int(L) != L or L < 1:
        raise InvalidArgument(f"levels must be a positive integer, got {L}")
    if kernel.samples is not None:
        N = kernel.samples.shape[0]
    if N % (2**L):
        raise InvalidArgument(f"N={N} is not a multiple of 2^{L}")
    A = kernel.matrix(N)
    if np.any(np.abs(np.triu(A, 1)) > 0.0):
        raise NotInAlgLat("kernel is nonzero where s > x")
    pieces, bounds, tails = [], [], []
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        for level in range(1, L + 1):
            size = N // 2 ** (level - 1)
            jobs = [(j * size, (j + 1) * size) for j in range(2 ** (level - 1))]
            results = list(pool.map(lambda ab: _peel(A, ab[0], ab[1], level, eps), jobs))
            tail = 0.0
            for ps, t in results:
                pieces.extend(ps)
                tail = max(tail, t)
            tails.append(tail)
            bounds.append(max(block_norms(A, 2**level)))
    approx = np.zeros_like(A, dtype=complex)
    for p in pieces:
        approx += p.matrix()
    err = float(np.linalg.norm(A - approx, 2))
    return DyadicResult(N, int(L), tuple(bounds), tuple(tails), tuple(pieces), approx, err)


def block_diagonal_norm(kernel, n, N=256):
    """Largest operator norm among the ``n`` diagonal block compressions."""
    if int(n) != n or n < 1 or (n & (n - 1)):
        raise InvalidArgument(f"n must be a power of two, got {n}")
    A = kernel.matrix(None if kernel.samples is not None else N)
    if A.shape[0] % n:
        raise InvalidArgument(f"N={A.shape[0]} is not a multiple of {n}")
    return max(block_norms(A, n))
