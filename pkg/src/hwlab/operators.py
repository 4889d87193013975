"""The Hardy, Volterra and multiplication operators on L^2[0, 1].

``apply`` acts on sampled functions (exact antidifferentiation of the panel
interpolant) or on closed forms (nested quadrature at each outer node).
``assemble`` builds compressions onto polynomials of degree < N in the
monomial basis or the orthonormal shifted Legendre basis

    L_j(x) = sqrt(2j + 1) P_j(2x - 1).

In the Legendre basis ``Mx`` and ``V`` come from three-term recurrences and
``H`` from an exact rational change of basis; all three preserve polynomial
degree up to one step, so compressions of words are exact when assembled at
size ``N + len(word)`` and truncated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np
from numpy.polynomial import legendre as npleg

from .errors import InvalidArgument
from .forms import ClosedForm
from .quadrature import GridFunction, _tanh_sinh_offsets, cumulative_integral

TAGS = ("H", "V", "Mx", "Z", "Hstar", "Vstar", "identity")
BASES = ("monomial", "legendre_orthonormal")
MATRIX_BASES = BASES + ("hardy_monomial",)
MONOMIAL_CAP = 40
LEGENDRE_CAP = 512


@dataclass(frozen=True)
class OperatorId:
    """One of the named operators, optionally shifted: ``op - shift * I``."""

    tag: str
    shift: complex = 0.0

    def __post_init__(self):
        if self.tag not in TAGS:
            raise InvalidArgument(f"unknown operator {self.tag!r}; expected one of {TAGS}")
        object.__setattr__(self, "shift", complex(self.shift))

    def __str__(self):
        if self.shift == 0:
            return self.tag
        return f"{self.tag} - ({self.shift:g})"


def _as_op(op):
    return op if isinstance(op, OperatorId) else OperatorId(op)


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    basis: str
    label: str = ""

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidArgument(f"operator matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidArgument("operator matrix has non-finite entries")
        if self.basis not in MATRIX_BASES:
            raise InvalidArgument(f"unknown basis {self.basis!r}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def size(self):
        return self.entries.shape[0]

    def __matmul__(self, other):
        return OperatorMatrix(self.entries @ other.entries, self.basis)

    def __add__(self, other):
        return OperatorMatrix(self.entries + other.entries, self.basis)

    def __sub__(self, other):
        return OperatorMatrix(self.entries - other.entries, self.basis)

    def singular_values(self):
        return np.linalg.svd(self.entries, compute_uv=False)

    def norm(self):
        return float(self.singular_values()[0]) if self.size else 0.0


# --------------------------------------------------------------------------
# action on functions


_REL_GEOMETRIC = 8  # Gauss panels [4^-(k+1), 4^-k] before the tanh-sinh tail
_GAUSS_POINTS = 16


@lru_cache(maxsize=None)
def _from_zero_rule():
    """Nodes/weights on (0, 1] for integrands singular at 0."""
    xi, w = np.polynomial.legendre.leggauss(_GAUSS_POINTS)
    nodes, weights = [], []
    for k in range(_REL_GEOMETRIC):
        a, b = 4.0 ** -(k + 1), 4.0 ** -k
        nodes.append(0.5 * (a + b) + 0.5 * (b - a) * xi)
        weights.append(0.5 * (b - a) * w)
    tail = 4.0 ** -_REL_GEOMETRIC
    off, wt = _tanh_sinh_offsets(tail, 96, 1e-300)
    nodes.append(off)
    weights.append(wt)
    return np.concatenate(nodes), np.concatenate(weights)


def _geometric_rule(lo, hi):
    """Gauss panels ``[lo 4^k, lo 4^(k+1)]`` covering ``[lo, hi]`` (lo > 0)."""
    xi, w = np.polynomial.legendre.leggauss(_GAUSS_POINTS)
    edges = [lo]
    while edges[-1] * 4.0 < hi:
        edges.append(edges[-1] * 4.0)
    edges.append(hi)
    edges = np.array(edges)
    a, b = edges[:-1, None], edges[1:, None]
    return (0.5 * (a + b) + 0.5 * (b - a) * xi).ravel(), (0.5 * (b - a) * w).ravel()


def _gauss_rule_on(edges):
    xi, w = np.polynomial.legendre.leggauss(_GAUSS_POINTS)
    edges = np.asarray(edges)
    a, b = edges[:-1, None], edges[1:, None]
    return (0.5 * (a + b) + 0.5 * (b - a) * xi).ravel(), (0.5 * (b - a) * w).ravel()


def _form_left_integrals(form, x, xoff):
    """int_0^x form, for each outer node (``xoff = x - singular_point``)."""
    a = form.singular_point
    if form.breakpoints():
        out = np.zeros(x.shape, dtype=complex)
        br = np.array(form.breakpoints())
        for i, xi in enumerate(x):
            edges = np.concatenate([[0.0], br[br < xi], [xi]])
            t, w = _gauss_rule_on(edges)
            out[i] = np.sum(w * form.values(t, t - a))
        return out
    base = form.support_start - a
    if base != 0.0:
        raise InvalidArgument("closed forms must be supported from their singular point")
    r, w = _from_zero_rule()
    span = np.where(xoff > 0.0, xoff, 0.0)
    toff = span[:, None] * r[None, :]
    vals = form.values(a + toff, toff).reshape(toff.shape)
    return (vals * w[None, :]).sum(axis=1) * span


def _form_right_integrals(form, x, xoff, divide_by_t):
    """int_x^1 form(t) [/ t] dt for each outer node."""
    a = form.singular_point
    out = np.zeros(x.shape, dtype=complex)
    br = np.array(form.breakpoints())
    for i, (xi, oi) in enumerate(zip(x, xoff)):
        if len(br):
            edges = np.concatenate([[xi], br[br > xi], [1.0]])
            t, w = _gauss_rule_on(edges)
            toff = t - a
        else:
            lo = max(oi, form.support_start - a)
            if lo <= 0.0:
                r, w = _from_zero_rule()
                toff, w = (1.0 - a) * r, (1.0 - a) * w
            else:
                toff, w = _geometric_rule(lo, 1.0 - a)
            t = a + toff
        vals = form.values(t, toff)
        if divide_by_t:
            vals = vals / t
        out[i] = np.sum(w * vals)
    return out


def _apply_form(op, form, grid):
    x = grid.nodes
    xoff = grid.offset_from(form.singular_point)
    f = form.values(x, xoff)
    tag = op.tag
    if tag in ("H", "Z"):
        res = _form_left_integrals(form, x, xoff) / x
        if tag == "Z":
            res = res - x * f
    elif tag == "V":
        res = _form_left_integrals(form, x, xoff)
    elif tag == "Hstar":
        res = _form_right_integrals(form, x, xoff, True)
    elif tag == "Vstar":
        res = _form_right_integrals(form, x, xoff, False)
    elif tag == "Mx":
        res = x * f
    else:
        res = f.astype(complex)
    return GridFunction(grid, res - op.shift * f)


def _apply_grid(op, f):
    x = f.grid.nodes
    v = f.values
    tag = op.tag
    if tag in ("H", "Z"):
        res = cumulative_integral(f).values / x
        if tag == "Z":
            res = res - x * v
    elif tag == "V":
        res = cumulative_integral(f).values
    elif tag == "Hstar":
        res = cumulative_integral(GridFunction(f.grid, v / x), side="right").values
    elif tag == "Vstar":
        res = cumulative_integral(f, side="right").values
    elif tag == "Mx":
        res = x * v
    else:
        res = v
    return GridFunction(f.grid, res - op.shift * v)


def apply(op, f, grid=None):
    """Apply ``op`` to a :class:`GridFunction` or a :class:`ClosedForm`.

    Sampled input is treated as its panelwise polynomial interpolant, and the
    inner integrals are exact for that interpolant. Closed-form input is
    integrated by nested quadrature and sampled on ``grid`` (default: the
    form's own ``default_grid``).

    Examples
    --------
    >>> from hwlab.forms import PowerEigen
    >>> g = apply("Z", PowerEigen(1.0))
    >>> bool(abs(g.values - PowerEigen(1.0)(g.grid.nodes)).max() < 1e-12)
    True
    """
    op = _as_op(op)
    if isinstance(f, ClosedForm):
        return _apply_form(op, f, f.default_grid() if grid is None else grid)
    if isinstance(f, GridFunction):
        if grid is not None and grid is not f.grid:
            raise InvalidArgument("grid argument only applies to closed-form input")
        return _apply_grid(op, f)
    raise InvalidArgument(f"cannot apply an operator to {type(f).__name__}")


def residual(op, f, target=None, grid=None):
    """Relative L^2 size of ``op f - target`` (``target`` defaults to 0)."""
    out = apply(op, f, grid)
    g = out.grid
    fv = f.values if isinstance(f, GridFunction) else f.values(g.nodes, g.offset_from(f.singular_point))
    ref = np.sqrt(np.sum(g.weights * np.abs(fv) ** 2))
    diff = out.values
    if target is not None:
        tv = target.values if isinstance(target, GridFunction) else target.values(
            g.nodes, g.offset_from(target.singular_point))
        diff = diff - tv
        ref = np.sqrt(np.sum(g.weights * np.abs(tv) ** 2))
    return float(np.sqrt(np.sum(g.weights * np.abs(diff) ** 2)) / ref)


# --------------------------------------------------------------------------
# matrix compressions


def _monomial(tag, n):
    m = np.zeros((n, n))
    k = np.arange(n)
    if tag == "H":
        m[k, k] = 1.0 / (k + 1)
    elif tag == "Mx":
        m[k[1:], k[:-1]] = 1.0
    elif tag == "V":
        m[k[1:], k[:-1]] = 1.0 / k[1:]
    elif tag == "Z":
        m[k, k] = 1.0 / (k + 1)
        m[k[1:], k[:-1]] = -1.0
    elif tag == "Vstar":
        # V* x^n = (1 - x^(n+1)) / (n+1)
        m[0, :] = 1.0 / (k + 1)
        m[k[1:], k[:-1]] = -1.0 / k[1:]
    elif tag == "identity":
        m[k, k] = 1.0
    else:
        raise InvalidArgument("H* does not map polynomials to polynomials; use the Legendre basis")
    return m


@lru_cache(maxsize=None)
def _hardy_legendre_column(j):
    """Exact coefficients of H P_j in shifted Legendre polynomials P_0..P_j."""
    b = [(-1) ** (j + n) * comb(j, n) * comb(j + n, n) for n in range(j + 1)]
    col = []
    for i in range(j + 1):
        s = Fraction(0)
        for n in range(i, j + 1):
            s += Fraction(
                (2 * i + 1) * factorial(n) ** 2 * b[n],
                factorial(n - i) * factorial(n + i + 1) * (n + 1),
            )
        col.append(s)
    return tuple(col)


@lru_cache(maxsize=None)
def _legendre(tag, n):
    m = np.zeros((n, n))
    j = np.arange(n, dtype=float)
    if tag in ("Mx", "Z"):
        off = (j[:-1] + 1) / (2 * np.sqrt((2 * j[:-1] + 1) * (2 * j[:-1] + 3)))
        m[np.arange(n), np.arange(n)] = 0.5
        m[np.arange(1, n), np.arange(n - 1)] = off
        m[np.arange(n - 1), np.arange(1, n)] = off
        if tag == "Z":
            return _legendre("H", n) - m
    elif tag in ("H", "Hstar"):
        for c in range(n):
            scale = np.sqrt(2 * c + 1)
            for r, v in enumerate(_hardy_legendre_column(c)):
                m[r, c] = float(v) * scale / np.sqrt(2 * r + 1)
        if tag == "Hstar":
            m = m.T.copy()
    elif tag in ("V", "Vstar"):
        # V L_j = (L_{j+1}/sqrt(2j+3) - L_{j-1}/sqrt(2j-1)) / (2 sqrt(2j+1)), V L_0 = (L_0 + L_1/sqrt 3)/2
        m[0, 0] = 0.5
        for c in range(n):
            if c + 1 < n:
                m[c + 1, c] = 1.0 / (2 * np.sqrt((2 * c + 1) * (2 * c + 3)))
            if c >= 1:
                m[c - 1, c] = -1.0 / (2 * np.sqrt((2 * c + 1) * (2 * c - 1)))
        if tag == "Vstar":
            m = m.T.copy()
    elif tag == "identity":
        m = np.eye(n)
    m.setflags(write=False)
    return m


def _check_size(basis, n):
    if basis not in BASES:
        raise InvalidArgument(f"unknown basis {basis!r}; expected one of {BASES}")
    if int(n) != n or n < 1:
        raise InvalidArgument(f"compression size must be a positive integer, got {n}")
    cap = MONOMIAL_CAP if basis == "monomial" else LEGENDRE_CAP
    if n > cap:
        raise InvalidArgument(f"{basis} compressions are limited to N <= {cap}, got {n}")


def _raw(tag, basis, n):
    return _monomial(tag, n) if basis == "monomial" else _legendre(tag, n)


def assemble(op, basis="legendre_orthonormal", N=8):
    """Compression of ``op`` onto polynomials of degree < N.

    In the monomial basis the columns hold the coefficients of ``op x^n`` with
    degrees >= N dropped; in the Legendre basis the matrix is ``P_N op P_N``.

    >>> assemble("H", "monomial", 4).entries.real.diagonal().tolist()
    [1.0, 0.5, 0.3333333333333333, 0.25]
    """
    op = _as_op(op)
    _check_size(basis, N)
    m = _raw(op.tag, basis, int(N)).astype(complex)
    if op.shift != 0:
        m = m - op.shift * np.eye(int(N))
    return OperatorMatrix(m, basis, str(op))


def assemble_word(word, basis="legendre_orthonormal", N=8):
    """Exact compression of an :class:`~hwlab.words.OperatorWord`.

    Each letter raises polynomial degree by at most one, so the product of
    compressions of size ``N + len`` truncated to ``N`` equals ``P_N w P_N``.
    """
    from .words import to_complex

    _check_size(basis, N)
    pad = int(N) + word.max_length
    cap = MONOMIAL_CAP if basis == "monomial" else LEGENDRE_CAP
    if basis == "monomial" and N > cap:
        raise InvalidArgument(f"monomial compressions are limited to N <= {cap}")
    out = np.zeros((N, N), dtype=complex)
    cache = {}
    for coef, letters in word.terms:
        prod = np.eye(pad)
        for l in letters:
            if l not in cache:
                cache[l] = _raw(l, basis, pad)
            prod = prod @ cache[l]
        out += to_complex(coef) * prod[:N, :N]
    return OperatorMatrix(out, basis, str(word))


def commutator_residual(pair, N=8):
    """Largest singular value of a section-1 relation's defect.

    ``pair`` is ``"VMx_vs_V2"`` (VMx - MxV + V^2), ``"HMx_vs_HV"``
    (HMx - MxH + HV) or ``"identity"`` (an operator minus itself). The defect
    is compressed in the monomial basis and restricted to degree < N - 2.
    """
    if N < 2:
        raise InvalidArgument("N must be at least 2")
    if N > MONOMIAL_CAP:
        raise InvalidArgument(f"monomial compressions are limited to N <= {MONOMIAL_CAP}")
    from .words import parse_word

    text = {
        "VMx_vs_V2": "V*Mx - Mx*V + V*V",
        "HMx_vs_HV": "H*Mx - Mx*H + H*V",
        "identity": "H - H",
    }
    if pair not in text:
        raise InvalidArgument(f"unknown relation {pair!r}; expected one of {tuple(text)}")
    word = parse_word(text[pair])
    if not word.terms:
        return 0.0
    m = assemble_word(word, "monomial", N).entries[:, : max(N - 2, 0)]
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def singular_value_decay(op, N=64):
    """Singular values (descending) of the Legendre compression of ``op``.

    ``op`` may also be an :class:`OperatorMatrix` or a square array.
    """
    if N < 4:
        raise InvalidArgument("N must be at least 4")
    if isinstance(op, OperatorMatrix):
        m = op.entries
    elif isinstance(op, np.ndarray):
        m = op
    else:
        m = assemble(op, "legendre_orthonormal", N).entries
    return np.linalg.svd(m, compute_uv=False)


def legendre_vandermonde(x, N):
    """Values ``L_j(x)`` for j < N, shape ``(len(x), N)``."""
    x = np.asarray(x, dtype=float)
    v = npleg.legvander(2 * x - 1, N - 1)
    return v * np.sqrt(2 * np.arange(N) + 1)
