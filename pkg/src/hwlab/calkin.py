"""Symbols modulo compact operators on the lollipop.

The lollipop is ``Lambda = [-1, 0] U {|z - 1| <= 1}``. A symbol is a pair of
polynomials: ``f_minus`` on the segment (variable ``t``) and ``f_plus`` on the
closed disc (variable ``z``), glued by ``f_minus(0) = f_plus(0)``.

On words: ``V`` is compact, and products that mix ``Mx`` and ``H`` are
compact too, so they all have zero symbol. ``Mx`` acts on the segment as
``t -> -t``, ``H`` acts on the disc as ``z -> z``, and scalars act on both.
Hence ``H - Mx`` has the identity symbol ``(t, z)``.

Compactness is never decided here. :func:`product_defect` only reports
singular-value decay across compression sizes, as a proxy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sympy.polys.domains import QQ_I

from .errors import GluingViolation, IndexUndefined, InvalidArgument
from .forms import Spike, Upsilon, evaluate
from .operators import apply, assemble_word
from .quadrature import GridFunction, TanhSinh, aligned_grid, inner_product, l2_norm, make_grid
from .words import OperatorWord, _format_gaussian, gaussian, parse_word, to_complex


class Lollipop:
    """The set ``[-1, 0] U closed disc(1, 1)``."""

    @staticmethod
    def contains(z, tol=0.0):
        z = complex(z)
        on_stick = abs(z.imag) <= tol and -1.0 - tol <= z.real <= tol
        return on_stick or abs(z - 1.0) <= 1.0 + tol

    @staticmethod
    def distance(z):
        """Euclidean distance from ``z`` (scalar or array) to the lollipop."""
        z = np.asarray(z, dtype=complex)
        disc = np.maximum(np.abs(z - 1.0) - 1.0, 0.0)
        seg = np.abs(z - np.clip(z.real, -1.0, 0.0))
        return np.minimum(disc, seg)

    @staticmethod
    def boundary(n=256):
        """``n`` points on the segment and ``n`` on the circle ``|z - 1| = 1``."""
        t = np.linspace(-1.0, 0.0, n)
        theta = 2 * np.pi * np.arange(n) / n
        return np.concatenate([t + 0j, 1.0 + np.exp(1j * theta)])


def _trim(coeffs):
    c = list(coeffs)
    while len(c) > 1 and c[-1] == QQ_I.zero:
        c.pop()
    return tuple(c) if c else (QQ_I.zero,)


def _polymul(a, b):
    out = [QQ_I.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _polyadd(a, b):
    n = max(len(a), len(b))
    a = list(a) + [QQ_I.zero] * (n - len(a))
    b = list(b) + [QQ_I.zero] * (n - len(b))
    return _trim(x + y for x, y in zip(a, b))


def _poly_text(coeffs, var):
    terms = []
    for k, c in enumerate(coeffs):
        if c == QQ_I.zero:
            continue
        mono = "" if k == 0 else var if k == 1 else f"{var}^{k}"
        coef = _format_gaussian(c)
        if not mono:
            terms.append(coef)
        elif coef in ("1", "-1"):
            terms.append(coef[:-1] + mono)
        else:
            terms.append(f"{coef}*{mono}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


@dataclass(frozen=True)
class SymbolPair:
    """Glued polynomial pair; coefficients ascending, exact Gaussian rationals."""

    f_minus: tuple
    f_plus: tuple

    def __post_init__(self):
        fm = _trim(gaussian(c) for c in (self.f_minus or (0,)))
        fp = _trim(gaussian(c) for c in (self.f_plus or (0,)))
        object.__setattr__(self, "f_minus", fm)
        object.__setattr__(self, "f_plus", fp)
        if abs(to_complex(fm[0]) - to_complex(fp[0])) > 1e-12:
            raise GluingViolation(
                f"f_minus(0) = {to_complex(fm[0])} differs from f_plus(0) = {to_complex(fp[0])}"
            )

    @classmethod
    def identity(cls):
        return cls((0, 1), (0, 1))

    def __str__(self):
        return f"f_minus(t) = {_poly_text(self.f_minus, 't')}; f_plus(z) = {_poly_text(self.f_plus, 'z')}"

    @classmethod
    def constant(cls, c):
        return cls((c,), (c,))

    @property
    def value_at_zero(self):
        return self.f_plus[0]

    def minus(self, t):
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=complex), [to_complex(c) for c in self.f_minus])

    def plus(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), [to_complex(c) for c in self.f_plus])

    def __mul__(self, other):
        if not isinstance(other, SymbolPair):
            other = SymbolPair.constant(other)
        return SymbolPair(_polymul(self.f_minus, other.f_minus), _polymul(self.f_plus, other.f_plus))

    def __add__(self, other):
        return SymbolPair(_polyadd(self.f_minus, other.f_minus), _polyadd(self.f_plus, other.f_plus))

    def is_zero(self):
        return all(c == QQ_I.zero for c in self.f_minus + self.f_plus)

    def as_json(self):
        """Coefficients as ``[re, im]`` pairs of exact rational strings."""
        def enc(c):
            return [str(c.x), str(c.y)]
        return {"f_minus": [enc(c) for c in self.f_minus], "f_plus": [enc(c) for c in self.f_plus]}


def symbol_of(word):
    """Symbol of an operator word (text or :class:`OperatorWord`)."""
    if isinstance(word, str):
        word = parse_word(word)
    fm = {}
    fp = {}
    for c, letters in word.terms:
        if "V" in letters or ("Mx" in letters and "H" in letters):
            continue
        k = len(letters)
        if k == 0:
            fm[0] = fm.get(0, QQ_I.zero) + c
            fp[0] = fp.get(0, QQ_I.zero) + c
        elif letters[0] == "Mx":
            fm[k] = fm.get(k, QQ_I.zero) + c * (QQ_I.one if k % 2 == 0 else -QQ_I.one)
        else:
            fp[k] = fp.get(k, QQ_I.zero) + c

    def dense(d):
        n = max(d, default=0) + 1
        return tuple(d.get(i, QQ_I.zero) for i in range(n))

    return SymbolPair(dense(fm), dense(fp))


def gamma_word(f):
    """The word ``f_minus(-Mx) + f_plus(H) - f(0)``."""
    terms = []
    for k, c in enumerate(f.f_minus):
        terms.append((c * (QQ_I.one if k % 2 == 0 else -QQ_I.one), ("Mx",) * k))
    for k, c in enumerate(f.f_plus):
        terms.append((c, ("H",) * k))
    terms.append((-f.value_at_zero, ()))
    return OperatorWord.from_terms(terms)


def gamma_build(f, N):
    """Legendre compression of ``f_minus(-Mx) + f_plus(H) - f(0)`` at size N."""
    if not isinstance(f, SymbolPair):
        raise InvalidArgument("gamma_build takes a SymbolPair")
    return assemble_word(gamma_word(f), "legendre_orthonormal", N)


@dataclass(frozen=True)
class DefectReport:
    sizes: tuple
    sigma_quarter: tuple  # sigma_{N/4} for each size (1-based index N/4)
    singular_values: tuple
    ratios: tuple  # sigma_quarter[i] / sigma_quarter[i + 1]

    @property
    def decreasing(self):
        return all(r > 1.0 for r in self.ratios)

    def halves(self, factor=2.0):
        return all(r >= factor for r in self.ratios)


def _report(mats, sizes):
    svs, quarter = [], []
    for n, m in zip(sizes, mats):
        s = np.linalg.svd(m, compute_uv=False)
        svs.append(s)
        quarter.append(float(s[n // 4 - 1]))
    ratios = tuple(a / b if b > 0 else np.inf for a, b in zip(quarter, quarter[1:]))
    return DefectReport(tuple(sizes), tuple(quarter), tuple(svs), ratios)


def product_defect(f, g, sizes=(16, 32, 64)):
    """Singular values of the compressed defect ``gamma(f) gamma(g) - gamma(fg)``.

    The defect word is expanded first and compressed exactly; multiplying two
    truncated compressions would add a rank-one corner error that masks the
    decay at small sizes.
    """
    word = gamma_word(f) * gamma_word(g) - gamma_word(f * g)
    mats = [assemble_word(word, "legendre_orthonormal", n).entries for n in sizes]
    return _report(mats, sizes)


def mixed_defect(f, g, sizes=(16, 32, 64)):
    """Decay report for ``f(-Mx) g(H) - g(0) f(-Mx) - f(0) g(H) + f(0) g(0)``.

    ``f`` and ``g`` are ascending coefficient lists of one-variable polynomials.
    """
    f = [gaussian(c) for c in f]
    g = [gaussian(c) for c in g]
    fm = OperatorWord.from_terms([(c * (QQ_I.one if k % 2 == 0 else -QQ_I.one), ("Mx",) * k) for k, c in enumerate(f)])
    gh = OperatorWord.from_terms([(c, ("H",) * k) for k, c in enumerate(g)])
    f0, g0 = f[0], g[0]
    word = fm * gh - fm * OperatorWord.from_terms([(g0, ())]) - gh * OperatorWord.from_terms([(f0, ())])
    word = word + OperatorWord.from_terms([(f0 * g0, ())])
    mats = [assemble_word(word, "legendre_orthonormal", n).entries for n in sizes]
    return _report(mats, sizes)


def essential_spectrum(f, n=256):
    """``f_minus`` on ``[-1, 0]`` together with ``f_plus`` on ``|z - 1| = 1``.

    The segment piece is read on ``[-1, 0]``, the domain of ``f_minus``; a
    ``[0, 1]`` parametrisation gives the same set only after ``t -> -t``.
    """
    if n < 16:
        raise InvalidArgument("need at least 16 samples per piece")
    t = np.linspace(-1.0, 0.0, n)
    theta = 2 * np.pi * np.arange(n) / n
    return np.concatenate([f.minus(t), f.plus(1.0 + np.exp(1j * theta))])


def _polyline_distance(pts, z):
    a, b = pts[:-1], pts[1:]
    d = b - a
    L2 = np.abs(d) ** 2
    t = np.clip(np.real((z - a) * np.conj(d)) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
    return float(np.min(np.abs(a + t * d - z)))


def _min_distance(f, lam, n=4096):
    """Distance from ``lam`` to the two sampled curves, joined as polylines."""
    t = np.linspace(-1.0, 0.0, n)
    theta = 2 * np.pi * np.arange(n + 1) / n
    return min(_polyline_distance(f.minus(t), lam), _polyline_distance(f.plus(1.0 + np.exp(1j * theta)), lam))


def fredholm_index(f, lam, samples=64, max_samples=1 << 20):
    """Winding number of ``theta -> f_plus(1 + e^{i theta}) - lam`` about 0.

    The curve is resampled by doubling until every step turns by less than
    a quarter turn.

    Raises
    ------
    IndexUndefined
        if ``lam`` lies within 1e-6 of the sampled essential spectrum.
    """
    lam = complex(lam)
    if _min_distance(f, lam) < 1e-6:
        raise IndexUndefined(f"{lam} lies on the essential spectrum")
    n = max(16, int(samples))
    while True:
        theta = 2 * np.pi * np.arange(n + 1) / n
        w = f.plus(1.0 + np.exp(1j * theta)) - lam
        if np.min(np.abs(w)) < 1e-6:
            raise IndexUndefined(f"{lam} lies on the essential spectrum")
        steps = np.angle(w[1:] / w[:-1])
        if np.max(np.abs(steps)) < np.pi / 2:
            return int(round(np.sum(steps) / (2 * np.pi)))
        if n >= max_samples:
            raise IndexUndefined("winding number did not resolve")  # pragma: no cover
        n *= 2


@dataclass(frozen=True)
class WitnessRow:
    param: complex
    value: float
    predicted: float
    error: float
    extra: float  # spike: ||H chi_n||; upsilon: ||H u - (1 + a) u||


def _spike_grid(s, n, points=24):
    return aligned_grid((s - 1.0 / n, s + 1.0 / n), points=points)


def spike_rows(s, ns, g=None):
    """Witness table for the spikes ``chi_n`` centred at ``s``.

    ``g`` is a vectorised function on [0, 1]; default ``x**2``.
    """
    g = (lambda x: x**2) if g is None else g
    rows = []
    target = complex(g(np.array([s]))[0]).real
    for n in ns:
        form = Spike(s, n)  # raises for 1/n >= min(s, 1 - s)
        grid = _spike_grid(s, n)
        chi = evaluate(form, grid)
        gchi = GridFunction(grid, g(grid.nodes) * chi.values)
        val = inner_product(gchi, chi).real
        h_norm = l2_norm(apply("H", chi))
        rows.append(WitnessRow(n, val, target, abs(val - target), h_norm))
    return rows


def upsilon_rows(tau, radii, rho=1.0, order=320):
    """Witness table for ``Upsilon_a`` with ``a = r tau`` approaching ``tau``."""
    tau = complex(tau)
    if abs(abs(tau) - 1.0) > 1e-12:
        raise InvalidArgument(f"tau must lie on the unit circle, got {tau}")
    if abs(tau + 1.0) < 1e-12:
        raise InvalidArgument("tau = -1 is excluded")
    grid = make_grid(order, TanhSinh(0.0))
    rows = []
    for r in radii:
        if not 0.0 <= r < 1.0:
            raise InvalidArgument(f"radii must lie in [0, 1), got {r}")
        a = r * tau
        form = Upsilon(a)
        u = evaluate(form, grid)
        xu = GridFunction(grid, grid.nodes**rho * u.values)
        val = inner_product(xu, u).real
        pred = (1 - abs(a) ** 2) / (abs(1 + a) ** 2 * rho + 1 - abs(a) ** 2)
        eig = l2_norm(apply("H", form, grid) - (1.0 + a) * u)
        rows.append(WitnessRow(a, val, pred, abs(val - pred), eig))
    return rows


def witness_limits(kind, schedule, **kw):
    """Dispatch to :func:`spike_rows` or :func:`upsilon_rows`."""
    if kind == "spike":
        return spike_rows(kw.get("s", 0.3), schedule, kw.get("g"))
    if kind == "upsilon":
        return upsilon_rows(kw.get("tau", 1.0), schedule, kw.get("rho", 1.0))
    raise InvalidArgument(f"unknown witness kind {kind!r}")


def fit_exponent(ns, errors):
    """Least-squares slope of ``-log(error)`` against ``log(n)``."""
    slope = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(errors, float)), 1)[0]
    return float(-slope)
