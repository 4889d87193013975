"""Closed-form functions on [0, 1].

Every form exposes the same small protocol:

``values(x, offset)``
    pointwise values, where ``offset = x - singular_point`` is supplied by the
    caller (usually from ``QuadratureGrid.offset_from``) so that factors such
    as ``x - s`` never suffer cancellation;
``support_start``
    the form vanishes on ``[0, support_start]``;
``singular_point``
    where quadrature should cluster nodes;
``breakpoints()``
    jump locations for piecewise forms (empty for the analytic ones).

Eigenfunctions are normalised with multiplicative constant 1. Complex powers
use the principal logarithm, which is legal because ``x > 0`` and
``Re(x + lam) > 0`` whenever they are evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidForm, NotInL2
from .quadrature import GridFunction, GeometricGraded, TanhSinh, make_grid


def _positive(offset):
    """Mask of points strictly inside the support (offset > 0)."""
    return np.asarray(offset, dtype=float) > 0.0


def _safe_log(a, mask):
    out = np.zeros(np.shape(a))
    out[mask] = np.log(np.asarray(a, dtype=float)[mask])
    return out


class ClosedForm:
    """Base class; subclasses are frozen dataclasses."""

    support_start = 0.0
    singular_point = 0.0
    strict = True

    def breakpoints(self):
        return ()

    def values(self, x, offset=None):  # pragma: no cover - abstract
        raise NotImplementedError

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.values(x, x - self.singular_point)

    def default_grid(self, order=240):
        """A grid suited to this form: tanh-sinh toward its singular point."""
        if self.breakpoints():
            from .quadrature import aligned_grid

            return aligned_grid(self.breakpoints(), points=max(16, order // 8))
        return make_grid(order, TanhSinh(endpoint=self.singular_point))


@dataclass(frozen=True)
class PowerEigen(ClosedForm):
    """``x**(1/lam - 1) * (x + lam)**(-1 - 1/lam)`` on ``[support_start, 1]``.

    With ``support_start = 0`` this is the eigenfunction for ``lam`` in the
    disc ``|lam - 1| < 1``; with ``support_start = s`` and ``lam = -s`` it is
    the eigenfunction for a point of the segment ``(-1, 0)``.

    ``strict=False`` admits other parameters for divergence probes, as long as
    the formula is defined on the support.
    """

    lam: complex = 1.0
    support_start: float = 0.0
    strict: bool = True

    def __post_init__(self):
        lam = complex(self.lam)
        object.__setattr__(self, "lam", lam)
        s = float(self.support_start)
        object.__setattr__(self, "support_start", s)
        if not 0.0 <= s < 1.0:
            raise InvalidForm(f"support_start must lie in [0, 1), got {s}")
        if s > 0.0:
            if lam.imag != 0.0 or lam.real != -s:
                raise InvalidForm("support_start > 0 requires lam == -support_start")
            return
        if lam == 0:
            raise InvalidForm("lam = 0 has no power-law eigenfunction; use ZeroEigen")
        if self.strict and not abs(lam - 1.0) < 1.0:
            raise InvalidForm(f"lam = {lam} is not in the open disc |lam - 1| < 1")
        if lam.imag == 0.0 and -1.0 <= lam.real < 0.0:
            raise InvalidForm("x + lam vanishes inside (0, 1]; give support_start = -lam")

    @property
    def singular_point(self):
        return self.support_start

    @property
    def stick(self):
        return self.support_start > 0.0

    def values(self, x, offset=None):
        x = np.asarray(x, dtype=float)
        offset = x - self.singular_point if offset is None else np.asarray(offset, dtype=float)
        inside = _positive(offset) & (x > 0.0)
        out = np.zeros(x.shape, dtype=complex)
        if self.stick:
            # real arithmetic: x**(-1/s - 1) * (x - s)**(1/s - 1)
            s = self.support_start
            lx = _safe_log(x, inside)
            lt = _safe_log(offset, inside)
            out[inside] = np.exp((-1.0 / s - 1.0) * lx[inside] + (1.0 / s - 1.0) * lt[inside])
            return out
        lam = self.lam
        xi = x[inside]
        logs = (1.0 / lam - 1.0) * np.log(xi) - (1.0 + 1.0 / lam) * np.log(xi + lam + 0j)
        out[inside] = np.exp(logs)
        return out


@dataclass(frozen=True)
class ZeroEigen(ClosedForm):
    """``x**-2 * exp(-1/x)``, the eigenfunction at 0."""

    def values(self, x, offset=None):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        ok = (x > 0.0) & (x > 1e-4)
        xi = x[ok]
        out[ok] = np.exp(-2.0 * np.log(xi) - 1.0 / xi)
        return out


@dataclass(frozen=True)
class ChainPolynomial:
    """Exact polynomial ``p(u) = sum c_k u**k`` used as ``p(1/x) exp(-1/x)``.

    ``coeffs`` is a tuple of ``(degree, Fraction)`` pairs with nonzero
    coefficients, sorted by degree.
    """

    coeffs: tuple
    order: int = 0

    @classmethod
    def from_dict(cls, d, order=0):
        items = tuple(sorted((int(k), Fraction(v)) for k, v in d.items() if v != 0))
        return cls(items, order)

    def as_dict(self):
        return dict(self.coeffs)

    @property
    def degree(self):
        return self.coeffs[-1][0] if self.coeffs else -1

    @property
    def valuation(self):
        return self.coeffs[0][0] if self.coeffs else -1

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        for k, c in reversed(self.coeffs):
            out = out + float(c) * u ** k
        return out

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in reversed(self.coeffs):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            mono = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
            if a == 1 and mono:
                body = mono
            elif not mono:
                body = str(a)
            elif a.numerator == 1:
                body = f"{mono}/{a.denominator}"
            elif a.denominator == 1:
                body = f"{a.numerator}*{mono}"
            else:
                body = f"{a.numerator}*{mono}/{a.denominator}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


@dataclass(frozen=True)
class ExpChain(ClosedForm):
    """``p(1/x) * exp(-1/x)`` for an exact polynomial ``p``."""

    poly: ChainPolynomial = field(default_factory=lambda: ChainPolynomial(((2, Fraction(1)),)))

    def values(self, x, offset=None):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        ok = x > 1e-4  # beyond u = 1e4 the factor exp(-u) is far below 1e-4000
        u = 1.0 / x[ok]
        lu = np.log(u)
        acc = np.zeros(u.shape)
        for k, c in self.poly.coeffs:
            acc += float(c) * np.exp(k * lu - u)
        out[ok] = acc
        return out


@dataclass(frozen=True)
class Order1Stick(ClosedForm):
    """Closed-form first generalized eigenvector at ``lam = -s``.

    ``f1 = f0 * [log((x - s)/x) / s**2 + (1 - s) / (s (x - s))]`` on
    ``[s, 1]`` with ``f0`` the stick eigenfunction. Square integrable only for
    ``s < 2/3``; ``strict=False`` allows ``s`` up to 1 for divergence probes.
    """

    s: float = 0.5
    strict: bool = True

    def __post_init__(self):
        s = float(self.s)
        object.__setattr__(self, "s", s)
        if not 0.0 < s < 1.0:
            raise InvalidForm(f"s must lie in (0, 1), got {s}")
        if self.strict and s >= 2.0 / 3.0:
            raise NotInL2(f"order-1 stick form is square integrable only for s < 2/3, got {s}")

    @property
    def support_start(self):
        return self.s

    @property
    def singular_point(self):
        return self.s

    def values(self, x, offset=None):
        x = np.asarray(x, dtype=float)
        s = self.s
        offset = x - s if offset is None else np.asarray(offset, dtype=float)
        inside = _positive(offset)
        out = np.zeros(x.shape, dtype=complex)
        xi, ti = x[inside], offset[inside]
        lx, lt = np.log(xi), np.log(ti)
        f0 = np.exp((1.0 / s - 1.0) * lt - (1.0 / s + 1.0) * lx)
        pole = np.exp((1.0 / s - 2.0) * lt - (1.0 / s + 1.0) * lx)
        out[inside] = f0 * (lt - lx) / s**2 + (1.0 - s) / s * pole
        return out


@dataclass(frozen=True)
class Monomial(ClosedForm):
    """``x**s`` (principal branch)."""

    s: complex = 0.0
    strict: bool = True

    def __post_init__(self):
        s = complex(self.s)
        object.__setattr__(self, "s", s)
        if self.strict and not s.real > -0.5:
            raise NotInL2(f"x**s is square integrable only for Re s > -1/2, got {s}")

    def values(self, x, offset=None):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        ok = x > 0.0
        if self.s == 0:
            out[ok] = 1.0
        else:
            out[ok] = np.exp(self.s * np.log(x[ok]))
        return out


@dataclass(frozen=True)
class Spike(ClosedForm):
    """Unit step bump ``sqrt(n/2)`` on ``|x - s| <= 1/n``."""

    s: float = 0.5
    n: int = 4

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise InvalidForm(f"spike centre must lie in (0, 1), got {self.s}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidForm(f"spike index must be a positive integer, got {self.n}")
        if not 1.0 / self.n < min(self.s, 1.0 - self.s):
            raise InvalidForm(
                f"spike needs 1/n < min(s, 1 - s); got s={self.s}, n={self.n}"
            )

    @property
    def singular_point(self):
        return self.s

    def breakpoints(self):
        return (self.s - 1.0 / self.n, self.s + 1.0 / self.n)

    def values(self, x, offset=None):
        x = np.asarray(x, dtype=float)
        offset = x - self.s if offset is None else np.asarray(offset, dtype=float)
        on = np.abs(offset) <= 1.0 / self.n
        return np.where(on, math.sqrt(self.n / 2.0), 0.0).astype(complex)


@dataclass(frozen=True)
class Upsilon(ClosedForm):
    """Unit vector ``sqrt(1 - |a|**2) / (1 + a) * x**(-a / (1 + a))``."""

    alpha: complex = 0.0

    def __post_init__(self):
        a = complex(self.alpha)
        object.__setattr__(self, "alpha", a)
        if not abs(a) < 1.0:
            raise InvalidForm(f"alpha must satisfy |alpha| < 1, got {a}")

    @property
    def exponent(self):
        return -self.alpha / (1.0 + self.alpha)

    @property
    def scale(self):
        return math.sqrt(1.0 - abs(self.alpha) ** 2) / (1.0 + self.alpha)

    def values(self, x, offset=None):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        ok = x > 0.0
        out[ok] = self.scale * np.exp(self.exponent * np.log(x[ok]))
        return out


@dataclass(frozen=True)
class Indicator(ClosedForm):
    """Characteristic function of ``[a, b]``."""

    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.a < self.b <= 1.0:
            raise InvalidForm(f"need 0 <= a < b <= 1, got a={self.a}, b={self.b}")

    def breakpoints(self):
        return tuple(p for p in (self.a, self.b) if 0.0 < p < 1.0)

    def values(self, x, offset=None):
        x = np.asarray(x, dtype=float)
        return ((x >= self.a) & (x <= self.b)).astype(complex)


@dataclass(frozen=True)
class Polynomial(ClosedForm):
    """Polynomial ``sum c_k x**k`` restricted to ``[a, b]``."""

    coeffs: tuple = (1.0,)
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if not 0.0 <= self.a < self.b <= 1.0:
            raise InvalidForm(f"need 0 <= a < b <= 1, got a={self.a}, b={self.b}")

    def breakpoints(self):
        return tuple(p for p in (self.a, self.b) if 0.0 < p < 1.0)

    def values(self, x, offset=None):
        x = np.asarray(x, dtype=float)
        on = (x >= self.a) & (x <= self.b)
        return np.where(on, np.polynomial.polynomial.polyval(x, self.coeffs), 0.0).astype(complex)


def evaluate(form, grid):
    """Sample ``form`` at the nodes of ``grid``."""
    if not isinstance(form, ClosedForm):
        raise InvalidForm(f"expected a ClosedForm, got {type(form).__name__}")
    offsets = grid.offset_from(form.singular_point)
    return GridFunction(grid, form.values(grid.nodes, offsets))


def graded_grid(form, order=640, points=16):
    """Geometric Gauss panels toward the form's singular point."""
    return make_grid(order, GeometricGraded(endpoint=form.singular_point, points=points))
