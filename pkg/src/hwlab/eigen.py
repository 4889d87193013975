"""Eigenfunctions and generalized eigenvector chains of ``Z = H - Mx``.

Point spectrum: the open disc ``|lam - 1| < 1``, the point 0 and the segment
``(-1, 0)``. Chains ``(Z - lam) f_{n+1} = f_n`` are built

* exactly at ``lam = 0``, where ``f_n = p_n(1/x) exp(-1/x)`` for polynomials
  ``p_n`` obtained by a rational recursion;
* in closed form at order 1 on the segment (:class:`~hwlab.forms.Order1Stick`);
* numerically to any admissible order on the segment.

For the numeric chain write ``s = -lam``, ``tau = x - s`` and
``Phi = (tau / x) ** (1/s)``. With ``h_n = f_n / Phi`` the recursion becomes

    h_0 = 1 / (x tau),
    h_{n+1} = (J_n / x - h_n) / tau,   J_n(x) = int_x^1 h_n(t) / (t - s) dt,

with every integration constant set to zero, so ``int_s^1 f_{n+1} = 0``. The
right-sided integral is accumulated from ``x = 1`` on panels refined
geometrically toward ``s``, with ``tau`` taken from the grid's exact offsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateChain, InvalidArgument, NotAnEigenvalue, NotInL2
from .forms import ChainPolynomial, ExpChain, Order1Stick, PowerEigen, ZeroEigen
from .operators import OperatorId, apply, residual
from .quadrature import (
    GeometricGraded,
    GridFunction,
    MultiGraded,
    cumulative_integral,
    inner_product,
    l2_norm,
    make_grid,
)

__all__ = [
    "ChainFamily",
    "ChainPolynomial",
    "adjoint_candidate",
    "admissible",
    "chain_continuity_probe",
    "chain_numeric",
    "chain_stick_order1",
    "chain_zero",
    "chain_zero_family",
    "classify",
    "derivative_functional",
    "eigenfunction",
    "growth_bound_check",
]


def classify(lam):
    """Return ``"bulb"``, ``"zero"``, ``"stick"`` or ``"none"``."""
    lam = complex(lam)
    if lam == 0:
        return "zero"
    if abs(lam - 1.0) < 1.0:
        return "bulb"
    if lam.imag == 0.0 and -1.0 < lam.real < 0.0:
        return "stick"
    return "none"


def eigenfunction(lam):
    """Eigenfunction of ``Z`` at ``lam`` with unit multiplicative constant.

    Raises
    ------
    NotAnEigenvalue
        if ``lam`` is outside the point spectrum (in particular ``lam = -1``).
    """
    kind = classify(lam)
    if kind == "bulb":
        return PowerEigen(complex(lam))
    if kind == "zero":
        return ZeroEigen()
    if kind == "stick":
        s = -complex(lam).real
        return PowerEigen(-s, s)
    raise NotAnEigenvalue(f"{complex(lam)} is not an eigenvalue of Z")


def eigen_residual(lam, grid=None):
    """Relative residual ``||(Z - lam) f|| / ||f||`` for the eigenfunction at ``lam``."""
    f = eigenfunction(lam)
    return residual(OperatorId("Z", lam), f, grid=grid)


# ---------------------------------------------------------------- lam = 0


def chain_zero(m):
    """Exact chain polynomials ``p_0, ..., p_m`` at ``lam = 0``.

    ``p_0 = u^2``; ``q_n`` is the antiderivative of ``p_n(u)/u`` with zero
    constant and ``p_{n+1} = u^2 (q_n - q_n')``.

    >>> [str(p) for p in chain_zero(1)]
    ['u^2', 'u^4/2 - u^3']
    """
    if int(m) != m or m < 0:
        raise InvalidArgument(f"m must be a non-negative integer, got {m}")
    p = {2: Fraction(1)}
    out = [ChainPolynomial.from_dict(p, 0)]
    for n in range(int(m)):
        q = {k: c / k for k, c in p.items()}  # int u^(k-1) du = u^k / k
        dq = {k - 1: c * k for k, c in q.items()}
        nxt = {}
        for k, c in q.items():
            nxt[k + 2] = nxt.get(k + 2, 0) + c
        for k, c in dq.items():
            nxt[k + 2] = nxt.get(k + 2, 0) - c
        p = {k: c for k, c in nxt.items() if c != 0}
        out.append(ChainPolynomial.from_dict(p, n + 1))
    return out


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class ChainFamily:
    """Chain ``f_0, ..., f_m`` with ``(Z - lam) f_{n+1} = f_n``.

    ``members`` are closed forms (``lam = 0``) or grid functions (segment).
    """

    lam: complex
    members: tuple
    grid: object = None

    @property
    def order(self):
        return len(self.members) - 1

    @property
    def s(self):
        return -complex(self.lam).real

    def sampled(self, grid=None):
        """Members as grid functions on ``grid`` (or the family's grid)."""
        from .forms import evaluate

        g = self.grid if grid is None else grid
        return [m if isinstance(m, GridFunction) else evaluate(m, g) for m in self.members]

    def residuals(self):
        """``[||(Z - lam) f_0|| / ||f_0||, ||(Z - lam) f_1 - f_0|| / ||f_0||, ...]``."""
        op = OperatorId("Z", self.lam)
        out = [residual(op, self.members[0], grid=self.grid if not isinstance(self.members[0], GridFunction) else None)]
        for lo, hi in zip(self.members, self.members[1:]):
            if isinstance(hi, GridFunction):
                out.append(_grid_residual(op, hi, lo))
            else:
                out.append(residual(op, hi, target=lo, grid=self.grid))
        return out


def _grid_residual(op, f, target):
    r = apply(op, f) - target
    return l2_norm(r) / l2_norm(target)


def chain_zero_family(m, grid=None):
    """Chain at ``lam = 0`` as :class:`~hwlab.forms.ExpChain` closed forms."""
    members = tuple(ExpChain(p) for p in chain_zero(m))
    return ChainFamily(0.0, members, grid if grid is not None else members[0].default_grid(320))


def chain_stick_order1(s):
    """Closed-form first generalized eigenvector at ``lam = -s``."""
    s = float(s)
    if not 0.0 < s < 1.0:
        raise InvalidArgument(f"s must lie in (0, 1), got {s}")
    if s >= 2.0 / 3.0:
        raise NotInL2(f"order-1 chain at lam = {-s} is not square integrable (needs s < 2/3)")
    return Order1Stick(s)


def threshold(m):
    """Left end ``-2/(2m+1)`` of the admissible interval for order ``m``."""
    return -2.0 / (2 * m + 1)


def admissible(lam, m):
    lam = complex(lam)
    return lam.imag == 0.0 and threshold(m) < lam.real < 0.0


def stick_grid(s, order=1024):
    return make_grid(order, GeometricGraded(endpoint=s, ratio=0.5, points=16, gap=True))


def chain_numeric(lam, m, grid=None, strict=True):
    """Numeric chain of order ``m`` at a point ``lam`` of the segment.

    Parameters
    ----------
    lam : float
        In ``(-1, 0)``.
    m : int
        Highest order, ``m >= 1``.
    grid : QuadratureGrid, optional
        Must have a panel anchored at ``s = -lam``; defaults to geometric
        panels toward ``s``.
    strict : bool
        When true (default) the chain must lie in L^2, i.e.
        ``lam > -2/(2m+1)``. ``strict=False`` builds the chain pointwise for
        any ``lam`` in ``(-1, 0)``, for growth-bound studies at the threshold.

    Raises
    ------
    NotInL2
        if ``strict`` and ``lam <= -2/(2m+1)``.
    """
    lam = complex(lam)
    if lam.imag != 0.0 or not -1.0 < lam.real < 0.0:
        raise InvalidArgument(f"lam must be real in (-1, 0), got {lam}")
    if int(m) != m or m < 1:
        raise InvalidArgument(f"m must be an integer >= 1, got {m}")
    m = int(m)
    if strict and not admissible(lam, m):
        raise NotInL2(
            f"order-{m} chain at lam = {lam.real:g} is not in L^2: "
            f"need lam > -2/(2m+1) = {threshold(m):.6g}"
        )
    s = -lam.real
    g = stick_grid(s) if grid is None else grid
    x = g.nodes
    tau = g.offset_from(s)
    inside = tau > 0.0
    lt = np.where(inside, np.log(np.where(inside, tau, 1.0)), 0.0)
    lx = np.log(x)
    log_phi = (lt - lx) / s
    phi = np.where(inside, np.exp(log_phi), 0.0)

    t_safe = np.where(inside, tau, 1.0)
    h = np.where(inside, 1.0 / (x * t_safe), 0.0)
    hs = [h]
    for _ in range(m):
        integrand = GridFunction(g, np.where(inside, h / t_safe, 0.0))
        j = cumulative_integral(integrand, side="right").values.real
        h = np.where(inside, (j / x - h) / t_safe, 0.0)
        hs.append(h)
    members = tuple(GridFunction(g, phi * hn) for hn in hs)
    return ChainFamily(lam.real, members, g)


def growth_bound_check(family):
    """Compare ``sup |f_n| (x - s)^(n + 1 - 1/s)`` with the recursive bound.

    Returns a list of ``(n, measured, bound)`` where ``M_0 = s^-(1 + 1/s)`` and
    ``M_{n+1} = M_n (1 + M_0 / (n + 1))``.
    """
    s = family.s
    g = family.grid
    tau = g.offset_from(s)
    inside = tau > 0.0
    m0 = s ** -(1.0 + 1.0 / s)
    rows = []
    bound = m0
    for n, f in enumerate(family.sampled()):
        if n > 0:
            bound = bound * (1.0 + m0 / n)
        weight = np.exp((n + 1 - 1.0 / s) * np.log(tau[inside]))
        measured = float(np.max(np.abs(f.values[inside]) * weight))
        rows.append((n, measured, bound))
    return rows


def chain_continuity_probe(lam1, lam2, n, order=1536):
    """L^2 distance between ``f_{lam1, n}`` and ``f_{lam2, n}``.

    Both chains are built on one grid refined toward both ``-lam1`` and
    ``-lam2``.
    """
    if abs(lam1 - lam2) > 0.05 + 1e-15:
        raise InvalidArgument("the probe compares parameters at most 0.05 apart")
    for lam in (lam1, lam2):
        if not admissible(lam, max(n, 1)):
            raise NotInL2(
                f"lam = {lam} is not admissible for order {n}: need lam > {threshold(max(n, 1)):.6g}"
            )
    pts = tuple(sorted({-float(lam1), -float(lam2)}))
    g = make_grid(order, MultiGraded(pts, 0.5, 16, gap=True))
    a = chain_numeric(lam1, max(n, 1), grid=g).members[n]
    if lam1 == lam2:
        return 0.0
    b = chain_numeric(lam2, max(n, 1), grid=g).members[n]
    return l2_norm(a - b)


def _poly_value(coeffs, z):
    return sum(complex(c) * z**k for k, c in enumerate(coeffs))


def _poly_derivative(coeffs, z):
    return sum(k * complex(c) * z ** (k - 1) for k, c in enumerate(coeffs) if k)


def dual_vector(family):
    """``g = a_0 f_0 + a_1 f_1`` with ``<f_0, g> = 1`` and ``<f_1, g> = 0``."""
    f0, f1 = family.sampled()[:2]
    gram = np.array(
        [[inner_product(f0, f0), inner_product(f0, f1)],
         [inner_product(f1, f0), inner_product(f1, f1)]]
    )
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > 1e12:
        raise DegenerateChain(f"Gram matrix of the order-1 chain is singular (condition {cond:.3g})")
    a = np.conj(np.linalg.solve(gram, np.array([1.0, 0.0])))
    return a[0] * f0 + a[1] * f1


def derivative_functional(lam, poly, method="chain_rule", family=None):
    """Pair ``p(Z) f_{lam,1}`` with the dual vector; the result is ``p'(lam)``.

    ``poly`` lists coefficients in ascending degree. ``method="chain_rule"``
    uses ``p(Z) f_1 = p(lam) f_1 + p'(lam) f_0``; ``method="apply"`` evaluates
    ``p(Z) f_1`` by Horner's scheme with the sampled operator.
    """
    lam = float(np.real(lam))
    if not admissible(lam, 1):
        raise NotInL2(f"lam = {lam} is not admissible for order 1: need -2/3 < lam < 0")
    fam = chain_numeric(lam, 1) if family is None else family
    f0, f1 = fam.sampled()[:2]
    g = dual_vector(fam)
    coeffs = list(poly)
    if method == "chain_rule":
        pf = _poly_value(coeffs, lam) * f1 + _poly_derivative(coeffs, lam) * f0
    elif method == "apply":
        pf = complex(coeffs[-1]) * f1 if coeffs else 0.0 * f1
        for c in reversed(coeffs[:-1]):
            pf = apply("Z", pf) + complex(c) * f1
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    return inner_product(pf, g)


@dataclass(frozen=True)
class AdjointVerdict:
    verdict: str
    g1_over_c: float
    solution: str


def adjoint_candidate(lam):
    """Test ``G = -x (x + lam) G'`` with ``G(1) = 0`` for nontrivial solutions.

    The general solution is built and checked with sympy; its value at 1 is a
    nonzero multiple of the free constant, so only ``G = 0`` survives.
    """
    import sympy as sp

    x, c = sp.symbols("x c", positive=True)
    lam_c = complex(lam)
    if lam_c == 0:
        sol = c * sp.exp(1 / x)
        lam_s = sp.Integer(0)
    else:
        lam_s = sp.nsimplify(lam_c.real) + sp.I * sp.nsimplify(lam_c.imag)
        sol = c * x ** (-1 / lam_s) * (x + lam_s) ** (1 / lam_s)
    ode = sp.simplify(sol + x * (x + lam_s) * sp.diff(sol, x))
    if ode != 0 and abs(complex(ode.subs({x: sp.Rational(7, 10), c: 1}).evalf())) > 1e-12:
        raise ArithmeticError("constructed solution fails the equation")  # pragma: no cover
    if lam_c == -1:
        value = math.inf
    else:
        value = abs(complex(sp.N((sol / c).subs(x, 1), 30)))
    return AdjointVerdict("only-trivial", value, str(sol))
