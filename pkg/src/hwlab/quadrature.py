"""Quadrature grids on [0, 1] and sampled functions living on them.

Four node layouts are available:

``GaussLegendre``
    a single Gauss-Legendre panel, exact for polynomials of degree < 2 * order.
``CompositeGraded``
    Gauss panels whose breakpoints sit at distance ``(j / M) ** grading_exponent``
    from the clustering endpoint.
``GeometricGraded``
    hp-style panels ``[e + d r**(k+1), e + d r**k]``; resolves power and
    logarithmic singularities uniformly in relative terms and supports
    antidifferentiation of strongly singular integrands.
``TanhSinh``
    the double-exponential rule; the most accurate choice for plain integrals
    of endpoint-singular functions, but it has no panel structure, so
    antidifferentiation and interpolation are not available on it.

Every grid also records, per node, the anchor of its panel and the offset
``node - anchor`` computed without cancellation. Closed forms singular at an
interior point ``s`` use these offsets for the factor ``x - s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Union

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.special import expit

from .errors import GridMismatch, InvalidArgument


@dataclass(frozen=True)
class GaussLegendre:
    name = "gauss_legendre"


@dataclass(frozen=True)
class CompositeGraded:
    endpoint: float = 0.0
    grading_exponent: float = 3.0
    points: int = 8
    name = "composite_graded"


@dataclass(frozen=True)
class GeometricGraded:
    endpoint: float = 0.0
    ratio: float = 0.5
    points: int = 16
    gap: bool = False  # leave the innermost panel [e, e + d_min] uncovered
    name = "geometric_graded"


@dataclass(frozen=True)
class TanhSinh:
    endpoint: float = 0.0
    floor: float = 1e-300
    name = "tanh_sinh"


@dataclass(frozen=True)
class PiecewiseGauss:
    """Gauss panels with prescribed breakpoints (for step functions)."""

    breakpoints: tuple = ()
    name = "piecewise_gauss"


@dataclass(frozen=True)
class MultiGraded:
    """Geometric panels toward each of several interior points (from the right)."""

    singular_points: tuple = (0.0,)
    ratio: float = 0.5
    points: int = 16
    gap: bool = False
    name = "multi_graded"


Scheme = Union[GaussLegendre, CompositeGraded, GeometricGraded, TanhSinh, PiecewiseGauss, MultiGraded]


class Panel(NamedTuple):
    lo: float  # offsets of the panel ends from ``anchor``
    hi: float
    anchor: float
    start: int
    stop: int
    gauss: bool  # False for tanh-sinh blocks


@lru_cache(maxsize=None)
def _gauss_rule(p):
    xi, w = npleg.leggauss(p)
    return xi, w


@lru_cache(maxsize=None)
def _integration_matrices(p):
    """Matrices mapping nodal values to int_{-1}^{xi_i} and int_{xi_i}^{1}."""
    xi, _ = _gauss_rule(p)
    vand_inv = np.linalg.inv(npleg.legvander(xi, p - 1))
    left = np.empty((p, p))
    right = np.empty((p, p))
    for k in range(p):
        c = np.zeros(p)
        c[k] = 1.0
        anti = npleg.legint(c, lbnd=-1.0)
        left[:, k] = npleg.legval(xi, anti)
        right[:, k] = npleg.legval(1.0, anti) - left[:, k]
    return left @ vand_inv, right @ vand_inv, vand_inv


class QuadratureGrid:
    """Nodes and weights on [0, 1] plus the panel layout that produced them."""

    def __init__(self, nodes, weights, scheme, panels, anchors, offsets):
        self.nodes = _frozen(nodes)
        self.weights = _frozen(weights)
        self.scheme = scheme
        self.panels = tuple(panels)
        self.anchors = _frozen(anchors)
        self.offsets = _frozen(offsets)

    @property
    def order(self):
        return len(self.nodes)

    @property
    def supports_calculus(self):
        return all(p.gauss for p in self.panels)

    def offset_from(self, point):
        """Return ``nodes - point``, exact for nodes anchored at ``point``."""
        same = self.anchors == point
        out = (self.anchors - point) + self.offsets
        out[same] = self.offsets[same]
        return out

    def breakpoints(self):
        return np.array([p.anchor + p.lo for p in self.panels] + [self.panels[-1].anchor + self.panels[-1].hi])

    def __repr__(self):
        return f"QuadratureGrid(order={self.order}, scheme={self.scheme!r})"


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _assemble(scheme, pieces):
    """Build a grid from ``(lo, hi, anchor, n, floor)`` panel descriptions.

    ``floor=None`` gives a Gauss panel; otherwise a tanh-sinh block clustered
    at the ``lo`` end whose smallest offset is about ``floor``.
    """
    nodes, weights, anchors, offsets, panels = [], [], [], [], []
    start = 0
    for lo, hi, anchor, n, floor in pieces:
        if floor is None:
            xi, w = _gauss_rule(n)
            off = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xi
            wt = 0.5 * (hi - lo) * w
        else:
            off, wt = _tanh_sinh_offsets(hi - lo, n, floor)
            off = lo + off
            keep = anchor + off < anchor + hi
            off, wt = off[keep], wt[keep]
        nodes.append(anchor + off)
        weights.append(wt)
        anchors.append(np.full(len(off), anchor))
        offsets.append(off)
        panels.append(Panel(lo, hi, anchor, start, start + len(off), floor is None))
        start += len(off)
    return _strict_grid(
        scheme, panels, np.concatenate(nodes), np.concatenate(weights),
        np.concatenate(anchors), np.concatenate(offsets),
    )


def _strict_grid(scheme, panels, nodes, weights, anchors, offsets):
    # Offsets below the spacing of floats near an interior anchor collapse
    # onto the anchor; drop them so nodes stay strictly increasing in (0, 1).
    prev = np.concatenate([[0.0], np.maximum.accumulate(nodes)[:-1]])
    keep = (nodes > prev) & (nodes < 1.0)
    if keep.all():
        return QuadratureGrid(nodes, weights, scheme, panels, anchors, offsets)
    index = np.cumsum(keep) - 1
    fixed = []
    for p in panels:
        start = int(index[p.start - 1] + 1) if p.start > 0 else 0
        stop = int(index[p.stop - 1] + 1)
        fixed.append(p._replace(start=start, stop=stop))
    return QuadratureGrid(nodes[keep], weights[keep], scheme, fixed, anchors[keep], offsets[keep])


def _tanh_sinh_offsets(length, n, floor):
    # xi = expit(pi sinh t) clusters double-exponentially at 0; the right end
    # is cut where 1 - xi drops below machine precision.
    t_lo = np.arcsinh(-np.log(floor / length) / np.pi)
    t_hi = np.arcsinh(37.0 / np.pi)
    t = np.linspace(-t_lo, t_hi, n)
    h = t[1] - t[0]
    arg = np.pi * np.sinh(t)
    xi = expit(arg)
    w = h * np.pi * np.cosh(t) * xi * expit(-arg)
    keep = xi * length > 0
    return length * xi[keep], length * w[keep]


def make_grid(order, scheme=None):
    """Return a quadrature grid with roughly ``order`` nodes on [0, 1].

    ``order`` is exact for Gauss-Legendre and tanh-sinh grids; panel schemes
    round it to a whole number of panels (see ``QuadratureGrid.order``).
    """
    scheme = GaussLegendre() if scheme is None else scheme
    if order < 2:
        raise InvalidArgument(f"grid order must be at least 2, got {order}")

    if isinstance(scheme, GaussLegendre):
        return _assemble(scheme, [(0.0, 1.0, 0.0, order, None)])

    if isinstance(scheme, PiecewiseGauss):
        br = sorted({0.0, 1.0, *[float(b) for b in scheme.breakpoints if 0.0 < b < 1.0]})
        per = max(2, order // (len(br) - 1))
        return _assemble(scheme, [(a, b, 0.0, per, None) for a, b in zip(br[:-1], br[1:])])

    if isinstance(scheme, MultiGraded):
        pts = sorted({float(p) for p in scheme.singular_points})
        if not pts or pts[0] < 0.0 or pts[-1] >= 1.0:
            raise InvalidArgument("singular points must lie in [0, 1)")
        if not 0.0 < scheme.ratio < 1.0:
            raise InvalidArgument("geometric ratio must lie in (0, 1)")
        p = scheme.points
        levels = max(1, order // (p * len(pts)) - 1)
        dist = np.concatenate([[0.0], scheme.ratio ** np.arange(levels, -1, -1)])
        pieces = []
        if pts[0] > 0.0:
            br = np.linspace(0.0, pts[0], max(1, int(np.ceil(4 * pts[0]))) + 1)
            pieces.extend((a, b, 0.0, p, None) for a, b in zip(br[:-1], br[1:]))
        for lo, hi in zip(pts, pts[1:] + [1.0]):
            span = hi - lo
            d = _resolvable(dist, lo, span, p)
            if scheme.gap:
                d = d[1:]
            pieces.extend((span * a, span * b, lo, p, None) for a, b in zip(d[:-1], d[1:]))
        return _assemble(scheme, pieces)

    e = float(scheme.endpoint)
    if not 0.0 <= e <= 1.0:
        raise InvalidArgument(f"endpoint must lie in [0, 1], got {e}")

    if isinstance(scheme, TanhSinh):
        if e == 1.0:
            off, wt = _tanh_sinh_offsets(1.0, order, scheme.floor)
            off, wt = -off[::-1], wt[::-1]
            panel = Panel(-1.0, 0.0, 1.0, 0, len(off), False)
            return _strict_grid(scheme, [panel], 1.0 + off, wt, np.ones(len(off)), off)
        pieces = []
        if e > 0.0:
            pieces.append((0.0, e, 0.0, max(8, order // 8), None))
        pieces.append((0.0, 1.0 - e, e, order, scheme.floor))
        return _assemble(scheme, pieces)

    if isinstance(scheme, CompositeGraded):
        if scheme.grading_exponent < 1:
            raise InvalidArgument("grading exponent must be >= 1")
        p = scheme.points
        m = max(1, order // p)
        dist = (np.arange(m + 1) / m) ** scheme.grading_exponent
        return _assemble(scheme, _graded_pieces(e, dist, p))

    if isinstance(scheme, GeometricGraded):
        if not 0.0 < scheme.ratio < 1.0:
            raise InvalidArgument("geometric ratio must lie in (0, 1)")
        p = scheme.points
        levels = max(1, order // p - 1)
        dist = np.concatenate([[0.0], scheme.ratio ** np.arange(levels, -1, -1)])
        return _assemble(scheme, _graded_pieces(e, dist, p, scheme.gap))

    raise InvalidArgument(f"unknown quadrature scheme {scheme!r}")


def _resolvable(dist, anchor, span, p):
    """Trim the innermost levels of ``dist`` whose Gauss nodes would round onto ``anchor``."""
    if anchor == 0.0:
        return dist
    xi, _ = _gauss_rule(p)
    rel = 0.5 * (1.0 + xi[0])  # smallest node of a panel, relative to its width
    floor = 64.0 * np.spacing(abs(anchor))
    while len(dist) > 3 and span * dist[1] * rel <= floor:
        dist = np.concatenate([[0.0], dist[2:]])
    return dist


def _graded_pieces(e, dist, p, gap=False):
    """Panels at relative distances ``dist`` (ascending, 0..1) from ``e``.

    With ``gap`` the innermost panel is dropped, so no panel touches ``e``;
    integrands with a non-polynomial singularity at ``e`` are then never
    interpolated across it.
    """
    dist = _resolvable(dist, e, 1.0 - e if e < 1.0 else 1.0, p)
    if gap:
        dist = dist[1:]
    pieces = []
    if e == 1.0:
        for a, b in zip(dist[::-1][:-1], dist[::-1][1:]):
            pieces.append((-a, -b, 1.0, p, None))
        return pieces
    if e > 0.0:
        n_left = max(1, int(np.ceil(4 * e)))
        br = np.linspace(0.0, e, n_left + 1)
        pieces.extend((a, b, 0.0, p, None) for a, b in zip(br[:-1], br[1:]))
    span = 1.0 - e
    pieces.extend((span * a, span * b, e, p, None) for a, b in zip(dist[:-1], dist[1:]))
    return pieces


def aligned_grid(breakpoints, points=16):
    """Gauss panels of ``points`` nodes each, split at every breakpoint."""
    br = sorted({float(b) for b in breakpoints if 0.0 < b < 1.0})
    return make_grid(points * (len(br) + 1), PiecewiseGauss(tuple(br)))


class GridFunction:
    """Complex samples of an L^2[0, 1] function at the nodes of a grid."""

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != grid.nodes.shape:
            raise InvalidArgument(
                f"expected {grid.order} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidArgument("grid function values must be finite")
        values = values.copy()
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def __add__(self, other):
        _check_same(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        return GridFunction(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def norm(self):
        return l2_norm(self)

    def __repr__(self):
        return f"GridFunction(order={self.grid.order}, norm={self.norm():.6g})"


def same_grid(a, b):
    return a is b or (
        a.nodes.shape == b.nodes.shape
        and np.array_equal(a.nodes, b.nodes)
        and np.array_equal(a.weights, b.weights)
    )


def _check_same(f, g):
    if not same_grid(f.grid, g.grid):
        raise GridMismatch("grid functions live on different grids")


def inner_product(f, g):
    """Quadrature value of the L^2 pairing <f, g> = int f conj(g)."""
    _check_same(f, g)
    # split real arithmetic keeps <f, g> == conj(<g, f>) bit for bit
    w = f.grid.weights
    fr, fi, gr, gi = f.values.real, f.values.imag, g.values.real, g.values.imag
    re = np.sum(w * (fr * gr + fi * gi))
    im = np.sum(w * (fi * gr - fr * gi))
    return complex(re, im)


def l2_norm(f):
    return float(np.sqrt(np.sum(f.grid.weights * np.abs(f.values) ** 2)))


def integrate(f):
    return complex(np.sum(f.grid.weights * f.values))


def _hole_integral(grid, panel, vals):
    """Estimate the integral over an uncovered ``[anchor, anchor + panel.lo]``.

    The integrand is modelled as ``c t^a`` through the two nodes nearest the
    anchor; a non-integrable fit (``Re a <= -1``) contributes nothing.
    """
    i, j = panel.start, panel.start + 1
    t1, t2 = grid.offsets[i], grid.offsets[j]
    v1, v2 = complex(vals[i]), complex(vals[j])
    if v1 == 0.0 or v2 == 0.0 or not t2 > t1 > 0.0:
        return 0.0
    a = np.log(v2 / v1) / np.log(t2 / t1)
    if not np.isfinite(a) or a.real <= -1.0:
        return 0.0
    d = panel.lo
    val = v1 * (d / t1) ** a * d / (a + 1.0)
    return val if np.iscomplexobj(vals) else val.real


def cumulative_integral(f, side="left"):
    """Antiderivative of the panelwise interpolant, sampled at the nodes.

    ``side="left"`` returns int_0^x f, ``side="right"`` returns int_x^1 f. The
    right-sided version is computed from the right end directly, so it stays
    accurate for integrands that are not integrable at the left end. On grids
    with a gap at a singular point the left-sided version adds a power-law
    estimate of the missing piece (see ``_hole_integral``).
    """
    grid = f.grid
    if not grid.supports_calculus:
        raise InvalidArgument(
            f"{grid.scheme.name} grids do not support antidifferentiation"
        )
    vals = f.values
    out = np.empty_like(vals)
    totals = [np.sum(grid.weights[p.start:p.stop] * vals[p.start:p.stop]) for p in grid.panels]
    if side == "left":
        acc = 0.0
        prev = None
        for p, tot in zip(grid.panels, totals):
            if p.gauss and p.lo > 0.0 and (prev is None or prev.anchor != p.anchor):
                acc += _hole_integral(grid, p, vals)
            prev = p
            left, _, _ = _integration_matrices(p.stop - p.start)
            out[p.start:p.stop] = acc + 0.5 * (p.hi - p.lo) * (left @ vals[p.start:p.stop])
            acc += tot
    elif side == "right":
        acc = 0.0
        for p, tot in zip(grid.panels[::-1], totals[::-1]):
            _, right, _ = _integration_matrices(p.stop - p.start)
            out[p.start:p.stop] = acc + 0.5 * (p.hi - p.lo) * (right @ vals[p.start:p.stop])
            acc += tot
    else:
        raise InvalidArgument("side must be 'left' or 'right'")
    return GridFunction(grid, out)


def interpolate(f, points, anchor=None, offsets=None):
    """Evaluate the panelwise polynomial interpolant of ``f`` at ``points``.

    Points outside [0, 1] map to 0. When ``offsets = points - anchor`` are
    supplied they replace the subtraction for panels anchored at ``anchor``.
    """
    grid = f.grid
    if not grid.supports_calculus:
        raise InvalidArgument(f"{grid.scheme.name} grids do not support interpolation")
    points = np.asarray(points, dtype=float)
    out = np.zeros(points.shape, dtype=complex)
    br = grid.breakpoints()
    idx = np.clip(np.searchsorted(br, points, side="right") - 1, 0, len(grid.panels) - 1)
    inside = (points >= 0.0) & (points <= 1.0)
    for k, p in enumerate(grid.panels):
        sel = inside & (idx == k)
        if not np.any(sel):
            continue
        if offsets is not None and anchor == p.anchor:
            off = np.asarray(offsets, dtype=float)[sel]
        else:
            off = points[sel] - p.anchor
        xi = np.clip((2.0 * off - (p.lo + p.hi)) / (p.hi - p.lo), -1.0, 1.0)
        n = p.stop - p.start
        _, _, vand_inv = _integration_matrices(n)
        coef = vand_inv @ f.values[p.start:p.stop]
        out[sel] = npleg.legval(xi, coef)
    return out


class NormTrajectory(NamedTuple):
    points: list
    verdict: str  # "converged", "diverging" or "undecided"


def classify_trajectory(norms, rel_tol=1e-8, growth=1.5):
    """Convergence heuristic for a sequence of norms under refinement."""
    norms = list(norms)
    if len(norms) >= 4 and norms[-1] >= growth * norms[-4] and all(
        b >= a for a, b in zip(norms[-4:], norms[-3:])
    ):
        return "diverging"
    if len(norms) >= 2 and abs(norms[-1] - norms[-2]) <= rel_tol * abs(norms[-1]):
        return "converged"
    return "undecided"


def norm_trajectory(form, orders, scheme=None):
    """L^2 norms of ``form`` on grids of increasing depth toward its singular point.

    ``form`` is a ``ClosedForm`` (or anything with ``singular_point`` and the
    ``values(x, offset)`` protocol). The default grids are geometric, so each
    refinement reaches further into the singularity: divergent integrals keep
    growing while convergent ones settle.
    """
    from .forms import evaluate

    orders = list(orders)
    if any(b <= a for a, b in zip(orders, orders[1:])):
        raise InvalidArgument("orders must be strictly increasing")
    if scheme is None:
        scheme = GeometricGraded(endpoint=form.singular_point, ratio=0.5, points=8)
    pts = []
    for n in orders:
        g = make_grid(n, scheme)
        pts.append((n, l2_norm(evaluate(form, g))))
    return NormTrajectory(pts, classify_trajectory([v for _, v in pts]))


def integration_matrix(grid, side="left"):
    """Dense matrix ``M`` with ``cumulative_integral(f, side).values == M @ f.values``.

    On gap grids the left-sided matrix omits the (nonlinear) hole estimate.
    """
    if not grid.supports_calculus:
        raise InvalidArgument(f"{grid.scheme.name} grids do not support antidifferentiation")
    n = grid.order
    m = np.zeros((n, n))
    panels = list(grid.panels)
    for k, p in enumerate(panels):
        left, right, _ = _integration_matrices(p.stop - p.start)
        half = 0.5 * (p.hi - p.lo)
        blk = slice(p.start, p.stop)
        if side == "left":
            m[blk, blk] = half * left
            for q in panels[:k]:
                m[blk, q.start:q.stop] = grid.weights[q.start:q.stop]
        elif side == "right":
            m[blk, blk] = half * right
            for q in panels[k + 1:]:
                m[blk, q.start:q.stop] = grid.weights[q.start:q.stop]
        else:
            raise InvalidArgument("side must be 'left' or 'right'")
    return m
