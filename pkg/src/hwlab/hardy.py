"""Hardy-space picture: the unitary ``U`` from L^2[0, 1] onto H^2.

``U`` sends ``x^s`` to ``k_w / (s + 1)`` with ``w = conj(s) / (conj(s) + 1)``
and the Szego kernel ``k_w(z) = 1 / (1 - conj(w) z)``. Under ``U`` the
operators H, V and Mx become ``1 - S*``, ``(1 - S*) C_b*`` and ``S* C_b*``
where ``S`` is the shift and ``C_b f = f o b`` with ``b(z) = 1 / (2 - z)``.
Everything here works with truncated Taylor coefficient vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgument, NotInL2, NotIntegrable
from .forms import ClosedForm, Monomial, PowerEigen, Upsilon
from .operators import OperatorMatrix
from .quadrature import TanhSinh, make_grid


@dataclass(frozen=True)
class HardyVector:
    """Taylor coefficients ``c_0 .. c_{N-1}`` of an element of H^2."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or not np.all(np.isfinite(c)):
            raise InvalidArgument("Hardy vector needs a finite 1-d coefficient array")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __len__(self):
        return len(self.coeffs)

    def inner(self, other):
        return complex(np.sum(self.coeffs * np.conj(other.coeffs)))

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def __mul__(self, c):
        return HardyVector(self.coeffs * c)

    __rmul__ = __mul__


def szego_vector(w, N):
    """Coefficients ``conj(w)**k``, k < N, of the Szego kernel at ``w``."""
    w = complex(w)
    if not abs(w) < 1.0:
        raise InvalidArgument(f"Szego kernel needs |w| < 1, got {w}")
    if N < 1:
        raise InvalidArgument("N must be at least 1")
    return HardyVector(np.conj(w) ** np.arange(N))


def U_monomial(s, N):
    """Coefficients of ``U x^s``."""
    s = complex(s)
    if not s.real > -0.5:
        raise NotInL2(f"x**s is not square integrable for Re s = {s.real}")
    w = np.conj(s) / (np.conj(s) + 1.0)
    return szego_vector(w, N) * (1.0 / (s + 1.0))


def _power_at_zero(form):
    if isinstance(form, Monomial):
        return form.s
    if isinstance(form, Upsilon):
        return form.exponent
    if isinstance(form, PowerEigen) and not form.stick:
        return 1.0 / form.lam - 1.0
    return None


def U_integral(f, z, order=240):
    """``(1/(1 - z)) int_0^1 f(x) x^(z/(1-z)) dx`` by tanh-sinh quadrature."""
    z = complex(z)
    if not abs(z) < 1.0:
        raise InvalidArgument(f"need |z| < 1, got {z}")
    if not isinstance(f, ClosedForm):
        raise InvalidArgument("U_integral takes a closed form")
    a = z / (1.0 - z)
    p = _power_at_zero(f)
    if p is not None and not (p + a).real > -1.0:
        raise NotIntegrable(f"integrand behaves like x^{p + a:.4g} at 0")
    if f.breakpoints():
        grid = f.default_grid(order)
    else:
        grid = make_grid(order, TanhSinh(endpoint=f.singular_point))
    x = grid.nodes
    vals = f.values(x, grid.offset_from(f.singular_point)) * np.exp(a * np.log(x))
    return complex(np.sum(grid.weights * vals) / (1.0 - z))


@lru_cache(maxsize=8)
def _composition(N):
    m = np.zeros((N, N))
    m[0, 0] = 1.0
    for n in range(1, N):
        c = 1  # binom(n + k - 1, k), updated exactly
        for k in range(N):
            if k:
                c = c * (n + k - 1) // k
            m[k, n] = c / 2 ** (n + k)  # exact ints, one rounding
    m.setflags(write=False)
    return m


def composition_matrix(N):
    """Taylor coefficients of ``b(z)^n = (2 - z)^-n`` in column n."""
    if N < 1:
        raise InvalidArgument("N must be at least 1")
    return OperatorMatrix(_composition(int(N)), "hardy_monomial", "C_beta")


def backward_shift(c):
    """``S*``: drop ``c_0`` and move every coefficient down one slot."""
    c = np.asarray(c)
    out = np.zeros_like(c)
    out[:-1] = c[1:]
    return out


HAT = ("H_hat", "V_hat", "Mx_hat", "identity")


def hat_identity_residual(which, N=400, d=8):
    """Max over ``j <= d`` of ``||U(op x^j) - hat(op) U x^j||`` at truncation N."""
    if which not in HAT:
        raise InvalidArgument(f"unknown identity {which!r}; expected one of {HAT}")
    if d < 0 or d > N // 4:
        raise InvalidArgument("need 0 <= d <= N/4 so that truncation tails stay negligible")
    cstar = _composition(int(N)).T
    worst = 0.0
    for j in range(d + 1):
        u = U_monomial(j, N).coeffs
        if which == "H_hat":
            lhs = U_monomial(j, N).coeffs / (j + 1)
            rhs = u - backward_shift(u)
        elif which == "V_hat":
            lhs = U_monomial(j + 1, N).coeffs / (j + 1)
            v = cstar @ u
            rhs = v - backward_shift(v)
        elif which == "Mx_hat":
            lhs = U_monomial(j + 1, N).coeffs
            rhs = backward_shift(cstar @ u)
        else:
            lhs = rhs = u
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def unitarity_gram(n_max=8, N=400):
    """Gram matrix of ``U x^n`` (n <= n_max) and the Hilbert matrix it should equal."""
    vecs = [U_monomial(n, N) for n in range(n_max + 1)]
    gram = np.array([[a.inner(b) for b in vecs] for a in vecs])
    k = np.arange(n_max + 1)
    return gram, 1.0 / (k[:, None] + k[None, :] + 1.0)
