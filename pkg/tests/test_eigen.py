import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from hwlab.eigen import (
    adjoint_candidate,
    admissible,
    chain_continuity_probe,
    chain_numeric,
    chain_stick_order1,
    chain_zero,
    chain_zero_family,
    classify,
    derivative_functional,
    eigen_residual,
    eigenfunction,
    growth_bound_check,
    threshold,
)
from hwlab.errors import InvalidArgument, NotAnEigenvalue, NotInL2
from hwlab.forms import Order1Stick, PowerEigen, ZeroEigen
from hwlab.operators import OperatorId, residual
from hwlab.quadrature import l2_norm


@pytest.mark.parametrize(
    "lam,kind",
    [(1, "bulb"), (1.99, "bulb"), (0.5j + 1, "bulb"), (0, "zero"), (-0.5, "stick"), (-0.999, "stick"),
     (-1, "none"), (2, "none"), (3, "none"), (-0.5 + 0.1j, "none"), (2j, "none")],
)
def test_classify(lam, kind):
    assert classify(lam) == kind


def test_eigenfunction_variants():
    assert eigenfunction(1) == PowerEigen(1.0)
    assert eigenfunction(0) == ZeroEigen()
    assert eigenfunction(-0.3) == PowerEigen(-0.3, 0.3)
    for bad in (-1, 3, 2.0):
        with pytest.raises(NotAnEigenvalue):
            eigenfunction(bad)


@pytest.mark.parametrize("lam", [1.8 - 0.1j, 1 + 0.5j, 0.2])
def test_more_bulb_residuals(lam):
    assert eigen_residual(lam) < 1e-8


def _sympy_chain(m):
    u = sp.symbols("u")
    p = u**2
    out = [sp.Poly(p, u)]
    for _ in range(m):
        q = sp.integrate(sp.expand(p / u), u)
        p = sp.expand(u**2 * q - u**2 * sp.diff(q, u))
        out.append(sp.Poly(p, u))
    return out


def test_chain_zero_against_sympy_oracle():
    ours = chain_zero(6)
    for mine, ref in zip(ours, _sympy_chain(6)):
        ref_dict = {m[0]: Fraction(int(c.p), int(c.q)) for m, c in ref.terms()}
        assert mine.as_dict() == ref_dict


def test_chain_zero_first_members():
    p = chain_zero(2)
    assert str(p[0]) == "u^2"
    assert str(p[1]) == "u^4/2 - u^3"
    assert [(q.degree, q.valuation) for q in chain_zero(5)] == [(2 * n + 2, n + 2) for n in range(6)]
    with pytest.raises(InvalidArgument):
        chain_zero(-1)


def test_chain_zero_residuals_small():
    assert max(chain_zero_family(3).residuals()) < 1e-7


def test_stick_order1_form():
    f = chain_stick_order1(0.5)
    assert isinstance(f, Order1Stick)
    r = residual(OperatorId("Z", -0.5), f, target=PowerEigen(-0.5, 0.5))
    assert r < 1e-6
    with pytest.raises(NotInL2):
        chain_stick_order1(0.7)
    for bad in (0.0, -0.2, 1.0, 1.3):
        with pytest.raises(InvalidArgument):
            chain_stick_order1(bad)


def test_thresholds():
    assert threshold(1) == -2 / 3 and threshold(2) == -0.4
    assert admissible(-0.3, 2) and not admissible(-0.4, 2) and not admissible(-0.5j, 1)


def test_chain_numeric_residuals_and_zero_mean():
    fam = chain_numeric(-0.3, 2)
    assert max(fam.residuals()) < 1e-6
    assert fam.order == 2


def test_chain_numeric_errors_name_threshold():
    with pytest.raises(NotInL2, match="-2/\\(2m\\+1\\) = -0.4"):
        chain_numeric(-0.5, 2)
    with pytest.raises(InvalidArgument):
        chain_numeric(0.3, 1)
    with pytest.raises(InvalidArgument):
        chain_numeric(-0.3, 0)


def test_growth_bound_first_member_matches_closed_sup():
    s = 0.4
    rows = growth_bound_check(chain_numeric(-s, 2, strict=False))
    n0, measured, bound = rows[0]
    assert n0 == 0 and measured <= bound * (1 + 1e-9)
    # |f_0| (x - s)^{1 - 1/s} = x^{-1-1/s}, largest at x -> s
    assert abs(measured - bound) / bound < 1e-6
    assert all(m <= b for _, m, b in rows)


def test_growth_bound_single_member():
    fam = chain_numeric(-0.3, 1)
    one = type(fam)(fam.lam, fam.members[:1], fam.grid)
    assert len(growth_bound_check(one)) == 1


def test_continuity_probe():
    norm = l2_norm(chain_numeric(-0.4, 1).members[1])
    d = chain_continuity_probe(-0.4, -0.41, 1)
    assert 0 < d < 10 * math.sqrt(0.01) * norm
    assert chain_continuity_probe(-0.4, -0.4, 1) == 0.0
    with pytest.raises(NotInL2):
        chain_continuity_probe(-0.7, -0.69, 1)


def test_continuity_sequence_shrinks():
    ds = [chain_continuity_probe(-0.4, -0.4 - h, 1, order=1024) for h in (0.04, 0.02, 0.01, 0.005)]
    assert all(b < a for a, b in zip(ds, ds[1:]))


@pytest.mark.parametrize("poly,expected", [([0, 1], 1.0), ([0, 0, 1], -1.0), ([1], 0.0)])
@pytest.mark.parametrize("method", ["chain_rule", "apply"])
def test_derivative_functional_examples(poly, expected, method):
    assert abs(derivative_functional(-0.5, poly, method) - expected) < 1e-6


def test_derivative_functional_requires_order1_admissible():
    with pytest.raises(NotInL2):
        derivative_functional(-0.7, [0, 1])


@pytest.mark.parametrize("lam,value", [(0.5, 2.25), (1, 2.0), (0, math.e), (-0.5, 4.0)])
def test_adjoint_candidate(lam, value):
    v = adjoint_candidate(lam)
    assert v.verdict == "only-trivial"
    assert abs(v.g1_over_c - value) < 1e-12


def test_adjoint_candidate_at_minus_one():
    assert adjoint_candidate(-1).g1_over_c == math.inf


def test_eigen_residual_rejects_non_eigenvalues():
    with pytest.raises(NotAnEigenvalue):
        eigen_residual(-1)
    assert np.isfinite(eigen_residual(-0.999))
