import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from hwlab.errors import InvalidForm, NotInL2
from hwlab.forms import (
    ChainPolynomial,
    ExpChain,
    Indicator,
    Monomial,
    Order1Stick,
    Polynomial,
    PowerEigen,
    Spike,
    Upsilon,
    ZeroEigen,
    evaluate,
)
from hwlab.quadrature import GridFunction, TanhSinh, aligned_grid, inner_product, l2_norm, make_grid


def test_power_eigen_at_one_half():
    assert abs(PowerEigen(1.0)(0.5) - 4 / 9) < 1e-15


def test_power_eigen_complex_branch_matches_cmath():
    lam = 1 + 0.5j
    x = 0.37
    ref = cmath.exp((1 / lam - 1) * math.log(x) - (1 + 1 / lam) * cmath.log(x + lam))
    assert abs(PowerEigen(lam)(x) - ref) < 1e-15


def test_stick_eigen_vanishes_left_of_support():
    f = PowerEigen(-0.4, 0.4)
    x = np.array([0.1, 0.39, 0.5, 1.0])
    v = f.values(x)
    assert v[0] == 0 and v[1] == 0
    assert abs(v[3] - 0.6**1.5) < 1e-14


def test_zero_eigen_at_one():
    assert abs(ZeroEigen()(1.0) - math.exp(-1)) < 1e-15


def test_upsilon_zero_is_one():
    assert np.allclose(Upsilon(0).values(np.linspace(0.01, 1, 7)), 1.0)


@pytest.mark.parametrize(
    "make",
    [
        lambda: PowerEigen(1.0, 0.3),
        lambda: PowerEigen(3.0),
        lambda: PowerEigen(-0.5),
        lambda: PowerEigen(0),
        lambda: Spike(0.3, 3),
        lambda: Spike(1.2, 10),
        lambda: Upsilon(1.0),
        lambda: Indicator(0.5, 0.2),
        lambda: Polynomial((1,), 0.6, 0.1),
    ],
)
def test_parameter_constraints(make):
    with pytest.raises(InvalidForm):
        make()


def test_l2_constraints():
    with pytest.raises(NotInL2):
        Order1Stick(0.7)
    with pytest.raises(NotInL2):
        Monomial(-0.5)
    Order1Stick(0.7, strict=False)
    Monomial(-0.6, strict=False)


@pytest.mark.parametrize("s,n", [(0.3, 8), (0.5, 3), (0.71, 64)])
def test_spike_unit_norm_on_aligned_grid(s, n):
    form = Spike(s, n)
    g = aligned_grid(form.breakpoints(), points=4)
    assert abs(l2_norm(evaluate(form, g)) - 1.0) < 1e-12


@pytest.mark.parametrize("alpha", [0, 0.3, 0.6, 0.9, 0.5j, -0.9, 0.6 + 0.6j])
def test_upsilon_unit_norm(alpha):
    g = make_grid(320, TanhSinh(0.0))
    assert abs(l2_norm(evaluate(Upsilon(alpha), g)) - 1.0) < 1e-10


@pytest.mark.parametrize("rho", [0, 1, 2])
@pytest.mark.parametrize("alpha", [0, 0.3, 0.6, 0.5j])
def test_upsilon_moment_formula(rho, alpha):
    g = make_grid(320, TanhSinh(0.0))
    u = evaluate(Upsilon(alpha), g)
    val = inner_product(GridFunction(g, g.nodes**rho * u.values), u)
    a2 = abs(alpha) ** 2
    expected = (1 - a2) / (abs(1 + alpha) ** 2 * rho + 1 - a2)
    assert abs(val - expected) < 1e-10


def test_chain_polynomial_metadata_and_text():
    p = ChainPolynomial.from_dict({4: Fraction(1, 2), 3: -1})
    assert (p.degree, p.valuation) == (4, 3)
    assert str(p) == "u^4/2 - u^3"
    assert str(ChainPolynomial.from_dict({2: 1})) == "u^2"
    assert str(ChainPolynomial.from_dict({6: Fraction(1, 8), 5: Fraction(-5, 6), 4: 1})) == "u^6/8 - 5*u^5/6 + u^4"
    assert p.as_dict() == {3: -1, 4: Fraction(1, 2)}


def test_exp_chain_matches_zero_eigen_for_u_squared():
    x = np.linspace(0.05, 1, 9)
    p = ChainPolynomial.from_dict({2: 1})
    assert np.allclose(ExpChain(p).values(x), ZeroEigen().values(x), rtol=1e-14)


def test_order1_stick_finite_near_support():
    f = Order1Stick(0.5)
    x = 0.5 + np.array([1e-300, 1e-12, 1e-3, 0.5])
    v = f.values(x)
    assert np.all(np.isfinite(v))
    assert f.values(np.array([0.4]))[0] == 0


def test_evaluate_rejects_non_forms():
    with pytest.raises(InvalidForm):
        evaluate(np.ones(3), make_grid(3))


def test_polynomial_restricted_to_interval():
    f = Polynomial((-0.5, 1.0), 0.5, 1.0)
    v = f.values(np.array([0.25, 0.75]))
    assert v[0] == 0 and abs(v[1] - 0.25) < 1e-15
