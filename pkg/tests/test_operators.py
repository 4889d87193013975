import numpy as np
import pytest
from scipy.integrate import quad

from hwlab.errors import InvalidArgument
from hwlab.forms import Monomial, PowerEigen, Upsilon, ZeroEigen, evaluate
from hwlab.operators import (
    OperatorId,
    apply,
    assemble,
    assemble_word,
    commutator_residual,
    residual,
    singular_value_decay,
)
from hwlab.quadrature import GridFunction, TanhSinh, inner_product, make_grid
from hwlab.words import parse_word


@pytest.fixture(scope="module")
def gauss():
    return make_grid(40)


def test_H_and_V_of_one(gauss):
    one = GridFunction(gauss, np.ones(gauss.order))
    assert np.max(np.abs(apply("H", one).values - 1)) < 1e-13
    assert np.max(np.abs(apply("V", one).values - gauss.nodes)) < 1e-13


@pytest.mark.parametrize("s", [0.0, 1.0, 2.5, 0.3 + 0.4j, -0.3])
def test_H_on_monomials(s, gauss):
    out = apply("H", Monomial(s), gauss)
    assert np.max(np.abs(out.values - gauss.nodes**s / (s + 1))) < 1e-12


def test_Z_on_eigenfunction_at_one():
    g = make_grid(120, TanhSinh(0.0))
    out = apply("Z", PowerEigen(1.0), g)
    assert np.max(np.abs(out.values - 1 / (1 + g.nodes) ** 2)) < 1e-12


@pytest.mark.parametrize("lam", [1, 0.5, 1 + 0.5j, 1 - 0.7j])
def test_bulb_residuals(lam):
    assert residual(OperatorId("Z", lam), PowerEigen(lam)) < 1e-8


@pytest.mark.parametrize("s", [0.25, 0.5])
def test_stick_residuals(s):
    assert residual(OperatorId("Z", -s), PowerEigen(-s, s)) < 1e-6


def test_Hstar_of_zero_eigen_against_scipy():
    g = make_grid(160, TanhSinh(0.0))
    out = apply("Hstar", ZeroEigen(), g)
    pick = g.nodes > 0.02
    ref = [quad(lambda t: t**-3 * np.exp(-1 / t), x, 1, epsabs=1e-15, epsrel=1e-13)[0] for x in g.nodes[pick]]
    assert np.max(np.abs(out.values[pick] - ref)) < 1e-8


@pytest.mark.parametrize("alpha", [0, 0.5, 0.5j])
def test_upsilon_is_H_eigenvector(alpha):
    g = make_grid(200, TanhSinh(0.0))
    u = evaluate(Upsilon(alpha), g)
    hu = apply("H", Upsilon(alpha), g).values
    # Upsilon blows up at 0, so compare pointwise relative to |u|
    assert np.max(np.abs(hu - (1 + alpha) * u.values) / np.abs(u.values)) < 1e-9


def test_adjoint_consistency_V():
    rng = np.random.default_rng(0)
    g = make_grid(24)
    for _ in range(5):
        f = GridFunction(g, np.polyval(rng.normal(size=6), g.nodes))
        h = GridFunction(g, np.polyval(rng.normal(size=6) + 1j * rng.normal(size=6), g.nodes))
        assert abs(inner_product(apply("V", f), h) - inner_product(f, apply("Vstar", h))) < 1e-10
        assert abs(inner_product(apply("H", f), h) - inner_product(f, apply("Hstar", h))) < 1e-10


def test_monomial_compressions():
    assert np.array_equal(assemble("H", "monomial", 4).entries.real, np.diag([1, 1 / 2, 1 / 3, 1 / 4]))
    mx = assemble("Mx", "monomial", 3).entries.real
    assert np.array_equal(mx, np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]]))
    H = assemble("H", "monomial", 12).entries
    for n in range(12):
        e = np.zeros(12)
        e[n] = 1
        assert np.array_equal(H @ e, e / (n + 1))


def test_Z2_legendre_oracle():
    Z = assemble("Z", "legendre_orthonormal", 2).entries.real
    # Gram-Schmidt on {1, x}: e0 = 1, e1 = sqrt(3)(2x - 1)
    s3 = np.sqrt(3)
    assert np.allclose(Z, [[0.5, -s3 * 2 / 3], [-s3 / 6, 0.0]], atol=1e-15)
    ev = np.sort(np.linalg.eigvals(Z).real)
    assert np.allclose(ev, [-0.379152869605896, 0.879152869605896], atol=1e-12)


def test_legendre_compressions_match_quadrature():
    from hwlab.operators import legendre_vandermonde

    N = 6
    g = make_grid(40)
    L = legendre_vandermonde(g.nodes, N)  # columns: orthonormal shifted Legendre
    for tag in ("H", "V", "Mx", "Hstar", "Vstar"):
        A = assemble(tag, "legendre_orthonormal", N).entries
        for j in range(N):
            out = apply(tag, GridFunction(g, L[:, j])).values
            coef = (L.T * g.weights) @ out
            assert np.allclose(coef, A[:, j], atol=1e-12), tag


def test_word_compression_is_exact():
    N = 10
    big = 30
    w = parse_word("H*Mx*V - 2*Mx^2 + H")
    A = assemble_word(w, "legendre_orthonormal", N).entries
    Hb, Mb, Vb = (assemble(t, "legendre_orthonormal", big).entries for t in ("H", "Mx", "V"))
    full = Hb @ Mb @ Vb - 2 * Mb @ Mb + Hb
    assert np.allclose(A, full[:N, :N], atol=1e-13)


def test_commutators():
    assert commutator_residual("VMx_vs_V2", 8) <= 1e-12
    assert commutator_residual("HMx_vs_HV", 8) <= 1e-12
    assert commutator_residual("identity", 8) == 0


def test_volterra_singular_values():
    s = singular_value_decay("V", 64)
    assert np.all(np.diff(s) < 0)
    assert 0.6 < s[0] < 0.7
    assert abs(s[0] - 2 / np.pi) < 1e-6
    partial = np.cumsum(s**2)
    assert partial[-1] - partial[-9] < 1e-3
    # Hilbert-Schmidt norm of V is 1/sqrt(2)
    assert abs(partial[-1] - 0.5) < 1e-2
    assert np.allclose(singular_value_decay("identity", 8), 1.0)


def test_size_caps():
    with pytest.raises(InvalidArgument):
        assemble("H", "monomial", 41)
    with pytest.raises(InvalidArgument):
        assemble("Hstar", "monomial", 4)
    with pytest.raises(InvalidArgument):
        assemble("H", "legendre_orthonormal", 0)
