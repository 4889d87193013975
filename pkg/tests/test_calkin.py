import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.polys.domains import QQ_I

from hwlab.calkin import (
    Lollipop,
    SymbolPair,
    essential_spectrum,
    fit_exponent,
    fredholm_index,
    gamma_build,
    mixed_defect,
    product_defect,
    spike_rows,
    symbol_of,
    upsilon_rows,
    witness_limits,
)
from hwlab.errors import GluingViolation, IndexUndefined, InvalidArgument
from hwlab.operators import assemble, assemble_word
from hwlab.words import OperatorWord, parse_word

IDENTITY = SymbolPair.identity()


def test_lollipop_geometry():
    assert Lollipop.contains(1 + 0.9j) and Lollipop.contains(-0.5) and Lollipop.contains(2)
    assert not Lollipop.contains(-0.5 + 0.01j) and not Lollipop.contains(-1.01) and not Lollipop.contains(3)
    assert Lollipop.distance(3) == 1.0
    assert Lollipop.distance(-0.5 + 0.2j) == pytest.approx(0.2)
    assert Lollipop.distance(-2) == pytest.approx(1.0)
    assert Lollipop.distance(1) == 0.0
    d = Lollipop.distance(-2 + 2j)
    assert d == pytest.approx(min(abs(-2 + 2j + 1), abs(-2 + 2j - 1) - 1))
    assert np.all(Lollipop.distance(Lollipop.boundary(32)) < 1e-15)


def test_gluing_enforced():
    with pytest.raises(GluingViolation):
        SymbolPair((1,), (0, 1))
    SymbolPair((2, 5), (2, 0, 3))


@pytest.mark.parametrize(
    "word,fm,fp",
    [
        ("H - Mx", (0, 1), (0, 1)),
        ("H*Mx", (0,), (0,)),
        ("Mx*H", (0,), (0,)),
        ("V", (0,), (0,)),
        ("V*H + H*V - 3", (-3,), (-3,)),
        ("Mx", (0, -1), (0,)),
        ("Mx^2 + 2i*H^3", (0, 0, 1), (0, 0, 0, QQ_I(0, 2))),
        ("Hstar", None, None),
    ],
)
def test_symbol_examples(word, fm, fp):
    if fm is None:
        with pytest.raises(Exception):
            symbol_of(word)
        return
    assert symbol_of(word) == SymbolPair(fm, fp)


def _all_words(max_len=3):
    yield ()
    for k in range(1, max_len + 1):
        yield from itertools.product(("Mx", "H", "V"), repeat=k)


def test_symbol_is_multiplicative_on_short_words():
    words = [OperatorWord.from_terms([(1, w)]) for w in _all_words(3)]
    for a in words:
        for b in words:
            assert symbol_of(a * b) == symbol_of(a) * symbol_of(b)


_coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(_coef, st.lists(st.sampled_from(["Mx", "H", "V"]), max_size=3)), max_size=4),
       st.lists(st.tuples(_coef, st.lists(st.sampled_from(["Mx", "H", "V"]), max_size=3)), max_size=4))
def test_symbol_is_ring_homomorphism(a, b):
    x = OperatorWord.from_terms([(c, tuple(w)) for c, w in a])
    y = OperatorWord.from_terms([(c, tuple(w)) for c, w in b])
    assert symbol_of(x * y) == symbol_of(x) * symbol_of(y)
    assert symbol_of(x + y) == symbol_of(x) + symbol_of(y)


def test_gamma_of_identity_is_Z():
    assert np.array_equal(gamma_build(IDENTITY, 12).entries, assemble("Z", "legendre_orthonormal", 12).entries)


def test_gamma_of_squares():
    sq = SymbolPair((0, 0, 1), (0, 0, 1))
    for N in (16, 32, 64):
        D = gamma_build(sq, N).entries - assemble_word(parse_word("H^2 + Mx^2"), "legendre_orthonormal", N).entries
        assert np.linalg.norm(D, 2) < 1e-12


def test_product_defect_identity_pair_halves():
    rep = product_defect(IDENTITY, IDENTITY)
    assert rep.halves(2.0)
    assert rep.sigma_quarter[0] > 0.1


def test_product_defect_scalar_is_exact():
    rep = product_defect(IDENTITY, SymbolPair.constant(3))
    assert max(max(s) for s in rep.singular_values) <= 1e-12


def test_mixed_defect_decays():
    rep = mixed_defect([0, 1], [0, 1])
    assert rep.decreasing and rep.halves(2.0)


def test_essential_spectrum_samples():
    pts = essential_spectrum(IDENTITY, 64)
    assert len(pts) == 128
    assert np.all(Lollipop.distance(pts) < 1e-14)
    with pytest.raises(InvalidArgument):
        essential_spectrum(IDENTITY, 4)


def test_index_examples():
    assert fredholm_index(IDENTITY, 1) == 1
    assert fredholm_index(IDENTITY, 3) == 0
    assert fredholm_index(IDENTITY, -0.5 + 0.5j) == 0
    for n in (1, 2, 3):
        fp = tuple(int(c) for c in np.polynomial.polynomial.polypow([-1, 1], n))
        assert fredholm_index(SymbolPair(((-1) ** n,), fp), 0) == n


@pytest.mark.parametrize("lam", [0, 2, -0.5, 1 + 1j])
def test_index_undefined_on_essential_spectrum(lam):
    with pytest.raises(IndexUndefined):
        fredholm_index(IDENTITY, lam)


def test_index_invariant_under_refinement():
    f = SymbolPair((1,), (1, -4, 6, -4, 1))  # f_plus = (z - 1)^4 winds four times
    assert fredholm_index(f, 0.5) == 4
    for lam in (0.5, 0, 0.2 + 0.1j, 3):
        values = {fredholm_index(f, lam, samples=n) for n in (16, 64, 256, 4096)}
        assert len(values) == 1


def test_index_random_points():
    rng = np.random.default_rng(0)
    r = np.sqrt(rng.uniform(0, 0.95**2, 20))
    inside = 1 + r * np.exp(2j * np.pi * rng.uniform(size=20))
    assert all(fredholm_index(IDENTITY, z) == 1 for z in inside)


def test_spike_witness():
    rows = spike_rows(0.3, [8, 16, 32, 64])
    for r in rows:
        assert r.error == pytest.approx(1 / (3 * r.param**2), rel=1e-9)
    assert fit_exponent([r.param for r in rows], [r.error for r in rows]) >= 1.8
    h = [r.extra for r in rows]
    assert all(b < a for a, b in zip(h, h[1:]))
    with pytest.raises(InvalidArgument):
        spike_rows(0.1, [5])


def test_upsilon_witness_trend():
    rows = upsilon_rows(1, [0.5, 0.9, 0.99])
    vals = [r.value for r in rows]
    assert all(b < a for a, b in zip(vals, vals[1:])) and vals[-1] < 0.01
    assert all(r.error < 1e-10 and r.extra < 1e-9 for r in rows)
    rows = upsilon_rows(1j, [0.3, 0.8], rho=2)
    assert all(r.error < 1e-10 for r in rows)


@pytest.mark.parametrize("tau", [-1, 0.5, 2j])
def test_upsilon_witness_rejects_bad_tau(tau):
    with pytest.raises(InvalidArgument):
        upsilon_rows(tau, [0.5])


def test_witness_dispatch():
    assert len(witness_limits("spike", [8, 16], s=0.5)) == 2
    assert len(witness_limits("upsilon", [0.5], tau=1)) == 1
    with pytest.raises(InvalidArgument):
        witness_limits("bogus", [1])


def test_symbol_text():
    assert str(IDENTITY) == "f_minus(t) = t; f_plus(z) = z"
    assert str(SymbolPair((2, "-1/2"), (2, 0, 0.75j, -1))) == "f_minus(t) = 2 - 1/2*t; f_plus(z) = 2 + 3i/4*z^2 - z^3"
    assert str(symbol_of("V")) == "f_minus(t) = 0; f_plus(z) = 0"
