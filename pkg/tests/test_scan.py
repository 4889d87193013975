from fractions import Fraction

import numpy as np
import pytest

from hwlab.errors import InvalidArgument
from hwlab.scan import (
    ScanGrid,
    Z_word,
    exact_monomial_diagonal,
    lollipop_distance_profile,
    pseudospectrum,
    sigma_min,
    truncation_eigenvalues,
)


def test_eigenvalue_and_far_point():
    s = sigma_min("H - Mx", [1, 3], N=64)
    assert s[0] < 0.05
    assert s[1] > 0.5


def test_stick_point_sharpens_with_N():
    a = sigma_min(Z_word(), [-0.5], N=32)[0]
    b = sigma_min(Z_word(), [-0.5], N=64)[0]
    assert b < a


@pytest.mark.parametrize("lam", [1, 1.5, 0.6 + 0.3j])
def test_interior_nonincreasing_in_N(lam):
    a = sigma_min(Z_word(), [lam], N=32)[0]
    b = sigma_min(Z_word(), [lam], N=64)[0]
    assert b <= a + 1e-8


def test_monomial_finite_section_is_misleading():
    exact = exact_monomial_diagonal(5)
    assert exact == [Fraction(1, n) for n in range(1, 6)]
    for word in ("H", "H - Mx"):
        ev = truncation_eigenvalues(word, "monomial", 5)
        assert [complex(v) for v in ev] == [complex(float(f)) for f in exact]


def test_legendre_two_by_two_regression():
    ev = np.sort(np.real(truncation_eigenvalues("H - Mx", "legendre_orthonormal", 2)))
    assert np.allclose(ev, [-0.379152869605896, 0.879152869605896], atol=1e-12)
    with pytest.raises(InvalidArgument):
        truncation_eigenvalues("H", "monomial", 0)


def test_grid_validation_and_order():
    with pytest.raises(InvalidArgument):
        ScanGrid(nx=1)
    with pytest.raises(InvalidArgument):
        ScanGrid(re_range=(1, 0))
    with pytest.raises(InvalidArgument):
        ScanGrid(im_range=(0, np.inf))
    pts = ScanGrid((0, 1), (0, 2), 2, 3).points()
    assert list(pts) == [0, 1, 1j, 1 + 1j, 2j, 1 + 2j]


def test_conjugation_symmetry():
    grid = ScanGrid((-1.5, 2.5), (-1.5, 1.5), 21, 15)
    res = pseudospectrum("H - Mx", grid, N=32)
    S = res.sigma_min.reshape(grid.ny, grid.nx)
    assert np.max(np.abs(S - S[::-1])) < 1e-10
    assert np.all(res.sigma_min >= 0)


def test_profile_bands_small_grid():
    grid = ScanGrid(nx=41, ny=31)
    prof = lollipop_distance_profile(pseudospectrum(Z_word(), grid, N=64))
    assert prof.increasing
    assert sum(prof.counts) == 41 * 31
    assert prof.band_of(1) == 0
    assert prof.band_of(-2 + 2j) == 3


def test_rows_shape():
    grid = ScanGrid(nx=3, ny=2)
    rows = pseudospectrum("H", grid, N=8).as_rows()
    assert len(rows) == 6 and rows[0][:2] == (-1.5, -1.5)
