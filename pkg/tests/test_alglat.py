import numpy as np
import pytest

from hwlab.alglat import (
    KernelFunction,
    RankOnePair,
    block_diagonal_norm,
    dyadic_approximation,
    is_triangular,
    load_kernel_csv,
    midpoints,
    rank_one_defect,
    volterra_kernel,
)
from hwlab.errors import InvalidArgument, InvalidSupports, KernelFormatError, NotInAlgLat
from hwlab.forms import Indicator
from hwlab.quadrature import GridFunction, aligned_grid


def test_indicator_pair():
    pair = RankOnePair(Indicator(0.5, 1), Indicator(0, 0.5), 0.5)
    assert rank_one_defect(pair) <= 1e-8


def test_polynomial_pair_on_grid():
    g = aligned_grid({0.5}, points=32)
    x = g.nodes
    phi = GridFunction(g, np.where(x > 0.5, x - 0.5, 0.0))
    psi = GridFunction(g, np.where(x < 0.5, x, 0.0))
    assert rank_one_defect(RankOnePair(phi, psi, 0.5)) <= 1e-8


def test_polynomial_pair_applied_to_test_functions():
    # phi (x) psi f = phi <f, psi>, and M_phi V M_psi^* f = phi int_0^x conj(psi) f
    rng = np.random.default_rng(0)
    g = aligned_grid({0.5}, points=40)
    x, w = g.nodes, g.weights
    phi = np.where(x > 0.5, x - 0.5, 0.0)
    psi = np.where(x < 0.5, x, 0.0)
    for _ in range(5):
        f = np.polyval(rng.normal(size=5), x)
        ip = np.sum(w * f * psi)
        run = np.array([np.sum(w * f * psi * (x < xi)) for xi in x])
        assert np.max(np.abs(phi * ip - phi * run)) < 1e-12


def test_support_violations():
    with pytest.raises(InvalidSupports):
        rank_one_defect(RankOnePair(Indicator(0.5, 1), Indicator(0, 0.75), 0.5))
    with pytest.raises(InvalidSupports):
        rank_one_defect(RankOnePair(Indicator(0.25, 1), Indicator(0, 0.5), 0.5))
    with pytest.raises(InvalidArgument):
        RankOnePair(Indicator(0, 1), Indicator(0, 1), 1.0)


def test_triangularity():
    assert is_triangular(volterra_kernel())
    assert not is_triangular(KernelFunction(lambda x, s: np.ones_like(x * s)))
    assert is_triangular(KernelFunction(lambda x, s: np.maximum(x - s, 0.0)))


def test_volterra_sampling_and_norm():
    A = volterra_kernel().matrix(8)
    assert np.allclose(np.diag(A), 0.5 / 8)
    assert np.array_equal(np.triu(A, 1), np.zeros((8, 8)))
    # the midpoint Volterra matrix has norm close to 2/pi
    assert abs(np.linalg.norm(volterra_kernel().matrix(256), 2) - 2 / np.pi) < 1e-3


@pytest.fixture(scope="module")
def volterra_runs():
    return {L: dyadic_approximation(volterra_kernel(), L) for L in (1, 2, 3, 4)}


def test_dyadic_bounds_strictly_decrease(volterra_runs):
    b = [volterra_runs[L].bound for L in (1, 2, 3, 4)]
    assert all(y < x for x, y in zip(b, b[1:]))


def test_dyadic_error_dominated(volterra_runs):
    for res in volterra_runs.values():
        assert res.error <= res.bound + 1e-6


def test_dyadic_pieces_factor_through_V(volterra_runs):
    res = volterra_runs[3]
    assert res.rank > 0
    for piece in res.pieces[:: max(1, res.rank // 12)]:
        assert rank_one_defect(piece.pair()) <= 1e-8
    total = sum(p.matrix() for p in res.pieces)
    assert np.allclose(total, res.approximation)


def test_dyadic_is_deterministic():
    a = dyadic_approximation(volterra_kernel(), 3, N=128)
    b = dyadic_approximation(volterra_kernel(), 3, N=128)
    assert a.bounds == b.bounds and np.array_equal(a.approximation, b.approximation)


def test_dyadic_guards():
    with pytest.raises(NotInAlgLat):
        dyadic_approximation(KernelFunction(lambda x, s: np.ones_like(x * s)), 2)
    with pytest.raises(InvalidArgument):
        dyadic_approximation(KernelFunction(samples=np.zeros((100, 100))), 3)
    with pytest.raises(InvalidArgument):
        dyadic_approximation(volterra_kernel(), 0)
    zero = dyadic_approximation(KernelFunction(samples=np.zeros((16, 16))), 2)
    assert zero.bound == 0 and zero.error == 0 and zero.rank == 0


def test_block_norm_halving():
    v = volterra_kernel()
    norms = [block_diagonal_norm(v, n) for n in (1, 2, 4, 8)]
    assert norms[0] == pytest.approx(np.linalg.norm(v.matrix(256), 2))
    for a, b in zip(norms, norms[1:]):
        assert abs(b / a - 0.5) < 0.025
    assert abs(norms[1] / norms[0] - 0.5) < 5e-3
    with pytest.raises(InvalidArgument):
        block_diagonal_norm(v, 3)


def test_kernel_csv(tmp_path):
    N = 16
    x = midpoints(N)
    K = np.where(x[None, :] < x[:, None], 1.0, 0.0) + 0.5 * np.eye(N)
    path = tmp_path / "k.csv"
    np.savetxt(path, K, delimiter=",")
    k = load_kernel_csv(path)
    assert k.tag == "sampled(16)"
    assert np.array_equal(k.matrix(), volterra_kernel().matrix(16))
    (tmp_path / "bad.csv").write_text("1,2\n3\n")
    with pytest.raises(KernelFormatError):
        load_kernel_csv(tmp_path / "bad.csv")
    (tmp_path / "rect.csv").write_text("1,2\n3,4\n5,6\n")
    with pytest.raises(KernelFormatError):
        load_kernel_csv(tmp_path / "rect.csv")
    with pytest.raises(KernelFormatError):
        KernelFunction(samples=np.array([[np.nan]]))
