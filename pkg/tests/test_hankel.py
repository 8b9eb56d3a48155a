import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcmillan.dft import dft_forward, sup_norm
from mcmillan.hankel import (
    CirculantOperator,
    HankelOperator,
    dft_norm_bound,
    hankel_adjoint_matvec,
    hankel_dense,
    hankel_from_signal,
    hankel_matvec,
)

from conftest import crandn


def loop_hankel(g, m):
    n = len(g)
    return np.array([[g[j + k] for k in range(m)] for j in range(n - m)])


def test_dense_index_arithmetic():
    H = hankel_dense(hankel_from_signal(np.arange(6.0), 3))
    assert np.array_equal(H.real, [[0, 1, 2], [1, 2, 3], [2, 3, 4]])
    H = hankel_dense(hankel_from_signal(np.arange(6.0), 2))
    assert np.array_equal(H.real, [[0, 1], [1, 2], [2, 3], [3, 4]])


def test_degenerate_shapes():
    g = np.arange(1.0, 8.0)
    H = hankel_from_signal(g, len(g) - 1)
    assert H.shape == (1, 6)
    assert np.array_equal(H.dense().real[0], g[:-1])
    e0 = np.zeros(9)
    e0[0] = 1
    D = hankel_dense(hankel_from_signal(e0, 4))
    assert D[0, 0] == 1 and np.count_nonzero(D) == 1


def test_matvec_examples():
    G = hankel_from_signal(np.arange(6.0), 3)
    assert np.allclose(hankel_matvec(G, [1, 0, 0]), [0, 1, 2], rtol=0, atol=1e-14)
    e0 = np.zeros(10)
    e0[0] = 1
    out = hankel_matvec(hankel_from_signal(e0, 4), np.ones(4))
    assert np.allclose(out, np.eye(6)[0], rtol=0, atol=1e-14)


def test_adjoint_example():
    # a 2x2 Hankel with (n-m) x m shape needs four samples
    G = hankel_from_signal([1.0, 2.0, 3.0, 4.0], 2)
    assert np.allclose(hankel_adjoint_matvec(G, [1, 0]), [1, 2], atol=1e-15)


def test_rejects_bad_m():
    with pytest.raises(ValueError, match="m"):
        HankelOperator(np.ones(5), 5)
    with pytest.raises(ValueError, match="m"):
        HankelOperator(np.ones(5), 0)


def test_dense_cap():
    with pytest.raises(MemoryError):
        HankelOperator(np.ones(100), 50).dense(cap=100)


@pytest.mark.parametrize("n,m", [(41, 17), (33, 13), (64, 1), (64, 63), (255, 100),
                                 (256, 128), (257, 129)])
def test_fast_products_match_dense(rng, n, m):
    g = crandn(rng, n)
    D = loop_hankel(g, m)
    G = HankelOperator(g, m)
    x = crandn(rng, m)
    v = crandn(rng, n - m)
    assert np.linalg.norm(G.matvec(x) - D @ x) <= 1e-12 * np.linalg.norm(D @ x)
    ref = D.conj().T @ v
    assert np.linalg.norm(G.rmatvec(v) - ref) <= 1e-12 * np.linalg.norm(ref)
    assert np.allclose(G.dense(), D, atol=0)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 200), st.data())
def test_adjoint_identity(n, data):
    m = data.draw(st.integers(1, n - 1))
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    G = HankelOperator(crandn(rng, n), m)
    x, v = crandn(rng, m), crandn(rng, n - m)
    lhs = np.vdot(v, G.matvec(x))
    rhs = np.vdot(G.rmatvec(v), x)
    scale = np.linalg.norm(G.matvec(x)) * np.linalg.norm(v) + 1e-300
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_circulant_against_dense(rng):
    g = crandn(rng, 21)
    C = CirculantOperator(g)
    D = np.array([[g[(j - k) % 21] for k in range(21)] for j in range(21)])
    x = crandn(rng, 21)
    assert np.allclose(C.matvec(x), D @ x, atol=1e-12)
    assert np.allclose(C.adjoint_matvec(x), D.conj().T @ x, atol=1e-12)
    assert np.isclose(C.norm(), np.linalg.norm(D, 2), rtol=1e-12)


def test_norm_bound_examples():
    for n in (1, 4, 9, 64):
        e0 = np.zeros(n)
        e0[0] = 1
        assert abs(dft_norm_bound(e0) - 1) <= 1e-12
    assert abs(dft_norm_bound(np.ones(4)) - 4) <= 1e-12


def test_norm_bound_dominates_spectral_norm(rng):
    for n in (8, 16, 32, 64, 128, 256):
        for _ in range(20):
            g = crandn(rng, n)
            G = loop_hankel(g, n // 2)
            bound = np.sqrt(n) * sup_norm(dft_forward(g))
            assert np.linalg.norm(G, 2) <= bound * (1 + 1e-10)
            assert np.isclose(dft_norm_bound(g), bound, rtol=1e-14)
