import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcmillan.dft import dft_forward, dft_inverse, sup_norm

from conftest import crandn


def naive_dft(g, sign=-1):
    n = len(g)
    out = []
    for j in range(n):
        acc = 0j
        for k in range(n):
            acc += g[k] * complex(math.cos(2 * math.pi * j * k / n),
                                  sign * math.sin(2 * math.pi * j * k / n))
        out.append(acc / math.sqrt(n))
    return np.array(out)


def test_delta_gives_flat_spectrum():
    assert np.allclose(dft_forward([1, 0, 0, 0]), 0.5, atol=1e-15)


def test_ones_concentrates_at_zero():
    assert np.allclose(dft_forward(np.ones(4)), [2, 0, 0, 0], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 37, 64, 65, 100, 128, 211, 256, 257])
def test_forward_matches_direct_sum(rng, n):
    g = crandn(rng, n)
    ref = naive_dft(g)
    assert np.linalg.norm(dft_forward(g) - ref) <= 1e-12 * np.linalg.norm(ref)


@pytest.mark.parametrize("n", [8, 53, 96, 129])
def test_inverse_matches_direct_sum(rng, n):
    w = crandn(rng, n)
    ref = naive_dft(w, sign=+1)
    assert np.linalg.norm(dft_inverse(w) - ref) <= 1e-12 * np.linalg.norm(ref)


def test_inverse_examples():
    e0 = np.zeros(8)
    e0[0] = 1
    assert np.allclose(dft_inverse(dft_forward(e0)), e0, atol=1e-15)
    assert np.allclose(dft_inverse([2, 0, 0, 0]), np.ones(4), atol=1e-15)


def test_batched_rows_transform_independently(rng):
    G = crandn(rng, 5, 45)
    out = dft_forward(G)
    for row, ref in zip(out, G):
        assert np.allclose(row, dft_forward(ref), atol=1e-13)


def test_large_power_of_two_against_numpy(rng):
    g = crandn(rng, 2**14)
    ref = np.fft.fft(g, norm="ortho")
    assert np.linalg.norm(dft_forward(g) - ref) <= 1e-12 * np.linalg.norm(ref)


def test_empty_rejected():
    with pytest.raises(ValueError):
        dft_forward([])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 300), st.integers(0, 2**32 - 1))
def test_unitarity_and_round_trip(n, seed):
    g = crandn(np.random.default_rng(seed), n)
    w = dft_forward(g)
    assert math.isclose(np.linalg.norm(w), np.linalg.norm(g), rel_tol=1e-12)
    assert np.linalg.norm(dft_inverse(w) - g) <= 1e-12 * np.linalg.norm(g)


def test_sup_norm_examples(rng):
    assert sup_norm([3 + 4j, 1]) == 5
    assert sup_norm(np.zeros(7)) == 0
    v = crandn(rng, 33)
    assert sup_norm(v) == max(abs(x) for x in v)
