"""Unitary discrete Fourier transform of arbitrary length.

All transforms act on the last axis and use the unitary normalization
``[F_n]_{j,k} = n**-0.5 * exp(-2j*pi*j*k/n)``.  Power-of-two lengths go
through an iterative radix-2 kernel, short lengths through direct
summation, and everything else through Bluestein's chirp-z reduction onto
a power-of-two convolution.
"""

from functools import lru_cache

import numpy as np

__all__ = ["dft_forward", "dft_inverse", "sup_norm"]

DIRECT_CUTOFF = 64


def _as_signal(g):
    g = np.asarray(g, dtype=complex)
    if g.ndim == 0:
        g = g.reshape(1)
    if g.shape[-1] == 0:
        raise ValueError("empty vector")
    return g


def _frozen(a):
    a.setflags(write=False)
    return a


@lru_cache(maxsize=64)
def _bitrev(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return _frozen(rev)


@lru_cache(maxsize=64)
def _twiddles(size):
    return _frozen(np.exp(-2j * np.pi * np.arange(size // 2) / size))


@lru_cache(maxsize=64)
def _dft_matrix(n):
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return _frozen(np.exp(-2j * np.pi * jk / n))


@lru_cache(maxsize=64)
def _chirp(n):
    # k**2 mod 2n keeps the phase argument small for large k
    k = np.arange(n, dtype=np.int64)
    w = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
    size = 1 << (2 * n - 2).bit_length()
    b = np.zeros(size, dtype=complex)
    b[:n] = np.conj(w)
    b[size - n + 1:] = np.conj(w[1:])[::-1]
    return _frozen(w), _frozen(_fft_pow2(b))


def _fft_pow2(x):
    """Unnormalized radix-2 decimation-in-time FFT along the last axis."""
    n = x.shape[-1]
    lead = x.shape[:-1]
    X = x[..., _bitrev(n)]
    size = 2
    while size <= n:
        half = size // 2
        X = X.reshape(lead + (n // size, size))
        even = X[..., :half]
        odd = X[..., half:] * _twiddles(size)
        X = np.concatenate([even + odd, even - odd], axis=-1)
        size *= 2
    return X.reshape(lead + (n,))


def _bluestein(x):
    n = x.shape[-1]
    w, fb = _chirp(n)
    size = fb.shape[-1]
    a = np.zeros(x.shape[:-1] + (size,), dtype=complex)
    a[..., :n] = x * w
    conv = np.conj(_fft_pow2(np.conj(_fft_pow2(a) * fb))) / size
    return conv[..., :n] * w


def _dft_unnormalized(x):
    n = x.shape[-1]
    if n & (n - 1) == 0:
        return _fft_pow2(x)
    if n <= DIRECT_CUTOFF:
        return x @ _dft_matrix(n).T
    return _bluestein(x)


def dft_forward(g):
    """Return ``F_n g`` along the last axis (unitary normalization).

    Any length ``n >= 1`` is accepted; leading axes are treated as a batch.
    """
    g = _as_signal(g)
    return _dft_unnormalized(g) / np.sqrt(g.shape[-1])


def dft_inverse(w):
    """Return ``F_n^* w``, the inverse of :func:`dft_forward`."""
    w = _as_signal(w)
    return np.conj(_dft_unnormalized(np.conj(w))) / np.sqrt(w.shape[-1])


def sup_norm(v, axis=-1):
    """Largest complex modulus along ``axis``."""
    v = np.asarray(v)
    if v.size == 0:
        return 0.0
    return np.max(np.abs(v), axis=axis)

