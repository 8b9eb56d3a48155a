"""Hankel and circulant operators backed by the unitary DFT.

A Hankel operator of shape ``(n - m, m)`` built from ``g`` (length ``n``)
has entries ``H[j, k] = g[j + k]``.  It sits, with its columns reversed,
inside the ``n x n`` circulant whose first column is ``g``: rows
``m - 1 ... n - 2`` and columns ``0 ... m - 1``.  Products with ``H`` and
``H^*`` therefore cost two length-``n`` transforms each.
"""

import numpy as np

from .dft import dft_forward, dft_inverse, sup_norm

__all__ = [
    "DENSE_CAP",
    "CirculantOperator",
    "HankelOperator",
    "hankel_from_signal",
    "hankel_matvec",
    "hankel_adjoint_matvec",
    "hankel_dense",
    "dft_norm_bound",
    "default_m",
]

#: Largest number of entries :func:`hankel_dense` will materialize.
DENSE_CAP = 10**8


def default_m(n):
    return n // 2


class CirculantOperator:
    """Circulant matrix with first column ``g``, stored by its eigenvalues.

    ``C = F^* diag(lam) F`` with ``lam = sqrt(n) * F g``.
    """

    def __init__(self, g):
        g = np.array(g, dtype=complex).ravel()
        if g.size == 0:
            raise ValueError("empty vector")
        self.g = g
        self.n = g.size
        self.eigenvalues = np.sqrt(self.n) * dft_forward(g)
        self.g.setflags(write=False)
        self.eigenvalues.setflags(write=False)

    @property
    def shape(self):
        return (self.n, self.n)

    def matvec(self, x):
        return dft_inverse(self.eigenvalues * dft_forward(x))

    def adjoint_matvec(self, x):
        return dft_inverse(np.conj(self.eigenvalues) * dft_forward(x))

    def dense(self):
        idx = (np.arange(self.n)[:, None] - np.arange(self.n)[None, :]) % self.n
        return self.g[idx]

    def norm(self):
        """Exact spectral norm, ``max |lam|``."""
        return float(sup_norm(self.eigenvalues))


class HankelOperator:
    """Lazy ``(n - m) x m`` Hankel matrix with entries ``g[j + k]``.

    ``g[n - 1]`` is part of the embedding circulant but never appears in the
    matrix itself.
    """

    def __init__(self, g, m=None):
        g = np.array(g, dtype=complex).ravel()
        n = g.size
        if m is None:
            m = default_m(n)
        m = int(m)
        if not 1 <= m <= n - 1:
            raise ValueError(
                f"m={m} out of range: need 1 <= m <= n - 1 = {n - 1} for n={n}"
            )
        self.g = g
        self.g.setflags(write=False)
        self.n = n
        self.m = m
        self._circulant = None

    @property
    def shape(self):
        return (self.n - self.m, self.m)

    @property
    def circulant(self):
        if self._circulant is None:
            self._circulant = CirculantOperator(self.g)
        return self._circulant

    def _check(self, x, length, what):
        x = np.asarray(x, dtype=complex)
        if x.shape[-1] != length:
            raise ValueError(
                f"dimension mismatch: {what} has length {x.shape[-1]}, expected {length}"
            )
        return x

    def matvec(self, x):
        """``H @ x`` via the circulant embedding; batches along leading axes."""
        x = self._check(x, self.m, "x")
        n, m = self.n, self.m
        padded = np.zeros(x.shape[:-1] + (n,), dtype=complex)
        padded[..., :m] = x[..., ::-1]
        return self.circulant.matvec(padded)[..., m - 1:n - 1]

    def rmatvec(self, v):
        """``H^* @ v`` by transposing the embedding."""
        v = self._check(v, n_rows := self.n - self.m, "v")
        n, m = self.n, self.m
        padded = np.zeros(v.shape[:-1] + (n,), dtype=complex)
        padded[..., m - 1:m - 1 + n_rows] = v
        return self.circulant.adjoint_matvec(padded)[..., :m][..., ::-1]

    def dense(self, cap=None):
        cap = DENSE_CAP if cap is None else cap
        rows, cols = self.shape
        if rows * cols > cap:
            raise MemoryError(
                f"dense Hankel of shape {rows}x{cols} exceeds the cap of {cap} "
                "entries; use the iterative (matvec-based) path instead"
            )
        return self.g[np.arange(rows)[:, None] + np.arange(cols)[None, :]]

    def __repr__(self):
        return f"HankelOperator(n={self.n}, shape={self.shape})"


def hankel_from_signal(y, m=None):
    """Build the ``(n - m) x m`` Hankel operator of ``y``; ``m`` defaults to ``n // 2``."""
    return HankelOperator(y, m)


def hankel_matvec(G, x):
    return G.matvec(x)


def hankel_adjoint_matvec(G, v):
    return G.rmatvec(v)


def hankel_dense(G, cap=None):
    return G.dense(cap)


def dft_norm_bound(g):
    """``sqrt(n) * ||F_n g||_inf``, an upper bound on ``||H||_2`` for every
    Hankel shape built from ``g``.  Batches along leading axes."""
    g = np.asarray(g, dtype=complex)
    return np.sqrt(g.shape[-1]) * sup_norm(dft_forward(g))
