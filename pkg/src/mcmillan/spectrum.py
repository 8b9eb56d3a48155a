"""Singular values of Hankel operators.

Dense matrices go through a one-sided (Hestenes) Jacobi SVD with
round-robin pair ordering, so each sweep is a sequence of vectorized
rotations over disjoint column pairs.  Large Hankel operators go through
Golub-Kahan-Lanczos bidiagonalization driven by the fast circulant-embedding
products, with full reorthogonalization of both Krylov bases.
"""

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .hankel import DENSE_CAP, HankelOperator
from .special import ConvergenceError

__all__ = [
    "Method",
    "SingularSpectrum",
    "jacobi_svd",
    "dense_singular_values",
    "lanczos_singular_values",
    "hankel_singular_values",
    "count_at_or_above",
    "hankel_norms",
]

JACOBI_MAX_SWEEPS = 60
# Jacobi is O(rows * cols^2) per sweep in numpy; beyond this many entries the
# iterative path is much faster even when the matrix would fit in memory
DENSE_SVD_CAP = 2**16


class Method(enum.Enum):
    DENSE = "dense"
    LANCZOS = "lanczos"


@dataclass
class SingularSpectrum:
    """Descending singular values with per-value convergence metadata.

    ``full_dim`` is ``min(rows, cols)`` of the decomposed matrix, so a
    truncated (Lanczos) spectrum knows how many values it did not compute.
    """

    values: np.ndarray
    converged: np.ndarray
    residual_norms: np.ndarray
    method: Method
    full_dim: int
    seed: int | None = None
    iterations: int = 0
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def k_computed(self):
        return len(self.values)

    @property
    def complete(self):
        return self.k_computed == self.full_dim and bool(np.all(self.converged))

    def count_at_or_above(self, tau):
        return int(np.count_nonzero(self.values >= tau))

    def is_certified(self, tau):
        """True when no uncomputed or unconverged value can change the count."""
        if self.method is Method.DENSE or self.complete:
            return True
        if not np.all(self.converged):
            return False
        return bool(self.values.size and self.values[-1] < tau)


def count_at_or_above(spec, tau):
    """Number of singular values ``>= tau`` (closed comparison)."""
    return spec.count_at_or_above(tau)


# ---------------------------------------------------------------------------
# dense: one-sided Jacobi


@lru_cache(maxsize=32)
def _round_robin(k):
    """Per-round row permutations for a circle-method pair ordering.

    Rows are kept laid out as ``[p_0 .. p_{h-1}, q_0 .. q_{h-1}]`` so each
    round rotates row ``i`` against row ``i + h``.  Entry ``r`` is the gather
    index taking the layout of round ``r`` to that of round ``r + 1``.
    """
    half = k // 2
    players = list(range(k))
    layouts = []
    for _ in range(k - 1):
        layouts.append(players[:half] + players[::-1][:half])
        players = [players[0], players[-1]] + players[1:-1]
    layouts.append(layouts[0])
    perms = []
    for cur, nxt in zip(layouts[:-1], layouts[1:]):
        where = {player: i for i, player in enumerate(cur)}
        perms.append(np.array([where[player] for player in nxt]))
    return np.array(layouts[0]), tuple(perms)


def _rotate(xp, xq, c, sq, sp):
    tmp = xp.copy()
    xp *= c
    xp -= sq * xq
    xq *= c
    xq += sp * tmp


def jacobi_svd(M, tol=None, max_sweeps=JACOBI_MAX_SWEEPS, compute_uv=True):
    """Thin SVD ``M = U diag(s) V^*`` by one-sided Jacobi.

    Returns ``(U, s, Vh)`` with ``s`` descending, or just ``s`` when
    ``compute_uv`` is false.  Columns of ``U`` paired with zero singular
    values are left as zero vectors.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    rows, cols = M.shape
    if rows < cols:
        out = jacobi_svd(M.conj().T, tol, max_sweeps, compute_uv)
        if not compute_uv:
            return out
        U, s, Vh = out
        return Vh.conj().T, s, U.conj().T
    if cols == 0:
        if not compute_uv:
            return np.zeros(0)
        return np.zeros((rows, 0), complex), np.zeros(0), np.zeros((0, 0), complex)
    if tol is None:
        tol = rows * np.finfo(float).eps

    k = cols + (cols % 2)
    half = k // 2
    # columns of M are stored as rows, in pair layout
    A = np.zeros((k, rows), dtype=complex)
    A[:cols] = M.T
    V = np.eye(k, dtype=complex) if compute_uv else None
    ids = np.arange(k)
    if k > 2:
        start, perms = _round_robin(k)
        A, ids = A[start], ids[start]
        if compute_uv:
            V = V[start]
    else:
        perms = (np.arange(k),)

    for _ in range(max_sweeps):
        off = 0.0
        for perm in perms:
            ap, aq = A[:half], A[half:]
            alpha = np.einsum("ij,ij->i", ap.conj(), ap).real
            beta = np.einsum("ij,ij->i", aq.conj(), aq).real
            gamma = np.einsum("ij,ij->i", ap.conj(), aq)
            mag = np.abs(gamma)
            scale = np.sqrt(alpha * beta)
            active = mag > tol * scale
            if np.any(active):
                off = max(off, float(np.max(mag[active] / scale[active])))
                mag_a = np.where(active, mag, 1.0)
                phase = np.where(active, gamma / mag_a, 1.0)
                zeta = (beta - alpha) / (2 * mag_a)
                t = np.sign(zeta) / (np.abs(zeta) + np.sqrt(1 + zeta * zeta))
                t = np.where(zeta == 0, 1.0, t)
                c = np.where(active, 1 / np.sqrt(1 + t * t), 1.0)
                s = np.where(active, t, 0.0) * c
                # rotate (a_p, conj(phase) a_q), whose inner product is real
                c = c[:, None]
                sq = (s * phase.conj())[:, None]
                sp = (s * phase)[:, None]
                _rotate(ap, aq, c, sq, sp)
                if compute_uv:
                    _rotate(V[:half], V[half:], c, sq, sp)
            A, ids = A[perm], ids[perm]
            if compute_uv:
                V = V[perm]
        if off <= tol:
            break
    else:
        raise ConvergenceError(f"Jacobi SVD did not converge in {max_sweeps} sweeps")

    back = np.argsort(ids)
    A = A[back][:cols]
    norms = np.linalg.norm(A, axis=1)
    order = np.argsort(-norms, kind="stable")
    s = norms[order]
    if not compute_uv:
        return s
    # A = V_rows M^T, so the right singular vectors are the rows of V
    V = V[back][:cols, :cols][order].T
    A = A[order].T
    U = np.zeros_like(A)
    nz = s > 0
    U[:, nz] = A[:, nz] / s[nz]
    return U, s, V.conj().T


def dense_singular_values(M):
    """All singular values of a dense matrix as a :class:`SingularSpectrum`."""
    s = jacobi_svd(M, compute_uv=False)
    k = s.size
    return SingularSpectrum(
        values=s,
        converged=np.ones(k, dtype=bool),
        residual_norms=np.zeros(k),
        method=Method.DENSE,
        full_dim=k,
    )


# ---------------------------------------------------------------------------
# iterative: Golub-Kahan-Lanczos


def _orthonormal_start(rng, dim, basis):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    for _ in range(2):
        if basis:
            B = np.array(basis)
            v = v - B.T @ (B.conj() @ v)
    nv = np.linalg.norm(v)
    return v / nv if nv > 1e-8 else None


def _reorthogonalize(x, basis):
    if basis:
        B = np.array(basis)
        for _ in range(2):
            x = x - B.T @ (B.conj() @ x)
    return x


def lanczos_singular_values(G, k, tol=1e-10, max_iter=None, seed=0):
    """Leading ``k`` singular values of a Hankel operator by Golub-Kahan-Lanczos.

    ``G`` needs ``matvec``/``rmatvec`` and ``shape``.  Value ``i`` is
    flagged converged once its residual ``beta_j |p_{j,i}|`` drops to
    ``tol * sigma_1``.  Hitting ``max_iter`` returns a partial result with
    unconverged flags rather than raising.
    """
    rows, cols = G.shape
    full = min(rows, cols)
    if not 1 <= k <= full:
        raise ValueError(f"k={k} out of range: need 1 <= k <= {full}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = max(10 * k + 100, 200)
    depth_cap = min(full, max_iter)
    rng = np.random.default_rng(seed)

    Us, Vs, alphas, betas = [], [], [], []
    v = _orthonormal_start(rng, cols, [])
    u_prev, beta_prev = None, 0.0
    norm_est = 0.0
    result = None

    for j in range(depth_cap):
        Vs.append(v)
        u = G.matvec(v)
        if u_prev is not None:
            u = u - beta_prev * u_prev
        u = _reorthogonalize(u, Us)
        alpha = np.linalg.norm(u)
        norm_est = max(norm_est, alpha)
        if alpha <= 1e-13 * norm_est or alpha == 0.0:
            # v lies (numerically) in the null space; pad U with a fresh direction
            alpha = 0.0
            u = _orthonormal_start(rng, rows, Us)
            if u is None:
                u = np.zeros(rows, dtype=complex)
        else:
            u = u / alpha
        Us.append(u)
        alphas.append(alpha)

        w = G.rmatvec(u) - alpha * v
        w = _reorthogonalize(w, Vs)
        beta = np.linalg.norm(w)
        norm_est = max(norm_est, beta)
        restarted = False
        if beta <= 1e-13 * norm_est or beta == 0.0:
            beta = 0.0
            w = _orthonormal_start(rng, cols, Vs)
            restarted = True
        else:
            w = w / beta
        betas.append(beta)

        steps = j + 1
        if steps >= k:
            B = np.diag(alphas) + np.diag(betas[:-1], 1)
            P, theta, _ = np.linalg.svd(B)
            resid = betas[-1] * np.abs(P[-1, :k])
            top = theta[0] if theta[0] > 0 else 1.0
            conv = resid <= tol * top
            result = (theta[:k], conv, resid, steps)
            if np.all(conv):
                break
        if w is None:
            break
        v, u_prev, beta_prev = w, u, (0.0 if restarted else beta)

    theta, conv, resid, steps = result
    if steps == full:
        # the Krylov space filled the whole domain: Ritz values are exact
        conv = np.ones_like(conv)
        resid = np.zeros_like(resid)
    return SingularSpectrum(
        values=np.array(theta, dtype=float),
        converged=np.asarray(conv, dtype=bool),
        residual_norms=np.asarray(resid, dtype=float),
        method=Method.LANCZOS,
        full_dim=full,
        seed=seed,
        iterations=steps,
    )


def hankel_singular_values(G, tau=None, cap=None, k0=32, tol=1e-10, seed=0):
    """Spectrum of ``G`` suitable for counting values ``>= tau``.

    Dense when ``G`` has at most ``cap`` entries (default ``DENSE_SVD_CAP``);
    otherwise Lanczos with
    ``k`` doubling from ``k0`` until the smallest computed value drops
    below ``tau`` or ``k`` reaches ``min(rows, cols)``.
    """
    cap = DENSE_SVD_CAP if cap is None else cap
    rows, cols = G.shape
    if rows * cols <= cap:
        return dense_singular_values(G.dense(max(cap, DENSE_CAP)))
    full = min(rows, cols)
    k = min(k0, full)
    while True:
        spec = lanczos_singular_values(G, k, tol=tol, seed=seed)
        if tau is None or k == full or spec.values[-1] < tau:
            return spec
        k = min(2 * k, full)


# ---------------------------------------------------------------------------
# bulk spectral norms for Monte Carlo


def hankel_norms(signals, m, cap=None, chunk=64):
    """``||H(g)||_2`` for each row ``g`` of ``signals``.

    Dense batches go through LAPACK; shapes above the densification cap fall
    back to one-value Lanczos on the fast operator.
    """
    signals = np.atleast_2d(np.asarray(signals, dtype=complex))
    batch, n = signals.shape
    rows, cols = n - m, m
    if not 1 <= m <= n - 1:
        raise ValueError(f"m={m} out of range: need 1 <= m <= {n - 1}")
    cap = DENSE_CAP if cap is None else cap
    out = np.empty(batch)
    if rows * cols <= min(cap, 4 * 10**6):
        idx = np.arange(rows)[:, None] + np.arange(cols)[None, :]
        for start in range(0, batch, chunk):
            H = signals[start:start + chunk][:, idx]
            out[start:start + chunk] = np.linalg.svd(H, compute_uv=False)[:, 0]
        return out
    for i, g in enumerate(signals):
        out[i] = lanczos_singular_values(HankelOperator(g, m), 1, tol=1e-12).values[0]
    return out
