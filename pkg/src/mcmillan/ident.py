"""Degree lower bounds, empirical thresholds, realization and AIC scans.

Outputs follow ``x_{j+1} = A x_j``, ``y_j = c^* A^{j+1} x_0`` for
``j = 0 .. n-1``, so the Hankel matrix ``H[j, k] = y[j + k]`` factors as
``O @ C`` with ``O[j] = c^* A^j`` and ``C[:, k] = A^{k+1} x_0``.
"""

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import Variant, alpha_for_prob, hankel_norm_threshold
from .hankel import HankelOperator, default_m
from .noise import NoiseKind, NoiseModel, sample_noise, trial_generator
from .spectrum import SingularSpectrum, hankel_norms, hankel_singular_values, jacobi_svd

__all__ = [
    "DegreeMethod",
    "DegreeEstimate",
    "Realization",
    "AicScan",
    "simulate_lti",
    "degree_lower_bound",
    "noise_norm_samples",
    "nearest_rank_percentile",
    "empirical_threshold",
    "empirical_degree_lower_bound",
    "ho_kalman_realization",
    "aic_scan",
    "worker_count",
]

PINV_RTOL = 1e-12
RANK_RTOL = 1e-13


class DegreeMethod(enum.Enum):
    THEOREM = "theorem"
    EMPIRICAL = "empirical"


@dataclass
class DegreeEstimate:
    lower_bound: int
    threshold: float
    probability: float
    method: DegreeMethod
    n: int
    m: int
    spectrum: SingularSpectrum = field(repr=False)
    certified: bool = True
    alpha: float | None = None


@dataclass
class Realization:
    A: np.ndarray
    c: np.ndarray
    x0: np.ndarray

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        self.c = np.atleast_1d(np.asarray(self.c, dtype=complex)).ravel()
        self.x0 = np.atleast_1d(np.asarray(self.x0, dtype=complex)).ravel()
        q = self.A.shape[0]
        if self.A.shape != (q, q) or q < 1:
            raise ValueError(f"A must be square and nonempty, got {self.A.shape}")
        if self.c.size != q or self.x0.size != q:
            raise ValueError(
                f"dimension mismatch: A is {q}x{q}, c has {self.c.size}, x0 has {self.x0.size}"
            )
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.c))
                and np.all(np.isfinite(self.x0))):
            raise ValueError("realization has non-finite entries")

    @property
    def q(self):
        return self.A.shape[0]


@dataclass
class AicScan:
    scores: dict
    residuals: dict
    failures: dict

    @property
    def argmin_q(self):
        # ties go to the smaller order
        return min(self.scores, key=lambda q: (self.scores[q], q))


def simulate_lti(r, n):
    """Impulse response ``y_j = c^* A^{j+1} x0``, ``j = 0 .. n-1``."""
    if n < 1:
        raise ValueError("n must be positive")
    y = np.empty(n, dtype=complex)
    x = r.x0
    cc = r.c.conj()
    for j in range(n):
        x = r.A @ x
        y[j] = cc @ x
    return y


def worker_count(threads=None):
    """Monte Carlo parallelism: explicit value, else ``HANKEL_THREADS``, else 1."""
    if threads is None:
        raw = os.environ.get("HANKEL_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"HANKEL_THREADS must be a positive integer, got {raw!r}")
    if threads < 1:
        raise ValueError(f"thread count must be positive, got {threads}")
    return threads


def _check_signal(y, min_len=3):
    y = np.asarray(y, dtype=complex).ravel()
    if y.size < min_len:
        raise ValueError(f"signal needs at least {min_len} samples, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise ValueError("signal has non-finite entries")
    return y


def _count(y, m, tau, cap, seed):
    H = HankelOperator(y, m)
    spec = hankel_singular_values(H, tau=tau, cap=cap, seed=seed)
    return spec, spec.count_at_or_above(tau), spec.is_certified(tau)


def degree_lower_bound(y_noisy, eps, model, p_hat=0.99, m=None,
                       variant=Variant.PAPER, cap=None, seed=0):
    """Count singular values of the noisy Hankel matrix at or above
    ``alpha * eps * sqrt(n)``, where ``alpha`` reaches confidence ``p_hat``.

    With probability at least ``p_hat`` the count does not exceed the
    McMillan degree of the noise-free system.
    """
    y = _check_signal(y_noisy)
    n = y.size
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    m = default_m(n) if m is None else int(m)
    model = model if isinstance(model, NoiseModel) else NoiseModel(NoiseKind(model))
    alpha = alpha_for_prob(p_hat, model, n, variant)
    tau = hankel_norm_threshold(alpha, eps, n)
    spec, count, certified = _count(y, m, tau, cap, seed)
    return DegreeEstimate(count, tau, p_hat, DegreeMethod.THEOREM, n, m, spec,
                          certified, alpha)


def _norm_chunk(model, n, m, root_seed, trials):
    g = np.stack([sample_noise(model, n, trial_generator(root_seed, t)) for t in trials])
    return hankel_norms(g, m)


def noise_norm_samples(model, n, m, trials, root_seed=0, threads=None):
    """``||G_t||_2`` for unit-scale noise draws ``t = 0 .. trials-1``.

    Trial ``t`` always uses stream ``t`` of ``root_seed``, so the returned
    array does not depend on how trials are split across workers.
    """
    m = default_m(n) if m is None else int(m)
    model = model if isinstance(model, NoiseModel) else NoiseModel(NoiseKind(model))
    workers = worker_count(threads)
    chunks = [range(a, min(a + 64, trials)) for a in range(0, trials, 64)]
    if workers == 1 or len(chunks) == 1:
        parts = [_norm_chunk(model, n, m, root_seed, ch) for ch in chunks]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda ch: _norm_chunk(model, n, m, root_seed, ch), chunks))
    return np.concatenate(parts) if parts else np.zeros(0)


def nearest_rank_percentile(values, gamma):
    """Value at 1-based rank ``ceil(gamma * N / 100)`` of the ascending sort."""
    values = np.sort(np.asarray(values, dtype=float))
    if not 0 < gamma < 100:
        raise ValueError(f"percentile must lie in (0, 100), got {gamma}")
    rank = max(1, math.ceil(gamma * values.size / 100))
    return float(values[rank - 1])


def empirical_threshold(model, n, m=None, eps=1.0, trials=400, gamma=99.0,
                        root_seed=0, threads=None):
    """``eps`` times the ``gamma``-th percentile of Monte Carlo ``||G||_2``."""
    if trials < 10:
        raise ValueError(f"insufficient trials: need at least 10, got {trials}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    norms = noise_norm_samples(model, n, m, trials, root_seed, threads)
    return eps * nearest_rank_percentile(norms, gamma)


def empirical_degree_lower_bound(y_noisy, eps, model, gamma=99.0, trials=400, m=None,
                                 root_seed=0, cap=None, seed=0, threads=None):
    y = _check_signal(y_noisy)
    n = y.size
    m = default_m(n) if m is None else int(m)
    tau = empirical_threshold(model, n, m, eps, trials, gamma, root_seed, threads)
    spec, count, certified = _count(y, m, tau, cap, seed)
    return DegreeEstimate(count, tau, gamma / 100, DegreeMethod.EMPIRICAL, n, m, spec,
                          certified)


def _pinv(M):
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    keep = s > PINV_RTOL * (s[0] if s.size else 0.0)
    return (Vh[keep].conj().T / s[keep]) @ U[:, keep].conj().T


def _realize_from_svd(U, s, Vh, q):
    if s[0] == 0:
        raise ValueError("Hankel matrix is zero; no realization of positive order")
    if s[q - 1] <= RANK_RTOL * s[0]:
        raise ValueError(
            f"Hankel matrix is numerically rank deficient at order q={q} "
            f"(sigma_q/sigma_1 = {s[q - 1] / s[0]:.2e}); try a smaller q"
        )
    root = np.sqrt(s[:q])
    O = U[:, :q] * root
    C = root[:, None] * Vh[:q]
    A = _pinv(O[:-1]) @ O[1:]
    c = O[0].conj()
    # C[:, 0] is the state after one step, A @ x0
    x1 = C[:, 0]
    x0, *_ = np.linalg.lstsq(A, x1, rcond=None)
    return Realization(A, c, x0)


def _check_order(q, rows, cols):
    q_top = min(rows, cols) - 1
    if not 1 <= q <= q_top:
        raise ValueError(f"model order q={q} out of range: need 1 <= q <= {q_top}")


def ho_kalman_realization(y, q, m=None):
    """Order-``q`` realization from the truncated SVD of the Hankel matrix."""
    y = _check_signal(y)
    m = default_m(y.size) if m is None else int(m)
    H = HankelOperator(y, m)
    _check_order(q, *H.shape)
    U, s, Vh = jacobi_svd(H.dense())
    return _realize_from_svd(U, s, Vh, q)


def _whitener(model):
    if model.kind.has_covariance:
        S = model.sqrt_covariance
        w, Q = np.linalg.eigh(S)
        keep = w > PINV_RTOL * max(w.max(initial=0.0), 1e-300)
        inv = (Q[:, keep] / w[keep]) @ Q[:, keep].conj().T
        return lambda r: (inv @ r) / model.eps
    return lambda r: r / model.eps


def aic_scan(y_noisy, model, q_max, m=None):
    """AIC over ``q = 1 .. q_max`` using Ho-Kalman fits.

    Scores are ``2 ||Sigma^{-1/2} (y - y_q)||^2 / eps^2 + 4 q`` with the
    constant term dropped; ``4q`` counts ``2q`` complex parameters.
    ``residuals`` holds the unweighted misfit ``||y - y_q||``.
    """
    y = _check_signal(y_noisy)
    n = y.size
    m = default_m(n) if m is None else int(m)
    model = model if isinstance(model, NoiseModel) else NoiseModel(NoiseKind(model))
    if model.dim is not None and model.dim != n:
        raise ValueError(f"covariance dimension {model.dim} does not match n={n}")
    H = HankelOperator(y, m)
    _check_order(q_max, *H.shape)
    U, s, Vh = jacobi_svd(H.dense())
    whiten = _whitener(model)
    scores, residuals, failures = {}, {}, {}
    for q in range(1, q_max + 1):
        try:
            r = _realize_from_svd(U, s, Vh, q)
            with np.errstate(over="ignore", invalid="ignore"):
                diff = y - simulate_lti(r, n)
                white = float(np.linalg.norm(whiten(diff)))
        except (ValueError, np.linalg.LinAlgError) as exc:
            failures[q] = str(exc)
            continue
        if not math.isfinite(white):
            failures[q] = "non-finite residual (unstable fit)"
            continue
        residuals[q] = float(np.linalg.norm(diff))
        scores[q] = 2 * white * white + 4 * q
    if not scores:
        raise ValueError(f"AIC fit failed for every order 1..{q_max}")
    return AicScan(scores, residuals, failures)
