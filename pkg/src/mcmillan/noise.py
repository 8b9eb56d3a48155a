"""Gaussian noise models and seeded sampling.

Conventions: real ``N(0, I)`` has unit variance per entry; proper complex
``CN(0, I)`` has ``E|g_k|^2 = 1`` with independent ``N(0, 1/2)`` real and
imaginary parts.  Covariance kinds sample ``S @ w`` with ``S S^* = Sigma``.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NoiseKind",
    "NoiseModel",
    "SeededGenerator",
    "sample_noise",
    "covariance_sqrt",
    "sigma_half_norm",
    "trial_generator",
]

PSD_TOL = 1e-10


class NoiseKind(enum.Enum):
    REAL_IID = "real-iid"
    COMPLEX_IID = "complex-iid"
    REAL_COV = "real-cov"
    COMPLEX_COV = "complex-cov"

    @property
    def is_complex(self):
        return self in (NoiseKind.COMPLEX_IID, NoiseKind.COMPLEX_COV)

    @property
    def has_covariance(self):
        return self in (NoiseKind.REAL_COV, NoiseKind.COMPLEX_COV)


def _check_hermitian_psd(sigma):
    sigma = np.asarray(sigma)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValueError(f"covariance must be square, got shape {sigma.shape}")
    if not np.all(np.isfinite(sigma)):
        raise ValueError("covariance has non-finite entries")
    scale = max(np.abs(sigma).max(initial=0.0), 1.0)
    if np.abs(sigma - sigma.conj().T).max(initial=0.0) > PSD_TOL * scale:
        raise ValueError("covariance is not Hermitian")
    herm = 0.5 * (sigma + sigma.conj().T)
    evals, evecs = np.linalg.eigh(herm)
    norm = max(abs(evals).max(initial=0.0), 0.0)
    if evals.size and evals.min() < -PSD_TOL * max(norm, 1e-300):
        raise ValueError(f"covariance not PSD: smallest eigenvalue {evals.min():.3e}")
    return herm, np.clip(evals, 0.0, None), evecs


def covariance_sqrt(sigma):
    """Hermitian square root ``S`` of a PSD matrix, ``S @ S^* == sigma``."""
    _, evals, evecs = _check_hermitian_psd(sigma)
    root = (evecs * np.sqrt(evals)) @ evecs.conj().T
    if np.isrealobj(sigma):
        root = root.real
    return root


def sigma_half_norm(sigma):
    """``||Sigma^{1/2}||_2 = sqrt(lambda_max(Sigma))``."""
    _, evals, _ = _check_hermitian_psd(sigma)
    return float(np.sqrt(evals.max(initial=0.0)))


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """One of the four Gaussian noise distributions plus a scale ``eps``.

    ``eps`` is applied where noise is added to a signal, never inside
    :func:`sample_noise`.
    """

    kind: NoiseKind
    sigma: np.ndarray | None = None
    eps: float = 1.0
    _sqrt: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)
    _half_norm: float = field(default=1.0, init=False, repr=False, compare=False)

    def __post_init__(self):
        kind = NoiseKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if not self.eps > 0:
            raise ValueError(f"noise scale eps must be positive, got {self.eps}")
        if kind.has_covariance:
            if self.sigma is None:
                raise ValueError(f"{kind.value} noise needs a covariance matrix")
            if not kind.is_complex and np.iscomplexobj(self.sigma):
                raise ValueError("real-cov noise needs a real covariance matrix")
            sigma = np.array(self.sigma, dtype=complex if kind.is_complex else float)
            root = covariance_sqrt(sigma)
            sigma.setflags(write=False)
            root.setflags(write=False)
            object.__setattr__(self, "sigma", sigma)
            object.__setattr__(self, "_sqrt", root)
            object.__setattr__(self, "_half_norm", sigma_half_norm(sigma))
        elif self.sigma is not None:
            raise ValueError(f"{kind.value} noise takes no covariance matrix")

    @property
    def sqrt_covariance(self):
        return self._sqrt

    @property
    def half_norm(self):
        """``||Sigma^{1/2}||_2``; 1 for the iid kinds."""
        return self._half_norm

    @property
    def dim(self):
        return None if self.sigma is None else self.sigma.shape[0]

    def with_eps(self, eps):
        return NoiseModel(self.kind, self.sigma, eps)


@dataclass
class SeededGenerator:
    """Deterministic random stream identified by ``(seed, stream)``."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream),))
        self.rng = np.random.Generator(np.random.PCG64(ss))

    def standard_normal(self, size):
        return self.rng.standard_normal(size)


def trial_generator(root_seed, trial):
    """Independent generator for Monte Carlo trial ``trial``."""
    return SeededGenerator(root_seed, trial)


def sample_noise(model, n, gen, size=None):
    """Draw a unit-scale noise vector of length ``n`` from ``model``.

    With ``size`` given, returns a ``(size, n)`` batch.
    """
    if model.dim is not None and model.dim != n:
        raise ValueError(f"covariance dimension {model.dim} does not match n={n}")
    shape = (n,) if size is None else (size, n)
    if model.kind.is_complex:
        w = (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / np.sqrt(2)
    else:
        w = gen.standard_normal(shape).astype(complex)
    if model.kind.has_covariance:
        w = w @ model.sqrt_covariance.T
        if not model.kind.is_complex:
            w = w.real.astype(complex)
    return w
