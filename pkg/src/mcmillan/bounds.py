"""Probability that a random Hankel matrix stays below ``alpha * sqrt(n)``.

Two formula families are provided.  ``Variant.PAPER`` is the published
four-case bound; under the sampling conventions of :mod:`mcmillan.noise`
it is a guaranteed lower bound on ``Pr[||G||_2 <= alpha sqrt(n)]``.
``Variant.EXACT_IID`` is the exact CDF of ``||F_n g||_inf`` for the two
iid kinds (derived here, not a published formula); it is pointwise larger
and hence gives smaller thresholds for the same confidence.
"""

import enum
import math
from dataclasses import dataclass

from .noise import NoiseKind, NoiseModel
from .special import erf, regularized_lower_gamma

__all__ = [
    "Variant",
    "BoundResult",
    "prob_paper",
    "prob_exact_iid",
    "probability",
    "alpha_for_prob",
    "asymptotic_alpha",
    "hankel_norm_threshold",
    "bound_for_alpha",
    "bound_for_prob",
]

PROB_TOL = 1e-9
MAX_BISECT = 200


class Variant(enum.Enum):
    PAPER = "paper"
    EXACT_IID = "exact"


@dataclass(frozen=True)
class BoundResult:
    alpha: float
    probability: float
    n: int
    kind: NoiseKind
    variant: Variant
    eps: float | None = None

    @property
    def norm_threshold(self):
        """``alpha * sqrt(n)``: the bound on ``||G||_2`` at unit noise scale."""
        return self.alpha * math.sqrt(self.n)

    @property
    def hankel_threshold(self):
        """``alpha * eps * sqrt(n)``, or ``None`` without a noise scale."""
        if self.eps is None:
            return None
        return hankel_norm_threshold(self.alpha, self.eps, self.n)


def _as_model(model):
    if isinstance(model, NoiseModel):
        return model
    return NoiseModel(NoiseKind(model))


def _check(alpha, n):
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return float(alpha), int(n)


def _pow_one_minus(q, power):
    """``(1 - q)**power`` without losing ``q`` when it is tiny."""
    if power == 0:
        return 1.0
    if q >= 1.0:
        return 0.0
    return math.exp(power * math.log1p(-q))


def _iid_product(edge, q, n):
    # n odd: one real-valued bin plus (n-1)/2 independent complex pairs;
    # n even: two real-valued bins plus n/2 - 1 complex pairs.
    if n % 2:
        return edge * _pow_one_minus(q, (n - 1) // 2)
    return edge * edge * _pow_one_minus(q, n // 2 - 1)


def prob_paper(alpha, model, n):
    """Published bound ``p(alpha)`` for the four noise kinds."""
    alpha, n = _check(alpha, n)
    model = _as_model(model)
    kind = model.kind
    if kind is NoiseKind.REAL_IID:
        return _iid_product(erf(alpha / 2), math.exp(-alpha * alpha / 2), n)
    if kind is NoiseKind.COMPLEX_IID:
        return _pow_one_minus(math.exp(-alpha * alpha / 2), n)
    if model.dim is not None and model.dim != n:
        raise ValueError(f"covariance dimension {model.dim} does not match n={n}")
    s = model.half_norm
    if s == 0.0:
        return 1.0
    if kind is NoiseKind.REAL_COV:
        return regularized_lower_gamma(n / 2, alpha * alpha / (2 * s * s))
    return regularized_lower_gamma(n, alpha * alpha / (s * s))


def prob_exact_iid(alpha, kind, n):
    """Exact CDF of ``||F_n g||_inf`` for iid real or proper complex noise."""
    alpha, n = _check(alpha, n)
    kind = kind.kind if isinstance(kind, NoiseModel) else NoiseKind(kind)
    q = math.exp(-alpha * alpha)
    if kind is NoiseKind.COMPLEX_IID:
        return _pow_one_minus(q, n)
    if kind is NoiseKind.REAL_IID:
        return _iid_product(erf(alpha / math.sqrt(2)), q, n)
    raise ValueError(f"exact CDF only exists for iid kinds, not {kind.value}")


def probability(alpha, model, n, variant=Variant.PAPER):
    variant = Variant(variant)
    if variant is Variant.PAPER:
        return prob_paper(alpha, model, n)
    return prob_exact_iid(alpha, _as_model(model).kind, n)


def alpha_for_prob(p_hat, model, n, variant=Variant.PAPER):
    """Smallest ``alpha`` whose bound probability reaches ``p_hat``.

    Brackets from ``[1e-6, 8]`` (growing the upper end geometrically) and
    bisects down to rounding level in ``alpha``; the result must reproduce
    ``p_hat`` within ``1e-9``.
    """
    if not 0 < p_hat < 1:
        raise ValueError(f"probability must lie in (0, 1), got {p_hat}")
    model = _as_model(model)

    def f(a):
        return probability(a, model, n, variant)

    lo, hi = 1e-6, 8.0
    while f(lo) > p_hat:
        lo /= 8
        if lo < 1e-300:
            raise ArithmeticError("could not bracket alpha from below")
    while f(hi) < p_hat:
        lo, hi = hi, hi * 2
        if hi > 1e300:
            raise ArithmeticError("could not bracket alpha from above")
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if f(mid) < p_hat:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    else:
        raise ArithmeticError(f"bisection for alpha hit {MAX_BISECT} iterations")
    alpha = 0.5 * (lo + hi)
    if abs(f(alpha) - p_hat) > PROB_TOL:
        raise ArithmeticError(
            f"alpha={alpha} misses p_hat={p_hat} by more than {PROB_TOL} (n={n})"
        )
    return alpha


def asymptotic_alpha(p_hat, n):
    """``sqrt(-2 log(1 - p_hat**(1/n)))`` evaluated stably for large ``n``."""
    if not 0 < p_hat < 1:
        raise ValueError(f"probability must lie in (0, 1), got {p_hat}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    # 1 - p**(1/n) = -expm1(log(p)/n)
    return math.sqrt(-2.0 * math.log(-math.expm1(math.log(p_hat) / n)))


def hankel_norm_threshold(alpha, eps, n):
    """Singular-value threshold ``alpha * eps * sqrt(n)``."""
    return alpha * eps * math.sqrt(n)


def bound_for_alpha(alpha, model, n, variant=Variant.PAPER, eps=None):
    model = _as_model(model)
    variant = Variant(variant)
    p = probability(alpha, model, n, variant)
    return BoundResult(float(alpha), p, int(n), model.kind, variant, eps)


def bound_for_prob(p_hat, model, n, variant=Variant.PAPER, eps=None):
    model = _as_model(model)
    variant = Variant(variant)
    alpha = alpha_for_prob(p_hat, model, n, variant)
    return BoundResult(alpha, probability(alpha, model, n, variant), int(n),
                       model.kind, variant, eps)
