"""Inverse Gaussian, exponential and conjugate-prior math.

All functions are pure. Densities are returned in log domain because the
inverse Gaussian density underflows quickly away from its mode.

Conventions:
    mu, lam      -- inverse Gaussian mean and shape, both in seconds.
    theta        -- (a, b, c, d) sufficient statistics of the natural
                    conjugate prior  lam^d * exp(-lam * (a/mu^2 - b/mu + c)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

EPS = 1e-12
_LOG_2PI = math.log(2.0 * math.pi)


class DegenerateState(ArithmeticError):
    """Raised when the conjugate parameters do not define a finite mode."""


class ModeVariant(enum.Enum):
    ANALYTIC = "analytic"
    PAPER_VERBATIM = "verbatim"


@dataclass(frozen=True, slots=True)
class IGParams:
    mu: float
    lam: float

    def __post_init__(self) -> None:
        if not (self.mu > 0 and self.lam > 0):
            raise ValueError(f"IGParams needs mu > 0 and lam > 0, got ({self.mu}, {self.lam})")
        if not (math.isfinite(self.mu) and math.isfinite(self.lam)):
            raise ValueError(f"IGParams must be finite, got ({self.mu}, {self.lam})")

    @property
    def std(self) -> float:
        return math.sqrt(self.mu**3 / self.lam)


@dataclass(frozen=True, slots=True)
class ConjugateParams:
    """Sufficient-statistic vector of the conjugate prior.

    ``2a`` is the (discounted) sum of absorbed IBIs, ``b`` their count,
    ``2c`` the sum of their inverses and ``2d`` again their count.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"ConjugateParams.{name} must be finite and >= 0, got {v}")

    @classmethod
    def from_ibi(cls, r: float, weight: float = 1.0) -> ConjugateParams:
        """``weight * v(r)`` with ``v(r) = (r/2, 1, 1/(2r), 1/2)``."""
        if not r > 0:
            raise ValueError(f"IBI must be positive, got {r}")
        return cls(0.5 * r * weight, weight, 0.5 * weight / r, 0.5 * weight)

    def discounted(self, gamma: float) -> ConjugateParams:
        return ConjugateParams(gamma * self.a, gamma * self.b, gamma * self.c, gamma * self.d)

    def absorb(self, r: float, gamma: float, weight: float) -> ConjugateParams:
        """Return ``gamma * theta + weight * v(r)``."""
        return ConjugateParams(
            gamma * self.a + 0.5 * weight * r,
            gamma * self.b + weight,
            gamma * self.c + 0.5 * weight / r,
            gamma * self.d + 0.5 * weight,
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


def _ig_logpdf_scalar(t: float, mu: float, lam: float) -> float:
    if t <= 0:
        return -math.inf
    return 0.5 * (math.log(lam) - _LOG_2PI - 3.0 * math.log(t)) - lam * (t - mu) ** 2 / (2.0 * mu * mu * t)


def ig_logpdf(t, p: IGParams):
    """Log-density of IG(mu, lam) at ``t``; ``-inf`` for ``t <= 0``.

    Accepts a scalar or an array-like of evaluation points.
    """
    if np.ndim(t) == 0:
        return _ig_logpdf_scalar(float(t), p.mu, p.lam)
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, -np.inf)
    pos = t > 0
    tp = t[pos]
    out[pos] = 0.5 * (math.log(p.lam) - _LOG_2PI - 3.0 * np.log(tp)) - p.lam * (tp - p.mu) ** 2 / (
        2.0 * p.mu**2 * tp
    )
    return out


def ig_pdf(t, p: IGParams):
    return np.exp(ig_logpdf(t, p))


def ig_mean_var(p: IGParams) -> tuple[float, float]:
    return p.mu, p.mu**3 / p.lam


def ig_sample(p: IGParams, rng: np.random.Generator, size=None):
    """Draw from IG(mu, lam).

    numpy's ``wald`` is the inverse Gaussian with (mean, scale) = (mu, lam)
    and uses the squared-normal / uniform root-selection transform.
    """
    return rng.wald(p.mu, p.lam, size=size)


def exp_logpdf(t, lambda_e: float):
    """Log-density of the exponential anomaly model."""
    if not lambda_e > 0:
        raise ValueError(f"lambda_e must be positive, got {lambda_e}")
    if np.ndim(t) == 0:
        return math.log(lambda_e) - lambda_e * t if t >= 0 else -math.inf
    t = np.asarray(t, dtype=float)
    return np.where(t >= 0, math.log(lambda_e) - lambda_e * t, -np.inf)


def fc_logeval(theta: ConjugateParams, mu, lam):
    """Unnormalized log conjugate prior at (mu, lam); broadcasts over arrays."""
    a, b, c, d = theta.as_tuple()
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    # d == 0 must give 0 * log(lam) == 0 rather than nan at lam -> inf
    log_term = d * np.log(lam) if d != 0 else np.zeros(np.broadcast(mu, lam).shape)
    out = log_term - lam * (a / mu**2 - b / mu + c)
    return out[()] if out.ndim == 0 else out


def fc_mode(theta: ConjugateParams, variant: ModeVariant = ModeVariant.ANALYTIC, eps: float = EPS) -> IGParams:
    """Mode (mu*, lam*) of the conjugate prior.

    ANALYTIC is the stationary point of the log prior,
    ``lam* = 4ad / (4ac - b^2)``. PAPER_VERBATIM keeps the published
    expression ``lam* = (2ac - b^2) / (2ad)``, which is not the maximizer and
    is non-positive unless the absorbed IBIs have a coefficient of variation
    of order one.

    Raises:
        DegenerateState: if a, b or d is not positive, or the variant's
            lam* expression has a non-positive (<= eps) denominator/numerator.
    """
    a, b, c, d = theta.as_tuple()
    if a <= 0 or b <= 0 or d <= 0:
        raise DegenerateState(f"mode undefined for theta={theta.as_tuple()}")
    mu = 2.0 * a / b
    if variant is ModeVariant.ANALYTIC:
        disc = 4.0 * a * c - b * b
        if disc <= eps:
            raise DegenerateState(f"4ac - b^2 = {disc:.3g} <= eps")
        lam = 4.0 * a * d / disc
    else:
        num = 2.0 * a * c - b * b
        if num <= eps:
            raise DegenerateState(f"2ac - b^2 = {num:.3g} <= eps")
        lam = num / (2.0 * a * d)
    if not math.isfinite(lam) or not math.isfinite(mu):
        raise DegenerateState(f"non-finite mode ({mu}, {lam})")
    return IGParams(mu, lam)
