"""Streaming inverse-Gaussian IBI filter with two-hypothesis data association.

Each incoming interval ``r`` is scored against two hypotheses: it was drawn
from the currently tracked IG distribution (H1), or it is an anomaly drawn
from an exponential law (H0). The conjugate statistics are then discounted
by ``gamma`` and receive a partial observation of weight ``P(H1 | r)``::

    theta' = gamma * theta + beta1 * v(r),   v(r) = (r/2, 1, 1/(2r), 1/2)

The whole filter memory is four floats plus a step counter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .igmath import (
    EPS,
    ConjugateParams,
    DegenerateState,
    IGParams,
    ModeVariant,
    _ig_logpdf_scalar,
    fc_mode,
)

DEFAULT_SEED_IBI = 0.8


class InvalidConfig(ValueError):
    pass


class NonPositiveInterval(ValueError):
    pass


@dataclass(frozen=True)
class FilterConfig:
    """Tuning of the filter.

    ``gamma`` defaults to an effective memory of ~375 beats (about five
    minutes at 0.8 s per beat). ``lambda_bounds`` and ``r_bounds`` are in
    seconds. Intervals outside ``r_bounds`` are never absorbed.
    """

    gamma: float = 0.9973
    p_e: float = 0.09
    lambda_e: float = 1.0
    mode_variant: ModeVariant = ModeVariant.ANALYTIC
    warmup_beats: int = 10
    lambda_bounds: tuple[float, float] = (1.0, 1e6)
    r_bounds: tuple[float, float] = (0.2, 5.0)
    eps: float = EPS

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise InvalidConfig(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0.0 <= self.p_e < 1.0:
            raise InvalidConfig(f"p_e must lie in [0, 1), got {self.p_e}")
        if not (self.lambda_e > 0 and math.isfinite(self.lambda_e)):
            raise InvalidConfig(f"lambda_e must be positive, got {self.lambda_e}")
        if not isinstance(self.mode_variant, ModeVariant):
            raise InvalidConfig(f"unknown mode variant {self.mode_variant!r}")
        if int(self.warmup_beats) != self.warmup_beats or self.warmup_beats < 1:
            raise InvalidConfig(f"warmup_beats must be an integer >= 1, got {self.warmup_beats}")
        lo, hi = self.lambda_bounds
        if not (0 < lo <= hi and math.isfinite(hi)):
            raise InvalidConfig(f"lambda_bounds must satisfy 0 < min <= max < inf, got {self.lambda_bounds}")
        rlo, rhi = self.r_bounds
        if not (0 < rlo < rhi):
            raise InvalidConfig(f"r_bounds must satisfy 0 < min < max, got {self.r_bounds}")
        if not self.eps >= 0:
            raise InvalidConfig(f"eps must be >= 0, got {self.eps}")


@dataclass(frozen=True)
class FilterState:
    theta: ConjugateParams
    steps: int = 0
    warmed_up: bool = False


@dataclass(frozen=True)
class StepOutput:
    """Per-interval report.

    ``beta0``/``beta1`` are the hypothesis probabilities before any warm-up or
    gating override. The mode and the mean/std summaries describe the state
    *after* absorbing the interval.
    """

    beta0: float
    beta1: float
    weight: float
    mu_star: float
    lambda_star: float
    mean_ibi: float
    std_ibi: float
    clamped: bool


def filter_init(config: FilterConfig, seed_ibi: float | None = None) -> FilterState:
    """Start from ``warmup_beats`` pseudo-observations of ``seed_ibi``."""
    r0 = DEFAULT_SEED_IBI if seed_ibi is None else seed_ibi
    lo, hi = config.r_bounds
    if not lo < r0 < hi:
        raise InvalidConfig(f"seed_ibi must lie in r_bounds {config.r_bounds}, got {r0}")
    return FilterState(ConjugateParams.from_ibi(r0, float(config.warmup_beats)), 0, False)


def clamped_mode(theta: ConjugateParams, config: FilterConfig) -> tuple[IGParams, bool]:
    """Mode of ``theta`` with lam* forced into ``config.lambda_bounds``.

    A degenerate state (identical IBIs, or any state under the published
    lam* expression with too little spread) maps to ``lambda_max``.
    """
    lo, hi = config.lambda_bounds
    try:
        mode = fc_mode(theta, config.mode_variant, config.eps)
    except DegenerateState:
        a, b = theta.a, theta.b
        if a > 0 and b > 0:
            mu = 2.0 * a / b
        else:
            # every statistic decayed to zero; fall back to the centre of the gate
            mu = math.sqrt(config.r_bounds[0] * config.r_bounds[1])
        return IGParams(mu, hi), True
    if mode.lam < lo:
        return IGParams(mode.mu, lo), True
    if mode.lam > hi:
        return IGParams(mode.mu, hi), True
    return mode, False


def _beta1(r: float, mode: IGParams, config: FilterConfig) -> float:
    if config.p_e == 0.0:
        return 1.0
    log_h1 = math.log1p(-config.p_e) + _ig_logpdf_scalar(r, mode.mu, mode.lam)
    log_h0 = math.log(config.p_e) + math.log(config.lambda_e) - config.lambda_e * r
    # logistic of the log-likelihood ratio, written to avoid exp overflow
    z = log_h0 - log_h1
    if z >= 0:
        e = math.exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


def filter_step(state: FilterState, r: float, config: FilterConfig) -> tuple[FilterState, StepOutput]:
    if not r > 0:
        raise NonPositiveInterval(f"interval must be positive, got {r}")
    r = float(r)
    prior_mode, _ = clamped_mode(state.theta, config)
    beta1 = _beta1(r, prior_mode, config)
    beta0 = 1.0 - beta1

    lo, hi = config.r_bounds
    if not lo <= r <= hi:
        weight = 0.0
    elif state.steps < config.warmup_beats:
        weight = 1.0
    else:
        weight = beta1

    theta = state.theta.absorb(r, config.gamma, weight)
    steps = state.steps + 1
    new_state = FilterState(theta, steps, steps >= config.warmup_beats)
    post, clamped = clamped_mode(theta, config)
    out = StepOutput(
        beta0=beta0,
        beta1=beta1,
        weight=weight,
        mu_star=post.mu,
        lambda_star=post.lam,
        mean_ibi=2.0 * theta.a / theta.b if theta.b > 0 else post.mu,
        std_ibi=post.std,
        clamped=clamped,
    )
    return new_state, out


def filter_estimate(
    state: FilterState, config: FilterConfig, strict: bool = False
) -> tuple[float, float, float, float]:
    """Return ``(mean_ibi, var_ibi, mu*, lam*)`` of the tracked distribution.

    The mean is ``2a/b``; the variance is ``mu*^3 / lam*`` under the configured
    mode variant. With ``strict=True`` a state that needs lam* clamping raises
    DegenerateState instead of returning clamped numbers.
    """
    if strict:
        mode = fc_mode(state.theta, config.mode_variant, config.eps)
        lo, hi = config.lambda_bounds
        if not lo <= mode.lam <= hi:
            raise DegenerateState(f"lam*={mode.lam} outside {config.lambda_bounds}")
    else:
        mode, _ = clamped_mode(state.theta, config)
    mean = 2.0 * state.theta.a / state.theta.b
    return mean, mode.mu**3 / mode.lam, mode.mu, mode.lam


@dataclass
class FilterTrace:
    """Column-wise record of a filter run, one row per interval."""

    ibis: np.ndarray
    beta0: np.ndarray
    beta1: np.ndarray
    weight: np.ndarray
    mu_star: np.ndarray
    lambda_star: np.ndarray
    mean_ibi: np.ndarray
    std_ibi: np.ndarray
    final_state: FilterState = field(repr=False)

    def __len__(self) -> int:
        return len(self.ibis)


def run_filter(ibis, config: FilterConfig | None = None, seed_ibi: float | None = None) -> FilterTrace:
    config = config or FilterConfig()
    ibis = np.asarray(ibis, dtype=float)
    state = filter_init(config, seed_ibi)
    cols = np.empty((7, len(ibis)))
    for i, r in enumerate(ibis):
        state, out = filter_step(state, float(r), config)
        cols[:, i] = (out.beta0, out.beta1, out.weight, out.mu_star, out.lambda_star, out.mean_ibi, out.std_ibi)
    return FilterTrace(ibis, *cols, final_state=state)


class IbiFilter:
    """Stateful convenience wrapper around ``filter_step``.

    >>> f = IbiFilter()
    >>> out = f.update(0.81)
    >>> 0.0 <= out.beta0 <= 1.0
    True
    """

    def __init__(self, config: FilterConfig | None = None, seed_ibi: float | None = None):
        self.config = config or FilterConfig()
        self.state = filter_init(self.config, seed_ibi)

    def update(self, r: float) -> StepOutput:
        self.state, out = filter_step(self.state, r, self.config)
        return out

    def estimate(self) -> tuple[float, float, float, float]:
        return filter_estimate(self.state, self.config)
