"""Synthetic beat series and detector-error corruption.

Missed detections delete beats (two normal IBIs merge into one long one);
false detections insert beats uniformly over the record (one normal IBI splits
into two short ones). Every interval touched by either error is labelled
anomalous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .igmath import IGParams, ig_sample


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class BeatSeries:
    times: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1:
            raise ValueError("beat times must be one-dimensional")
        if t.size and t[0] < 0:
            raise ValueError(f"first beat must be at t >= 0, got {t[0]}")
        if np.any(np.diff(t) <= 0):
            raise ValueError("beat times must be strictly increasing")
        object.__setattr__(self, "times", t)

    @classmethod
    def from_ibis(cls, ibis, t0: float = 0.0) -> BeatSeries:
        ibis = np.asarray(ibis, dtype=float)
        return cls(np.concatenate(([t0], t0 + np.cumsum(ibis))))

    @property
    def ibis(self) -> np.ndarray:
        return np.diff(self.times)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class LabeledIbis:
    """Intervals with ground-truth flags (True = anomalous)."""

    ibis: np.ndarray
    labels: np.ndarray
    truth_params: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.ibis) != len(self.labels):
            raise LengthMismatch(f"{len(self.ibis)} ibis vs {len(self.labels)} labels")
        if np.any(np.asarray(self.ibis) <= 0):
            raise ValueError("all intervals must be positive")


def gen_stationary(p: IGParams, n: int, rng: np.random.Generator) -> BeatSeries:
    """``n`` beats whose times are cumulative sums of IG(mu, lam) draws."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return BeatSeries(np.cumsum(ig_sample(p, rng, size=n)))


def gen_drifting(mu_path, lambda_path, rng: np.random.Generator) -> BeatSeries:
    mu_path = np.asarray(mu_path, dtype=float)
    lambda_path = np.asarray(lambda_path, dtype=float)
    if mu_path.shape != lambda_path.shape:
        raise LengthMismatch(f"mu path {mu_path.shape} vs lambda path {lambda_path.shape}")
    if mu_path.size == 0:
        raise ValueError("paths must be non-empty")
    if np.any(mu_path <= 0) or np.any(lambda_path <= 0):
        raise ValueError("paths must be strictly positive")
    return BeatSeries(np.cumsum(rng.wald(mu_path, lambda_path)))


def corrupt(
    beats: BeatSeries, p_m: float, p_f: float, rng: np.random.Generator
) -> tuple[BeatSeries, LabeledIbis]:
    """Inject missed and false detections.

    Each interior beat is deleted independently with probability ``p_m``
    (first and last beats are kept so the record duration is unchanged).
    ``floor(p_f * N)`` false beats are placed uniformly on the open record
    span; draws that collide with an existing beat are redrawn.
    """
    if not (0.0 <= p_m < 1.0 and 0.0 <= p_f < 1.0):
        raise ValueError(f"p_m and p_f must lie in [0, 1), got {p_m}, {p_f}")
    t = beats.times
    n = len(t)
    keep = np.ones(n, dtype=bool)
    if n > 2:
        keep[1:-1] = rng.random(n - 2) >= p_m
    kept_idx = np.flatnonzero(keep)

    n_insert = math.floor(p_f * n) if n >= 2 else 0
    inserted: list[float] = []
    if n_insert:
        existing = set(t.tolist())
        lo, hi = t[0], t[-1]
        while len(inserted) < n_insert:
            x = float(rng.uniform(lo, hi))
            if lo < x < hi and x not in existing:
                existing.add(x)
                inserted.append(x)

    times = np.concatenate((t[kept_idx], np.asarray(inserted, dtype=float)))
    # original index of each output beat; -1 marks an inserted beat
    origin = np.concatenate((kept_idx, np.full(len(inserted), -1)))
    order = np.argsort(times, kind="stable")
    times, origin = times[order], origin[order]

    left, right = origin[:-1], origin[1:]
    labels = (left < 0) | (right < 0) | (right - left > 1)
    out = BeatSeries(times)
    meta = {
        "p_m": p_m,
        "p_f": p_f,
        "deletion": "bernoulli per interior beat",
        "insertion": "floor(p_f*N) uniform on (t_first, t_last)",
        "n_deleted": int(n - kept_idx.size),
        "n_inserted": len(inserted),
    }
    return out, LabeledIbis(out.ibis, labels, None, meta)
