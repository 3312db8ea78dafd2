"""Evaluation statistics: sliding SDNN/RMSSD curves, curve MAD, ROC, histograms.

Window convention: an IBI belongs to the window ``[t - w/2, t + w/2]`` when
its *ending* beat does. SDNN is the population standard deviation. Windows
holding fewer than two IBIs yield NaN (a gap).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .igmath import IGParams, ig_pdf
from .synth import BeatSeries, LengthMismatch


class EmptyInput(ValueError):
    pass


class NoOverlap(ValueError):
    pass


class SingleClass(ValueError):
    pass


@dataclass(frozen=True)
class Curve:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape:
            raise ValueError(f"times {times.shape} and values {values.shape} differ")
        if np.any(np.diff(times) < 0):
            raise ValueError("curve times must be non-decreasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    false_alarm_rate: float
    detection_rate: float


@dataclass(frozen=True)
class RocCurve:
    points: list[RocPoint]
    auc: float


def _window_bounds(beats: BeatSeries, window: float, at):
    if len(beats) < 2:
        raise EmptyInput("need at least two beats")
    if not window > 0:
        raise ValueError(f"window must be positive, got {window}")
    ends = beats.times[1:]
    at = ends if at is None else np.asarray(at, dtype=float)
    lo = np.searchsorted(ends, at - window / 2, side="left")
    hi = np.searchsorted(ends, at + window / 2, side="right")
    return at, lo, hi


def sliding_sdnn(beats: BeatSeries, window: float = 300.0, at=None) -> Curve:
    """Windowed population std of IBIs, evaluated at ``at`` (default: every IBI end)."""
    at, lo, hi = _window_bounds(beats, window, at)
    x = beats.ibis
    # centre on the global mean to limit cancellation in the running sums
    x = x - x.mean()
    s1 = np.concatenate(([0.0], np.cumsum(x)))
    s2 = np.concatenate(([0.0], np.cumsum(x * x)))
    n = hi - lo
    with np.errstate(invalid="ignore", divide="ignore"):
        m = (s1[hi] - s1[lo]) / n
        var = (s2[hi] - s2[lo]) / n - m * m
    values = np.sqrt(np.clip(var, 0.0, None))
    values[n < 2] = np.nan
    return Curve(at, values)


def sliding_rmssd(beats: BeatSeries, window: float = 300.0, at=None) -> Curve:
    """Windowed RMS of successive IBI differences; both IBIs of a pair must be in the window."""
    at, lo, hi = _window_bounds(beats, window, at)
    d2 = np.diff(beats.ibis) ** 2
    s = np.concatenate(([0.0], np.cumsum(d2)))
    # pairs (i, i+1) with lo <= i and i+1 < hi
    npairs = hi - lo - 1
    with np.errstate(invalid="ignore", divide="ignore"):
        ms = (s[np.maximum(hi - 1, lo)] - s[lo]) / npairs
    values = np.sqrt(np.clip(ms, 0.0, None))
    values[npairs < 1] = np.nan
    return Curve(at, values)


def mad(x: Curve, y: Curve, tol: float | None = None) -> float:
    """Median absolute difference between two curves.

    Each point of ``x`` is paired with the nearest-in-time point of ``y``;
    pairs further apart than ``tol`` (default: half the median step of
    ``x``) or involving a gap are dropped.
    """
    ok_x = ~np.isnan(x.values)
    ok_y = ~np.isnan(y.values)
    xt, xv = x.times[ok_x], x.values[ok_x]
    yt, yv = y.times[ok_y], y.values[ok_y]
    if xt.size == 0 or yt.size == 0:
        raise NoOverlap("a curve has no valid points")
    if tol is None:
        steps = np.diff(x.times)
        tol = 0.5 * float(np.median(steps)) if steps.size else 0.0
    j = np.clip(np.searchsorted(yt, xt), 1, max(yt.size - 1, 1))
    if yt.size == 1:
        nearest = np.zeros(xt.size, dtype=int)
    else:
        left_closer = np.abs(xt - yt[j - 1]) <= np.abs(yt[j] - xt)
        nearest = np.where(left_closer, j - 1, j)
    matched = np.abs(yt[nearest] - xt) <= tol
    if not matched.any():
        raise NoOverlap("no points of the two curves align")
    return float(np.median(np.abs(xv[matched] - yv[nearest[matched]])))


def roc(scores, labels) -> RocCurve:
    """Threshold sweep over anomaly scores.

    A sample is flagged when ``score >= threshold``. Thresholds are every
    distinct score plus 0 and 1, visited in descending order. The AUC is the
    trapezoidal area of the curve anchored at (0, 0).
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise LengthMismatch(f"{scores.shape} scores vs {labels.shape} labels")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC needs both anomalous and normal samples")

    thresholds = np.unique(np.concatenate((scores, [0.0, 1.0])))[::-1]
    order = np.argsort(-scores, kind="stable")
    s_sorted = scores[order]
    pos_cum = np.concatenate(([0], np.cumsum(labels[order])))
    # number of samples with score >= threshold
    k = np.searchsorted(-s_sorted, -thresholds, side="right")
    tp = pos_cum[k]
    fp = k - tp
    tpr = tp / n_pos
    fpr = fp / n_neg
    points = [RocPoint(float(t), float(f), float(d)) for t, f, d in zip(thresholds, fpr, tpr)]
    xs = np.concatenate(([0.0], fpr))
    ys = np.concatenate(([0.0], tpr))
    auc = float(np.sum(np.diff(xs) * (ys[1:] + ys[:-1]) / 2.0))
    return RocCurve(points, auc)


def histogram(ibis, bins: int = 20, range: tuple[float, float] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-width bin edges and counts."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    ibis = np.asarray(ibis, dtype=float)
    if range is None:
        range = (float(ibis.min()), float(ibis.max())) if ibis.size else (0.0, 1.0)
    counts, edges = np.histogram(ibis, bins=bins, range=range)
    return edges, counts


def ig_overlay(edges, params: IGParams, n: int) -> np.ndarray:
    """Expected counts per bin of ``n`` IG draws, evaluated at bin centres."""
    edges = np.asarray(edges, dtype=float)
    centres = 0.5 * (edges[1:] + edges[:-1])
    return n * np.diff(edges) * ig_pdf(centres, params)

