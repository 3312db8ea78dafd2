"""Synthetic evaluation protocol: simulate, corrupt, filter, compare."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filter import FilterConfig, FilterTrace, run_filter
from .igmath import IGParams
from .metrics import Curve, mad, roc, sliding_sdnn
from .synth import BeatSeries, LabeledIbis, corrupt, gen_stationary

NOMINAL = IGParams(0.8, 400.0)


def hold_curve(times, values, at) -> Curve:
    """Sample a step signal (value set at each of ``times``) at ``at``; NaN before the first time."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    at = np.asarray(at, dtype=float)
    idx = np.searchsorted(times, at, side="right") - 1
    out = np.where(idx >= 0, values[np.clip(idx, 0, None)], np.nan)
    return Curve(at, out)


@dataclass
class HrvCurves:
    times: np.ndarray
    clean: Curve
    corrupted: Curve
    filtered: Curve

    def mads(self) -> dict[str, float]:
        return {
            "corrupted_vs_clean": mad(self.corrupted, self.clean),
            "filter_vs_clean": mad(self.filtered, self.clean),
            "filter_vs_corrupted": mad(self.filtered, self.corrupted),
        }


def hrv_curves(clean: BeatSeries, noisy: BeatSeries, trace: FilterTrace, window: float = 300.0) -> HrvCurves:
    """SDNN of the clean and corrupted series and the filter's std, on the clean beat grid."""
    at = clean.times[1:]
    return HrvCurves(
        times=at,
        clean=sliding_sdnn(clean, window, at),
        corrupted=sliding_sdnn(noisy, window, at),
        filtered=hold_curve(noisy.times[1:], trace.std_ibi, at),
    )


@dataclass
class Trial:
    clean: BeatSeries
    noisy: BeatSeries
    labels: LabeledIbis
    trace: FilterTrace

    @property
    def auc(self) -> float:
        return roc(self.trace.beta0, self.labels.labels).auc


def run_trial(
    seed: int,
    p: float,
    n: int = 10_000,
    params: IGParams = NOMINAL,
    config: FilterConfig | None = None,
) -> Trial:
    """One seeded stationary record corrupted with ``p_m = p_f = p`` and filtered."""
    rng = np.random.default_rng(seed)
    clean = gen_stationary(params, n, rng)
    noisy, labels = corrupt(clean, p, p, rng)
    trace = run_filter(noisy.ibis, config or FilterConfig())
    return Trial(clean, noisy, labels, trace)
