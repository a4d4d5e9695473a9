"""Comparison of per-slice fidelity samples between methods.

Degrees of similarity are p-values: a two-sided variance-ratio F test per
index, and a chi-square adherence test over the sequence of means and mean
deviations of ME, MAE, RMSE and PSNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

# sigma = mean absolute deviation * sqrt(pi / 2) for a normal sample
MAD_TO_STD = math.sqrt(math.pi / 2.0)
ADHERENCE_INDEXES = ("me", "mae", "rmse", "psnr")


@dataclass(frozen=True)
class SampleSummary:
    mean: float
    mean_dev: float
    n: int
    deviation: str = "mad"  # "mad" (mean absolute deviation) or "std"

    def variance(self) -> float:
        s = self.mean_dev * MAD_TO_STD if self.deviation == "mad" else self.mean_dev
        return s * s


def summarize(values, deviation: str = "mad") -> SampleSummary:
    v = np.asarray(values, dtype=np.float64)
    v = v[np.isfinite(v)]
    if v.size == 0:
        raise ValueError("no finite values to summarize")
    mean = float(v.mean())
    if deviation == "mad":
        dev = float(np.mean(np.abs(v - mean)))
    elif deviation == "std":
        dev = float(v.std(ddof=1)) if v.size > 1 else 0.0
    else:
        raise ValueError(f"unknown deviation kind {deviation!r}")
    return SampleSummary(mean, dev, int(v.size), deviation)


def f_test_similarity(a: SampleSummary, b: SampleSummary, confidence: float = 0.95) -> float:
    """Two-sided p-value of the F test for equal variances.

    ``confidence`` only validates the caller's level; use :func:`is_similar`
    to turn the p-value into a decision.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    if a.n < 2 or b.n < 2:
        raise ValueError("the F test needs at least two samples per side")
    va, vb = a.variance(), b.variance()
    if va == 0.0 and vb == 0.0:
        return 1.0 if a.mean == b.mean else 0.0
    if va == 0.0 or vb == 0.0:
        return 0.0
    # larger variance on top; order fixed so the result is exactly symmetric
    (v1, n1), (v2, n2) = sorted([(va, a.n), (vb, b.n)], reverse=True)
    p = 2.0 * sps.f.sf(v1 / v2, n1 - 1, n2 - 1)
    return float(min(1.0, max(0.0, p)))


def is_similar(p_value: float, confidence: float = 0.95) -> bool:
    return p_value >= 1.0 - confidence


def chi2_statistic(observed, expected) -> float:
    o = np.asarray(observed, dtype=np.float64)
    e = np.asarray(expected, dtype=np.float64)
    if o.shape != e.shape or o.ndim != 1:
        raise ValueError("observed and expected must be 1-D sequences of equal length")
    if o.size < 2:
        raise ValueError("need at least two cells")
    if np.any(e <= 0.0):
        raise ValueError("expected values must be positive")
    return float(np.sum((o - e) ** 2 / e))


def chi2_adherence(observed, expected) -> float:
    """Upper-tail chi-square p-value of ``observed`` against ``expected``."""
    x2 = chi2_statistic(observed, expected)
    if x2 == 0.0:
        return 1.0
    # keep 1.0 reserved for an exact match
    return float(min(sps.chi2.sf(x2, len(observed) - 1), np.nextafter(1.0, 0.0)))


def adherence_sequence(summaries: dict[str, SampleSummary]) -> list[float]:
    """Means then mean deviations of ME, MAE, RMSE and PSNR, the eight cells of the global test."""
    means = [summaries[k].mean for k in ADHERENCE_INDEXES]
    devs = [summaries[k].mean_dev for k in ADHERENCE_INDEXES]
    return means + devs
