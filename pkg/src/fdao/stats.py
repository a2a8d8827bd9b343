"""Moment and rank statistics used to summarize parameter fluctuation sets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

EXACT_WALSH_CAP = 2000
WALSH_SUBSAMPLE = 4_000_000
EXACT_RANK_MAX = 50
Z975 = 1.959963984540054


class StatsError(ValueError):
    """Statistic undefined for the given sample."""


def as_sample(values, min_size: int = 1) -> np.ndarray:
    x = np.asarray(values, dtype=float).ravel()
    if x.size < min_size:
        raise StatsError(f"need at least {min_size} values, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise StatsError("sample contains non-finite values")
    return x


def _central_moments(x: np.ndarray) -> tuple[float, float, float]:
    # Sk and Kr are scale free; rescale huge samples so the 4th power stays finite.
    scale = np.max(np.abs(x))
    if scale > 1e60:
        x = x / scale
    d = x - x.mean()
    m2 = np.mean(d**2)
    if m2 == 0:
        raise StatsError("zero variance: skewness and kurtosis are undefined")
    return m2, np.mean(d**3), np.mean(d**4)


def skewness(values) -> float:
    m2, m3, _ = _central_moments(as_sample(values, 2))
    return float(m3 / m2**1.5)


def kurtosis(values) -> float:
    """Non-excess kurtosis (3 for a Gaussian)."""
    m2, _, m4 = _central_moments(as_sample(values, 2))
    return float(m4 / m2**2)


def jarque_bera(values) -> tuple[float, float]:
    """JB statistic and its chi-square(2) upper-tail p-value."""
    x = as_sample(values, 2)
    m2, m3, m4 = _central_moments(x)
    sk = m3 / m2**1.5
    kr = m4 / m2**2
    jb = x.size / 6.0 * (sk**2 + (kr - 3.0) ** 2 / 4.0)
    return float(jb), float(math.exp(-jb / 2.0))


def jb_from_moments(m: int, sk: float, kr: float) -> float:
    return m / 6.0 * (sk**2 + (kr - 3.0) ** 2 / 4.0)


def ecdf(values, x) -> float:
    s = np.sort(as_sample(values))
    return float(np.searchsorted(s, x, side="right") / s.size)


def value_range(values) -> tuple[float, float]:
    x = as_sample(values)
    return float(x.min()), float(x.max())


@lru_cache(maxsize=64)
def signed_rank_counts(m: int) -> tuple[int, ...]:
    """Number of sign assignments giving each Wilcoxon signed-rank sum 0..m(m+1)/2."""
    counts = [1]
    for r in range(1, m + 1):
        nxt = counts + [0] * r
        for t, c in enumerate(counts):
            nxt[t + r] += c
        counts = nxt
    return tuple(counts)


def walsh_ci_rank(m: int, alpha: float = 0.05) -> int:
    """1-based order statistic of the sorted Walsh averages giving the lower CI end.

    Exact signed-rank null distribution up to ``EXACT_RANK_MAX``, normal
    approximation above. 1 means the CI spans the whole Walsh range.
    """
    if m <= EXACT_RANK_MAX:
        counts = signed_rank_counts(m)
        total = 2**m
        cum, k = 0, 0
        # largest k with P(T <= k - 1) <= alpha/2
        for t, c in enumerate(counts):
            cum += c
            if cum * 2 > alpha * total:
                break
            k = t + 1
        return max(k, 1)
    z = Z975 if alpha == 0.05 else _z(1 - alpha / 2)
    k = math.floor(m * (m + 1) / 4 - z * math.sqrt(m * (m + 1) * (2 * m + 1) / 24))
    return max(k, 1)


def _z(p: float) -> float:
    from scipy.special import ndtri
    return float(ndtri(p))


@dataclass(frozen=True)
class HlEstimate:
    point: float
    ci95: tuple[float, float]
    method: str
    n_walsh: int


def walsh_averages(x: np.ndarray) -> np.ndarray:
    h = x / 2.0
    i, j = np.triu_indices(x.size)
    return h[i] + h[j]


def _walsh_subsample(x: np.ndarray, size: int, rng) -> np.ndarray:
    m = x.size
    total = m * (m + 1) // 2
    k = np.floor(rng.res53_array(size) * total).astype(np.int64)
    # triangular index k -> (row i, column j <= i)
    i = np.floor((np.sqrt(8.0 * k + 1.0) - 1.0) / 2.0).astype(np.int64)
    i -= (i * (i + 1) // 2 > k)
    i += ((i + 1) * (i + 2) // 2 <= k)
    j = k - i * (i + 1) // 2
    h = x / 2.0
    return h[i] + h[j]


def hodges_lehmann(values, rng=None, exact_cap: int = EXACT_WALSH_CAP,
                   subsample: int = WALSH_SUBSAMPLE, alpha: float = 0.05) -> HlEstimate:
    """Median of Walsh averages with the Wilcoxon signed-rank confidence interval.

    Above ``exact_cap`` points, ``subsample`` Walsh pairs are drawn uniformly
    with ``rng`` (an MT19937) and the CI order statistics are taken at the
    same quantile of the subsample.
    """
    x = as_sample(values, 2)
    m = x.size
    n_walsh = m * (m + 1) // 2
    k = walsh_ci_rank(m, alpha)
    if m <= exact_cap:
        w = np.sort(walsh_averages(x))
        lo, hi = w[k - 1], w[n_walsh - k]
        method = "exact"
    else:
        if rng is None:
            raise StatsError(f"m={m} exceeds the exact Walsh cap; a generator is required")
        w = np.sort(_walsh_subsample(x, subsample, rng))
        q = (k - 1) / (n_walsh - 1)
        lo = w[int(round(q * (w.size - 1)))]
        hi = w[w.size - 1 - int(round(q * (w.size - 1)))]
        method = "subsampled"
    return HlEstimate(float(np.median(w)), (float(lo), float(hi)), method, n_walsh)
