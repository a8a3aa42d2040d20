"""Performance metrics for denoising methods.

Three summary metrics are computed per method from the m analysis results
of a dataset:

* bias: per point, |mean across results - truth| / standard error across
  results (standard error = sd with divisor m-1, over sqrt(m)); summarized
  as the median over points.  Unit-free.  Points whose standard error is 0
  are ill-defined and skipped.
* variance: median standard error over points, in data units.
* error: mean Pearson correlation between each result and the truth.
  Higher is better.

Because the bias metric is studentized, it is nonzero even for perfectly
unbiased measurements; `unbiased_baseline` computes by Monte Carlo the
value expected in that case (the median of |t| with m-1 degrees of
freedom, about 0.70 for m = 10).

`mse_decompose` realizes the exact identity mse = bias^2 + variance under
matched sample moments (population-divisor variance).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BASELINE_STREAM, RngState, Tensor, make_rng, sample_gaussian

__all__ = [
    "MetricSummary",
    "MseDecomposition",
    "bias_metric",
    "variance_metric",
    "median_point_std",
    "error_metric",
    "pearson",
    "mse_decompose",
    "unbiased_baseline",
    "summarize",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricSummary:
    """Bias, variance, and error of one method on one dataset."""

    bias: float
    variance: float
    error: float
    skipped_points: int
    m: int

    def __post_init__(self):
        for name in ("bias", "variance", "error"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.bias < 0 or self.variance < 0:
            raise ValueError("bias and variance must be >= 0")
        if not (-1.0 <= self.error <= 1.0 + 1e-12):
            raise ValueError(f"error must lie in [-1, 1], got {self.error}")


@dataclass(frozen=True)
class MseDecomposition:
    """mse == bias_sq + variance, exactly, for any finite sample."""

    mse: float
    bias_sq: float
    variance: float

    def __post_init__(self):
        if any(v < 0 for v in (self.mse, self.bias_sq, self.variance)):
            raise ValueError("decomposition terms must be >= 0")
        if self.mse > 0 and abs(self.mse - (self.bias_sq + self.variance)) / self.mse > 1e-9:
            raise ValueError("mse must equal bias_sq + variance")


def _stack(results: Sequence[Tensor], truth: Tensor | None = None) -> np.ndarray:
    """Results as an (m, points) matrix over the retained (masked-in) points."""
    if len(results) < 2:
        raise ValueError("need at least 2 results")
    ref = results[0] if truth is None else truth
    for r in results:
        if r.dims != ref.dims:
            raise ValueError("result dims differ")
    return np.stack([r.masked_values() for r in results])


def _pointwise_mean_se(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = x.shape[0]
    mean = x.mean(axis=0)
    se = x.std(axis=0, ddof=1) / np.sqrt(m)
    return mean, se


def bias_metric(results: Sequence[Tensor], truth: Tensor) -> tuple[float, int]:
    """Median studentized deviation from truth; returns (value, skipped count).

    Points where the standard error across results is exactly 0 carry no
    information about deviation in standard-error units and are skipped.
    Raises ValueError if every point is skipped.
    """
    x = _stack(results, truth)
    mean, se = _pointwise_mean_se(x)
    t = truth.masked_values()
    keep = se > 0
    skipped = int(np.count_nonzero(~keep))
    if not keep.any():
        raise ValueError("bias metric undefined: standard error is 0 at every point")
    d = np.abs(mean[keep] - t[keep]) / se[keep]
    return float(np.median(d)), skipped


def variance_metric(results: Sequence[Tensor]) -> float:
    """Median standard error across results, over points, in data units."""
    x = _stack(results)
    _, se = _pointwise_mean_se(x)
    return float(np.median(se))


def median_point_std(results: Sequence[Tensor]) -> float:
    """Median per-point standard deviation across results (divisor m-1).

    Secondary spread figure carried in reports alongside the standard-error
    based `variance_metric`; equals sqrt(m) times that value.
    """
    x = _stack(results)
    return float(np.median(x.std(axis=0, ddof=1)))


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Sample Pearson correlation; raises ValueError on constant input."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValueError("need at least 2 points")
    da = a - a.mean()
    db = b - b.mean()
    na = float(da @ da)
    nb = float(db @ db)
    if na == 0 or nb == 0:
        raise ValueError("correlation undefined for constant input")
    r = float(da @ db) / math.sqrt(na * nb)
    return min(1.0, max(-1.0, r))


def error_metric(results: Sequence[Tensor], truth: Tensor) -> float:
    """Mean Pearson correlation between each result and the truth.

    A constant result has undefined correlation; it contributes 0 and is
    logged, so one degenerate method cannot abort a whole report.
    """
    t = truth.masked_values()
    if np.ptp(t) == 0:
        raise ValueError("error metric undefined: truth is constant over retained points")
    rs = []
    for i, res in enumerate(results):
        v = res.masked_values()
        if np.ptp(v) == 0:
            log.warning("result %d is constant; counting its correlation as 0", i)
            rs.append(0.0)
        else:
            rs.append(pearson(v, t))
    return float(np.mean(rs))


def mse_decompose(samples: np.ndarray, truth: float) -> MseDecomposition:
    """Split mean squared error into squared bias plus variance.

    Uses the population (divisor n) variance so the identity
    mse == bias_sq + variance is exact up to rounding.
    """
    s = np.asarray(samples, dtype=np.float64).ravel()
    if s.size < 2:
        raise ValueError("need at least 2 samples")
    truth = float(truth)
    mean = float(s.mean())
    mse = float(np.mean((s - truth) ** 2))
    bias_sq = (mean - truth) ** 2
    variance = float(np.mean((s - mean) ** 2))
    return MseDecomposition(mse=mse, bias_sq=bias_sq, variance=variance)


def unbiased_baseline(
    m: int, draws: int = 1_000_000, rng: RngState | None = None
) -> float:
    """Expected bias-metric value for a perfectly unbiased Gaussian process.

    Simulates `draws` points, each with m i.i.d. standard-normal results and
    truth 0, applies the per-point bias formula, and returns the median.
    The result converges to the median of |t| with m-1 degrees of freedom
    (~0.70 for m = 10) and falls toward ~0.6745 as m grows.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if draws < 10_000:
        raise ValueError(f"draws must be >= 10000, got {draws}")
    if rng is None:
        rng = make_rng(0).substream(BASELINE_STREAM)
    # chunking depends only on m, so the draw sequence is reproducible
    chunk = max(1, (1 << 21) // m)
    sqrt_m = math.sqrt(m)
    d = np.empty(draws)
    done = 0
    while done < draws:
        npts = min(chunk, draws - done)
        x = sample_gaussian(rng, 0.0, 1.0, npts * m).reshape(npts, m)
        mean = x.mean(axis=1)
        sd = x.std(axis=1, ddof=1)
        d[done : done + npts] = np.abs(mean) * sqrt_m / sd
        done += npts
    return float(np.median(d))


def summarize(results: Sequence[Tensor], truth: Tensor) -> MetricSummary:
    """All three metrics for one method's results on one dataset."""
    bias, skipped = bias_metric(results, truth)
    total = truth.masked_values().size
    if skipped >= total:
        raise ValueError("all points skipped")
    return MetricSummary(
        bias=bias,
        variance=variance_metric(results),
        error=error_metric(results, truth),
        skipped_points=skipped,
        m=len(results),
    )
