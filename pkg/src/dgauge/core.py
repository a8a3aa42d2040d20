"""Tensors, seeded random streams, noise models, and dataset assembly.

Everything downstream (denoisers, metrics, scenario runners) consumes the
types defined here.  Two properties are load-bearing:

* determinism: every operation is a pure function of its inputs and a seed,
  and repeated invocation is bit-identical;
* substream independence: noise for measurement ``k`` comes from
  ``substream(seed, k)``, so generation can be parallelized or reordered
  without changing any output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

__all__ = [
    "Tensor",
    "RngState",
    "NoiseSpec",
    "Dataset",
    "make_rng",
    "sample_gaussian",
    "add_iid_noise",
    "add_correlated_noise",
    "generate_measurements",
    "TRUTH_STREAM",
    "BASELINE_STREAM",
    "FIGURE1_STREAM",
]

_ALGORITHM = "philox4x64"

# Measurement noise uses substreams 0..m-1; auxiliary draws (ground truth,
# baseline Monte Carlo, demo quadrants) live far above any plausible m.
TRUTH_STREAM = 1 << 32
BASELINE_STREAM = (1 << 32) + 1
FIGURE1_STREAM = (1 << 32) + 2


@dataclass(frozen=True, eq=False)
class Tensor:
    """Dense array of finite float64 values, 1 to 3 axes, with optional mask.

    Values are stored C-contiguous (last axis fastest) and marked read-only,
    so instances are safe to share across threads.  The mask, when present,
    selects the points over which metrics are computed; it does not affect
    how denoisers process the data.
    """

    values: np.ndarray
    mask: np.ndarray | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if vals.ndim < 1 or vals.ndim > 3:
            raise ValueError(f"Tensor must have 1-3 axes, got {vals.ndim}")
        if vals.size == 0:
            raise ValueError("Tensor must not be empty")
        if not np.all(np.isfinite(vals)):
            raise ValueError("Tensor values must be finite (no NaN/Inf)")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.mask is not None:
            mask = np.array(self.mask, dtype=bool, order="C", copy=True)
            if mask.shape != vals.shape:
                raise ValueError(
                    f"mask shape {mask.shape} != values shape {vals.shape}"
                )
            mask.setflags(write=False)
            object.__setattr__(self, "mask", mask)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def with_values(self, values: np.ndarray) -> "Tensor":
        """New Tensor with the same mask and fresh values."""
        return Tensor(values, self.mask)

    def masked_values(self) -> np.ndarray:
        """Flat array of the retained points (all points if no mask)."""
        if self.mask is None:
            return self.values.ravel()
        return self.values[self.mask]


@dataclass(eq=False)
class RngState:
    """One reproducible random stream.

    Streams are keyed by ``(seed, stream path)`` through a Philox counter
    generator; distinct stream paths from the same seed are statistically
    independent, and the mapping is stable across platforms and runs.
    Drawing advances the stream, so share an instance only along one
    deterministic call sequence.
    """

    seed: int
    stream: tuple[int, ...] = ()
    algorithm: str = _ALGORITHM
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.algorithm != _ALGORITHM:
            raise ValueError(f"unknown rng algorithm {self.algorithm!r}")
        seed = int(self.seed) & 0xFFFFFFFFFFFFFFFF  # 64-bit wrap for negatives
        ss = np.random.SeedSequence(seed, spawn_key=tuple(self.stream))
        object.__setattr__(self, "_gen", np.random.Generator(np.random.Philox(ss)))

    def substream(self, *key: int) -> "RngState":
        """Independent stream derived from this state's seed and `key`."""
        return RngState(self.seed, self.stream + tuple(int(k) for k in key))

    def uniform(self, shape) -> np.ndarray:
        """Draws uniform on [0, 1), advancing the stream."""
        return self._gen.random(shape)


def make_rng(seed: int) -> RngState:
    """Root random state for `seed`; substreams derive from it."""
    return RngState(int(seed))


def sample_gaussian(rng: RngState, mu: float, sigma: float, n: int) -> np.ndarray:
    """n i.i.d. draws from Normal(mu, sigma^2).

    Sampling is the inverse normal CDF applied to uniforms, so the algorithm
    is reproducible from the uniform stream alone.  sigma == 0 returns n
    copies of mu.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if sigma == 0:
        return np.full(n, float(mu))
    # uniforms are k/2^53 in [0,1); the half-step shift keeps ndtri finite
    u = rng.uniform(int(n)) + 2.0**-54
    return mu + sigma * ndtri(u)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model for a scenario: i.i.d. or boxcar-correlated Gaussian."""

    kind: str
    sigma: float
    boxcar_width: int = 1

    def __post_init__(self):
        if self.kind not in ("iid-gaussian", "correlated-gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not (self.sigma > 0):
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.boxcar_width < 1:
            raise ValueError(f"boxcar_width must be >= 1, got {self.boxcar_width}")


def add_iid_noise(truth: Tensor, sigma: float, rng: RngState) -> Tensor:
    """truth + independent Normal(0, sigma^2) per element; dims and mask kept."""
    if not (sigma > 0):
        raise ValueError(f"sigma must be > 0, got {sigma}")
    noise = sample_gaussian(rng, 0.0, sigma, truth.values.size)
    return truth.with_values(truth.values + noise.reshape(truth.dims))


def add_correlated_noise(
    truth: Tensor, sigma: float, width: int, rng: RngState
) -> Tensor:
    """truth + Gaussian noise convolved with a boxcar of integral 1.

    The convolution is same-length with zero-padded ends, so noise variance
    is mildly reduced near the boundaries; interior samples have standard
    deviation sigma/sqrt(width) and lag-1 autocorrelation (width-1)/width.
    """
    if truth.ndim != 1:
        raise ValueError(f"correlated noise requires a 1-D Tensor, got {truth.ndim}-D")
    if not (sigma > 0):
        raise ValueError(f"sigma must be > 0, got {sigma}")
    n = truth.values.size
    if width < 1 or width > n:
        raise ValueError(f"width must be in [1, {n}], got {width}")
    white = sample_gaussian(rng, 0.0, sigma, n)
    kernel = np.full(int(width), 1.0 / width)
    noise = np.convolve(white, kernel, mode="same")
    return truth.with_values(truth.values + noise)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ground truth plus the noisy measurements generated from it."""

    truth: Tensor
    measurements: tuple[Tensor, ...]
    noise: NoiseSpec
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "measurements", tuple(self.measurements))
        if len(self.measurements) < 2:
            raise ValueError("a Dataset needs at least 2 measurements")
        for meas in self.measurements:
            if meas.dims != self.truth.dims:
                raise ValueError("measurement dims differ from truth dims")
            if (meas.mask is None) != (self.truth.mask is None) or (
                meas.mask is not None
                and not np.array_equal(meas.mask, self.truth.mask)
            ):
                raise ValueError("measurement mask differs from truth mask")

    @property
    def m(self) -> int:
        return len(self.measurements)


def generate_measurements(
    truth: Tensor, noise: NoiseSpec, m: int, seed: int
) -> Dataset:
    """m noisy copies of `truth`, measurement k drawn from substream(seed, k).

    The per-index substreams make the result independent of generation
    order, so identical (truth, noise, m, seed) always gives a bit-identical
    Dataset.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    root = make_rng(seed)
    measurements = []
    for k in range(m):
        rng_k = root.substream(k)
        if noise.kind == "iid-gaussian":
            measurements.append(add_iid_noise(truth, noise.sigma, rng_k))
        else:
            measurements.append(
                add_correlated_noise(truth, noise.sigma, noise.boxcar_width, rng_k)
            )
    return Dataset(truth, tuple(measurements), noise, int(seed))
