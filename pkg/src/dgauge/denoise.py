"""Denoising methods: each is a pure, shape-preserving map from one
measurement Tensor to one denoised Tensor.

All smoothers preserve constant inputs exactly.  Boundary policies are
chosen so that no spurious bias is created at the edges: truncated kernels
(Gaussian, boxcar) are renormalized over their in-bounds taps, and the
diffusion scheme uses reflecting (zero-flux) boundaries, which also makes
it conserve the global sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.ndimage import correlate1d

from .core import Tensor
from .optim import LsqProblem, LsqSolution, solve_lsq

if TYPE_CHECKING:  # avoids the circular import; scenarios imports this module
    from .scenarios import HrfParams

__all__ = [
    "DiffusionParams",
    "Basis",
    "SvdFactors",
    "identity",
    "gaussian_smooth_3d",
    "atlas_prior_average",
    "anisotropic_diffuse",
    "boxcar_smooth",
    "basis_restrict",
    "svd_factors",
    "truncated_svd",
    "parametric_hrf_fit",
]

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))  # 2.3548...


def identity(x: Tensor) -> Tensor:
    """The measurement as-is (Tensors are immutable, so no copy is needed)."""
    return x


# ---------------------------------------------------------------------------
# Gaussian smoothing


def _gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(math.ceil(4.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(t**2) / (2.0 * sigma**2))
    return k / k.sum()


def _smooth_separable(values: np.ndarray, sigma: float) -> np.ndarray:
    """Per-axis Gaussian convolution with in-bounds renormalization.

    Out-of-range taps are dropped and the remaining weights rescaled to sum
    to 1, so constants pass through unchanged right up to the boundary.
    """
    if sigma <= 0:
        return np.array(values, copy=True)
    kernel = _gaussian_kernel(sigma)
    out = np.asarray(values, dtype=np.float64)
    for axis in range(out.ndim):
        norm = correlate1d(
            np.ones(out.shape[axis]), kernel, mode="constant", cval=0.0
        )
        shape = [1] * out.ndim
        shape[axis] = out.shape[axis]
        out = correlate1d(out, kernel, axis=axis, mode="constant", cval=0.0)
        out = out / norm.reshape(shape)
    return out


def gaussian_smooth_3d(vol: Tensor, fwhm_mm: float, voxel_mm: float) -> Tensor:
    """Separable isotropic Gaussian smoothing of a 3-D volume.

    The kernel width is given as full width at half maximum in millimeters;
    sigma in voxels is fwhm_mm / (voxel_mm * 2*sqrt(2 ln 2)).  The kernel is
    truncated at radius ceil(4 sigma) and renormalized per axis, both
    globally and over in-bounds taps at the boundary.  fwhm_mm == 0 returns
    the input unchanged.
    """
    if vol.ndim != 3:
        raise ValueError(f"expected a 3-D volume, got {vol.ndim}-D")
    if fwhm_mm < 0:
        raise ValueError(f"fwhm_mm must be >= 0, got {fwhm_mm}")
    if not (voxel_mm > 0):
        raise ValueError(f"voxel_mm must be > 0, got {voxel_mm}")
    if fwhm_mm == 0:
        return vol
    sigma_vox = fwhm_mm / (voxel_mm * FWHM_PER_SIGMA)
    return vol.with_values(_smooth_separable(vol.values, sigma_vox))


# ---------------------------------------------------------------------------
# Atlas prior


def atlas_prior_average(vol: Tensor, atlas: Tensor, seg: Tensor) -> Tensor:
    """Average the measurement with an affinely rescaled template volume.

    The scale a and offset b are solved from the 2x2 system matching the
    template's gray- and white-matter means (segmentation labels 1 and 2)
    to the measurement's, then the output is (vol + (a*atlas + b)) / 2.
    """
    if atlas.dims != vol.dims or seg.dims != vol.dims:
        raise ValueError("vol, atlas, and seg must share dims")
    gm = seg.values == 1
    wm = seg.values == 2
    if not gm.any() or not wm.any():
        raise ValueError("segmentation must contain gray (1) and white (2) voxels")
    atlas_gm = float(atlas.values[gm].mean())
    atlas_wm = float(atlas.values[wm].mean())
    vol_gm = float(vol.values[gm].mean())
    vol_wm = float(vol.values[wm].mean())
    denom = atlas_gm - atlas_wm
    if denom == 0:
        raise ValueError(
            "degenerate system: atlas gray- and white-matter means are equal"
        )
    a = (vol_gm - vol_wm) / denom
    b = vol_gm - a * atlas_gm
    return vol.with_values(0.5 * (vol.values + (a * atlas.values + b)))


# ---------------------------------------------------------------------------
# Anisotropic diffusion


@dataclass(frozen=True)
class DiffusionParams:
    """Knobs of the nonlinear diffusion smoother.

    tau must respect the explicit-scheme stability bound tau <= 1/(2*axes),
    checked against the actual volume at call time.
    """

    iterations: int = 20
    tau: float = 0.15
    presmooth_sigma: float = 0.8  # voxels
    contrast_percentile: float = 50.0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not (self.tau > 0):
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.presmooth_sigma < 0:
            raise ValueError("presmooth_sigma must be >= 0")
        if not (0 < self.contrast_percentile < 100):
            raise ValueError("contrast_percentile must lie in (0, 100)")


def anisotropic_diffuse(vol: Tensor, params: DiffusionParams) -> Tensor:
    """Edge-preserving nonlinear diffusion of a 3-D volume.

    Explicit scheme; each iteration:

    1. presmooth the field with a Gaussian of `presmooth_sigma` voxels;
    2. from its squared gradient magnitude s, form the diffusivity
       g = 1 / (1 + s / lambda^2), with lambda the `contrast_percentile`-th
       percentile of the presmoothed gradient magnitude (recomputed every
       iteration);
    3. update u <- u + tau * div(g * grad u) in flux form with zero-flux
       (reflecting) boundaries.

    The flux form conserves the global sum exactly up to rounding, and low
    diffusivity across strong edges is what keeps them from blurring.
    """
    if vol.ndim != 3:
        raise ValueError(f"expected a 3-D volume, got {vol.ndim}-D")
    tau_max = 1.0 / (2.0 * vol.ndim)
    if params.tau > tau_max:
        raise ValueError(
            f"tau={params.tau} exceeds stability bound {tau_max} for {vol.ndim} axes"
        )
    u = np.array(vol.values, copy=True)
    for _ in range(params.iterations):
        smoothed = _smooth_separable(u, params.presmooth_sigma)
        grads = np.gradient(smoothed)
        s = sum(g * g for g in grads)
        lam = float(np.percentile(np.sqrt(s), params.contrast_percentile))
        if lam > 0:
            g = 1.0 / (1.0 + s / lam**2)
        else:
            g = np.ones_like(s)  # flat field: plain (inert) diffusion
        update = np.zeros_like(u)
        for axis in range(u.ndim):
            du = np.diff(u, axis=axis)
            lo = [slice(None)] * u.ndim
            hi = [slice(None)] * u.ndim
            lo[axis] = slice(0, -1)
            hi[axis] = slice(1, None)
            lo, hi = tuple(lo), tuple(hi)
            flux = 0.5 * (g[lo] + g[hi]) * du
            update[lo] += flux
            update[hi] -= flux
        u += params.tau * update
    return vol.with_values(u)


# ---------------------------------------------------------------------------
# Boxcar smoothing


def boxcar_smooth(series: Tensor, width: int) -> Tensor:
    """Moving average of odd width; boundary windows shrink and renormalize."""
    if series.ndim != 1:
        raise ValueError(f"expected a 1-D series, got {series.ndim}-D")
    n = series.values.size
    if width % 2 == 0:
        raise ValueError(f"width must be odd, got {width}")
    if width < 1 or width > n:
        raise ValueError(f"width must be in [1, {n}], got {width}")
    if width == 1:
        return series
    ones = np.ones(int(width))
    total = np.convolve(series.values, ones, mode="same")
    count = np.convolve(np.ones(n), ones, mode="same")
    return series.with_values(total / count)


# ---------------------------------------------------------------------------
# Basis restriction


@dataclass(frozen=True, eq=False)
class Basis:
    """Orthonormal columns spanning the restriction subspace."""

    columns: np.ndarray

    def __post_init__(self):
        cols = np.array(self.columns, dtype=np.float64, copy=True)
        if cols.ndim != 2:
            raise ValueError("basis columns must form a 2-D matrix")
        gram = cols.T @ cols
        if np.max(np.abs(gram - np.eye(cols.shape[1]))) > 1e-10:
            raise ValueError("basis columns are not orthonormal")
        cols.setflags(write=False)
        object.__setattr__(self, "columns", cols)

    @property
    def length(self) -> int:
        return self.columns.shape[0]

    @property
    def k(self) -> int:
        return self.columns.shape[1]


def basis_restrict(series: Tensor, basis: Basis) -> Tensor:
    """Orthogonal projection of the series onto the basis span."""
    if series.ndim != 1:
        raise ValueError(f"expected a 1-D series, got {series.ndim}-D")
    if series.values.size != basis.length:
        raise ValueError(
            f"series length {series.values.size} != basis length {basis.length}"
        )
    b = basis.columns
    return series.with_values(b @ (b.T @ series.values))


# ---------------------------------------------------------------------------
# Truncated SVD


@dataclass(frozen=True, eq=False)
class SvdFactors:
    """Full SVD factors X = U diag(s) V^T with a fixed sign convention.

    U is rows x rows, V is cols x cols, singular_values has min(rows, cols)
    nonincreasing nonnegative entries.  The sign convention (largest-
    magnitude entry of each V column nonnegative) does not affect
    reconstructions but keeps diagnostics deterministic.
    """

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray

    def reconstruct(self, rank: int | None = None) -> np.ndarray:
        s = self.singular_values
        if rank is None:
            rank = s.size
        return (self.u[:, :rank] * s[:rank]) @ self.v[:, :rank].T


def svd_factors(x: Tensor | np.ndarray) -> SvdFactors:
    """Full SVD of a 2-D array, sign-fixed and verified against the input."""
    a = x.values if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got {a.ndim}-D")
    u, s, vt = np.linalg.svd(a, full_matrices=True)
    v = vt.T
    k = s.size
    for j in range(v.shape[1]):
        i = int(np.argmax(np.abs(v[:, j])))
        if v[i, j] < 0:
            v[:, j] = -v[:, j]
            if j < k:
                u[:, j] = -u[:, j]
    factors = SvdFactors(u=u, singular_values=s, v=v)
    err = np.linalg.norm(factors.reconstruct() - a)
    scale = np.linalg.norm(a)
    if scale > 0 and err / scale > 1e-8:
        raise ValueError("SVD factorization failed its reconstruction check")
    return factors


def truncated_svd(x: Tensor, rank: int) -> Tensor:
    """Low-rank reconstruction keeping the first `rank` singular triplets."""
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got {x.ndim}-D")
    max_rank = min(x.dims)
    if not (1 <= rank <= max_rank):
        raise ValueError(f"rank must be in [1, {max_rank}], got {rank}")
    return x.with_values(svd_factors(x).reconstruct(rank))


# ---------------------------------------------------------------------------
# Parametric fit


def parametric_hrf_fit(
    series: Tensor,
    seed_params: "HrfParams | None" = None,
    full_output: bool = False,
) -> Tensor | tuple[Tensor, LsqSolution]:
    """Fit the six-parameter double-gamma response model to a timecourse.

    The forward model builds the response curve on the same 1-s grid as the
    measurement (see scenarios.hrf_from_params); peak normalization inside
    the model absorbs amplitude, so no gain parameter is fit.  The four
    gamma shape/scale parameters are kept positive via lower bounds at 1e-3
    and the onset is kept >= 0, which pins every fitted curve to exactly 0
    at t = 0.  If the iteration cap is reached, the best iterate is
    returned; pass full_output=True to get the solver diagnostics.
    """
    from .scenarios import HRF_FIT_SEED, HrfParams, hrf_from_params

    if series.ndim != 1:
        raise ValueError(f"expected a 1-D series, got {series.ndim}-D")
    if seed_params is None:
        seed_params = HRF_FIT_SEED
    target = series.values
    grid = hrf_from_params(seed_params).values.size
    if target.size != grid:
        raise ValueError(
            f"series length {target.size} does not match the model grid "
            f"({grid} samples)"
        )

    def residual(theta: np.ndarray) -> np.ndarray:
        return hrf_from_params(HrfParams(*theta)).values - target

    problem = LsqProblem(
        residual=residual,
        x0=seed_params.as_array(),
        lower=np.array([1e-3, 1e-3, 1e-3, 1e-3, -np.inf, 0.0]),
        upper=None,
        max_iterations=200,
    )
    solution = solve_lsq(problem)
    fitted = hrf_from_params(HrfParams(*solution.params))
    out = series.with_values(fitted.values)
    if full_output:
        return out, solution
    return out
