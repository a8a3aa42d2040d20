"""Ground-truth generators and end-to-end benchmark scenarios.

Four scenarios are built in:

* ``figure1``    -- the textbook 2x2 bias/variance demonstration: Gaussian
  draws with means {2, 4} and variances {0.3, 8} scored against truth 2.
* ``anatomical`` -- a synthetic 3-D brain phantom with i.i.d. noise,
  denoised by Gaussian smoothing, an atlas prior, and nonlinear diffusion.
* ``timecourse`` -- a double-gamma response timecourse with temporally
  correlated noise, denoised by basis restriction and parametric fitting.
* ``tuning``     -- a rank-4 set of unit tuning curves with i.i.d. noise,
  denoised by boxcar smoothing and truncated SVD at several ranks.

`run_scenario` generates the measurements, applies every requested method
to each measurement independently, and reduces the outputs to one
MetricSummary per method plus the unbiased baseline for the measurement
count.  Identical specs produce bit-identical reports, regardless of the
worker count.
"""

from __future__ import annotations

import math
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from . import metrics
from .core import (
    BASELINE_STREAM,
    FIGURE1_STREAM,
    TRUTH_STREAM,
    Dataset,
    NoiseSpec,
    RngState,
    Tensor,
    generate_measurements,
    make_rng,
    sample_gaussian,
)
from .denoise import (
    Basis,
    DiffusionParams,
    anisotropic_diffuse,
    atlas_prior_average,
    basis_restrict,
    boxcar_smooth,
    gaussian_smooth_3d,
    identity,
    parametric_hrf_fit,
    truncated_svd,
)
from .denoise import _smooth_separable
from .errors import ConfigError
from .metrics import MetricSummary, mse_decompose, unbiased_baseline

__all__ = [
    "HrfParams",
    "VolumeBundle",
    "ScenarioSpec",
    "ScenarioReport",
    "MethodOutcome",
    "QuadrantRecord",
    "SCENARIO_NAMES",
    "HRF_TRUTH_PARAMS",
    "HRF_FIT_SEED",
    "double_gamma",
    "hrf_from_params",
    "hrf_basis",
    "tuning_truth",
    "phantom_bundle",
    "figure1_demo",
    "run_scenario",
    "scenario_defaults",
]

SCENARIO_NAMES = ("figure1", "anatomical", "timecourse", "tuning")


# ---------------------------------------------------------------------------
# Response timecourse ground truth


@dataclass(frozen=True)
class HrfParams:
    """Six parameters of the double-gamma response model.

    response_delay/dispersion and undershoot_delay/dispersion are the gamma
    timing parameters in seconds; ratio divides the undershoot lobe; onset
    shifts the whole curve (seconds).
    """

    response_delay: float = 6.0
    undershoot_delay: float = 16.0
    response_dispersion: float = 1.0
    undershoot_dispersion: float = 1.0
    ratio: float = 6.0
    onset: float = 0.0

    def __post_init__(self):
        for name in (
            "response_delay",
            "undershoot_delay",
            "response_dispersion",
            "undershoot_dispersion",
        ):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.ratio == 0:
            raise ValueError("ratio must be nonzero")

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.response_delay,
                self.undershoot_delay,
                self.response_dispersion,
                self.undershoot_dispersion,
                self.ratio,
                self.onset,
            ]
        )


HRF_TRUTH_PARAMS = HrfParams(6.0, 16.0, 1.0, 1.0, 2.0, 0.0)  # strong undershoot
HRF_FIT_SEED = HrfParams(6.0, 16.0, 1.0, 1.0, 6.0, 0.0)

HRF_DT = 0.1
HRF_DURATION = 40.0
_HRF_SAMPLE_STEP = 10  # 1-s samples on the 0.1-s grid


def _gamma_pdf(t: np.ndarray, shape: float, scale: float) -> np.ndarray:
    # t^(shape-1) exp(-t/scale) / (scale^shape Gamma(shape)), t > 0
    logpdf = (
        (shape - 1.0) * np.log(t)
        - t / scale
        - shape * math.log(scale)
        - gammaln(shape)
    )
    with np.errstate(over="ignore", under="ignore"):
        return np.exp(logpdf)


def double_gamma(params: HrfParams, dt: float, duration: float) -> Tensor:
    """Difference-of-gammas curve on the grid t_i = i*dt - onset.

    The positive lobe is a gamma density with shape response_delay /
    response_dispersion and scale response_dispersion; the undershoot lobe
    uses the undershoot parameters and is divided by `ratio`.  The curve is
    0 for t <= 0 and normalized to unit sum over the grid.
    """
    if not (dt > 0):
        raise ValueError(f"dt must be > 0, got {dt}")
    if duration < dt:
        raise ValueError(f"duration must be >= dt, got {duration}")
    n = int(round(duration / dt)) + 1
    t = np.arange(n) * dt - params.onset
    h = np.zeros(n)
    pos = t > 0
    tp = t[pos]
    peak = _gamma_pdf(tp, params.response_delay / params.response_dispersion,
                      params.response_dispersion)
    under = _gamma_pdf(tp, params.undershoot_delay / params.undershoot_dispersion,
                       params.undershoot_dispersion)
    h[pos] = peak - under / params.ratio
    total = h.sum()
    if total == 0:
        raise ValueError("degenerate curve: zero sum over the grid")
    return Tensor(h / total)


def hrf_from_params(params: HrfParams) -> Tensor:
    """Unit-peak response timecourse sampled at t = 0, 1, ..., 40 s.

    The double-gamma curve is built at 0.1-s resolution over 0-40 s,
    convolved with a 1-s boxcar (10 taps of 0.1, modelling the response to
    a 1-s stimulus), sampled every second, and divided by its maximum so
    the peak is exactly 1.  With onset >= 0 the first sample is exactly 0.
    """
    dg = double_gamma(params, HRF_DT, HRF_DURATION).values
    kernel = np.full(10, HRF_DT)
    conv = np.convolve(dg, kernel)[: dg.size]
    y = conv[::_HRF_SAMPLE_STEP]
    peak = float(y.max())
    if peak <= 0:
        raise ValueError("degenerate curve: no positive peak")
    return Tensor(y / peak)


_LIBRARY_SIZE = 20


def hrf_basis(k: int) -> Basis:
    """Top-k component timecourses of a 20-member response library.

    The library spans plausible timing variation: response delays equally
    spaced in [4, 9] s, undershoot delay coupled at +10 s, dispersions 1,
    ratio 6, onset 0.  Components are the right singular vectors of the
    stacked 20 x 41 library (no mean-centering).
    """
    if not (1 <= k <= _LIBRARY_SIZE):
        raise ValueError(f"k must be in [1, {_LIBRARY_SIZE}], got {k}")
    delays = np.linspace(4.0, 9.0, _LIBRARY_SIZE)
    library = np.stack(
        [
            hrf_from_params(HrfParams(d, d + 10.0, 1.0, 1.0, 6.0, 0.0)).values
            for d in delays
        ]
    )
    _, _, vt = np.linalg.svd(library, full_matrices=False)
    cols = vt[:k].T.copy()
    for j in range(cols.shape[1]):
        i = int(np.argmax(np.abs(cols[:, j])))
        if cols[i, j] < 0:
            cols[:, j] = -cols[:, j]
    return Basis(cols)


# ---------------------------------------------------------------------------
# Tuning-curve ground truth

_N_UNITS = 10
_N_CONDITIONS = 50
_N_TUNING_BASIS = 4
_TUNING_WIDTH = 6.25


def tuning_truth(rng: RngState) -> Tensor:
    """Random unit-by-condition tuning curves with exact rank 4.

    Each of 10 units responds to 50 conditions as a weighted sum of 4
    Gaussian bumps (centers equally spaced along the condition axis, width
    6.25); weights are cubed Uniform(0,1) draws.  Rows are scaled to peak
    at 1 and sorted by center of mass, neither of which changes the rank.
    """
    c = np.arange(1, _N_CONDITIONS + 1, dtype=np.float64)
    centers = _N_CONDITIONS * (np.arange(1, _N_TUNING_BASIS + 1) - 0.5) / _N_TUNING_BASIS
    bumps = np.exp(-((c[None, :] - centers[:, None]) ** 2) / (2.0 * _TUNING_WIDTH**2))
    weights = rng.uniform((_N_UNITS, _N_TUNING_BASIS)) ** 3
    curves = weights @ bumps
    curves /= curves.max(axis=1, keepdims=True)
    com = (curves * c).sum(axis=1) / curves.sum(axis=1)
    return Tensor(curves[np.argsort(com, kind="stable")])


# ---------------------------------------------------------------------------
# Anatomical phantom


@dataclass(frozen=True, eq=False)
class VolumeBundle:
    """Synthetic anatomical ground truth with its companion volumes.

    volume carries the brain mask (metrics run inside it); segmentation
    labels are 0 background, 1 gray, 2 white, 3 CSF; atlas is a degraded
    copy of the volume standing in for a population template.
    """

    volume: Tensor
    segmentation: Tensor
    atlas: Tensor

    def __post_init__(self):
        if self.volume.mask is None:
            raise ValueError("bundle volume must carry a brain mask")
        if self.segmentation.dims != self.volume.dims or self.atlas.dims != self.volume.dims:
            raise ValueError("bundle volumes must share dims")
        if (self.segmentation.values != 0).any() and not bool(
            self.volume.mask[self.segmentation.values != 0].all()
        ):
            raise ValueError("all labeled voxels must lie inside the brain mask")
        if self.volume.values.min() < 0 or self.volume.values.max() > 1400:
            raise ValueError("intensities must lie within [0, 1400]")

    @property
    def brain_mask(self) -> np.ndarray:
        return self.volume.mask


_PHANTOM_SEMI_AXES = (0.92, 0.78, 0.85)
_PHANTOM_WM_RADIUS = 0.72
_PHANTOM_CSF_RADIUS = 0.94
_PHANTOM_FOLD_AMPLITUDE = 0.05
_PHANTOM_FOLD_FREQ = (4.0, 3.5, 4.5)  # cycles across each axis
_WM_INTENSITY = 1100.0
_GM_INTENSITY = 700.0
_CSF_INTENSITY = 200.0


def phantom_bundle(n: int = 64, voxel_mm: float = 0.8) -> VolumeBundle:
    """Deterministic synthetic brain on an n^3 grid.

    Nested ellipsoids: an outer brain envelope, a thin CSF ribbon just
    inside it, a gray-matter shell, and a white-matter core whose boundary
    is perturbed by a sinusoidal radial folding term (period around 8
    voxels at n = 64) so the gray/white interface has fine structure that
    indiscriminate smoothing destroys.  The atlas is the same construction
    smoothed by a 2-voxel-FWHM Gaussian and shifted one voxel along the
    first axis, mimicking an imperfectly registered template.
    """
    if n < 32:
        raise ValueError(f"n must be >= 32, got {n}")
    if not (voxel_mm > 0):
        raise ValueError(f"voxel_mm must be > 0, got {voxel_mm}")
    coords = np.linspace(-1.0, 1.0, n)
    x, y, z = np.meshgrid(coords, coords, coords, indexing="ij")
    ax, ay, az = _PHANTOM_SEMI_AXES
    rho = np.sqrt((x / ax) ** 2 + (y / ay) ** 2 + (z / az) ** 2)
    fx, fy, fz = _PHANTOM_FOLD_FREQ
    fold = _PHANTOM_FOLD_AMPLITUDE * (
        np.sin(2 * np.pi * fx * x) * np.sin(2 * np.pi * fy * y) * np.sin(2 * np.pi * fz * z)
    )
    brain = rho <= 1.0
    wm = (rho + fold) <= _PHANTOM_WM_RADIUS
    csf = brain & (rho > _PHANTOM_CSF_RADIUS)
    gm = brain & ~wm & ~csf

    values = np.zeros((n, n, n))
    values[gm] = _GM_INTENSITY
    values[wm] = _WM_INTENSITY
    values[csf] = _CSF_INTENSITY
    seg = np.zeros((n, n, n))
    seg[gm] = 1
    seg[wm] = 2
    seg[csf] = 3

    atlas = _smooth_separable(values, 2.0 / (2.0 * math.sqrt(2.0 * math.log(2.0))))
    shifted = np.zeros_like(atlas)
    shifted[1:, :, :] = atlas[:-1, :, :]  # one-voxel registration error

    return VolumeBundle(
        volume=Tensor(values, mask=brain),
        segmentation=Tensor(seg),
        atlas=Tensor(shifted),
    )


# ---------------------------------------------------------------------------
# Figure-1-style 2x2 demo

FIGURE1_TRUTH = 2.0
FIGURE1_DRAWS = 30
FIGURE1_MEANS = (2.0, 4.0)
FIGURE1_VARIANCES = (0.3, 8.0)


@dataclass(frozen=True, eq=False)
class QuadrantRecord:
    """One cell of the 2x2 demo: the draws and their estimated moments."""

    mean: float
    variance: float
    draws: np.ndarray
    bias_estimate: float
    variance_estimate: float
    mse: float


def figure1_demo(seed: int) -> tuple[QuadrantRecord, ...]:
    """Simulate the four mean/variance quadrants against ground truth 2.

    Each quadrant draws 30 Gaussian values and records the estimated bias
    (sample mean minus truth), the population-divisor variance, and the
    MSE, which decomposes exactly as bias^2 + variance.
    """
    root = make_rng(seed)
    records = []
    qi = 0
    for variance in FIGURE1_VARIANCES:
        for mean in FIGURE1_MEANS:
            rng = root.substream(FIGURE1_STREAM, qi)
            draws = sample_gaussian(rng, mean, math.sqrt(variance), FIGURE1_DRAWS)
            dec = mse_decompose(draws, FIGURE1_TRUTH)
            records.append(
                QuadrantRecord(
                    mean=mean,
                    variance=variance,
                    draws=draws,
                    bias_estimate=float(draws.mean() - FIGURE1_TRUTH),
                    variance_estimate=dec.variance,
                    mse=dec.mse,
                )
            )
            qi += 1
    return tuple(records)


# ---------------------------------------------------------------------------
# Scenario definition and execution


@dataclass(frozen=True)
class ScenarioSpec:
    """Declarative description of one benchmark run.

    Optional fields default to the scenario's built-in configuration (see
    `scenario_defaults`).  `methods` entries are either method names
    ("svd-3", "gaussian-3mm", ...) or (name, overrides-dict) pairs.
    """

    name: str
    seed: int = 0
    m: int | None = None
    sigma: float | None = None
    noise_width: int | None = None
    methods: tuple | None = None
    phantom_n: int = 64
    voxel_mm: float = 0.8
    baseline_draws: int = 1_000_000
    out_dir: str | Path | None = None


@dataclass(frozen=True, eq=False)
class PointDiagnostics:
    """Per-point truth, mean across results, and standard error."""

    truth: np.ndarray
    mean: np.ndarray
    se: np.ndarray


@dataclass(frozen=True, eq=False)
class MethodOutcome:
    """One method's metrics on one dataset.

    variance_std is the median per-point standard deviation across results,
    the companion spread figure to the standard-error based summary value.
    """

    name: str
    params: dict
    summary: MetricSummary
    variance_std: float
    diagnostics: PointDiagnostics | None = None


@dataclass(frozen=True, eq=False)
class ScenarioReport:
    """Machine-readable outcome of one scenario run."""

    spec: ScenarioSpec
    baseline: float
    outcomes: tuple[MethodOutcome, ...]
    quadrants: tuple[QuadrantRecord, ...] | None = None
    wall_clock_s: float = 0.0

    def __post_init__(self):
        if not (self.baseline > 0):
            raise ValueError("baseline must be > 0")


_DEFAULTS = {
    "figure1": dict(m=FIGURE1_DRAWS, noise=None, methods=()),
    "anatomical": dict(
        m=10,
        noise=("iid-gaussian", 300.0, 1),
        methods=("identity", "gaussian-3mm", "atlas-prior", "diffusion-20"),
    ),
    "timecourse": dict(
        m=10,
        noise=("correlated-gaussian", 0.2, 5),
        methods=("identity", "basis-3", "parametric-fit"),
    ),
    "tuning": dict(
        m=30,
        noise=("iid-gaussian", 0.6, 1),
        methods=("identity", "boxcar-3", "svd-2", "svd-3", "svd-4", "svd-6", "svd-8"),
    ),
}

_ALLOWED_KINDS = {
    "anatomical": ("identity", "gaussian", "atlas-prior", "diffusion"),
    "timecourse": ("identity", "basis", "parametric-fit"),
    "tuning": ("identity", "boxcar", "svd"),
}

_OVERRIDE_KEYS = {
    "identity": set(),
    "atlas-prior": set(),
    "gaussian": {"fwhm_mm", "voxel_mm"},
    "diffusion": {"iterations", "tau", "presmooth_sigma", "contrast_percentile"},
    "basis": {"k"},
    "boxcar": {"width"},
    "svd": {"rank"},
    "parametric-fit": {"seed_params"},
}


def scenario_defaults(name: str) -> dict:
    """Built-in m, noise, and method list for a scenario name."""
    if name not in SCENARIO_NAMES:
        raise ConfigError(
            f"unknown scenario {name!r}; valid names: {', '.join(SCENARIO_NAMES)}"
        )
    d = _DEFAULTS[name]
    return {"m": d["m"], "noise": d["noise"], "methods": tuple(d["methods"])}


def _parse_method_name(name: str) -> tuple[str, dict]:
    if name == "identity":
        return "identity", {}
    if name == "atlas-prior":
        return "atlas-prior", {}
    if name == "parametric-fit":
        return "parametric-fit", {"seed_params": list(HRF_FIT_SEED.as_array())}
    m = re.fullmatch(r"gaussian-(\d+(?:\.\d+)?)mm", name)
    if m:
        return "gaussian", {"fwhm_mm": float(m.group(1))}
    m = re.fullmatch(r"diffusion-(\d+)", name)
    if m:
        p = DiffusionParams(iterations=int(m.group(1)))
        return "diffusion", {
            "iterations": p.iterations,
            "tau": p.tau,
            "presmooth_sigma": p.presmooth_sigma,
            "contrast_percentile": p.contrast_percentile,
        }
    m = re.fullmatch(r"basis-(\d+)", name)
    if m:
        return "basis", {"k": int(m.group(1))}
    m = re.fullmatch(r"boxcar-(\d+)", name)
    if m:
        return "boxcar", {"width": int(m.group(1))}
    m = re.fullmatch(r"svd-(\d+)", name)
    if m:
        return "svd", {"rank": int(m.group(1))}
    raise ConfigError(
        f"unknown method {name!r}; valid forms: identity, atlas-prior, "
        "parametric-fit, gaussian-<fwhm>mm, diffusion-<iterations>, "
        "basis-<k>, boxcar-<width>, svd-<rank>"
    )


@dataclass(frozen=True, eq=False)
class _Method:
    name: str
    kind: str
    params: dict
    fn: Callable[[Tensor], Tensor]


def _rowwise_boxcar(t: Tensor, width: int) -> Tensor:
    rows = [boxcar_smooth(Tensor(row), width).values for row in t.values]
    return t.with_values(np.stack(rows))


def _build_method(
    kind: str, name: str, params: dict, spec: ScenarioSpec, bundle: VolumeBundle | None
) -> _Method:
    if kind == "identity":
        fn = identity
    elif kind == "gaussian":
        fwhm = float(params["fwhm_mm"])
        voxel = float(params.get("voxel_mm", spec.voxel_mm))
        params = {"fwhm_mm": fwhm, "voxel_mm": voxel}
        fn = lambda t: gaussian_smooth_3d(t, fwhm, voxel)
    elif kind == "atlas-prior":
        atlas, seg = bundle.atlas, bundle.segmentation
        fn = lambda t: atlas_prior_average(t, atlas, seg)
    elif kind == "diffusion":
        p = DiffusionParams(
            iterations=int(params["iterations"]),
            tau=float(params["tau"]),
            presmooth_sigma=float(params["presmooth_sigma"]),
            contrast_percentile=float(params["contrast_percentile"]),
        )
        fn = lambda t: anisotropic_diffuse(t, p)
    elif kind == "basis":
        basis = hrf_basis(int(params["k"]))
        fn = lambda t: basis_restrict(t, basis)
    elif kind == "parametric-fit":
        seed_params = HrfParams(*params["seed_params"])
        params = {"seed_params": [float(v) for v in seed_params.as_array()]}
        fn = lambda t: parametric_hrf_fit(t, seed_params)
    elif kind == "boxcar":
        width = int(params["width"])
        fn = lambda t: _rowwise_boxcar(t, width)
    elif kind == "svd":
        rank = int(params["rank"])
        fn = lambda t: truncated_svd(t, rank)
    else:  # pragma: no cover - guarded by _parse_method_name
        raise ConfigError(f"unknown method kind {kind!r}")
    return _Method(name=name, kind=kind, params=params, fn=fn)


def _resolve_methods(
    spec: ScenarioSpec, bundle: VolumeBundle | None
) -> list[_Method]:
    entries = spec.methods
    if entries is None:
        entries = _DEFAULTS[spec.name]["methods"]
    allowed = _ALLOWED_KINDS[spec.name]
    methods = []
    for entry in entries:
        if isinstance(entry, str):
            name, overrides = entry, {}
        else:
            name, overrides = entry
        kind, params = _parse_method_name(name)
        if kind not in allowed:
            names = ", ".join(_DEFAULTS[spec.name]["methods"])
            raise ConfigError(
                f"method {name!r} is not valid for scenario {spec.name!r}; "
                f"defaults are: {names}"
            )
        bad = set(overrides) - _OVERRIDE_KEYS[kind]
        if bad:
            raise ConfigError(
                f"unknown parameter(s) {sorted(bad)} for method {name!r}; "
                f"allowed: {sorted(_OVERRIDE_KEYS[kind]) or 'none'}"
            )
        params.update(overrides)
        methods.append(_build_method(kind, name, params, spec, bundle))
    return methods


def _build_truth(spec: ScenarioSpec) -> tuple[Tensor, VolumeBundle | None]:
    if spec.name == "anatomical":
        bundle = phantom_bundle(spec.phantom_n, spec.voxel_mm)
        return bundle.volume, bundle
    if spec.name == "timecourse":
        return hrf_from_params(HRF_TRUTH_PARAMS), None
    if spec.name == "tuning":
        return tuning_truth(make_rng(spec.seed).substream(TRUTH_STREAM)), None
    raise ConfigError(f"scenario {spec.name!r} has no measurement truth")


def _noise_for(spec: ScenarioSpec) -> NoiseSpec:
    kind, sigma, width = _DEFAULTS[spec.name]["noise"]
    if spec.sigma is not None:
        sigma = spec.sigma
    if spec.noise_width is not None:
        width = spec.noise_width
        kind = "correlated-gaussian" if width > 1 else kind
    return NoiseSpec(kind=kind, sigma=float(sigma), boxcar_width=int(width))


def _apply_methods(
    dataset: Dataset, methods: Sequence[_Method], workers: int
) -> dict[str, list[Tensor]]:
    tasks = [
        (mi, ki) for ki in range(len(methods)) for mi in range(dataset.m)
    ]
    results: dict[tuple[int, int], Tensor] = {}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(methods[ki].fn, dataset.measurements[mi]): (mi, ki)
                for mi, ki in tasks
            }
            for fut, key in futures.items():
                results[key] = fut.result()
    else:
        for mi, ki in tasks:
            results[(mi, ki)] = methods[ki].fn(dataset.measurements[mi])
    return {
        method.name: [results[(mi, ki)] for mi in range(dataset.m)]
        for ki, method in enumerate(methods)
    }


def run_scenario(
    spec: ScenarioSpec, workers: int = 1, include_diagnostics: bool = False
) -> ScenarioReport:
    """Execute one scenario end to end and return its report.

    Builds the ground truth, generates the measurements from per-index
    noise substreams, applies each method to each measurement
    independently (optionally across `workers` threads; the outcome does
    not depend on the worker count), reduces to per-method metrics, and
    appends the Monte Carlo unbiased baseline for the measurement count.
    If spec.out_dir is set the report is also written to disk.
    """
    if spec.name not in SCENARIO_NAMES:
        raise ConfigError(
            f"unknown scenario {spec.name!r}; valid names: {', '.join(SCENARIO_NAMES)}"
        )
    t0 = time.perf_counter()
    baseline_rng = make_rng(spec.seed).substream(BASELINE_STREAM)

    if spec.name == "figure1":
        if spec.methods:
            raise ConfigError("the figure1 scenario takes no denoising methods")
        quadrants = figure1_demo(spec.seed)
        baseline = unbiased_baseline(FIGURE1_DRAWS, spec.baseline_draws, baseline_rng)
        report = ScenarioReport(
            spec=spec,
            baseline=baseline,
            outcomes=(),
            quadrants=quadrants,
            wall_clock_s=time.perf_counter() - t0,
        )
    else:
        m = spec.m if spec.m is not None else _DEFAULTS[spec.name]["m"]
        if m < 2:
            raise ConfigError(f"m must be >= 2, got {m}")
        truth, bundle = _build_truth(spec)
        noise = _noise_for(spec)
        methods = _resolve_methods(spec, bundle)
        dataset = generate_measurements(truth, noise, m, spec.seed)
        outputs = _apply_methods(dataset, methods, workers)
        outcomes = []
        for method in methods:
            outs = outputs[method.name]
            summary = metrics.summarize(outs, truth)
            diag = None
            if include_diagnostics:
                stacked = np.stack([t.masked_values() for t in outs])
                diag = PointDiagnostics(
                    truth=truth.masked_values(),
                    mean=stacked.mean(axis=0),
                    se=stacked.std(axis=0, ddof=1) / math.sqrt(len(outs)),
                )
            outcomes.append(
                MethodOutcome(
                    name=method.name,
                    params=dict(method.params),
                    summary=summary,
                    variance_std=metrics.median_point_std(outs),
                    diagnostics=diag,
                )
            )
        baseline = unbiased_baseline(m, spec.baseline_draws, baseline_rng)
        report = ScenarioReport(
            spec=spec,
            baseline=baseline,
            outcomes=tuple(outcomes),
            quadrants=None,
            wall_clock_s=time.perf_counter() - t0,
        )

    if spec.out_dir is not None:
        from . import io as dgio  # deferred: io depends on this module's types

        dgio.write_report(report, Path(spec.out_dir))
    return report
