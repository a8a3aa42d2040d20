"""dgauge: quantify bias, variance, and ground-truth error of denoising methods.

The package simulates ground-truth data, corrupts it with seeded noise,
applies denoising methods independently to each noisy measurement, and
scores each method with three metrics: studentized bias against ground
truth, variance across repeated measurements, and correlation with ground
truth.  A Monte Carlo baseline gives the bias value expected from a
perfectly unbiased method, and `metrics.mse_decompose` carries the exact
identity MSE = BIAS^2 + VARIANCE.
"""

from .core import (
    Dataset,
    NoiseSpec,
    RngState,
    Tensor,
    add_correlated_noise,
    add_iid_noise,
    generate_measurements,
    make_rng,
    sample_gaussian,
)
from .denoise import (
    Basis,
    DiffusionParams,
    SvdFactors,
    anisotropic_diffuse,
    atlas_prior_average,
    basis_restrict,
    boxcar_smooth,
    gaussian_smooth_3d,
    identity,
    parametric_hrf_fit,
    svd_factors,
    truncated_svd,
)
from .errors import ConfigError, FormatError
from .metrics import (
    MetricSummary,
    MseDecomposition,
    bias_metric,
    error_metric,
    mse_decompose,
    pearson,
    summarize,
    unbiased_baseline,
    variance_metric,
)
from .optim import LsqProblem, LsqSolution, numeric_jacobian, solve_lsq
from .scenarios import (
    HRF_FIT_SEED,
    HRF_TRUTH_PARAMS,
    SCENARIO_NAMES,
    HrfParams,
    MethodOutcome,
    QuadrantRecord,
    ScenarioReport,
    ScenarioSpec,
    VolumeBundle,
    double_gamma,
    figure1_demo,
    hrf_basis,
    hrf_from_params,
    phantom_bundle,
    run_scenario,
    tuning_truth,
)

__version__ = "0.1.0"
