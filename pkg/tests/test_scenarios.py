import numpy as np
import pytest

from dgauge.core import TRUTH_STREAM, make_rng
from dgauge.errors import ConfigError
from dgauge.io import report_to_dict
from dgauge.metrics import mse_decompose, pearson
from dgauge.scenarios import (
    HRF_TRUTH_PARAMS,
    HrfParams,
    ScenarioSpec,
    double_gamma,
    figure1_demo,
    hrf_basis,
    hrf_from_params,
    phantom_bundle,
    run_scenario,
    tuning_truth,
)


class TestDoubleGamma:
    def test_positive_lobe_peaks_at_five_seconds(self):
        # gamma density mode: (shape-1)*scale = (6/1 - 1)*1 = 5
        curve = double_gamma(HRF_TRUTH_PARAMS, 0.1, 40.0)
        assert np.argmax(curve.values) * 0.1 == pytest.approx(5.0, abs=0.1)

    def test_huge_ratio_removes_undershoot(self):
        params = HrfParams(6, 16, 1, 1, 1e9, 0)
        curve = double_gamma(params, 0.1, 40.0)
        assert curve.values.min() > -1e-8

    def test_unit_sum(self):
        curve = double_gamma(HrfParams(6, 16, 1, 1, 6, 0), 0.1, 40.0)
        assert curve.values.sum() == pytest.approx(1.0, abs=1e-12)

    def test_invalid_params_rejected(self):
        with pytest.raises(ValueError):
            HrfParams(-1, 16, 1, 1, 6, 0)
        with pytest.raises(ValueError):
            HrfParams(6, 16, 1, 1, 0, 0)
        with pytest.raises(ValueError):
            double_gamma(HRF_TRUTH_PARAMS, 0.0, 40.0)

    def test_onset_shifts_grid(self):
        a = double_gamma(HrfParams(6, 16, 1, 1, 2, 0), 0.1, 40.0)
        b = double_gamma(HrfParams(6, 16, 1, 1, 2, 3.0), 0.1, 40.0)
        assert np.argmax(b.values) == np.argmax(a.values) + 30
        assert b.values[: 30] == pytest.approx(0.0, abs=1e-15)


class TestHrfFromParams:
    def test_peak_is_exactly_one(self):
        assert hrf_from_params(HRF_TRUTH_PARAMS).values.max() == 1.0

    def test_first_sample_is_exactly_zero(self):
        assert hrf_from_params(HRF_TRUTH_PARAMS).values[0] == 0.0

    def test_strong_undershoot_present(self):
        assert hrf_from_params(HRF_TRUTH_PARAMS).values.min() < 0.0

    def test_grid_is_41_one_second_samples(self):
        assert hrf_from_params(HRF_TRUTH_PARAMS).dims == (41,)


class TestHrfBasis:
    def test_columns_orthonormal(self):
        for k in (1, 3, 8):
            b = hrf_basis(k)
            gram = b.columns.T @ b.columns
            assert np.abs(gram - np.eye(k)).max() < 1e-10

    def test_full_basis_reproduces_library(self):
        b = hrf_basis(20)
        proj = b.columns @ b.columns.T
        for delay in np.linspace(4.0, 9.0, 20):
            member = hrf_from_params(HrfParams(delay, delay + 10, 1, 1, 6, 0)).values
            assert np.abs(proj @ member - member).max() < 1e-8

    def test_k_bounds(self):
        with pytest.raises(ValueError):
            hrf_basis(0)
        with pytest.raises(ValueError):
            hrf_basis(21)


class TestTuningTruth:
    def test_exact_rank_four(self):
        for seed in (0, 5, 99):
            t = tuning_truth(make_rng(seed).substream(TRUTH_STREAM))
            s = np.linalg.svd(t.values, compute_uv=False)
            assert s[4] / s[0] < 1e-10
            assert s[3] / s[0] > 1e-6

    def test_every_row_peaks_at_one(self):
        t = tuning_truth(make_rng(3).substream(TRUTH_STREAM))
        assert np.allclose(t.values.max(axis=1), 1.0)

    def test_rows_sorted_by_center_of_mass(self):
        t = tuning_truth(make_rng(4).substream(TRUTH_STREAM))
        c = np.arange(1, 51, dtype=float)
        com = (t.values * c).sum(axis=1) / t.values.sum(axis=1)
        assert np.all(np.diff(com) >= 0)

    def test_shape(self):
        assert tuning_truth(make_rng(0)).dims == (10, 50)


class TestPhantom:
    def test_intensity_range(self):
        vb = phantom_bundle(32)
        assert vb.volume.values.min() >= 0.0
        assert vb.volume.values.max() <= 1400.0

    def test_tissue_contrast(self):
        vb = phantom_bundle(48)
        gm = vb.segmentation.values == 1
        wm = vb.segmentation.values == 2
        assert gm.sum() > 0 and wm.sum() > 0
        assert abs(vb.volume.values[wm].mean() - vb.volume.values[gm].mean()) >= 200.0

    def test_atlas_close_but_not_equal(self):
        vb = phantom_bundle(48)
        mask = vb.brain_mask
        assert not np.array_equal(vb.atlas.values, vb.volume.values)
        assert pearson(vb.atlas.values[mask], vb.volume.values[mask]) > 0.8

    def test_labels_inside_mask(self):
        vb = phantom_bundle(32)
        labeled = vb.segmentation.values != 0
        assert vb.brain_mask[labeled].all()

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            phantom_bundle(31)

    def test_deterministic(self):
        a = phantom_bundle(32)
        b = phantom_bundle(32)
        assert np.array_equal(a.volume.values, b.volume.values)
        assert np.array_equal(a.atlas.values, b.atlas.values)


class TestFigure1:
    def test_quadrant_layout(self):
        recs = figure1_demo(0)
        assert [(q.mean, q.variance) for q in recs] == [
            (2.0, 0.3), (4.0, 0.3), (2.0, 8.0), (4.0, 8.0)
        ]
        assert all(q.draws.size == 30 for q in recs)

    def test_mse_bands(self):
        # 30-draw sampling bands around bias^2 + variance
        recs = figure1_demo(12)
        assert 0.1 <= recs[0].mse <= 0.7  # unbiased, low variance: ~0.3
        assert 3.0 <= recs[1].mse <= 6.0  # biased, low variance: ~4.3

    def test_decomposition_identity_per_quadrant(self):
        for q in figure1_demo(5):
            d = mse_decompose(q.draws, 2.0)
            assert abs(d.mse - (d.bias_sq + d.variance)) / d.mse < 1e-9

    def test_deterministic(self):
        a, b = figure1_demo(9), figure1_demo(9)
        for qa, qb in zip(a, b):
            assert np.array_equal(qa.draws, qb.draws)


class TestRunScenario:
    def test_tuning_defaults_produce_seven_methods(self):
        rep = run_scenario(ScenarioSpec(name="tuning", seed=1, baseline_draws=20_000))
        assert [o.name for o in rep.outcomes] == [
            "identity", "boxcar-3", "svd-2", "svd-3", "svd-4", "svd-6", "svd-8"
        ]
        assert all(o.summary.m == 30 for o in rep.outcomes)

    def test_anatomical_defaults_produce_four_methods(self):
        rep = run_scenario(
            ScenarioSpec(name="anatomical", seed=0, phantom_n=32, baseline_draws=20_000)
        )
        assert [o.name for o in rep.outcomes] == [
            "identity", "gaussian-3mm", "atlas-prior", "diffusion-20"
        ]

    def test_anatomical_metrics_masked_to_brain(self):
        spec = ScenarioSpec(
            name="anatomical", seed=0, phantom_n=32,
            methods=("identity",), baseline_draws=20_000,
        )
        rep = run_scenario(spec, include_diagnostics=True)
        n_brain = int(phantom_bundle(32).brain_mask.sum())
        assert rep.outcomes[0].diagnostics.truth.size == n_brain

    def test_identity_bias_in_unbiased_band(self):
        for name, kwargs in (
            ("timecourse", {}),
            ("tuning", {}),
            ("anatomical", {"phantom_n": 32}),
        ):
            rep = run_scenario(
                ScenarioSpec(name=name, seed=2, baseline_draws=20_000, **kwargs)
            )
            identity = rep.outcomes[0].summary
            assert 0.5 <= identity.bias <= 0.9, name

    def test_atlas_prior_tradeoff_at_defaults(self):
        spec = ScenarioSpec(
            name="anatomical", seed=3,
            methods=("identity", "atlas-prior"), baseline_draws=50_000,
        )
        rep = run_scenario(spec)
        ident, atlas = rep.outcomes
        assert atlas.summary.variance < ident.summary.variance
        assert atlas.summary.bias > rep.baseline

    def test_smoothers_reduce_variance_on_tuning(self):
        rep = run_scenario(ScenarioSpec(name="tuning", seed=4, baseline_draws=20_000))
        ident = rep.outcomes[0].summary.variance
        for o in rep.outcomes[1:]:
            assert o.summary.variance < ident, o.name

    def test_unknown_method_is_config_error_listing_names(self):
        spec = ScenarioSpec(name="tuning", seed=0, methods=("sparkle",))
        with pytest.raises(ConfigError, match="identity"):
            run_scenario(spec)

    def test_method_scenario_mismatch_rejected(self):
        spec = ScenarioSpec(name="tuning", seed=0, methods=("gaussian-3mm",))
        with pytest.raises(ConfigError, match="tuning"):
            run_scenario(spec)

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ConfigError, match="figure1"):
            run_scenario(ScenarioSpec(name="bogus"))

    def test_method_override_params(self):
        spec = ScenarioSpec(
            name="tuning", seed=1,
            methods=("identity", ("boxcar-3", {"width": 5})),
            baseline_draws=20_000,
        )
        rep = run_scenario(spec)
        assert rep.outcomes[1].params["width"] == 5

    def test_bad_override_key_rejected(self):
        spec = ScenarioSpec(
            name="tuning", seed=1, methods=(("svd-2", {"sigma": 1.0}),)
        )
        with pytest.raises(ConfigError, match="sigma"):
            run_scenario(spec)

    def test_figure1_scenario_report(self):
        rep = run_scenario(ScenarioSpec(name="figure1", seed=0, baseline_draws=20_000))
        assert rep.outcomes == ()
        assert len(rep.quadrants) == 4
        assert rep.baseline > 0

    def test_figure1_rejects_methods(self):
        with pytest.raises(ConfigError):
            run_scenario(ScenarioSpec(name="figure1", methods=("identity",)))

    def test_deterministic_report(self):
        spec = ScenarioSpec(name="timecourse", seed=5, baseline_draws=20_000)
        a = run_scenario(spec)
        b = run_scenario(spec)
        assert report_to_dict(a) == report_to_dict(b)

    def test_workers_do_not_change_results(self):
        spec = ScenarioSpec(name="tuning", seed=6, baseline_draws=20_000)
        a = run_scenario(spec, workers=1)
        b = run_scenario(spec, workers=8)
        assert report_to_dict(a) == report_to_dict(b)

    def test_parametric_fit_skips_time_zero(self):
        rep = run_scenario(ScenarioSpec(name="timecourse", seed=1, baseline_draws=20_000))
        fit = {o.name: o for o in rep.outcomes}["parametric-fit"]
        assert fit.summary.skipped_points == 1

    def test_m_override(self):
        rep = run_scenario(ScenarioSpec(name="tuning", seed=0, m=5, baseline_draws=20_000))
        assert all(o.summary.m == 5 for o in rep.outcomes)
        with pytest.raises(ConfigError):
            run_scenario(ScenarioSpec(name="tuning", seed=0, m=1))
