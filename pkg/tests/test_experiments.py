"""Stress-relaxation and creep experiment drivers."""

import math

import numpy as np
import pytest

from fracvisco.experiments import (
    CurveShape,
    ExperimentConfig,
    SampledSignal,
    classify_curve,
    compare_methods,
    creep,
    regularized_heaviside,
    regularized_heaviside_deriv,
    run_experiment,
    settle_time,
    stress_relaxation,
)
from fracvisco.thermo import ModelParams

P04 = ModelParams(0.8, 0.1, 0.4, 0.4)


def relax_config(**kwargs) -> ExperimentConfig:
    base = dict(
        params=P04, experiment="relaxation", method="direct", t_max=2.0, steps=200
    )
    base.update(kwargs)
    return ExperimentConfig(**base)


def creep_config(**kwargs) -> ExperimentConfig:
    base = dict(
        params=P04, experiment="creep", method="convolution", t_max=50.0, steps=500
    )
    base.update(kwargs)
    return ExperimentConfig(**base)


class TestConfigValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(experiment="shear"),
            dict(method="post"),  # not a relaxation method
            dict(method="bogus"),
            dict(t_max=0.0),
            dict(t_max=-1.0),
            dict(steps=9),
            dict(k_reg=0.0),
            dict(n_expansion=0),
            dict(tol=0.0),
        ],
    )
    def test_bad_relaxation_configs(self, kwargs):
        with pytest.raises(ValueError):
            relax_config(**kwargs)

    @pytest.mark.parametrize(
        "kwargs", [dict(method="direct"), dict(post_n=0)]
    )
    def test_bad_creep_configs(self, kwargs):
        with pytest.raises(ValueError):
            creep_config(**kwargs)

    def test_default_term_counts(self):
        assert relax_config().resolved_n == 100
        assert creep_config(method="expansion").resolved_n == 7
        assert relax_config(n_expansion=40).resolved_n == 40

    def test_grid(self):
        grid = relax_config(t_max=1.0, steps=10).grid
        assert grid.shape == (11,)
        assert grid[0] == 0.0 and grid[-1] == 1.0


class TestSampledSignal:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            SampledSignal(np.zeros((2, 2)), np.zeros((2, 2)))
        with pytest.raises(ValueError):
            SampledSignal(np.zeros(3), np.zeros(4))


class TestRegularizedStep:
    def test_limits(self):
        k = 0.01
        assert regularized_heaviside(0.0, k) == 0.0
        assert regularized_heaviside(10.0, k) == pytest.approx(1.0, abs=1e-12)

    def test_monotone(self):
        t = np.linspace(0.0, 0.2, 300)
        vals = regularized_heaviside(t, 0.01)
        assert np.all(np.diff(vals) > 0.0)

    def test_derivative_matches_finite_difference(self):
        k, h = 0.02, 1e-7
        for t in (0.005, 0.02, 0.1):
            fd = (
                regularized_heaviside(t + h, k) - regularized_heaviside(t - h, k)
            ) / (2.0 * h)
            assert regularized_heaviside_deriv(t, k) == pytest.approx(fd, rel=1e-6)


class TestClassifyCurve:
    def test_rising_curve_is_monotonic(self):
        t = np.linspace(0.0, 1.0, 50)
        shape = classify_curve(SampledSignal(t, 1.0 - np.exp(-3.0 * t)))
        assert shape.kind == "monotonic"
        assert shape.sign_changes == 0
        assert shape.final_value == pytest.approx(1.0 - math.exp(-3.0))

    def test_damped_oscillation_detected(self):
        t = np.linspace(0.0, 10.0, 400)
        vals = 1.0 - np.exp(-0.3 * t) * np.cos(3.0 * t)
        shape = classify_curve(SampledSignal(t, vals))
        assert shape.kind == "oscillatory"
        assert shape.sign_changes >= 2
        assert shape.max_value > 1.0

    def test_roundoff_jitter_still_monotonic(self):
        t = np.linspace(0.0, 1.0, 50)
        vals = np.ones(50) + 1e-12 * np.sin(40.0 * t)
        assert classify_curve(SampledSignal(t, vals)).kind == "monotonic"


class TestSettleTime:
    def test_known_entry_point(self):
        t = np.linspace(0.0, 10.0, 1001)
        vals = 1.0 + np.exp(-t)
        sig = SampledSignal(t, vals)
        # |v - 1| <= 0.05 from t = ln 20 on
        got = settle_time(sig, 1.0, 0.05)
        assert got == pytest.approx(math.log(20.0), abs=0.02)

    def test_unsettled_signal_returns_inf(self):
        t = np.linspace(0.0, 10.0, 101)
        sig = SampledSignal(t, 2.0 + np.sin(t))
        assert settle_time(sig, 1.0, 0.05) == math.inf

    def test_final_sample_outside_band_returns_inf(self):
        t = np.linspace(0.0, 1.0, 11)
        vals = np.ones(11)
        vals[-1] = 2.0
        assert settle_time(SampledSignal(t, vals), 1.0, 0.05) == math.inf


class TestStressRelaxation:
    def test_direct_reference_value(self):
        sig = run_experiment(relax_config())
        assert sig.t[0] == 0.0 and sig.values[0] == 0.0
        assert sig.values[-1] == pytest.approx(1.4987853832552025, rel=1e-9)

    def test_expansion_agrees_with_direct(self):
        direct = run_experiment(relax_config())
        series = run_experiment(relax_config(method="expansion"))
        assert series.values[-1] == pytest.approx(1.4988101316794138, rel=1e-9)
        mask = direct.t >= 0.05
        rel = np.abs(series.values[mask] - direct.values[mask]) / np.abs(
            direct.values[mask]
        )
        assert rel.max() < 1e-3

    def test_entry_points_agree(self):
        cfg = relax_config(steps=40, t_max=0.5)
        a = stress_relaxation(cfg)
        b = run_experiment(cfg)
        assert np.allclose(a.values, b.values)


class TestCreep:
    def test_convolution_reference_value(self):
        sig = run_experiment(creep_config())
        assert sig.values[0] == 0.0
        assert sig.values[-1] == pytest.approx(0.9064097417214676, rel=1e-9)
        assert classify_curve(sig).kind == "monotonic"

    def test_post_agrees(self):
        sig = run_experiment(creep_config(method="post", steps=50))
        assert sig.values[-1] == pytest.approx(0.9068946013333314, rel=1e-9)

    def test_expansion_agrees(self):
        sig = run_experiment(creep_config(method="expansion"))
        assert sig.values[-1] == pytest.approx(0.9081413934035573, rel=1e-9)

    def test_three_methods_pairwise_close(self):
        conv = run_experiment(creep_config()).values[-1]
        post = run_experiment(creep_config(method="post", steps=50)).values[-1]
        series = run_experiment(creep_config(method="expansion")).values[-1]
        for x, y in ((conv, post), (conv, series), (post, series)):
            assert abs(x - y) / abs(y) < 5e-3

    def test_entry_points_agree(self):
        cfg = creep_config(method="post", steps=20, t_max=10.0)
        a = creep(cfg)
        b = run_experiment(cfg)
        assert np.allclose(a.values, b.values)


class TestCompareMethods:
    def test_identical_configs_have_zero_deviation(self):
        cfg = relax_config(steps=50, t_max=0.5)
        cmp = compare_methods(cfg, cfg)
        assert cmp.max_rel_diff == 0.0

    def test_direct_vs_expansion_relaxation(self):
        cmp = compare_methods(
            relax_config(steps=50, t_max=0.5),
            relax_config(steps=50, t_max=0.5, method="expansion"),
            t_min=0.05,
        )
        assert 0.0 < cmp.max_rel_diff < 0.05
        assert 0.05 <= cmp.at_time <= 0.5
        assert cmp.signal_a.values.shape == cmp.signal_b.values.shape

    def test_grid_mismatch_rejected(self):
        with pytest.raises(ValueError):
            compare_methods(
                relax_config(steps=50, t_max=0.5), relax_config(steps=60, t_max=0.5)
            )

    def test_floor_replaces_tiny_denominators(self):
        cfg_a = creep_config(steps=20, t_max=1.0, method="post")
        cfg_b = creep_config(steps=20, t_max=1.0, method="post", post_n=10)
        tight = compare_methods(cfg_a, cfg_b, floor=1e-12)
        floored = compare_methods(cfg_a, cfg_b, floor=100.0)
        assert floored.max_rel_diff < tight.max_rel_diff
        # a floor above every sample turns the measure into |a - b| / floor
        diff = np.abs(tight.signal_a.values - tight.signal_b.values)[1:]
        assert floored.max_rel_diff == pytest.approx(diff.max() / 100.0, rel=1e-12)
