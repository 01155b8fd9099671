"""Analyzer sweeps, loss budgets and regime classification."""

import math

import numpy as np
import pytest

from weakshift import (
    DEFAULT_LOSS_THRESHOLD_DB,
    GAUSSIAN_TAG,
    HIGH_LOSS_TAG,
    LOW_LOSS_TAG,
    NUMERIC_TAG,
    GaussianPulse,
    InfeasibleBudget,
    SweepResult,
    WorkingPoint,
    as_spectrum,
    classify_regime,
    delta_f_gaussian,
    gamma_sweep,
    interference_phase,
    loss_gaussian,
    max_shift_at_loss_budget,
    minimum_loss_db,
)

SHORT = GaussianPulse(nu0_thz=193.44, tau_fs=10.0)
LONG = GaussianPulse(nu0_thz=193.44, tau_fs=320.0)


class TestClassifyRegime:
    def test_threshold_inclusive(self):
        assert classify_regime(11.9) == LOW_LOSS_TAG
        assert classify_regime(DEFAULT_LOSS_THRESHOLD_DB) == LOW_LOSS_TAG
        assert classify_regime(12.0 + 1e-9) == HIGH_LOSS_TAG

    def test_accepts_working_point(self):
        point = WorkingPoint(0.0, 0.1, 20.0, HIGH_LOSS_TAG)
        assert classify_regime(point) == HIGH_LOSS_TAG
        assert classify_regime(point, threshold_db=25.0) == LOW_LOSS_TAG

    def test_custom_threshold(self):
        assert classify_regime(5.0, threshold_db=3.0) == HIGH_LOSS_TAG

    def test_rejects_non_finite_threshold(self):
        with pytest.raises(ValueError):
            classify_regime(5.0, threshold_db=math.nan)


class TestContainers:
    def test_working_point_validation(self):
        with pytest.raises(ValueError):
            WorkingPoint(0.0, 0.1, -1.0, LOW_LOSS_TAG)
        with pytest.raises(ValueError):
            WorkingPoint(0.0, 0.1, 1.0, "medium")

    def test_sweep_result_validation(self):
        g = np.linspace(0.0, 1.0, 5)
        z = np.zeros(5)
        flags = np.zeros(5, dtype=bool)
        with pytest.raises(ValueError):
            SweepResult(g, z[:4], z, flags, GAUSSIAN_TAG)
        with pytest.raises(ValueError):
            SweepResult(g[::-1], z, z, flags, GAUSSIAN_TAG)
        with pytest.raises(ValueError):
            SweepResult(g, z, z, flags, "other")

    def test_sweep_result_read_only(self):
        sweep = gamma_sweep(SHORT, 0.01, n=11)
        with pytest.raises(ValueError):
            sweep.shifts_thz[0] = 1.0


class TestGammaSweep:
    def test_gaussian_sweep_matches_scalars(self):
        sweep = gamma_sweep(SHORT, 22.0, gamma_range=(-1.0, 2.0), n=31)
        assert sweep.model_tag == GAUSSIAN_TAG
        assert sweep.gammas_rad[0] == -1.0
        assert sweep.gammas_rad[-1] == 2.0
        assert sweep.gammas_rad.size == 31
        for i in (0, 10, 30):
            g = sweep.gammas_rad[i]
            assert sweep.shifts_thz[i] == pytest.approx(
                delta_f_gaussian(SHORT, 22.0, g), rel=1e-14
            )
            assert sweep.losses_db[i] == pytest.approx(
                loss_gaussian(SHORT, 22.0, g), rel=1e-14
            )

    def test_numeric_sweep_matches_gaussian(self):
        numeric = gamma_sweep(as_spectrum(LONG), 53.0, n=61)
        closed = gamma_sweep(LONG, 53.0, n=61)
        assert numeric.model_tag == NUMERIC_TAG
        assert np.allclose(numeric.shifts_thz, closed.shifts_thz, rtol=1e-6)
        assert np.allclose(numeric.losses_db, closed.losses_db, rtol=1e-6)

    def test_flags_singular_angles(self):
        # at T = 0 the analyzer angle +pi/2 extinguishes the output
        sweep = gamma_sweep(SHORT, 0.0, gamma_range=(-math.pi, math.pi), n=5)
        assert list(sweep.singular) == [False, False, False, True, False]
        assert math.isnan(sweep.shifts_thz[3])
        assert sweep.losses_db[3] == math.inf

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            gamma_sweep(SHORT, 1.0, gamma_range=(2.0, 1.0))
        with pytest.raises(ValueError):
            gamma_sweep(SHORT, 1.0, n=1)
        with pytest.raises(TypeError):
            gamma_sweep("pulse", 1.0)


class TestMinimumLoss:
    def test_gaussian_oracle(self):
        assert minimum_loss_db(LONG, 53.0) == pytest.approx(
            0.0410924685583, rel=1e-10
        )
        assert minimum_loss_db(SHORT, 0.01) == pytest.approx(
            1.50514971749729e-06, rel=1e-10
        )

    def test_zero_delay_is_lossless(self):
        assert minimum_loss_db(SHORT, 0.0) == 0.0

    def test_numeric_matches_gaussian(self):
        numeric = minimum_loss_db(as_spectrum(LONG), 53.0)
        assert numeric == pytest.approx(minimum_loss_db(LONG, 53.0), rel=1e-6)


class TestMaxShiftAtLossBudget:
    def test_unconstrained_optimum_oracle(self):
        point = max_shift_at_loss_budget(SHORT, 0.01, math.inf)
        assert abs(point.shift_thz) == pytest.approx(18.7390560185, rel=1e-9)
        assert point.loss_db == pytest.approx(61.5917483998, rel=1e-9)
        assert point.regime_tag == HIGH_LOSS_TAG

    def test_budget_point_oracle(self):
        point = max_shift_at_loss_budget(SHORT, 0.01, 12.0)
        assert abs(point.shift_thz) == pytest.approx(0.08502016107, rel=1e-8)
        assert point.loss_db == pytest.approx(12.0, abs=1e-9)
        assert point.regime_tag == LOW_LOSS_TAG

    def test_wide_pulse_unconstrained_oracle(self):
        point = max_shift_at_loss_budget(LONG, 53.0, math.inf)
        assert abs(point.shift_thz) == pytest.approx(0.58003730227, rel=1e-9)

    def test_budget_beyond_peak_loss_returns_peak(self):
        peak = max_shift_at_loss_budget(LONG, 53.0, math.inf)
        capped = max_shift_at_loss_budget(LONG, 53.0, peak.loss_db + 1.0)
        assert capped.shift_thz == pytest.approx(peak.shift_thz, rel=1e-12)
        assert capped.loss_db <= peak.loss_db + 1.0

    def test_shift_monotone_in_budget(self):
        budgets = [0.5, 1.0, 3.0, 6.0, 12.0, 20.0, 40.0, 70.0]
        mags = [
            abs(max_shift_at_loss_budget(SHORT, 0.01, b).shift_thz) for b in budgets
        ]
        assert all(b >= a for a, b in zip(mags, mags[1:]))

    def test_loss_never_exceeds_budget(self):
        for budget in (0.5, 3.0, 12.0, 18.0):
            point = max_shift_at_loss_budget(LONG, 53.0, budget)
            assert point.loss_db <= budget + 1e-9

    def test_infeasible_budget_raises(self):
        min_loss = minimum_loss_db(LONG, 53.0)
        with pytest.raises(InfeasibleBudget):
            max_shift_at_loss_budget(LONG, 53.0, 0.5 * min_loss)
        with pytest.raises(InfeasibleBudget):
            max_shift_at_loss_budget(LONG, 53.0, min_loss)

    def test_numeric_matches_gaussian(self):
        spectrum = as_spectrum(LONG)

        def wrapped_theta(gamma):
            theta = interference_phase(193.44, 53.0, gamma)
            return math.atan2(math.sin(theta), math.cos(theta))

        for budget in (3.0, 12.0, math.inf):
            num = max_shift_at_loss_budget(spectrum, 53.0, budget)
            ref = max_shift_at_loss_budget(LONG, 53.0, budget)
            assert abs(num.shift_thz) == pytest.approx(abs(ref.shift_thz), rel=1e-5)
            assert num.loss_db == pytest.approx(ref.loss_db, rel=1e-5, abs=1e-7)
            # the (mirror-symmetric) working-point angles coincide in |theta|
            assert abs(wrapped_theta(num.gamma_rad)) == pytest.approx(
                abs(wrapped_theta(ref.gamma_rad)), abs=1e-4
            )

    def test_rejects_unknown_model(self):
        with pytest.raises(TypeError):
            max_shift_at_loss_budget(3.5, 1.0, 12.0)
