"""scikit-learn protocol adoption by the delay estimator."""

import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from weakshift import (
    DelayEstimator,
    GaussianPulse,
    default_grid,
    gaussian_observables_batch,
    gaussian_spectrum,
)

PULSE = GaussianPulse(nu0_thz=193.44, tau_fs=100.0)
ANGLES = np.linspace(-math.pi, math.pi, 30, endpoint=False)
BRACKET = dict(t_min_fs=50.4, t_max_fs=55.6)


def make_data(t_true=53.0, with_loss=True, angle_offset=0.0):
    shifts, losses, _ = gaussian_observables_batch(PULSE, t_true, ANGLES + angle_offset)
    if with_loss:
        return ANGLES.copy(), np.column_stack([shifts, losses])
    return ANGLES.copy(), shifts


class TestParams:
    def test_get_set_params_round_trip(self):
        est = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, **BRACKET)
        params = est.get_params()
        assert params["nu0_thz"] == 193.44
        assert params["tau_fs"] == 100.0
        assert params["t_min_fs"] == 50.4
        assert params["fit_gamma_offset"] is False

        other = DelayEstimator().set_params(**params)
        assert other.get_params() == params

    def test_clone_copies_params_and_drops_state(self):
        X, y = make_data()
        est = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, **BRACKET).fit(X, y)
        fresh = clone(est)
        assert fresh.get_params() == est.get_params()
        assert not hasattr(fresh, "delay_fs_")


class TestFitPredict:
    def test_fit_returns_self_and_recovers_delay(self):
        X, y = make_data()
        est = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, **BRACKET)
        assert est.fit(X, y) is est
        assert abs(est.delay_fs_ - 53.0) < 1.0e-3
        assert est.converged_
        assert est.n_iter_ >= 1
        assert est.gamma_offset_rad_ == 0.0
        assert est.result_.t_hat_fs == est.delay_fs_
        assert est.residual_norm_ == est.result_.residual_norm

    def test_shift_only_target_vector(self):
        X, y = make_data(with_loss=False)
        est = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, **BRACKET).fit(X, y)
        assert abs(est.delay_fs_ - 53.0) < 1.0e-3

    def test_column_vector_X_is_equivalent(self):
        X, y = make_data()
        flat = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, **BRACKET).fit(X, y)
        column = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, **BRACKET).fit(
            X.reshape(-1, 1), y
        )
        assert column.delay_fs_ == flat.delay_fs_

    def test_predict_matches_fitted_model(self):
        X, y = make_data()
        est = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, **BRACKET).fit(X, y)
        predicted = est.predict(X)
        expected, _, _ = gaussian_observables_batch(PULSE, est.delay_fs_, ANGLES)
        np.testing.assert_allclose(predicted, expected, rtol=1.0e-12)

    def test_predict_before_fit_raises(self):
        est = DelayEstimator(nu0_thz=193.44, tau_fs=100.0)
        with pytest.raises(NotFittedError):
            est.predict(ANGLES)

    def test_nan_target_entries_are_missing_data(self):
        X, y = make_data()
        y[::3, 1] = math.nan
        est = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, **BRACKET).fit(X, y)
        assert abs(est.delay_fs_ - 53.0) < 1.0e-3

    def test_learns_angle_offset_and_applies_it_in_predict(self):
        X, y = make_data(angle_offset=0.07)
        est = DelayEstimator(
            nu0_thz=193.44, tau_fs=100.0, fit_gamma_offset=True, **BRACKET
        ).fit(X, y)
        assert abs(est.gamma_offset_rad_ - 0.07) < 1.0e-3
        predicted = est.predict(X)
        expected, _, _ = gaussian_observables_batch(
            PULSE, est.delay_fs_, ANGLES + est.gamma_offset_rad_
        )
        np.testing.assert_allclose(predicted, expected, rtol=1.0e-12)

    def test_sampled_spectrum_model(self):
        X, y = make_data()
        spectrum = gaussian_spectrum(PULSE, default_grid(PULSE, count=2049))
        est = DelayEstimator(spectrum=spectrum, grid_nodes=96, **BRACKET).fit(X, y)
        assert abs(est.delay_fs_ - 53.0) < 1.0e-3


class TestValidation:
    def test_rejects_both_model_specifications(self):
        X, y = make_data()
        spectrum = gaussian_spectrum(PULSE, default_grid(PULSE, count=257))
        est = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, spectrum=spectrum, **BRACKET)
        with pytest.raises(ValueError):
            est.fit(X, y)

    @pytest.mark.parametrize("kwargs", [{}, {"nu0_thz": 193.44}, {"tau_fs": 100.0}])
    def test_requires_a_complete_model_specification(self, kwargs):
        X, y = make_data()
        with pytest.raises(ValueError):
            DelayEstimator(**kwargs, **BRACKET).fit(X, y)

    def test_rejects_bad_X(self):
        X, y = make_data()
        est = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, **BRACKET)
        with pytest.raises(ValueError):
            est.fit(np.column_stack([X, X]), y)
        bad = X.copy()
        bad[0] = math.nan
        with pytest.raises(ValueError):
            est.fit(bad, y[:, 0])

    def test_rejects_bad_target_shape(self):
        X, y = make_data()
        est = DelayEstimator(nu0_thz=193.44, tau_fs=100.0, **BRACKET)
        with pytest.raises(ValueError):
            est.fit(X, np.column_stack([y, y[:, 0]]))
