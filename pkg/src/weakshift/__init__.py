"""Weak-value spectral interferometry: forward model, sweeps, noise, fits.

The package models a two-arm interferometer whose output spectrum is a
fringe-modulated copy of the input.  Small differential delays move the
spectral centroid by far more than the inverse delay itself, at the
price of attenuation; the modules here quantify that trade and invert
it:

* :mod:`weakshift.spectra`   -- grids, pulses, instrument model, CSV I/O
* :mod:`weakshift.forward`   -- output spectra and (shift, loss) observables
* :mod:`weakshift.regimes`   -- angle sweeps, loss budgets, working points
* :mod:`weakshift.noise`     -- Monte Carlo jitter propagation
* :mod:`weakshift.estimator` -- delay estimation (least squares + sklearn API)
* :mod:`weakshift.cli`       -- the ``weakshift`` command-line tool
"""

from .errors import (
    AllSamplesSingular,
    DegenerateBracket,
    DenominatorBelowFloor,
    EnergyBelowFloor,
    InfeasibleBudget,
    NonlinearRegime,
    WeakshiftError,
)
from .estimator import (
    DelayEstimator,
    FitProblem,
    FitResult,
    fit_delay,
    invert_small_shift,
    read_fit_csv,
    residuals,
    write_fit_csv,
)
from .forward import (
    ComplexSpectrum,
    InterferometerConfig,
    Observables,
    delay_from_arm_lengths,
    delta_f_gaussian,
    field_intensity,
    gamma_factor,
    gamma_for_phase,
    gaussian_observables_batch,
    interference_phase,
    loss_gaussian,
    observables_batch,
    observables_numeric,
    output_field,
    output_spectrum,
)
from .noise import (
    NoiseModel,
    UncertainValue,
    monte_carlo_observables,
    sample_gamma,
)
from .regimes import (
    DEFAULT_LOSS_THRESHOLD_DB,
    GAUSSIAN_TAG,
    HIGH_LOSS_TAG,
    LOW_LOSS_TAG,
    NUMERIC_TAG,
    SweepResult,
    WorkingPoint,
    classify_regime,
    gamma_sweep,
    max_shift_at_loss_budget,
    minimum_loss_db,
)
from .spectra import (
    FS_THZ,
    SPEED_OF_LIGHT_NM_THZ,
    FrequencyGrid,
    GaussianPulse,
    InstrumentModel,
    LoadResult,
    Spectrum,
    as_spectrum,
    bandwidth_nm_to_thz,
    centroid,
    convolve_instrument,
    default_grid,
    energy,
    frequency_to_wavelength,
    gaussian_spectrum,
    load_spectrum,
    read_spectrum_csv,
    wavelength_to_frequency,
    write_spectrum_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AllSamplesSingular",
    "ComplexSpectrum",
    "DEFAULT_LOSS_THRESHOLD_DB",
    "DegenerateBracket",
    "DelayEstimator",
    "DenominatorBelowFloor",
    "EnergyBelowFloor",
    "FS_THZ",
    "FitProblem",
    "FitResult",
    "FrequencyGrid",
    "GAUSSIAN_TAG",
    "GaussianPulse",
    "HIGH_LOSS_TAG",
    "InfeasibleBudget",
    "InstrumentModel",
    "InterferometerConfig",
    "LOW_LOSS_TAG",
    "LoadResult",
    "NUMERIC_TAG",
    "NoiseModel",
    "NonlinearRegime",
    "Observables",
    "SPEED_OF_LIGHT_NM_THZ",
    "Spectrum",
    "SweepResult",
    "UncertainValue",
    "WeakshiftError",
    "WorkingPoint",
    "as_spectrum",
    "bandwidth_nm_to_thz",
    "centroid",
    "classify_regime",
    "convolve_instrument",
    "default_grid",
    "delay_from_arm_lengths",
    "delta_f_gaussian",
    "energy",
    "field_intensity",
    "fit_delay",
    "frequency_to_wavelength",
    "gamma_factor",
    "gamma_for_phase",
    "gamma_sweep",
    "gaussian_observables_batch",
    "gaussian_spectrum",
    "interference_phase",
    "invert_small_shift",
    "load_spectrum",
    "loss_gaussian",
    "max_shift_at_loss_budget",
    "minimum_loss_db",
    "monte_carlo_observables",
    "observables_batch",
    "observables_numeric",
    "output_field",
    "output_spectrum",
    "read_fit_csv",
    "read_spectrum_csv",
    "residuals",
    "sample_gamma",
    "wavelength_to_frequency",
    "write_fit_csv",
    "write_spectrum_csv",
]
