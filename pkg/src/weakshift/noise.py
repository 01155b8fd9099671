"""Analyzer-angle jitter and Monte-Carlo propagation to the observables.

The dominant experimental instability is drift of the analyzer angle
(e.g. a liquid-crystal retarder responding to temperature), modelled as
Gaussian jitter with standard deviation ``gamma_jitter_sigma_rad``
around the nominal angle.  Each Monte-Carlo sample emulates one
acquisition: every averaged scan sees its own jittered angle, the
transmitted spectrum passes the instrument kernel, scans are averaged,
and the observables are read against the instrument-convolved input.

Random streams are split per sample index with ``SeedSequence.spawn``,
so results are reproducible bit-for-bit for a fixed seed regardless of
execution order or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import AllSamplesSingular
from .forward import InterferometerConfig, output_spectrum
from .spectra import (
    InstrumentModel,
    Spectrum,
    SpectrumLike,
    as_spectrum,
    convolve_instrument,
    energy,
)

__all__ = [
    "NoiseModel",
    "UncertainValue",
    "sample_gamma",
    "monte_carlo_observables",
]

_DB = 10.0 / math.log(10.0)


@dataclass(frozen=True)
class NoiseModel:
    """Jitter magnitude, instrument response, RNG seed and sample count."""

    gamma_jitter_sigma_rad: float = 0.0
    instrument: InstrumentModel = InstrumentModel()
    seed: int = 0
    samples: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma_jitter_sigma_rad) and self.gamma_jitter_sigma_rad >= 0.0):
            raise ValueError("gamma_jitter_sigma_rad must be finite and >= 0")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an integer in [0, 2**64)")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValueError("samples must be an integer >= 1")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "samples", int(self.samples))


@dataclass(frozen=True)
class UncertainValue:
    """Sample mean and spread of a propagated observable."""

    mean: float
    std: float
    sample_count: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean):
            raise ValueError("mean must be finite")
        if not (math.isfinite(self.std) and self.std >= 0.0):
            raise ValueError("std must be finite and >= 0")
        if int(self.sample_count) != self.sample_count or self.sample_count < 1:
            raise ValueError("sample_count must be an integer >= 1")
        object.__setattr__(self, "sample_count", int(self.sample_count))


def _sample_rngs(model: NoiseModel) -> list[np.random.Generator]:
    children = np.random.SeedSequence(model.seed).spawn(model.samples)
    return [np.random.default_rng(c) for c in children]


def sample_gamma(nominal_rad: float, model: NoiseModel) -> np.ndarray:
    """One jittered analyzer angle per sample (rad), deterministic in seed.

    Draw ``i`` is the first normal variate of sample ``i``'s dedicated
    stream, i.e. exactly the first scan angle that sample sees in
    :func:`monte_carlo_observables`.
    """
    if not math.isfinite(nominal_rad):
        raise ValueError("nominal_rad must be finite")
    sigma = model.gamma_jitter_sigma_rad
    return np.array([rng.normal(nominal_rad, sigma) for rng in _sample_rngs(model)])


def _summarize(values: np.ndarray, count: int) -> UncertainValue:
    if np.all(values == values[0]):
        # degenerate sample set: zero spread by construction
        return UncertainValue(float(values[0]), 0.0, count)
    std = float(np.std(values, ddof=1)) if count > 1 else 0.0
    return UncertainValue(float(np.mean(values)), std, count)


def monte_carlo_observables(
    model: SpectrumLike,
    delay_fs: float,
    gamma_rad: float,
    noise: NoiseModel,
    energy_floor: float = 1.0e-12,
    workers: int = 1,
) -> tuple[UncertainValue, UncertainValue]:
    """Propagate angle jitter to the shift and loss observables.

    Per sample: jitter the angle for each averaged scan, form the
    scan-averaged instrument-convolved output spectrum, and read
    ``delta_f`` and loss against the instrument-convolved input.
    Samples whose output energy falls below ``energy_floor`` relative to
    the input are excluded and counted (reflected in ``sample_count``).

    Returns ``(delta_f, loss)`` as :class:`UncertainValue` pairs.

    Raises
    ------
    AllSamplesSingular
        If no sample yields defined observables.
    """
    if not math.isfinite(delay_fs):
        raise ValueError("delay_fs must be finite")
    if not math.isfinite(gamma_rad):
        raise ValueError("gamma_rad must be finite")
    if workers < 1:
        raise ValueError("workers must be >= 1")

    s_in = as_spectrum(model)
    reference = convolve_instrument(s_in, noise.instrument)
    grid = s_in.grid
    u = grid.nodes() - grid.center_thz
    step = grid.step_thz
    f_ref = energy(reference)
    m_ref = float(np.trapezoid(u * reference.values, dx=step)) / f_ref
    scans = noise.instrument.scans_to_average
    sigma = noise.gamma_jitter_sigma_rad
    rngs = _sample_rngs(noise)

    def run_sample(i: int) -> tuple[float, float] | None:
        angles = rngs[i].normal(gamma_rad, sigma, size=scans)
        acc = np.zeros(grid.count)
        for angle in angles:
            out = output_spectrum(s_in, InterferometerConfig(delay_fs, 0.0, float(angle)))
            acc += convolve_instrument(out, noise.instrument).values
        mean_vals = acc / scans
        f_out = float(np.trapezoid(mean_vals, dx=step))
        ratio = f_out / f_ref
        if ratio < energy_floor:
            return None
        m_out = float(np.trapezoid(u * mean_vals, dx=step)) / f_out
        return m_out - m_ref, -_DB * math.log(ratio)

    if workers == 1:
        results = [run_sample(i) for i in range(noise.samples)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_sample, range(noise.samples)))

    kept = [r for r in results if r is not None]
    if not kept:
        raise AllSamplesSingular(
            f"all {noise.samples} samples fell below the energy floor"
        )
    arr = np.array(kept)
    return _summarize(arr[:, 0], len(kept)), _summarize(arr[:, 1], len(kept))
