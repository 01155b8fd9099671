"""Spectral containers and operations on sampled power spectra.

Unit conventions used throughout the package:

* frequency in THz, time in fs, wavelength in nm;
* the product of a time in fs and a frequency in THz is dimensionless
  after multiplication by ``FS_THZ`` (= 1e-3), and every phase of the
  form ``2*pi*nu*T`` is computed with that explicit scale;
* ``SPEED_OF_LIGHT_NM_THZ`` is exact in these units.

Spectra are non-negative spectral densities sampled on uniform,
strictly positive frequency grids.  All containers are immutable; all
operations are pure functions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from .errors import EnergyBelowFloor

__all__ = [
    "SPEED_OF_LIGHT_NM_THZ",
    "FS_THZ",
    "FrequencyGrid",
    "Spectrum",
    "GaussianPulse",
    "InstrumentModel",
    "LoadResult",
    "default_grid",
    "gaussian_spectrum",
    "as_spectrum",
    "energy",
    "centroid",
    "convolve_instrument",
    "load_spectrum",
    "read_spectrum_csv",
    "write_spectrum_csv",
    "wavelength_to_frequency",
    "frequency_to_wavelength",
    "bandwidth_nm_to_thz",
]

SPEED_OF_LIGHT_NM_THZ = 299792.458
"""Speed of light in nm*THz (exact)."""

FS_THZ = 1.0e-3
"""Dimensionless value of (1 fs) * (1 THz)."""

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency grid: node i sits at ``start_thz + i*step_thz``.

    Parameters
    ----------
    start_thz : float
        First node frequency (THz); must be strictly positive.
    step_thz : float
        Node spacing (THz); must be strictly positive.
    count : int
        Number of nodes; at least 2.
    """

    start_thz: float
    step_thz: float
    count: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start_thz) and self.start_thz > 0.0):
            raise ValueError("start_thz must be finite and > 0")
        if not (math.isfinite(self.step_thz) and self.step_thz > 0.0):
            raise ValueError("step_thz must be finite and > 0")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError("count must be an integer >= 2")
        object.__setattr__(self, "count", int(self.count))

    def node(self, i: int) -> float:
        """Frequency of node ``i`` (THz), exactly ``start + i*step``."""
        return self.start_thz + i * self.step_thz

    def nodes(self) -> np.ndarray:
        """All node frequencies (THz) as a read-only array."""
        f = self.start_thz + self.step_thz * np.arange(self.count, dtype=float)
        f.flags.writeable = False
        return f

    @property
    def span_thz(self) -> float:
        """Width of the grid: distance between first and last node."""
        return self.step_thz * (self.count - 1)

    @property
    def center_thz(self) -> float:
        """Mid-point of the grid (reference for offset moments)."""
        return self.start_thz + 0.5 * self.step_thz * (self.count - 1)


def _readonly(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Spectrum:
    """Non-negative spectral density sampled on a :class:`FrequencyGrid`.

    ``values[i]`` is the density at ``grid.node(i)``; units are arbitrary
    but fixed, so energies are density-unit * THz.
    """

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if values.shape[0] != self.grid.count:
            raise ValueError(
                f"values length {values.shape[0]} != grid count {self.grid.count}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if np.any(values < 0.0):
            raise ValueError("values must be non-negative")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def peak(self) -> float:
        return float(self.values.max())


@dataclass(frozen=True)
class GaussianPulse:
    """Transform-limited Gaussian pulse.

    Parameters
    ----------
    nu0_thz : float
        Central optical frequency (THz), > 0.
    tau_fs : float
        Intensity FWHM duration (fs), > 0.
    """

    nu0_thz: float
    tau_fs: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.nu0_thz) and self.nu0_thz > 0.0):
            raise ValueError("nu0_thz must be finite and > 0")
        if not (math.isfinite(self.tau_fs) and self.tau_fs > 0.0):
            raise ValueError("tau_fs must be finite and > 0")

    @property
    def spectral_sigma_thz(self) -> float:
        """Gaussian sigma of the spectral density, sqrt(ln2)/(sqrt(2)*pi*tau)."""
        return math.sqrt(_LN2) / (math.sqrt(2.0) * math.pi * self.tau_fs * FS_THZ)

    @property
    def spectral_fwhm_thz(self) -> float:
        """Spectral FWHM, 2*ln2/(pi*tau)."""
        return 2.0 * _LN2 / (math.pi * self.tau_fs * FS_THZ)


@dataclass(frozen=True)
class InstrumentModel:
    """Spectrometer response: Gaussian smoothing plus scan averaging.

    Parameters
    ----------
    resolution_fwhm_thz : float
        FWHM of the Gaussian instrument kernel (THz); 0 disables smoothing.
    scans_to_average : int
        Number of independent scans averaged per acquisition; >= 1.
    """

    resolution_fwhm_thz: float = 0.0
    scans_to_average: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.resolution_fwhm_thz) and self.resolution_fwhm_thz >= 0.0):
            raise ValueError("resolution_fwhm_thz must be finite and >= 0")
        if int(self.scans_to_average) != self.scans_to_average or self.scans_to_average < 1:
            raise ValueError("scans_to_average must be an integer >= 1")
        object.__setattr__(self, "scans_to_average", int(self.scans_to_average))


def default_grid(
    pulse: GaussianPulse,
    half_width_sigmas: float = 8.0,
    count: int = 2 ** 14,
) -> FrequencyGrid:
    """Symmetric grid around the pulse centre, wide enough for quadrature.

    The window is ``nu0 +/- half_width_sigmas * sigma_nu`` sampled on
    ``count`` nodes.  Raises if the window would leave the positive
    frequency axis.
    """
    sigma = pulse.spectral_sigma_thz
    lo = pulse.nu0_thz - half_width_sigmas * sigma
    hi = pulse.nu0_thz + half_width_sigmas * sigma
    if lo <= 0.0:
        raise ValueError(
            "default grid extends to non-positive frequencies; "
            "reduce half_width_sigmas or use a wider pulse"
        )
    step = (hi - lo) / (count - 1)
    return FrequencyGrid(start_thz=lo, step_thz=step, count=count)


def gaussian_spectrum(pulse: GaussianPulse, grid: FrequencyGrid | None = None) -> Spectrum:
    """Sample ``exp(-pi^2 tau^2 (nu-nu0)^2 / ln2)`` on ``grid``.

    Peak density is 1 when ``nu0`` lies on a grid node.  When ``grid`` is
    None a :func:`default_grid` is used (nu0 on the centre node).
    """
    if grid is None:
        grid = default_grid(pulse)
    u = (grid.nodes() - pulse.nu0_thz) * (pulse.tau_fs * FS_THZ)
    values = np.exp(-(math.pi ** 2) * u * u / _LN2)
    return Spectrum(grid, values)


SpectrumLike = Union[Spectrum, GaussianPulse]


def as_spectrum(model: SpectrumLike, grid: FrequencyGrid | None = None) -> Spectrum:
    """Return ``model`` as a sampled spectrum (identity for spectra)."""
    if isinstance(model, Spectrum):
        return model
    if isinstance(model, GaussianPulse):
        return gaussian_spectrum(model, grid)
    raise TypeError(f"expected Spectrum or GaussianPulse, got {type(model).__name__}")


def energy(spectrum: Spectrum) -> float:
    """Trapezoidal integral of the density over the grid (density*THz)."""
    return float(np.trapezoid(spectrum.values, dx=spectrum.grid.step_thz))


def _offset_moment(spectrum: Spectrum) -> float:
    """Trapezoidal integral of ``(nu - grid.center) * S(nu)``.

    Working in offsets from the grid centre keeps the first moment free
    of cancellation against the ~100 THz carrier, so centroid
    *differences* retain full precision.
    """
    grid = spectrum.grid
    u = grid.nodes() - grid.center_thz
    return float(np.trapezoid(u * spectrum.values, dx=grid.step_thz))


def centroid(spectrum: Spectrum, energy_floor: float = 1.0e-12) -> float:
    """Normalized first moment of the density (THz).

    Raises
    ------
    EnergyBelowFloor
        If the energy does not exceed ``energy_floor * peak * span``.
    """
    total = energy(spectrum)
    floor = energy_floor * spectrum.peak * spectrum.grid.span_thz
    if not total > floor:
        raise EnergyBelowFloor(
            f"spectrum energy {total!r} at or below floor {floor!r}; centroid undefined"
        )
    return spectrum.grid.center_thz + _offset_moment(spectrum) / total


def convolve_instrument(spectrum: Spectrum, instrument: InstrumentModel) -> Spectrum:
    """Smooth a spectrum with the instrument's unit-area Gaussian kernel.

    The kernel has FWHM ``instrument.resolution_fwhm_thz`` and is
    truncated at +/-4 sigma.  A zero resolution returns the input
    unchanged.  Energy is conserved away from the grid edges.
    """
    fwhm = instrument.resolution_fwhm_thz
    if fwhm == 0.0:
        return spectrum
    grid = spectrum.grid
    sigma = fwhm / (2.0 * math.sqrt(2.0 * _LN2))
    half = math.ceil(4.0 * sigma / grid.step_thz)
    if half == 0:
        return spectrum
    if 2 * half + 1 > grid.count:
        raise ValueError(
            "instrument kernel (+/-4 sigma) is wider than the spectrum grid"
        )
    offsets = np.arange(-half, half + 1, dtype=float) * grid.step_thz
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    kernel /= kernel.sum()
    smoothed = np.convolve(spectrum.values, kernel, mode="same")
    return Spectrum(grid, smoothed)


class LoadResult(NamedTuple):
    """Resampled spectrum plus the number of negative values clamped."""

    spectrum: Spectrum
    clamped: int


def load_spectrum(rows: Iterable[Sequence[float]]) -> LoadResult:
    """Build a spectrum from measured (frequency, density) rows.

    Frequencies must be finite, strictly positive and strictly
    increasing; at least two rows are required.  Negative densities are
    clamped to zero (counted in the result); non-finite densities are
    rejected.  The rows are linearly resampled onto a uniform grid whose
    step is the smallest input spacing; rows that are already uniform
    are preserved bit-for-bit at their own nodes.
    """
    table = np.asarray(list(rows), dtype=float)
    if table.ndim != 2 or table.shape[1] != 2:
        raise ValueError("expected rows of (frequency_thz, density)")
    if table.shape[0] < 2:
        raise ValueError("need at least two rows")
    freq = table[:, 0]
    dens = table[:, 1]
    if not np.all(np.isfinite(freq)) or not np.all(np.isfinite(dens)):
        raise ValueError("frequencies and densities must be finite")
    if freq[0] <= 0.0:
        raise ValueError("frequencies must be strictly positive")
    if not np.all(np.diff(freq) > 0.0):
        raise ValueError("frequencies must be strictly increasing")

    clamped = int(np.count_nonzero(dens < 0.0))
    dens = np.maximum(dens, 0.0)

    span = float(freq[-1] - freq[0])
    # already-uniform rows (up to rounding of the stored frequencies)
    # keep their densities bit-for-bit on a grid fitted through the ends
    fitted_step = span / (freq.size - 1)
    uniform_nodes = freq[0] + fitted_step * np.arange(freq.size)
    if np.all(np.abs(freq - uniform_nodes) <= 1.0e-6 * fitted_step):
        grid = FrequencyGrid(
            start_thz=float(freq[0]), step_thz=fitted_step, count=freq.size
        )
        return LoadResult(Spectrum(grid, dens), clamped)

    step = float(np.min(np.diff(freq)))
    # keep the last node inside the measured range (tolerate rounding)
    count = int(math.floor(span / step * (1.0 + 1e-12))) + 1
    grid = FrequencyGrid(start_thz=float(freq[0]), step_thz=step, count=count)
    nodes = grid.nodes()
    values = np.interp(nodes, freq, dens)
    # exact input nodes keep their measured value bit-for-bit
    idx = np.searchsorted(freq, nodes)
    idx = np.minimum(idx, freq.size - 1)
    exact = freq[idx] == nodes
    values[exact] = dens[idx[exact]]
    return LoadResult(Spectrum(grid, values), clamped)


def read_spectrum_csv(path, density_column: str = "density") -> LoadResult:
    """Read a spectrum CSV with a ``frequency_thz`` column.

    The canonical interchange format is the two-column header
    ``frequency_thz,density``; files with several density columns (as
    written by the CLI) are read by naming ``density_column``.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "frequency_thz" not in reader.fieldnames:
            raise ValueError(f"{path}: missing 'frequency_thz' column")
        if density_column not in reader.fieldnames:
            raise ValueError(f"{path}: missing {density_column!r} column")
        rows = [
            (float(rec["frequency_thz"]), float(rec[density_column])) for rec in reader
        ]
    return load_spectrum(rows)


def write_spectrum_csv(path, spectrum: Spectrum) -> None:
    """Write the canonical two-column ``frequency_thz,density`` CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frequency_thz", "density"])
        for f, v in zip(spectrum.grid.nodes(), spectrum.values):
            writer.writerow([repr(float(f)), repr(float(v))])


def wavelength_to_frequency(lambda_nm: float) -> float:
    """Convert a vacuum wavelength (nm) to frequency (THz)."""
    if not (math.isfinite(lambda_nm) and lambda_nm > 0.0):
        raise ValueError("wavelength must be finite and > 0")
    return SPEED_OF_LIGHT_NM_THZ / lambda_nm


def frequency_to_wavelength(nu_thz: float) -> float:
    """Convert a frequency (THz) to vacuum wavelength (nm)."""
    if not (math.isfinite(nu_thz) and nu_thz > 0.0):
        raise ValueError("frequency must be finite and > 0")
    return SPEED_OF_LIGHT_NM_THZ / nu_thz


def bandwidth_nm_to_thz(delta_lambda_nm: float, lambda_nm: float) -> float:
    """Convert a small wavelength bandwidth at ``lambda_nm`` to THz.

    Uses the first-order relation ``delta_nu = c * delta_lambda / lambda^2``.
    """
    if not (math.isfinite(delta_lambda_nm) and delta_lambda_nm >= 0.0):
        raise ValueError("bandwidth must be finite and >= 0")
    if not (math.isfinite(lambda_nm) and lambda_nm > 0.0):
        raise ValueError("wavelength must be finite and > 0")
    return SPEED_OF_LIGHT_NM_THZ * delta_lambda_nm / (lambda_nm * lambda_nm)
