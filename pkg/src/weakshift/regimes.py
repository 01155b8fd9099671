"""Working-point analysis: analyzer sweeps and loss-budget trade-offs.

The shift/loss trade-off is controlled by the working-point angle
``theta``: the loss grows monotonically as ``theta`` moves from 0 to pi
while ``|delta_f|`` peaks at ``cos(theta) = -g`` (fringe contrast g) and
falls back to zero at ``theta = pi``.  ``max_shift_at_loss_budget``
walks that curve; ``gamma_sweep`` samples full analyzer revolutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DenominatorBelowFloor, InfeasibleBudget
from .forward import (
    delta_f_gaussian,
    gamma_factor,
    gamma_for_phase,
    gaussian_observables_batch,
    loss_gaussian,
    observables_batch,
)
from .spectra import FS_THZ, GaussianPulse, Spectrum, SpectrumLike, energy

__all__ = [
    "GAUSSIAN_TAG",
    "NUMERIC_TAG",
    "LOW_LOSS_TAG",
    "HIGH_LOSS_TAG",
    "DEFAULT_LOSS_THRESHOLD_DB",
    "SweepResult",
    "WorkingPoint",
    "gamma_sweep",
    "minimum_loss_db",
    "max_shift_at_loss_budget",
    "classify_regime",
]

_LN2 = math.log(2.0)
_DB = 10.0 / math.log(10.0)

GAUSSIAN_TAG = "gaussian-closed-form"
NUMERIC_TAG = "numeric-spectrum"
LOW_LOSS_TAG = "low-loss"
HIGH_LOSS_TAG = "high-loss"
DEFAULT_LOSS_THRESHOLD_DB = 12.0


@dataclass(frozen=True)
class SweepResult:
    """Observables sampled over strictly increasing analyzer angles.

    Singular angles (undefined shift) are flagged, never dropped: their
    shift is NaN and their loss may be finite-large or +inf.
    """

    gammas_rad: np.ndarray
    shifts_thz: np.ndarray
    losses_db: np.ndarray
    singular: np.ndarray
    model_tag: str

    def __post_init__(self) -> None:
        gammas = np.asarray(self.gammas_rad, dtype=float)
        shifts = np.asarray(self.shifts_thz, dtype=float)
        losses = np.asarray(self.losses_db, dtype=float)
        singular = np.asarray(self.singular, dtype=bool)
        n = gammas.shape[0]
        if any(a.shape != (n,) for a in (shifts, losses, singular)):
            raise ValueError("sweep arrays must share one length")
        if not np.all(np.diff(gammas) > 0.0):
            raise ValueError("gammas_rad must be strictly increasing")
        if self.model_tag not in (GAUSSIAN_TAG, NUMERIC_TAG):
            raise ValueError(f"unknown model_tag {self.model_tag!r}")
        for name, arr in (
            ("gammas_rad", gammas),
            ("shifts_thz", shifts),
            ("losses_db", losses),
            ("singular", singular),
        ):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class WorkingPoint:
    """One analyzer setting with its shift, loss and regime tag."""

    gamma_rad: float
    shift_thz: float
    loss_db: float
    regime_tag: str

    def __post_init__(self) -> None:
        if not self.loss_db >= 0.0:
            raise ValueError("loss_db must be >= 0")
        if self.regime_tag not in (LOW_LOSS_TAG, HIGH_LOSS_TAG):
            raise ValueError(f"unknown regime_tag {self.regime_tag!r}")


def classify_regime(
    point: "WorkingPoint | float", threshold_db: float = DEFAULT_LOSS_THRESHOLD_DB
) -> str:
    """Tag a working point (or bare loss in dB) as low- or high-loss.

    A loss exactly at the threshold counts as low-loss.
    """
    if not math.isfinite(threshold_db):
        raise ValueError("threshold_db must be finite")
    loss_db = point.loss_db if isinstance(point, WorkingPoint) else float(point)
    return LOW_LOSS_TAG if loss_db <= threshold_db else HIGH_LOSS_TAG


def gamma_sweep(
    model: SpectrumLike,
    delay_fs: float,
    gamma_range: tuple[float, float] = (-math.pi, math.pi),
    n: int = 361,
    floor: float = 1.0e-12,
) -> SweepResult:
    """Sample shift and loss at ``n`` uniform analyzer angles.

    Gaussian pulses use the closed forms; sampled spectra use quadrature.
    """
    lo, hi = float(gamma_range[0]), float(gamma_range[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError("gamma_range must be finite with lo < hi")
    if n < 2:
        raise ValueError("n must be >= 2")
    gammas = np.linspace(lo, hi, n)

    if isinstance(model, GaussianPulse):
        shifts, losses, singular = gaussian_observables_batch(
            model, delay_fs, gammas, floor
        )
        return SweepResult(gammas, shifts, losses, singular, GAUSSIAN_TAG)

    spectrum = model
    if not isinstance(spectrum, Spectrum):
        raise TypeError(f"expected Spectrum or GaussianPulse, got {type(model).__name__}")
    shifts, losses, singular = observables_batch(spectrum, delay_fs, gammas, floor)
    return SweepResult(gammas, shifts, losses, singular, NUMERIC_TAG)


def _visibility(spectrum: Spectrum, delay_fs: float) -> tuple[float, float]:
    """Fringe contrast V and phase of the spectrum's coherence at delay T."""
    grid = spectrum.grid
    phase = 2.0 * math.pi * grid.nodes() * (delay_fs * FS_THZ)
    total = energy(spectrum)
    m_re = float(np.trapezoid(spectrum.values * np.cos(phase), dx=grid.step_thz))
    m_im = float(np.trapezoid(spectrum.values * np.sin(phase), dx=grid.step_thz))
    return math.hypot(m_re, m_im) / total, math.atan2(m_im, m_re)


def minimum_loss_db(model: SpectrumLike, delay_fs: float) -> float:
    """Smallest achievable post-selection loss at a given delay (dB)."""
    if isinstance(model, GaussianPulse):
        r = delay_fs / model.tau_fs
        one_minus_g = -math.expm1(-_LN2 * r * r)
        return -_DB * math.log1p(-0.5 * one_minus_g)
    if not isinstance(model, Spectrum):
        raise TypeError(f"expected Spectrum or GaussianPulse, got {type(model).__name__}")
    v, _ = _visibility(model, delay_fs)
    return -_DB * math.log1p(-0.5 * (1.0 - v))


def max_shift_at_loss_budget(
    model: SpectrumLike,
    delay_fs: float,
    budget_db: float,
    threshold_db: float = DEFAULT_LOSS_THRESHOLD_DB,
) -> WorkingPoint:
    """Largest-|shift| working point whose loss stays within a budget.

    The loss constraint binds only while ``|delta_f|`` still grows with
    theta; budgets beyond the loss of the unconstrained maximum (located
    at ``cos(theta) = -g``) return that maximum.  ``budget_db = inf``
    therefore yields the global optimum.

    Raises
    ------
    InfeasibleBudget
        When the budget does not exceed the minimum achievable loss.
    """
    min_loss = minimum_loss_db(model, delay_fs)
    if not budget_db > min_loss:
        raise InfeasibleBudget(
            f"budget {budget_db!r} dB at or below minimum achievable loss "
            f"{min_loss!r} dB"
        )

    if isinstance(model, GaussianPulse):
        return _max_shift_gaussian(model, delay_fs, budget_db, threshold_db)
    if isinstance(model, Spectrum):
        return _max_shift_spectrum(model, delay_fs, budget_db, threshold_db)
    raise TypeError(f"expected Spectrum or GaussianPulse, got {type(model).__name__}")


def _max_shift_gaussian(
    pulse: GaussianPulse, delay_fs: float, budget_db: float, threshold_db: float
) -> WorkingPoint:
    g = gamma_factor(delay_fs, pulse.tau_fs)
    r = delay_fs / pulse.tau_fs
    one_minus_g = -math.expm1(-_LN2 * r * r)
    one_minus_g2 = one_minus_g * (1.0 + g)  # 1 - g^2, no cancellation

    peak_loss = math.inf if one_minus_g2 == 0.0 else -10.0 * math.log10(0.5 * one_minus_g2)
    if budget_db >= peak_loss:
        cos_t = -g
        sin_t = math.sqrt(one_minus_g2)
    else:
        cos_t = (2.0 * 10.0 ** (-budget_db / 10.0) - 1.0) / g
        cos_t = min(cos_t, 1.0)
        sin_t = math.sqrt(max((1.0 - cos_t) * (1.0 + cos_t), 0.0))
    theta = math.acos(cos_t)
    gamma = gamma_for_phase(pulse.nu0_thz, delay_fs, theta)
    shift = delta_f_gaussian(pulse, delay_fs, gamma)
    loss = loss_gaussian(pulse, delay_fs, gamma)
    return WorkingPoint(gamma, shift, loss, classify_regime(loss, threshold_db))


def _max_shift_spectrum(
    spectrum: Spectrum, delay_fs: float, budget_db: float, threshold_db: float
) -> WorkingPoint:
    v, phase_v = _visibility(spectrum, delay_fs)

    def gamma_at(theta: float) -> float:
        return phase_v - theta - 0.5 * math.pi

    def loss_at(theta: float) -> float:
        _, losses, _ = observables_batch(
            spectrum, delay_fs, np.array([gamma_at(theta)])
        )
        return float(losses[0])

    # loss is monotone in cos(theta); bisect cos(theta) to 1e-12 when the
    # budget binds before the most lossy angle
    max_loss = loss_at(math.pi)
    if budget_db >= max_loss:
        theta_max = math.pi
    else:
        lo_c, hi_c = -1.0, 1.0  # loss(hi_c)=min, loss(lo_c)=max
        while hi_c - lo_c > 1.0e-12:
            mid = 0.5 * (lo_c + hi_c)
            if loss_at(math.acos(mid)) > budget_db:
                lo_c = mid
            else:
                hi_c = mid
        theta_max = math.acos(hi_c)

    # |shift| along the admissible arc: dense scan plus golden refinement
    thetas = np.linspace(-theta_max, theta_max, 2049)
    shifts, losses, singular = observables_batch(
        spectrum, delay_fs, np.array([gamma_at(t) for t in thetas])
    )
    mag = np.where(singular, -np.inf, np.abs(shifts))
    k = int(np.argmax(mag))

    def neg_mag(theta: float) -> float:
        s, _, sing = observables_batch(spectrum, delay_fs, np.array([gamma_at(theta)]))
        return -abs(float(s[0])) if not sing[0] else math.inf

    lo = thetas[max(k - 1, 0)]
    hi = thetas[min(k + 1, len(thetas) - 1)]
    phi_g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - phi_g * (b - a)
    c2 = a + phi_g * (b - a)
    f1, f2 = neg_mag(c1), neg_mag(c2)
    for _ in range(60):
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - phi_g * (b - a)
            f1 = neg_mag(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + phi_g * (b - a)
            f2 = neg_mag(c2)
    theta_best = 0.5 * (a + b)
    gamma = gamma_at(theta_best)
    s, l, sing = observables_batch(spectrum, delay_fs, np.array([gamma]))
    if sing[0]:
        raise DenominatorBelowFloor("optimal working point is singular")
    shift, loss = float(s[0]), float(l[0])
    # never report a point that violates the budget (rounding guard)
    if loss > budget_db and theta_best > 0:
        theta_best = min(theta_best, theta_max)
        gamma = gamma_at(theta_best)
        s, l, _ = observables_batch(spectrum, delay_fs, np.array([gamma]))
        shift, loss = float(s[0]), float(l[0])
    return WorkingPoint(gamma, shift, loss, classify_regime(loss, threshold_db))
