"""Delay estimation from measured shift/loss vs analyzer-angle data.

``fit_delay`` recovers the differential group delay T from sampled
``(gamma, delta_f)`` and/or ``(gamma, loss)`` curves by a coarse grid
search over the delay bracket followed by damped least-squares
refinement with a finite-difference Jacobian.  Because the observables
are nearly periodic in T with period 1/nu0 (the fringe-contrast
envelope breaks the degeneracy only weakly for T << tau), all grid
minima close to the best one are reported as candidates and ties are
broken toward the smallest |T|.

``invert_small_shift`` is the one-point convenience inverse of the
linearized shift model near a low-loss working point.

``DelayEstimator`` wraps the same fit behind the scikit-learn estimator
protocol (``fit``/``predict``/``get_params``).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .errors import (
    DegenerateBracket,
    DenominatorBelowFloor,
    NonlinearRegime,
)
from .forward import (
    delta_f_gaussian,
    gaussian_observables_batch,
    observables_batch,
)
from .spectra import FS_THZ, GaussianPulse, Spectrum, SpectrumLike
from .noise import UncertainValue

__all__ = [
    "FitProblem",
    "FitResult",
    "residuals",
    "fit_delay",
    "invert_small_shift",
    "DelayEstimator",
    "read_fit_csv",
    "write_fit_csv",
]

_LN2 = math.log(2.0)


def _optional_channel(name: str, values, n: int) -> np.ndarray | None:
    if values is None:
        return None
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},)")
    if np.any(np.isinf(arr)):
        raise ValueError(f"{name} must not contain infinities (use NaN for missing)")
    if not np.any(np.isfinite(arr)):
        raise ValueError(f"{name} has no finite entries")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FitProblem:
    """Data and configuration for a delay fit.

    ``shift_thz``/``loss_db`` may each be omitted (None), but not both;
    NaN entries mark per-point missing values.  ``weights`` are
    per-point multipliers (> 0).  Channel residuals are normalized by
    the RMS of their data unless ``shift_weight``/``loss_weight`` give
    explicit scales.
    """

    gamma_rad: np.ndarray
    shift_thz: np.ndarray | None
    loss_db: np.ndarray | None
    input_spectrum: SpectrumLike
    t_bracket: tuple[float, float]
    weights: np.ndarray | None = None
    fit_gamma_offset: bool = False
    shift_weight: float | None = None
    loss_weight: float | None = None

    def __post_init__(self) -> None:
        gammas = np.asarray(self.gamma_rad, dtype=float)
        if gammas.ndim != 1 or gammas.shape[0] < 1:
            raise ValueError("gamma_rad must be a non-empty 1-D array")
        if not np.all(np.isfinite(gammas)):
            raise ValueError("gamma_rad must be finite")
        gammas = gammas.copy()
        gammas.flags.writeable = False
        object.__setattr__(self, "gamma_rad", gammas)
        n = gammas.shape[0]
        shift = _optional_channel("shift_thz", self.shift_thz, n)
        loss = _optional_channel("loss_db", self.loss_db, n)
        if shift is None and loss is None:
            raise ValueError("at least one of shift_thz/loss_db is required")
        object.__setattr__(self, "shift_thz", shift)
        object.__setattr__(self, "loss_db", loss)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (n,):
                raise ValueError(f"weights must have shape ({n},)")
            if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
                raise ValueError("weights must be finite and > 0")
            w = w.copy()
            w.flags.writeable = False
            object.__setattr__(self, "weights", w)
        if not isinstance(self.input_spectrum, (Spectrum, GaussianPulse)):
            raise TypeError("input_spectrum must be a Spectrum or GaussianPulse")
        lo, hi = self.t_bracket
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("t_bracket must be finite")
        object.__setattr__(self, "t_bracket", (float(lo), float(hi)))
        for name in ("shift_weight", "loss_weight"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0")

    @property
    def n_parameters(self) -> int:
        return 2 if self.fit_gamma_offset else 1

    @property
    def n_observations(self) -> int:
        n = 0
        for channel in (self.shift_thz, self.loss_db):
            if channel is not None:
                n += int(np.count_nonzero(np.isfinite(channel)))
        return n


@dataclass(frozen=True)
class FitResult:
    """Outcome of :func:`fit_delay`."""

    t_hat_fs: float
    gamma_offset_rad: float
    residual_norm: float
    shift_rms_thz: float | None
    loss_rms_db: float | None
    iterations: int
    converged: bool
    candidates_fs: tuple[float, ...]
    uncertainty: UncertainValue | None = None

    def __post_init__(self) -> None:
        if not self.residual_norm >= 0.0:
            raise ValueError("residual_norm must be >= 0")


def _model_curves(
    model: SpectrumLike, t: float, gammas: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Model shift/loss at each angle plus a 'defined' mask."""
    if isinstance(model, GaussianPulse):
        shifts, losses, singular = gaussian_observables_batch(model, t, gammas)
    else:
        # double precision is ample against measurement noise; the
        # extended-precision path would dominate the fit runtime
        shifts, losses, singular = observables_batch(model, t, gammas, extended=False)
    defined = ~singular & np.isfinite(losses)
    return shifts, losses, defined


def _channel_scales(problem: FitProblem) -> tuple[float, float]:
    def rms_scale(data: np.ndarray | None, override: float | None) -> float:
        if override is not None:
            return override
        if data is None:
            return 1.0
        finite = data[np.isfinite(data)]
        rms = math.sqrt(float(np.mean(np.square(finite)))) if finite.size else 0.0
        return 1.0 / rms if rms > 0.0 else 1.0

    return (
        rms_scale(problem.shift_thz, problem.shift_weight),
        rms_scale(problem.loss_db, problem.loss_weight),
    )


def _residual_vector(
    problem: FitProblem, t: float, gamma_offset: float
) -> tuple[np.ndarray, int]:
    """Stacked weighted residuals and the count of zeroed singular entries.

    The layout (shift entries for every point with shift data, then loss
    entries likewise) is fixed by the data pattern, so vectors from
    different parameter values are always commensurate.
    """
    angles = problem.gamma_rad + gamma_offset
    shifts, losses, defined = _model_curves(problem.input_spectrum, t, angles)
    w_shift, w_loss = _channel_scales(problem)
    weights = problem.weights if problem.weights is not None else 1.0

    pieces: list[np.ndarray] = []
    zeroed = 0
    for data, model_vals, scale in (
        (problem.shift_thz, shifts, w_shift),
        (problem.loss_db, losses, w_loss),
    ):
        if data is None:
            continue
        have = np.isfinite(data)
        # residuals for points with data; singular model values get zero
        # contribution but are counted
        r = np.zeros(int(np.count_nonzero(have)))
        ok = defined[have]
        w = weights[have] if isinstance(weights, np.ndarray) else weights
        diff = (model_vals[have] - data[have]) * scale
        full = diff * w
        r[ok] = full[ok]
        zeroed += int(np.count_nonzero(~ok))
        pieces.append(r)
    return np.concatenate(pieces), zeroed


def residuals(problem: FitProblem, t: float, gamma_offset: float = 0.0) -> np.ndarray:
    """Weighted stacked residual vector model(t, offset) - data.

    Points whose model value is singular at ``t`` contribute zero.
    """
    vec, _ = _residual_vector(problem, t, gamma_offset)
    return vec


def _norm(vec: np.ndarray) -> float:
    return float(np.linalg.norm(vec))


def _grid_stage(
    problem: FitProblem, nodes: int, candidate_frac: float
) -> tuple[float, tuple[float, ...]]:
    lo, hi = problem.t_bracket
    ts = np.linspace(lo, hi, nodes)
    norms = np.array([_norm(_residual_vector(problem, t, 0.0)[0]) for t in ts])
    best = float(np.min(norms))
    # ties: prefer the smallest |T| (branch ambiguity is intrinsic)
    tie = norms <= best * (1.0 + 1.0e-9) + 1.0e-300
    t_start = float(ts[tie][np.argmin(np.abs(ts[tie]))])
    interior = np.zeros_like(norms, dtype=bool)
    interior[1:-1] = (norms[1:-1] <= norms[:-2]) & (norms[1:-1] <= norms[2:])
    interior[0] = norms[0] <= norms[1]
    interior[-1] = norms[-1] <= norms[-2]
    cut = best * (1.0 + candidate_frac) + 1.0e-300
    candidates = tuple(float(t) for t in ts[interior & (norms <= cut)])
    return t_start, candidates


def fit_delay(
    problem: FitProblem,
    grid_nodes: int = 512,
    max_iterations: int = 200,
    step_tol_fs: float = 1.0e-4,
    norm_rel_tol: float = 1.0e-10,
    fd_rel_step: float = 1.0e-6,
    candidate_frac: float = 0.05,
    uncertainty_refits: int = 0,
    uncertainty_seed: int = 0,
) -> FitResult:
    """Two-stage delay fit: coarse bracket grid, then damped least squares.

    The refinement accepts steps that do not increase the residual norm,
    clamps T into the bracket, and declares convergence when an accepted
    step moves T by less than ``step_tol_fs`` while decreasing the norm
    by a relative ``norm_rel_tol`` or less.  On hitting
    ``max_iterations`` the best iterate is returned with
    ``converged=False`` (no exception).

    Raises
    ------
    DegenerateBracket
        If the bracket is empty or inverted.
    ValueError
        If fewer than three observations per fitted parameter remain.
    """
    lo, hi = problem.t_bracket
    if not lo < hi:
        raise DegenerateBracket(f"t_bracket {problem.t_bracket!r} is not ordered")
    if problem.n_observations < 3 * problem.n_parameters:
        raise ValueError(
            f"need at least {3 * problem.n_parameters} observations, "
            f"have {problem.n_observations}"
        )
    if grid_nodes < 2:
        raise ValueError("grid_nodes must be >= 2")

    t_start, candidates = _grid_stage(problem, grid_nodes, candidate_frac)
    p0 = np.array([t_start, 0.0]) if problem.fit_gamma_offset else np.array([t_start])
    p, cost, iterations, converged = _refine(
        problem, p0, max_iterations, step_tol_fs, norm_rel_tol, fd_rel_step
    )

    t_hat = float(p[0])
    offset = float(p[1]) if problem.fit_gamma_offset else 0.0
    shift_rms, loss_rms = _per_channel_rms(problem, t_hat, offset)
    uncertainty = None
    if uncertainty_refits > 0:
        uncertainty = _bootstrap_uncertainty(
            problem, t_hat, offset, shift_rms, loss_rms,
            uncertainty_refits, uncertainty_seed,
            max_iterations, step_tol_fs, norm_rel_tol, fd_rel_step,
        )
    return FitResult(
        t_hat_fs=t_hat,
        gamma_offset_rad=offset,
        residual_norm=cost,
        shift_rms_thz=shift_rms,
        loss_rms_db=loss_rms,
        iterations=iterations,
        converged=converged,
        candidates_fs=candidates,
        uncertainty=uncertainty,
    )


def _refine(
    problem: FitProblem,
    p0: np.ndarray,
    max_iterations: int,
    step_tol_fs: float,
    norm_rel_tol: float,
    fd_rel_step: float,
) -> tuple[np.ndarray, float, int, bool]:
    lo, hi = problem.t_bracket

    def clamp(p: np.ndarray) -> np.ndarray:
        q = p.copy()
        q[0] = min(max(q[0], lo), hi)
        return q

    def vec(p: np.ndarray) -> np.ndarray:
        return _residual_vector(problem, float(p[0]), float(p[1]) if p.size > 1 else 0.0)[0]

    p = clamp(p0)
    r = vec(p)
    norm = _norm(r)
    lam = 1.0e-3
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        jac = np.empty((r.size, p.size))
        for j in range(p.size):
            h = fd_rel_step * max(abs(p[j]), 1.0)
            q = p.copy()
            q[j] += h
            jac[:, j] = (vec(q) - r) / h
        jtj = jac.T @ jac
        jtr = jac.T @ r
        accepted = False
        for _ in range(25):
            damped = jtj + lam * np.diag(np.maximum(np.diag(jtj), 1.0e-30))
            try:
                delta = np.linalg.solve(damped, -jtr)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            q = clamp(p + delta)
            r_new = vec(q)
            norm_new = _norm(r_new)
            if norm_new <= norm:
                step = abs(q[0] - p[0])
                rel_drop = (norm - norm_new) / norm if norm > 0.0 else 0.0
                p, r, norm = q, r_new, norm_new
                lam = max(lam / 3.0, 1.0e-12)
                accepted = True
                if step < step_tol_fs and rel_drop < norm_rel_tol:
                    converged = True
                break
            lam *= 10.0
            if lam > 1.0e14:
                break
        if converged or not accepted:
            break
    return p, norm, iterations, converged


def _per_channel_rms(
    problem: FitProblem, t: float, offset: float
) -> tuple[float | None, float | None]:
    """Unweighted RMS misfit per channel in native units (THz, dB)."""
    angles = problem.gamma_rad + offset
    shifts, losses, defined = _model_curves(problem.input_spectrum, t, angles)
    out: list[float | None] = []
    for data, model_vals in ((problem.shift_thz, shifts), (problem.loss_db, losses)):
        if data is None:
            out.append(None)
            continue
        have = np.isfinite(data) & defined
        if not np.any(have):
            out.append(None)
            continue
        out.append(float(np.sqrt(np.mean(np.square(model_vals[have] - data[have])))))
    return out[0], out[1]


def _bootstrap_uncertainty(
    problem: FitProblem,
    t_hat: float,
    offset: float,
    shift_rms: float | None,
    loss_rms: float | None,
    refits: int,
    seed: int,
    max_iterations: int,
    step_tol_fs: float,
    norm_rel_tol: float,
    fd_rel_step: float,
) -> UncertainValue:
    """Residual-bootstrap spread of T: refit on model + resampled noise."""
    angles = problem.gamma_rad + offset
    shifts, losses, _ = _model_curves(problem.input_spectrum, t_hat, angles)
    children = np.random.SeedSequence(seed).spawn(refits)
    estimates = []
    for child in children:
        rng = np.random.default_rng(child)
        new_shift = None
        if problem.shift_thz is not None:
            scale = shift_rms if shift_rms is not None else 0.0
            new_shift = np.where(
                np.isfinite(problem.shift_thz),
                shifts + rng.normal(0.0, scale, shifts.shape),
                np.nan,
            )
        new_loss = None
        if problem.loss_db is not None:
            scale = loss_rms if loss_rms is not None else 0.0
            new_loss = np.where(
                np.isfinite(problem.loss_db),
                losses + rng.normal(0.0, scale, losses.shape),
                np.nan,
            )
        synthetic = replace(problem, shift_thz=new_shift, loss_db=new_loss)
        p0 = np.array([t_hat, offset]) if problem.fit_gamma_offset else np.array([t_hat])
        p, _, _, _ = _refine(
            synthetic, p0, max_iterations, step_tol_fs, norm_rel_tol, fd_rel_step
        )
        estimates.append(float(p[0]))
    arr = np.array(estimates)
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return UncertainValue(float(np.mean(arr)), std, arr.size)


def invert_small_shift(
    delta_f_thz: float,
    pulse: GaussianPulse,
    gamma_rad: float,
    correction_limit: float = 0.10,
) -> float:
    """Invert the linearized shift model for T near a low-loss point.

    With full fringe contrast the shift reduces to
    ``delta_f = -(ln2/pi)(T/tau^2) tan(theta/2)`` where theta itself
    contains ``2*pi*nu0*T``.  The (unwrapped) analyzer angle pins the
    branch ``theta in (-pi, pi)``; the self-consistent solution on that
    branch is found by sign-change bracketing and bisection, taking the
    smallest |T| when several roots coexist (delta_f = 0 admits both
    T = 0 and the exact zero-shift angle).

    Raises
    ------
    NonlinearRegime
        When no self-consistent solution exists on the branch or the
        full-model shift at the solution deviates from the linearized
        one by more than ``correction_limit`` (relative).
    """
    if not math.isfinite(delta_f_thz):
        raise ValueError("delta_f_thz must be finite")
    if not math.isfinite(gamma_rad):
        raise ValueError("gamma_rad must be finite")
    omega0 = 2.0 * math.pi * pulse.nu0_thz * FS_THZ  # rad per fs
    scale = (_LN2 / math.pi) / (pulse.tau_fs * pulse.tau_fs) / FS_THZ  # THz per fs

    def theta_of(t: float) -> float:
        return omega0 * t - gamma_rad - 0.5 * math.pi

    def mismatch(t: float) -> float:
        return delta_f_thz + scale * t * math.tan(0.5 * theta_of(t))

    t_center = (gamma_rad + 0.5 * math.pi) / omega0  # theta = 0
    half = math.pi / omega0
    ts = np.linspace(t_center - half, t_center + half, 4099)[1:-1]
    vals = np.array([mismatch(t) for t in ts])

    roots: list[float] = []
    for i in np.nonzero(vals == 0.0)[0]:
        roots.append(float(ts[i]))
    sign_change = np.nonzero((vals[:-1] * vals[1:]) < 0.0)[0]
    for i in sign_change:
        a, b = float(ts[i]), float(ts[i + 1])
        fa = mismatch(a)
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm = mismatch(mid)
            if fm == 0.0 or (b - a) < 1.0e-13 * max(1.0, abs(mid)):
                a = b = mid
                break
            if (fa < 0.0) == (fm < 0.0):
                a, fa = mid, fm
            else:
                b = mid
        roots.append(0.5 * (a + b))
    if not roots:
        raise NonlinearRegime("no self-consistent delay on the analyzer branch")

    t_hat = min(roots, key=abs)
    linear = -scale * t_hat * math.tan(0.5 * theta_of(t_hat))
    try:
        full = delta_f_gaussian(pulse, t_hat, gamma_rad)
    except DenominatorBelowFloor as exc:
        raise NonlinearRegime("recovered delay sits at a singular angle") from exc
    denom = max(abs(full), abs(linear), 1.0e-300)
    if abs(full - linear) > correction_limit * denom:
        raise NonlinearRegime(
            f"full-model correction {abs(full - linear) / denom:.3g} exceeds "
            f"{correction_limit:.3g}; use fit_delay instead"
        )
    return t_hat


class DelayEstimator(BaseEstimator):
    """scikit-learn flavored interface to :func:`fit_delay`.

    ``X`` holds analyzer angles (rad) with shape (n,) or (n, 1); ``y``
    holds the centroid shift (THz) with shape (n,), or shift and loss
    (dB) as columns of an (n, 2) array with NaN marking missing entries.

    Parameters mirror :class:`FitProblem`; either give ``nu0_thz`` and
    ``tau_fs`` for the closed-form Gaussian model or a sampled
    ``spectrum``.
    """

    def __init__(
        self,
        nu0_thz: float | None = None,
        tau_fs: float | None = None,
        spectrum: Spectrum | None = None,
        t_min_fs: float = 0.0,
        t_max_fs: float = 100.0,
        fit_gamma_offset: bool = False,
        grid_nodes: int = 512,
        max_iterations: int = 200,
    ):
        self.nu0_thz = nu0_thz
        self.tau_fs = tau_fs
        self.spectrum = spectrum
        self.t_min_fs = t_min_fs
        self.t_max_fs = t_max_fs
        self.fit_gamma_offset = fit_gamma_offset
        self.grid_nodes = grid_nodes
        self.max_iterations = max_iterations

    def _model(self) -> SpectrumLike:
        if self.spectrum is not None:
            if self.nu0_thz is not None or self.tau_fs is not None:
                raise ValueError("give either spectrum or (nu0_thz, tau_fs), not both")
            return self.spectrum
        if self.nu0_thz is None or self.tau_fs is None:
            raise ValueError("either spectrum or both nu0_thz and tau_fs are required")
        return GaussianPulse(nu0_thz=self.nu0_thz, tau_fs=self.tau_fs)

    @staticmethod
    def _angles(X) -> np.ndarray:
        arr = np.asarray(X, dtype=float)
        if arr.ndim == 2 and arr.shape[1] == 1:
            arr = arr[:, 0]
        if arr.ndim != 1:
            raise ValueError("X must have shape (n,) or (n, 1)")
        if not np.all(np.isfinite(arr)):
            raise ValueError("X must be finite")
        return arr

    def fit(self, X, y):
        angles = self._angles(X)
        target = np.asarray(y, dtype=float)
        if target.ndim == 1:
            shift, loss = target, None
        elif target.ndim == 2 and target.shape[1] == 2:
            shift, loss = target[:, 0], target[:, 1]
        else:
            raise ValueError("y must have shape (n,) or (n, 2)")
        problem = FitProblem(
            gamma_rad=angles,
            shift_thz=shift,
            loss_db=loss,
            input_spectrum=self._model(),
            t_bracket=(self.t_min_fs, self.t_max_fs),
            fit_gamma_offset=self.fit_gamma_offset,
        )
        result = fit_delay(
            problem,
            grid_nodes=self.grid_nodes,
            max_iterations=self.max_iterations,
        )
        self.result_ = result
        self.delay_fs_ = result.t_hat_fs
        self.gamma_offset_rad_ = result.gamma_offset_rad
        self.residual_norm_ = result.residual_norm
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "delay_fs_")
        angles = self._angles(X) + self.gamma_offset_rad_
        shifts, _, _ = _model_curves(self._model(), self.delay_fs_, angles)
        return shifts


def read_fit_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read ``gamma_rad,delta_f_thz,loss_db`` data (NaN for blanks).

    Extra columns (e.g. sweep flags) are ignored; non-finite cells are
    treated as missing.
    """
    gammas: list[float] = []
    shifts: list[float] = []
    losses: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"gamma_rad", "delta_f_thz", "loss_db"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns {sorted(required)}")
        for rec in reader:
            gammas.append(float(rec["gamma_rad"]))
            shifts.append(_cell_to_float(rec["delta_f_thz"]))
            losses.append(_cell_to_float(rec["loss_db"]))
    return np.array(gammas), np.array(shifts), np.array(losses)


def _cell_to_float(cell: str) -> float:
    if cell is None or cell.strip() == "":
        return math.nan
    value = float(cell)
    return value if math.isfinite(value) else math.nan


def write_fit_csv(path, gammas, shifts=None, losses=None) -> None:
    """Write fit data; missing values become empty cells."""
    gammas = np.asarray(gammas, dtype=float)
    n = gammas.shape[0]

    def cell(values, i) -> str:
        if values is None:
            return ""
        v = float(np.asarray(values, dtype=float)[i])
        return repr(v) if math.isfinite(v) else ""

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["gamma_rad", "delta_f_thz", "loss_db"])
        for i in range(n):
            writer.writerow([repr(float(gammas[i])), cell(shifts, i), cell(losses, i)])
