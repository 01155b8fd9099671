"""Command-line interface for spectra, sweeps, fits and noise studies.

Every flag carries its unit in its name (``--tau-fs``, ``--nu0-thz``,
``--delay-as``, ...).  A flat ``key = value`` config file may supply any
long flag of the chosen command (keys are the flag names without the
leading dashes); explicit command-line flags override the file.

Commands and their outputs (all placed in ``--out-dir``):

* ``simulate``    transmitted spectra at given angles -> ``spectra.csv``, ``report.json``
* ``sweep``       observables vs analyzer angle       -> ``sweep.csv``, ``report.json``
* ``fit``         delay fit from measured data        -> ``fit.json``
* ``montecarlo``  jitter propagation at one angle     -> ``montecarlo.json``
* ``regimes``     loss-budget working points          -> ``regimes.json``

``--svg`` additionally writes ``plot.svg``.  Numeric output is written
with full round-trip precision and no timestamps, so identical inputs
and seeds reproduce byte-identical files.

Exit codes: 0 success; 2 usage errors; 3 conflicting or missing
pulse/delay sources; 4 invalid values or unreadable inputs; 5 numerical
domain errors; 6 infeasible loss budget; 7 output write failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .errors import (
    AllSamplesSingular,
    DegenerateBracket,
    DenominatorBelowFloor,
    EnergyBelowFloor,
    InfeasibleBudget,
    NonlinearRegime,
)
from .estimator import FitProblem, fit_delay, read_fit_csv
from .forward import (
    InterferometerConfig,
    delay_from_arm_lengths,
    gamma_factor,
    observables_numeric,
    output_spectrum,
)
from .noise import NoiseModel, monte_carlo_observables
from .regimes import gamma_sweep, max_shift_at_loss_budget, minimum_loss_db
from .spectra import (
    GaussianPulse,
    InstrumentModel,
    Spectrum,
    as_spectrum,
    bandwidth_nm_to_thz,
    centroid,
    convolve_instrument,
    frequency_to_wavelength,
    read_spectrum_csv,
)
from .svgplot import Panel, Series, write_chart

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOURCES = 3
EXIT_INVALID = 4
EXIT_DOMAIN = 5
EXIT_BUDGET = 6
EXIT_OUTPUT = 7

_DOMAIN_ERRORS = (
    EnergyBelowFloor,
    DenominatorBelowFloor,
    AllSamplesSingular,
    DegenerateBracket,
    NonlinearRegime,
)


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fmt(value: float) -> str:
    return repr(float(value))


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value file supplying flag defaults")
    parser.add_argument("--out-dir", default=".", help="directory for output files")
    parser.add_argument("--svg", action="store_true", help="also write plot.svg")


def _add_pulse(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("pulse source (Gaussian flags or a file)")
    group.add_argument("--tau-fs", type=float, help="Gaussian pulse FWHM duration (fs)")
    group.add_argument("--nu0-thz", type=float, help="Gaussian pulse centre frequency (THz)")
    group.add_argument("--spectrum-file", help="measured spectrum CSV (frequency_thz,density)")


def _add_delay(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("differential delay (exactly one)")
    group.add_argument("--delay-fs", type=float, help="delay T = T1-T2 (fs)")
    group.add_argument("--delay-as", type=float, help="delay T (attoseconds)")
    group.add_argument(
        "--arm-lengths-mm",
        type=float,
        nargs=2,
        metavar=("D1", "D2"),
        help="double-pass arm lengths (mm); T_i = 2 d_i / c",
    )


def _add_instrument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--resolution-nm",
        type=float,
        help="instrument resolution FWHM in nm at the pulse centre wavelength",
    )


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="weakshift",
        description="Spectral-shift interferometry: forward model, sweeps, fits.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    table: dict[str, argparse.ArgumentParser] = {}

    p = subs.add_parser("simulate", help="transmitted spectra at given analyzer angles")
    _add_pulse(p)
    _add_delay(p)
    _add_instrument(p)
    p.add_argument(
        "--gamma-rad",
        type=_float_list,
        required=True,
        help="analyzer angle(s), comma-separated (rad)",
    )
    _add_common(p)
    table["simulate"] = p

    p = subs.add_parser("sweep", help="shift and loss over a range of analyzer angles")
    _add_pulse(p)
    _add_delay(p)
    p.add_argument("--gamma-min-rad", type=float, default=-math.pi)
    p.add_argument("--gamma-max-rad", type=float, default=math.pi)
    p.add_argument("--gamma-steps", type=int, default=361)
    _add_common(p)
    table["sweep"] = p

    p = subs.add_parser("fit", help="estimate the delay from measured data")
    _add_pulse(p)
    p.add_argument("--data", required=True, help="CSV: gamma_rad,delta_f_thz,loss_db")
    p.add_argument("--t-min-fs", type=float, default=0.0, help="delay bracket lower edge")
    p.add_argument("--t-max-fs", type=float, default=100.0, help="delay bracket upper edge")
    p.add_argument("--fit-gamma-offset", action="store_true", help="also fit an angle offset")
    p.add_argument("--refits", type=int, default=0, help="bootstrap refits for uncertainty")
    p.add_argument("--refit-seed", type=int, default=0)
    _add_common(p)
    table["fit"] = p

    p = subs.add_parser("montecarlo", help="propagate analyzer jitter at one angle")
    _add_pulse(p)
    _add_delay(p)
    _add_instrument(p)
    p.add_argument("--gamma-rad", type=float, required=True, help="nominal analyzer angle (rad)")
    p.add_argument("--jitter-sigma-rad", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scans", type=int, default=1, help="scans averaged per sample")
    p.add_argument("--workers", type=int, default=1, help="parallel sample workers")
    _add_common(p)
    table["montecarlo"] = p

    p = subs.add_parser("regimes", help="minimum loss, budget point and global maximum")
    _add_pulse(p)
    _add_delay(p)
    p.add_argument("--budget-db", type=float, default=12.0, help="loss budget (dB)")
    p.add_argument("--threshold-db", type=float, default=12.0, help="regime threshold (dB)")
    _add_common(p)
    table["regimes"] = p

    return parser, table


def _read_config(path: str) -> dict[str, str]:
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise _CliError(EXIT_INVALID, f"cannot read config file: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise _CliError(EXIT_INVALID, f"{path}:{lineno}: expected 'key = value'")
        key, value = text.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _apply_config(
    sub: argparse.ArgumentParser, config: dict[str, str]
) -> None:
    by_option = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                by_option[opt[2:]] = action
    defaults = {}
    for key, raw in config.items():
        if key == "config":
            raise _CliError(EXIT_INVALID, "config files cannot nest 'config'")
        action = by_option.get(key)
        if action is None:
            raise _CliError(EXIT_INVALID, f"unknown config key {key!r}")
        try:
            if isinstance(action, argparse._StoreTrueAction):
                defaults[action.dest] = raw.lower() in ("1", "true", "yes", "on")
            elif action.nargs == 2:
                parts = raw.replace(",", " ").split()
                if len(parts) != 2:
                    raise ValueError("expected two values")
                defaults[action.dest] = [float(p) for p in parts]
            elif action.type is not None:
                defaults[action.dest] = action.type(raw)
            else:
                defaults[action.dest] = raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise _CliError(EXIT_INVALID, f"config key {key!r}: {exc}") from exc
    sub.set_defaults(**defaults)


class _Outputs:
    """Tracks written files so failures leave no partial outputs."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.paths: list[str] = []
        try:
            os.makedirs(out_dir, exist_ok=True)
        except OSError as exc:
            raise _CliError(EXIT_OUTPUT, f"cannot create out-dir: {exc}") from exc

    def path(self, name: str) -> str:
        full = os.path.join(self.out_dir, name)
        self.paths.append(full)
        return full

    def discard(self) -> None:
        for p in self.paths:
            try:
                if os.path.exists(p):
                    os.remove(p)
            except OSError:
                pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_model(args, warnings: list[str]):
    """Pulse model plus an echo dict of how it was specified."""
    gauss_given = args.tau_fs is not None or args.nu0_thz is not None
    file_given = getattr(args, "spectrum_file", None) is not None
    if gauss_given and file_given:
        raise _CliError(
            EXIT_SOURCES, "conflicting pulse sources: --tau-fs/--nu0-thz and --spectrum-file"
        )
    if file_given:
        try:
            loaded = read_spectrum_csv(args.spectrum_file)
        except OSError as exc:
            raise _CliError(EXIT_INVALID, f"cannot read spectrum file: {exc}") from exc
        except ValueError as exc:
            raise _CliError(EXIT_INVALID, f"bad spectrum file: {exc}") from exc
        if loaded.clamped:
            warnings.append(f"clamped {loaded.clamped} negative densities to zero")
        return loaded.spectrum, {"spectrum_file": args.spectrum_file}
    if not gauss_given:
        raise _CliError(
            EXIT_SOURCES, "no pulse source: give --tau-fs with --nu0-thz, or --spectrum-file"
        )
    if args.tau_fs is None or args.nu0_thz is None:
        raise _CliError(EXIT_SOURCES, "a Gaussian pulse needs both --tau-fs and --nu0-thz")
    try:
        pulse = GaussianPulse(nu0_thz=args.nu0_thz, tau_fs=args.tau_fs)
    except ValueError as exc:
        raise _CliError(EXIT_INVALID, str(exc)) from exc
    return pulse, {"tau_fs": args.tau_fs, "nu0_thz": args.nu0_thz}


def _resolve_delay(args) -> tuple[float, float]:
    """Arm delays (T1, T2) in fs from exactly one delay flag."""
    sources = [
        args.delay_fs is not None,
        args.delay_as is not None,
        args.arm_lengths_mm is not None,
    ]
    if sum(sources) == 0:
        raise _CliError(
            EXIT_SOURCES, "missing delay: give --delay-fs, --delay-as or --arm-lengths-mm"
        )
    if sum(sources) > 1:
        raise _CliError(EXIT_SOURCES, "conflicting delay flags: give exactly one")
    if args.delay_fs is not None:
        return float(args.delay_fs), 0.0
    if args.delay_as is not None:
        return float(args.delay_as) * 1.0e-3, 0.0
    d1, d2 = args.arm_lengths_mm
    return delay_from_arm_lengths(float(d1), float(d2))


def _model_center_thz(model) -> float:
    if isinstance(model, GaussianPulse):
        return model.nu0_thz
    return centroid(model)


def _resolve_instrument(args, model, scans: int = 1) -> tuple[InstrumentModel, dict]:
    resolution_nm = getattr(args, "resolution_nm", None)
    if resolution_nm is None:
        return InstrumentModel(0.0, scans), {"resolution_nm": None, "resolution_thz": 0.0}
    try:
        lam = frequency_to_wavelength(_model_center_thz(model))
        res_thz = bandwidth_nm_to_thz(resolution_nm, lam)
        instrument = InstrumentModel(res_thz, scans)
    except ValueError as exc:
        raise _CliError(EXIT_INVALID, str(exc)) from exc
    return instrument, {"resolution_nm": resolution_nm, "resolution_thz": res_thz}


def _derived(model, t1: float, t2: float) -> dict:
    s = as_spectrum(model)
    info = {
        "delay1_fs": t1,
        "delay2_fs": t2,
        "delay_fs": t1 - t2,
        "grid_start_thz": s.grid.start_thz,
        "grid_step_thz": s.grid.step_thz,
        "grid_count": s.grid.count,
    }
    if isinstance(model, GaussianPulse):
        info["gamma_factor"] = gamma_factor(t1 - t2, model.tau_fs)
    return info


def _run_simulate(args, outputs: _Outputs) -> dict:
    warnings: list[str] = []
    model, pulse_echo = _resolve_model(args, warnings)
    t1, t2 = _resolve_delay(args)
    instrument, res_echo = _resolve_instrument(args, model)
    gammas = list(args.gamma_rad)
    if not gammas:
        raise _CliError(EXIT_INVALID, "--gamma-rad needs at least one angle")

    s_in = convolve_instrument(as_spectrum(model), instrument)
    outs: list[Spectrum] = []
    summaries = []
    for g in gammas:
        config = InterferometerConfig(t1, t2, g)
        out = convolve_instrument(output_spectrum(as_spectrum(model), config), instrument)
        outs.append(out)
        try:
            obs = observables_numeric(as_spectrum(model), config)
            summaries.append(
                {"gamma_rad": g, "delta_f_thz": obs.delta_f_thz, "loss_db": obs.loss_db}
            )
        except EnergyBelowFloor:
            warnings.append(f"gamma={g!r}: output energy below floor; observables undefined")
            summaries.append({"gamma_rad": g, "delta_f_thz": None, "loss_db": "inf"})

    csv_path = outputs.path("spectra.csv")
    header = ["frequency_thz", "density_in"]
    if len(outs) == 1:
        header.append("density_out")
    else:
        header.extend(f"density_out_{i + 1}" for i in range(len(outs)))
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        nodes = s_in.grid.nodes()
        for i in range(s_in.grid.count):
            row = [_fmt(nodes[i]), _fmt(s_in.values[i])]
            row.extend(_fmt(o.values[i]) for o in outs)
            writer.writerow(row)

    if args.svg:
        panel = Panel("Transmitted spectra", "frequency (THz)", "density (arb.)")
        panel.series.append(Series("input", list(s_in.grid.nodes()), list(s_in.values)))
        for g, o in zip(gammas, outs):
            panel.series.append(
                Series(f"gamma={g:g} rad", list(o.grid.nodes()), list(o.values))
            )
        write_chart(outputs.path("plot.svg"), [panel])

    report = {
        "command": "simulate",
        "inputs": {**pulse_echo, **res_echo, "gamma_rad": gammas},
        "derived": _derived(model, t1, t2),
        "results": {"observables": summaries},
        "warnings": warnings,
    }
    _write_json(outputs.path("report.json"), report)
    return report


def _run_sweep(args, outputs: _Outputs) -> dict:
    warnings: list[str] = []
    model, pulse_echo = _resolve_model(args, warnings)
    t1, t2 = _resolve_delay(args)
    if args.gamma_steps < 2:
        raise _CliError(EXIT_INVALID, "--gamma-steps must be >= 2")
    if not args.gamma_min_rad < args.gamma_max_rad:
        raise _CliError(EXIT_INVALID, "--gamma-min-rad must be below --gamma-max-rad")
    sweep = gamma_sweep(
        model, t1 - t2, (args.gamma_min_rad, args.gamma_max_rad), args.gamma_steps
    )

    csv_path = outputs.path("sweep.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["gamma_rad", "delta_f_thz", "loss_db", "flags"])
        for g, s, l, bad in zip(
            sweep.gammas_rad, sweep.shifts_thz, sweep.losses_db, sweep.singular
        ):
            shift_cell = _fmt(s) if math.isfinite(s) else ""
            loss_cell = _fmt(l) if math.isfinite(l) else "inf"
            writer.writerow([_fmt(g), shift_cell, loss_cell, "singular" if bad else "ok"])

    n_singular = int(np.count_nonzero(sweep.singular))
    if n_singular:
        warnings.append(f"{n_singular} singular angles flagged in sweep.csv")
    finite = np.isfinite(sweep.shifts_thz)
    results = {
        "model_tag": sweep.model_tag,
        "points": int(sweep.gammas_rad.size),
        "singular_points": n_singular,
        "max_abs_shift_thz": float(np.max(np.abs(sweep.shifts_thz[finite]))) if finite.any() else None,
        "min_loss_db": float(np.min(sweep.losses_db)),
    }

    if args.svg:
        shift_panel = Panel("Centroid shift vs analyzer angle", "gamma (rad)", "shift (THz)")
        shift_panel.series.append(
            Series("shift", list(sweep.gammas_rad), list(sweep.shifts_thz))
        )
        loss_panel = Panel("Loss vs analyzer angle", "gamma (rad)", "loss (dB)")
        loss_panel.series.append(
            Series("loss", list(sweep.gammas_rad), list(sweep.losses_db))
        )
        write_chart(outputs.path("plot.svg"), [shift_panel, loss_panel])

    report = {
        "command": "sweep",
        "inputs": {
            **pulse_echo,
            "gamma_min_rad": args.gamma_min_rad,
            "gamma_max_rad": args.gamma_max_rad,
            "gamma_steps": args.gamma_steps,
        },
        "derived": _derived(model, t1, t2),
        "results": results,
        "warnings": warnings,
    }
    _write_json(outputs.path("report.json"), report)
    return report


def _run_fit(args, outputs: _Outputs) -> dict:
    warnings: list[str] = []
    model, pulse_echo = _resolve_model(args, warnings)
    try:
        gammas, shifts, losses = read_fit_csv(args.data)
    except OSError as exc:
        raise _CliError(EXIT_INVALID, f"cannot read data file: {exc}") from exc
    except ValueError as exc:
        raise _CliError(EXIT_INVALID, f"bad data file: {exc}") from exc

    shift_arr = shifts if np.any(np.isfinite(shifts)) else None
    loss_arr = losses if np.any(np.isfinite(losses)) else None
    try:
        problem = FitProblem(
            gamma_rad=gammas,
            shift_thz=shift_arr,
            loss_db=loss_arr,
            input_spectrum=model,
            t_bracket=(args.t_min_fs, args.t_max_fs),
            fit_gamma_offset=args.fit_gamma_offset,
        )
    except (ValueError, TypeError) as exc:
        raise _CliError(EXIT_INVALID, str(exc)) from exc
    result = fit_delay(
        problem,
        uncertainty_refits=args.refits,
        uncertainty_seed=args.refit_seed,
    )
    if not result.converged:
        warnings.append("refinement hit the iteration cap; fit did not converge")

    payload = {
        "command": "fit",
        "inputs": {
            **pulse_echo,
            "data": args.data,
            "t_min_fs": args.t_min_fs,
            "t_max_fs": args.t_max_fs,
            "fit_gamma_offset": args.fit_gamma_offset,
            "refits": args.refits,
        },
        "results": {
            "t_hat_fs": result.t_hat_fs,
            "gamma_offset_rad": result.gamma_offset_rad,
            "residual_norm": result.residual_norm,
            "shift_rms_thz": result.shift_rms_thz,
            "loss_rms_db": result.loss_rms_db,
            "iterations": result.iterations,
            "converged": result.converged,
            "candidates_fs": list(result.candidates_fs),
            "uncertainty": None
            if result.uncertainty is None
            else {
                "mean_fs": result.uncertainty.mean,
                "std_fs": result.uncertainty.std,
                "refits": result.uncertainty.sample_count,
            },
        },
        "warnings": warnings,
    }
    _write_json(outputs.path("fit.json"), payload)

    if args.svg:
        from .estimator import _model_curves  # dense fitted curves for plotting

        dense = np.linspace(float(np.min(gammas)), float(np.max(gammas)), 721)
        m_shift, m_loss, _ = _model_curves(
            model, result.t_hat_fs, dense + result.gamma_offset_rad
        )
        panels = []
        if shift_arr is not None:
            panel = Panel("Shift data and fit", "gamma (rad)", "shift (THz)")
            panel.series.append(Series("fit", list(dense), list(m_shift)))
            panel.series.append(Series("data", list(gammas), list(shift_arr), markers=True))
            panels.append(panel)
        if loss_arr is not None:
            panel = Panel("Loss data and fit", "gamma (rad)", "loss (dB)")
            panel.series.append(Series("fit", list(dense), list(m_loss)))
            panel.series.append(Series("data", list(gammas), list(loss_arr), markers=True))
            panels.append(panel)
        write_chart(outputs.path("plot.svg"), panels)
    return payload


def _run_montecarlo(args, outputs: _Outputs) -> dict:
    warnings: list[str] = []
    model, pulse_echo = _resolve_model(args, warnings)
    t1, t2 = _resolve_delay(args)
    if args.samples < 1:
        raise _CliError(EXIT_INVALID, "--samples must be >= 1")
    if args.workers < 1:
        raise _CliError(EXIT_INVALID, "--workers must be >= 1")
    instrument, res_echo = _resolve_instrument(args, model, scans=args.scans)
    try:
        noise = NoiseModel(
            gamma_jitter_sigma_rad=args.jitter_sigma_rad,
            instrument=instrument,
            seed=args.seed,
            samples=args.samples,
        )
    except ValueError as exc:
        raise _CliError(EXIT_INVALID, str(exc)) from exc
    delta_f, loss = monte_carlo_observables(
        model, t1 - t2, args.gamma_rad, noise, workers=args.workers
    )
    excluded = args.samples - delta_f.sample_count
    if excluded:
        warnings.append(f"excluded {excluded} singular samples")

    payload = {
        "command": "montecarlo",
        "inputs": {
            **pulse_echo,
            **res_echo,
            "gamma_rad": args.gamma_rad,
            "jitter_sigma_rad": args.jitter_sigma_rad,
            "samples": args.samples,
            "seed": args.seed,
            "scans": args.scans,
        },
        "derived": _derived(model, t1, t2),
        "results": {
            "delta_f_thz": {"mean": delta_f.mean, "std": delta_f.std},
            "loss_db": {"mean": loss.mean, "std": loss.std},
            "included_samples": delta_f.sample_count,
            "excluded_samples": excluded,
        },
        "warnings": warnings,
    }
    _write_json(outputs.path("montecarlo.json"), payload)
    return payload


def _run_regimes(args, outputs: _Outputs) -> dict:
    warnings: list[str] = []
    model, pulse_echo = _resolve_model(args, warnings)
    t1, t2 = _resolve_delay(args)
    delay = t1 - t2

    def point_dict(point) -> dict:
        return {
            "gamma_rad": point.gamma_rad,
            "delta_f_thz": point.shift_thz,
            "loss_db": point.loss_db,
            "regime_tag": point.regime_tag,
        }

    budget_point = max_shift_at_loss_budget(
        model, delay, args.budget_db, threshold_db=args.threshold_db
    )
    global_point = max_shift_at_loss_budget(
        model, delay, math.inf, threshold_db=args.threshold_db
    )
    payload = {
        "command": "regimes",
        "inputs": {
            **pulse_echo,
            "budget_db": args.budget_db,
            "threshold_db": args.threshold_db,
        },
        "derived": _derived(model, t1, t2),
        "results": {
            "minimum_loss_db": minimum_loss_db(model, delay),
            "within_budget": point_dict(budget_point),
            "global_maximum": point_dict(global_point),
        },
        "warnings": warnings,
    }
    _write_json(outputs.path("regimes.json"), payload)
    return payload


_RUNNERS = {
    "simulate": _run_simulate,
    "sweep": _run_sweep,
    "fit": _run_fit,
    "montecarlo": _run_montecarlo,
    "regimes": _run_regimes,
}


def main(argv=None) -> int:
    parser, table = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code) if exc.code is not None else EXIT_OK

    outputs = None
    try:
        if args.config:
            _apply_config(table[args.command], _read_config(args.config))
            try:
                args = parser.parse_args(argv)
            except SystemExit as exc:
                return int(exc.code) if exc.code is not None else EXIT_OK
        outputs = _Outputs(args.out_dir)
        _RUNNERS[args.command](args, outputs)
        return EXIT_OK
    except _CliError as exc:
        print(f"weakshift {args.command}: {exc}", file=sys.stderr)
        if outputs is not None:
            outputs.discard()
        return exc.code
    except InfeasibleBudget as exc:
        print(f"weakshift {args.command}: {exc}", file=sys.stderr)
        if outputs is not None:
            outputs.discard()
        return EXIT_BUDGET
    except _DOMAIN_ERRORS as exc:
        print(f"weakshift {args.command}: {exc}", file=sys.stderr)
        if outputs is not None:
            outputs.discard()
        return EXIT_DOMAIN
    except (ValueError, TypeError) as exc:
        print(f"weakshift {args.command}: {exc}", file=sys.stderr)
        if outputs is not None:
            outputs.discard()
        return EXIT_INVALID
    except OSError as exc:
        print(f"weakshift {args.command}: {exc}", file=sys.stderr)
        if outputs is not None:
            outputs.discard()
        return EXIT_OUTPUT


if __name__ == "__main__":
    raise SystemExit(main())
