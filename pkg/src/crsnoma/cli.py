"""Experiment sweeps, figure presets, slope fitting and tabular output.

A run is configured by a single flat JSON document whose keys mirror the
``SystemConfig`` and ``SweepSpec`` field names; unknown keys are rejected so
a misspelled gain cannot silently shift results.  Output is RFC-4180 CSV
plus an optional JSON document with run metadata.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from . import __version__
from .analytic import (
    Method,
    outage_report,
    rate_report,
)
from .model import Combiner, ConfigError, SystemConfig, q_from_db
from .optimizer import PowerSearchSpec, optimize_a2
from .quad_oracle import ToleranceError, quad_rate_s1, quad_rate_s2
from .simulator import Scheme, mc_estimates
from .specfun import ContourError, ConvergenceError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

CSV_COLUMNS = [
    "q_db", "q_lin", "scheme", "combiner", "n_r", "n_d", "method", "metric",
    "value", "std_err", "a2", "n_trials", "seed", "omega_sp", "omega_rp",
    "asymptote_exponent", "error",
]

RATE_METRIC = "rate"
OUTAGE_METRIC = "outage"


class InsufficientDataError(ValueError):
    """Not enough large-Q rows to fit an outage slope."""


@dataclass(frozen=True)
class SweepSpec:
    q_db_min: float = -10.0
    q_db_max: float = 30.0
    q_db_step: float = 2.0
    schemes: tuple = (Scheme.NOMA, Scheme.OMA)
    combiners: tuple = (Combiner.SINGLE,)
    antenna_sets: tuple = ((1, 1),)
    methods: tuple = (Method.CLOSED_FORM, Method.MONTE_CARLO)
    metrics: tuple = (RATE_METRIC,)
    n_trials: int = 100_000
    seed: int = 2024
    optimize_a2: bool = True
    m_points: int = 24
    workers: int = 1

    def __post_init__(self):
        if self.q_db_min > self.q_db_max:
            raise ConfigError("q_db_min must not exceed q_db_max")
        if self.q_db_step <= 0:
            raise ConfigError("q_db_step must be positive")
        for metric in self.metrics:
            if metric not in (RATE_METRIC, OUTAGE_METRIC):
                raise ConfigError(f"unknown metric {metric!r}")

    def q_db_grid(self):
        count = int(round((self.q_db_max - self.q_db_min) / self.q_db_step)) + 1
        return [self.q_db_min + i * self.q_db_step for i in range(count)]


def _blank_row(q_db, cfg, scheme):
    return {
        "q_db": q_db,
        "q_lin": q_from_db(q_db),
        "scheme": scheme.value,
        "combiner": cfg.combiner.value,
        "n_r": cfg.n_r,
        "n_d": cfg.n_d,
        "method": "",
        "metric": "",
        "value": "",
        "std_err": "",
        "a2": cfg.a2 if scheme is Scheme.NOMA else "",
        "n_trials": "",
        "seed": "",
        "omega_sp": cfg.omega_sp,
        "omega_rp": cfg.omega_rp,
        "asymptote_exponent": "",
        "error": "",
    }


def _emit(rows, base, method, metric, value, std_err="", mc_info=None,
          error=""):
    row = dict(base)
    row["method"] = method.value if isinstance(method, Method) else method
    row["metric"] = metric
    row["value"] = value
    row["std_err"] = std_err
    if mc_info is not None:
        row["n_trials"], row["seed"] = mc_info
    if metric.startswith("outage"):
        row["asymptote_exponent"] = -min(row["n_r"], row["n_d"])
    row["error"] = error
    rows.append(row)


def _noma_rows(rows, base, cfg, method, metrics, spec):
    if method is Method.CLOSED_FORM:
        if RATE_METRIC in metrics:
            report = rate_report(cfg)
            for name, value in (("rate_s1", report.c_s1),
                                ("rate_s2", report.c_s2),
                                ("rate_sum", report.c_sum)):
                _emit(rows, base, report.method, name, value)
        if OUTAGE_METRIC in metrics:
            report = outage_report(cfg)
            _emit(rows, base, report.method, "outage_s1", report.p_out_s1)
            _emit(rows, base, report.method, "outage_s2", report.p_out_s2)
    elif method is Method.QUADRATURE:
        if RATE_METRIC in metrics:
            c1 = quad_rate_s1(cfg)
            c2 = quad_rate_s2(cfg)
            for name, value in (("rate_s1", c1), ("rate_s2", c2),
                                ("rate_sum", c1 + c2)):
                _emit(rows, base, method, name, value)
    else:
        est = mc_estimates(cfg, Scheme.NOMA, spec.n_trials, spec.seed,
                           spec.workers)
        info = (spec.n_trials, spec.seed)
        if RATE_METRIC in metrics:
            for name in ("rate_s1", "rate_s2", "rate_sum"):
                _emit(rows, base, method, name, est[name].mean,
                      est[name].std_err, info)
        if OUTAGE_METRIC in metrics:
            for name in ("outage_s1", "outage_s2"):
                _emit(rows, base, method, name, est[name].mean,
                      est[name].std_err, info)


def _oma_rows(rows, base, cfg, method, metrics, spec):
    if method is not Method.MONTE_CARLO:
        return  # no closed forms or quadrature for the slot-combined baseline
    est = mc_estimates(cfg, Scheme.OMA, spec.n_trials, spec.seed, spec.workers)
    info = (spec.n_trials, spec.seed)
    if RATE_METRIC in metrics:
        _emit(rows, base, method, "rate_oma", est["rate"].mean,
              est["rate"].std_err, info)
    if OUTAGE_METRIC in metrics:
        _emit(rows, base, method, "outage_oma", est["outage"].mean,
              est["outage"].std_err, info)


def run_sweep(spec: SweepSpec, cfg_base: SystemConfig):
    """One row per (Q, scheme, combiner, antennas, method, metric).

    Per-row failures are recorded in the error column and the sweep
    continues.  NOMA rows use the per-Q optimized a2 when
    ``spec.optimize_a2`` is set.
    """
    rows = []
    a2_cache = {}
    search = PowerSearchSpec(m_points=spec.m_points)
    for q_db in spec.q_db_grid():
        q_lin = q_from_db(q_db)
        for n_r, n_d in spec.antenna_sets:
            for combiner in spec.combiners:
                if combiner is Combiner.SINGLE and (n_r, n_d) != (1, 1):
                    continue
                cfg_point = replace(cfg_base, q_peak=q_lin, n_r=n_r, n_d=n_d,
                                    combiner=combiner)
                for scheme in spec.schemes:
                    cfg_run = cfg_point
                    if scheme is Scheme.NOMA and spec.optimize_a2:
                        key = (q_db, combiner, n_r, n_d)
                        if key not in a2_cache:
                            a2_cache[key] = optimize_a2(cfg_point, search)[0]
                        a2 = a2_cache[key]
                        cfg_run = replace(cfg_point, a1=1.0 - a2, a2=a2)
                    base = _blank_row(q_db, cfg_run, scheme)
                    for method in spec.methods:
                        try:
                            if scheme is Scheme.NOMA:
                                _noma_rows(rows, base, cfg_run, method,
                                           spec.metrics, spec)
                            else:
                                _oma_rows(rows, base, cfg_run, method,
                                          spec.metrics, spec)
                        except Exception as exc:
                            _emit(rows, base, method, "error", "",
                                  error=f"{type(exc).__name__}: {exc}")
    return rows


def fit_outage_slope(rows, q_db_window: float = 40.0):
    """Least-squares log10-log10 outage slope per (scheme, combiner, antennas, symbol).

    Only rows with Q >= ``q_db_window`` dB enter the fit; a group needs at
    least 4 such rows.  Raises :class:`InsufficientDataError` when no group
    qualifies.
    """
    groups = {}
    for row in rows:
        metric = str(row.get("metric", ""))
        if not metric.startswith("outage"):
            continue
        if str(row.get("error", "")):
            continue
        q_db = float(row["q_db"])
        value = float(row["value"]) if row["value"] != "" else 0.0
        if q_db < q_db_window or value <= 0.0:
            continue
        key = (str(row["scheme"]), str(row["combiner"]), int(row["n_r"]),
               int(row["n_d"]), str(row["method"]), metric)
        groups.setdefault(key, []).append((float(row["q_lin"]), value))
    fits = []
    for key, points in sorted(groups.items()):
        if len(points) < 4:
            continue
        log_q = np.log10([p[0] for p in points])
        log_p = np.log10([p[1] for p in points])
        slope = float(np.polyfit(log_q, log_p, 1)[0])
        scheme, combiner, n_r, n_d, method, metric = key
        expected = -min(n_r, n_d)
        fits.append({
            "scheme": scheme, "combiner": combiner, "n_r": n_r, "n_d": n_d,
            "method": method, "metric": metric, "n_points": len(points),
            "slope": slope, "expected": expected,
            "deviation": slope - expected,
        })
    if not fits:
        raise InsufficientDataError(
            f"no outage series has >= 4 rows at Q >= {q_db_window:g} dB")
    return fits


# ---------------------------------------------------------------------------
# configuration documents and presets

_VI_BASE = {
    "omega_sr": 10.0, "omega_sd": 1.0, "omega_rd": 10.0,
    "omega_sp": 5.5, "omega_rp": 5.5,
    "q_peak": 10.0, "a1": 0.8, "a2": 0.2,
    "n_r": 1, "n_d": 1, "r1": 1.0, "r2": 1.0, "combiner": "single",
}

PRESETS = {
    # reconstructed sweep grids; the figure axes are not recoverable exactly
    "fig2": {
        "sweep": {"q_db_min": -10, "q_db_max": 30, "q_db_step": 2,
                  "schemes": ["noma", "oma"], "combiners": ["single"],
                  "antenna_sets": [[1, 1]],
                  "methods": ["closed_form", "monte_carlo"],
                  "metrics": ["rate"]},
        "variants": [{}],
    },
    "fig3": {
        "sweep": {"q_db_min": -10, "q_db_max": 30, "q_db_step": 2,
                  "schemes": ["noma"], "combiners": ["single"],
                  "antenna_sets": [[1, 1]], "methods": ["closed_form"],
                  "metrics": ["rate"]},
        "variants": [{"omega_sp": 1.5, "omega_rp": 5.5},
                     {"omega_sp": 5.5, "omega_rp": 1.5},
                     {"omega_sp": 5.5, "omega_rp": 5.5}],
    },
    "fig4": {
        "sweep": {"q_db_min": -10, "q_db_max": 30, "q_db_step": 4,
                  "schemes": ["noma", "oma"], "combiners": ["sc", "mrc"],
                  "antenna_sets": [[2, 2], [3, 3]],
                  "methods": ["closed_form", "monte_carlo"],
                  "metrics": ["rate"]},
        "variants": [{}],
    },
    "fig5": {
        "sweep": {"q_db_min": -10, "q_db_max": 50, "q_db_step": 5,
                  "schemes": ["noma", "oma"],
                  "combiners": ["single", "sc", "mrc"],
                  "antenna_sets": [[1, 1], [2, 2], [3, 3]],
                  "methods": ["closed_form", "monte_carlo"],
                  "metrics": ["outage"]},
        "variants": [{}],
    },
}
PRESETS["fig6"] = PRESETS["fig5"]  # both outage figures share one sweep

_CONFIG_KEYS = set(_VI_BASE)
_SWEEP_KEYS = {
    "q_db_min", "q_db_max", "q_db_step", "schemes", "combiners",
    "antenna_sets", "methods", "metrics", "n_trials", "seed",
    "optimize_a2", "m_points", "workers",
}


def _split_document(doc: dict):
    if not isinstance(doc, dict):
        raise ConfigError("configuration document must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS - _SWEEP_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    cfg = {k: v for k, v in doc.items() if k in _CONFIG_KEYS}
    sweep = {k: v for k, v in doc.items() if k in _SWEEP_KEYS}
    return cfg, sweep


def build_config(doc: dict) -> SystemConfig:
    data = dict(_VI_BASE)
    data.update(doc)
    try:
        data["combiner"] = Combiner(data["combiner"])
    except ValueError as exc:
        raise ConfigError(f"unknown combiner {data['combiner']!r}") from exc
    return SystemConfig(**data)


def build_sweep(doc: dict) -> SweepSpec:
    data = dict(doc)
    try:
        if "schemes" in data:
            data["schemes"] = tuple(Scheme(s) for s in data["schemes"])
        if "combiners" in data:
            data["combiners"] = tuple(Combiner(c) for c in data["combiners"])
        if "methods" in data:
            data["methods"] = tuple(Method(m) for m in data["methods"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if "antenna_sets" in data:
        data["antenna_sets"] = tuple(tuple(int(v) for v in pair)
                                     for pair in data["antenna_sets"])
    if "metrics" in data:
        data["metrics"] = tuple(data["metrics"])
    try:
        return SweepSpec(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, stream) -> None:
    writer = csv.writer(stream)
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_format_cell(row[col]) for col in CSV_COLUMNS])


def _run_metadata(variant_docs, sweep_doc, spec, n_rows):
    canonical = json.dumps({"configs": variant_docs, "sweep": sweep_doc},
                           sort_keys=True)
    return {
        "configs": variant_docs,
        "sweep": sweep_doc,
        "seed": spec.seed,
        "n_trials": spec.n_trials,
        "a2_mode": "per_q_optimized" if spec.optimize_a2 else "fixed",
        "spec_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "versions": {
            "crsnoma": __version__,
            "numpy": np.__version__,
        },
        "rows": n_rows,
    }


# ---------------------------------------------------------------------------
# entry points

_NUMERICAL_ERRORS = (ToleranceError, ContourError, ConvergenceError,
                     ArithmeticError)


def _cmd_run(args) -> int:
    user_doc = _load_json(args.config) if args.config else {}
    user_cfg, user_sweep = _split_document(user_doc)

    preset = PRESETS.get(args.preset) if args.preset else None
    if args.preset and preset is None:
        raise ConfigError(f"unknown preset {args.preset!r}")
    sweep_doc = dict(preset["sweep"]) if preset else {}
    sweep_doc.update(user_sweep)
    variants = [dict(v) for v in preset["variants"]] if preset else [{}]

    if args.seed is not None:
        sweep_doc["seed"] = args.seed
    if args.trials is not None:
        sweep_doc["n_trials"] = args.trials
    if args.workers is not None:
        sweep_doc["workers"] = args.workers

    spec = build_sweep(sweep_doc)
    rows = []
    variant_docs = []
    for variant in variants:
        cfg_doc = dict(user_cfg)
        cfg_doc.update(variant)
        cfg = build_config(cfg_doc)
        variant_docs.append({**_VI_BASE, **cfg_doc})
        rows.extend(run_sweep(spec, cfg))

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            write_csv(rows, handle)
    else:
        write_csv(rows, sys.stdout)
    if args.json:
        meta = _run_metadata(variant_docs, sweep_doc, spec, len(rows))
        with open(args.json, "w", encoding="utf-8") as handle:
            json.dump(meta, handle, indent=2, sort_keys=True)
            handle.write("\n")
    return EXIT_OK


def _cmd_slope(args) -> int:
    try:
        with open(args.infile, "r", encoding="utf-8", newline="") as handle:
            rows = list(csv.DictReader(handle))
    except OSError as exc:
        raise ConfigError(f"cannot read {args.infile}: {exc}") from exc
    fits = fit_outage_slope(rows)
    writer = csv.writer(sys.stdout)
    writer.writerow(["scheme", "combiner", "n_r", "n_d", "method", "metric",
                     "n_points", "slope", "expected", "deviation"])
    for fit in fits:
        writer.writerow([fit["scheme"], fit["combiner"], fit["n_r"],
                         fit["n_d"], fit["method"], fit["metric"],
                         fit["n_points"], repr(fit["slope"]),
                         fit["expected"], repr(fit["deviation"])])
    return EXIT_OK


def _cmd_optimize(args) -> int:
    doc = _load_json(args.config) if args.config else {}
    cfg_doc, sweep_doc = _split_document(doc)
    cfg = build_config(cfg_doc)
    if args.q_db is not None:
        cfg = replace(cfg, q_peak=q_from_db(args.q_db))
    spec = PowerSearchSpec(m_points=int(sweep_doc.get("m_points", 24)))
    best_a2, best_value, curve = optimize_a2(cfg, spec)
    writer = csv.writer(sys.stdout)
    writer.writerow(["a2", "sum_rate"])
    for a2, value in curve:
        writer.writerow([repr(a2), repr(value)])
    writer.writerow([])
    writer.writerow(["best_a2", repr(best_a2)])
    writer.writerow(["best_sum_rate", repr(best_value)])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crsnoma",
        description="Rate and outage sweeps for spectrum-sharing "
                    "cooperative-relaying NOMA under a peak interference "
                    "constraint.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep and emit CSV")
    run.add_argument("--config", help="JSON configuration file")
    run.add_argument("--preset", help="figure preset (fig2..fig6)")
    run.add_argument("--out", help="CSV output path (default stdout)")
    run.add_argument("--json", help="also write run metadata JSON here")
    run.add_argument("--seed", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--workers", type=int)
    run.set_defaults(func=_cmd_run)

    slope = sub.add_parser("slope", help="fit outage slopes from a sweep CSV")
    slope.add_argument("--in", dest="infile", required=True)
    slope.set_defaults(func=_cmd_slope)

    opt = sub.add_parser("optimize", help="grid-search the a2 power weight")
    opt.add_argument("--config", help="JSON configuration file")
    opt.add_argument("--q-db", type=float, dest="q_db",
                     help="peak interference power in dB")
    opt.set_defaults(func=_cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InsufficientDataError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
