"""Scenario sweeps: preset loading, CSV emission, and gnuplot script generation."""

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources

from .bounds import lower_bound_rate
from .config import SETTABLE_KEYS, config_from_dict, set_param, validate_config
from .errors import FormatError, ParameterError
from .rate import ergodic_rate

AXES = ("K", "N", "M", "adc_bits", "snr_db", "pilot_snr_db")
OUTPUT_COLUMNS = ("rate_mc", "ci95", "rate_lb", "rate_lb_s", "xi1", "xi2", "r_inf")
CSV_COLUMNS = (
    "scenario_id", "L", "K", "N", "M", "bits", "B", "tau", "beta",
    "snr_db", "pilot_snr_db", "trials", "seed",
) + OUTPUT_COLUMNS
CSV_UNITS_COMMENT = "# rate columns (rate_mc, ci95, rate_lb, rate_lb_s) in bits/s/Hz, log base 2"

PILOT_RULES = ("tau_times_data",)


@dataclass
class SweepSpec:
    """One swept scenario: a base config, an axis, and optional curve overrides."""

    scenario_id: str
    base: dict
    axis: str
    values: list
    trials: int = 2000
    outputs: tuple = OUTPUT_COLUMNS
    curves: list = field(default_factory=lambda: [{}])
    pilot_rule: str = None
    mode: str = "semi"
    notes: str = ""

    def __post_init__(self):
        if self.axis not in AXES:
            raise ParameterError(f"unknown sweep axis {self.axis!r}; choose from {AXES}")
        if not self.values:
            raise ParameterError("sweep values must be non-empty")
        bad = [o for o in self.outputs if o not in OUTPUT_COLUMNS]
        if bad:
            raise ParameterError(f"unknown output columns {bad}")
        if self.pilot_rule is not None and self.pilot_rule not in PILOT_RULES:
            raise ParameterError(f"unknown pilot rule {self.pilot_rule!r}")
        unknown = set(self.base) - SETTABLE_KEYS
        if unknown:
            raise ParameterError(f"unknown base config keys {sorted(unknown)}")


def load_sweep_spec(path):
    with open(path) as fh:
        doc = json.load(fh)
    return sweep_spec_from_dict(doc)


def sweep_spec_from_dict(doc):
    known = {"scenario_id", "base", "axis", "values", "trials", "outputs",
             "curves", "pilot_rule", "mode", "notes"}
    unknown = set(doc) - known
    if unknown:
        raise ParameterError(f"unknown sweep spec keys {sorted(unknown)}")
    doc = dict(doc)
    if "outputs" in doc:
        doc["outputs"] = tuple(doc["outputs"])
    return SweepSpec(**doc)


def preset_path(name):
    """Path of a packaged preset such as 'fig2'."""
    res = resources.files("mmwsim").joinpath("presets", f"{name}.json")
    if not res.is_file():
        raise ParameterError(f"no preset named {name!r}")
    return res


def load_preset(name):
    with preset_path(name).open() as fh:
        return sweep_spec_from_dict(json.load(fh))


def list_presets():
    root = resources.files("mmwsim").joinpath("presets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _point_config(spec, curve, value, trials_seed_overrides):
    """Resolve one (curve, axis value) pair into a validated SystemConfig."""
    doc = {}
    ordered = [(k, v) for k, v in spec.base.items() if k not in ("snr_db", "pilot_snr_db")]
    ordered += [(k, v) for k, v in spec.base.items() if k in ("snr_db", "pilot_snr_db")]
    for k, v in ordered:
        set_param(doc, k, v)
    pilot_rule = spec.pilot_rule
    for k, v in curve.items():
        if k == "pilot_rule":
            pilot_rule = v
            continue
        set_param(doc, k, v)
    set_param(doc, spec.axis, value)
    for k, v in trials_seed_overrides.items():
        set_param(doc, k, v)
    if pilot_rule == "tau_times_data":
        tau = doc.get("tau", doc.get("K", 1))
        doc["p_p"] = tau * doc.get("p_t", 1.0)
    return validate_config(config_from_dict(doc))


def run_sweep(spec, trials=None, seed=None, mode=None, progress=None):
    """Run every (curve, value) point and return CSV-ready row dicts.

    Deterministic for fixed seed and flags; rows appear in curve-major,
    axis-order.
    """
    trials = spec.trials if trials is None else trials
    mode = spec.mode if mode is None else mode
    overrides = {} if seed is None else {"seed": seed}
    rows = []
    for curve in spec.curves:
        for value in spec.values:
            cfg = _point_config(spec, curve, value, overrides)
            row = {
                "scenario_id": spec.scenario_id,
                "L": cfg.L, "K": cfg.K, "N": cfg.N, "M": cfg.M,
                "bits": cfg.adc_bits if cfg.rho_ad is None else "",
                "B": cfg.B, "tau": cfg.tau, "beta": cfg.beta_inter,
                "snr_db": _fmt(cfg.snr_db), "pilot_snr_db": _fmt(cfg.pilot_snr_db),
                "trials": trials, "seed": cfg.seed,
            }
            report = lower_bound_rate(cfg)
            bound_vals = {
                "rate_lb": report.R_LB,
                "rate_lb_s": report.R_LB_s,
                "xi1": report.xi1,
                "xi2": report.xi2,
                "r_inf": report.R_inf if cfg.L > 1 else None,
            }
            for name in OUTPUT_COLUMNS:
                row[name] = ""
            if "rate_mc" in spec.outputs or "ci95" in spec.outputs:
                mc = ergodic_rate(cfg, trials, mode=mode)
                if "rate_mc" in spec.outputs:
                    row["rate_mc"] = _fmt(mc.rate_mc)
                if "ci95" in spec.outputs:
                    row["ci95"] = _fmt(mc.ci95)
            for name, val in bound_vals.items():
                if name in spec.outputs and val is not None:
                    row[name] = _fmt(val)
            rows.append(row)
            if progress is not None:
                progress(row)
    return rows


def write_csv(rows, fh):
    fh.write(CSV_UNITS_COMMENT + "\n")
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def rows_to_csv_text(rows):
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv_rows(path):
    """Read back a sweep CSV, skipping the units comment."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        raise FormatError(f"{path} is empty")
    missing = [c for c in CSV_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise FormatError(f"{path} lacks expected columns {missing}")
    return list(reader)


_AXIS_COLUMN = {"K": "K", "N": "N", "M": "M", "adc_bits": "bits",
                "snr_db": "snr_db", "pilot_snr_db": "pilot_snr_db"}


def emit_plot_script(csv_path, spec):
    """Self-contained gnuplot script for one sweep CSV.

    Rows are grouped into curves by whichever identity columns actually vary
    (other than the swept axis); each curve gets a rate_mc errorbar series
    and, when present, a dashed rate_lb series.
    """
    rows = read_csv_rows(csv_path)
    if not rows:
        raise FormatError(f"{csv_path} has no data rows")
    axis_col = _AXIS_COLUMN[spec.axis]
    identity = [c for c in ("L", "K", "N", "M", "bits", "B", "tau", "beta",
                            "snr_db", "pilot_snr_db") if c != axis_col]
    # a column separates curves only if it varies among rows sharing an axis
    # value (columns merely derived from the axis, like tau under the pilot
    # rule, are not identities)
    by_axis = {}
    for r in rows:
        by_axis.setdefault(r[axis_col], []).append(r)
    varying = [c for c in identity
               if any(len({r[c] for r in grp}) > 1 for grp in by_axis.values())]

    groups = []
    seen = {}
    for r in rows:
        key = tuple(r[c] for c in varying)
        if key not in seen:
            seen[key] = True
            groups.append(key)

    col_idx = {c: i + 1 for i, c in enumerate(CSV_COLUMNS)}
    have_mc = any(r["rate_mc"] != "" for r in rows)
    have_lb = any(r["rate_lb"] != "" for r in rows)

    lines = [
        "# gnuplot script generated by mmwsim",
        'set datafile separator ","',
        "set key below",
        f'set xlabel "{spec.axis}"',
        'set ylabel "rate (bits/s/Hz)"',
        f'set title "{spec.scenario_id}"',
        "set grid",
    ]
    plots = []
    for key in groups:
        cond = " && ".join(
            f"(${col_idx[c]} == {v})" for c, v in zip(varying, key)
        ) or "1"
        label = ", ".join(f"{c}={v}" for c, v in zip(varying, key)) or spec.scenario_id
        x = f"(({cond}) ? ${col_idx[axis_col]} : 1/0)"
        if have_mc:
            plots.append(
                f"'{csv_path}' using {x}:(${col_idx['rate_mc']}):(${col_idx['ci95']}) "
                f"with yerrorlines title \"{label} simulated\""
            )
        if have_lb:
            plots.append(
                f"'{csv_path}' using {x}:(${col_idx['rate_lb']}) "
                f"with lines dashtype 2 title \"{label} bound\""
            )
    lines.append("plot \\\n    " + ", \\\n    ".join(plots))
    lines.append("pause -1")
    return "\n".join(lines) + "\n"


def _fmt(v):
    if v == "" or v is None:
        return ""
    return f"{v:.6g}"
