"""Command-line entry point: bound, simulate, sweep, validate, codebook."""

import argparse
import json
import math
import sys

from . import __version__
from .bounds import lower_bound_rate
from .channel import dump_realization_csv, sample_channel
from .checks import run_suite
from .config import SystemConfig, config_from_dict, set_param, validate_config
from .errors import ParameterError
from .estimation import dump_error_power_csv, estimate_all
from .rate import ergodic_rate
from .rng import substream, STAGE_CHANNEL, STAGE_PILOT
from .sweep import (emit_plot_script, list_presets, load_preset, load_sweep_spec,
                    run_sweep, rows_to_csv_text)
from .training import build_codebook, gain_lower_bound, train_beams


def _add_config_args(p):
    p.add_argument("--config", help="config JSON path")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override a config field (repeatable)")
    p.add_argument("--seed", type=int, help="RNG seed override")


def _resolve_config(args):
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
    else:
        doc = {}
    for item in args.overrides:
        if "=" not in item:
            raise ParameterError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        set_param(doc, key.strip(), value.strip())
    if getattr(args, "seed", None) is not None:
        doc["seed"] = args.seed
    return validate_config(config_from_dict(doc) if doc else SystemConfig())


def cmd_bound(args):
    cfg = _resolve_config(args)
    rep = lower_bound_rate(cfg)
    iv = rep.inputs
    print(f"config: L={cfg.L} K={cfg.K} N={cfg.N} M={cfg.M} B={cfg.B} tau={cfg.tau} "
          f"bits={cfg.adc_bits} rho={cfg.rho:.6g} beta={cfg.beta_inter} "
          f"snr={cfg.snr_db:.4g}dB pilot_snr={cfg.pilot_snr_db:.4g}dB")
    for w in cfg.warnings:
        print(f"warning: {w}")
    print(f"inputs: c={iv.c:.6f} lambda={iv.lam:.6f} mu={iv.mu:.6f} "
          f"eta1={iv.eta1:.6f} eta2={iv.eta2:.6f} eta3={iv.eta3:.6f}")
    print(f"terms:  P_u={rep.P_u:.6g} P_c={rep.P_c:.6g} P_n={rep.P_n:.6g} "
          f"P_q={rep.P_q:.6g} P_e={rep.P_e:.6g}")
    print(f"rate lower bound R_LB   = {rep.R_LB:.6f} bits/s/Hz")
    if rep.R_LB_s is not None:
        print(f"single-cell form R_LB_s = {rep.R_LB_s:.6f} bits/s/Hz")
    if math.isfinite(rep.R_inf):
        print(f"large-N limit R_inf     = {rep.R_inf:.6f} bits/s/Hz")
    else:
        print("large-N limit R_inf     = +inf (single cell: no pilot contamination)")
    print(f"low-SNR scaling   xi1={rep.xi1:.6g}  R_LB_1={rep.R_LB_1:.6f}")
    print(f"high-pilot scaling xi2={rep.xi2:.6g}  R_LB_2={rep.R_LB_2:.6f}")
    if args.out:
        from .sweep import CSV_COLUMNS, write_csv
        row = {c: "" for c in CSV_COLUMNS}
        row.update({
            "scenario_id": "bound", "L": cfg.L, "K": cfg.K, "N": cfg.N, "M": cfg.M,
            "bits": cfg.adc_bits if cfg.rho_ad is None else "", "B": cfg.B,
            "tau": cfg.tau, "beta": cfg.beta_inter,
            "snr_db": f"{cfg.snr_db:.6g}", "pilot_snr_db": f"{cfg.pilot_snr_db:.6g}",
            "trials": 0, "seed": cfg.seed,
            "rate_lb": f"{rep.R_LB:.6g}",
            "rate_lb_s": "" if rep.R_LB_s is None else f"{rep.R_LB_s:.6g}",
            "xi1": f"{rep.xi1:.6g}", "xi2": f"{rep.xi2:.6g}",
            "r_inf": f"{rep.R_inf:.6g}" if math.isfinite(rep.R_inf) else "",
        })
        with open(args.out, "w") as fh:
            write_csv([row], fh)
        print(f"wrote {args.out}")
    return 0


def cmd_simulate(args):
    cfg = _resolve_config(args)
    for w in cfg.warnings:
        print(f"warning: {w}")
    mode = {"semi": "semi_analytic", "symbol": "symbol_level"}[args.mode]
    rep = ergodic_rate(cfg, args.trials, mode=mode)
    lb = lower_bound_rate(cfg)
    print(f"mode={rep.mode} trials={rep.trials} seed={cfg.seed}")
    print(f"ergodic rate = {rep.rate_mc:.6f} +- {rep.ci95:.6f} bits/s/Hz (95% CI)")
    print(f"lower bound  = {lb.R_LB:.6f} bits/s/Hz")
    if rep.pathological:
        print(f"note: {rep.pathological} of {rep.trials * cfg.K} user-realizations "
              "hit the destructive-contamination floor")
    if args.debug_dump:
        rng = substream(cfg.seed, 0, STAGE_CHANNEL)
        realization = sample_channel(cfg, rng)
        training = train_beams(realization, cfg)
        est = estimate_all(realization, training, cfg,
                           substream(cfg.seed, 0, STAGE_PILOT))
        dump_realization_csv(realization, training, args.debug_dump + "_realization.csv")
        dump_error_power_csv(est, args.debug_dump + "_error_power.csv")
        print(f"wrote {args.debug_dump}_realization.csv and _error_power.csv")
    return 0


def cmd_sweep(args):
    if args.preset:
        spec = load_preset(args.preset)
    elif args.spec:
        spec = load_sweep_spec(args.spec)
    else:
        print("choose --preset {" + ",".join(list_presets()) + "} or --spec FILE",
              file=sys.stderr)
        return 2
    mode = {"semi": "semi", "symbol": "symbol"}[args.mode] if args.mode else None
    rows = run_sweep(spec, trials=args.trials, seed=args.seed, mode=mode,
                     progress=lambda r: print(
                         f"  {spec.axis}={r[_axis_col(spec.axis)]} rate_mc={r['rate_mc'] or '-'} "
                         f"rate_lb={r['rate_lb'] or '-'}", file=sys.stderr))
    text = rows_to_csv_text(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
        if args.plot_script:
            script = emit_plot_script(args.out, spec)
            with open(args.plot_script, "w") as fh:
                fh.write(script)
            print(f"wrote {args.plot_script}")
    else:
        sys.stdout.write(text)
    return 0


def _axis_col(axis):
    return {"adc_bits": "bits"}.get(axis, axis)


def cmd_validate(args):
    results = run_suite(args.suite)
    failed = 0
    for r in results:
        print(r.line())
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def cmd_codebook(args):
    phases = build_codebook(args.B)
    zeta = math.pi / 2 ** (args.B + 1)
    print(f"B={args.B} -> {len(phases)} phases, interval zeta={zeta:.6f} rad")
    for i, p in enumerate(phases):
        print(f"  [{i:3d}] {p:.6f}")
    lo = gain_lower_bound(args.M, args.B)
    print(f"gain bounds for M={args.M}: {lo:.6f} <= |c| <= {math.sqrt(args.M):.6f}")
    if zeta > 2.0 / args.M:
        print(f"warning: zeta={zeta:.4g} > 2/M={2.0 / args.M:.4g}; lower bound not asserted")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="mmwsim",
        description="Uplink rate simulation and closed-form bounds for multi-cell "
                    "mmWave massive MIMO with low-resolution ADCs",
    )
    p.add_argument("--version", action="version", version=f"mmwsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="evaluate the closed-form rate bounds")
    _add_config_args(b)
    b.add_argument("--out", help="also write one CSV row here")
    b.set_defaults(fn=cmd_bound)

    s = sub.add_parser("simulate", help="Monte-Carlo ergodic rate for one config")
    _add_config_args(s)
    s.add_argument("--trials", type=int, default=2000)
    s.add_argument("--mode", choices=("semi", "symbol"), default="semi")
    s.add_argument("--debug-dump", metavar="PREFIX",
                   help="dump first-trial realization and error-power CSVs")
    s.set_defaults(fn=cmd_simulate)

    w = sub.add_parser("sweep", help="run a preset or custom sweep to CSV")
    w.add_argument("--preset", choices=list_presets())
    w.add_argument("--spec", help="sweep spec JSON path")
    w.add_argument("--trials", type=int)
    w.add_argument("--seed", type=int)
    w.add_argument("--mode", choices=("semi", "symbol"))
    w.add_argument("--out", help="output CSV path (stdout when omitted)")
    w.add_argument("--plot-script", help="also emit a gnuplot script here")
    w.set_defaults(fn=cmd_sweep)

    v = sub.add_parser("validate", help="run self-validation suites")
    v.add_argument("--suite", default="all",
                   choices=("quantizer", "lemmas", "bounds", "rate", "all"))
    v.set_defaults(fn=cmd_validate)

    c = sub.add_parser("codebook", help="print the phase codebook and gain bounds")
    c.add_argument("--M", type=int, required=True, help="user antenna count")
    c.add_argument("--B", type=int, required=True, help="phase quantization bits")
    c.set_defaults(fn=cmd_codebook)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
