"""Command-line interface.

Subcommands:
    generate    write a synthetic IQ record (cf32le + JSON sidecar) and its PSD figure
    sense       run the sub-Nyquist NLLS detector on an IQ file
    ed          run the energy-detection baseline on an IQ file
    sweep-snr   Monte Carlo Pd/Pf versus SNR -> CSV + figures
    sweep-m     Monte Carlo Pd versus snapshot count -> CSV + figure
    trace       single-trial greedy selection trace -> JSONL + figure
    plot        re-render figures from a CSV table or trace record

Every run writes a resolved copy of its configuration next to the
outputs. Figures are rendered from the serialized outputs (CSV / JSONL),
never from hidden state.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import ed as ed_mod
from . import plots
from .estimator import report_record, sample_correlation, sequential_forward_nlls
from .harness import (ExperimentConfig, load_config, read_csv, run_trial,
                      sweep_m, sweep_snr, write_csv)
from .iqfile import ingest_iq, write_iq
from .multicoset import snapshots
from .siggen import MultibandSignalSpec, empirical_psd, generate
from .spectrum import active_set


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override master seed")
    parser.add_argument("--trials", type=int, default=None, help="override trial count")
    parser.add_argument("--workers", type=int, default=None, help="worker processes")
    parser.add_argument("--method", choices=["nlls", "ed", "both"], default=None,
                        help="override configured methods")


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        updates["trials"] = args.trials
    if getattr(args, "workers", None) is not None:
        updates["workers"] = args.workers
    if getattr(args, "method", None) is not None:
        updates["methods"] = (("nlls", "ed") if args.method == "both"
                              else (args.method,))
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_resolved(cfg: ExperimentConfig, out: Path) -> None:
    (out / "resolved_config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")


def cmd_generate(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    _write_resolved(cfg, out)
    truth = active_set(cfg.active_set if not isinstance(cfg.active_set, str) else ())
    record = generate(MultibandSignalSpec(
        plan=cfg.plan, active=truth, snr_db=args.snr_db, noise_power=cfg.sigma2,
        n_samples=cfg.plan.L * cfg.M, seed=cfg.master_seed + args.trial,
    ))
    iq_path = out / "record.cf32"
    write_iq(record, iq_path)
    n_fft = min(len(record.samples), args.n_fft)
    freqs, pxx = empirical_psd(record, n_fft)
    plots.plot_psd(freqs, pxx, out / "psd.svg")
    print(f"wrote {iq_path} ({len(record.samples)} samples, "
          f"snr={args.snr_db:g} dB, active={list(truth.indices)})")
    return 0


def cmd_sense(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    _write_resolved(cfg, out)
    record = ingest_iq(args.iq, args.sidecar, plan=cfg.plan)
    r_hat = sample_correlation(snapshots(record, cfg.pattern))
    result = sequential_forward_nlls(r_hat, cfg.pattern, cfg.sigma2,
                                     cfg.detector_n_max)
    rec = report_record(result, cfg.pattern, cfg.sigma2)
    with open(out / "detection.jsonl", "a") as fh:
        fh.write(json.dumps(rec) + "\n")
    if result.steps:
        plots.plot_trace(rec, out / "trace.svg")
    print(f"b_hat={list(result.b_hat.indices)} N_hat={result.N_hat} "
          f"({result.terminated_by})")
    return 0


def cmd_ed(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    _write_resolved(cfg, out)
    record = ingest_iq(args.iq, args.sidecar, plan=cfg.plan)
    ed_cfg = ed_mod.EdConfig(plan=cfg.plan, M=cfg.M, P_fa=cfg.P_fa,
                             sigma2=cfg.sigma2)
    decisions = ed_mod.energy_detect(record, ed_cfg)
    rec = {
        "method": "ed",
        "eta": ed_mod.ed_threshold(ed_cfg),
        "M": cfg.M,
        "P_fa": cfg.P_fa,
        "decisions": [int(d) for d in decisions],
    }
    with open(out / "ed.jsonl", "a") as fh:
        fh.write(json.dumps(rec) + "\n")
    flagged = [int(i) for i in np.flatnonzero(decisions)]
    print(f"occupied={flagged} (eta={rec['eta']:.5f})")
    return 0


def cmd_sweep_snr(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    _write_resolved(cfg, out)
    rows = sweep_snr(cfg)
    csv_path = out / "metrics.csv"
    write_csv(rows, csv_path)
    table = read_csv(csv_path)
    plots.emit_plot(table, "pd-snr", out / "pd_vs_snr.svg")
    plots.emit_plot(table, "pf-snr", out / "pf_vs_snr.svg")
    for row in rows:
        print(f"{row.method:5s} snr={row.snr_db:6.1f}  Pd={row.pd:.4f}  "
              f"Pf={row.pf:.4f}  ({row.trials} trials, {row.wall_time:.1f}s)")
    print(f"wrote {csv_path}")
    return 0


def cmd_sweep_m(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    _write_resolved(cfg, out)
    m_grid = [int(v) for v in args.m_grid.split(",")]
    rows = sweep_m(cfg, m_grid)
    csv_path = out / "metrics_m.csv"
    write_csv(rows, csv_path)
    plots.emit_plot(read_csv(csv_path), "pd-m", out / "pd_vs_m.svg")
    for row in rows:
        print(f"{row.method:5s} snr={row.snr_db:6.1f} M={row.M:4d}  "
              f"Pd={row.pd:.4f}  Pf={row.pf:.4f}")
    print(f"wrote {csv_path}")
    return 0


def cmd_trace(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    _write_resolved(cfg, out)
    outcome = run_trial(cfg, cfg.master_seed + args.trial, snr_db=args.snr_db)
    if outcome.nlls is None:
        print("config does not include the nlls method", file=sys.stderr)
        return 2
    rec = report_record(outcome.nlls, cfg.pattern, cfg.sigma2)
    (out / "trace.jsonl").write_text(json.dumps(rec) + "\n")
    if outcome.nlls.steps:
        plots.plot_trace(rec, out / "trace.svg")
    for i, step in enumerate(outcome.nlls.steps, start=1):
        print(f"step {i}: +channel {step.channel:2d}  J={step.criterion:9.4f}  "
              f"floor={step.threshold:7.3f}")
    print(f"b_hat={list(outcome.nlls.b_hat.indices)} "
          f"N_hat={outcome.nlls.N_hat} ({outcome.nlls.terminated_by}), "
          f"truth={list(outcome.truth.indices)}")
    return 0


def cmd_plot(args) -> int:
    out_path = Path(args.out_file)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == "trace":
        if not args.trace_jsonl:
            print("kind 'trace' needs --trace-jsonl", file=sys.stderr)
            return 2
        line = Path(args.trace_jsonl).read_text().strip().splitlines()
        if not line:
            print("empty trace file", file=sys.stderr)
            return 2
        plots.emit_plot(json.loads(line[-1]), "trace", out_path)
    else:
        if not args.csv:
            print(f"kind {args.kind!r} needs --csv", file=sys.stderr)
            return 2
        plots.emit_plot(read_csv(args.csv), args.kind, out_path)
    print(f"wrote {out_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcsense",
                                     description="sub-Nyquist wideband spectrum sensing")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic IQ record")
    _add_common(g)
    g.add_argument("--snr-db", type=float, default=10.0)
    g.add_argument("--trial", type=int, default=0, help="trial index for seeding")
    g.add_argument("--n-fft", type=int, default=1024)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("sense", help="NLLS detection on an IQ file")
    _add_common(s)
    s.add_argument("--iq", required=True)
    s.add_argument("--sidecar", default=None)
    s.set_defaults(func=cmd_sense)

    e = sub.add_parser("ed", help="energy detection on an IQ file")
    _add_common(e)
    e.add_argument("--iq", required=True)
    e.add_argument("--sidecar", default=None)
    e.set_defaults(func=cmd_ed)

    w = sub.add_parser("sweep-snr", help="Pd/Pf versus SNR")
    _add_common(w)
    w.set_defaults(func=cmd_sweep_snr)

    m = sub.add_parser("sweep-m", help="Pd versus snapshot count")
    _add_common(m)
    m.add_argument("--m-grid", default="32,64,128")
    m.set_defaults(func=cmd_sweep_m)

    t = sub.add_parser("trace", help="single-trial selection trace")
    _add_common(t)
    t.add_argument("--snr-db", type=float, default=10.0)
    t.add_argument("--trial", type=int, default=0)
    t.set_defaults(func=cmd_trace)

    p = sub.add_parser("plot", help="render figures from CSV/JSONL outputs")
    p.add_argument("--kind", choices=list(plots.PLOT_KINDS), required=True)
    p.add_argument("--csv", default=None)
    p.add_argument("--trace-jsonl", default=None)
    p.add_argument("--out-file", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
