"""Figure rendering for sweep tables and detection traces.

All plots are drawn from CSV rows or serialized detection records only,
and SVG output is deterministic: identical inputs produce identical
bytes (fixed hash salt, no timestamp metadata).
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "mcsense"

PLOT_KINDS = ("pd-snr", "pf-snr", "pd-m", "trace")

_METHOD_LABELS = {"nlls": "sub-Nyquist NLLS", "ed": "energy detection"}
_METHOD_STYLES = {"nlls": "o-", "ed": "s--"}


def _save(fig, out_path) -> None:
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _to_db(x: float) -> float:
    return 10.0 * math.log10(max(x, 1e-300))


def plot_metric_vs_snr(rows, metric: str, out_path) -> None:
    """Pd or Pf against SNR, one curve per method."""
    if not rows:
        raise ValueError("empty metrics table")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for method in sorted({r.method for r in rows}):
        pts = sorted((r.snr_db, getattr(r, metric)) for r in rows if r.method == method)
        ax.plot([s for s, _ in pts], [v for _, v in pts],
                _METHOD_STYLES.get(method, "o-"),
                label=_METHOD_LABELS.get(method, method))
    ax.set_xlabel("SNR [dB]")
    ax.set_ylabel("$P_d$" if metric == "pd" else "$P_f$")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)


def plot_pd_vs_m(rows, out_path) -> None:
    """Pd against snapshot count M, one curve per (method, SNR)."""
    if not rows:
        raise ValueError("empty metrics table")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    keys = sorted({(r.method, r.snr_db) for r in rows})
    for method, snr in keys:
        pts = sorted((r.M, r.pd) for r in rows
                     if r.method == method and r.snr_db == snr)
        ax.plot([m for m, _ in pts], [v for _, v in pts], "o-",
                label=f"{_METHOD_LABELS.get(method, method)}, {snr:g} dB")
    ax.set_xlabel("M [snapshots]")
    ax.set_ylabel("$P_d$")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)


def plot_trace(record: dict, out_path) -> None:
    """Greedy selection trace: criterion in dB per step with the
    sigma2*(p - i) noise-floor staircase."""
    steps = record.get("steps", [])
    if not steps:
        raise ValueError("detection record has no steps to plot")
    p = record["pattern"]["p"]
    sigma2 = record["sigma2"]
    idx = list(range(1, len(steps) + 1))
    crit_db = [_to_db(s["criterion"]) for s in steps]
    floor_db = [_to_db((p - i) * sigma2) for i in idx]

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.step(idx, floor_db, where="mid", color="tab:red", alpha=0.8,
            label=r"$(p-i)\,\sigma^2$")
    ax.plot(idx, crit_db, "o-", color="tab:blue", label="LSE criterion")
    ax.axhline(_to_db((p - len(steps)) * sigma2), color="gray", ls=":",
               label=r"final noise floor")
    for i, s in zip(idx, steps):
        ax.annotate(str(s["channel"]), (i, crit_db[i - 1]),
                    textcoords="offset points", xytext=(6, 6), fontsize=8)
    ax.set_xlabel("step $i$")
    ax.set_ylabel("criterion [dB]")
    ax.set_xticks(idx)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)


def plot_psd(freqs, power, out_path) -> None:
    """Power spectral density of a generated record."""
    if len(freqs) == 0:
        raise ValueError("empty PSD")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    db = [_to_db(v) for v in power]
    ax.plot([f / 1e6 for f in freqs], db, lw=0.8)
    ax.set_xlabel("frequency [MHz]")
    ax.set_ylabel("PSD [dB]")
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    _save(fig, out_path)


def emit_plot(table, kind: str, out_path) -> None:
    """Render a figure of the given kind to an SVG file.

    kind "pd-snr" / "pf-snr" / "pd-m" take a list of MetricsRow; kind
    "trace" takes a serialized detection record.
    """
    if kind == "pd-snr":
        plot_metric_vs_snr(table, "pd", out_path)
    elif kind == "pf-snr":
        plot_metric_vs_snr(table, "pf", out_path)
    elif kind == "pd-m":
        plot_pd_vs_m(table, out_path)
    elif kind == "trace":
        plot_trace(table, out_path)
    else:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
