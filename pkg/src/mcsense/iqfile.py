"""cf32le IQ file format with a JSON sidecar.

Samples are interleaved little-endian float32 (I, Q) pairs. The sidecar
carries {"format": "cf32le", "length": <samples>, "sample_rate_hz": ...}
plus the channel plan, so a record round-trips without the originating
config.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .siggen import NyquistRecord
from .spectrum import ChannelPlan, channel_plan

FORMAT_NAME = "cf32le"


def sidecar_path_for(path) -> Path:
    return Path(str(path) + ".json")


def write_iq(record: NyquistRecord, path, sidecar_path=None) -> Path:
    """Write a record as cf32le plus its JSON sidecar; returns the sidecar path."""
    path = Path(path)
    interleaved = np.empty(2 * len(record.samples), dtype="<f4")
    interleaved[0::2] = record.samples.real
    interleaved[1::2] = record.samples.imag
    path.write_bytes(interleaved.tobytes())

    sidecar = {
        "format": FORMAT_NAME,
        "length": len(record.samples),
        "sample_rate_hz": record.plan.B_max_hz,
        "plan": {
            "L": record.plan.L,
            "B_hz": record.plan.B_hz,
            "N_max": record.plan.N_max,
        },
    }
    out = Path(sidecar_path) if sidecar_path else sidecar_path_for(path)
    out.write_text(json.dumps(sidecar, indent=2) + "\n")
    return out


def ingest_iq(path, sidecar_path=None, plan: ChannelPlan | None = None) -> NyquistRecord:
    """Read a cf32le file back into a NyquistRecord.

    The sidecar must declare format, length and sample_rate_hz. When a
    plan is supplied it is checked against the sidecar (rate and length
    divisibility); otherwise the plan embedded in the sidecar is used.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    sidecar_file = Path(sidecar_path) if sidecar_path else sidecar_path_for(path)
    if not sidecar_file.exists():
        raise FileNotFoundError(f"missing sidecar {sidecar_file}")
    meta = json.loads(sidecar_file.read_text())

    if meta.get("format") != FORMAT_NAME:
        raise ValueError(f"bad format tag {meta.get('format')!r}, expected {FORMAT_NAME!r}")
    declared = int(meta["length"])
    raw = np.frombuffer(path.read_bytes(), dtype="<f4")
    if raw.size != 2 * declared:
        raise ValueError(
            f"length mismatch: sidecar declares {declared} samples, "
            f"file holds {raw.size // 2}"
        )

    if plan is None:
        p = meta.get("plan")
        if p is None:
            raise ValueError("sidecar carries no plan and none was supplied")
        plan = channel_plan(int(p["L"]), float(p["B_hz"]), int(p["N_max"]))
    rate = float(meta["sample_rate_hz"])
    if abs(rate - plan.B_max_hz) > 1e-6 * plan.B_max_hz:
        raise ValueError(
            f"rate mismatch: sidecar {rate} Hz vs plan B_max {plan.B_max_hz} Hz"
        )
    if declared % plan.L != 0:
        raise ValueError(f"length {declared} is not a multiple of L={plan.L}")

    samples = raw[0::2].astype(np.float64) + 1j * raw[1::2].astype(np.float64)
    return NyquistRecord(samples=samples, plan=plan)
