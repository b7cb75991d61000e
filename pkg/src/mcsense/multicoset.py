"""Multicoset sampling and the fractional-shift chain.

A multicoset sampler with block length L and offsets c_1..c_p keeps the
samples record[m*L + c_i] from a Nyquist-grid record, for an average rate
of (p/L) * B_max. Each coset sequence is then fractionally shifted by
c_i/L of a low-rate sample so that all branches refer to a common time
origin; the shift is the exact composite of upsample-by-L, ideal
interpolation filter on the first alias band, integer delay by c_i, and
downsample-by-L, realized as a circular DFT-domain phase ramp on the
block. Bins are interpreted one-sided on [0, 1) cycles/sample (complex
analytic convention), and the shift is unitary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .siggen import NyquistRecord


@dataclass(frozen=True)
class CosetPattern:
    """Sampling offsets of the p coset branches within a length-L block.

    Offsets are kept distinct: duplicate cosets give identical rows in the
    modulation matrix and destroy identifiability.
    """

    L: int
    c: tuple[int, ...]
    seed: int | None = None

    @property
    def p(self) -> int:
        return len(self.c)


def coset_pattern(L: int, c, seed: int | None = None) -> CosetPattern:
    """Validate explicit coset offsets into a CosetPattern."""
    offsets = tuple(int(ci) for ci in c)
    if not offsets:
        raise ValueError("at least one coset offset is required")
    if len(set(offsets)) != len(offsets):
        raise ValueError(f"coset offsets must be distinct, got {offsets}")
    if min(offsets) < 0 or max(offsets) >= L:
        raise ValueError(f"coset offsets must lie in [0, {L-1}], got {offsets}")
    return CosetPattern(L=L, c=offsets, seed=seed)


def random_pattern(L: int, p: int, seed: int) -> CosetPattern:
    """Draw p distinct cosets uniformly without replacement; deterministic per seed."""
    if not 1 <= p <= L:
        raise ValueError(f"need 1 <= p <= L, got p={p}, L={L}")
    rng = np.random.default_rng(seed)
    c = np.sort(rng.choice(L, size=p, replace=False))
    return CosetPattern(L=L, c=tuple(int(ci) for ci in c), seed=seed)


def sub_nyquist_factor(pattern: CosetPattern) -> float:
    """Fraction alpha = p/L of the Nyquist rate actually sampled."""
    return pattern.p / pattern.L


def average_sample_rate(pattern: CosetPattern, B_max_hz: float) -> float:
    """Average aggregate rate f_avg = alpha * B_max in Hz."""
    return sub_nyquist_factor(pattern) * B_max_hz


def sample(record: NyquistRecord, pattern: CosetPattern) -> np.ndarray:
    """Coset sequences: row i holds record[m*L + c_i], m = 0..M-1.

    The record length must be a multiple of L; M = len(record)/L.
    """
    n = len(record.samples)
    L = pattern.L
    if n % L != 0:
        raise ValueError(f"record length {n} is not a multiple of L={L}")
    M = n // L
    out = np.empty((pattern.p, M), dtype=np.complex128)
    for i, ci in enumerate(pattern.c):
        out[i] = record.samples[ci::L]
    return out


def fractional_shift(x, c_i: int, L: int) -> np.ndarray:
    """Delay a low-rate sequence by the fraction c_i/L of a sample,
    re-aligning a coset branch sampled at offset c_i to the block origin.

    Circular on the block: X_d(k) = X(k) * exp(-2j*pi*k*c_i/(L*M)) over
    the one-sided bins k = 0..M-1. Energy preserving and linear.
    """
    x = np.asarray(x, dtype=np.complex128)
    M = x.shape[-1]
    k = np.arange(M)
    ramp = np.exp(-2j * np.pi * k * c_i / (L * M))
    return np.fft.ifft(np.fft.fft(x) * ramp)


@dataclass(frozen=True)
class SnapshotMatrix:
    """p x M matrix whose columns are the snapshot vectors x_d(m)."""

    entries: np.ndarray
    pattern: CosetPattern

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def M(self) -> int:
        return self.entries.shape[1]


def snapshots(record: NyquistRecord, pattern: CosetPattern) -> SnapshotMatrix:
    """Sample all cosets and align them: row i = fractional_shift of coset i."""
    raw = sample(record, pattern)
    for i, ci in enumerate(pattern.c):
        raw[i] = fractional_shift(raw[i], ci, pattern.L)
    return SnapshotMatrix(entries=raw, pattern=pattern)
