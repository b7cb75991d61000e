"""Synthetic multiband complex-baseband signal generation.

Records live on the Nyquist grid of the plan (sample spacing 1/B_max).
Each active channel carries an independent complex Gaussian process that
is confined to the channel's DFT bins exactly: white coefficients are
drawn in the DFT domain, bins outside the channel are zeroed, and the
result is inverse-transformed. White complex Gaussian noise is added
across the full band.

SNR convention: snr_db sets the ratio of total in-band signal power to
total noise power over the sensed band, with the signal power split
equally across the active channels (all active channels are received at
the same strength). Each generated record is normalized exactly, not
just in expectation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectrum import ActiveChannelSet, ChannelPlan, check_active_set

_MASK64 = 0xFFFFFFFFFFFFFFFF
_NOISE_TAG = 1 << 60
_ACTIVE_TAG = 1 << 59


def _stream(seed: int, tag: int) -> np.random.Generator:
    # Sub-seeding by XOR with high-bit tags: channel/noise streams never
    # collide across the small additive trial-seed offsets used upstream.
    return np.random.default_rng((int(seed) ^ int(tag)) & _MASK64)


def channel_stream(seed: int, channel: int) -> np.random.Generator:
    return _stream(seed, (channel + 1) << 32)


def noise_stream(seed: int) -> np.random.Generator:
    return _stream(seed, _NOISE_TAG)


def active_draw_stream(seed: int) -> np.random.Generator:
    return _stream(seed, _ACTIVE_TAG)


@dataclass(frozen=True)
class MultibandSignalSpec:
    """Parameters of one synthetic record."""

    plan: ChannelPlan
    active: ActiveChannelSet
    snr_db: float
    noise_power: float
    n_samples: int
    seed: int


@dataclass(frozen=True)
class NyquistRecord:
    """Complex samples on the Nyquist grid plus the plan they belong to."""

    samples: np.ndarray
    plan: ChannelPlan

    def __post_init__(self):
        self.samples.setflags(write=False)

    def __len__(self) -> int:
        return len(self.samples)


def _validate_spec(spec: MultibandSignalSpec) -> None:
    check_active_set(spec.active, spec.plan)
    if spec.active.N > spec.plan.N_max:
        raise ValueError(
            f"{spec.active.N} active channels exceed plan N_max={spec.plan.N_max}"
        )
    if spec.n_samples <= 0 or spec.n_samples % spec.plan.L != 0:
        raise ValueError(
            f"n_samples={spec.n_samples} must be a positive multiple of L={spec.plan.L}"
        )
    if spec.noise_power < 0:
        raise ValueError(f"noise_power must be >= 0, got {spec.noise_power}")
    if not np.isfinite(spec.snr_db):
        raise ValueError("snr_db must be finite; use noise_power=0 for the noiseless case")


def generate(spec: MultibandSignalSpec) -> NyquistRecord:
    """Generate one record; bit-identical for identical specs.

    With noise_power=0 the channel powers are referenced to unit noise
    power so the record is a scaled noiseless copy of the noisy one.
    """
    _validate_spec(spec)
    n = spec.n_samples
    L = spec.plan.L
    bins_per_channel = n // L
    sigma2_ref = spec.noise_power if spec.noise_power > 0 else 1.0
    x = np.zeros(n, dtype=np.complex128)

    if spec.active.N:
        gamma = 10.0 ** (spec.snr_db / 10.0)
        target_power = gamma * sigma2_ref / spec.active.N
        for ch in spec.active:
            rng = channel_stream(spec.seed, ch)
            coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            coeffs[: ch * bins_per_channel] = 0.0
            coeffs[(ch + 1) * bins_per_channel:] = 0.0
            s = np.fft.ifft(coeffs)
            realized = np.mean(np.abs(s) ** 2)
            x += s * np.sqrt(target_power / realized)

    if spec.noise_power > 0:
        rng = noise_stream(spec.seed)
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x += np.sqrt(spec.noise_power / 2.0) * w

    return NyquistRecord(samples=x, plan=spec.plan)


def band_power(record: NyquistRecord, channel_index: int) -> float:
    """Mean record power falling in one channel's DFT bins.

    Parseval-consistent: the band powers of all L channels sum to the
    total mean power of the record.
    """
    L = record.plan.L
    if not 0 <= channel_index < L:
        raise ValueError(f"channel index {channel_index} out of range for L={L}")
    n = len(record.samples)
    bins = n // L
    spec = np.fft.fft(record.samples)
    sl = spec[channel_index * bins: (channel_index + 1) * bins]
    return float(np.sum(np.abs(sl) ** 2) / n**2)


def empirical_psd(record: NyquistRecord, n_fft: int) -> tuple[np.ndarray, np.ndarray]:
    """Welch-averaged periodogram over [0, B_max), for plotting.

    Returns (frequencies_hz, power), both length n_fft, frequencies
    ascending from 0.
    """
    from scipy.signal import welch

    if n_fft > len(record.samples):
        raise ValueError(f"n_fft={n_fft} exceeds record length {len(record.samples)}")
    fs = record.plan.B_max_hz
    freqs, pxx = welch(record.samples, fs=fs, nperseg=n_fft, detrend=False,
                       return_onesided=False)
    freqs = np.where(freqs < 0, freqs + fs, freqs)
    order = np.argsort(freqs)
    return freqs[order], pxx[order]
