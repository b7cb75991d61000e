"""Nyquist-rate energy-detection baseline.

The record is split by an ideal DFT-domain filter bank into L complex
baseband channel sequences (unitary: channel energies sum to the record
energy and white input noise stays white with unchanged per-sample
power). Each channel's average energy over its first M samples is
compared against the closed-form threshold

    eta = sigma2 * (1 + Qinv(P_fa) / sqrt(M/2))

calibrated through the Gaussian approximation of the energy statistic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, ndtri

from .siggen import NyquistRecord
from .spectrum import ChannelPlan


@dataclass(frozen=True)
class EdConfig:
    """Energy detector configuration."""

    plan: ChannelPlan
    M: int
    P_fa: float
    sigma2: float

    def __post_init__(self):
        if not 0 < self.P_fa < 1:
            raise ValueError(f"P_fa must be in (0, 1), got {self.P_fa}")
        if self.M < 2:
            raise ValueError(f"M must be >= 2, got {self.M}")
        if self.sigma2 <= 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")


def q_function(z: float) -> float:
    """Standard normal right-tail probability Q(z)."""
    return 0.5 * erfc(z / np.sqrt(2.0))


def inverse_q(prob: float) -> float:
    """Inverse of the Q-function: z with Q(z) = prob, for prob in (0, 1)."""
    if not 0 < prob < 1:
        raise ValueError(f"probability must be in (0, 1), got {prob}")
    return float(-ndtri(prob))


def ed_threshold(cfg: EdConfig) -> float:
    """Energy threshold eta = sigma2 * (1 + Qinv(P_fa)/sqrt(M/2))."""
    return cfg.sigma2 * (1.0 + inverse_q(cfg.P_fa) / np.sqrt(cfg.M / 2.0))


def channelize(record: NyquistRecord, plan: ChannelPlan) -> np.ndarray:
    """Split a record into L baseband channel sequences of length n/L.

    Channel r receives the spectral content of [r*B, (r+1)*B), shifted to
    baseband and decimated by L, with unitary scaling: per-channel sample
    power of white noise equals the input noise power, and channel
    energies sum to the record energy.
    """
    n = len(record.samples)
    L = plan.L
    if n % L != 0:
        raise ValueError(f"record length {n} is not a multiple of L={L}")
    M = n // L
    spectrum = np.fft.fft(record.samples)
    channels = np.fft.ifft(spectrum.reshape(L, M), axis=1) / np.sqrt(L)
    return channels


def energy_detect(record: NyquistRecord, cfg: EdConfig) -> np.ndarray:
    """Per-channel occupancy decisions; True means H1 (signal present).

    The statistic is the mean energy of the first M decimated samples of
    each channel.
    """
    channels = channelize(record, cfg.plan)
    if channels.shape[1] < cfg.M:
        raise ValueError(
            f"only {channels.shape[1]} samples per channel, need M={cfg.M}"
        )
    stats = np.mean(np.abs(channels[:, : cfg.M]) ** 2, axis=1)
    return stats > ed_threshold(cfg)
