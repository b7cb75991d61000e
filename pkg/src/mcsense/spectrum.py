"""Channel-plan arithmetic and active-channel-set semantics.

The sensed band [0, B_max] is split into L equal channels of width B.
Everything downstream works on channel indices 0..L-1; physical Hz only
matter at configuration and reporting time.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ChannelPlan:
    """Equal-width segmentation of the sensed band.

    Attributes:
        L: number of channels.
        B_hz: per-channel bandwidth in Hz.
        B_max_hz: total bandwidth in Hz, always L * B_hz.
        N_max: assumed maximum number of simultaneously occupied channels.
        omega_max: maximum channel occupancy N_max / L.
    """

    L: int
    B_hz: float
    B_max_hz: float
    N_max: int
    omega_max: float


def channel_plan(L: int, B_hz: float, N_max: int, B_max_hz: float | None = None) -> ChannelPlan:
    """Build and validate a ChannelPlan from raw configuration values.

    B_max_hz may be supplied redundantly (e.g. from a config file); it is
    checked against L * B_hz and then recomputed canonically.

    Raises:
        ValueError: inconsistent dimensions or occupancy out of range.
    """
    if L < 1:
        raise ValueError(f"L must be a positive integer, got {L}")
    if B_hz <= 0:
        raise ValueError(f"B_hz must be positive, got {B_hz}")
    canonical = L * float(B_hz)
    if B_max_hz is not None and abs(B_max_hz - canonical) > 1e-9 * canonical:
        raise ValueError(
            f"inconsistent dimensions: L*B = {canonical} Hz but B_max = {B_max_hz} Hz"
        )
    if not 1 <= N_max <= L:
        raise ValueError(f"occupancy out of range: N_max = {N_max} not in [1, {L}]")
    return ChannelPlan(L=L, B_hz=float(B_hz), B_max_hz=canonical,
                       N_max=N_max, omega_max=N_max / L)


def validate_plan(plan: ChannelPlan) -> ChannelPlan:
    """Re-validate an existing plan, returning the canonical form."""
    return channel_plan(plan.L, plan.B_hz, plan.N_max, plan.B_max_hz)


def landau_minimum_rate(plan: ChannelPlan) -> float:
    """Minimum average sampling rate (Hz) that permits recovery: omega_max * B_max."""
    return plan.omega_max * plan.B_max_hz


@dataclass(frozen=True)
class ActiveChannelSet:
    """Sorted, duplicate-free set of occupied channel indices."""

    indices: tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.indices)

    def __contains__(self, channel: int) -> bool:
        return channel in self.indices

    def __iter__(self):
        return iter(self.indices)


def active_set(indices) -> ActiveChannelSet:
    """Canonicalize channel indices into an ActiveChannelSet.

    Indices are sorted ascending; duplicates are an error, as are negative
    values. Upper-bound checks against a plan happen at the use sites that
    have one (see check_active_set).
    """
    idx = tuple(sorted(int(i) for i in indices))
    if any(i < 0 for i in idx):
        raise ValueError(f"channel indices must be non-negative, got {idx}")
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate channel indices in {idx}")
    return ActiveChannelSet(idx)


def check_active_set(s: ActiveChannelSet, plan: ChannelPlan) -> ActiveChannelSet:
    """Verify every index fits the plan; returns the set unchanged."""
    if s.indices and s.indices[-1] >= plan.L:
        raise ValueError(f"channel index {s.indices[-1]} out of range for L={plan.L}")
    return s


def complement(s: ActiveChannelSet, plan: ChannelPlan) -> ActiveChannelSet:
    """Vacant channels: all plan indices not in s."""
    check_active_set(s, plan)
    occupied = set(s.indices)
    return ActiveChannelSet(tuple(i for i in range(plan.L) if i not in occupied))
