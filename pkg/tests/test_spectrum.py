import numpy as np
import pytest

from mcsense import (active_set, channel_plan, complement,
                     landau_minimum_rate, validate_plan)
from mcsense.spectrum import check_active_set


def test_reference_plan():
    plan = channel_plan(32, 10e6, 8)
    assert plan.B_max_hz == 32 * 10e6
    assert plan.omega_max == 0.25
    assert plan.L * plan.B_hz == plan.B_max_hz


def test_degenerate_single_channel():
    plan = channel_plan(1, 1.0, 1)
    assert plan.omega_max == 1.0
    assert plan.B_max_hz == 1.0


def test_occupancy_out_of_range():
    with pytest.raises(ValueError, match="occupancy"):
        channel_plan(8, 1e6, 9)
    with pytest.raises(ValueError, match="occupancy"):
        channel_plan(8, 1e6, 0)


def test_inconsistent_b_max_rejected():
    with pytest.raises(ValueError, match="inconsistent"):
        channel_plan(32, 10e6, 8, B_max_hz=300e6)
    # a redundant but consistent B_max is fine and recomputed canonically
    plan = channel_plan(32, 10e6, 8, B_max_hz=320e6)
    assert plan.B_max_hz == 320e6


def test_validate_plan_roundtrip():
    plan = channel_plan(16, 5e6, 4)
    assert validate_plan(plan) == plan


@pytest.mark.parametrize("L,B,N_max,expected", [
    (32, 10e6, 8, 80e6),
    (4, 5e6, 1, 5e6),
])
def test_landau_minimum_rate(L, B, N_max, expected):
    assert landau_minimum_rate(channel_plan(L, B, N_max)) == pytest.approx(expected)


def test_landau_nyquist_when_fully_occupied():
    plan = channel_plan(8, 1e6, 8)
    assert landau_minimum_rate(plan) == plan.B_max_hz


def test_landau_never_exceeds_nyquist():
    rng = np.random.default_rng(0)
    for _ in range(50):
        L = int(rng.integers(1, 64))
        N_max = int(rng.integers(1, L + 1))
        plan = channel_plan(L, float(rng.uniform(1e3, 1e9)), N_max)
        rate = landau_minimum_rate(plan)
        assert rate <= plan.B_max_hz * (1 + 1e-12)
        if N_max == L:
            assert rate == pytest.approx(plan.B_max_hz)


def test_active_set_canonical_form():
    s = active_set([30, 8, 17, 16, 29, 18])
    assert s.indices == (8, 16, 17, 18, 29, 30)
    assert s.N == 6
    assert active_set(s.indices) == s  # idempotent


def test_active_set_rejects_duplicates_and_negatives():
    with pytest.raises(ValueError, match="duplicate"):
        active_set([1, 1, 2])
    with pytest.raises(ValueError, match="non-negative"):
        active_set([-1, 3])


def test_complement_reference_set(plan32, demo_active):
    comp = complement(demo_active, plan32)
    assert comp.N == 26
    assert not set(comp.indices) & set(demo_active.indices)
    assert sorted(set(comp.indices) | set(demo_active.indices)) == list(range(32))


def test_complement_edge_cases(plan32):
    assert complement(active_set([]), plan32).indices == tuple(range(32))
    assert complement(active_set(range(32)), plan32).indices == ()


def test_complement_involution(plan32):
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(0, 33))
        s = active_set(rng.choice(32, size=n, replace=False))
        comp = complement(s, plan32)
        assert s.N + comp.N == plan32.L
        assert complement(comp, plan32) == s


def test_out_of_range_index_rejected(plan32):
    with pytest.raises(ValueError, match="out of range"):
        check_active_set(active_set([5, 32]), plan32)
