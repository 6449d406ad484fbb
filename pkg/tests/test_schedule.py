import numpy as np
import pytest

from subradiance import (DomainError, PiPairConfig, PlanError, PulsePlan,
                         plan_passive, plan_read, plan_write, stored_rows,
                         sylvester, validate_pi_pair, verify_plan)
from subradiance.schedule import PulseEvent
from subradiance.states import SignPattern


def test_sylvester_orthogonality():
    for order in (2, 4, 8, 16):
        h = sylvester(order).entries
        assert np.array_equal(h @ h.T, order * np.eye(order, dtype=np.int64))
        assert np.all(h[0] == 1)
        assert set(np.unique(h)) == {-1, 1}


def test_sylvester_rejects_bad_order():
    for bad in (0, 1, 3, 6):
        with pytest.raises(DomainError):
            sylvester(bad)


def test_write_masks_four_parts():
    plan = plan_write(4, 3, 1.0)
    assert [e.mask.to_string() for e in plan.events] == ["+-+-", "+--+", "+-+-"]
    # flips on parts (B,D), (B,C), (B,D)
    rows = ["".join("+" if s > 0 else "-" for s in r) for r in stored_rows(plan)]
    assert rows == ["+--+", "++--", "+-+-"]


def test_read_masks_four_parts():
    fwd = plan_read(4, 3, 1.0)
    rev = plan_read(4, 3, 1.0, time_reversed=True)
    # flips on (A,D), (B,D), (B,C) forward and (A,C), (B,C), (B,D) reversed
    assert [e.mask.to_string() for e in fwd.events] == ["-++-", "+-+-", "+--+"]
    assert [e.mask.to_string() for e in rev.events] == ["-+-+", "+--+", "+-+-"]


@pytest.mark.parametrize("parts", [2, 4, 8])
def test_verify_all_geometries(parts):
    for bins in range(1, parts):
        w = plan_write(parts, bins, 1.0)
        wr = verify_plan(w)
        assert wr.ok, wr.violations
        assert np.all(wr.orthogonality == np.diag(np.diag(wr.orthogonality)))
        for reversed_ in (False, True):
            r = plan_read(parts, bins, 1.0, time_reversed=reversed_)
            rr = verify_plan(r)
            assert rr.ok, rr.violations
            want = tuple(range(bins, 0, -1)) if reversed_ else tuple(range(1, bins + 1))
            assert rr.emission_order == want
            # emitted on minus-all-plus so the output phase matches the input
            assert set(rr.emission_signs) <= {-1}


def test_verifier_rejects_corrupt_write():
    plan = plan_write(4, 3, 1.0)
    # replace the final mask so bin 3 ends superradiant
    bad_events = plan.events[:2] + (
        PulseEvent(plan.events[2].time, SignPattern((1, 1, 1, 1)), "two_pi"),)
    bad = PulsePlan(4, bad_events, 1.0, "write", 3)
    report = verify_plan(bad)
    assert not report.ok
    assert any("superradiant" in v for v in report.violations)


def test_verifier_rejects_corrupt_read():
    plan = plan_read(4, 3, 1.0)
    shuffled = (plan.events[1], plan.events[0], plan.events[2])
    retimed = tuple(PulseEvent(e0.time, e.mask, e.kind)
                    for e0, e in zip(plan.events, shuffled))
    bad = PulsePlan(4, retimed, 1.0, "read", 3)
    assert not verify_plan(bad).ok


def test_geometry_guards():
    with pytest.raises(DomainError):
        plan_write(3, 2, 1.0)
    with pytest.raises(PlanError):
        plan_write(4, 4, 1.0)  # need one part spare for orthogonality
    with pytest.raises(PlanError):
        plan_write(4, 0, 1.0)


def test_plan_timing():
    plan = plan_write(4, 3, 2.0, t0=5.0)
    assert [e.time for e in plan.events] == [7.0, 9.0, 11.0]
    assert plan.t_end == 13.0
    read = plan_read(4, 3, 2.0, t0=plan.t_end)
    assert read.events[0].time == 13.0
    assert read.t_end == 19.0


def test_json_round_trip():
    plan = plan_read(8, 5, 3.5e-6, time_reversed=True, t0=1e-5)
    back = PulsePlan.from_json(plan.to_json())
    assert back == plan


def test_passive_patterns_four_parts():
    w = plan_passive(4, 3, 1.0, stage="write")
    # initial all-off, then: all on; B,D on; A,C on (-1 = on)
    assert [e.mask.to_string() for e in w.events] == \
        ["++++", "----", "+-+-", "-+-+"]
    r_fwd = plan_passive(4, 3, 1.0, stage="read")
    # D on; A,B,C on; B on
    assert [e.mask.to_string() for e in r_fwd.events] == \
        ["+++-", "---+", "+-++"]
    assert all(e.kind == "modulator_set" for e in w.events)


@pytest.mark.parametrize("parts", [2, 4, 8])
def test_passive_equivalent_to_active(parts):
    for bins in range(1, parts):
        assert verify_plan(plan_passive(parts, bins, 1.0, stage="write")).ok
        for reversed_ in (False, True):
            plan = plan_passive(parts, bins, 1.0, stage="read",
                                time_reversed=reversed_)
            report = verify_plan(plan)
            assert report.ok, report.violations


def test_passive_verifier_rejects_wrong_pattern():
    plan = plan_passive(4, 3, 1.0, stage="write")
    bad_events = plan.events[:3] + (
        PulseEvent(plan.events[3].time, SignPattern((1, 1, 1, 1)),
                   "modulator_set"),)
    bad = PulsePlan(4, bad_events, 1.0, "passive_write", 3)
    assert not verify_plan(bad).ok


def test_pi_pair_validation():
    L = 5e-3
    k = 2 * np.pi / 606e-9
    dk = 2 * np.pi * 3 / L  # m = 3
    ok, res = validate_pi_pair(PiPairConfig(
        k1=(0.0, 0.0, k), k2=(0.0, dk, k), sample_length=L, m_index=3))
    # |k1 - k2| is not exactly dk for this geometry; use collinear offset
    ok2, res2 = validate_pi_pair(PiPairConfig(
        k1=(0.0, 0.0, k), k2=(0.0, 0.0, k - dk), sample_length=L, m_index=3))
    assert ok2 and res2 < 1e-9

    bad_m, _ = validate_pi_pair(PiPairConfig(
        k1=(0.0, 0.0, k), k2=(0.0, 0.0, k - dk), sample_length=L, m_index=2))
    assert not bad_m
    zero_m, _ = validate_pi_pair(PiPairConfig(
        k1=(0.0, 0.0, k), k2=(0.0, 0.0, k), sample_length=L, m_index=0))
    assert not zero_m
    off_grid, res3 = validate_pi_pair(PiPairConfig(
        k1=(0.0, 0.0, k), k2=(0.0, 0.0, k - 1.5 * dk), sample_length=L,
        m_index=4))
    assert not off_grid and res3 > 0.1
