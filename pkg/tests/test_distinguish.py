"""Difference verdicts between opaque devices: query accounting on the
black-box handle, flag routing by group dimensions, the promise guard, and
device recognition over a coded family."""
import numpy as np
import pytest

from spectrec.circuit import GateSet, build_unitary, decode
from spectrec.distinguish import (
    BlackBoxUnitary,
    DistinguishParams,
    check_roundtrip,
    difference,
    recognize_device,
)
from spectrec.fixtures import device_pair
from spectrec.rng import stream


def paired_boxes(relation, seed, distance=0.5):
    pair = device_pair(8, 4, 64, relation, stream(seed, relation), distance=distance)
    return pair, BlackBoxUnitary(pair.u, "u"), BlackBoxUnitary(pair.v, "v")


class TestBlackBoxUnitary:
    def test_apply_charges_one_query(self):
        box = BlackBoxUnitary(np.eye(4), "dev")
        vec = np.zeros(4, dtype=np.complex128)
        vec[1] = 1.0
        out = box.apply_vector(vec)
        np.testing.assert_allclose(out, vec)
        assert box.queries() == 1
        box.apply_vector(vec)
        assert box.queries() == 2

    def test_simulation_matrix_is_read_only(self):
        box = BlackBoxUnitary(np.eye(2), "dev")
        with pytest.raises(ValueError):
            box.simulation_matrix()[0, 0] = 0.0

    def test_decomposition_is_memoized(self):
        box = BlackBoxUnitary(np.diag([1.0, -1.0]), "dev")
        assert box.simulation_decomposition() is box.simulation_decomposition()

    def test_counter_key_carries_device_name(self):
        box = BlackBoxUnitary(np.eye(2), "left")
        box.charge_queries(5)
        assert box.counter.total("u_applications[left]") == 5


class TestParams:
    def test_fine_defaults_to_sixtyfour_per_cell(self):
        assert DistinguishParams(m_coarse=4).resolved().fine == 256

    def test_turn_bound_policies(self):
        p = DistinguishParams()
        assert p.turn_bound_for(0.5) == 4
        assert p.turn_bound_for(0.125) == 16
        assert DistinguishParams(turn_bound="sqrt").turn_bound_for(0.25) == 4
        with pytest.raises(ValueError):
            DistinguishParams(turn_bound="cubic").turn_bound_for(0.5)


class TestCheckRoundtrip:
    def test_reveal_restore_cancels(self):
        junk = check_roundtrip(np.diag([1, 1, -1, -1]).astype(complex), 0.5)
        assert abs(junk) <= 1e-9

    def test_cancels_off_grid_too(self):
        u = np.diag(np.exp(2j * np.pi * np.array([0.3, 0.3, 0.7, 0.7])))
        assert abs(check_roundtrip(u, 0.3)) <= 1e-9

    def test_oversized_layout_rejected(self):
        with pytest.raises(ValueError):
            check_roundtrip(np.eye(4), 0.0, m_coarse=2048, copies=2)


class TestDifference:
    def test_identical_devices_read_same(self):
        pair = device_pair(8, 4, 64, "rotated", stream(202, "eq"), distance=0.5)
        u = BlackBoxUnitary(pair.u, "u")
        v = BlackBoxUnitary(pair.u, "v")
        report = difference(u, v, pair.omega, 0.5, seed=203)
        assert report.verdict == "same"
        assert report.stats["flags"]["same_dim"]["moved"] == 0

    def test_rotated_spaces_fire_turned_flag(self):
        pair, u, v = paired_boxes("rotated", 200)
        report = difference(u, v, pair.omega, 0.5, seed=201)
        assert report.verdict == "different"
        assert report.stats["flags"]["same_dim"]["fired"]

    def test_smaller_u_group_fires_membership_flag(self):
        pair, u, v = paired_boxes("dim_up", 200)
        report = difference(u, v, pair.omega, 0.5, seed=201)
        assert report.verdict == "different"
        assert report.stats["dims"] == [2, 3]
        assert "lt" in report.stats["flags"]

    def test_larger_u_group_fires_membership_flag(self):
        pair, u, v = paired_boxes("dim_down", 200)
        report = difference(u, v, pair.omega, 0.5, seed=201)
        assert report.verdict == "different"
        assert report.stats["dims"] == [2, 1]
        assert "gt" in report.stats["flags"]

    def test_vacated_group_fires_orthogonality_flag(self):
        pair, u, v = paired_boxes("empty", 200)
        report = difference(u, v, pair.omega, 0.5, seed=201)
        assert report.verdict == "different"
        assert report.stats["dims"] == [2, 0]
        assert "gt_ort" in report.stats["flags"]

    def test_promise_guard_rejects_narrow_gap(self):
        pair, u, v = paired_boxes("rotated", 204, distance=0.2)
        with pytest.raises(ValueError):
            difference(u, v, pair.omega, 0.5, seed=205)
        report = difference(
            u, v, pair.omega, 0.5, seed=205,
            params=DistinguishParams(enforce_promise=False),
        )
        assert report.verdict == "different"

    def test_mismatched_ambient_dimensions_rejected(self):
        u = BlackBoxUnitary(np.eye(4), "u")
        v = BlackBoxUnitary(np.eye(8), "v")
        with pytest.raises(ValueError):
            difference(u, v, 0.0, 0.5, seed=1)

    def test_both_boxes_are_charged(self):
        pair, u, v = paired_boxes("rotated", 200)
        report = difference(u, v, pair.omega, 0.5, seed=201)
        assert report.queries["u_applications[u]"] > 0
        assert report.queries["u_applications[v]"] > 0

    def test_same_seed_reproduces_flags(self):
        pair, u, v = paired_boxes("rotated", 200)
        first = difference(u, v, pair.omega, 0.5, seed=206).stats
        pair, u, v = paired_boxes("rotated", 200)
        second = difference(u, v, pair.omega, 0.5, seed=206).stats
        assert first == second


class TestRecognizeDevice:
    def test_family_member_is_recognized(self):
        gs = GateSet.by_name("involutive")
        target = build_unitary(decode(11, gs, 2, 2), gs)
        report = recognize_device(
            BlackBoxUnitary(target, "target"), gs, 2, 2, 0.5, seed=206, search_space=16
        )
        assert report.verdict == "found"
        winner = build_unitary(decode(report.stats["code"], gs, 2, 2), gs)
        np.testing.assert_allclose(winner.matrix, target.matrix, atol=1e-12)
        hits = sum(1 for c in report.stats["per_run"] if c == 11)
        assert hits >= 5

    def test_device_outside_search_range_is_not_found(self):
        gs = GateSet.by_name("involutive")
        target = build_unitary(decode(11, gs, 2, 2), gs)
        report = recognize_device(
            BlackBoxUnitary(target, "target"), gs, 2, 2, 0.5, seed=209,
            search_space=8, runs=3, retries=2,
        )
        assert report.verdict == "not-found"
        assert report.stats["code"] is None
