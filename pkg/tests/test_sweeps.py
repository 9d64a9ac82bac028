"""Scaling-sweep plumbing: the log-log fit against synthetic power laws and
one-trial smoke rows from each pipeline sweep."""
import numpy as np
import pytest

from spectrec.sweeps import (
    difference_scaling,
    fit_loglog_slope,
    recognition_scaling,
    structure_scaling,
    total_queries,
)


class TestFitLoglogSlope:
    def test_recovers_square_root_law(self):
        rows = [{"x": x, "queries": 3.0 * x**0.5} for x in (4, 8, 16, 32)]
        assert fit_loglog_slope(rows) == pytest.approx(0.5, abs=1e-12)

    def test_recovers_quadratic_law(self):
        rows = [{"x": x, "queries": 0.25 * x**2} for x in (2, 4, 8)]
        assert fit_loglog_slope(rows) == pytest.approx(2.0, abs=1e-12)

    def test_flat_cost_has_zero_slope(self):
        rows = [{"x": x, "queries": 7.0} for x in (2, 4, 8)]
        assert fit_loglog_slope(rows) == pytest.approx(0.0, abs=1e-12)


class TestSweepRows:
    def test_recognition_rows_carry_mean_queries(self):
        rows = recognition_scaling([8, 16], trials=2, seed=210)
        assert [r["x"] for r in rows] == [8, 16]
        assert all(r["queries"] > 0 for r in rows)

    def test_structure_rows_cover_requested_spaces(self):
        rows = structure_scaling([4, 8], trials=1, seed=211)
        assert [r["x"] for r in rows] == [4, 8]
        assert all(r["queries"] > 0 for r in rows)

    def test_difference_rows_index_by_inverse_distance(self):
        rows = difference_scaling([0.5], trials=1, seed=212)
        assert rows[0]["x"] == pytest.approx(2.0)
        assert rows[0]["queries"] > 0
