"""Run reports: query accounting and reproducible serialization."""
import json

from spectrec.report import ExperimentConfig, QueryCounter, RunReport, Timer


class TestQueryCounter:
    def test_accumulates_by_kind(self):
        c = QueryCounter()
        c.charge("u_applications", 3)
        c.charge("u_applications", 2)
        c.charge("reveal_copies", 1)
        assert c.snapshot() == {"u_applications": 5, "reveal_copies": 1}

    def test_total(self):
        c = QueryCounter()
        c.charge("a", 3)
        c.charge("b", 4)
        assert c.total() == 7

    def test_merge(self):
        a = QueryCounter()
        a.charge("x", 1)
        b = QueryCounter()
        b.charge("x", 2)
        b.charge("y", 5)
        a.merge(b)
        assert a.snapshot() == {"x": 3, "y": 5}

    def test_snapshot_is_detached(self):
        c = QueryCounter()
        c.charge("x", 1)
        snap = c.snapshot()
        c.charge("x", 1)
        assert snap == {"x": 1}


class TestRunReport:
    def make(self, wall=0.25):
        return RunReport(
            pipeline="demo",
            verdict="accept",
            seed=9,
            config={"m": 4},
            stats={"fraction": 0.5},
            queries={"u_applications": 12},
            wall_time_s=wall,
        )

    def test_json_round_trip_fields(self):
        payload = json.loads(self.make().to_json())
        assert payload["pipeline"] == "demo"
        assert payload["verdict"] == "accept"
        assert payload["seed"] == 9
        assert payload["config"] == {"m": 4}
        assert payload["queries"] == {"u_applications": 12}

    def test_identical_runs_serialize_identically_modulo_wall_time(self):
        a = json.loads(self.make(wall=0.1).to_json())
        b = json.loads(self.make(wall=0.9).to_json())
        a.pop("wall_time_s")
        b.pop("wall_time_s")
        assert a == b


class TestTimer:
    def test_measures_nonnegative_interval(self):
        with Timer() as t:
            sum(range(1000))
        assert t.elapsed >= 0.0


class TestExperimentConfig:
    def test_holds_pipeline_and_params(self):
        cfg = ExperimentConfig(pipeline="sweep", seed=3, params={"sizes": [8, 16]})
        assert cfg.pipeline == "sweep"
        assert cfg.seed == 3
        assert cfg.params["sizes"] == [8, 16]
