"""Query accounting and reproducible run reports."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any

__all__ = ["QueryCounter", "RunReport", "ExperimentConfig"]


class QueryCounter:
    """Named tally of oracle invocations.

    Pipelines charge every black-box application here, including the ones a
    simulation backend short-circuits: the counter reflects what the protocol
    would have spent, so cost scaling can be measured without running circuits.
    """

    def __init__(self) -> None:
        self.counts: dict[str, int] = {}

    def charge(self, name: str, amount: int = 1) -> None:
        if amount < 0:
            raise ValueError("cannot charge a negative amount")
        self.counts[name] = self.counts.get(name, 0) + int(amount)

    def total(self, name: str | None = None) -> int:
        if name is not None:
            return self.counts.get(name, 0)
        return sum(self.counts.values())

    def merge(self, other: "QueryCounter") -> None:
        for name, amount in other.counts.items():
            self.charge(name, amount)

    def snapshot(self) -> dict[str, int]:
        return dict(sorted(self.counts.items()))

    def __repr__(self) -> str:
        return f"QueryCounter({self.counts!r})"


@dataclass
class RunReport:
    """Outcome of one pipeline run; identical seeds reproduce it byte for byte.

    `wall_time_s` is informational and excluded from equality and serialized
    determinism comparisons.
    """

    pipeline: str
    verdict: str
    seed: int
    config: dict[str, Any]
    stats: dict[str, Any] = field(default_factory=dict)
    queries: dict[str, int] = field(default_factory=dict)
    wall_time_s: float = 0.0

    def deterministic_payload(self) -> dict[str, Any]:
        return {
            "pipeline": self.pipeline,
            "verdict": self.verdict,
            "seed": self.seed,
            "config": self.config,
            "stats": self.stats,
            "queries": self.queries,
        }

    def to_json(self, *, include_wall_time: bool = True) -> str:
        doc = self.deterministic_payload()
        if include_wall_time:
            doc["wall_time_s"] = round(self.wall_time_s, 6)
        return json.dumps(doc, indent=2, sort_keys=True, default=_jsonify)


def _jsonify(value):
    import numpy as np

    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value)}")


class Timer:
    def __enter__(self) -> "Timer":
        self._start = time.perf_counter()
        self.elapsed = 0.0
        return self

    def __exit__(self, *exc) -> None:
        self.elapsed = time.perf_counter() - self._start


@dataclass
class ExperimentConfig:
    """Declarative description of a run: pipeline name, parameters, seed."""

    pipeline: str
    seed: int
    params: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {"pipeline": self.pipeline, "seed": self.seed, "params": self.params},
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        doc = json.loads(text)
        return cls(str(doc["pipeline"]), int(doc["seed"]), dict(doc.get("params", {})))
