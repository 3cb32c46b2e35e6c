"""JSON instance format shared by the CLI and the generator.

::

    {"tasks": [{"id": "t1", "wcet": 1}, ...],
     "edges": [["t1", "t2"], ...],
     "constraints": [{"source": "t1", "sink": "t7", "bound": 9}, ...],
     "comm": {"model": "linear", "q": 0}}
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Mapping

from .allocation import CommModel
from .graph import LatencyConstraint, Task, TaskGraph


@dataclass(frozen=True)
class Instance:
    graph: TaskGraph
    constraints: tuple[LatencyConstraint, ...] = ()
    comm: CommModel = field(default_factory=CommModel)

    def to_dict(self) -> dict:
        return {
            "tasks": [{"id": t.id, "wcet": t.wcet} for t in self.graph.tasks],
            "edges": [list(e) for e in self.graph.edges],
            "constraints": [c.to_dict() for c in self.constraints],
            "comm": self.comm.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Instance":
        try:
            tasks = tuple(Task(t["id"], t["wcet"]) for t in d["tasks"])
            edges = tuple(tuple(e) for e in d.get("edges", ()))
            constraints = tuple(
                LatencyConstraint(c["source"], c["sink"], c["bound"]) for c in d.get("constraints", ())
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed instance document: {exc}") from exc
        return cls(TaskGraph(tasks, edges), constraints, CommModel.from_dict(d.get("comm")))


def dumps(instance: Instance) -> str:
    return json.dumps(instance.to_dict(), indent=2)


def loads(text: str) -> Instance:
    return Instance.from_dict(json.loads(text))


def load(path: str | os.PathLike) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(instance: Instance, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(instance))
        fh.write("\n")
