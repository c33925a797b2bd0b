"""Units of fitness work and their outcomes, shared by local and remote execution."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

OK = "ok"
FAILED = "failed"
CARRIED = "carried"


@dataclass(frozen=True)
class EvalTask:
    eval_id: int
    generation: int
    chromosome_index: int
    names: tuple[str, ...]
    values: tuple[float, ...]
    seed: int
    evaluator: Optional[dict] = None  # EvaluatorSpec.to_dict(); None for in-process callables

    def params(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["names"] = list(self.names)
        d["values"] = list(self.values)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvalTask":
        return cls(
            eval_id=int(d["eval_id"]),
            generation=int(d["generation"]),
            chromosome_index=int(d["chromosome_index"]),
            names=tuple(d["names"]),
            values=tuple(float(x) for x in d["values"]),
            seed=int(d["seed"]),
            evaluator=d.get("evaluator"),
        )


@dataclass(frozen=True)
class EvalResult:
    eval_id: int
    fitness: float
    status: str = OK
    wall_seconds: float = 0.0
    worker_id: str = "local"
    attempts: int = 1
    errors: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.status == FAILED and self.fitness != 0.0:
            raise ValueError("failed results must carry the penalty fitness 0.0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["errors"] = list(self.errors)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvalResult":
        return cls(
            eval_id=int(d["eval_id"]),
            fitness=float(d["fitness"]),
            status=str(d.get("status", OK)),
            wall_seconds=float(d.get("wall_seconds", 0.0)),
            worker_id=str(d.get("worker_id", "?")),
            attempts=int(d.get("attempts", 1)),
            errors=tuple(d.get("errors", ())),
        )
