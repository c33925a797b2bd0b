"""Evaluator settings, the retry-then-penalize policy, and local execution."""

from __future__ import annotations

import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import ConfigError, MalformedResponse
from ..space import ParamSpace, define_space
from ..tasks import FAILED, OK, EvalResult, EvalTask
from . import external
from .landscapes import LANDSCAPES, landscape_value
from .surrogate import FITNESS_SOURCES, SurrogateConfig, surrogate_fitness

log = logging.getLogger(__name__)

KINDS = ("synthetic", "surrogate", "external")


@dataclass(frozen=True)
class EvaluatorSpec:
    kind: str = "synthetic"
    landscape: Optional[str] = None
    command: Optional[str] = None
    timeout_seconds: float = 600.0
    retries: int = 2
    fitness_source: str = "mean_val_auc"
    surrogate: SurrogateConfig = field(default_factory=SurrogateConfig)
    max_concurrency: int = 2  # cap on simultaneous child processes (external kind)
    delay_seconds: float = 0.0  # artificial latency, for load and fault testing
    space: Optional[ParamSpace] = None  # bounds for synthetic landscapes

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"evaluator kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "synthetic":
            if not self.landscape:
                raise ConfigError("synthetic evaluator needs a landscape name")
            if self.landscape not in LANDSCAPES:
                raise ConfigError(f"unknown landscape {self.landscape!r}; choose from {sorted(LANDSCAPES)}")
        if self.kind == "external" and not self.command:
            raise ConfigError("external evaluator needs a command")
        if not self.timeout_seconds > 0:
            raise ConfigError("timeout_seconds must be positive")
        if self.retries < 0:
            raise ConfigError("retries must be non-negative")
        if self.max_concurrency < 1:
            raise ConfigError("max_concurrency must be at least 1")
        if self.fitness_source not in FITNESS_SOURCES:
            raise ConfigError(f"fitness_source must be one of {FITNESS_SOURCES}")

    def with_space(self, space: ParamSpace) -> "EvaluatorSpec":
        return self if self.space == space else replace(self, space=space)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "landscape": self.landscape,
            "command": self.command,
            "timeout_seconds": self.timeout_seconds,
            "retries": self.retries,
            "fitness_source": self.fitness_source,
            "surrogate": self.surrogate.to_dict(),
            "max_concurrency": self.max_concurrency,
            "delay_seconds": self.delay_seconds,
            "space": None if self.space is None else self.space.to_json(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluatorSpec":
        d = dict(d)
        if d.get("surrogate") is not None:
            d["surrogate"] = SurrogateConfig.from_dict(d["surrogate"])
        else:
            d.pop("surrogate", None)
        if d.get("space") is not None:
            d["space"] = define_space(d["space"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(f"bad evaluator settings: {exc}") from None


class FitnessEvaluator:
    """Runs one evaluation per task with retries; persistent failure scores 0.0.

    Safe to call from several threads at once. Build it from an
    :class:`EvaluatorSpec` or wrap a plain ``fn(vector) -> float``.
    """

    def __init__(self, spec: EvaluatorSpec | None = None, fn: Callable | None = None, retries: int | None = None):
        if (spec is None) == (fn is None):
            raise ValueError("give exactly one of spec or fn")
        self.spec = spec
        self._fn = fn
        self.retries = spec.retries if retries is None and spec is not None else (retries or 0)
        cap = spec.max_concurrency if spec is not None and spec.kind == "external" else None
        self._gate = threading.BoundedSemaphore(cap) if cap else None
        self.cancel = threading.Event()  # set to skip remaining retries

    @classmethod
    def from_callable(cls, fn: Callable, retries: int = 0) -> "FitnessEvaluator":
        return cls(fn=fn, retries=retries)

    @property
    def evaluator_dict(self) -> dict | None:
        return None if self.spec is None else self.spec.to_dict()

    def _attempt(self, task: EvalTask) -> float:
        if self.spec is None:
            value = float(self._fn(np.asarray(task.values)))
        else:
            spec = self.spec
            if spec.delay_seconds:
                time.sleep(spec.delay_seconds)
            if spec.kind == "synthetic":
                space = spec.space
                lower = space.lower if space is not None else 0.0
                upper = space.upper if space is not None else 1.0
                value = landscape_value(spec.landscape, task.values, lower, upper)
            elif spec.kind == "surrogate":
                value = surrogate_fitness(task.params(), spec.surrogate, spec.fitness_source)
            else:
                if self._gate is None:
                    value = self._external(task)
                else:
                    with self._gate:
                        value = self._external(task)
        if not (math.isfinite(value) and 0.0 <= value <= 1.0):
            raise MalformedResponse(f"fitness {value} outside [0, 1]")
        return value

    def _external(self, task: EvalTask) -> float:
        return external.run_command(
            self.spec.command, task.params(), task.eval_id, task.seed, self.spec.timeout_seconds
        )

    def evaluate_task(self, task: EvalTask, worker_id: str = "local") -> EvalResult:
        t0 = time.perf_counter()
        errors = []
        attempts = self.retries + 1
        for attempt in range(1, attempts + 1):
            if self.cancel.is_set():
                errors.append("cancelled")
                attempts = attempt - 1
                break
            try:
                value = self._attempt(task)
            except Exception as exc:  # penalty policy: nothing escapes
                errors.append(f"{type(exc).__name__}: {exc}")
                log.warning("eval %d attempt %d/%d failed: %s", task.eval_id, attempt, attempts, errors[-1])
                continue
            return EvalResult(task.eval_id, value, OK, time.perf_counter() - t0, worker_id, attempt, tuple(errors))
        return EvalResult(task.eval_id, 0.0, FAILED, time.perf_counter() - t0, worker_id, attempts, tuple(errors))

    def __call__(self, v: Sequence[float], names: Sequence[str] | None = None) -> float:
        names = tuple(names) if names is not None else (
            tuple(self.spec.space.names) if self.spec is not None and self.spec.space is not None
            else tuple(f"x{i}" for i in range(len(v)))
        )
        task = EvalTask(0, 0, 0, names, tuple(float(x) for x in v), seed=0)
        return self.evaluate_task(task).fitness


def as_evaluator(evaluator) -> FitnessEvaluator:
    if isinstance(evaluator, FitnessEvaluator):
        return evaluator
    if isinstance(evaluator, EvaluatorSpec):
        return FitnessEvaluator(evaluator)
    if callable(evaluator):
        return FitnessEvaluator.from_callable(evaluator)
    raise TypeError(f"cannot evaluate with {evaluator!r}")


class LocalExecutor:
    """Evaluates a generation's tasks in-process on ``slots`` threads."""

    def __init__(self, evaluator, slots: int = 1):
        if slots < 1:
            raise ConfigError("slots must be at least 1")
        self.evaluator = as_evaluator(evaluator)
        self.slots = slots

    @property
    def evaluator_dict(self):
        return self.evaluator.evaluator_dict

    def evaluate_batch(self, tasks: Sequence[EvalTask]) -> list[EvalResult]:
        if self.slots == 1 or len(tasks) <= 1:
            return [self.evaluator.evaluate_task(t) for t in tasks]
        with ThreadPoolExecutor(max_workers=self.slots) as pool:
            return list(pool.map(self.evaluator.evaluate_task, tasks))


def evaluate(spec: EvaluatorSpec, v: Sequence[float], space: ParamSpace | None = None) -> float:
    """Fitness of a single vector under ``spec``; failures score 0.0."""
    if space is not None:
        spec = spec.with_space(space)
    names = spec.space.names if spec.space is not None else None
    return FitnessEvaluator(spec)(v, names=names)
