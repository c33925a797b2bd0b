"""Real-coded generational genetic algorithm.

Binary tournament selection, simulated binary crossover (SBX), polynomial
mutation and elitist replacement, driven by :func:`run_ga`. Fitness is
maximized and lies in ``[0, 1]``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields, replace
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import rng as rngmod
from .errors import ConfigError, PopulationTooSmall, UnevaluatedIndividual
from .space import ParamSpace, _frozen, as_vector, clamp
from .tasks import CARRIED, OK, EvalTask

log = logging.getLogger(__name__)

__all__ = [
    "Individual",
    "Population",
    "GAConfig",
    "GenerationStats",
    "SearchResult",
    "initialize_population",
    "tournament",
    "binary_tournament_select",
    "sbx_beta",
    "sbx_children",
    "sbx_crossover",
    "mutate_values",
    "polynomial_mutation",
    "evolve_generation",
    "run_ga",
]


@dataclass
class Individual:
    chromosome: np.ndarray
    fitness: Optional[float] = None
    eval_id: Optional[int] = None
    status: Optional[str] = None

    def __post_init__(self):
        if self.fitness is not None and not 0.0 <= self.fitness <= 1.0:
            raise ValueError(f"fitness must lie in [0, 1], got {self.fitness}")

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


@dataclass
class Population:
    individuals: list[Individual]
    generation: int = 0

    def __len__(self):
        return len(self.individuals)

    def __iter__(self):
        return iter(self.individuals)

    def __getitem__(self, i):
        return self.individuals[i]

    def fitnesses(self) -> np.ndarray:
        missing = [i for i, ind in enumerate(self.individuals) if ind.fitness is None]
        if missing:
            raise UnevaluatedIndividual(f"individuals {missing} have no fitness")
        return np.array([ind.fitness for ind in self.individuals])


@dataclass(frozen=True)
class GAConfig:
    """GA settings. ``mutation_prob=None`` means ``1 / dimension``."""

    population_size: int = 70
    generations: int = 70
    crossover_prob: float = 0.9
    mutation_prob: Optional[float] = None
    eta_c: float = 20.0
    eta_m: float = 20.0
    seed: int = 0
    elitism: int = 1
    target_fitness: Optional[float] = None  # stop early once best >= target

    def __post_init__(self):
        if self.population_size < 2:
            raise PopulationTooSmall(f"population_size must be >= 2, got {self.population_size}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ConfigError(f"crossover_prob must lie in [0, 1], got {self.crossover_prob}")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ConfigError(f"mutation_prob must lie in [0, 1], got {self.mutation_prob}")
        if not (self.eta_c > 0 and self.eta_m > 0):
            raise ConfigError("eta_c and eta_m must be positive")
        if not 0 <= self.seed <= rngmod.SEED_MASK:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not 1 <= self.elitism < self.population_size:
            raise ConfigError(
                f"elitism must be in [1, population_size), got {self.elitism}"
            )

    def mutation_rate(self, dimension: int) -> float:
        return 1.0 / dimension if self.mutation_prob is None else self.mutation_prob

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "GAConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown GA settings: {sorted(unknown)}")
        return cls(**d)


class GenerationStats(NamedTuple):
    best_fitness: float
    mean_fitness: float


@dataclass
class SearchResult:
    best: Individual
    history: list[GenerationStats] = field(default_factory=list)
    total_evaluations: int = 0

    def same_as(self, other: "SearchResult") -> bool:
        """Equality over everything the seed determines (no wall-clock fields)."""
        return (
            np.array_equal(self.best.chromosome, other.best.chromosome)
            and self.best.fitness == other.best.fitness
            and self.history == other.history
            and self.total_evaluations == other.total_evaluations
        )


class _Streams(NamedTuple):
    selection: np.random.Generator
    crossover: np.random.Generator
    mutation: np.random.Generator


def _streams(seed: int, generation: int) -> _Streams:
    return _Streams(
        rngmod.substream(seed, "selection", generation),
        rngmod.substream(seed, "crossover", generation),
        rngmod.substream(seed, "mutation", generation),
    )


# -- operators -------------------------------------------------------------


def initialize_population(space: ParamSpace, n: int, rng: np.random.Generator) -> Population:
    """``n`` individuals drawn uniformly inside the space bounds."""
    if n < 2:
        raise PopulationTooSmall(f"population needs at least 2 individuals, got {n}")
    u = rng.random((n, space.dimension))
    pts = space.lower + u * (space.upper - space.lower)
    return Population([Individual(clamp(p, space)) for p in pts], generation=0)


def tournament(a: Individual, b: Individual) -> Individual:
    """Winner of one pairing: the strictly fitter, else the first entrant."""
    if a.fitness is None or b.fitness is None:
        raise UnevaluatedIndividual("tournament over an unevaluated individual")
    return b if b.fitness > a.fitness else a


def binary_tournament_select(pop: Population, rng: np.random.Generator) -> Individual:
    """Tournament between two distinct, uniformly drawn individuals."""
    n = len(pop)
    if n < 2:
        raise PopulationTooSmall("tournament needs at least two individuals")
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    if j >= i:
        j += 1
    return tournament(pop[i], pop[j])


def sbx_beta(u, eta_c: float):
    u = np.asarray(u, dtype=np.float64)
    k = 1.0 / (eta_c + 1.0)
    with np.errstate(divide="ignore"):
        return np.where(u <= 0.5, (2.0 * u) ** k, (1.0 / (2.0 * (1.0 - u))) ** k)


def sbx_children(p1, p2, u, eta_c: float) -> tuple[np.ndarray, np.ndarray]:
    """Unclamped SBX children for given uniform draws ``u`` (one per coordinate)."""
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    beta = sbx_beta(u, eta_c)
    mid = p1 + p2
    spread = beta * np.abs(p2 - p1)
    return 0.5 * (mid - spread), 0.5 * (mid + spread)


def sbx_crossover(p1, p2, cfg: GAConfig, space: ParamSpace, rng: np.random.Generator):
    p1 = as_vector(p1, space)
    p2 = as_vector(p2, space)
    if rng.random() >= cfg.crossover_prob:
        return _frozen(p1.copy()), _frozen(p2.copy())
    u = rng.random(space.dimension)
    c1, c2 = sbx_children(p1, p2, u, cfg.eta_c)
    return clamp(c1, space), clamp(c2, space)


def mutate_values(p, u, lower, upper, eta_m: float) -> np.ndarray:
    """Polynomial mutation of every coordinate of ``p`` for the given draws ``u``."""
    p = np.asarray(p, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    k = 1.0 / (1.0 + eta_m)
    delta_l = (2.0 * u) ** k - 1.0
    with np.errstate(invalid="ignore"):
        delta_r = 1.0 - (2.0 * (1.0 - u)) ** k
    out = np.where(u <= 0.5, p + delta_l * (p - lower), p + delta_r * (upper - p))
    return np.minimum(np.maximum(out, lower), upper)


def polynomial_mutation(p, cfg: GAConfig, space: ParamSpace, rng: np.random.Generator) -> np.ndarray:
    p = as_vector(p, space)
    mask = rng.random(space.dimension) < cfg.mutation_rate(space.dimension)
    u = rng.random(space.dimension)
    mutated = mutate_values(p, u, space.lower, space.upper, cfg.eta_m)
    return _frozen(np.where(mask, mutated, p))


def _ranked(pop: Population) -> list[int]:
    fit = pop.fitnesses()
    # stable: among equal fitness the lower index ranks first
    return sorted(range(len(pop)), key=lambda i: -fit[i])


def evolve_generation(
    pop: Population,
    cfg: GAConfig,
    space: ParamSpace,
    rng: np.random.Generator | _Streams | None = None,
) -> Population:
    """Next generation: elites copied over, the rest bred from tournament winners.

    ``rng`` may be a single generator used for every step; by default the
    seed-derived per-generation substreams are used.
    """
    if rng is None:
        streams = _streams(cfg.seed, pop.generation + 1)
    elif isinstance(rng, _Streams):
        streams = rng
    else:
        streams = _Streams(rng, rng, rng)
    n = len(pop)
    order = _ranked(pop)
    nxt = [replace(pop[i], status=CARRIED) for i in order[: cfg.elitism]]
    while len(nxt) < n:
        a = binary_tournament_select(pop, streams.selection)
        b = binary_tournament_select(pop, streams.selection)
        c1, c2 = sbx_crossover(a.chromosome, b.chromosome, cfg, space, streams.crossover)
        for child in (c1, c2):
            if len(nxt) < n:
                nxt.append(Individual(polynomial_mutation(child, cfg, space, streams.mutation)))
    return Population(nxt, generation=pop.generation + 1)


# -- driver ----------------------------------------------------------------


def _resolve_executor(evaluator, space: ParamSpace, slots: int):
    if hasattr(evaluator, "evaluate_batch"):
        return evaluator
    from .fitness.evaluator import EvaluatorSpec, LocalExecutor

    if isinstance(evaluator, EvaluatorSpec):
        evaluator = evaluator.with_space(space)
    return LocalExecutor(evaluator, slots=slots)


def make_tasks(pop: Population, space: ParamSpace, cfg: GAConfig, evaluator_dict=None) -> list[EvalTask]:
    tasks = []
    for idx, ind in enumerate(pop):
        if ind.evaluated:
            continue
        eval_id = pop.generation * cfg.population_size + idx
        tasks.append(
            EvalTask(
                eval_id=eval_id,
                generation=pop.generation,
                chromosome_index=idx,
                names=tuple(space.names),
                values=tuple(float(x) for x in ind.chromosome),
                seed=rngmod.derive_seed(cfg.seed, "task", eval_id),
                evaluator=evaluator_dict,
            )
        )
    return tasks


def run_ga(
    space: ParamSpace,
    cfg: GAConfig,
    evaluator,
    *,
    run_log=None,
    slots: int = 1,
    on_generation: Callable[[int, GenerationStats], None] | None = None,
) -> SearchResult:
    """Evolve a population for ``cfg.generations`` generations.

    ``evaluator`` is any of: a callable mapping a parameter vector to a
    fitness in ``[0, 1]``; an :class:`~gae2e.fitness.EvaluatorSpec`; or an
    executor exposing ``evaluate_batch(tasks) -> results`` (such as a running
    master). Every evaluation of a generation completes before selection; a
    failed evaluation scores 0.0 and the run continues.
    """
    executor = _resolve_executor(evaluator, space, slots)
    evaluator_dict = getattr(executor, "evaluator_dict", None)
    pop = initialize_population(space, cfg.population_size, rngmod.substream(cfg.seed, "init"))
    best: Individual | None = None
    history: list[GenerationStats] = []
    total = 0

    for gen in range(cfg.generations):
        if gen > 0:
            pop = evolve_generation(pop, cfg, space)
        tasks = make_tasks(pop, space, cfg, evaluator_dict)
        results = executor.evaluate_batch(tasks)
        if [r.eval_id for r in results] != [t.eval_id for t in tasks]:
            raise RuntimeError("executor returned results out of task order")
        for task, res in zip(tasks, results):
            ind = pop[task.chromosome_index]
            fitness = res.fitness if res.status == OK else 0.0
            ind.fitness, ind.eval_id, ind.status = fitness, task.eval_id, res.status
        total += len(tasks)
        if run_log is not None:
            run_log.log_generation(pop, space, {r.eval_id: r for r in results})

        fit = pop.fitnesses()
        stats = GenerationStats(float(fit.max()), float(fit.mean()))
        history.append(stats)
        leader = pop[int(np.argmax(fit))]
        if best is None or leader.fitness > best.fitness:
            best = replace(leader)
        log.info("generation %d: best %.6f mean %.6f", gen, stats.best_fitness, stats.mean_fitness)
        if on_generation is not None:
            on_generation(gen, stats)
        if cfg.target_fitness is not None and best.fitness >= cfg.target_fitness:
            break

    return SearchResult(best=best, history=history, total_evaluations=total)
