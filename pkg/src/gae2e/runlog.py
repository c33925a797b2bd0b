"""Append-only evaluation log (JSON lines) and per-generation summary CSV.

The evaluation log starts with a header object describing the run and the
space, followed by one object per individual per generation. Elites carried
into a generation without re-evaluation are logged with ``"carried": true``.
Summaries are a pure function of the records and can be rebuilt with
:func:`replay_summaries`.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import codec
from .errors import MalformedLog
from .space import ParamSpace, define_space
from .tasks import CARRIED, FAILED, EvalResult

LOG_VERSION = 1


@dataclass
class EvalRecord:
    eval_id: int
    generation: int
    chromosome_index: int
    params: dict[str, float]
    chromosome: str
    fitness: float
    status: str
    wall_seconds: float = 0.0
    worker_id: str = "local"
    carried: bool = False
    attempts: int = 1
    errors: list[str] = field(default_factory=list)
    timestamp: float = field(default_factory=time.time)

    @classmethod
    def from_dict(cls, d: Mapping) -> "EvalRecord":
        keys = cls.__dataclass_fields__
        return cls(**{k: v for k, v in d.items() if k in keys})


@dataclass
class GenerationSummary:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_parameters: dict[str, float]
    evaluations_so_far: int

    def row(self, names: Sequence[str]) -> list:
        return [
            self.generation,
            repr(self.best_fitness),
            repr(self.mean_fitness),
            *(repr(self.best_parameters[n]) for n in names),
            self.evaluations_so_far,
        ]


def summary_header(names: Sequence[str]) -> list[str]:
    return ["generation", "best_fitness", "mean_fitness", *(f"best_{n}" for n in names), "evals"]


def summarize(records: Sequence[EvalRecord], evaluations_so_far: int) -> GenerationSummary:
    """Summary of one generation's records (ties for best go to the lowest index)."""
    recs = sorted(records, key=lambda r: r.chromosome_index)
    fit = np.array([r.fitness for r in recs], dtype=np.float64)
    best = recs[int(np.argmax(fit))]
    return GenerationSummary(
        generation=recs[0].generation,
        best_fitness=float(fit.max()),
        mean_fitness=float(fit.mean()),
        best_parameters=dict(best.params),
        evaluations_so_far=evaluations_so_far,
    )


class RunLog:
    """Writer for one run's evaluation log and summary CSV.

    Every record is flushed (and fsynced when ``durable``) before the call
    returns. Files are opened in append mode; the header is written only when
    the file is new or empty.
    """

    def __init__(
        self,
        eval_log: str | Path,
        summary_csv: str | Path | None,
        space: ParamSpace,
        *,
        meta: Mapping | None = None,
        bits_per_param: int = codec.DEFAULT_BITS,
        durable: bool = False,
    ):
        self.eval_log_path = Path(eval_log)
        self.summary_path = Path(summary_csv) if summary_csv is not None else None
        self.space = space
        self.meta = dict(meta or {})
        self.bits = bits_per_param
        self.durable = durable
        self.evaluations = 0
        self.records_written = 0
        self._eval_fh = None
        self._summary_fh = None
        self._summary_writer = None

    # -- low-level appends -------------------------------------------------

    def _open_eval(self):
        if self._eval_fh is None:
            self.eval_log_path.parent.mkdir(parents=True, exist_ok=True)
            fresh = not self.eval_log_path.exists() or self.eval_log_path.stat().st_size == 0
            self._eval_fh = open(self.eval_log_path, "a", encoding="utf-8")
            if fresh:
                header = {
                    "type": "header",
                    "version": LOG_VERSION,
                    "space": self.space.to_json(),
                    "bits_per_param": self.bits,
                    **self.meta,
                }
                self._write_line(header)
        return self._eval_fh

    def _write_line(self, obj) -> None:
        fh = self._eval_fh
        fh.write(json.dumps(obj) + "\n")
        fh.flush()
        if self.durable:
            os.fsync(fh.fileno())

    def append_eval(self, record: EvalRecord) -> None:
        self._open_eval()
        self._write_line({"type": "eval", **asdict(record)})
        self.records_written += 1
        if not record.carried:
            self.evaluations += 1

    def write_summary(self, s: GenerationSummary) -> None:
        if self.summary_path is None:
            return
        if self._summary_fh is None:
            self.summary_path.parent.mkdir(parents=True, exist_ok=True)
            fresh = not self.summary_path.exists() or self.summary_path.stat().st_size == 0
            self._summary_fh = open(self.summary_path, "a", newline="", encoding="utf-8")
            self._summary_writer = csv.writer(self._summary_fh)
            if fresh:
                self._summary_writer.writerow(summary_header(self.space.names))
        self._summary_writer.writerow(s.row(self.space.names))
        self._summary_fh.flush()
        if self.durable:
            os.fsync(self._summary_fh.fileno())

    # -- GA hook -----------------------------------------------------------

    def log_generation(self, pop, space: ParamSpace, results: Mapping[int, EvalResult]) -> GenerationSummary:
        records = []
        for idx, ind in enumerate(pop):
            res = results.get(ind.eval_id) if ind.status != CARRIED else None
            values = np.asarray(ind.chromosome)
            rec = EvalRecord(
                eval_id=int(ind.eval_id),
                generation=pop.generation,
                chromosome_index=idx,
                params=space.to_dict(values),
                chromosome=codec.to_hex(values, space, self.bits),
                fitness=float(ind.fitness),
                status=CARRIED if res is None else res.status,
                wall_seconds=0.0 if res is None else res.wall_seconds,
                worker_id="" if res is None else res.worker_id,
                carried=res is None,
                attempts=0 if res is None else res.attempts,
                errors=[] if res is None else list(res.errors),
            )
            self.append_eval(rec)
            records.append(rec)
        summary = summarize(records, self.evaluations)
        self.write_summary(summary)
        return summary

    def close(self) -> None:
        for fh in (self._eval_fh, self._summary_fh):
            if fh is not None:
                fh.close()
        self._eval_fh = self._summary_fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


# -- reading ----------------------------------------------------------------


def read_eval_log(path: str | Path) -> tuple[dict, list[EvalRecord]]:
    """Parse a log, tolerating a truncated final line."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedLog(f"cannot read {path}: {exc}") from None
    lines = text.split("\n")
    header = None
    records = []
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            if i == len(lines) - 1:  # partial last write
                break
            raise MalformedLog(f"{path}:{i + 1}: invalid JSON") from None
        kind = obj.get("type") if isinstance(obj, dict) else None
        if kind == "header" and header is None:
            header = obj
        elif kind == "eval":
            try:
                records.append(EvalRecord.from_dict(obj))
            except TypeError as exc:
                raise MalformedLog(f"{path}:{i + 1}: bad record: {exc}") from None
        else:
            raise MalformedLog(f"{path}:{i + 1}: unexpected entry")
    if header is None:
        raise MalformedLog(f"{path}: no header line")
    return header, records


def replay_summaries(records: Iterable[EvalRecord]) -> list[GenerationSummary]:
    by_gen: dict[int, list[EvalRecord]] = {}
    for r in records:
        by_gen.setdefault(r.generation, []).append(r)
    out = []
    evals = 0
    for g in sorted(by_gen):
        evals += sum(1 for r in by_gen[g] if not r.carried)
        out.append(summarize(by_gen[g], evals))
    return out


def read_summary_csv(path: str | Path) -> list[GenerationSummary]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            head = next(reader)
        except StopIteration:
            raise MalformedLog(f"{path}: empty summary file") from None
        names = [h[len("best_"):] for h in head[3:-1]]
        out = []
        for row in reader:
            if len(row) != len(head):
                break  # truncated final row
            out.append(
                GenerationSummary(
                    generation=int(row[0]),
                    best_fitness=float(row[1]),
                    mean_fitness=float(row[2]),
                    best_parameters={n: float(x) for n, x in zip(names, row[3:-1])},
                    evaluations_so_far=int(row[-1]),
                )
            )
    return out


@dataclass
class Report:
    space: ParamSpace
    best: EvalRecord
    summaries: list[GenerationSummary]
    records: int
    evaluations: int
    failed: int
    first_generation_at_best: int

    def format(self) -> str:
        lines = [
            f"records: {self.records}  evaluations: {self.evaluations}  failed: {self.failed}",
            f"generations: {len(self.summaries)}",
            f"best fitness: {self.best.fitness:.6f} (eval {self.best.eval_id}, generation {self.best.generation})",
            f"first generation reaching final best: {self.first_generation_at_best}",
            "",
            f"{'parameter':<24}{'range':>16}{'default':>12}{'best':>12}",
        ]
        for spec in self.space:
            rng = f"{spec.lower:g} - {spec.upper:g}"
            lines.append(
                f"{spec.name:<24}{rng:>16}{spec.default:>12.6g}{self.best.params[spec.name]:>12.6g}"
            )
        lines += ["", "generation,best_fitness,mean_fitness"]
        lines += [f"{s.generation},{s.best_fitness:.6f},{s.mean_fitness:.6f}" for s in self.summaries]
        return "\n".join(lines)


def report(eval_log: str | Path) -> Report:
    """Best configuration vs. space defaults, plus convergence statistics."""
    header, records = read_eval_log(eval_log)
    if not records:
        raise MalformedLog(f"{eval_log}: no evaluation records")
    space = define_space(header["space"])
    best = max(records, key=lambda r: (r.fitness, -r.eval_id))
    summaries = replay_summaries(records)
    final_best = max(s.best_fitness for s in summaries)
    first = next(s.generation for s in summaries if s.best_fitness >= final_best)
    return Report(
        space=space,
        best=best,
        summaries=summaries,
        records=len(records),
        evaluations=sum(1 for r in records if not r.carried),
        failed=sum(1 for r in records if r.status == FAILED),
        first_generation_at_best=first,
    )
