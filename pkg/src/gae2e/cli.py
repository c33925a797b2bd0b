"""Command line entry point: ``gae2e {search,master,worker,baseline,report}``.

Settings are merged in order of precedence: built-in defaults < ``--config``
JSON file < ``GA_E2E_*`` environment variables < command line flags. Exit
status is 0 on success, 1 for configuration errors and 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, GAE2EError, MasterUnreachable
from .fitness import EvaluatorSpec, HyperParams, SurrogateConfig, train_surrogate
from .fitness.landscapes import LANDSCAPES
from .fitness.surrogate import FITNESS_SOURCES
from .ga import GAConfig, run_ga
from .metrics import average_epoch_auc
from .runlog import RunLog, report
from .space import ParamSpace, default_e2e_space, define_space, load_space

log = logging.getLogger("gae2e")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
ENV_PREFIX = "GA_E2E_"
EVALUATOR_CHOICES = ("sphere", "rastrigin", "plateau", "surrogate", "external")

# setting name -> parser for values coming from env vars or config files
SETTINGS = {
    "seed": int,
    "pop": int,
    "gens": int,
    "eta_c": float,
    "eta_m": float,
    "pc": float,
    "pm": float,
    "elitism": int,
    "target_fitness": float,
    "evaluator": str,
    "command": str,
    "fitness_source": str,
    "timeout": float,
    "retries": int,
    "max_concurrency": int,
    "data_seed": int,
    "slots": int,
    "eval_log": str,
    "summary_csv": str,
    "space": lambda x: x,
    "bind": str,
    "master": str,
    "heartbeat": float,
    "connect_timeout": float,
    "vector": str,
    "from_log": str,
    "allow_out_of_bounds": lambda x: str(x).lower() in ("1", "true", "yes", "on"),
    "overwrite": lambda x: str(x).lower() in ("1", "true", "yes", "on"),
}

DEFAULTS = {
    "seed": 0,
    "pop": 70,
    "gens": 70,
    "eta_c": 20.0,
    "eta_m": 20.0,
    "pc": 0.9,
    "pm": None,
    "elitism": 1,
    "target_fitness": None,
    "evaluator": None,
    "command": None,
    "fitness_source": "mean_val_auc",
    "timeout": 600.0,
    "retries": 2,
    "max_concurrency": 2,
    "data_seed": 0,
    "slots": 1,
    "eval_log": "evals.jsonl",
    "summary_csv": "summary.csv",
    "space": None,
    "bind": None,
    "master": None,
    "heartbeat": 2.0,
    "connect_timeout": 60.0,
    "vector": None,
    "from_log": None,
    "allow_out_of_bounds": False,
    "overwrite": False,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    g = p.add_argument_group("genetic algorithm")
    g.add_argument("--seed", type=int, default=S, help="run seed (unsigned 64-bit)")
    g.add_argument("--pop", type=int, default=S, help="population size (70)")
    g.add_argument("--gens", type=int, default=S, help="number of generations (70)")
    g.add_argument("--eta-c", type=float, default=S, help="SBX distribution index (20)")
    g.add_argument("--eta-m", type=float, default=S, help="polynomial mutation index (20)")
    g.add_argument("--pc", type=float, default=S, help="crossover probability (0.9)")
    g.add_argument("--pm", type=float, default=S, help="per-coordinate mutation probability (1/dimension)")
    g.add_argument("--elitism", type=int, default=S, help="elites carried per generation (1)")
    g.add_argument("--target-fitness", type=float, default=S, help="stop once best fitness reaches this")
    g.add_argument("--space", default=S, help="JSON file with a list of {name, lower, upper, default}")
    e = p.add_argument_group("fitness")
    e.add_argument("--evaluator", choices=EVALUATOR_CHOICES, default=S)
    e.add_argument("--landscape", dest="evaluator", choices=sorted(LANDSCAPES), default=S,
                   help="shorthand for a synthetic --evaluator")
    e.add_argument("--command", default=S, help="external evaluator command line")
    e.add_argument("--fitness-source", choices=FITNESS_SOURCES, default=S)
    e.add_argument("--timeout", type=float, default=S, help="seconds per external evaluation attempt")
    e.add_argument("--retries", type=int, default=S, help="retries before the 0.0 penalty")
    e.add_argument("--max-concurrency", type=int, default=S, help="cap on concurrent external processes")
    e.add_argument("--data-seed", type=int, default=S, help="surrogate dataset seed")
    o = p.add_argument_group("output")
    o.add_argument("--eval-log", default=S, help="evaluation log path (JSON lines)")
    o.add_argument("--summary-csv", default=S, help="per-generation summary CSV path")
    o.add_argument("--overwrite", action="store_true", default=S, help="replace existing log files")
    o.add_argument("--show-config", action="store_true", help="print the effective configuration and exit")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = _Parser(prog="gae2e", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON settings file")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("search", help="run a search with in-process evaluation")
    _add_search_flags(p)
    p.add_argument("--slots", type=int, default=S, help="concurrent local evaluations (1)")

    p = sub.add_parser("master", help="run a search, dispatching evaluations to workers")
    _add_search_flags(p)
    p.add_argument("--bind", default=S, help="listen address host:port")
    p.add_argument("--heartbeat", type=float, default=S, help="heartbeat interval in seconds (2)")

    p = sub.add_parser("worker", help="evaluate tasks for a master")
    p.add_argument("--master", default=S, help="master address host:port")
    p.add_argument("--slots", type=int, default=S, help="concurrent evaluations (1)")
    p.add_argument("--heartbeat", type=float, default=S)
    p.add_argument("--connect-timeout", type=float, default=S, help="give up after this many seconds unreachable")
    p.add_argument("--show-config", action="store_true")

    p = sub.add_parser("baseline", help="long-budget surrogate training of one parameter vector")
    p.add_argument("--vector", default=S, help="comma-separated values in space order (default: space defaults)")
    p.add_argument("--from-log", default=S, help="use the best vector of a finished run")
    p.add_argument("--allow-out-of-bounds", action="store_true", default=S)
    p.add_argument("--data-seed", type=int, default=S)
    p.add_argument("--space", default=S)
    p.add_argument("--show-config", action="store_true")

    p = sub.add_parser("report", help="summarize a run log")
    p.add_argument("log_path")
    return parser


def effective_settings(args: argparse.Namespace, environ=os.environ) -> dict:
    settings = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
        for key, value in data.items():
            key = key.replace("-", "_")
            if key not in SETTINGS:
                raise ConfigError(f"{args.config}: unknown setting {key!r}")
            settings[key] = value
    for key, conv in SETTINGS.items():
        raw = environ.get(ENV_PREFIX + key.upper())
        if raw is not None:
            try:
                settings[key] = conv(raw)
            except ValueError:
                raise ConfigError(f"{ENV_PREFIX}{key.upper()}={raw!r} is not valid") from None
    for key in SETTINGS:
        if key in vars(args):
            settings[key] = getattr(args, key)
    return settings


def _space(settings) -> ParamSpace:
    s = settings["space"]
    if s is None:
        return default_e2e_space()
    if isinstance(s, list):
        return define_space(s)
    return load_space(s)


def ga_config(settings) -> GAConfig:
    return GAConfig(
        population_size=settings["pop"],
        generations=settings["gens"],
        crossover_prob=settings["pc"],
        mutation_prob=settings["pm"],
        eta_c=settings["eta_c"],
        eta_m=settings["eta_m"],
        seed=settings["seed"],
        elitism=settings["elitism"],
        target_fitness=settings["target_fitness"],
    )


def evaluator_spec(settings) -> EvaluatorSpec:
    name = settings["evaluator"]
    if name is None:
        raise ConfigError("an evaluator is required (--evaluator or --landscape)")
    common = dict(
        timeout_seconds=settings["timeout"],
        retries=settings["retries"],
        fitness_source=settings["fitness_source"],
        max_concurrency=settings["max_concurrency"],
        surrogate=SurrogateConfig(data_seed=settings["data_seed"]),
    )
    if name in LANDSCAPES:
        return EvaluatorSpec(kind="synthetic", landscape=name, **common)
    if name == "surrogate":
        return EvaluatorSpec(kind="surrogate", **common)
    if name == "external":
        return EvaluatorSpec(kind="external", command=settings["command"], **common)
    raise ConfigError(f"unknown evaluator {name!r}")


def _open_log(settings, space, meta) -> RunLog:
    paths = [Path(settings["eval_log"]), Path(settings["summary_csv"])]
    for path in paths:
        if path.exists() and path.stat().st_size > 0:
            if not settings["overwrite"]:
                raise ConfigError(f"{path} already exists; pass --overwrite or choose another path")
            path.unlink()
    return RunLog(paths[0], paths[1], space, meta=meta)


def _print_best(result, space) -> None:
    print(f"best fitness: {result.best.fitness:.6f}")
    for name, value in space.to_dict(result.best.chromosome).items():
        print(f"  {name} = {value:.6g}")
    print(f"generations: {len(result.history)}  evaluations: {result.total_evaluations}")


def _public(settings) -> dict:
    return {k: v for k, v in settings.items()}


def cmd_search(settings, distributed: bool = False) -> int:
    space = _space(settings)
    cfg = ga_config(settings)
    spec = evaluator_spec(settings).with_space(space)
    if distributed and not settings["bind"]:
        raise ConfigError("master needs --bind host:port")
    if not distributed and settings["slots"] < 1:
        raise ConfigError("--slots must be at least 1")
    meta = {"ga": cfg.to_dict(), "evaluator": spec.to_dict()}
    print("effective config: " + json.dumps(_public(settings), sort_keys=True), file=sys.stderr)
    with _open_log(settings, space, meta) as run_log:
        if not distributed:
            result = run_ga(space, cfg, spec, run_log=run_log, slots=settings["slots"])
        else:
            from .dist import start_master

            handle = start_master(settings["bind"], cfg, space, spec, run_log=run_log,
                                  heartbeat_interval=settings["heartbeat"])
            print(f"master listening on {handle.address[0]}:{handle.address[1]}", file=sys.stderr, flush=True)
            try:
                result = handle.result()
            except KeyboardInterrupt:
                handle.stop()
                print("interrupted; workers told to shut down", file=sys.stderr)
                return EXIT_RUNTIME
    _print_best(result, space)
    print(f"eval log: {settings['eval_log']}  summary: {settings['summary_csv']}")
    return EXIT_OK


def cmd_worker(settings) -> int:
    from .dist import Worker

    if not settings["master"]:
        raise ConfigError("worker needs --master host:port")
    if settings["slots"] < 1:
        raise ConfigError("--slots must be at least 1")
    worker = Worker(settings["master"], settings["slots"], heartbeat_interval=settings["heartbeat"],
                    connect_timeout=settings["connect_timeout"])
    try:
        worker.run()
    except KeyboardInterrupt:
        worker.stop()
        return EXIT_RUNTIME
    print(f"worker {worker.worker_id} finished after {worker.completed} evaluations", file=sys.stderr)
    return EXIT_OK


def _parse_vector(text: str, space: ParamSpace) -> np.ndarray:
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"--vector must be comma-separated numbers, got {text!r}") from None
    if len(values) != space.dimension:
        raise ConfigError(f"--vector has {len(values)} values, space has {space.dimension}")
    return np.array(values)


def cmd_baseline(settings) -> int:
    space = _space(settings)
    if settings["from_log"]:
        rep = report(settings["from_log"])
        space = rep.space
        v = space.from_dict(rep.best.params)
        source = f"best of {settings['from_log']}"
    elif settings["vector"]:
        v = _parse_vector(settings["vector"], space)
        source = "--vector"
    else:
        v = space.defaults
        source = "space defaults"
    if not space.contains(v) and not settings["allow_out_of_bounds"]:
        raise ConfigError(
            f"vector {np.asarray(v).tolist()} lies outside the search bounds; "
            "pass --allow-out-of-bounds to evaluate it anyway"
        )
    cfg = SurrogateConfig.testing(data_seed=settings["data_seed"])
    history = train_surrogate(HyperParams.from_mapping(space.to_dict(v)), cfg)
    print(f"vector ({source}):")
    for name, value in space.to_dict(v).items():
        print(f"  {name} = {value:.6g}")
    print(f"epochs run: {history.epochs} (stage 1: {history.stage_epochs[0]}, stage 2: {history.stage_epochs[1]})")
    print(f"mean validation AUC: {average_epoch_auc(history):.6f}")
    print(f"test AUC: {history.final_test_auc:.6f}")
    return EXIT_OK


def cmd_report(log_path: str) -> int:
    print(report(log_path).format())
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.cmd == "report":
            return cmd_report(args.log_path)
        settings = effective_settings(args)
        if getattr(args, "show_config", False):
            print(json.dumps(_public(settings), indent=2, sort_keys=True))
            return EXIT_OK
        if args.cmd == "search":
            return cmd_search(settings)
        if args.cmd == "master":
            return cmd_search(settings, distributed=True)
        if args.cmd == "worker":
            return cmd_worker(settings)
        if args.cmd == "baseline":
            return cmd_baseline(settings)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"gae2e: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MasterUnreachable as exc:
        print(f"gae2e: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (GAE2EError, OSError) as exc:
        print(f"gae2e: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
