"""Exit criteria, one test each, at the stated tolerances and time budgets.

Run ``pytest tests/test_acceptance.py -v`` for a PASS/FAIL line per criterion
in the terminal summary.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import stub_command
from test_metrics import pair_count_auc
from test_surrogate import gradient_relative_error

from gae2e import GAConfig, default_e2e_space, run_ga
from gae2e.codec import decode, encode
from gae2e.dist import start_master, start_worker
from gae2e.fitness import EvaluatorSpec, FitnessEvaluator, evaluate
from gae2e.ga import Individual, mutate_values, sbx_beta, sbx_children, tournament
from gae2e.metrics import roc_auc
from gae2e.rng import substream
from gae2e.runlog import RunLog, read_eval_log, read_summary_csv, replay_summaries
from gae2e.tasks import FAILED, OK, EvalTask


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


@pytest.mark.acceptance("1", "operator invariants over 1e5 randomized applications")
def test_c1_operator_invariants():
    rng = np.random.default_rng(1)
    n = 100_000
    with Budget(10):
        # SBX: children mean equals parents mean before clamping
        p1 = rng.uniform(0, 0.999, n)
        p2 = rng.uniform(0, 0.999, n)
        u = rng.random(n)
        c1, c2 = sbx_children(p1, p2, u, 20.0)
        assert np.max(np.abs(0.5 * (c1 + c2) - 0.5 * (p1 + p2))) <= 1e-12
        assert np.all(sbx_beta(u, 20.0) > 0)

        # polynomial mutation stays in bounds, including random boxes
        lo = rng.uniform(-5, 5, n)
        hi = lo + rng.uniform(1e-6, 10, n)
        p = lo + rng.random(n) * (hi - lo)
        out = mutate_values(p, rng.random(n), lo, hi, 20.0)
        assert np.all((out >= lo) & (out <= hi))

        # u = 0.5 leaves every value untouched, bit for bit
        same = mutate_values(p, np.full(n, 0.5), lo, hi, 20.0)
        assert np.array_equal(same, p)

        # tournament returns the fitter of the pair (first drawn on ties)
        fa = rng.integers(0, 50, n) / 49
        fb = rng.integers(0, 50, n) / 49
        for a_fit, b_fit in zip(fa, fb):
            a = Individual(np.zeros(1), float(a_fit))
            b = Individual(np.zeros(1), float(b_fit))
            assert tournament(a, b) is (a if a_fit >= b_fit else b)


@pytest.mark.acceptance("2", "sort-based AUC equals pair-count oracle on 1000 instances")
def test_c2_auc_oracle():
    rng = np.random.default_rng(2)
    with Budget(5):
        for _ in range(1000):
            n = int(rng.integers(2, 13))
            labels = np.zeros(n, bool)
            labels[: int(rng.integers(1, n))] = True
            rng.shuffle(labels)
            # coarse scores so ties are common
            scores = rng.integers(0, 6, n) / 5 if rng.random() < 0.5 else rng.normal(size=n)
            auc = roc_auc(scores, labels)
            assert abs(auc - pair_count_auc(scores, labels)) <= 1e-12
            assert abs(roc_auc(scores, ~labels) - (1 - auc)) <= 1e-12


@pytest.mark.acceptance("3", "codec round trip on 1e4 random vectors")
def test_c3_codec_round_trip():
    space = default_e2e_space()
    rng = np.random.default_rng(3)
    tol = (space.upper - space.lower) / (2 * (2**16 - 1))
    with Budget(2):
        for _ in range(10_000):
            v = rng.uniform(space.lower, space.upper)
            c = encode(v, space)
            back = decode(c)
            assert np.all(np.abs(back - v) <= tol * (1 + 1e-12))
            assert encode(back, space).bits == c.bits


@pytest.mark.acceptance("4", "sphere on [0, 0.999]^6, pop 70 x 70 generations reaches 0.999")
def test_c4_sphere_convergence():
    space = default_e2e_space()
    with Budget(30):
        res = run_ga(space, GAConfig(population_size=70, generations=70, seed=1), EvaluatorSpec(landscape="sphere"))
    best = [h.best_fitness for h in res.history]
    assert len(best) == 70
    assert res.best.fitness >= 0.999 * 1.0
    assert all(b >= a for a, b in zip(best, best[1:]))


@pytest.mark.acceptance("5", "master + 2 loopback workers reproduce the local run, also with a killed worker")
def test_c5_distribution_transparency():
    space = default_e2e_space()
    spec = EvaluatorSpec(landscape="rastrigin")
    cfg = GAConfig(population_size=30, generations=15, seed=5)
    fast = dict(heartbeat_interval=0.2, missed_heartbeats=3)
    with Budget(120):
        local = run_ga(space, cfg, spec)

        h = start_master(("127.0.0.1", 0), cfg, space, spec, **fast)
        ws = [start_worker(h.address, heartbeat_interval=0.2) for _ in range(2)]
        dist = h.result(timeout=100)
        for w in ws:
            w.join(5)
        assert local.same_as(dist)
        assert np.array_equal(local.best.chromosome, dist.best.chromosome)
        assert local.history == dist.history

        h = start_master(("127.0.0.1", 0), cfg, space, spec, **fast)
        doomed = start_worker(h.address, heartbeat_interval=0.2, fail_after=40)
        steady = start_worker(h.address, heartbeat_interval=0.2)
        crashed = h.result(timeout=100)
        steady.join(5)
        assert doomed.join(1)
        assert h.master.requeued >= 1
        assert local.same_as(crashed)


@pytest.mark.acceptance("6", "surrogate loss gradients match central differences at 100 points")
def test_c6_gradient_check():
    rng = np.random.default_rng(6)
    with Budget(10):
        errors = [gradient_relative_error(rng, 1 + (i % 2)) for i in range(100)]
    assert max(errors) <= 1e-4


@pytest.mark.acceptance("7", "GA result on the surrogate beats the 99th percentile of 1000 random vectors")
def test_c7_surrogate_efficacy():
    space = default_e2e_space()
    spec = EvaluatorSpec(kind="surrogate").with_space(space)
    with Budget(300):
        rng = substream(0, "random-baseline")
        random_fits = [evaluate(spec, rng.uniform(space.lower, space.upper)) for _ in range(1000)]
        p99 = float(np.percentile(random_fits, 99))
        res = run_ga(space, GAConfig(seed=0), spec)
    print(f"random p99 {p99:.6f}, GA best {res.best.fitness:.6f}")
    assert res.best.fitness >= p99


@pytest.mark.acceptance("8", "70 x 70 run log holds 4900 records and replays its summaries exactly")
def test_c8_log_integrity(tmp_path):
    space = default_e2e_space()
    with RunLog(tmp_path / "evals.jsonl", tmp_path / "summary.csv", space) as log:
        run_ga(space, GAConfig(population_size=70, generations=70, seed=8), EvaluatorSpec(landscape="sphere"), run_log=log)
    header, records = read_eval_log(tmp_path / "evals.jsonl")
    assert header["type"] == "header"
    assert len(records) == 4900
    assert sum(r.carried for r in records) == 69
    written = read_summary_csv(tmp_path / "summary.csv")
    assert len(written) == 70
    assert replay_summaries(records) == written


@pytest.mark.acceptance("9", "external evaluator: echo, timeout-then-answer, permanent failure")
def test_c9_external_protocol(tmp_path):
    space = default_e2e_space()
    task = EvalTask(0, 0, 0, tuple(space.names), tuple(space.lower + 0.5 * (space.upper - space.lower)), seed=1)
    base = EvaluatorSpec(kind="external", command=stub_command("echo_fitness.py", "0.5"), retries=0)

    # echo stub through a full (small) search
    res = run_ga(space, GAConfig(population_size=4, generations=2), base)
    assert res.best.fitness == 0.5

    flaky = replace(base, command=stub_command("flaky_timeout.py", str(tmp_path), "2", "0.625"), timeout_seconds=1.0, retries=2)
    out = FitnessEvaluator(flaky).evaluate_task(task)
    assert (out.status, out.fitness, out.attempts) == (OK, 0.625, 3)

    failing = replace(base, command=stub_command("always_fail.py"), retries=2)
    with RunLog(tmp_path / "fail.jsonl", None, space) as log:
        run_ga(space, GAConfig(population_size=2, generations=1), failing, run_log=log)
    _, records = read_eval_log(tmp_path / "fail.jsonl")
    assert [(r.fitness, r.status, r.attempts) for r in records] == [(0.0, FAILED, 3)] * 2
