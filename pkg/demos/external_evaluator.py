"""
Plugging in your own training script
====================================

Any program can be the fitness function. It reads one JSON object from
stdin (the parameters by name, plus ``eval_id`` and ``seed``) and prints one
line back: ``{"fitness": 0.73}`` or ``{"error": "why"}``, then exits 0.
Failures are retried; if every attempt fails the individual scores 0.0.

This demo writes a tiny evaluator to a temporary file and searches with it.
"""

import sys
import tempfile
import textwrap
from pathlib import Path

from gae2e import GAConfig, default_e2e_space, run_ga
from gae2e.fitness import EvaluatorSpec

script = Path(tempfile.mkdtemp()) / "train.py"
script.write_text(textwrap.dedent("""
    import json, sys
    req = json.loads(sys.stdin.readline())
    # pretend training: reward a learning rate near 0.3, and crash sometimes
    if req["eval_id"] % 17 == 5:
        print(json.dumps({"error": "simulated out-of-memory"}))
    else:
        lr = req["init-learningrate"]
        print(json.dumps({"fitness": max(0.0, 1 - abs(lr - 0.3))}))
"""))

spec = EvaluatorSpec(kind="external", command=f"{sys.executable} {script}", timeout_seconds=30, retries=1)
space = default_e2e_space()
result = run_ga(space, GAConfig(population_size=10, generations=6, seed=2), spec, slots=2)

print("best fitness:", round(result.best.fitness, 4))
print("best learning rate:", round(space.to_dict(result.best.chromosome)["init-learningrate"], 4))
