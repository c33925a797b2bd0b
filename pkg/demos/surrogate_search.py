"""
Tuning the transfer-learning surrogate
======================================

The surrogate trainer fine-tunes a small pretrained network on a shifted
target domain. Its six knobs are the ones the search tunes: class weights,
two weight decays, the stage-one learning rate and the all-layer multiplier.
Fitness is the validation AUC averaged over epochs.

A full 70 x 70 run takes around half a minute; pass a smaller population on
the command line to try it faster: ``python surrogate_search.py 20 10``.
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from gae2e import GAConfig, default_e2e_space, run_ga
from gae2e.fitness import EvaluatorSpec, evaluate
from gae2e.rng import substream
from gae2e.runlog import RunLog, read_summary_csv

pop, gens = (int(a) for a in sys.argv[1:3]) if len(sys.argv) > 2 else (70, 70)
space = default_e2e_space()
spec = EvaluatorSpec(kind="surrogate").with_space(space)

# what does random search look like?
rng = substream(0, "demo-random")
random_fits = np.array([evaluate(spec, rng.uniform(space.lower, space.upper)) for _ in range(200)])
print(f"200 random vectors: median {np.median(random_fits):.4f}, max {random_fits.max():.4f}")

# the GA, with its log and per-generation summary
out = Path(tempfile.mkdtemp())
with RunLog(out / "evals.jsonl", out / "summary.csv", space) as log:
    result = run_ga(space, GAConfig(population_size=pop, generations=gens, seed=0), spec, run_log=log)

print(f"GA best fitness {result.best.fitness:.4f}")
for name, value in space.to_dict(result.best.chromosome).items():
    print(f"  {name:22s} {value:.4f}")

# the summary CSV is the convergence curve: best and mean per generation
rows = read_summary_csv(out / "summary.csv")
print("generation  best    mean")
for s in rows[:: max(1, len(rows) // 10)]:
    print(f"{s.generation:10d}  {s.best_fitness:.4f}  {s.mean_fitness:.4f}")
print("logs written to", out)
