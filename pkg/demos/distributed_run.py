"""
Master and workers on one machine
=================================

The master runs the GA and hands evaluations to whichever workers ask for
work. Results come back in any order, but the generation only advances once
every individual has a fitness, so the run is identical to a local one.

In production the workers run on other machines::

    gae2e master --bind 0.0.0.0:5555 --evaluator surrogate
    gae2e worker --master head-node:5555 --slots 2
"""

from gae2e import GAConfig, default_e2e_space, run_ga
from gae2e.dist import start_master, start_worker
from gae2e.fitness import EvaluatorSpec

space = default_e2e_space()
spec = EvaluatorSpec(landscape="rastrigin")
cfg = GAConfig(population_size=30, generations=20, seed=3)

local = run_ga(space, cfg, spec)

# port 0 picks a free port
master = start_master(("127.0.0.1", 0), cfg, space, spec, heartbeat_interval=0.5)
workers = [start_worker(master.address, slots=2, heartbeat_interval=0.5) for _ in range(2)]

# one worker crashes after a few tasks; what it held is requeued
crashy = start_worker(master.address, heartbeat_interval=0.5, fail_after=10)

dist = master.result(timeout=120)
for w in workers:
    w.join(5)

print("local best      ", local.best.fitness)
print("distributed best", dist.best.fitness)
print("identical runs: ", local.same_as(dist))
print("tasks requeued: ", master.master.requeued)
for w in workers + [crashy]:
    print(f"  {w.worker.worker_id}: {w.worker.completed} evaluations")
