"""
Defaults versus tuned values
============================

The testing phase retrains with a longer budget (100 epochs with early
stopping) and reports the test AUC. Here we compare the pipeline's original
hyperparameters with the values a GA search reported for the real model,
and with the best of a quick search on the surrogate.

The original defaults put both class weights at 1.0, above the 0.999 search
bound, so they are evaluated as given rather than clamped.
"""

import numpy as np

from gae2e import GAConfig, default_e2e_space, run_ga
from gae2e.fitness import EvaluatorSpec, HyperParams, SurrogateConfig, train_surrogate
from gae2e.metrics import average_epoch_auc
from gae2e.space import GA_E2E_REPORTED

space = default_e2e_space()
testing = SurrogateConfig.testing()


def long_run(values):
    h = train_surrogate(HyperParams.from_mapping(values), testing)
    return average_epoch_auc(h), h.final_test_auc, h.epochs


candidates = {
    "pipeline defaults": space.to_dict(space.defaults),
    "reported GA values": dict(GA_E2E_REPORTED),
}

# a short search on the surrogate supplies a third candidate
res = run_ga(space, GAConfig(population_size=30, generations=15, seed=0), EvaluatorSpec(kind="surrogate"))
candidates["surrogate search"] = space.to_dict(res.best.chromosome)

print(f"{'':20s} {'mean val AUC':>12s} {'test AUC':>9s} {'epochs':>6s}")
for label, values in candidates.items():
    val, test, epochs = long_run(values)
    print(f"{label:20s} {val:12.4f} {test:9.4f} {epochs:6d}")

print()
print("values:")
for name in space.names:
    row = "  ".join(f"{candidates[k][name]:8.4g}" for k in candidates)
    print(f"  {name:22s} {row}")
print("\nout of bounds in the defaults:", not space.contains(np.array(list(candidates['pipeline defaults'].values()))))
