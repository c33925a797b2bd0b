"""Distributed real-coded genetic algorithm for AUC-driven hyperparameter search."""

from .codec import BinaryChromosome, decode, encode
from .fitness import EvaluatorSpec, SurrogateConfig, evaluate
from .ga import GAConfig, Individual, Population, SearchResult, run_ga
from .metrics import average_epoch_auc, roc_auc
from .space import ParamSpace, ParamSpec, clamp, default_e2e_space, define_space

__version__ = "0.1.0"

__all__ = [
    "BinaryChromosome",
    "decode",
    "encode",
    "EvaluatorSpec",
    "SurrogateConfig",
    "evaluate",
    "GAConfig",
    "Individual",
    "Population",
    "SearchResult",
    "run_ga",
    "average_epoch_auc",
    "roc_auc",
    "ParamSpace",
    "ParamSpec",
    "clamp",
    "default_e2e_space",
    "define_space",
]
