"""Pluggable fitness evaluation."""

from .evaluator import EvaluatorSpec, FitnessEvaluator, LocalExecutor, as_evaluator, evaluate
from .landscapes import LANDSCAPES, landscape_value
from .surrogate import (
    FITNESS_SOURCES,
    HyperParams,
    SurrogateConfig,
    SurrogateModel,
    generate_surrogate_data,
    pretrained_model,
    softmax,
    surrogate_fitness,
    train_surrogate,
    weighted_loss_and_grad,
)

__all__ = [
    "EvaluatorSpec",
    "FitnessEvaluator",
    "LocalExecutor",
    "as_evaluator",
    "evaluate",
    "LANDSCAPES",
    "landscape_value",
    "FITNESS_SOURCES",
    "HyperParams",
    "SurrogateConfig",
    "SurrogateModel",
    "generate_surrogate_data",
    "pretrained_model",
    "softmax",
    "surrogate_fitness",
    "train_surrogate",
    "weighted_loss_and_grad",
]
