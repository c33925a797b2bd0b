"""Desk-scale two-stage transfer-learning trainer.

A one-hidden-layer network with a two-class softmax head is first trained on
a *source* domain (standing in for a pretrained model), then fine-tuned on a
small, rotated *target* domain in two stages:

* stage 1 updates only the output layer, step ``init_learningrate``, L2
  coefficient ``weight_decay``;
* stage 2 updates every layer, step ``init_learningrate * all_layer_multiplier``,
  L2 coefficient ``weight_decay2``.

The per-example cross-entropy is weighted by ``pos_cls_weight`` or
``neg_cls_weight``. Validation AUC is recorded after every epoch and each
stage stops early once validation AUC has not improved for ``patience``
epochs.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, fields
from typing import Mapping, NamedTuple

import numpy as np

from .. import rng as rngmod
from ..errors import ConfigError, Diverged, NonFiniteInput
from ..metrics import EpochHistory, average_epoch_auc, roc_auc

PARAM_NAMES = (
    "pos-cls-weight",
    "neg-cls-weight",
    "weight-decay",
    "weight-decay2",
    "init-learningrate",
    "all-layer-multiplier",
)


def softmax(z) -> np.ndarray:
    """Row-wise softmax with max subtraction."""
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise NonFiniteInput("softmax input contains NaN or inf")
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class SurrogateConfig:
    n_train: int = 30
    n_val: int = 12
    n_test: int = 100
    stage1_epochs: int = 3
    stage2_epochs: int = 7
    patience: int = 10
    data_seed: int = 0
    class_imbalance: float = 0.4
    hidden_units: int = 8
    separation: float = 0.6  # distance of each class mean from the origin
    domain_shift_deg: float = 180.0  # rotation of the target domain vs. the source
    pretrain_epochs: int = 200

    def __post_init__(self):
        for name in ("n_train", "n_val", "n_test", "stage1_epochs", "stage2_epochs", "patience", "hidden_units"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if min(self.n_train, self.n_val, self.n_test) < 2:
            raise ConfigError("every split needs at least two points (one per class)")
        if self.patience > self.stage1_epochs + self.stage2_epochs:
            raise ConfigError("patience cannot exceed the total epoch budget")
        if not 0.0 < self.class_imbalance < 1.0:
            raise ConfigError("class_imbalance must lie in (0, 1)")

    @property
    def total_epochs(self) -> int:
        return self.stage1_epochs + self.stage2_epochs

    @classmethod
    def testing(cls, **overrides) -> "SurrogateConfig":
        """Long-budget preset: 100 epochs with early stopping."""
        base = dict(stage1_epochs=20, stage2_epochs=80, patience=10)
        base.update(overrides)
        return cls(**base)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "SurrogateConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown surrogate settings: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class HyperParams:
    pos_cls_weight: float = 1.0
    neg_cls_weight: float = 1.0
    weight_decay: float = 0.0001
    weight_decay2: float = 0.0001
    init_learningrate: float = 0.01
    all_layer_multiplier: float = 0.1

    def __post_init__(self):
        for f in fields(self):
            x = float(getattr(self, f.name))
            if not math.isfinite(x) or x < 0:
                raise ConfigError(f"{f.name} must be finite and non-negative, got {x}")
            object.__setattr__(self, f.name, x)

    @classmethod
    def from_mapping(cls, values: Mapping[str, float]) -> "HyperParams":
        """Build from dashed names (``pos-cls-weight`` ...); missing names keep defaults."""
        kw = {n.replace("-", "_"): float(values[n]) for n in PARAM_NAMES if n in values}
        return cls(**kw)


@dataclass
class SurrogateModel:
    hidden_weights: np.ndarray  # (2, H)
    hidden_bias: np.ndarray  # (H,)
    output_weights: np.ndarray  # (H, 2)
    output_bias: np.ndarray  # (2,)

    def copy(self) -> "SurrogateModel":
        return SurrogateModel(*(a.copy() for a in self.arrays()))

    def arrays(self) -> tuple[np.ndarray, ...]:
        return (self.hidden_weights, self.hidden_bias, self.output_weights, self.output_bias)

    def forward(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Hidden activations and class probabilities."""
        h = np.tanh(X @ self.hidden_weights + self.hidden_bias)
        return h, softmax(h @ self.output_weights + self.output_bias)

    def scores(self, X: np.ndarray) -> np.ndarray:
        """Probability of the positive class."""
        return self.forward(X)[1][:, 1]

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


class Split(NamedTuple):
    X: np.ndarray
    y: np.ndarray  # bool, True = positive


class SurrogateData(NamedTuple):
    train: Split
    val: Split
    test: Split


# -- data ------------------------------------------------------------------


def _rotation(deg: float) -> np.ndarray:
    a = math.radians(deg)
    return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])


def _class_counts(n: int, frac: float) -> int:
    return min(n - 1, max(1, int(round(n * frac))))


def _clusters(rng, n, frac, separation, rot) -> Split:
    n_pos = _class_counts(n, frac)
    y = np.zeros(n, dtype=bool)
    y[:n_pos] = True
    y = y[rng.permutation(n)]
    centre = np.where(y[:, None], separation, -separation) * np.array([1.0, 0.0])
    X = (centre + rng.standard_normal((n, 2))) @ rot.T
    return Split(X, y)


def generate_surrogate_data(cfg: SurrogateConfig) -> SurrogateData:
    """Two overlapping Gaussian classes in the plane, rotated into the target domain."""
    rot = _rotation(cfg.domain_shift_deg)
    splits = []
    for name, n in (("train", cfg.n_train), ("val", cfg.n_val), ("test", cfg.n_test)):
        rng = rngmod.substream(cfg.data_seed, f"surrogate-{name}")
        splits.append(_clusters(rng, n, cfg.class_imbalance, cfg.separation, rot))
    return SurrogateData(*splits)


# -- loss and gradients ----------------------------------------------------


def weighted_loss_and_grad(model: SurrogateModel, X, y, hp: HyperParams, stage: int):
    """Class-weighted mean cross-entropy plus L2 on the stage's trainable weights.

    Returns ``(loss, grads)`` where ``grads`` maps trainable parameter names
    to arrays: stage 1 trains ``output_weights``/``output_bias``; stage 2
    trains all four arrays.
    """
    if stage not in (1, 2):
        raise ValueError("stage must be 1 or 2")
    n = X.shape[0]
    h, p = model.forward(X)
    Y = np.column_stack([~y, y]).astype(np.float64)
    c = np.where(y, hp.pos_cls_weight, hp.neg_cls_weight)
    p_true = np.where(y, p[:, 1], p[:, 0])
    with np.errstate(divide="ignore"):
        ce = -np.log(p_true)
    decay = hp.weight_decay if stage == 1 else hp.weight_decay2
    l2 = np.sum(model.output_weights**2)
    if stage == 2:
        l2 += np.sum(model.hidden_weights**2)
    loss = float(np.sum(c * ce) / n + 0.5 * decay * l2)

    dz = (p - Y) * (c / n)[:, None]
    grads = {
        "output_weights": h.T @ dz + decay * model.output_weights,
        "output_bias": dz.sum(axis=0),
    }
    if stage == 2:
        da = (dz @ model.output_weights.T) * (1.0 - h**2)
        grads["hidden_weights"] = X.T @ da + decay * model.hidden_weights
        grads["hidden_bias"] = da.sum(axis=0)
    return loss, grads


def _step(model: SurrogateModel, grads: dict, lr: float) -> None:
    for name, g in grads.items():
        getattr(model, name)[...] -= lr * g


# -- pretraining (stands in for the source-domain model) -------------------


@functools.lru_cache(maxsize=16)
def _pretrained(data_seed: int, hidden_units: int, separation: float, epochs: int) -> SurrogateModel:
    rng = rngmod.substream(data_seed, "surrogate-init")
    model = SurrogateModel(
        hidden_weights=rng.normal(0.0, 1.0, (2, hidden_units)),
        hidden_bias=rng.normal(0.0, 0.1, hidden_units),
        output_weights=rng.normal(0.0, 0.5, (hidden_units, 2)),
        output_bias=np.zeros(2),
    )
    src = _clusters(rngmod.substream(data_seed, "surrogate-source"), 400, 0.5, separation, np.eye(2))
    hp = HyperParams(1.0, 1.0, 0.0, 0.0, 0.5, 1.0)
    for _ in range(epochs):
        _, g = weighted_loss_and_grad(model, src.X, src.y, hp, stage=2)
        _step(model, g, 0.5)
    return model


def pretrained_model(cfg: SurrogateConfig) -> SurrogateModel:
    return _pretrained(cfg.data_seed, cfg.hidden_units, cfg.separation, cfg.pretrain_epochs).copy()


# -- fine-tuning -----------------------------------------------------------


def train_surrogate(hp: HyperParams, cfg: SurrogateConfig = SurrogateConfig(), data: SurrogateData | None = None) -> EpochHistory:
    """Fine-tune the pretrained model with ``hp`` and record per-epoch validation AUC."""
    data = generate_surrogate_data(cfg) if data is None else data
    model = pretrained_model(cfg)
    history = EpochHistory()
    best_auc = -math.inf
    run = []
    lrs = (hp.init_learningrate, hp.init_learningrate * hp.all_layer_multiplier)
    for stage, budget, lr in ((1, cfg.stage1_epochs, lrs[0]), (2, cfg.stage2_epochs, lrs[1])):
        stale = 0
        done = 0
        for _ in range(budget):
            loss, grads = weighted_loss_and_grad(model, data.train.X, data.train.y, hp, stage)
            if not math.isfinite(loss):
                raise Diverged(f"non-finite training loss in stage {stage}")
            _step(model, grads, lr)
            if not model.is_finite():
                raise Diverged(f"non-finite weights in stage {stage}")
            auc = roc_auc(model.scores(data.val.X), data.val.y)
            history.per_epoch_val_auc.append(auc)
            done += 1
            if auc > best_auc:
                best_auc, stale = auc, 0
            else:
                stale += 1
                if stale >= cfg.patience:
                    break
        run.append(done)
    history.stage_epochs = tuple(run)
    history.final_test_auc = roc_auc(model.scores(data.test.X), data.test.y)
    return history


FITNESS_SOURCES = ("mean_val_auc", "final_test_auc")


def surrogate_fitness(values: Mapping[str, float], cfg: SurrogateConfig, fitness_source: str = "mean_val_auc") -> float:
    h = train_surrogate(HyperParams.from_mapping(values), cfg)
    if fitness_source == "mean_val_auc":
        return average_epoch_auc(h)
    if fitness_source == "final_test_auc":
        return float(h.final_test_auc)
    raise ConfigError(f"fitness_source must be one of {FITNESS_SOURCES}, got {fitness_source!r}")
