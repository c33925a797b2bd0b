"""ROC AUC and epoch-averaged fitness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateLabels, EmptyHistory

__all__ = ["ScoredLabels", "EpochHistory", "roc_auc", "average_epoch_auc", "midranks"]


@dataclass(frozen=True)
class ScoredLabels:
    scores: Sequence[float]
    labels: Sequence[bool]


@dataclass
class EpochHistory:
    per_epoch_val_auc: list[float] = field(default_factory=list)
    final_test_auc: Optional[float] = None
    stage_epochs: tuple[int, int] = (0, 0)

    @property
    def epochs(self) -> int:
        return len(self.per_epoch_val_auc)


def midranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks of ``x`` with ties given their average rank."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    # boundaries of runs of equal values in sorted order
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], n]
    avg = 0.5 * (starts + ends + 1)  # mean of ranks start+1 .. end
    ranks = np.empty(n)
    ranks[order] = np.repeat(avg, ends - starts)
    return ranks


def roc_auc(data: ScoredLabels | Sequence[float], labels: Sequence[bool] | None = None) -> float:
    """Mann-Whitney estimate of ROC AUC, ties counted as one half.

    Accepts either a :class:`ScoredLabels` or ``(scores, labels)``.
    Runs in O(n log n).
    """
    if labels is None:
        scores, labels = data.scores, data.labels
    else:
        scores = data
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=bool)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError(f"scores {s.shape} and labels {y.shape} must be equal-length 1-D")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels(f"AUC needs both classes, got {n_pos} positive / {n_neg} negative")
    r = midranks(s)
    u = r[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def average_epoch_auc(h: EpochHistory | Sequence[float]) -> float:
    values = h.per_epoch_val_auc if isinstance(h, EpochHistory) else h
    if len(values) == 0:
        raise EmptyHistory("no epochs recorded")
    return float(np.mean(np.asarray(values, dtype=np.float64)))
