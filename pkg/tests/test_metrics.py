import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gae2e.errors import DegenerateLabels, EmptyHistory
from gae2e.metrics import EpochHistory, ScoredLabels, average_epoch_auc, midranks, roc_auc


def pair_count_auc(scores, labels):
    """O(n^2) oracle: fraction of (pos, neg) pairs ranked correctly, ties 1/2."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return total / (len(pos) * len(neg))


def test_perfect_separation():
    assert roc_auc(ScoredLabels([0.9, 0.1], [True, False])) == 1.0


def test_all_ties():
    assert roc_auc([0.3] * 7, [True, False, True, False, False, True, False]) == 0.5


def test_single_class_rejected():
    with pytest.raises(DegenerateLabels):
        roc_auc([0.1, 0.2], [True, True])


def test_midranks_average_ties():
    assert midranks([3.0, 1.0, 3.0, 2.0]).tolist() == [3.5, 1.0, 3.5, 2.0]


def test_matches_pair_count_oracle():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        n = int(rng.integers(2, 13))
        labels = rng.random(n) < 0.5
        labels[0], labels[1] = True, False
        scores = rng.integers(0, 5, n) / 4.0  # coarse grid forces ties
        assert roc_auc(scores, labels) == pytest.approx(pair_count_auc(scores, labels), abs=1e-12)


@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.booleans()), min_size=2, max_size=40))
def test_label_flip_complement(data):
    scores = [s for s, _ in data]
    labels = np.array([y for _, y in data])
    if labels.all() or not labels.any():
        return
    assert roc_auc(scores, ~labels) == pytest.approx(1 - roc_auc(scores, labels), abs=1e-12)


@given(st.lists(st.tuples(st.integers(-50, 50), st.booleans()), min_size=2, max_size=40))
def test_monotone_transform_invariance(data):
    scores = np.array([s for s, _ in data], dtype=float)
    labels = [y for _, y in data]
    if all(labels) or not any(labels):
        return
    assert roc_auc(np.exp(scores / 10), labels) == roc_auc(scores, labels)


def test_average_epoch_auc():
    assert average_epoch_auc(EpochHistory([0.5])) == 0.5
    assert average_epoch_auc([0.4, 0.6]) == 0.5
    values = list(np.random.default_rng(3).random(10))
    assert abs(average_epoch_auc(values) - math.fsum(values) / 10) <= 1e-15
    with pytest.raises(EmptyHistory):
        average_epoch_auc([])
