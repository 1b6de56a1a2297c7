"""External cluster-validity measures over observation pairs: ARI, RI, TPR, TNR."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


def _labels(partition) -> np.ndarray:
    labels = getattr(partition, "labels", partition)
    return np.asarray(labels)


def _contingency(truth: np.ndarray, estimate: np.ndarray) -> np.ndarray:
    _, ti = np.unique(truth, return_inverse=True)
    _, ei = np.unique(estimate, return_inverse=True)
    table = np.zeros((ti.max() + 1, ei.max() + 1), dtype=np.int64)
    np.add.at(table, (ti, ei), 1)
    return table


def _comb2(values) -> int:
    return int(sum(math.comb(int(v), 2) for v in np.ravel(values)))


@dataclass(frozen=True)
class PairCounts:
    """Counts over the C(m,2) unordered pairs; positive = same cluster in truth."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def pair_counts(truth, estimate) -> PairCounts:
    """tp/fp/fn/tn over all unordered observation pairs."""
    t, e = _labels(truth), _labels(estimate)
    if t.shape != e.shape:
        raise ValidationError("partitions must have equal length")
    m = t.size
    table = _contingency(t, e)
    tp = _comb2(table)
    together_truth = _comb2(table.sum(axis=1))
    together_est = _comb2(table.sum(axis=0))
    fn = together_truth - tp
    fp = together_est - tp
    tn = math.comb(m, 2) - tp - fn - fp
    return PairCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def rand_index(truth, estimate) -> float:
    """Proportion of pairs on which the two partitions agree."""
    t = _labels(truth)
    if t.size < 2:
        raise ValidationError("need at least 2 observations")
    pc = pair_counts(truth, estimate)
    return (pc.tp + pc.tn) / pc.total


def adjusted_rand_index(truth, estimate) -> float:
    """Hubert-Arabie chance-corrected Rand index.

    ARI = (Index - Expected) / (Max - Expected) with Index = sum_ij C(n_ij, 2)
    over the contingency table. When Max equals Expected (both partitions
    all-in-one or all-singletons) the value is 1 if the partitions agree on
    every pair, else 0.
    """
    t, e = _labels(truth), _labels(estimate)
    if t.shape != e.shape:
        raise ValidationError("partitions must have equal length")
    m = t.size
    if m < 2:
        raise ValidationError("need at least 2 observations")
    table = _contingency(t, e)
    index = _comb2(table)
    sum_a = _comb2(table.sum(axis=1))
    sum_b = _comb2(table.sum(axis=0))
    expected = sum_a * sum_b / math.comb(m, 2)
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        pc = pair_counts(t, e)
        return 1.0 if pc.fp == 0 and pc.fn == 0 else 0.0
    return (index - expected) / (max_index - expected)


def tpr_tnr(truth, estimate) -> tuple:
    """(true positive rate, true negative rate) over pairs, anchored to truth.

    A component whose denominator is zero (truth all-in-one leaves no negative
    pairs; truth all-singletons leaves no positive pairs) is returned as NaN.
    """
    pc = pair_counts(truth, estimate)
    tpr = pc.tp / (pc.tp + pc.fn) if pc.tp + pc.fn > 0 else float("nan")
    tnr = pc.tn / (pc.tn + pc.fp) if pc.tn + pc.fp > 0 else float("nan")
    return tpr, tnr
