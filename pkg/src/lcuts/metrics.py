"""Grouping and counting accuracy between predicted and ground-truth clusters.

Predicted and truth clusterings are matched one-to-one by maximizing total
node overlap; node-level agreement then gives the grouping accuracy and
cluster-level agreement (a match counts only when the overlap covers at least
``overlap_frac`` of the larger group) gives the counting accuracy. Both are
Dice scores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateInputError, InputError


@dataclass(frozen=True)
class EvalReport:
    gacc: float
    cacc: float
    node_tp: int
    node_fp: int
    node_fn: int
    cluster_tp: int
    cluster_fp: int
    cluster_fn: int
    matches: list[tuple[int, int, int]]  # (pred index, truth index, overlap)
    overlap_frac: float

    def to_dict(self) -> dict:
        return {
            "gacc": self.gacc,
            "cacc": self.cacc,
            "node": {"tp": self.node_tp, "fp": self.node_fp, "fn": self.node_fn},
            "cluster": {"tp": self.cluster_tp, "fp": self.cluster_fp, "fn": self.cluster_fn},
            "matches": [list(m) for m in self.matches],
            "overlapFrac": self.overlap_frac,
        }


def dice(tp: int, fp: int, fn: int) -> float:
    """2TP / (2TP + FP + FN); undefined when all three are zero."""
    if tp < 0 or fp < 0 or fn < 0:
        raise InputError("dice counts must be nonnegative")
    denom = 2 * tp + fp + fn
    if denom == 0:
        raise DegenerateInputError("dice undefined for tp = fp = fn = 0")
    return 2.0 * tp / denom


def _check_clustering(groups, label: str) -> list[set[int]]:
    sets = [set(g) for g in groups]
    seen: set[int] = set()
    for g in sets:
        if not g:
            raise InputError(f"{label} contains an empty group")
        if seen & g:
            raise InputError(f"{label} groups overlap")
        seen |= g
    return sets


def match_clusters(pred, truth) -> list[tuple[int, int, int]]:
    """One-to-one matching maximizing total overlap.

    Returns (pred_index, truth_index, overlap) triples sorted by pred index;
    pairs with zero overlap are not reported. Both clusterings must cover the
    same id universe.
    """
    pred = _check_clustering(pred, "pred")
    truth = _check_clustering(truth, "truth")
    pred_universe = set().union(*pred) if pred else set()
    truth_universe = set().union(*truth) if truth else set()
    if pred_universe != truth_universe:
        raise InputError("pred and truth must cover the same node ids")
    if not pred or not truth:
        return []
    overlap = np.zeros((len(pred), len(truth)), dtype=np.int64)
    for i, pg in enumerate(pred):
        for j, tg in enumerate(truth):
            overlap[i, j] = len(pg & tg)
    rows, cols = linear_sum_assignment(overlap, maximize=True)
    matches = [
        (int(i), int(j), int(overlap[i, j]))
        for i, j in zip(rows, cols)
        if overlap[i, j] > 0
    ]
    matches.sort()
    return matches


def grouping_accuracy(pred, truth) -> tuple[float, int, int, int]:
    """Node-level Dice: (gacc, tp, fp, fn)."""
    pred_sets = _check_clustering(pred, "pred")
    truth_sets = _check_clustering(truth, "truth")
    matches = match_clusters(pred, truth)
    tp = sum(ov for _, _, ov in matches)
    total_pred = sum(len(g) for g in pred_sets)
    total_truth = sum(len(g) for g in truth_sets)
    fp = total_pred - tp
    fn = total_truth - tp
    return dice(tp, fp, fn), tp, fp, fn


def counting_accuracy(pred, truth, overlap_frac: float = 0.5) -> tuple[float, int, int, int]:
    """Cluster-level Dice: (cacc, tp, fp, fn).

    A matched pair counts as TP when its overlap reaches ``overlap_frac`` of
    the larger of the two groups; everything else on either side is an error.
    """
    if not 0.0 < overlap_frac <= 1.0:
        raise InputError(f"overlapFrac must be in (0, 1], got {overlap_frac}")
    pred_sets = _check_clustering(pred, "pred")
    truth_sets = _check_clustering(truth, "truth")
    matches = match_clusters(pred, truth)
    tp = 0
    for i, j, ov in matches:
        if ov >= overlap_frac * max(len(pred_sets[i]), len(truth_sets[j])):
            tp += 1
    fp = len(pred_sets) - tp
    fn = len(truth_sets) - tp
    return dice(tp, fp, fn), tp, fp, fn


def evaluate(pred, truth, overlap_frac: float = 0.5) -> EvalReport:
    """Full report: matching, grouping accuracy, counting accuracy."""
    matches = match_clusters(pred, truth)
    gacc, ntp, nfp, nfn = grouping_accuracy(pred, truth)
    cacc, ctp, cfp, cfn = counting_accuracy(pred, truth, overlap_frac)
    return EvalReport(
        gacc=gacc, cacc=cacc,
        node_tp=ntp, node_fp=nfp, node_fn=nfn,
        cluster_tp=ctp, cluster_fp=cfp, cluster_fn=cfn,
        matches=matches, overlap_frac=overlap_frac,
    )
