"""Evaluation metrics and statistical comparison utilities.

AUROC uses the rank/pair-counting (Mann-Whitney) formulation with
explicit half-credit for ties, computed over exact integers so results
match a brute-force pair enumeration bit-for-bit. All standard
deviations here are population (divisor N) standard deviations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np


class UndefinedMetricError(ValueError):
    """The metric is mathematically undefined on this input."""


class MetricInputError(ValueError):
    pass


def _doubled_average_ranks(values: Sequence[float]) -> List[int]:
    """1-based average ranks, doubled so ties stay exact integers."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    doubled = [0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            doubled[order[k]] = i + j + 2  # 2 * average of ranks i+1 .. j+1
        i = j + 1
    return doubled


def auroc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Area under the ROC curve: (concordant + 0.5 tied) / (P * N).

    Raises UndefinedMetricError when either class is absent.
    """
    if len(scores) != len(labels):
        raise MetricInputError(
            f"scores length {len(scores)} != labels length {len(labels)}"
        )
    n = len(scores)
    n_pos = sum(1 for y in labels if y == 1)
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUROC undefined: only one class present")
    doubled = _doubled_average_ranks(scores)
    rank_sum2 = sum(doubled[i] for i in range(n) if labels[i] == 1)
    return (rank_sum2 - n_pos * (n_pos + 1)) / (2 * n_pos * n_neg)


def multitask_auroc(
    scores: np.ndarray, labels: np.ndarray, missing: Optional[np.ndarray] = None
) -> float:
    """Mean per-task AUROC, excluding missing labels per task and skipping
    tasks whose remaining labels are single-class. Raises
    UndefinedMetricError if every task is undefined."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim == 1:
        scores = scores[:, None]
    if labels.ndim == 1:
        labels = labels[:, None]
    if scores.shape != labels.shape:
        raise MetricInputError(
            f"scores shape {scores.shape} != labels shape {labels.shape}"
        )
    if missing is None:
        missing = np.zeros(labels.shape, dtype=bool)
    missing = np.asarray(missing, dtype=bool)
    if missing.shape != labels.shape:
        raise MetricInputError("missing mask shape mismatch")

    values = []
    for t in range(labels.shape[1]):
        keep = ~missing[:, t]
        y = labels[keep, t]
        if keep.sum() == 0:
            continue
        try:
            values.append(auroc(scores[keep, t].tolist(), [int(v) for v in y]))
        except UndefinedMetricError:
            continue
    if not values:
        raise UndefinedMetricError("AUROC undefined for every task")
    return float(sum(values) / len(values))


def average_precision(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Average precision: mean over positives of precision at each
    positive's rank, scores descending, ties kept in original order."""
    if len(scores) != len(labels):
        raise MetricInputError(
            f"scores length {len(scores)} != labels length {len(labels)}"
        )
    n_pos = sum(1 for y in labels if y == 1)
    if n_pos == 0:
        raise UndefinedMetricError("average precision undefined: no positives")
    order = sorted(range(len(scores)), key=lambda i: -scores[i])  # stable
    total = 0.0
    seen_pos = 0
    for rank, i in enumerate(order, start=1):
        if labels[i] == 1:
            seen_pos += 1
            total += seen_pos / rank
    return total / n_pos


def multitask_average_precision(
    scores: np.ndarray, labels: np.ndarray, missing: Optional[np.ndarray] = None
) -> float:
    """Mean per-task average precision with the same masking/skip rules as
    multitask_auroc."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim == 1:
        scores = scores[:, None]
    if labels.ndim == 1:
        labels = labels[:, None]
    if missing is None:
        missing = np.zeros(labels.shape, dtype=bool)
    missing = np.asarray(missing, dtype=bool)
    values = []
    for t in range(labels.shape[1]):
        keep = ~missing[:, t]
        if keep.sum() == 0:
            continue
        try:
            values.append(
                average_precision(
                    scores[keep, t].tolist(), [int(v) for v in labels[keep, t]]
                )
            )
        except UndefinedMetricError:
            continue
    if not values:
        raise UndefinedMetricError("average precision undefined for every task")
    return float(sum(values) / len(values))


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float]) -> float:
    """Exact two-sided signed-rank test p-value for paired samples.

    Zero differences are dropped; tied absolute differences receive
    average ranks. The null distribution is enumerated exactly over all
    2^n sign assignments (via a sum-count table), so n must be <= 25
    after zero-dropping.
    """
    if len(a) != len(b):
        raise MetricInputError(f"length mismatch: {len(a)} vs {len(b)}")
    diffs = [x - y for x, y in zip(a, b) if x != y]
    n = len(diffs)
    if n == 0:
        raise UndefinedMetricError("all differences are zero: no test possible")
    if n > 25:
        raise MetricInputError(f"exact mode supports n <= 25, got {n}")

    doubled = _doubled_average_ranks([abs(d) for d in diffs])
    w2_plus = sum(r for r, d in zip(doubled, diffs) if d > 0)
    w2_minus = sum(doubled) - w2_plus

    # counts[s] = number of sign assignments whose doubled positive-rank
    # sum equals s; equivalent to enumerating all 2^n assignments.
    total2 = sum(doubled)
    counts = [0] * (total2 + 1)
    counts[0] = 1
    for r in doubled:
        for s in range(total2, r - 1, -1):
            if counts[s - r]:
                counts[s] += counts[s - r]

    w_lo = min(w2_plus, w2_minus)
    w_hi = max(w2_plus, w2_minus)
    n_assignments = 1 << n
    tail = sum(counts[: w_lo + 1]) + sum(counts[w_hi:])
    return min(1.0, tail / n_assignments)


def aggregate_importance(
    importances: Sequence[float], column_groups: Sequence[str]
) -> Dict[str, float]:
    """Sum per-column importances into their named feature groups."""
    if len(importances) != len(column_groups):
        raise MetricInputError(
            f"{len(importances)} importances but {len(column_groups)} column groups"
        )
    out: Dict[str, float] = {}
    for value, group in zip(importances, column_groups):
        out[group] = out.get(group, 0.0) + float(value)
    return out


def mean_group_importance(group_maps: Sequence[Dict[str, float]]) -> Dict[str, float]:
    """Average several per-group importance maps (e.g. over seeds or
    datasets); groups absent from a map count as 0 there."""
    if not group_maps:
        raise MetricInputError("no importance maps to average")
    keys = sorted({k for m in group_maps for k in m})
    return {k: sum(m.get(k, 0.0) for m in group_maps) / len(group_maps) for k in keys}


def population_std(values: Sequence[float]) -> float:
    arr = np.asarray(values, dtype=np.float64)
    return float(np.sqrt(np.mean((arr - arr.mean()) ** 2)))


@dataclass
class EvalReport:
    """Per-seed, per-task metric values with seed-level aggregation."""

    metric: str
    seeds: List[int]
    task_names: List[str]
    # per_seed_task[i][t] is the metric for seeds[i], task t; None = skipped
    per_seed_task: List[List[Optional[float]]]

    def per_seed_mean(self) -> List[float]:
        means = []
        for row in self.per_seed_task:
            defined = [v for v in row if v is not None]
            if not defined:
                raise UndefinedMetricError("no defined task values for a seed")
            means.append(sum(defined) / len(defined))
        return means

    def mean(self) -> float:
        per_seed = self.per_seed_mean()
        return sum(per_seed) / len(per_seed)

    def std(self) -> float:
        return population_std(self.per_seed_mean())

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "topomol-eval-report",
                "version": 1,
                "metric": self.metric,
                "seeds": self.seeds,
                "task_names": self.task_names,
                "per_seed_task": self.per_seed_task,
                "per_seed_mean": self.per_seed_mean(),
                "mean": self.mean(),
                "std": self.std(),
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        payload = json.loads(text)
        if payload.get("format") != "topomol-eval-report":
            raise MetricInputError("not an evaluation report document")
        return cls(
            metric=payload["metric"],
            seeds=payload["seeds"],
            task_names=payload["task_names"],
            per_seed_task=payload["per_seed_task"],
        )
