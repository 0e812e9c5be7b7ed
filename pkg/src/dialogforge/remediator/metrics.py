"""Session metrics, confusion analysis and bootstrap confidence intervals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..simulator.agenda import (
    ABORTED,
    INTENT_ERROR,
    MAX_TURNS_EXCEEDED,
    NER_ERROR,
    OTHER_ERROR,
    SUCCESS,
)
from ..simulator.episode import EpisodeRecord

FALLBACK_LABEL = "(fallback)"

_OUTCOME_KEYS = (SUCCESS, INTENT_ERROR, NER_ERROR, OTHER_ERROR, MAX_TURNS_EXCEEDED, ABORTED)


def _empty_counts() -> dict:
    return {key: 0 for key in _OUTCOME_KEYS}


@dataclass
class SessionMetrics:
    per_dialog: dict[str, dict] = field(default_factory=dict)
    totals: dict = field(default_factory=_empty_counts)
    episodes: int = 0
    completion_rate: float = 0.0

    def to_doc(self) -> dict:
        return {
            "episodes": self.episodes,
            "completion_rate": round(self.completion_rate, 6),
            "totals": self.totals,
            "per_dialog": self.per_dialog,
        }


def aggregate(episodes: Sequence[EpisodeRecord]) -> SessionMetrics:
    """Outcome counts per dialog and overall.

    Aborted (transport-failed) episodes are reported but excluded from every
    rate denominator.
    """
    metrics = SessionMetrics()
    for episode in episodes:
        dialog = episode.goal.dialog
        bucket = metrics.per_dialog.setdefault(dialog, _empty_counts())
        if episode.outcome not in bucket:
            raise ValueError(f"unknown outcome {episode.outcome!r}")
        bucket[episode.outcome] += 1
        metrics.totals[episode.outcome] += 1
    metrics.episodes = len(episodes)

    def finalize(counts: dict) -> None:
        non_aborted = sum(counts[k] for k in _OUTCOME_KEYS if k != ABORTED)
        counts["non_aborted"] = non_aborted
        counts["completion_rate"] = (
            round(counts[SUCCESS] / non_aborted, 6) if non_aborted else 0.0
        )

    for counts in metrics.per_dialog.values():
        finalize(counts)
    finalize(metrics.totals)
    metrics.completion_rate = metrics.totals["completion_rate"]
    metrics.per_dialog = dict(sorted(metrics.per_dialog.items()))
    return metrics


@dataclass
class ConfusionMatrix:
    """Counts of (true label, predicted label), fallback as an extra column.

    The true label of an episode is its goal's dialog (optionally renamed
    through ``label_map``, e.g. dialog -> intent name); the predicted label
    is the dialog whose intent_success_message matched, or fallback when no
    dialog's golden label ever appeared.
    """

    labels: list[str]
    matrix: list[list[int]]  # rows: true, columns: labels + fallback (last)

    @property
    def fallback_column(self) -> int:
        return len(self.labels)

    def row_sums(self) -> list[int]:
        return [sum(row) for row in self.matrix]

    def to_doc(self) -> dict:
        return {"labels": self.labels, "fallback_label": FALLBACK_LABEL, "matrix": self.matrix}

    @classmethod
    def from_doc(cls, doc: dict) -> "ConfusionMatrix":
        return cls(labels=list(doc["labels"]), matrix=[list(r) for r in doc["matrix"]])


def build_confusion(
    episodes: Sequence[EpisodeRecord], label_map: dict[str, str] | None = None
) -> ConfusionMatrix:
    label_map = label_map or {}

    def rename(dialog: str | None) -> str | None:
        if dialog is None:
            return None
        return label_map.get(dialog, dialog)

    labels = sorted({rename(e.goal.dialog) for e in episodes if e.outcome != ABORTED})
    index = {label: i for i, label in enumerate(labels)}
    matrix = [[0] * (len(labels) + 1) for _ in labels]
    for episode in episodes:
        if episode.outcome == ABORTED:
            continue
        row = index[rename(episode.goal.dialog)]
        predicted = rename(episode.predicted_dialog)
        column = index.get(predicted, len(labels)) if predicted is not None else len(labels)
        matrix[row][column] += 1
    return ConfusionMatrix(labels=labels, matrix=matrix)


def intent_scores(confusion: ConfusionMatrix) -> dict[str, dict]:
    """Precision/recall/F1 per label with 0/0 conventions pinned to 0."""
    if not confusion.labels:
        raise ValueError("empty confusion matrix")
    out: dict[str, dict] = {}
    n = len(confusion.labels)
    for i, label in enumerate(confusion.labels):
        tp = confusion.matrix[i][i]
        support = sum(confusion.matrix[i])
        predicted = sum(confusion.matrix[j][i] for j in range(n))
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out[label] = {
            "precision": round(precision, 6),
            "recall": round(recall, 6),
            "f1": round(f1, 6),
            "support": support,
            "predicted": predicted,
            "flagged": support == 0 and predicted == 0,
        }
    return out


# ---------------------------------------------------------------------------
# bootstrap


def _resample_indices(rng: np.random.Generator, n: int, iterations: int) -> np.ndarray:
    return rng.integers(0, n, size=(iterations, n))


def _percentile_interval(stats: np.ndarray, level: float) -> tuple[float, float]:
    alpha = (1.0 - level) / 2.0
    low, high = np.percentile(stats, [100 * alpha, 100 * (1 - alpha)])
    return float(low), float(high)


def bootstrap_ci(
    items: Sequence,
    statistic: Callable[[Sequence], float],
    iterations: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
) -> tuple[float, float, float]:
    """Percentile bootstrap: resample with replacement, same size.

    Returns (point, low, high); deterministic under the seed. The point is
    the statistic of the original sample.
    """
    if not items:
        raise ValueError("bootstrap over an empty sample")
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    point = float(statistic(items))
    n = len(items)
    rng = np.random.default_rng(seed)
    indices = _resample_indices(rng, n, iterations)
    stats = np.empty(iterations)
    items = list(items)
    for i in range(iterations):
        stats[i] = statistic([items[j] for j in indices[i]])
    low, high = _percentile_interval(stats, level)
    return point, low, high


def f1_for_label(pairs: Sequence[tuple[str, str | None]], label: str) -> float:
    tp = sum(1 for t, p in pairs if t == label and p == label)
    fp = sum(1 for t, p in pairs if t != label and p == label)
    fn = sum(1 for t, p in pairs if t == label and p != label)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return 2 * precision * recall / (precision + recall) if precision + recall else 0.0


def bootstrap_f1_ci(
    pairs: Sequence[tuple[str, str | None]],
    label: str,
    iterations: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
) -> tuple[float, float, float]:
    """Vectorized twin of ``bootstrap_ci(pairs, f1_for_label)``.

    Draws the identical resample index matrix for the same seed, so the two
    routes agree bit-for-bit; tests pin that equivalence.
    """
    if not pairs:
        raise ValueError("bootstrap over an empty sample")
    point = f1_for_label(pairs, label)
    n = len(pairs)
    codes = {label: 1}
    true_codes = np.array([codes.get(t, 0) for t, _ in pairs], dtype=np.int8)
    pred_codes = np.array([codes.get(p, 0) if p is not None else -1 for _, p in pairs], dtype=np.int8)

    rng = np.random.default_rng(seed)
    indices = _resample_indices(rng, n, iterations)
    t = true_codes[indices]
    p = pred_codes[indices]
    tp = ((t == 1) & (p == 1)).sum(axis=1).astype(np.float64)
    fp = ((t != 1) & (p == 1)).sum(axis=1).astype(np.float64)
    fn = ((t == 1) & (p != 1)).sum(axis=1).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        recall = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
        f1 = np.where(precision + recall > 0, 2 * precision * recall / (precision + recall), 0.0)
    low, high = _percentile_interval(f1, level)
    return point, low, high


def bootstrap_mean_ci(
    values: Sequence[float],
    iterations: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
) -> tuple[float, float, float]:
    """Vectorized bootstrap for a mean (e.g. completion rate)."""
    if not values:
        raise ValueError("bootstrap over an empty sample")
    array = np.asarray(values, dtype=np.float64)
    point = float(array.mean())
    rng = np.random.default_rng(seed)
    indices = _resample_indices(rng, len(array), iterations)
    stats = array[indices].mean(axis=1)
    low, high = _percentile_interval(stats, level)
    return point, low, high
