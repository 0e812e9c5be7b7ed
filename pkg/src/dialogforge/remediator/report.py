"""Health-report assembly.

One JSON document per test session with stable section order and fully
deterministic content (no wall-clock fields), so report goldens diff
cleanly and identical runs produce identical bytes.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..simulator.agenda import ABORTED, NER_ERROR
from ..simulator.episode import EpisodeRecord
from .clustering import cluster_confusion
from .metrics import (
    ConfusionMatrix,
    SessionMetrics,
    _percentile_interval,
    _resample_indices,
    aggregate,
    build_confusion,
    intent_scores,
)
from .paths import enumerate_paths
from .rootcause import backtrack_root_cause, group_intent_errors, suggest

REPORT_SCHEMA_VERSION = 1


def label_pairs(
    episodes: Sequence[EpisodeRecord], label_map: dict[str, str] | None = None
) -> list[tuple[str, str | None]]:
    """(true label, predicted label or None) per non-aborted episode."""
    label_map = label_map or {}
    pairs = []
    for episode in episodes:
        if episode.outcome == ABORTED:
            continue
        true = label_map.get(episode.goal.dialog, episode.goal.dialog)
        predicted = episode.predicted_dialog
        pairs.append((true, label_map.get(predicted, predicted) if predicted else None))
    return pairs


def bootstrap_label_scores(
    pairs: Sequence[tuple[str, str | None]],
    label: str,
    iterations: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
) -> dict:
    """Precision/recall/F1 with percentile CIs from one resample matrix."""
    if not pairs:
        raise ValueError("no label pairs to bootstrap")
    n = len(pairs)
    t = np.array([1 if p[0] == label else 0 for p in pairs], dtype=np.int8)
    p = np.array([1 if p[1] == label else 0 for p in pairs], dtype=np.int8)

    def prf(tv: np.ndarray, pv: np.ndarray, axis=None):
        tp = ((tv == 1) & (pv == 1)).sum(axis=axis).astype(np.float64)
        fp = ((tv != 1) & (pv == 1)).sum(axis=axis).astype(np.float64)
        fn = ((tv == 1) & (pv != 1)).sum(axis=axis).astype(np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
            recall = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
            f1 = np.where(
                precision + recall > 0, 2 * precision * recall / (precision + recall), 0.0
            )
        return precision, recall, f1

    point_p, point_r, point_f = prf(t, p)
    rng = np.random.default_rng(seed)
    indices = _resample_indices(rng, n, iterations)
    boot_p, boot_r, boot_f = prf(t[indices], p[indices], axis=1)

    def section(point, boots) -> dict:
        low, high = _percentile_interval(boots, level)
        return {
            "point": round(float(point), 6),
            "ci_low": round(low, 6),
            "ci_high": round(high, 6),
        }

    return {
        "precision": section(point_p, boot_p),
        "recall": section(point_r, boot_r),
        "f1": section(point_f, boot_f),
        "support": int((t == 1).sum()),
    }


def build_intent_report(
    episodes: Sequence[EpisodeRecord],
    label_map: dict[str, str] | None = None,
    iterations: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
) -> dict[str, dict]:
    pairs = label_pairs(episodes, label_map)
    labels = sorted({t for t, _ in pairs})
    return {
        label: bootstrap_label_scores(pairs, label, iterations, level, seed)
        for label in labels
    }


def build_ner_remediation(episodes: Sequence[EpisodeRecord]) -> list[dict]:
    """Re-requested entities with the values that failed extraction."""
    buckets: dict[str, dict] = {}
    for episode in episodes:
        if episode.outcome != NER_ERROR:
            continue
        turn, _category, explanation = backtrack_root_cause(episode)
        entity = None
        for match in episode.turns[turn].matches if turn < len(episode.turns) else []:
            if match.act.startswith("request_"):
                entity = match.act[len("request_") :]
                break
        if entity is None:
            continue
        bucket = buckets.setdefault(
            entity, {"entity": entity, "error_count": 0, "failing_values": [], "episodes": []}
        )
        bucket["error_count"] += 1
        value = episode.goal.inform_slots.get(entity)
        if value is not None and value not in bucket["failing_values"]:
            bucket["failing_values"].append(value)
        bucket["episodes"].append(
            {"goal_id": episode.goal_id, "dialog": episode.goal.dialog, "turn": turn,
             "explanation": explanation}
        )
    return [buckets[k] for k in sorted(buckets)]


def render_report(
    metrics: SessionMetrics,
    intent_report: dict[str, dict],
    suggestions: Sequence,
    clusters: list[list[str]],
    history: Sequence[dict],
    ner_remediation: list[dict] | None = None,
    confusion: ConfusionMatrix | None = None,
    paths: list[dict] | None = None,
    label_map: dict[str, str] | None = None,
) -> dict:
    """Assemble the report document; section order is part of the contract."""
    history_section = []
    previous: dict | None = None
    for entry in history:
        row = dict(entry)
        if previous is not None:
            row["completion_rate_delta"] = round(
                row.get("completion_rate", 0.0) - previous.get("completion_rate", 0.0), 6
            )
            row["macro_f1_delta"] = round(
                row.get("macro_f1", 0.0) - previous.get("macro_f1", 0.0), 6
            )
        else:
            row["completion_rate_delta"] = None
            row["macro_f1_delta"] = None
        history_section.append(row)
        previous = row

    f1_points = [scores["f1"]["point"] for scores in intent_report.values()]
    macro_f1 = round(float(np.mean(f1_points)), 6) if f1_points else 0.0

    label_map = label_map or {}
    dialogs_section = {}
    for dialog, counts in metrics.per_dialog.items():
        label = label_map.get(dialog, dialog)
        dialogs_section[dialog] = {
            "intent_label": label,
            "counts": counts,
            "intent_scores": intent_report.get(label),
        }

    analytics = {}
    if confusion is not None:
        analytics["confusion_matrix"] = confusion.to_doc()
        analytics["intent_scores"] = intent_scores(confusion)
    analytics["clusters"] = clusters

    doc = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "history": history_section,
        "summary": {
            "episodes": metrics.episodes,
            "completion_rate": metrics.completion_rate,
            "macro_f1": macro_f1,
            "totals": metrics.totals,
        },
        "dialogs": dialogs_section,
        "intent_remediation": [s.to_doc() for s in suggestions],
        "ner_remediation": ner_remediation or [],
        "analytics": analytics,
        "paths": paths or [],
    }
    return doc


def compose_report(
    episodes: Sequence[EpisodeRecord],
    label_map: dict[str, str] | None = None,
    history: Sequence[dict] | None = None,
    graph_doc: dict | None = None,
    success_dialogs: Sequence[str] | None = None,
    iterations: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
    merge_threshold: float = 0.1,
    intent_report: dict | None = None,
) -> dict:
    """Everything the dashboard renders, computed from the episode log."""
    metrics = aggregate(episodes)
    confusion = build_confusion(episodes, label_map)
    if intent_report is None:
        intent_report = build_intent_report(episodes, label_map, iterations, level, seed)
    groups = group_intent_errors(episodes, label_map)
    suggestions = suggest(groups)
    clusters = cluster_confusion(confusion, merge_threshold)
    ner = build_ner_remediation(episodes)

    paths_section: list[dict] = []
    if graph_doc and success_dialogs:
        adjacency: dict[str, list[str]] = {v: [] for v in graph_doc.get("vertices", [])}
        for edge in graph_doc.get("edges", []):
            adjacency[edge["source"]].append(edge["target"])
        sources = sorted({e.goal.dialog for e in episodes})
        for source in sources:
            for target in success_dialogs:
                if source not in adjacency or target not in adjacency:
                    continue
                query = enumerate_paths(adjacency, source, target)
                paths_section.append(
                    {"source": source, "target": target, **query.to_doc()}
                )

    return render_report(
        metrics,
        intent_report,
        suggestions,
        clusters,
        history or [],
        ner_remediation=ner,
        confusion=confusion,
        paths=paths_section,
        label_map=label_map,
    )
