"""Episode analysis: metrics, root causes, suggestions, analytics, paths."""

from .clustering import cluster_confusion
from .metrics import (
    FALLBACK_LABEL,
    ConfusionMatrix,
    SessionMetrics,
    aggregate,
    bootstrap_ci,
    bootstrap_f1_ci,
    bootstrap_mean_ci,
    build_confusion,
    f1_for_label,
    intent_scores,
)
from .paths import DialogPath, PathQuery, UnknownVertex, enumerate_paths
from .report import (
    build_intent_report,
    build_ner_remediation,
    compose_report,
    label_pairs,
    render_report,
)
from .rootcause import (
    IntentErrorGroup,
    NotAnError,
    RemediationSuggestion,
    backtrack_root_cause,
    group_intent_errors,
    is_intent_failure,
    suggest,
)

__all__ = [
    "ConfusionMatrix",
    "DialogPath",
    "FALLBACK_LABEL",
    "IntentErrorGroup",
    "NotAnError",
    "PathQuery",
    "RemediationSuggestion",
    "SessionMetrics",
    "UnknownVertex",
    "aggregate",
    "backtrack_root_cause",
    "bootstrap_ci",
    "bootstrap_f1_ci",
    "bootstrap_mean_ci",
    "build_confusion",
    "build_intent_report",
    "build_ner_remediation",
    "cluster_confusion",
    "compose_report",
    "enumerate_paths",
    "f1_for_label",
    "group_intent_errors",
    "intent_scores",
    "is_intent_failure",
    "label_pairs",
    "render_report",
    "suggest",
]
