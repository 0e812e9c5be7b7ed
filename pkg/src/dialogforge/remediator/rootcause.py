"""Root-cause backtracking and remediation suggestions.

Failed episodes are replayed backwards-from-terminal over their recorded
agenda/match trace to find the earliest turn where the conversation
diverged from the goal's expectation; intent failures are then grouped by
the original utterance whose paraphrase triggered them and turned into
actionable suggestions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import DialogForgeError
from ..simulator.agenda import ABORTED, INTENT_ERROR, NER_ERROR, OTHER_ERROR, SUCCESS
from ..simulator.episode import EpisodeRecord
from ..simulator.nlu import INTENT_SUCCESS, UNMATCHED
from .metrics import FALLBACK_LABEL

CATEGORY_INTENT = "intent_error"
CATEGORY_NER = "ner_error"
CATEGORY_UNMAPPED = "unmapped_message"
CATEGORY_DESIGN = "dialog_design"


class NotAnError(DialogForgeError):
    code = "not_an_error"


def backtrack_root_cause(episode: EpisodeRecord) -> tuple[int, str, str]:
    """(error turn, category, explanation) for a failed episode.

    Walks the trace back from the terminal turn to the earliest divergence:
    a foreign golden label, a re-requested already-informed slot, or an
    unmapped bot message. Episodes that ran out of turns without any of
    those diverged by design, not by model error.
    """
    if episode.outcome in (SUCCESS, ABORTED):
        raise NotAnError(f"episode {episode.goal_id} has outcome {episode.outcome}")

    goal_dialog = episode.goal.dialog
    informed: set[str] = set()
    for turn in episode.turns:
        for match in turn.matches:
            if match.act == INTENT_SUCCESS and match.dialog != goal_dialog:
                return (
                    turn.turn,
                    CATEGORY_INTENT,
                    f"bot answered with the golden label of dialog {match.dialog!r} "
                    f"for query {episode.goal.intent_query!r}",
                )
            if match.act.startswith("request_"):
                entity = match.act[len("request_") :]
                if entity in informed:
                    return (
                        turn.turn,
                        CATEGORY_NER,
                        f"bot re-requested slot {entity!r} after it was informed "
                        f"(value {episode.goal.inform_slots.get(entity)!r})",
                    )
            if match.act == UNMATCHED:
                return (
                    turn.turn,
                    CATEGORY_UNMAPPED,
                    f"bot message not covered by the dialog-act map: {match.bot_message!r}",
                )
        for act in turn.user_acts:
            if act.kind == "inform_slot" and act.slot:
                informed.add(act.slot)

    last_turn = episode.turns[-1].turn if episode.turns else 0
    if episode.outcome == OTHER_ERROR and episode.error_detail:
        return last_turn, CATEGORY_DESIGN, episode.error_detail
    return (
        last_turn,
        CATEGORY_DESIGN,
        "conversation reached the turn limit without a terminal bot message",
    )


@dataclass
class IntentErrorGroup:
    dialog: str
    origin_utterance: str
    error_count: int
    confusions: dict[str, int]  # predicted label -> count ((fallback) included)
    episode_ids: list[str]
    failing_queries: list[str]

    def to_doc(self) -> dict:
        return {
            "dialog": self.dialog,
            "origin_utterance": self.origin_utterance,
            "error_count": self.error_count,
            "confusions": self.confusions,
            "episode_ids": self.episode_ids,
            "failing_queries": self.failing_queries,
        }


def is_intent_failure(episode: EpisodeRecord) -> bool:
    """The bot never produced the goal dialog's golden label before failing."""
    if episode.outcome not in (INTENT_ERROR, OTHER_ERROR):
        return False
    return episode.predicted_dialog != episode.goal.dialog


def group_intent_errors(
    episodes: Sequence[EpisodeRecord], label_map: dict[str, str] | None = None
) -> list[IntentErrorGroup]:
    """Intent failures grouped per (dialog, origin utterance).

    Groups are ordered by error count descending, ties lexicographic, which
    is also the display order the dashboard must preserve.
    """
    label_map = label_map or {}
    buckets: dict[tuple[str, str], list[EpisodeRecord]] = {}
    for episode in episodes:
        if not is_intent_failure(episode):
            continue
        origin = episode.goal.origin_utterance or episode.goal.intent_query
        buckets.setdefault((episode.goal.dialog, origin), []).append(episode)

    groups = []
    for (dialog, origin), members in buckets.items():
        confusions: Counter[str] = Counter()
        for episode in members:
            predicted = episode.predicted_dialog
            label = label_map.get(predicted, predicted) if predicted else FALLBACK_LABEL
            confusions[label] += 1
        groups.append(
            IntentErrorGroup(
                dialog=dialog,
                origin_utterance=origin,
                error_count=len(members),
                confusions=dict(sorted(confusions.items())),
                episode_ids=[e.goal_id for e in members],
                failing_queries=[e.goal.intent_query for e in members],
            )
        )
    groups.sort(key=lambda g: (-g.error_count, g.dialog, g.origin_utterance))
    return groups


SUGGEST_AUGMENT = "augment_training_set"
SUGGEST_MOVE = "move_utterance"
SUGGEST_REVIEW = "review_dialog_design"


@dataclass
class RemediationSuggestion:
    kind: str
    intent: str  # dialog/intent the origin utterance belongs to
    origin_utterance: str
    rationale: str
    target_intent: str | None = None
    evidence: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "kind": self.kind,
            "intent": self.intent,
            "origin_utterance": self.origin_utterance,
            "rationale": self.rationale,
            "target_intent": self.target_intent,
            "evidence": self.evidence,
        }


def suggest(
    groups: Sequence[IntentErrorGroup],
    move_threshold: float = 0.5,
) -> list[RemediationSuggestion]:
    """One suggestion per error group, to be read as a guideline, not an order.

    If more than ``move_threshold`` of a group's misclassifications land on
    one other intent, the origin utterance probably belongs there; if the
    plurality is out-of-domain (fallback), the training set needs the
    failing queries; otherwise the confusion is mixed and augmentation is
    still the safe default.
    """
    suggestions = []
    for group in groups:
        evidence = group.to_doc()
        total = group.error_count
        ranked = sorted(group.confusions.items(), key=lambda kv: (-kv[1], kv[0]))
        top_label, top_count = ranked[0]
        if top_label != FALLBACK_LABEL and top_count / total > move_threshold:
            suggestions.append(
                RemediationSuggestion(
                    kind=SUGGEST_MOVE,
                    intent=group.dialog,
                    origin_utterance=group.origin_utterance,
                    target_intent=top_label,
                    rationale=(
                        f"{top_count}/{total} failing paraphrases were classified as "
                        f"{top_label!r}; consider moving the utterance there"
                    ),
                    evidence=evidence,
                )
            )
        elif top_label == FALLBACK_LABEL:
            suggestions.append(
                RemediationSuggestion(
                    kind=SUGGEST_AUGMENT,
                    intent=group.dialog,
                    origin_utterance=group.origin_utterance,
                    rationale=(
                        f"{top_count}/{total} failing paraphrases were out-of-domain for "
                        "the current intent model; augment its training set with them"
                    ),
                    evidence=evidence,
                )
            )
        else:
            suggestions.append(
                RemediationSuggestion(
                    kind=SUGGEST_AUGMENT,
                    intent=group.dialog,
                    origin_utterance=group.origin_utterance,
                    rationale=(
                        "failing paraphrases scatter across several intents "
                        f"({dict(ranked)}); augment the training set to sharpen the boundary"
                    ),
                    evidence=evidence,
                )
            )
    return suggestions
