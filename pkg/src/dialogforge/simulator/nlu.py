"""Fuzzy-matching NLU: bot message -> dialog act.

Similarity is a token-set ratio: lowercase, delete punctuation, tokenize
on whitespace; score = |A ∩ B| / |A ∪ B| over token sets. Wildcard tokens
in a candidate (left behind by stripped placeholders) each absorb one
otherwise-unmatched message token, so runtime value substitution does not
depress the score of an otherwise exact template.

Ties at equal score break on act priority (terminal and golden-label acts
must not be shadowed by generic messages), then on declaration order.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..generator.maps import DialogActMap
from ..textnorm import tokenize, tokenize_candidate

UNMATCHED = "unmatched"
DIALOG_SUCCESS = "dialog_success_message"
INTENT_SUCCESS = "intent_success_message"

# Higher wins at equal score; foreign intent-success candidates rank below
# every own-map act so the benign interpretation is preferred on exact ties.
_PRIORITY = {
    DIALOG_SUCCESS: 5,
    INTENT_SUCCESS: 4,
    "request": 3,
    "confirm": 3,
    "say": 2,
    "foreign_intent_success": 1,
}


def act_priority(act: str, foreign: bool = False) -> int:
    if act == INTENT_SUCCESS and foreign:
        return _PRIORITY["foreign_intent_success"]
    if act in (DIALOG_SUCCESS, INTENT_SUCCESS):
        return _PRIORITY[act]
    if act.startswith("request_") or act.startswith("confirm_"):
        return _PRIORITY["request"]
    return _PRIORITY["say"]


@dataclass
class NLUMatch:
    act: str
    score: float
    matched_candidate: str
    bot_message: str
    dialog: str | None = None  # owner of the matched candidate

    def to_doc(self) -> dict:
        return {
            "act": self.act,
            "score": round(self.score, 6),
            "matched_candidate": self.matched_candidate,
            "bot_message": self.bot_message,
            "dialog": self.dialog,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "NLUMatch":
        return cls(
            act=doc["act"],
            score=doc["score"],
            matched_candidate=doc.get("matched_candidate", ""),
            bot_message=doc["bot_message"],
            dialog=doc.get("dialog"),
        )


def token_set_score(message_tokens: frozenset[str], candidate: str) -> float:
    """Jaccard similarity with wildcard absorption."""
    words, wildcards = tokenize_candidate(candidate)
    if not message_tokens and not words and not wildcards:
        return 0.0
    overlap = len(message_tokens & words)
    unmatched = len(message_tokens - words)
    absorbed = min(wildcards, unmatched)
    union = len(message_tokens | words) + (wildcards - absorbed)
    if union == 0:
        return 0.0
    return (overlap + absorbed) / union


def _iter_candidates(dact_map: DialogActMap):
    for candidate in dact_map.dialog_success_message:
        yield DIALOG_SUCCESS, candidate
    for candidate in dact_map.intent_success_message:
        yield INTENT_SUCCESS, candidate
    for act, candidates in dact_map.entries.items():
        for candidate in candidates:
            yield act, candidate


def match_dialog_act(bot_message: str, dact_map: DialogActMap, threshold: float = 0.85) -> NLUMatch:
    """Best-scoring act of one map, or ``unmatched`` below the threshold."""
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    tokens = frozenset(tokenize(bot_message))
    best_score = 0.0
    best_act: str | None = None
    best_candidate = ""
    for act, candidate in _iter_candidates(dact_map):
        score = token_set_score(tokens, candidate)
        if score > best_score or (
            score == best_score
            and best_act is not None
            and act_priority(act) > act_priority(best_act)
        ):
            best_score, best_act, best_candidate = score, act, candidate
    if best_act is None or best_score < threshold:
        return NLUMatch(UNMATCHED, best_score, best_candidate, bot_message, dact_map.dialog)
    return NLUMatch(best_act, best_score, best_candidate, bot_message, dact_map.dialog)


class MatchIndex:
    """Cross-dialog matcher for one simulated conversation.

    Matching is anchored on the goal dialog's aggregated map; the
    ``intent_success_message`` candidates of every *other* dialog join the
    pool so a misrouted conversation is recognized the moment a foreign
    dialog's golden label appears.
    """

    def __init__(self, maps: dict[str, DialogActMap]):
        self.maps = maps

    def match(self, bot_message: str, goal_dialog: str, threshold: float = 0.85) -> NLUMatch:
        if not 0 < threshold <= 1:
            raise ValueError(f"threshold must be in (0, 1], got {threshold}")
        own = self.maps[goal_dialog]
        tokens = frozenset(tokenize(bot_message))

        best: tuple[float, int] = (0.0, -1)
        best_match = NLUMatch(UNMATCHED, 0.0, "", bot_message, goal_dialog)

        def consider(act: str, candidate: str, dialog: str, foreign: bool):
            nonlocal best, best_match
            score = token_set_score(tokens, candidate)
            key = (score, act_priority(act, foreign=foreign))
            if key > best:
                best = key
                best_match = NLUMatch(act, score, candidate, bot_message, dialog)

        for act, candidate in _iter_candidates(own):
            consider(act, candidate, own.dialog, foreign=False)
        for dialog, other in self.maps.items():
            if dialog == goal_dialog:
                continue
            for candidate in other.intent_success_message:
                consider(INTENT_SUCCESS, candidate, dialog, foreign=True)

        if best[0] < threshold:
            return NLUMatch(UNMATCHED, best[0], best_match.matched_candidate, bot_message, goal_dialog)
        return best_match
