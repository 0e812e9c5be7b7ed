import pytest

from dialogforge.generator.goals import SimulationGoal
from dialogforge.remediator import (
    NotAnError,
    backtrack_root_cause,
    group_intent_errors,
    suggest,
)
from dialogforge.remediator.rootcause import (
    CATEGORY_INTENT,
    CATEGORY_NER,
    CATEGORY_UNMAPPED,
    IntentErrorGroup,
    SUGGEST_AUGMENT,
    SUGGEST_MOVE,
)
from dialogforge.simulator.agenda import UserDialogAct
from dialogforge.simulator.episode import EpisodeRecord, TurnRecord
from dialogforge.simulator.nlu import NLUMatch


def turn(n, matches=(), user_acts=(), utterance=None):
    return TurnRecord(
        turn=n,
        bot_messages=[m.bot_message for m in matches],
        matches=list(matches),
        user_acts=list(user_acts),
        user_utterance=utterance,
        agenda_after=["report_success"],
    )


def match(act, dialog="Home", message="msg"):
    return NLUMatch(act=act, score=1.0, matched_candidate=message, bot_message=message, dialog=dialog)


def record(outcome, turns, predicted=None, origin=None, goal_id="g-1", query="check it"):
    return EpisodeRecord(
        goal_id=goal_id,
        goal=SimulationGoal(
            goal_id=goal_id,
            dialog="Home",
            intent_query=query,
            inform_slots={"Email": "u@example.com"},
            origin_utterance=origin,
        ),
        outcome=outcome,
        turns=turns,
        predicted_dialog=predicted,
    )


def test_intent_error_backtracks_to_foreign_label_turn():
    episode = record(
        "intent_error",
        [
            turn(0, utterance="check it"),
            turn(1, [match("intent_success_message", dialog="Sales")]),
        ],
        predicted="Sales",
    )
    error_turn, category, explanation = backtrack_root_cause(episode)
    assert (error_turn, category) == (1, CATEGORY_INTENT)
    assert "Sales" in explanation


def test_ner_error_backtracks_to_repeated_request():
    episode = record(
        "ner_error",
        [
            turn(0, utterance="check it"),
            turn(
                1,
                [match("request_Email")],
                [UserDialogAct(kind="inform_slot", slot="Email", value="u@example.com")],
            ),
            turn(2, [match("request_Email")]),
        ],
        predicted="Home",
    )
    error_turn, category, explanation = backtrack_root_cause(episode)
    assert (error_turn, category) == (2, CATEGORY_NER)
    assert "Email" in explanation


def test_unmatched_fallback_is_unmapped_message():
    episode = record(
        "other_error",
        [
            turn(0, utterance="check it"),
            turn(1, [match("unmatched", message="Sorry, I didn't understand that.")]),
        ],
    )
    error_turn, category, explanation = backtrack_root_cause(episode)
    assert (error_turn, category) == (1, CATEGORY_UNMAPPED)
    assert "Sorry, I didn't understand that." in explanation


def test_success_episode_raises_not_an_error():
    episode = record("success", [turn(0)], predicted="Home")
    with pytest.raises(NotAnError):
        backtrack_root_cause(episode)


# ---------------------------------------------------------------------------
# grouping


def failing(origin, goal_id, predicted="Sales", outcome="intent_error"):
    return record(
        outcome,
        [turn(0), turn(1, [match("intent_success_message", dialog=predicted)])],
        predicted=predicted,
        origin=origin,
        goal_id=goal_id,
    )


def test_no_errors_no_groups():
    success = record("success", [turn(0)], predicted="Home")
    assert group_intent_errors([success]) == []


def test_groups_sorted_by_count_then_lexicographic():
    episodes = (
        [failing("beta origin", f"g-b{i}") for i in range(5)]
        + [failing("alpha origin", f"g-a{i}") for i in range(2)]
        + [failing("zeta origin", f"g-z{i}") for i in range(2)]
    )
    groups = group_intent_errors(episodes)
    assert [g.origin_utterance for g in groups] == ["beta origin", "alpha origin", "zeta origin"]
    assert [g.error_count for g in groups] == [5, 2, 2]


def test_ner_failures_are_not_intent_failures():
    ner = record("ner_error", [turn(0)], predicted="Home", origin="o")
    assert group_intent_errors([ner]) == []


def test_fallback_failures_group_with_fallback_label():
    episodes = [
        record("other_error", [turn(0), turn(1, [match("unmatched")])], origin="o", goal_id=f"g{i}")
        for i in range(3)
    ]
    groups = group_intent_errors(episodes)
    assert len(groups) == 1
    assert groups[0].confusions == {"(fallback)": 3}


# ---------------------------------------------------------------------------
# suggestions


def group(confusions, count=None, origin="some origin"):
    total = count if count is not None else sum(confusions.values())
    return IntentErrorGroup(
        dialog="Home",
        origin_utterance=origin,
        error_count=total,
        confusions=confusions,
        episode_ids=[f"g{i}" for i in range(total)],
        failing_queries=[f"query {i}" for i in range(total)],
    )


def test_unanimous_confusion_suggests_move():
    suggestions = suggest([group({"EC": 10})])
    assert suggestions[0].kind == SUGGEST_MOVE
    assert suggestions[0].target_intent == "EC"


def test_all_fallback_suggests_augmentation():
    suggestions = suggest([group({"(fallback)": 6})])
    assert suggestions[0].kind == SUGGEST_AUGMENT
    assert "out-of-domain" in suggestions[0].rationale


def test_mixed_split_suggests_augmentation_with_mixed_rationale():
    suggestions = suggest([group({"EC": 4, "CS": 3, "(fallback)": 3})])
    assert suggestions[0].kind == SUGGEST_AUGMENT
    assert "scatter" in suggestions[0].rationale


def test_move_threshold_is_strict_majority():
    # exactly 50% must NOT trigger a move
    suggestions = suggest([group({"EC": 5, "(fallback)": 5})])
    assert suggestions[0].kind == SUGGEST_AUGMENT


def test_move_suggestions_back_their_threshold():
    suggestions = suggest([group({"EC": 7, "CS": 3})])
    suggestion = suggestions[0]
    assert suggestion.kind == SUGGEST_MOVE
    share = suggestion.evidence["confusions"][suggestion.target_intent] / suggestion.evidence["error_count"]
    assert share > 0.5
