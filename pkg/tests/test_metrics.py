import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dialogforge.generator.goals import SimulationGoal
from dialogforge.remediator import (
    ConfusionMatrix,
    aggregate,
    bootstrap_ci,
    bootstrap_f1_ci,
    bootstrap_mean_ci,
    build_confusion,
    f1_for_label,
    intent_scores,
)
from dialogforge.simulator.episode import EpisodeRecord


def episode(dialog="A", outcome="success", predicted=None, goal_id="g") -> EpisodeRecord:
    return EpisodeRecord(
        goal_id=goal_id,
        goal=SimulationGoal(goal_id=goal_id, dialog=dialog, intent_query="q"),
        outcome=outcome,
        predicted_dialog=predicted,
    )


# ---------------------------------------------------------------------------
# aggregation


def test_all_success_rate_is_one():
    metrics = aggregate([episode(outcome="success", predicted="A") for _ in range(5)])
    assert metrics.completion_rate == 1.0
    assert metrics.totals["intent_error"] == 0


def test_mixed_outcome_arithmetic():
    episodes = (
        [episode(outcome="success", predicted="A") for _ in range(7)]
        + [episode(outcome="intent_error", predicted="B") for _ in range(2)]
        + [episode(outcome="ner_error", predicted="A")]
    )
    metrics = aggregate(episodes)
    assert metrics.completion_rate == 0.7
    assert metrics.totals["intent_error"] == 2
    assert metrics.totals["ner_error"] == 1


def test_aborted_excluded_from_rates_but_reported():
    episodes = [episode(outcome="success", predicted="A")] * 3 + [episode(outcome="aborted")]
    metrics = aggregate(episodes)
    assert metrics.totals["aborted"] == 1
    assert metrics.totals["non_aborted"] == 3
    assert metrics.completion_rate == 1.0


# ---------------------------------------------------------------------------
# confusion + scores


def test_confusion_rows_sum_to_episode_counts():
    episodes = (
        [episode("A", "success", "A")] * 4
        + [episode("A", "intent_error", "B")] * 2
        + [episode("B", "success", "B")] * 3
        + [episode("B", "other_error", None)]
    )
    confusion = build_confusion(episodes)
    assert confusion.labels == ["A", "B"]
    assert confusion.row_sums() == [6, 4]
    # fallback column catches the episode with no intent evidence
    assert confusion.matrix[1][confusion.fallback_column] == 1


def test_confusion_consistency_with_outcomes():
    episodes = (
        [episode("A", "success", "A")] * 5
        + [episode("A", "intent_error", "B")] * 3
        + [episode("B", "ner_error", "B")] * 2
        + [episode("B", "other_error", None)] * 2
    )
    confusion = build_confusion(episodes)
    metrics = aggregate(episodes)
    n = len(confusion.labels)
    off_diagonal = sum(
        confusion.matrix[i][j] for i in range(n) for j in range(n) if i != j
    )
    fallback = sum(confusion.matrix[i][confusion.fallback_column] for i in range(n))
    # named-dialog off-diagonal mass is exactly the intent_error count;
    # the fallback column holds the episodes with no intent evidence
    assert off_diagonal == metrics.totals["intent_error"]
    assert off_diagonal + fallback == metrics.totals["intent_error"] + 2


def test_diagonal_matrix_scores_one():
    confusion = ConfusionMatrix(labels=["A", "B"], matrix=[[5, 0, 0], [0, 7, 0]])
    scores = intent_scores(confusion)
    for label in ("A", "B"):
        assert scores[label]["precision"] == 1.0
        assert scores[label]["recall"] == 1.0
        assert scores[label]["f1"] == 1.0


def test_hand_computed_two_intent_matrix():
    # [[8,2],[3,7]]: P(A)=8/11, R(A)=0.8, F1(A)=2*(8/11*0.8)/(8/11+0.8)
    confusion = ConfusionMatrix(labels=["A", "B"], matrix=[[8, 2, 0], [3, 7, 0]])
    scores = intent_scores(confusion)
    assert scores["A"]["precision"] == pytest.approx(8 / 11)
    assert scores["A"]["recall"] == pytest.approx(0.8)
    expected_f1 = 2 * (8 / 11 * 0.8) / (8 / 11 + 0.8)
    assert scores["A"]["f1"] == pytest.approx(expected_f1, abs=1e-6)


def test_zero_support_zero_prediction_convention():
    confusion = ConfusionMatrix(labels=["A", "B"], matrix=[[5, 0, 0], [0, 0, 0]])
    scores = intent_scores(confusion)
    assert scores["B"] == {
        "precision": 0.0,
        "recall": 0.0,
        "f1": 0.0,
        "support": 0,
        "predicted": 0,
        "flagged": True,
    }


# ---------------------------------------------------------------------------
# bootstrap


def test_bootstrap_all_correct_is_degenerate():
    pairs = [("A", "A")] * 20
    point, low, high = bootstrap_ci(
        pairs, lambda s: f1_for_label(s, "A"), iterations=2000, seed=1
    )
    assert (point, low, high) == (1.0, 1.0, 1.0)


def test_bootstrap_single_item_collapses_to_point():
    point, low, high = bootstrap_mean_ci([0.4], iterations=500, seed=3)
    assert point == low == high == pytest.approx(0.4)


def test_bootstrap_requires_items():
    with pytest.raises(ValueError):
        bootstrap_ci([], lambda s: 0.0)


def test_vectorized_f1_matches_generic_bootstrap():
    rng = np.random.default_rng(7)
    pairs = [
        ("A" if rng.random() < 0.5 else "B", "A" if rng.random() < 0.6 else None)
        for _ in range(40)
    ]
    generic = bootstrap_ci(pairs, lambda s: f1_for_label(s, "A"), iterations=500, seed=21)
    fast = bootstrap_f1_ci(pairs, "A", iterations=500, seed=21)
    assert fast == pytest.approx(generic, abs=1e-12)


def test_ci_contains_point_for_simple_mean():
    values = [0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0]
    point, low, high = bootstrap_mean_ci(values, iterations=4000, seed=5)
    assert low <= point <= high


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_widening_level_never_narrows(seed):
    rng = np.random.default_rng(seed)
    values = rng.random(25).tolist()
    _, low90, high90 = bootstrap_mean_ci(values, iterations=400, level=0.90, seed=seed)
    _, low99, high99 = bootstrap_mean_ci(values, iterations=400, level=0.99, seed=seed)
    assert low99 <= low90
    assert high99 >= high90


def test_bootstrap_deterministic_under_seed():
    values = [0.2, 0.4, 0.9, 0.1, 0.5]
    first = bootstrap_mean_ci(values, iterations=300, seed=11)
    second = bootstrap_mean_ci(values, iterations=300, seed=11)
    assert first == second
