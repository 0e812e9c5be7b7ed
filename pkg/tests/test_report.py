import pytest

from dialogforge.generator import build_graph, generate_goals, pools_from_training
from dialogforge.jsonio import dumps
from dialogforge.remediator import compose_report
from dialogforge.remediator.report import build_ner_remediation, render_report
from dialogforge.remediator.metrics import aggregate
from dialogforge.runtime import (
    BotRuntime,
    ErrorInjectionConfig,
    InProcessClient,
    train_intent_model,
)
from dialogforge.simulator import ResponseTemplateSet, SimulatorConfig, run_simulation

from conftest import revised_pipeline_maps


@pytest.fixture(scope="module")
def mini_episodes(request):
    import json

    from conftest import mini_bot_doc
    from dialogforge.schema import load_bot_definition

    definition = load_bot_definition(json.dumps(mini_bot_doc()).encode())
    maps, ontology = revised_pipeline_maps(definition)
    goals = generate_goals(maps, ontology, pools_from_training(definition), None, seed=7)
    model = train_intent_model(list(definition.intents), 0.02)
    runtime = BotRuntime(
        definition, model, ErrorInjectionConfig(ner_miss_probability={"OrderNumber": 0.5}, seed=4)
    )
    episodes = run_simulation(
        goals, maps, ResponseTemplateSet.bundled(), InProcessClient(runtime), SimulatorConfig()
    )
    graph_doc = build_graph(definition).to_doc()
    return definition, episodes, graph_doc


def test_report_sections_and_order(mini_episodes):
    definition, episodes, graph_doc = mini_episodes
    report = compose_report(
        episodes,
        label_map={"Check_Order": "CO"},
        graph_doc=graph_doc,
        success_dialogs=["End_Chat"],
        iterations=200,
    )
    assert list(report.keys()) == [
        "schema_version",
        "history",
        "summary",
        "dialogs",
        "intent_remediation",
        "ner_remediation",
        "analytics",
        "paths",
    ]
    assert report["summary"]["episodes"] == len(episodes)
    assert report["dialogs"]["Check_Order"]["intent_label"] == "CO"
    assert report["analytics"]["confusion_matrix"]["labels"] == ["CO"]


def test_empty_history_section_is_empty(mini_episodes):
    _, episodes, _ = mini_episodes
    report = compose_report(episodes, iterations=100)
    assert report["history"] == []


def test_history_deltas_computed(mini_episodes):
    _, episodes, _ = mini_episodes
    history = [
        {"name": "run-1", "completion_rate": 0.5, "macro_f1": 0.8},
        {"name": "run-2", "completion_rate": 0.75, "macro_f1": 0.9},
    ]
    report = compose_report(episodes, history=history, iterations=100)
    first, second = report["history"]
    assert first["completion_rate_delta"] is None
    assert second["completion_rate_delta"] == pytest.approx(0.25)
    assert second["macro_f1_delta"] == pytest.approx(0.1)


def test_report_is_byte_deterministic(mini_episodes):
    definition, episodes, graph_doc = mini_episodes
    kwargs = dict(
        label_map={"Check_Order": "CO"},
        graph_doc=graph_doc,
        success_dialogs=["End_Chat"],
        iterations=500,
        seed=13,
    )
    first = dumps(compose_report(episodes, **kwargs))
    second = dumps(compose_report(episodes, **kwargs))
    assert first == second


def test_ner_remediation_lists_failing_values(mini_episodes):
    _, episodes, _ = mini_episodes
    ner_section = build_ner_remediation(episodes)
    ner_outcomes = [e for e in episodes if e.outcome == "ner_error"]
    assert ner_outcomes, "fixture run should include injected NER misses"
    assert len(ner_section) == 1
    entry = ner_section[0]
    assert entry["entity"] == "OrderNumber"
    assert entry["error_count"] == len(ner_outcomes)
    for episode in ner_outcomes:
        assert episode.goal.inform_slots["OrderNumber"] in entry["failing_values"]


def test_ner_counts_match_metrics(mini_episodes):
    _, episodes, _ = mini_episodes
    metrics = aggregate(episodes)
    ner_section = build_ner_remediation(episodes)
    assert sum(e["error_count"] for e in ner_section) == metrics.totals["ner_error"]


def test_intent_ci_invariants(mini_episodes):
    _, episodes, _ = mini_episodes
    report = compose_report(episodes, iterations=500)
    for scores in report["dialogs"].values():
        for key in ("precision", "recall", "f1"):
            section = scores["intent_scores"][key]
            assert 0.0 <= section["ci_low"] <= section["point"] <= section["ci_high"] <= 1.0


def test_paths_section_lists_success_routes(mini_episodes):
    definition, episodes, graph_doc = mini_episodes
    report = compose_report(
        episodes, graph_doc=graph_doc, success_dialogs=["End_Chat"], iterations=100
    )
    assert report["paths"]
    entry = report["paths"][0]
    assert entry["source"] == "Check_Order"
    assert entry["target"] == "End_Chat"
    assert entry["paths"] == [{"vertices": ["Check_Order", "End_Chat"], "length": 1}]


def test_render_report_accepts_prebuilt_sections():
    metrics = aggregate([])
    report = render_report(metrics, {}, [], [], [])
    assert report["summary"]["episodes"] == 0
    assert report["intent_remediation"] == []
