import pytest

from dialogforge.generator import generate_goals, pools_from_training
from dialogforge.runtime import (
    BotRuntime,
    ErrorInjectionConfig,
    InProcessClient,
    train_intent_model,
)
from dialogforge.simulator import (
    ChatClientInterface,
    EpisodeRecord,
    ResponseTemplateSet,
    SimulatorConfig,
    TransportError,
    run_episode,
    run_simulation,
)

from conftest import revised_pipeline_maps


def setup_mini(mini_bot, injection=None, confidence_threshold=0.02):
    maps, ontology = revised_pipeline_maps(mini_bot)
    goals = generate_goals(maps, ontology, pools_from_training(mini_bot), None, seed=7)
    model = train_intent_model(list(mini_bot.intents), confidence_threshold)
    runtime = BotRuntime(mini_bot, model, injection or ErrorInjectionConfig())
    return maps, goals, runtime, InProcessClient(runtime)


def test_perfect_runtime_reaches_success(mini_bot):
    maps, goals, runtime, client = setup_mini(mini_bot)
    templates = ResponseTemplateSet.bundled()
    record = run_episode(goals[0], maps, templates, client, SimulatorConfig())
    assert record.outcome == "success"
    assert record.predicted_dialog == "Check_Order"
    assert record.informed == goals[0].inform_slots
    assert record.error_turn is None
    assert record.turns[0].user_utterance == goals[0].intent_query


def test_forced_misclassification_is_intent_error(template_bot):
    maps, ontology = revised_pipeline_maps(template_bot)
    goals = [
        g
        for g in generate_goals(
            maps, ontology, pools_from_training(template_bot), 5, seed=7
        )
        if g.dialog == "Check_Order_Status"
    ]
    model = train_intent_model(list(template_bot.intents), 0.02)
    injection = ErrorInjectionConfig(forced_intent_map={goals[0].intent_query: "EC"})
    runtime = BotRuntime(template_bot, model, injection)
    client = InProcessClient(runtime)
    config = SimulatorConfig(dialog_to_intent={i.entry_dialog: i.name for i in template_bot.intents})
    record = run_episode(goals[0], maps, ResponseTemplateSet.bundled(), client, config)
    assert record.outcome == "intent_error"
    assert record.predicted_dialog == "End_Conversation"
    assert record.predicted_intent == "EC"
    assert record.error_turn is not None


def test_max_turns_bound(mini_bot):
    injection = ErrorInjectionConfig(ner_miss_probability={"OrderNumber": 1.0})
    maps, goals, runtime, client = setup_mini(mini_bot, injection)
    # with the slot re-requested forever, a 1-turn budget must trip the bound
    record = run_episode(
        goals[0], maps, ResponseTemplateSet.bundled(), client, SimulatorConfig(max_turns=1)
    )
    assert record.outcome == "max_turns_exceeded"
    assert len(record.turns) <= 2  # opening + one bot turn


def test_injected_miss_is_ner_error(mini_bot):
    injection = ErrorInjectionConfig(ner_miss_probability={"OrderNumber": 1.0})
    maps, goals, runtime, client = setup_mini(mini_bot, injection)
    record = run_episode(goals[0], maps, ResponseTemplateSet.bundled(), client, SimulatorConfig())
    assert record.outcome == "ner_error"
    assert record.error_turn is not None


class ExplodingClient(ChatClientInterface):
    def start_session(self, hint=None):
        return "s-1"

    def send(self, session_id, text):
        raise TransportError("connection refused")

    def end(self, session_id):
        pass


def test_transport_failure_marks_aborted(mini_bot):
    maps, goals, runtime, client = setup_mini(mini_bot)
    record = run_episode(
        goals[0], maps, ResponseTemplateSet.bundled(), ExplodingClient(), SimulatorConfig()
    )
    assert record.outcome == "aborted"
    assert "connection refused" in record.error_detail


def test_run_simulation_empty_goals(mini_bot):
    maps, goals, runtime, client = setup_mini(mini_bot)
    assert run_simulation([], maps, ResponseTemplateSet.bundled(), client) == []


def test_parallelism_does_not_change_records(mini_bot):
    maps, goals, _, _ = setup_mini(mini_bot)
    templates = ResponseTemplateSet.bundled()

    def fresh_client():
        model = train_intent_model(list(mini_bot.intents), 0.02)
        return InProcessClient(BotRuntime(mini_bot, model, ErrorInjectionConfig(seed=5)))

    serial = run_simulation(goals, maps, templates, fresh_client(), SimulatorConfig(), 1)
    threaded = run_simulation(goals, maps, templates, fresh_client(), SimulatorConfig(), 8)
    assert [r.goal_id for r in serial] == [g.goal_id for g in goals]
    assert [r.to_doc() for r in serial] == [r.to_doc() for r in threaded]


def test_replay_determinism(mini_bot):
    maps, goals, _, _ = setup_mini(mini_bot)
    templates = ResponseTemplateSet.bundled()

    def one_run():
        model = train_intent_model(list(mini_bot.intents), 0.02)
        client = InProcessClient(BotRuntime(mini_bot, model, ErrorInjectionConfig(seed=3)))
        return [
            run_episode(g, maps, templates, client, SimulatorConfig(nlg_seed=11)).to_doc()
            for g in goals
        ]

    assert one_run() == one_run()


def test_episode_terminates_within_turn_budget(mini_bot):
    injection = ErrorInjectionConfig(ner_miss_probability={"OrderNumber": 1.0})
    maps, goals, runtime, client = setup_mini(mini_bot, injection)

    counting = {"sends": 0}

    class CountingClient(InProcessClient):
        def send(self, session_id, text):
            counting["sends"] += 1
            return super().send(session_id, text)

    config = SimulatorConfig(max_turns=6)
    record = run_episode(
        goals[0], maps, ResponseTemplateSet.bundled(), CountingClient(runtime), config
    )
    assert record.outcome in ("ner_error", "max_turns_exceeded")
    assert counting["sends"] <= config.max_turns + 1


def test_record_round_trip(mini_bot):
    maps, goals, runtime, client = setup_mini(mini_bot)
    record = run_episode(goals[0], maps, ResponseTemplateSet.bundled(), client, SimulatorConfig())
    doc = record.to_doc()
    assert EpisodeRecord.from_doc(doc).to_doc() == doc
    assert doc["schema_version"] == 1


def test_outcome_partition(mini_bot):
    maps, goals, runtime, client = setup_mini(mini_bot)
    records = run_simulation(goals, maps, ResponseTemplateSet.bundled(), client)
    for record in records:
        assert record.outcome in (
            "success",
            "intent_error",
            "ner_error",
            "other_error",
            "max_turns_exceeded",
        )
        if record.outcome != "success":
            assert record.error_turn is not None
            assert record.error_turn <= record.turns[-1].turn
