import pytest

from dialogforge.runtime import (
    FALLBACK_MESSAGE,
    BotRuntime,
    ErrorInjectionConfig,
    SessionClosed,
    extract_entity,
    train_intent_model,
)
from dialogforge.schema import EntityDefinition


@pytest.fixture()
def runtime(template_bot):
    model = train_intent_model(list(template_bot.intents), 0.02)
    return BotRuntime(template_bot, model, ErrorInjectionConfig())


# ---------------------------------------------------------------------------
# entity extraction


@pytest.mark.parametrize(
    "kind, text, expected",
    [
        ("email", "it is user7@example.com", "user7@example.com"),
        ("email", "no address here", None),
        ("number", "that would be 86213", "86213"),
        ("number", "none", None),
        ("alphanumeric_id", "sure, AB12CD34", "AB12CD34"),
        ("free_text", "  the screen flickers  ", "the screen flickers"),
        ("free_text", "   ", None),
    ],
)
def test_extraction_by_kind(kind, text, expected):
    entity = EntityDefinition(name="X", kind=kind)
    assert extract_entity(entity, text) == expected


def test_enumeration_extraction_case_insensitive():
    entity = EntityDefinition(
        name="ProductLine", kind="enumeration", values=("Starter", "Professional")
    )
    assert extract_entity(entity, "it is professional") == "Professional"
    assert extract_entity(entity, "something else") is None


# ---------------------------------------------------------------------------
# session stepping


def test_clean_conversation_reaches_success(runtime):
    session = runtime.start_session()
    messages, closed = runtime.step_session(session.session_id, "where is my order")
    assert messages[0] == "I can look up your order status."
    assert not closed
    messages, closed = runtime.step_session(session.session_id, "it is AB12CD99")
    assert "Order AB12CD99 is on its way." in messages
    assert "Goodbye and have a great day!" in messages
    assert closed


def test_unknown_query_gets_fallback_and_stays_open(runtime):
    session = runtime.start_session()
    messages, closed = runtime.step_session(session.session_id, "zzz qqq xxx")
    assert messages == [FALLBACK_MESSAGE]
    assert not closed
    messages, _ = runtime.step_session(session.session_id, "where is my order")
    assert messages[0] == "I can look up your order status."


def test_confirm_step_requires_affirmation(template_bot):
    model = train_intent_model(list(template_bot.intents), 0.02)
    runtime = BotRuntime(template_bot, model, ErrorInjectionConfig())
    session = runtime.start_session()
    runtime.step_session(session.session_id, "connect me with sales")
    runtime.step_session(session.session_id, "it is Professional")
    messages, _ = runtime.step_session(session.session_id, "user3@example.com")
    assert messages == ["Is user3@example.com the correct email address?"]
    messages, closed = runtime.step_session(session.session_id, "hmm not sure")
    assert messages == ["Is user3@example.com the correct email address?"]
    assert not closed
    messages, closed = runtime.step_session(session.session_id, "yes")
    assert closed
    assert "Goodbye and have a great day!" in messages


def test_forced_injection_re_requests_forever(runtime, template_bot):
    model = train_intent_model(list(template_bot.intents), 0.02)
    injected = BotRuntime(
        template_bot,
        model,
        ErrorInjectionConfig(ner_miss_probability={"OrderNumber": 1.0}),
    )
    session = injected.start_session()
    injected.step_session(session.session_id, "where is my order")
    for _ in range(3):
        messages, closed = injected.step_session(session.session_id, "it is AB12CD99")
        assert messages == ["Please provide your order number."]
        assert not closed
    assert len(injected.injection_log) == 3


def test_injection_rate_calibration(template_bot):
    # drive only the Collect step; per-attempt miss rate must track p
    model = train_intent_model(list(template_bot.intents), 0.02)
    injected = BotRuntime(
        template_bot,
        model,
        ErrorInjectionConfig(ner_miss_probability={"OrderNumber": 0.3}, seed=11),
    )
    attempts = 0
    for i in range(500):
        session = injected.start_session(hint=f"episode-{i}")
        injected.step_session(session.session_id, "where is my order")
        injected.step_session(session.session_id, "it is AB12CD99")
        attempts += 1
        injected.end_session(session.session_id)
    observed = len(injected.injection_log) / attempts
    assert abs(observed - 0.3) <= 0.05


def test_sessions_are_isolated(runtime):
    one = runtime.start_session()
    two = runtime.start_session()
    runtime.step_session(one.session_id, "where is my order")
    runtime.step_session(two.session_id, "connect me with sales")
    messages, _ = runtime.step_session(one.session_id, "it is AB12CD99")
    assert "Order AB12CD99 is on its way." in messages
    messages, _ = runtime.step_session(two.session_id, "it is Starter")
    assert messages == ["May I get your email?"]


def test_closed_session_raises(runtime):
    session = runtime.start_session()
    runtime.step_session(session.session_id, "end the chat")
    with pytest.raises(SessionClosed):
        runtime.step_session(session.session_id, "hello?")
    runtime.end_session(session.session_id)
    with pytest.raises(SessionClosed):
        runtime.step_session(session.session_id, "hello?")


def test_hint_seeding_is_order_independent(template_bot):
    model = train_intent_model(list(template_bot.intents), 0.02)

    def run(hints):
        runtime = BotRuntime(
            template_bot,
            model,
            ErrorInjectionConfig(ner_miss_probability={"OrderNumber": 0.5}, seed=2),
        )
        outcomes = {}
        for hint in hints:
            session = runtime.start_session(hint=hint)
            runtime.step_session(session.session_id, "where is my order")
            messages, _ = runtime.step_session(session.session_id, "it is AB12CD99")
            outcomes[hint] = messages[0]
        return outcomes

    hints = [f"g-{i}" for i in range(20)]
    assert run(hints) == run(list(reversed(hints)))
