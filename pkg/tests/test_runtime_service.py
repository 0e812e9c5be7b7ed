import threading

import pytest

from dialogforge.generator import generate_goals, pools_from_training
from dialogforge.runtime import (
    BotRuntime,
    EmbeddedServer,
    ErrorInjectionConfig,
    InProcessClient,
    train_intent_model,
)
from dialogforge.simulator import (
    HttpChatClient,
    ResponseTemplateSet,
    SimulatorConfig,
    TransportError,
    run_episode,
)

from conftest import revised_pipeline_maps


def make_runtime(definition, seed=0):
    model = train_intent_model(list(definition.intents), 0.02)
    return BotRuntime(definition, model, ErrorInjectionConfig(seed=seed))


@pytest.fixture(scope="module")
def server(request):
    import json

    from conftest import mini_bot_doc
    from dialogforge.schema import load_bot_definition

    definition = load_bot_definition(json.dumps(mini_bot_doc()).encode())
    runtime = make_runtime(definition)
    with EmbeddedServer(runtime) as embedded:
        yield embedded, definition


def transcript(client, opening, replies):
    """Drive a fixed user script, returning every bot message in order."""
    session = client.start_session(hint="script")
    log = []
    messages, closed = client.send(session, opening)
    log.extend(messages)
    for reply in replies:
        if closed:
            break
        messages, closed = client.send(session, reply)
        log.extend(messages)
    client.end(session)
    return log


def test_http_roundtrip_matches_in_process_byte_for_byte(server, mini_bot):
    embedded, definition = server
    http = HttpChatClient(embedded.base_url)
    local = InProcessClient(make_runtime(mini_bot))
    script = ("where is my order", ["it is AB12CD34"])
    assert transcript(http, script[0], script[1]) == transcript(local, script[0], script[1])
    http.close()


def test_concurrent_sessions_do_not_leak_state(server):
    embedded, _ = server
    results: dict[int, list[str]] = {}

    def worker(index: int):
        client = HttpChatClient(embedded.base_url)
        sid = client.start_session(hint=f"w{index}")
        client.send(sid, "where is my order")
        messages, _ = client.send(sid, f"it is ZZ{index:02d}XY99")
        results[index] = messages
        client.end(sid)
        client.close()

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for index, messages in results.items():
        assert f"Order ZZ{index:02d}XY99 is on its way." in messages[0]


def test_server_shutdown_mid_episode_aborts(mini_bot):
    runtime = make_runtime(mini_bot)
    embedded = EmbeddedServer(runtime).start()
    client = HttpChatClient(embedded.base_url, timeout=2.0)
    maps, ontology = revised_pipeline_maps(mini_bot)
    goals = generate_goals(maps, ontology, pools_from_training(mini_bot), 1, seed=1)

    class KillingClient(HttpChatClient):
        def send(self, session_id, text):
            if text != goals[0].intent_query:
                embedded.stop()  # yank the server between turns
            return super().send(session_id, text)

    killer = KillingClient(embedded.base_url, timeout=2.0)
    record = run_episode(goals[0], maps, ResponseTemplateSet.bundled(), killer, SimulatorConfig())
    assert record.outcome == "aborted"
    killer.close()
    client.close()


def test_stats_endpoint_reports_injections(mini_bot):
    model = train_intent_model(list(mini_bot.intents), 0.02)
    runtime = BotRuntime(
        mini_bot, model, ErrorInjectionConfig(ner_miss_probability={"OrderNumber": 1.0})
    )
    with EmbeddedServer(runtime) as embedded:
        client = HttpChatClient(embedded.base_url)
        sid = client.start_session()
        client.send(sid, "where is my order")
        client.send(sid, "it is AB12CD34")
        import httpx

        stats = httpx.get(f"{embedded.base_url}/v1/stats").json()
        assert stats["injections"]["total"] == 1
        assert stats["injections"]["by_entity"] == {"OrderNumber": 1}
        client.close()


def test_message_to_dead_session_is_404(server):
    embedded, _ = server
    import httpx

    response = httpx.post(
        f"{embedded.base_url}/v1/sessions/s-999999/messages", json={"text": "hi"}
    )
    assert response.status_code == 404
