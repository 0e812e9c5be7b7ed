from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # oracles helper module

from dialogforge.generator import (
    ConversationGraph,
    RevisionDocument,
    aggregate_map,
    apply_revisions,
    build_graph,
    extract_ontology,
    infer_success_acts,
)
from dialogforge.schema import decode_bot_definition, load_bot_definition

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def template_bot_path() -> Path:
    return FIXTURES / "template_bot.json"


@pytest.fixture(scope="session")
def template_bot(template_bot_path):
    return load_bot_definition(template_bot_path)


@pytest.fixture(scope="session")
def eval_utterances_path() -> Path:
    return FIXTURES / "template_bot_eval_utterances.json"


def mini_bot_doc() -> dict:
    """Two-dialog order-status bot used all over the unit tests."""
    return {
        "schema_version": 1,
        "name": "mini",
        "dialogs": [
            {
                "name": "Check_Order",
                "steps": [
                    {"text": "I can look up your order status.", "action": "Say"},
                    {
                        "text": "Please provide your order number.",
                        "action": "Collect",
                        "slot": "OrderNumber",
                        "entity_type": "OrderNumber",
                    },
                    {"text": "Order {OrderNumber} is on its way.", "action": "Say"},
                ],
                "transitions": [{"target": "End_Chat", "condition": "on_success"}],
            },
            {
                "name": "End_Chat",
                "steps": [
                    {"text": "Your request is complete.", "action": "Say"},
                    {"text": "Goodbye and have a great day!", "action": "Say"},
                ],
                "transitions": [],
            },
        ],
        "intents": [
            {
                "name": "CO",
                "entry_dialog": "Check_Order",
                "training_utterances": [
                    "where is my order",
                    "check my order status",
                    "track my order",
                ],
            }
        ],
        "entities": [{"name": "OrderNumber", "kind": "alphanumeric_id"}],
        "success_dialogs": ["End_Chat"],
    }


@pytest.fixture()
def mini_bot():
    return load_bot_definition(json.dumps(mini_bot_doc()).encode())


def chain_bot_doc() -> dict:
    """A(request Email) -> B(request CaseNumber) -> End_Chat."""
    return {
        "schema_version": 1,
        "name": "chain",
        "dialogs": [
            {
                "name": "A",
                "steps": [
                    {"text": "Welcome to support.", "action": "Say"},
                    {
                        "text": "May I get your email?",
                        "action": "Collect",
                        "slot": "Email",
                        "entity_type": "Email",
                    },
                ],
                "transitions": [{"target": "B", "condition": "on_success"}],
            },
            {
                "name": "B",
                "steps": [
                    {
                        "text": "What is your case number?",
                        "action": "Collect",
                        "slot": "CaseNumber",
                        "entity_type": "CaseNumber",
                    },
                ],
                "transitions": [{"target": "End_Chat", "condition": "on_success"}],
            },
            {
                "name": "End_Chat",
                "steps": [{"text": "Bye for now.", "action": "Say"}],
                "transitions": [],
            },
        ],
        "intents": [
            {"name": "help", "entry_dialog": "A", "training_utterances": ["help me"]}
        ],
        "entities": [
            {"name": "Email", "kind": "email"},
            {"name": "CaseNumber", "kind": "number"},
        ],
        "success_dialogs": ["End_Chat"],
    }


@pytest.fixture()
def chain_bot():
    return load_bot_definition(json.dumps(chain_bot_doc()).encode())


def graph_from_edges(edges: list[tuple[str, str]], vertices=None) -> ConversationGraph:
    """Bare graph (empty local maps) for path/aggregation tests."""
    from dialogforge.generator.maps import DialogActMap

    names = list(vertices) if vertices else []
    for a, b in edges:
        for v in (a, b):
            if v not in names:
                names.append(v)
    return ConversationGraph(
        vertices={v: DialogActMap(dialog=v) for v in names},
        edges=[(a, b, "always") for a, b in edges],
    )


def revised_pipeline_maps(definition):
    """Aggregated + success-act-inferred + revision-confirmed maps and ontology."""
    graph = build_graph(definition)
    maps = {}
    for intent in definition.intents:
        dialog = intent.entry_dialog
        if dialog in maps:
            continue
        aggregated = aggregate_map(graph, dialog, list(definition.success_dialogs))
        intent_success, dialog_success = infer_success_acts(
            definition.dialog(dialog), graph, list(definition.success_dialogs)
        )
        aggregated.intent_success_message = intent_success
        aggregated.dialog_success_message = dialog_success
        maps[dialog] = aggregated
    ontology = extract_ontology(definition, maps, seed=7)
    for dialog in maps:
        maps[dialog], ontology = apply_revisions(maps[dialog], ontology, RevisionDocument())
    return maps, ontology
