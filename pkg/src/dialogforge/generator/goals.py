"""Simulation goals: the test cases driven through the bot.

A goal pairs an intent query (an original utterance or one of its
paraphrases) with the slot constraints the user will satisfy during the
conversation, one value per ``request_<Entity>`` act of the target
dialog's aggregated map, sampled from the ontology.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..errors import DialogForgeError
from ..schema import BotDefinition
from .maps import DialogActMap
from .ontology import Ontology
from .paraphrase import ParaphraseSet


class UnrevisedMapError(DialogForgeError):
    """Goals may only be generated from human-reviewed dialog-act maps."""

    code = "unrevised_map"


@dataclass
class QueryPool:
    """Per-intent supply of candidate intent queries."""

    intent: str
    dialog: str
    items: list[tuple[str, str | None]]  # (query, origin utterance or None)


@dataclass
class SimulationGoal:
    goal_id: str
    dialog: str
    intent_query: str
    inform_slots: dict[str, str] = field(default_factory=dict)
    request_slots: list[str] = field(default_factory=list)
    origin_utterance: str | None = None

    def to_doc(self) -> dict:
        return {
            "goal_id": self.goal_id,
            "dialog": self.dialog,
            "intent_query": self.intent_query,
            "inform_slots": self.inform_slots,
            "request_slots": self.request_slots,
            "origin_utterance": self.origin_utterance,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SimulationGoal":
        return cls(
            goal_id=doc["goal_id"],
            dialog=doc["dialog"],
            intent_query=doc["intent_query"],
            inform_slots=dict(doc.get("inform_slots", {})),
            request_slots=list(doc.get("request_slots", [])),
            origin_utterance=doc.get("origin_utterance"),
        )


def pools_from_training(definition: BotDefinition) -> list[QueryPool]:
    """One pool per intent drawn straight from its training utterances."""
    return [
        QueryPool(
            intent=intent.name,
            dialog=intent.entry_dialog,
            items=[(utterance, None) for utterance in intent.training_utterances],
        )
        for intent in definition.intents
    ]


def pools_from_paraphrases(definition: BotDefinition, pset: ParaphraseSet) -> list[QueryPool]:
    """One pool per intent, queries taken from the paraphrase set."""
    pools = []
    for intent in definition.intents:
        items: list[tuple[str, str | None]] = []
        for origin, paraphrases in pset.intents.get(intent.name, {}).items():
            items.extend((paraphrase, origin) for paraphrase in paraphrases)
        pools.append(QueryPool(intent=intent.name, dialog=intent.entry_dialog, items=items))
    return pools


def generate_goals(
    maps: dict[str, DialogActMap],
    ontology: Ontology,
    pools: list[QueryPool],
    per_intent_cap: int | None = None,
    seed: int = 0,
) -> list[SimulationGoal]:
    """One goal per selected query, slot values sampled from the ontology.

    Selection and slot sampling are seeded per intent and per goal, so the
    output is reproducible and independent of pool processing order.
    """
    goals: list[SimulationGoal] = []
    for pool in pools:
        dact_map = maps.get(pool.dialog)
        if dact_map is None:
            raise KeyError(f"no aggregated map for dialog {pool.dialog!r}")
        if not dact_map.revised:
            raise UnrevisedMapError(
                f"dialog-act map for {pool.dialog!r} has not been reviewed",
                dialog=pool.dialog,
            )
        request_entities = [
            act[len("request_") :] for act in dact_map.entries if act.startswith("request_")
        ]

        items = pool.items
        if per_intent_cap is not None and len(items) > per_intent_cap:
            rng = random.Random(f"{seed}:select:{pool.intent}")
            items = rng.sample(items, per_intent_cap)

        for index, (query, origin) in enumerate(items):
            goal_id = f"g-{pool.intent}-{index:04d}"
            slot_rng = random.Random(f"{seed}:slots:{goal_id}")
            inform = {
                entity: slot_rng.choice(ontology.values(pool.dialog, entity))
                for entity in request_entities
            }
            goals.append(
                SimulationGoal(
                    goal_id=goal_id,
                    dialog=pool.dialog,
                    intent_query=query,
                    inform_slots=inform,
                    origin_utterance=origin,
                )
            )
    return goals
