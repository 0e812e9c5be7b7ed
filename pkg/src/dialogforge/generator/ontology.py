"""Entity ontology extraction.

For every ``request_<Entity>`` act in a dialog's aggregated map the entity
receives a list of candidate values, generated deterministically from the
seed according to the entity kind. Generated values are fake by
construction (no real customer data); users replace them through the
revision step when they want to exercise a real NER model.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field

from ..errors import DialogForgeError
from ..schema import BotDefinition, EntityDefinition

_ID_ALPHABET = string.ascii_uppercase + string.digits
_FREE_TEXT_HEADS = ["broken", "missing", "delayed", "damaged", "incorrect", "flickering"]
_FREE_TEXT_TAILS = ["screen", "package", "invoice", "charger", "manual", "login"]


class MissingOntologyValue(DialogForgeError):
    """A request act has no candidate values to draw from."""

    code = "missing_ontology_value"


@dataclass
class OntologyConfig:
    values_per_entity: int = 5
    number_range: tuple[int, int] = (1000, 999999)
    id_length: int = 8


@dataclass
class Ontology:
    seed: int
    dialogs: dict[str, dict[str, list[str]]] = field(default_factory=dict)

    def values(self, dialog: str, entity: str) -> list[str]:
        found = self.dialogs.get(dialog, {}).get(entity, [])
        if not found:
            raise MissingOntologyValue(
                f"no values for entity {entity!r} in dialog {dialog!r}",
                dialog=dialog,
                entity=entity,
            )
        return found

    def copy(self) -> "Ontology":
        return Ontology(
            seed=self.seed,
            dialogs={d: {e: list(v) for e, v in ents.items()} for d, ents in self.dialogs.items()},
        )

    def to_doc(self) -> dict:
        return {"seed": self.seed, "dialogs": self.dialogs}

    @classmethod
    def from_doc(cls, doc: dict) -> "Ontology":
        return cls(
            seed=doc["seed"],
            dialogs={d: {e: list(v) for e, v in ents.items()} for d, ents in doc.get("dialogs", {}).items()},
        )


def _generate_values(entity: EntityDefinition, rng: random.Random, config: OntologyConfig) -> list[str]:
    k = config.values_per_entity
    if entity.kind == "enumeration":
        return list(entity.values)
    out: list[str] = []
    seen: set[str] = set()
    while len(out) < k:
        if entity.kind == "email":
            value = f"user{rng.randint(1, 99999)}@example.com"
        elif entity.kind == "number":
            value = str(rng.randint(*config.number_range))
        elif entity.kind == "alphanumeric_id":
            value = "".join(rng.choice(_ID_ALPHABET) for _ in range(config.id_length))
        else:  # free_text
            value = f"{rng.choice(_FREE_TEXT_HEADS)} {rng.choice(_FREE_TEXT_TAILS)}"
        if value not in seen:
            seen.add(value)
            out.append(value)
    return out


def extract_ontology(
    definition: BotDefinition,
    maps: dict,
    seed: int,
    config: OntologyConfig | None = None,
) -> Ontology:
    """Candidate values for every requested entity of every aggregated map.

    Value streams are seeded per (dialog, entity) so the output does not
    depend on iteration or parallelization order.
    """
    config = config or OntologyConfig()
    ontology = Ontology(seed=seed)
    for dialog_name, dact_map in maps.items():
        values: dict[str, list[str]] = {}
        for act in dact_map.entries:
            if not act.startswith("request_"):
                continue
            entity_name = act[len("request_") :]
            entity = definition.entity(entity_name)
            rng = random.Random(f"{seed}:{dialog_name}:{entity_name}")
            values[entity_name] = _generate_values(entity, rng, config)
        ontology.dialogs[dialog_name] = values
    return ontology
