"""Platform-neutral bot definition format.

A bot definition is a single JSON document (``schema_version`` 1) listing
dialogs, message steps annotated with rule/action information, transitions,
intents with their training utterances and entity declarations. Loading
checks structure first (:class:`SchemaError`) and referential invariants
second (:class:`ValidationError` carrying :class:`Violation` values whose
paths are JSON pointers into the source document).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, BinaryIO

from .errors import DialogForgeError

SCHEMA_VERSION = 1

ACTIONS = ("Say", "Collect", "Confirm")
CONDITIONS = ("always", "on_success", "on_failure")
ENTITY_KINDS = ("email", "number", "alphanumeric_id", "free_text", "enumeration")

_PLACEHOLDER = re.compile(r"\{([A-Za-z0-9_]+)\}")


class BotSyntaxError(DialogForgeError):
    """The document is not well-formed JSON."""

    code = "syntax_error"


class SchemaError(DialogForgeError):
    """The document does not have the expected structure."""

    code = "schema_error"


class ValidationError(DialogForgeError):
    """One or more definition invariants are violated."""

    code = "validation_error"

    def __init__(self, violations: list["Violation"]):
        summary = "; ".join(f"{v.code} at {v.path}" for v in violations)
        super().__init__(f"invalid bot definition: {summary}")
        self.violations = violations


@dataclass(frozen=True)
class Violation:
    code: str
    path: str
    message: str


@dataclass(frozen=True)
class MessageStep:
    text: str
    action: str = "Say"
    slot: str | None = None
    entity_type: str | None = None

    def placeholders(self) -> list[str]:
        return _PLACEHOLDER.findall(self.text)


@dataclass(frozen=True)
class TransitionRule:
    target: str
    condition: str = "always"


@dataclass(frozen=True)
class DialogDefinition:
    name: str
    steps: tuple[MessageStep, ...] = ()
    transitions: tuple[TransitionRule, ...] = ()
    is_sub_dialog: bool = False


@dataclass(frozen=True)
class IntentDefinition:
    name: str
    entry_dialog: str
    training_utterances: tuple[str, ...] = ()


@dataclass(frozen=True)
class EntityDefinition:
    name: str
    kind: str = "free_text"
    values: tuple[str, ...] = ()


@dataclass(frozen=True)
class BotDefinition:
    name: str
    dialogs: tuple[DialogDefinition, ...] = ()
    intents: tuple[IntentDefinition, ...] = ()
    entities: tuple[EntityDefinition, ...] = ()
    success_dialogs: tuple[str, ...] = ()

    def dialog(self, name: str) -> DialogDefinition:
        for d in self.dialogs:
            if d.name == name:
                return d
        raise KeyError(name)

    def dialog_names(self) -> list[str]:
        return [d.name for d in self.dialogs]

    def entity(self, name: str) -> EntityDefinition:
        for e in self.entities:
            if e.name == name:
                return e
        raise KeyError(name)

    def intents_for_dialog(self, dialog: str) -> list[IntentDefinition]:
        return [i for i in self.intents if i.entry_dialog == dialog]


# ---------------------------------------------------------------------------
# structural decoding


def _expect(doc: dict, path: str, required: dict[str, type], optional: dict[str, type]):
    if not isinstance(doc, dict):
        raise SchemaError(f"expected object at {path}, got {type(doc).__name__}")
    for key in doc:
        if key not in required and key not in optional:
            raise SchemaError(f"unknown field {key!r} at {path}")
    for key, typ in required.items():
        if key not in doc:
            raise SchemaError(f"missing required field {key!r} at {path}")
        if not isinstance(doc[key], typ):
            raise SchemaError(f"field {key!r} at {path} must be {typ.__name__}")
    for key, typ in optional.items():
        if key in doc and not isinstance(doc[key], typ):
            raise SchemaError(f"field {key!r} at {path} must be {typ.__name__}")


def _string_list(value: Any, path: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SchemaError(f"expected list of strings at {path}")
    return tuple(value)


def _decode_step(doc: Any, path: str) -> MessageStep:
    _expect(doc, path, {"text": str}, {"action": str, "slot": str, "entity_type": str})
    return MessageStep(
        text=doc["text"],
        action=doc.get("action", "Say"),
        slot=doc.get("slot"),
        entity_type=doc.get("entity_type"),
    )


def _decode_transition(doc: Any, path: str) -> TransitionRule:
    _expect(doc, path, {"target": str}, {"condition": str})
    return TransitionRule(target=doc["target"], condition=doc.get("condition", "always"))


def _decode_dialog(doc: Any, path: str) -> DialogDefinition:
    _expect(
        doc,
        path,
        {"name": str},
        {"steps": list, "transitions": list, "is_sub_dialog": bool},
    )
    steps = tuple(
        _decode_step(s, f"{path}/steps/{i}") for i, s in enumerate(doc.get("steps", []))
    )
    transitions = tuple(
        _decode_transition(t, f"{path}/transitions/{i}")
        for i, t in enumerate(doc.get("transitions", []))
    )
    return DialogDefinition(
        name=doc["name"],
        steps=steps,
        transitions=transitions,
        is_sub_dialog=doc.get("is_sub_dialog", False),
    )


def _decode_intent(doc: Any, path: str) -> IntentDefinition:
    _expect(doc, path, {"name": str, "entry_dialog": str}, {"training_utterances": list})
    return IntentDefinition(
        name=doc["name"],
        entry_dialog=doc["entry_dialog"],
        training_utterances=_string_list(
            doc.get("training_utterances", []), f"{path}/training_utterances"
        ),
    )


def _decode_entity(doc: Any, path: str) -> EntityDefinition:
    _expect(doc, path, {"name": str, "kind": str}, {"values": list})
    return EntityDefinition(
        name=doc["name"],
        kind=doc["kind"],
        values=_string_list(doc.get("values", []), f"{path}/values"),
    )


def decode_bot_definition(doc: Any) -> BotDefinition:
    """Turn a parsed JSON document into a BotDefinition (structure checks only)."""
    _expect(
        doc,
        "",
        {"schema_version": int, "name": str, "dialogs": list},
        {"intents": list, "entities": list, "success_dialogs": list},
    )
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported schema_version {doc['schema_version']} (expected {SCHEMA_VERSION})"
        )
    return BotDefinition(
        name=doc["name"],
        dialogs=tuple(
            _decode_dialog(d, f"/dialogs/{i}") for i, d in enumerate(doc["dialogs"])
        ),
        intents=tuple(
            _decode_intent(x, f"/intents/{i}") for i, x in enumerate(doc.get("intents", []))
        ),
        entities=tuple(
            _decode_entity(e, f"/entities/{i}") for i, e in enumerate(doc.get("entities", []))
        ),
        success_dialogs=_string_list(doc.get("success_dialogs", []), "/success_dialogs"),
    )


# ---------------------------------------------------------------------------
# invariant validation


def validate(definition: BotDefinition) -> list[Violation]:
    """Check every definition invariant; an empty list means the bot is valid."""
    out: list[Violation] = []
    seen_dialogs: set[str] = set()
    for i, dialog in enumerate(definition.dialogs):
        if dialog.name in seen_dialogs:
            out.append(
                Violation(
                    "DuplicateDialogName",
                    f"/dialogs/{i}",
                    f"dialog name {dialog.name!r} declared more than once",
                )
            )
        seen_dialogs.add(dialog.name)

    dialog_names = {d.name for d in definition.dialogs}
    entity_names = {e.name for e in definition.entities}

    seen_entities: set[str] = set()
    for i, entity in enumerate(definition.entities):
        if entity.name in seen_entities:
            out.append(
                Violation(
                    "DuplicateEntityName",
                    f"/entities/{i}",
                    f"entity name {entity.name!r} declared more than once",
                )
            )
        seen_entities.add(entity.name)
        if entity.kind not in ENTITY_KINDS:
            out.append(
                Violation(
                    "UnknownEntityKind",
                    f"/entities/{i}",
                    f"entity kind {entity.kind!r} is not one of {ENTITY_KINDS}",
                )
            )
        if entity.kind == "enumeration" and not entity.values:
            out.append(
                Violation(
                    "EmptyEnumeration",
                    f"/entities/{i}",
                    f"enumeration entity {entity.name!r} declares no values",
                )
            )

    for i, dialog in enumerate(definition.dialogs):
        dpath = f"/dialogs/{i}"
        if not dialog.steps and not dialog.transitions:
            out.append(
                Violation(
                    "EmptyDialog",
                    dpath,
                    f"dialog {dialog.name!r} has no steps and no transitions",
                )
            )
        always_count = 0
        for j, rule in enumerate(dialog.transitions):
            tpath = f"{dpath}/transitions/{j}"
            if rule.condition not in CONDITIONS:
                out.append(
                    Violation(
                        "UnknownCondition",
                        tpath,
                        f"condition {rule.condition!r} is not one of {CONDITIONS}",
                    )
                )
            if rule.condition == "always":
                always_count += 1
            if rule.target not in dialog_names:
                out.append(
                    Violation(
                        "UnknownTransitionTarget",
                        tpath,
                        f"transition targets undeclared dialog {rule.target!r}",
                    )
                )
        if always_count > 1:
            out.append(
                Violation(
                    "MultipleAlwaysTransitions",
                    dpath,
                    f"dialog {dialog.name!r} declares {always_count} 'always' transitions",
                )
            )
        for j, step in enumerate(dialog.steps):
            spath = f"{dpath}/steps/{j}"
            if step.action not in ACTIONS:
                out.append(
                    Violation(
                        "UnknownAction",
                        spath,
                        f"action {step.action!r} is not one of {ACTIONS}",
                    )
                )
            if step.action in ("Collect", "Confirm"):
                if not step.slot:
                    out.append(
                        Violation(
                            "MissingSlot",
                            spath,
                            f"{step.action} step needs a slot",
                        )
                    )
                elif step.slot not in entity_names:
                    out.append(
                        Violation(
                            "UnknownEntity",
                            spath,
                            f"step references undeclared entity {step.slot!r}",
                        )
                    )
                if step.action == "Collect":
                    if not step.entity_type:
                        out.append(
                            Violation(
                                "MissingEntityType",
                                spath,
                                "Collect step needs an entity_type",
                            )
                        )
                    elif step.entity_type not in entity_names:
                        out.append(
                            Violation(
                                "UnknownEntity",
                                spath,
                                f"step references undeclared entity {step.entity_type!r}",
                            )
                        )
            for placeholder in step.placeholders():
                if placeholder not in entity_names:
                    out.append(
                        Violation(
                            "UnknownPlaceholder",
                            spath,
                            f"placeholder {{{placeholder}}} names no declared entity",
                        )
                    )

    for i, intent in enumerate(definition.intents):
        ipath = f"/intents/{i}"
        if not intent.training_utterances:
            out.append(
                Violation(
                    "EmptyTrainingUtterances",
                    ipath,
                    f"intent {intent.name!r} has no training utterances",
                )
            )
        if intent.entry_dialog not in dialog_names:
            out.append(
                Violation(
                    "UnknownEntryDialog",
                    ipath,
                    f"intent {intent.name!r} enters undeclared dialog {intent.entry_dialog!r}",
                )
            )

    for i, name in enumerate(definition.success_dialogs):
        if name not in dialog_names:
            out.append(
                Violation(
                    "UnknownSuccessDialog",
                    f"/success_dialogs/{i}",
                    f"success dialog {name!r} is not declared",
                )
            )
    return out


# ---------------------------------------------------------------------------
# loading / serialization


def load_bot_definition(
    source: str | Path | bytes | BinaryIO,
    utterance_sidecar: str | Path | None = None,
) -> BotDefinition:
    """Load, decode and validate a bot definition.

    ``source`` is a path or an already-read byte stream. An optional
    utterance sidecar (JSON map intent name -> list of utterances) is merged
    into the matching IntentDefinitions before validation.
    """
    if isinstance(source, bytes):
        raw = source
    elif hasattr(source, "read"):
        raw = source.read()
    else:
        raw = Path(source).read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8") if isinstance(raw, bytes) else raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BotSyntaxError(f"malformed bot definition: {exc}") from exc

    definition = decode_bot_definition(doc)

    if utterance_sidecar is not None:
        sidecar = json.loads(Path(utterance_sidecar).read_text(encoding="utf-8"))
        if not isinstance(sidecar, dict):
            raise SchemaError("utterance sidecar must be a JSON object")
        definition = merge_utterances(definition, sidecar)

    violations = validate(definition)
    if violations:
        raise ValidationError(violations)
    return definition


def merge_utterances(definition: BotDefinition, sidecar: dict) -> BotDefinition:
    """Append sidecar utterances to each named intent (duplicates dropped)."""
    intents = []
    for intent in definition.intents:
        extra = sidecar.get(intent.name, [])
        if not isinstance(extra, list) or not all(isinstance(u, str) for u in extra):
            raise SchemaError(f"sidecar entry for {intent.name!r} must be a list of strings")
        merged = list(intent.training_utterances)
        known = set(merged)
        for utterance in extra:
            if utterance not in known:
                merged.append(utterance)
                known.add(utterance)
        intents.append(
            IntentDefinition(intent.name, intent.entry_dialog, tuple(merged))
        )
    return BotDefinition(
        name=definition.name,
        dialogs=definition.dialogs,
        intents=tuple(intents),
        entities=definition.entities,
        success_dialogs=definition.success_dialogs,
    )


def serialize(definition: BotDefinition) -> dict:
    """Dump a definition back to its JSON document form."""
    doc: dict = {"schema_version": SCHEMA_VERSION, "name": definition.name, "dialogs": []}
    for dialog in definition.dialogs:
        ddoc: dict = {"name": dialog.name, "steps": [], "transitions": []}
        for step in dialog.steps:
            sdoc: dict = {"text": step.text, "action": step.action}
            if step.slot is not None:
                sdoc["slot"] = step.slot
            if step.entity_type is not None:
                sdoc["entity_type"] = step.entity_type
            ddoc["steps"].append(sdoc)
        for rule in dialog.transitions:
            ddoc["transitions"].append({"target": rule.target, "condition": rule.condition})
        if dialog.is_sub_dialog:
            ddoc["is_sub_dialog"] = True
        doc["dialogs"].append(ddoc)
    doc["intents"] = [
        {
            "name": intent.name,
            "entry_dialog": intent.entry_dialog,
            "training_utterances": list(intent.training_utterances),
        }
        for intent in definition.intents
    ]
    doc["entities"] = [
        {"name": e.name, "kind": e.kind, **({"values": list(e.values)} if e.values else {})}
        for e in definition.entities
    ]
    doc["success_dialogs"] = list(definition.success_dialogs)
    return doc
