"""Dialog-act maps: the simulator's NLU lookup tables.

Each Collect step with entity E contributes its message to the
``request_E`` act, Confirm steps to ``confirm_E`` and plain messages to the
generic ``say`` act. ``{placeholder}`` spans are replaced with a single
wildcard token so fuzzy matching tolerates whatever value the runtime
substitutes at chat time. The two special acts
(``intent_success_message`` / ``dialog_success_message``) are the golden
labels for correct intent classification and task completion; they are
inferred by a first/last-message heuristic and must be human-reviewed
before simulation (the ``revised`` flag).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from ..errors import DialogForgeError
from ..schema import BotDefinition, DialogDefinition
from ..textnorm import WILDCARD

_PLACEHOLDER = re.compile(r"\{[A-Za-z0-9_]+\}")
_SPACES = re.compile(r"[ \t]+")

SAY_ACT = "say"


class HeuristicUnavailable(DialogForgeError):
    """First/last-message heuristic found no message to use."""

    code = "heuristic_unavailable"


class UnknownTarget(DialogForgeError):
    """A revision references an element that does not exist."""

    code = "unknown_target"


def strip_placeholders(text: str) -> str:
    """Replace each ``{name}`` span with a standalone wildcard token."""
    replaced = _PLACEHOLDER.sub(f" {WILDCARD} ", text)
    return _SPACES.sub(" ", replaced).strip()


def merge_entry(entries: dict[str, list[str]], act: str, candidate: str) -> None:
    bucket = entries.setdefault(act, [])
    if candidate not in bucket:
        bucket.append(candidate)


@dataclass
class DialogActMap:
    dialog: str
    entries: dict[str, list[str]] = field(default_factory=dict)
    intent_success_message: list[str] = field(default_factory=list)
    dialog_success_message: list[str] = field(default_factory=list)
    revised: bool = False

    def to_doc(self) -> dict:
        return {
            "dialog": self.dialog,
            "entries": {act: list(c) for act, c in self.entries.items()},
            "intent_success_message": list(self.intent_success_message),
            "dialog_success_message": list(self.dialog_success_message),
            "revised": self.revised,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "DialogActMap":
        return cls(
            dialog=doc["dialog"],
            entries={act: list(c) for act, c in doc.get("entries", {}).items()},
            intent_success_message=list(doc.get("intent_success_message", [])),
            dialog_success_message=list(doc.get("dialog_success_message", [])),
            revised=bool(doc.get("revised", False)),
        )

    def copy(self) -> "DialogActMap":
        return DialogActMap.from_doc(self.to_doc())


def act_for_step(action: str, slot: str | None) -> str:
    if action == "Collect":
        return f"request_{slot}"
    if action == "Confirm":
        return f"confirm_{slot}"
    return SAY_ACT


def parse_local_maps(definition: BotDefinition) -> dict[str, DialogActMap]:
    """Per-dialog local maps, acts keyed in step order of first occurrence."""
    maps: dict[str, DialogActMap] = {}
    for dialog in definition.dialogs:
        dact = DialogActMap(dialog=dialog.name)
        for step in dialog.steps:
            merge_entry(
                dact.entries,
                act_for_step(step.action, step.slot),
                strip_placeholders(step.text),
            )
        maps[dialog.name] = dact
    return maps


def _bfs_path(adjacency: dict[str, list[str]], source: str, target: str) -> list[str] | None:
    """Shortest path by BFS, neighbors expanded in declaration order."""
    if source == target:
        return [source]
    parent: dict[str, str] = {}
    queue = deque([source])
    seen = {source}
    while queue:
        vertex = queue.popleft()
        for nxt in adjacency.get(vertex, []):
            if nxt in seen:
                continue
            parent[nxt] = vertex
            if nxt == target:
                path = [nxt]
                while path[-1] != source:
                    path.append(parent[path[-1]])
                return path[::-1]
            seen.add(nxt)
            queue.append(nxt)
    return None


def infer_success_acts(
    dialog: DialogDefinition,
    graph,
    success_dialogs: list[str],
) -> tuple[list[str], list[str]]:
    """First/last-message heuristic for the two golden-label acts.

    ``intent_success`` is the first message of the evaluation dialog; when
    that dialog has no steps (pure router) the first stepful dialog along a
    success path stands in. ``dialog_success`` is the last message of each
    reachable terminal success dialog, walking backwards to the last
    stepful vertex when a success dialog itself has no steps.
    """
    from .graph import NoPathError

    adjacency = graph.adjacency()
    paths: list[list[str]] = []
    for target in success_dialogs:
        path = _bfs_path(adjacency, dialog.name, target)
        if path is not None:
            paths.append(path)
    if not paths:
        raise NoPathError(
            f"no success dialog reachable from {dialog.name!r}", dialog=dialog.name
        )

    def steps_of(vertex: str):
        return graph.definition.dialog(vertex).steps

    intent_success: list[str] = []
    if dialog.steps:
        intent_success = [strip_placeholders(dialog.steps[0].text)]
    else:
        for path in paths:
            for vertex in path:
                steps = steps_of(vertex)
                if steps:
                    intent_success = [strip_placeholders(steps[0].text)]
                    break
            if intent_success:
                break

    dialog_success: list[str] = []
    for path in paths:
        for vertex in reversed(path):
            steps = steps_of(vertex)
            if steps:
                candidate = strip_placeholders(steps[-1].text)
                if candidate not in dialog_success:
                    dialog_success.append(candidate)
                break

    if not intent_success and not dialog_success:
        raise HeuristicUnavailable(
            f"dialog {dialog.name!r} and all reachable success dialogs have no steps",
            dialog=dialog.name,
        )
    return intent_success, dialog_success


# ---------------------------------------------------------------------------
# revisions


@dataclass
class DialogRevision:
    intent_success_message: list[str] | None = None
    dialog_success_message: list[str] | None = None
    entries_add: dict[str, list[str]] = field(default_factory=dict)
    entries_remove: dict[str, list[str] | None] = field(default_factory=dict)
    ontology: dict[str, list[str]] = field(default_factory=dict)


@dataclass
class RevisionDocument:
    dialogs: dict[str, DialogRevision] = field(default_factory=dict)

    @classmethod
    def from_doc(cls, doc: dict) -> "RevisionDocument":
        dialogs = {}
        for name, section in doc.get("dialogs", {}).items():
            dialogs[name] = DialogRevision(
                intent_success_message=section.get("intent_success_message"),
                dialog_success_message=section.get("dialog_success_message"),
                entries_add={k: list(v) for k, v in section.get("entries_add", {}).items()},
                entries_remove=dict(section.get("entries_remove", {})),
                ontology={k: list(v) for k, v in section.get("ontology", {}).items()},
            )
        return cls(dialogs=dialogs)


def apply_revisions(dact_map: DialogActMap, ontology, revision: RevisionDocument):
    """Apply one dialog's overrides and mark the map as human-reviewed.

    Returns a ``(map, ontology)`` pair of new objects; inputs are untouched.
    Dangling references raise :class:`UnknownTarget`.
    """
    new_map = dact_map.copy()
    new_ontology = ontology.copy() if ontology is not None else None
    section = revision.dialogs.get(dact_map.dialog)
    if section is not None:
        if section.intent_success_message is not None:
            new_map.intent_success_message = list(section.intent_success_message)
        if section.dialog_success_message is not None:
            new_map.dialog_success_message = list(section.dialog_success_message)
        for act, candidates in section.entries_remove.items():
            if act not in new_map.entries:
                raise UnknownTarget(
                    f"revision removes unknown act {act!r} in dialog {dact_map.dialog!r}",
                    dialog=dact_map.dialog,
                    act=act,
                )
            if candidates is None:
                del new_map.entries[act]
            else:
                for candidate in candidates:
                    if candidate not in new_map.entries[act]:
                        raise UnknownTarget(
                            f"revision removes unknown candidate under {act!r}",
                            dialog=dact_map.dialog,
                            act=act,
                        )
                    new_map.entries[act].remove(candidate)
                if not new_map.entries[act]:
                    del new_map.entries[act]
        for act, candidates in section.entries_add.items():
            for candidate in candidates:
                merge_entry(new_map.entries, act, candidate)
        if section.ontology:
            if new_ontology is None:
                raise UnknownTarget(
                    "revision carries ontology overrides but no ontology was given",
                    dialog=dact_map.dialog,
                )
            values = new_ontology.dialogs.get(dact_map.dialog)
            for entity, replacement in section.ontology.items():
                if values is None or entity not in values:
                    raise UnknownTarget(
                        f"revision replaces values of unknown entity {entity!r}",
                        dialog=dact_map.dialog,
                        entity=entity,
                    )
                values[entity] = list(replacement)
    new_map.revised = True
    return new_map, new_ontology
