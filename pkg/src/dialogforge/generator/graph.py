"""Conversation-graph modelling of a bot definition.

Dialogs become vertices (each carrying its local dialog-act map) and
transitions become directed edges. The aggregated dialog-act map of an
evaluation dialog is the union of the local maps of every vertex that lies
on at least one simple path from that dialog to a success dialog. Simple
paths keep the traversal finite on cyclic designs and can only
over-approximate, which is harmless here: extra entries merely add NLU
candidates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from ..errors import DialogForgeError
from ..pathfinding import iter_simple_paths
from ..schema import BotDefinition
from .maps import DialogActMap, merge_entry

# Enumeration guard per (dialog, success target); hitting it emits a
# diagnostic because the union may then be incomplete.
PATH_CAP = 10_000


class NoPathError(DialogForgeError):
    """No success dialog is reachable from the requested dialog."""

    code = "no_path"


@dataclass
class ConversationGraph:
    vertices: dict[str, DialogActMap]
    edges: list[tuple[str, str, str]] = field(default_factory=list)
    definition: BotDefinition | None = None

    def adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {name: [] for name in self.vertices}
        for source, target, _condition in self.edges:
            adj[source].append(target)
        return adj

    def to_doc(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [
                {"source": s, "target": t, "condition": c} for s, t, c in self.edges
            ],
        }


def build_graph(definition: BotDefinition) -> ConversationGraph:
    """Vertices mirror dialogs (with local maps), edges mirror transitions."""
    from .maps import parse_local_maps

    local = parse_local_maps(definition)
    edges = [
        (dialog.name, rule.target, rule.condition)
        for dialog in definition.dialogs
        for rule in dialog.transitions
    ]
    return ConversationGraph(vertices=local, edges=edges, definition=definition)


def on_path_vertices(
    graph: ConversationGraph, dialog: str, success_dialogs: set[str] | list[str]
) -> set[str]:
    """Vertices lying on at least one simple path from ``dialog`` to a success dialog."""
    adjacency = graph.adjacency()
    found: set[str] = set()
    for target in success_dialogs:
        if target not in graph.vertices:
            continue
        count = 0
        for path in iter_simple_paths(adjacency, dialog, target):
            found.update(path)
            count += 1
            if count >= PATH_CAP:
                warnings.warn(
                    f"path enumeration from {dialog!r} to {target!r} hit the "
                    f"{PATH_CAP}-path cap; aggregated map may be incomplete",
                    RuntimeWarning,
                    stacklevel=2,
                )
                break
    return found


def aggregate_map(
    graph: ConversationGraph, dialog: str, success_dialogs: set[str] | list[str]
) -> DialogActMap:
    """Union the local maps along every simple path to a success dialog.

    Entries merge in graph vertex order (dialog declaration order) with
    candidate lists deduplicated, first occurrence winning. The two special
    success acts are left for :func:`infer_success_acts` to fill.
    """
    if dialog not in graph.vertices:
        raise KeyError(dialog)
    covered = on_path_vertices(graph, dialog, success_dialogs)
    if not covered:
        raise NoPathError(f"no success dialog reachable from {dialog!r}", dialog=dialog)

    aggregated = DialogActMap(dialog=dialog)
    for vertex, local in graph.vertices.items():
        if vertex not in covered:
            continue
        for act, candidates in local.entries.items():
            for candidate in candidates:
                merge_entry(aggregated.entries, act, candidate)
    return aggregated
