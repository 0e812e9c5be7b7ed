"""Dialog path explorer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import DialogForgeError
from ..pathfinding import iter_simple_paths


class UnknownVertex(DialogForgeError):
    code = "unknown_vertex"


@dataclass
class DialogPath:
    vertices: list[str]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1  # edges

    def to_doc(self) -> dict:
        return {"vertices": self.vertices, "length": self.length}


@dataclass
class PathQuery:
    paths: list[DialogPath]
    truncated: bool

    def to_doc(self) -> dict:
        return {"paths": [p.to_doc() for p in self.paths], "truncated": self.truncated}


def enumerate_paths(
    graph,
    source: str,
    target: str,
    max_length: int | None = None,
    max_paths: int = 1000,
) -> PathQuery:
    """All simple paths up to ``max_length`` edges, lexicographically ordered.

    ``source == target`` yields the single zero-length path (convention:
    the empty walk). Enumeration stops after ``max_paths`` results with the
    truncation flag set.
    """
    adjacency: Mapping[str, Sequence[str]]
    if hasattr(graph, "adjacency"):
        adjacency = graph.adjacency()
    else:
        adjacency = graph
    for vertex in (source, target):
        if vertex not in adjacency:
            raise UnknownVertex(f"unknown dialog {vertex!r}", vertex=vertex)

    paths: list[DialogPath] = []
    truncated = False
    for found in iter_simple_paths(
        adjacency, source, target, max_length=max_length, neighbor_order="sorted"
    ):
        if len(paths) >= max_paths:
            truncated = True
            break
        paths.append(DialogPath(vertices=found))
    return PathQuery(paths=paths, truncated=truncated)
