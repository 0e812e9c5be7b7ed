"""Simple-path enumeration over dialog graphs.

One DFS core serves both the dialog-act-map aggregation (union of vertices
along paths to success dialogs) and the interactive path explorer. Paths
are simple: a vertex appears at most once, which also makes the traversal
terminate on cyclic bot designs.
"""

from __future__ import annotations

from typing import Iterator, Mapping, Sequence


def iter_simple_paths(
    adjacency: Mapping[str, Sequence[str]],
    source: str,
    target: str,
    max_length: int | None = None,
    neighbor_order: str = "declared",
) -> Iterator[list[str]]:
    """Yield every simple path from ``source`` to ``target``.

    ``max_length`` bounds the number of edges. ``source == target`` yields
    the single zero-length path ``[source]`` (and nothing else: a simple
    path cannot revisit its start). ``neighbor_order`` is either
    ``declared`` (adjacency list order, matching transition declaration
    order) or ``sorted`` (lexicographic expansion, which yields paths in
    lexicographic vertex-sequence order).
    """
    if source == target:
        yield [source]
        return
    if max_length is not None and max_length < 1:
        return

    limit = max_length if max_length is not None else len(adjacency)

    path = [source]
    on_path = {source}

    def neighbors(vertex: str) -> Sequence[str]:
        nexts = adjacency.get(vertex, ())
        return sorted(nexts) if neighbor_order == "sorted" else nexts

    def walk(vertex: str) -> Iterator[list[str]]:
        for nxt in neighbors(vertex):
            if nxt in on_path:
                continue
            if nxt == target:
                yield path + [nxt]
                continue
            if len(path) > limit - 1:
                continue
            path.append(nxt)
            on_path.add(nxt)
            yield from walk(nxt)
            path.pop()
            on_path.remove(nxt)

    if limit >= 1:
        yield from walk(source)
