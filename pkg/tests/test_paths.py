import random

import pytest

from dialogforge.generator import build_graph
from dialogforge.remediator import UnknownVertex, enumerate_paths

from oracles import brute_force_simple_paths, random_graph


def adjacency_of(edges, vertices):
    adj = {v: [] for v in vertices}
    for a, b in edges:
        adj[a].append(b)
    return adj


def test_source_equals_target_single_trivial_path():
    adj = {"A": ["B"], "B": []}
    query = enumerate_paths(adj, "A", "A")
    assert [p.vertices for p in query.paths] == [["A"]]
    assert query.paths[0].length == 0
    assert not query.truncated


def test_diamond_enumerates_both_paths_lexicographically():
    adj = {"A": ["C", "B"], "B": ["D"], "C": ["D"], "D": []}
    query = enumerate_paths(adj, "A", "D")
    assert [p.vertices for p in query.paths] == [["A", "B", "D"], ["A", "C", "D"]]


def test_disconnected_target_yields_empty():
    adj = {"A": ["B"], "B": [], "Z": []}
    query = enumerate_paths(adj, "A", "Z")
    assert query.paths == []
    assert not query.truncated


def test_unknown_vertex_raises():
    adj = {"A": []}
    with pytest.raises(UnknownVertex):
        enumerate_paths(adj, "A", "Nope")
    with pytest.raises(UnknownVertex):
        enumerate_paths(adj, "Nope", "A")


def test_max_length_prunes_long_paths():
    adj = {"A": ["B", "D"], "B": ["C"], "C": ["D"], "D": []}
    bounded = enumerate_paths(adj, "A", "D", max_length=1)
    assert [p.vertices for p in bounded.paths] == [["A", "D"]]
    unbounded = enumerate_paths(adj, "A", "D")
    assert len(unbounded.paths) == 2


def test_truncation_flag():
    adj = {"A": ["B", "C", "D"], "B": ["E"], "C": ["E"], "D": ["E"], "E": []}
    query = enumerate_paths(adj, "A", "E", max_paths=2)
    assert len(query.paths) == 2
    assert query.truncated


def test_template_graph_paths_match_oracle(template_bot):
    graph = build_graph(template_bot)
    adjacency = graph.adjacency()
    edges = {(s, t) for s, t, _ in graph.edges}
    for source in adjacency:
        for target in adjacency:
            got = [p.vertices for p in enumerate_paths(adjacency, source, target).paths]
            expected = brute_force_simple_paths(list(adjacency), edges, source, target)
            assert got == expected, (source, target)


@pytest.mark.parametrize("seed", range(100))
def test_random_graphs_match_oracle(seed):
    vertices, edges = random_graph(seed)
    adjacency = adjacency_of(edges, vertices)
    rng = random.Random(seed + 1000)
    source, target = rng.choice(vertices), rng.choice(vertices)
    got = [p.vertices for p in enumerate_paths(adjacency, source, target, max_paths=100_000).paths]
    expected = brute_force_simple_paths(vertices, edges, source, target)
    assert got == expected


@pytest.mark.parametrize("seed", range(30))
def test_random_graphs_with_max_length_match_oracle(seed):
    vertices, edges = random_graph(seed)
    adjacency = adjacency_of(edges, vertices)
    rng = random.Random(seed + 2000)
    source, target = rng.choice(vertices), rng.choice(vertices)
    bound = rng.randint(1, 4)
    got = [
        p.vertices
        for p in enumerate_paths(adjacency, source, target, max_length=bound, max_paths=100_000).paths
    ]
    expected = brute_force_simple_paths(vertices, edges, source, target, max_length=bound)
    assert got == expected
