"""Intent-overlap detection via greedy merging of confusion mass."""

from __future__ import annotations

from .metrics import ConfusionMatrix


def _pair_mass(
    matrix: list[list[int]], supports: list[int], a: frozenset[int], b: frozenset[int]
) -> float:
    cross = sum(matrix[i][j] + matrix[j][i] for i in a for j in b)
    denominator = sum(supports[i] for i in a | b)
    return cross / denominator if denominator else 0.0


def cluster_confusion(
    confusion: ConfusionMatrix, merge_threshold: float = 0.1
) -> list[list[str]]:
    """Greedy agglomerative merge on symmetrized, support-normalized confusion.

    The mass between clusters A and B is
    ``sum(C[i,j] + C[j,i] for i in A, j in B) / (support(A) + support(B))``.
    The highest-mass pair merges while the mass stays at or above the
    threshold; a threshold of 1.0 disables overlap detection entirely.
    Singleton clusters are omitted from the result.
    """
    if merge_threshold >= 1.0:
        return []
    labels = confusion.labels
    n = len(labels)
    supports = confusion.row_sums()
    clusters: list[frozenset[int]] = [frozenset([i]) for i in range(n)]

    while len(clusters) > 1:
        best_mass = -1.0
        best_pair: tuple[int, int] | None = None
        for x in range(len(clusters)):
            for y in range(x + 1, len(clusters)):
                mass = _pair_mass(confusion.matrix, supports, clusters[x], clusters[y])
                key_best = best_pair and tuple(
                    sorted(labels[i] for i in clusters[best_pair[0]] | clusters[best_pair[1]])
                )
                key_new = tuple(sorted(labels[i] for i in clusters[x] | clusters[y]))
                if mass > best_mass or (mass == best_mass and key_best and key_new < key_best):
                    best_mass = mass
                    best_pair = (x, y)
        if best_pair is None or best_mass < merge_threshold:
            break
        x, y = best_pair
        merged = clusters[x] | clusters[y]
        clusters = [c for k, c in enumerate(clusters) if k not in (x, y)] + [merged]

    out = [
        sorted(labels[i] for i in cluster) for cluster in clusters if len(cluster) > 1
    ]
    out.sort(key=lambda names: (-len(names), names))
    return out
