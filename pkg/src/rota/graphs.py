"""Bipartite graphs with parts X and Y, and the k-excess of a vertex."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Tuple

__all__ = ["BipartiteGraph", "Vertex", "X", "Y", "excess_from_degrees", "k_excess"]

X = "x"
Y = "y"
Vertex = Tuple[str, int]


@dataclass(frozen=True)
class BipartiteGraph:
    """Parts ``X = 0..x_size-1`` and ``Y = 0..y_size-1``; edges are ``(x, y)`` pairs."""

    x_size: int
    y_size: int
    edges: frozenset[tuple[int, int]]
    adj_x: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)
    adj_y: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = frozenset((int(a), int(b)) for a, b in self.edges)
        ax: list[set[int]] = [set() for _ in range(self.x_size)]
        ay: list[set[int]] = [set() for _ in range(self.y_size)]
        for a, b in edges:
            if not (0 <= a < self.x_size and 0 <= b < self.y_size):
                raise ValueError(f"edge ({a}, {b}) does not join X and Y")
            ax[a].add(b)
            ay[b].add(a)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adj_x", tuple(frozenset(s) for s in ax))
        object.__setattr__(self, "adj_y", tuple(frozenset(s) for s in ay))

    @classmethod
    def from_edges(cls, x_size: int, y_size: int, edges: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        return cls(x_size, y_size, frozenset(edges))

    def neighbours(self, v: Vertex) -> frozenset[int]:
        side, i = v
        return self.adj_x[i] if side == X else self.adj_y[i]

    def degree(self, v: Vertex) -> int:
        return len(self.neighbours(v))

    def vertices(self, side: str) -> list[Vertex]:
        return [(side, i) for i in range(self.x_size if side == X else self.y_size)]

    def delete_y(self, keep: Iterable[int]) -> "BipartiteGraph":
        """Subgraph with only the Y vertices in ``keep`` (relabelled in sorted order)."""
        keep = sorted(set(keep))
        relabel = {y: j for j, y in enumerate(keep)}
        return BipartiteGraph(self.x_size, len(keep), frozenset((a, relabel[b]) for a, b in self.edges if b in relabel))


def excess_from_degrees(neighbour_degrees: Iterable[int], degree: int, k: int) -> int:
    """k-excess from the neighbour degree list and the vertex's own degree."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    degs = sorted(neighbour_degrees, reverse=True)
    j = max(k, 1)
    if len(degs) < j:
        return 0
    return max(0, degs[j - 1] - degree)


def k_excess(G: BipartiteGraph, y: Vertex, k: int) -> int:
    """``max(0, d(x_j) - d(y))`` where ``x_j`` is the ``max(k, 1)``-th highest-degree
    neighbour of ``y``; zero when ``y`` has fewer than ``max(k, 1)`` neighbours."""
    other = Y if y[0] == X else X
    nbrs = G.neighbours(y)
    return excess_from_degrees((G.degree((other, u)) for u in nbrs), len(nbrs), k)
