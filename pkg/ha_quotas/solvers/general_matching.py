"""Maximum-weight perfect matching on general graphs (blossom engine from networkx)."""

from __future__ import annotations

import logging
from collections.abc import Hashable, Iterable
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

log = logging.getLogger(__name__)

Vertex = Hashable
UEdge = frozenset  # frozenset({u, v})


@dataclass
class GeneralGraph:
    """Undirected integer-weighted graph; parallel edges keep the heavier weight."""

    vertices: list[Vertex] = field(default_factory=list)
    edges: dict[UEdge, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._index: set[Vertex] = set()
        vertices, self.vertices = self.vertices, []
        for v in vertices:
            self.add_vertex(v)
        edges, self.edges = self.edges, {}
        for e, w in edges.items():
            u, v = tuple(e) if len(e) == 2 else (next(iter(e)),) * 2
            self.add_edge(u, v, w)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[Vertex, Vertex, int]]) -> GeneralGraph:
        g = cls()
        for u, v, w in edges:
            g.add_edge(u, v, w)
        return g

    def add_vertex(self, v: Vertex) -> None:
        if v not in self._index:
            self._index.add(v)
            self.vertices.append(v)

    def add_edge(self, u: Vertex, v: Vertex, weight: int) -> None:
        if u == v:
            raise ValueError(f"Self-loop at {u!r} is not allowed")
        self.add_vertex(u)
        self.add_vertex(v)
        key = frozenset((u, v))
        if key not in self.edges or self.edges[key] < weight:
            self.edges[key] = int(weight)

    def weight(self, u: Vertex, v: Vertex) -> int:
        return self.edges[frozenset((u, v))]

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(self.vertices)
        for e, w in self.edges.items():
            u, v = tuple(e)
            G.add_edge(u, v, weight=w)
        return G


def matching_weight(g: GeneralGraph, edges: Iterable[UEdge]) -> int:
    return sum(g.edges[e] for e in edges)


def max_weight_perfect_matching(g: GeneralGraph) -> Optional[tuple[int, frozenset[UEdge]]]:
    """Heaviest perfect matching of ``g`` or None when ``g`` has no perfect matching.

    Among maximum-cardinality matchings the blossom engine returns a heaviest one;
    with integer weights it works in exact integer arithmetic.
    """
    if len(g.vertices) % 2:
        return None
    if not g.vertices:
        return 0, frozenset()
    G = g.to_networkx()
    if any(d == 0 for _, d in G.degree()):
        return None
    mate = nx.max_weight_matching(G, maxcardinality=True, weight="weight")
    if 2 * len(mate) != len(g.vertices):
        log.debug("no perfect matching on %d vertices", len(g.vertices))
        return None
    chosen = frozenset(frozenset(e) for e in mate)
    return matching_weight(g, chosen), chosen


def max_weight_matching(g: GeneralGraph) -> tuple[int, frozenset[UEdge]]:
    """Heaviest (not necessarily perfect) matching via zero-weight mate padding."""
    padded = GeneralGraph()
    mates = [("__mate__", i) for i in range(len(g.vertices))]
    for e, w in g.edges.items():
        u, v = tuple(e)
        padded.add_edge(u, v, w)
    for v, mv in zip(g.vertices, mates):
        padded.add_edge(v, mv, 0)
    for i, mu in enumerate(mates):
        for mv in mates[i + 1:]:
            padded.add_edge(mu, mv, 0)
    result = max_weight_perfect_matching(padded)
    assert result is not None  # v–mate(v) is always perfect
    original = frozenset(e for e in result[1] if e in g.edges)
    return matching_weight(g, original), original
