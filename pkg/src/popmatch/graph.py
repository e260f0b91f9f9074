"""Vertices, bipartite graphs and matchings.

Every edge is stored as an ordered pair ``(left, right)``.  Vertices carry
their side so that edges given in either orientation can be normalised.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .errors import VertexReused


class Side(IntEnum):
    LEFT = 0
    RIGHT = 1


class Vertex(NamedTuple):
    side: Side
    index: int
    name: str
    synthetic: bool = False

    def __str__(self):
        return self.name

    def __repr__(self):
        return self.name


Edge = Tuple[Vertex, Vertex]


def make_edge(x: Vertex, y: Vertex) -> Edge:
    """Return the edge between ``x`` and ``y`` as a (left, right) pair."""
    if x.side == y.side:
        raise ValueError(f"{x} and {y} lie on the same side")
    return (x, y) if x.side == Side.LEFT else (y, x)


def path_edges(vertices: Sequence[Vertex], closed: bool = False) -> List[Edge]:
    """Edges of the path (or cycle, if ``closed``) through ``vertices``."""
    edges = [make_edge(vertices[i], vertices[i + 1]) for i in range(len(vertices) - 1)]
    if closed and len(vertices) > 1:
        edges.append(make_edge(vertices[-1], vertices[0]))
    return edges


class Matching:
    """A set of vertex-disjoint edges with partner lookup.

    Unmatched vertices have partner ``None``.
    """

    __slots__ = ("_edges", "_partner", "_hash")

    def __init__(self, edges: Iterable[Edge] = ()):
        partner: Dict[Vertex, Vertex] = {}
        normalised = set()
        for x, y in edges:
            e = make_edge(x, y)
            if e in normalised:
                continue
            for v in e:
                if v in partner:
                    raise VertexReused(f"vertex {v} appears in more than one matched edge")
            partner[e[0]] = e[1]
            partner[e[1]] = e[0]
            normalised.add(e)
        self._edges = frozenset(normalised)
        self._partner = partner
        self._hash = None

    @property
    def edges(self) -> frozenset:
        return self._edges

    def partner(self, v: Vertex) -> Optional[Vertex]:
        return self._partner.get(v)

    def is_matched(self, v: Vertex) -> bool:
        return v in self._partner

    @property
    def vertices(self):
        return self._partner.keys()

    def sorted_edges(self) -> List[Edge]:
        return sorted(self._edges)

    def __len__(self):
        return len(self._edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.sorted_edges())

    def __contains__(self, edge) -> bool:
        try:
            return make_edge(*edge) in self._edges
        except (TypeError, ValueError):
            return False

    def __eq__(self, other):
        if not isinstance(other, Matching):
            return NotImplemented
        return self._edges == other._edges

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._edges)
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"({a},{b})" for a, b in self.sorted_edges())
        return f"Matching({{{inner}}})"

    def to_text(self) -> str:
        return "; ".join(f"{a.name} {b.name}" for a, b in self.sorted_edges())


class BipartiteGraph:
    """An immutable bipartite graph with a fixed vertex and edge order.

    The edge order drives every deterministic tie-break downstream, so two
    graphs with the same edge set but different edge order are distinct
    inputs for the matching routines (and equal as sets).
    """

    def __init__(self, left: Iterable[Vertex], right: Iterable[Vertex], edges: Iterable[Edge]):
        self.left: Tuple[Vertex, ...] = tuple(left)
        self.right: Tuple[Vertex, ...] = tuple(right)
        seen = set()
        ordered = []
        for x, y in edges:
            e = make_edge(x, y)
            if e not in seen:
                seen.add(e)
                ordered.append(e)
        self.edges: Tuple[Edge, ...] = tuple(ordered)
        self.edge_set = frozenset(seen)
        adj: Dict[Vertex, List[Vertex]] = {v: [] for v in self.left + self.right}
        for a, b in self.edges:
            if a not in adj or b not in adj:
                raise ValueError(f"edge ({a},{b}) uses a vertex outside the graph")
            adj[a].append(b)
            adj[b].append(a)
        self.adj = adj

    @property
    def vertices(self) -> Tuple[Vertex, ...]:
        return self.left + self.right

    def neighbors(self, v: Vertex) -> List[Vertex]:
        return self.adj[v]

    def has_edge(self, x: Vertex, y: Vertex) -> bool:
        return make_edge(x, y) in self.edge_set

    def subgraph(self, edges: Iterable[Edge]) -> "BipartiteGraph":
        """Same vertex set, restricted edge set (kept in this graph's order)."""
        keep = {make_edge(*e) for e in edges}
        return BipartiteGraph(self.left, self.right, [e for e in self.edges if e in keep])

    def reordered(self, edges: Sequence[Edge]) -> "BipartiteGraph":
        return BipartiteGraph(self.left, self.right, edges)

    def __repr__(self):
        return f"BipartiteGraph(|L|={len(self.left)}, |R|={len(self.right)}, |E|={len(self.edges)})"
