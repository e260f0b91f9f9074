"""Unweighted bipartite matching machinery.

Maximum matching by BFS augmentation, König covers, Dulmage-Mendelsohn
(even / odd / unreachable) labels and alternating reachability.

Alternating walks are searched over states ``(vertex, kind of the last
edge)``.  In a bipartite graph any alternating walk contains an alternating
path with the same endpoints and the same first/last edge kinds, so walk
reachability is path reachability.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .errors import NotAlternating, NotMaximum, WouldDoubleMatch
from .graph import BipartiteGraph, Edge, Matching, Vertex, make_edge


class EdgeKind(Enum):
    MATCHED = "matched"
    UNMATCHED = "unmatched"

    @property
    def other(self) -> "EdgeKind":
        return EdgeKind.UNMATCHED if self is EdgeKind.MATCHED else EdgeKind.MATCHED


class DMLabel(Enum):
    EVEN = "even"
    ODD = "odd"
    UNREACHABLE = "unreachable"


@dataclass(frozen=True)
class AltWalkSpec:
    start: FrozenSet[Vertex]
    first_edge: EdgeKind
    graph: BipartiteGraph


State = Tuple[Vertex, Optional[EdgeKind]]


class Reachability:
    """Result of an alternating search: reached states and BFS parents.

    A state ``(v, kind)`` means ``v`` was reached by a walk whose last edge
    has ``kind``; start vertices appear as ``(v, None)``.
    """

    def __init__(self, parents: Dict[State, Optional[State]], first_edge: EdgeKind):
        self.parents = parents
        self.first_edge = first_edge

    @property
    def vertices(self) -> Set[Vertex]:
        return {v for v, _ in self.parents}

    def parities(self, v: Vertex) -> FrozenSet[Optional[EdgeKind]]:
        return frozenset(k for (x, k) in self.parents if x == v)

    def reached(self, v: Vertex, kind: Optional[EdgeKind] = None) -> bool:
        if kind is None:
            return any(x == v for x, _ in self.parents)
        return (v, kind) in self.parents

    def via(self, kind: EdgeKind) -> Set[Vertex]:
        return {v for v, k in self.parents if k is kind}

    def path(self, v: Vertex, kind: Optional[EdgeKind] = None) -> List[Vertex]:
        """Vertices of a walk from some start vertex to ``v``.

        With ``kind=None`` the shortest recorded state for ``v`` is used.
        """
        if kind is None and (v, None) not in self.parents:
            for k in (EdgeKind.MATCHED, EdgeKind.UNMATCHED):
                if (v, k) in self.parents:
                    kind = k
                    break
            else:
                raise KeyError(f"{v} was not reached")
        state: Optional[State] = (v, kind)
        if state not in self.parents:
            raise KeyError(f"{v} was not reached via a {kind} edge")
        out = []
        while state is not None:
            out.append(state[0])
            state = self.parents[state]
        out.reverse()
        return out


def alternating_reachable(spec: AltWalkSpec, matching: Matching) -> Reachability:
    """Every vertex reachable from ``spec.start`` by an alternating walk in
    ``spec.graph`` whose first edge has kind ``spec.first_edge``.

    Matched edges absent from ``spec.graph`` are not traversed.
    """
    graph = spec.graph
    adj = graph.adj
    edge_set = graph.edge_set
    parents: Dict[State, Optional[State]] = {}
    queue = deque()
    for s in sorted(spec.start):
        st = (s, None)
        if st not in parents:
            parents[st] = None
            queue.append(st)
    while queue:
        state = queue.popleft()
        v, last = state
        nxt = spec.first_edge if last is None else last.other
        mate = matching.partner(v)
        if nxt is EdgeKind.MATCHED:
            if mate is not None and make_edge(v, mate) in edge_set:
                st = (mate, EdgeKind.MATCHED)
                if st not in parents:
                    parents[st] = state
                    queue.append(st)
        else:
            for w in adj[v]:
                if w == mate:
                    continue
                st = (w, EdgeKind.UNMATCHED)
                if st not in parents:
                    parents[st] = state
                    queue.append(st)
    return Reachability(parents, spec.first_edge)


def find_augmenting_path(graph: BipartiteGraph, matching: Matching) -> Optional[List[Vertex]]:
    """Shortest augmenting path (vertex list, left end first) or ``None``."""
    free_left = frozenset(a for a in graph.left if not matching.is_matched(a))
    reach = alternating_reachable(AltWalkSpec(free_left, EdgeKind.UNMATCHED, graph), matching)
    for h in graph.right:
        if not matching.is_matched(h) and reach.reached(h, EdgeKind.UNMATCHED):
            return reach.path(h, EdgeKind.UNMATCHED)
    return None


def _augment_from(graph: BipartiteGraph, mate: Dict[Vertex, Vertex], root: Vertex) -> bool:
    parent: Dict[Vertex, Vertex] = {}
    queue = deque([root])
    seen_left = {root}
    while queue:
        a = queue.popleft()
        for h in graph.adj[a]:
            if h in parent or mate.get(a) == h:
                continue
            parent[h] = a
            b = mate.get(h)
            if b is None:
                while True:
                    a2 = parent[h]
                    prev = mate.get(a2)
                    mate[a2] = h
                    mate[h] = a2
                    if a2 == root:
                        return True
                    h = prev
            if b not in seen_left:
                seen_left.add(b)
                queue.append(b)
    return False


def maximum_matching(graph: BipartiteGraph, initial: Optional[Matching] = None) -> Matching:
    """Maximum-cardinality matching, grown from ``initial`` if given.

    Vertices matched by ``initial`` stay matched.  The result depends only
    on the graph's vertex and edge order.
    """
    mate: Dict[Vertex, Vertex] = {}
    if initial is not None:
        for a, h in initial.edges:
            if not graph.has_edge(a, h):
                raise ValueError(f"initial matching edge ({a},{h}) is not in the graph")
            mate[a] = h
            mate[h] = a
    for a in graph.left:
        if a not in mate and graph.adj[a]:
            _augment_from(graph, mate, a)
    return Matching((a, mate[a]) for a in graph.left if a in mate)


def _require_matching_in(graph: BipartiteGraph, matching: Matching):
    for e in matching.edges:
        if e not in graph.edge_set:
            raise ValueError(f"matching edge {e} is not an edge of the graph")


def konig_cover(graph: BipartiteGraph, max_matching: Matching) -> Set[Vertex]:
    """Minimum vertex cover built from a maximum matching."""
    _require_matching_in(graph, max_matching)
    free_left = frozenset(a for a in graph.left if not max_matching.is_matched(a))
    reach = alternating_reachable(AltWalkSpec(free_left, EdgeKind.UNMATCHED, graph), max_matching)
    z = reach.vertices
    for h in graph.right:
        if h in z and not max_matching.is_matched(h):
            raise NotMaximum("matching is not maximum", reach.path(h))
    return {a for a in graph.left if a not in z} | {h for h in graph.right if h in z}


def dm_labels(graph: BipartiteGraph, max_matching: Matching) -> Dict[Vertex, DMLabel]:
    """Even / odd / unreachable label of every vertex of ``graph``."""
    _require_matching_in(graph, max_matching)
    even: Set[Vertex] = set()
    odd: Set[Vertex] = set()
    for side in (graph.left, graph.right):
        free = frozenset(v for v in side if not max_matching.is_matched(v))
        reach = alternating_reachable(AltWalkSpec(free, EdgeKind.UNMATCHED, graph), max_matching)
        for v, kind in reach.parents:
            if kind is EdgeKind.UNMATCHED:
                if not max_matching.is_matched(v):
                    raise NotMaximum("matching is not maximum", reach.path(v, kind))
                odd.add(v)
            else:
                even.add(v)
    both = even & odd
    if both:
        raise NotMaximum(f"vertex {min(both)} is both even and odd; matching is not maximum")
    labels = {}
    for v in graph.vertices:
        if v in even:
            labels[v] = DMLabel.EVEN
        elif v in odd:
            labels[v] = DMLabel.ODD
        else:
            labels[v] = DMLabel.UNREACHABLE
    return labels


def symmetric_difference(m: Matching, alt: Iterable[Edge]) -> Matching:
    """``(m - alt) | (alt - m)`` for an alternating path or cycle ``alt``."""
    alt_edges = {make_edge(*e) for e in alt}
    if not alt_edges:
        return m
    deg: Dict[Vertex, List[Edge]] = {}
    for e in alt_edges:
        for v in e:
            deg.setdefault(v, []).append(e)
    for v, es in deg.items():
        if len(es) > 2:
            raise NotAlternating(f"vertex {v} has degree {len(es)} in the alternating set")
        if len(es) == 2 and (es[0] in m.edges) == (es[1] in m.edges):
            raise NotAlternating(f"two consecutive {'matched' if es[0] in m.edges else 'unmatched'} edges at {v}")
    # connectivity: a single path or cycle
    start = next(iter(sorted(deg)))
    stack, seen = [start], {start}
    while stack:
        v = stack.pop()
        for a, b in deg[v]:
            w = b if a == v else a
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(deg):
        raise NotAlternating("alternating set is not connected")
    for v, es in deg.items():
        mate = m.partner(v)
        if mate is not None and make_edge(v, mate) not in alt_edges:
            if any(e not in m.edges for e in es):
                raise WouldDoubleMatch(f"{v} is matched outside the alternating set")
    return Matching((m.edges - alt_edges) | (alt_edges - m.edges))
