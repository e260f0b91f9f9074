"""Exhaustive ground truth: matching enumeration, vote counting,
brute-force popularity and brute-force maximum weight.

Everything here is exponential.  Calls that enumerate rivals refuse graphs
with more than ``guard`` edges instead of sampling.
"""

from __future__ import annotations

from typing import Iterator, List, NamedTuple, Optional, Sequence

import numpy as np

from .errors import Infeasible, NotAPerfect, TooLarge
from .graph import BipartiteGraph, Matching
from .instance import Instance
from .verdict import Method, RivalMatching, Verdict
from .weights import Weights

DEFAULT_GUARD = 24


def _guard(graph: BipartiteGraph, guard: Optional[int]):
    if guard is not None and len(graph.edges) > guard:
        raise TooLarge(f"{len(graph.edges)} edges exceed the oracle guard of {guard}")


def _matching_ids(graph: BipartiteGraph, a_perfect: bool) -> List[tuple]:
    edges = graph.edges
    if a_perfect:
        by_left = {a: [] for a in graph.left}
        for i, (a, _) in enumerate(edges):
            by_left[a].append(i)
        out = []
        used = set()
        chosen = []

        def rec(k):
            if k == len(graph.left):
                out.append(tuple(sorted(chosen)))
                return
            for i in by_left[graph.left[k]]:
                h = edges[i][1]
                if h not in used:
                    used.add(h)
                    chosen.append(i)
                    rec(k + 1)
                    chosen.pop()
                    used.discard(h)

        rec(0)
        out.sort()
        return out

    out = []
    used = set()
    chosen = []

    def rec_all(start):
        out.append(tuple(chosen))
        for i in range(start, len(edges)):
            a, h = edges[i]
            if a not in used and h not in used:
                used.update((a, h))
                chosen.append(i)
                rec_all(i + 1)
                chosen.pop()
                used.difference_update((a, h))

    rec_all(0)
    return out


def enumerate_matchings(graph: BipartiteGraph, a_perfect: bool = False) -> Iterator[Matching]:
    """Every matching (or every left-perfect one) of ``graph``, once each,
    ordered lexicographically by the sorted list of edge positions."""
    ids = _matching_ids(graph, a_perfect)
    if a_perfect and not ids:
        raise Infeasible("graph has no left-perfect matching")
    edges = graph.edges
    for t in ids:
        yield Matching(edges[i] for i in t)


def candidate_matchings(inst: Instance) -> List[Matching]:
    """The matchings popularity is judged over: A-perfect ones for HA/HAT."""
    return list(enumerate_matchings(inst.graph(), a_perfect=inst.variant.one_sided))


class DeltaValue(NamedTuple):
    value: int
    prefers_m: int
    prefers_n: int


def delta(inst: Instance, m: Matching, n: Matching) -> DeltaValue:
    """Voters preferring ``m`` minus voters preferring ``n``."""
    pm = pn = 0
    for v in inst.voters:
        rm = inst.rank(v, m.partner(v))
        rn = inst.rank(v, n.partner(v))
        if rm < rn:
            pm += 1
        elif rn < rm:
            pn += 1
    return DeltaValue(pm - pn, pm, pn)


def is_popular_bruteforce(inst: Instance, m: Matching, guard: Optional[int] = DEFAULT_GUARD) -> Verdict:
    """Compare ``m`` with every rival using ``Δ(M,N) − Δ(N,M) ≥ 0``.

    A failing verdict carries the first rival, in enumeration order, among
    those with the largest ``Δ(N,M)``.
    """
    graph = inst.graph()
    _guard(graph, guard)
    if inst.variant.one_sided and not inst.is_a_perfect(m):
        raise NotAPerfect("brute-force comparison is over A-perfect matchings")
    best, best_val = None, 0
    for n in enumerate_matchings(graph, a_perfect=inst.variant.one_sided):
        if delta(inst, m, n).value - delta(inst, n, m).value < 0:
            val = delta(inst, n, m).value
            if val > best_val:
                best, best_val = n, val
    if best is None:
        return Verdict(True, Method.BRUTEFORCE, None)
    return Verdict(False, Method.BRUTEFORCE, RivalMatching(best, delta=best_val))


def max_weight_bruteforce(
    graph: BipartiteGraph,
    w: Weights,
    a_perfect: bool = False,
    guard: Optional[int] = DEFAULT_GUARD,
) -> int:
    _guard(graph, guard)
    return max(sum(w[e] for e in m.edges) for m in enumerate_matchings(graph, a_perfect))


class MatchingTable:
    """Pairwise vote margins and ``w_M`` values for all candidate matchings
    of one instance, computed in bulk.

    ``margin[i, j]`` is Δ(M_i, M_j); ``cross_weight[i, j]`` is the weight of
    M_j under the weights induced by M_i.
    """

    def __init__(self, inst: Instance, matchings: Optional[Sequence[Matching]] = None, guard: Optional[int] = DEFAULT_GUARD):
        _guard(inst.graph(), guard)
        self.inst = inst
        self.matchings = list(matchings) if matchings is not None else candidate_matchings(inst)
        voters = inst.voters
        k = len(self.matchings)
        ranks = np.empty((k, len(voters)), dtype=np.int64)
        for i, m in enumerate(self.matchings):
            ranks[i] = [inst.rank(v, m.partner(v)) for v in voters]
        self.ranks = ranks
        self.margin = np.sign(ranks[None, :, :] - ranks[:, None, :]).sum(axis=-1)

        edges = inst.edges
        vidx = {v: i for i, v in enumerate(voters)}
        x = np.zeros((k, len(edges)), dtype=np.int64)
        for i, m in enumerate(self.matchings):
            for e in m.edges:
                x[i, inst.edge_index[e]] = 1
        self.incidence = x
        self.weights = self._weights(vidx)
        self.cross_weight = self.weights @ x.T

    def _weights(self, vidx) -> np.ndarray:
        inst = self.inst
        edges = inst.edges
        r = self.ranks
        if inst.variant.one_sided:
            ai = np.array([vidx[a] for a, _ in edges], dtype=np.int64)
            re = np.array([inst.rank(a, h) for a, h in edges], dtype=np.int64)
            rm = r[:, ai]
            return 2 * (re[None, :] < rm) + (re[None, :] == rm)
        out = 2 * self.incidence
        for side in (0, 1):
            vi = np.array([vidx[e[side]] for e in edges], dtype=np.int64)
            re = np.array([inst.rank(e[side], e[1 - side]) for e in edges], dtype=np.int64)
            n_groups = np.array([len(inst.prefs[e[side]]) for e in edges], dtype=np.int64)
            rm = r[:, vi]
            unmatched = rm == n_groups[None, :]
            part = np.where(unmatched, 1, 2 * (re[None, :] < rm))
            out = out + np.where(self.incidence == 1, 0, part)
        return out

    def popular_mask(self) -> np.ndarray:
        d = self.margin
        return ((d - d.T) >= 0).all(axis=1)

    def max_weight(self) -> np.ndarray:
        """Brute-force maximum of ``w_{M_i}`` over all candidates, per i."""
        return self.cross_weight.max(axis=1)

    def own_weight(self) -> np.ndarray:
        return np.diagonal(self.cross_weight).copy()

    def verdict(self, i: int) -> Verdict:
        """Same answer and rival as :func:`is_popular_bruteforce`."""
        d = self.margin
        losing = (d[i] - d[:, i]) < 0
        if not losing.any():
            return Verdict(True, Method.BRUTEFORCE, None)
        vals = np.where(losing, d[:, i], np.iinfo(np.int64).min)
        j = int(np.argmax(vals))
        return Verdict(False, Method.BRUTEFORCE, RivalMatching(self.matchings[j], delta=int(d[j, i])))


def popular_matchings(inst: Instance, guard: Optional[int] = DEFAULT_GUARD) -> List[Matching]:
    table = MatchingTable(inst, guard=guard)
    return [m for m, ok in zip(table.matchings, table.popular_mask()) if ok]
