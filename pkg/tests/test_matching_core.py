import itertools

import pytest

from conftest import v
from popmatch.errors import NotAlternating, NotMaximum, WouldDoubleMatch
from popmatch.graph import BipartiteGraph, Matching, Side, Vertex
from popmatch.instance import random_instance
from popmatch.matching_core import (
    AltWalkSpec,
    DMLabel,
    EdgeKind,
    alternating_reachable,
    dm_labels,
    find_augmenting_path,
    konig_cover,
    maximum_matching,
    symmetric_difference,
)
from popmatch.oracle import enumerate_matchings
from popmatch.structure import compute_fs_hat, first_choice_edges


def g_f(inst):
    return inst.graph().subgraph(first_choice_edges(inst))


def complete(n, m):
    left = [Vertex(Side.LEFT, i, f"a{i + 1}") for i in range(n)]
    right = [Vertex(Side.RIGHT, j, f"h{j + 1}") for j in range(m)]
    return BipartiteGraph(left, right, [(a, h) for a in left for h in right])


def brute_max(graph):
    return max(len(m) for m in enumerate_matchings(graph))


def test_maximum_matching_examples(i2, i3):
    assert len(maximum_matching(compute_fs_hat(i3).g_f)) == 2
    assert len(compute_fs_hat(i3).g_f.edges) == 3
    assert len(maximum_matching(BipartiteGraph([], [], []))) == 0
    assert len(maximum_matching(g_f(i2))) == 1


def test_maximum_matching_against_enumeration():
    for seed in range(60):
        inst = random_instance(seed, "ha", 4, 4, 0.4)
        g = inst.graph()
        assert len(maximum_matching(g)) == brute_max(g)


def test_maximum_matching_keeps_initial():
    g = complete(3, 3)
    a1, h2 = g.left[0], g.right[1]
    m = maximum_matching(g, initial=Matching([(a1, h2)]))
    assert len(m) == 3 and m.is_matched(a1) and m.is_matched(h2)


def test_konig_examples(i2, i3):
    g = g_f(i2)
    m = Matching([(v(i2, "a1"), v(i2, "h1"))])
    assert konig_cover(g, m) == {v(i2, "h1")}
    assert konig_cover(BipartiteGraph([], [], []), Matching()) == set()
    g3 = compute_fs_hat(i3).g_f
    mm = maximum_matching(g3)
    cover = konig_cover(g3, mm)
    assert len(cover) == 2 and all(a in cover or h in cover for a, h in g3.edges)


def test_konig_rejects_non_maximum():
    g = complete(2, 2)
    with pytest.raises(NotMaximum) as exc:
        konig_cover(g, Matching([(g.left[0], g.right[0])]))
    assert exc.value.path


def test_konig_cover_is_minimum_by_enumeration():
    for seed in range(30):
        g = random_instance(seed, "ha", 3, 3, 0.5).graph()
        cover = konig_cover(g, maximum_matching(g))
        best = min(
            k
            for k in range(len(g.vertices) + 1)
            for c in itertools.combinations(g.vertices, k)
            if all(a in c or h in c for a, h in g.edges)
        )
        assert len(cover) == best


def test_dm_labels_i2(i2):
    g = g_f(i2)
    lab = dm_labels(g, Matching([(v(i2, "a1"), v(i2, "h1"))]))
    for n in ("a1", "a2", "a3", "h2", "h3", "l(a1)", "l(a2)", "l(a3)"):
        assert lab[v(i2, n)] is DMLabel.EVEN
    assert lab[v(i2, "h1")] is DMLabel.ODD


def test_dm_labels_perfect_and_isolated():
    g = complete(2, 2)
    lab = dm_labels(g, maximum_matching(g))
    assert set(lab.values()) == {DMLabel.UNREACHABLE}
    lone = Vertex(Side.LEFT, 0, "x")
    assert dm_labels(BipartiteGraph([lone], [], []), Matching())[lone] is DMLabel.EVEN


def test_dm_labels_rejects_non_maximum():
    g = complete(2, 2)
    with pytest.raises(NotMaximum):
        dm_labels(g, Matching([(g.left[0], g.right[0])]))


def _dm_by_paths(g, m):
    """Label by explicit enumeration of simple alternating paths."""
    free = [x for x in g.vertices if not m.is_matched(x)]
    even, odd = set(free), set()

    def walk(path):
        x = path[-1]
        last_matched = len(path) > 1 and m.partner(path[-2]) == x
        for y in g.adj[x]:
            if y in path:
                continue
            if len(path) > 1 and (m.partner(x) == y) == last_matched:
                continue
            if len(path) == 1 and m.partner(x) == y:
                continue
            (odd if len(path) % 2 == 1 else even).add(y)
            walk(path + [y])

    for s in free:
        walk([s])
    return {x: DMLabel.EVEN if x in even else DMLabel.ODD if x in odd else DMLabel.UNREACHABLE for x in g.vertices}


def test_dm_labels_against_path_enumeration_and_partition_facts():
    for seed in range(80):
        g = random_instance(seed, "hat", 4, 4, 0.45, 0.4).graph()
        m = maximum_matching(g)
        lab = dm_labels(g, m)
        assert lab == _dm_by_paths(g, m)
        other = maximum_matching(g.reordered(list(reversed(g.edges))))
        assert dm_labels(g, other) == lab
        for x, l in lab.items():
            if l is DMLabel.ODD:
                assert m.is_matched(x) and lab[m.partner(x)] is DMLabel.EVEN
            if l is DMLabel.UNREACHABLE:
                assert m.is_matched(x) and lab[m.partner(x)] is DMLabel.UNREACHABLE


def test_alternating_reachable_examples(i2):
    g = g_f(i2)
    a1, a2, h1 = v(i2, "a1"), v(i2, "a2"), v(i2, "h1")
    m = Matching([(a1, h1)])
    r = alternating_reachable(AltWalkSpec(frozenset({a2}), EdgeKind.UNMATCHED, g), m)
    assert r.reached(h1, EdgeKind.UNMATCHED) and r.reached(a1, EdgeKind.MATCHED)
    assert r.path(a1) == [a2, h1, a1]
    r = alternating_reachable(AltWalkSpec(frozenset({h1}), EdgeKind.MATCHED, g), m)
    assert r.reached(a1, EdgeKind.MATCHED)
    gc = complete(2, 2)
    pm = maximum_matching(gc)
    free = frozenset(x for x in gc.vertices if not pm.is_matched(x))
    r = alternating_reachable(AltWalkSpec(free, EdgeKind.UNMATCHED, gc), pm)
    assert r.vertices == set()


def test_find_augmenting_path():
    g = complete(2, 2)
    a1, a2 = g.left
    h1, h2 = g.right
    m = Matching([(a1, h1)])
    path = find_augmenting_path(g, m)
    assert path[0] == a2 and not m.is_matched(path[-1])
    assert len(symmetric_difference(m, list(zip(path, path[1:])))) == 2
    assert find_augmenting_path(g, maximum_matching(g)) is None


def test_symmetric_difference_examples(i2):
    a1, a2, h1 = v(i2, "a1"), v(i2, "a2"), v(i2, "h1")
    m = Matching([(a1, h1)])
    assert symmetric_difference(m, [(a2, h1), (a1, h1)]) == Matching([(a2, h1)])
    g = complete(2, 2)
    b1, b2 = g.left
    k1, k2 = g.right
    m = Matching([(b1, k1), (b2, k2)])
    out = symmetric_difference(m, [(b1, k1), (b1, k2), (b2, k2), (b2, k1)])
    assert len(out) == len(m) and out == Matching([(b1, k2), (b2, k1)])
    with pytest.raises(NotAlternating):
        symmetric_difference(Matching(), [(b1, k1), (b1, k2)])
    with pytest.raises(WouldDoubleMatch):
        symmetric_difference(Matching([(b1, k1)]), [(b2, k1)])
