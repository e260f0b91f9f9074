"""First and second choices (f, s) of applicants in HA and HAT instances."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet

from .errors import ValidationError
from .graph import BipartiteGraph, Matching, Vertex
from .instance import Instance
from .matching_core import DMLabel, dm_labels, maximum_matching


def _require_augmented(inst: Instance):
    if not inst.variant.one_sided:
        raise ValidationError("f/s structure is defined for HA and HAT instances")
    if not inst.augmented:
        raise ValidationError("instance must carry last resorts")


@dataclass(frozen=True)
class FSHA:
    f: Dict[Vertex, Vertex]
    s: Dict[Vertex, Vertex]
    h_f: FrozenSet[Vertex]


@lru_cache(maxsize=512)
def compute_fs_ha(inst: Instance) -> FSHA:
    _require_augmented(inst)
    f = {}
    for a in inst.left:
        top = inst.prefs[a][0]
        if len(top) != 1:
            raise ValidationError(f"{a} has a tied first choice; use compute_fs_hat")
        (f[a],) = top
    h_f = frozenset(f.values())
    s = {}
    for a in inst.left:
        for g in inst.prefs[a]:
            (h,) = g
            if h not in h_f:
                s[a] = h
                break
    return FSHA(f, s, h_f)


@dataclass(frozen=True)
class FSHAT:
    f: Dict[Vertex, FrozenSet[Vertex]]
    s: Dict[Vertex, FrozenSet[Vertex]]
    g_f: BipartiteGraph
    labels: Dict[Vertex, DMLabel]
    max_f_matching: Matching

    @property
    def max_f_size(self) -> int:
        return len(self.max_f_matching)


@lru_cache(maxsize=512)
def compute_fs_hat(inst: Instance) -> FSHAT:
    """f(a) = top tie group; s(a) = even houses of G_f in a's best group containing one."""
    _require_augmented(inst)
    f = {a: inst.prefs[a][0] for a in inst.left}
    g_f = BipartiteGraph(inst.left, inst.right, [(a, h) for a in inst.left for h in sorted(f[a])])
    mf = maximum_matching(g_f)
    labels = dm_labels(g_f, mf)
    s = {}
    for a in inst.left:
        for g in inst.prefs[a]:
            even = frozenset(h for h in g if labels[h] is DMLabel.EVEN)
            if even:
                s[a] = even
                break
    return FSHAT(f, s, g_f, labels, mf)


def first_choice_edges(inst: Instance):
    return [(a, h) for a in inst.left for h in sorted(inst.prefs[a][0])]
