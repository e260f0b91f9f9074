"""Matching-dependent edge weights ``w_M`` and the SMI edge labels."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, List

from .errors import NotAPerfect, ValidationError
from .graph import BipartiteGraph, Edge, Matching
from .instance import Instance, Variant

Weights = Dict[Edge, int]


class Sign(str, Enum):
    PLUS = "+"
    ZERO = "0"
    MINUS = "-"


def _house_weights(inst: Instance, m: Matching) -> Weights:
    if not inst.is_a_perfect(m):
        missing = [a.name for a in inst.left if not m.is_matched(a)]
        raise NotAPerfect(f"applicants {', '.join(missing)} are unmatched")
    w = {}
    for a, h in inst.edges:
        r = inst.rank(a, h)
        rm = inst.rank(a, m.partner(a))
        w[(a, h)] = 2 if r < rm else (1 if r == rm else 0)
    return w


def weight_ha(inst: Instance, m: Matching) -> Weights:
    """2 if ``h`` beats ``M(a)`` for ``a``, 1 if ``h = M(a)``, 0 otherwise."""
    if inst.variant == Variant.SMI or any(len(g) > 1 for a in inst.left for g in inst.prefs[a]):
        raise ValidationError("weight_ha needs strict one-sided preferences")
    return _house_weights(inst, m)


def weight_hat(inst: Instance, m: Matching) -> Weights:
    """As :func:`weight_ha`, with houses tied to ``M(a)`` weighing 1."""
    if inst.variant == Variant.SMI:
        raise ValidationError("weight_hat needs one-sided preferences")
    return _house_weights(inst, m)


def weight_house(inst: Instance, m: Matching) -> Weights:
    return weight_ha(inst, m) if inst.variant == Variant.HA else weight_hat(inst, m)


@dataclass(frozen=True)
class SMIEdgeLabels:
    """Sign labels (alpha, beta) and weight labels (phi, psi) per edge.

    The two systems disagree at unmatched endpoints, so they are kept apart.
    """

    alpha: Dict[Edge, Sign]
    beta: Dict[Edge, Sign]
    phi: Dict[Edge, int]
    psi: Dict[Edge, int]
    w: Dict[Edge, int]

    def label(self, e: Edge):
        return (self.alpha[e], self.beta[e])

    def is_plus_plus(self, e: Edge) -> bool:
        return self.alpha[e] is Sign.PLUS and self.beta[e] is Sign.PLUS

    @property
    def plus_plus(self) -> List[Edge]:
        return [e for e in self.alpha if self.is_plus_plus(e)]


def labels_smi(inst: Instance, m: Matching) -> SMIEdgeLabels:
    if inst.variant != Variant.SMI:
        raise ValidationError("SMI labels need an SMI instance")
    alpha, beta, phi, psi, w = {}, {}, {}, {}, {}
    for u, v in inst.edges:
        e = (u, v)
        if e in m.edges:
            alpha[e] = beta[e] = Sign.ZERO
            phi[e] = psi[e] = 1
        else:
            for x, y, sign, weight in ((u, v, alpha, phi), (v, u, beta, psi)):
                mate = m.partner(x)
                if mate is None:
                    sign[e], weight[e] = Sign.PLUS, 1
                elif inst.prefers(x, y, mate):
                    sign[e], weight[e] = Sign.PLUS, 2
                else:
                    sign[e], weight[e] = Sign.MINUS, 0
        w[e] = phi[e] + psi[e]
    return SMIEdgeLabels(alpha, beta, phi, psi, w)


def g_m_plus(labels: SMIEdgeLabels) -> FrozenSet[Edge]:
    """Edges whose label is not (-, -)."""
    return frozenset(
        e for e in labels.alpha if not (labels.alpha[e] is Sign.MINUS and labels.beta[e] is Sign.MINUS)
    )


def g_m_plus_graph(inst: Instance, labels: SMIEdgeLabels) -> BipartiteGraph:
    return inst.graph().subgraph(g_m_plus(labels))


def weights_for(inst: Instance, m: Matching) -> Weights:
    """The variant's ``w_M``."""
    if inst.variant == Variant.SMI:
        return labels_smi(inst, m).w
    return weight_house(inst, m)


def matching_weight(w: Weights, m: Matching) -> int:
    return sum(w[e] for e in m.edges)
