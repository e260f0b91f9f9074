"""Structural and optimization popularity tests, the SMI improver and
popular-matching producers.

Every verdict carries a certificate: a dual vector for "popular" answers
from the structural and optimization tests, a :class:`StructuralWitness`
or a heavier :class:`RivalMatching` otherwise.
"""

from __future__ import annotations

from collections import deque
from typing import Optional, Sequence

from .errors import InvalidWitness, NotAlternating, NotAPerfect, ValidationError, WouldDoubleMatch
from .graph import BipartiteGraph, Matching, Vertex, path_edges
from .instance import Instance, Variant
from .lp import Mode, build_dual_ha, build_dual_hat, build_dual_smi, max_weight_matching
from .matching_core import (
    AltWalkSpec,
    DMLabel,
    EdgeKind,
    alternating_reachable,
    find_augmenting_path,
    maximum_matching,
    symmetric_difference,
)
from .structure import compute_fs_ha, compute_fs_hat
from .verdict import Method, RivalMatching, StructuralWitness, Verdict, WitnessKind
from .weights import SMIEdgeLabels, g_m_plus, labels_smi, matching_weight, weight_house

SMI_KINDS = (
    WitnessKind.PLUS_PLUS_CYCLE,
    WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED,
    WitnessKind.TWO_PLUS_PLUS_PATH,
)


def _require_one_sided(inst: Instance, m: Matching):
    if not inst.variant.one_sided:
        raise ValidationError("expected an HA or HAT instance")
    if not inst.augmented:
        raise ValidationError("instance must carry last resorts")
    if not inst.is_a_perfect(m):
        missing = [a.name for a in inst.left if not m.is_matched(a)]
        raise NotAPerfect(f"applicants {', '.join(missing)} are unmatched")


def _fail(kind: WitnessKind, payload: Sequence[Vertex], closed: bool = False) -> Verdict:
    return Verdict(False, Method.STRUCTURAL, StructuralWitness(kind, tuple(payload), closed))


# -- structural tests ---------------------------------------------------------


def structural_check_ha(inst: Instance, m: Matching) -> Verdict:
    """Popular iff every first-choice house is matched and every applicant
    holds its f or s house."""
    _require_one_sided(inst, m)
    fs = compute_fs_ha(inst)
    for h in sorted(fs.h_f):
        if not m.is_matched(h):
            return _fail(WitnessKind.UNMATCHED_F_HOUSE, (h,))
    for a in inst.left:
        if m.partner(a) not in (fs.f[a], fs.s[a]):
            return _fail(WitnessKind.BAD_PARTNER, (a,))
    return Verdict(True, Method.STRUCTURAL, build_dual_ha(inst, m))


def structural_check_hat(inst: Instance, m: Matching) -> Verdict:
    """Popular iff M restricted to G_f is a maximum matching of G_f and every
    applicant holds a house in f(a) or s(a)."""
    _require_one_sided(inst, m)
    fs = compute_fs_hat(inst)
    for a in inst.left:
        if m.partner(a) not in fs.f[a] | fs.s[a]:
            return _fail(WitnessKind.BAD_PARTNER, (a,))
    m_f = Matching(e for e in m.edges if e in fs.g_f.edge_set)
    if len(m_f) != fs.max_f_size:
        path = find_augmenting_path(fs.g_f, m_f)
        return _fail(WitnessKind.MF_NOT_MAXIMUM, path)
    return Verdict(True, Method.STRUCTURAL, build_dual_hat(inst, m))


def _with_mate_before(m: Matching, x: Vertex, tail):
    mate = m.partner(x)
    return ([mate] if mate is not None else []) + [x] + list(tail)


def smi_violation(
    inst: Instance,
    m: Matching,
    labels: Optional[SMIEdgeLabels] = None,
    gplus=None,
) -> Optional[StructuralWitness]:
    """First violated SMI condition, as a concrete path or cycle, or ``None``.

    Orient G_M^+ with unmatched edges left-to-right and matched edges
    right-to-left; alternating paths are then directed paths.  Cycles are
    looked for first, which keeps every reconstructed path simple.
    """
    labels = labels or labels_smi(inst, m)
    gplus = gplus if gplus is not None else g_m_plus(labels)
    graph = inst.graph().subgraph(gplus)
    pp = labels.plus_plus

    def reach(start, first):
        return alternating_reachable(AltWalkSpec(frozenset(start), first, graph), m)

    forward = {}
    for u, v in pp:
        r = reach({v}, EdgeKind.MATCHED)
        forward[(u, v)] = r
        if r.reached(u, EdgeKind.MATCHED):
            return StructuralWitness(WitnessKind.PLUS_PLUS_CYCLE, tuple(r.path(u, EdgeKind.MATCHED)), True)

    from_free_left = reach({x for x in inst.left if not m.is_matched(x)}, EdgeKind.UNMATCHED)
    from_free_right = reach({x for x in inst.right if not m.is_matched(x)}, EdgeKind.UNMATCHED)
    for u, v in pp:
        if from_free_left.reached(u):
            path = from_free_left.path(u) + [v]
            if m.is_matched(v):
                path.append(m.partner(v))
            return StructuralWitness(WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED, tuple(path))
        if from_free_right.reached(v):
            tail = reversed(from_free_right.path(v))
            return StructuralWitness(WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED, tuple(_with_mate_before(m, u, tail)))

    for e1 in pp:
        r = forward[e1]
        for e2 in pp:
            if e2 != e1 and r.reached(e2[0], EdgeKind.MATCHED):
                path = _with_mate_before(m, e1[0], r.path(e2[0], EdgeKind.MATCHED)) + [e2[1], m.partner(e2[1])]
                return StructuralWitness(WitnessKind.TWO_PLUS_PLUS_PATH, tuple(path))
    return None


def structural_check_smi(
    inst: Instance,
    m: Matching,
    labels: Optional[SMIEdgeLabels] = None,
    gplus=None,
) -> Verdict:
    if inst.variant != Variant.SMI:
        raise ValidationError("expected an SMI instance")
    labels = labels or labels_smi(inst, m)
    gplus = gplus if gplus is not None else g_m_plus(labels)
    witness = smi_violation(inst, m, labels, gplus)
    if witness is not None:
        return Verdict(False, Method.STRUCTURAL, witness)
    _, dual = build_dual_smi(inst, m, labels, gplus)
    return Verdict(True, Method.STRUCTURAL, dual)


def structural_check(inst: Instance, m: Matching) -> Verdict:
    if inst.variant == Variant.HA:
        return structural_check_ha(inst, m)
    if inst.variant == Variant.HAT:
        return structural_check_hat(inst, m)
    return structural_check_smi(inst, m)


# -- witness validation ---------------------------------------------------------


def _check_alternating(m: Matching, payload, closed: bool):
    edges = path_edges(payload, closed)
    kinds = [e in m.edges for e in edges]
    pairs = zip(kinds, kinds[1:] + kinds[:1]) if closed else zip(kinds, kinds[1:])
    if any(x == y for x, y in pairs):
        raise InvalidWitness("payload is not alternating")
    return edges, kinds


def validate_witness(inst: Instance, m: Matching, witness: StructuralWitness) -> None:
    """Raise :class:`InvalidWitness` unless ``witness`` really exhibits the
    violation its kind claims."""
    kind, payload = witness.kind, witness.payload
    if kind in (WitnessKind.UNMATCHED_F_HOUSE, WitnessKind.BAD_PARTNER):
        if len(payload) != 1 or not inst.variant.one_sided:
            raise InvalidWitness(f"{kind.value} names exactly one vertex of an HA/HAT instance")
        (x,) = payload
        if inst.variant == Variant.HA:
            fs = compute_fs_ha(inst)
            h_f, ok_houses = fs.h_f, (lambda a: {fs.f[a], fs.s[a]})
        else:
            fsh = compute_fs_hat(inst)
            h_f = frozenset().union(*fsh.f.values())
            ok_houses = lambda a: fsh.f[a] | fsh.s[a]  # noqa: E731
        if kind is WitnessKind.UNMATCHED_F_HOUSE:
            if x not in h_f or m.is_matched(x):
                raise InvalidWitness(f"{x} is not an unmatched first-choice house")
        elif x not in inst.left or m.partner(x) in ok_houses(x):
            raise InvalidWitness(f"{x} holds an admissible house")
        return

    if len(set(payload)) != len(payload) or len(payload) < 2:
        raise InvalidWitness("payload must list at least two distinct vertices")
    try:
        edges = path_edges(payload, witness.closed)
    except ValueError as exc:
        raise InvalidWitness(str(exc)) from None

    if kind is WitnessKind.MF_NOT_MAXIMUM:
        if inst.variant != Variant.HAT:
            raise InvalidWitness("MfNotMaximum applies to HAT instances")
        fs = compute_fs_hat(inst)
        m_f = Matching(e for e in m.edges if e in fs.g_f.edge_set)
        if witness.closed or any(e not in fs.g_f.edge_set for e in edges):
            raise InvalidWitness("augmenting path must be an open path of G_f")
        _, kinds = _check_alternating(m_f, payload, False)
        if kinds[0] or kinds[-1] or m_f.is_matched(payload[0]) or m_f.is_matched(payload[-1]):
            raise InvalidWitness("path is not augmenting for M_f")
        return

    if kind not in SMI_KINDS or inst.variant != Variant.SMI:
        raise InvalidWitness(f"{kind.value} does not apply to this instance")
    labels = labels_smi(inst, m)
    gplus = g_m_plus(labels)
    if any(e not in gplus for e in edges):
        raise InvalidWitness("payload leaves G_M^+")
    _check_alternating(m, payload, witness.closed)
    n_pp = sum(1 for e in edges if labels.is_plus_plus(e))
    if n_pp == 0:
        raise InvalidWitness("payload contains no (+,+) edge")
    if kind is WitnessKind.PLUS_PLUS_CYCLE:
        if not witness.closed:
            raise InvalidWitness("cycle witness must be closed")
    elif witness.closed:
        raise InvalidWitness("path witness must be open")
    elif kind is WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED:
        if m.is_matched(payload[0]) and m.is_matched(payload[-1]):
            raise InvalidWitness("neither endpoint is unmatched")
    elif n_pp < 2:
        raise InvalidWitness("path contains fewer than two (+,+) edges")


# -- optimization test ------------------------------------------------------------


def optimization_check(inst: Instance, m: Matching, weights=None, mode: Optional[Mode] = None) -> Verdict:
    """Popular iff ``m`` is a maximum-weight matching under its own ``w_M``
    (A-perfect matchings only for HA/HAT)."""
    if inst.variant.one_sided:
        _require_one_sided(inst, m)
        w = weights if weights is not None else weight_house(inst, m)
        mode = mode or Mode.LEFT_PERFECT
    else:
        w = weights if weights is not None else labels_smi(inst, m).w
        mode = mode or Mode.FREE
    best, dual = max_weight_matching(inst.graph(), w, mode)
    if dual.objective == matching_weight(w, m):
        return Verdict(True, Method.OPTIMIZATION, dual)
    return Verdict(False, Method.OPTIMIZATION, RivalMatching(best, weight=dual.objective))


# -- SMI improver -----------------------------------------------------------------


def improve_matching_smi(inst: Instance, m: Matching, witness: StructuralWitness) -> Matching:
    """``M xor payload``: a matching strictly heavier than ``m`` under ``w_M``.

    Cycles and two-(+,+) paths gain at least 2, paths with an unmatched
    endpoint at least 1.
    """
    if witness.kind not in SMI_KINDS:
        raise InvalidWitness(f"{witness.kind.value} is not an SMI violation")
    validate_witness(inst, m, witness)
    try:
        improved = symmetric_difference(m, witness.edges)
    except (NotAlternating, WouldDoubleMatch) as exc:
        raise InvalidWitness(str(exc)) from None
    w = labels_smi(inst, m).w
    gain = matching_weight(w, improved) - matching_weight(w, m)
    need = 1 if witness.kind is WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED else 2
    if gain < need:
        raise AssertionError(f"{witness.kind.value} gained {gain}, expected at least {need}")
    return improved


def weight_gain(inst: Instance, m: Matching, improved: Matching) -> int:
    w = labels_smi(inst, m).w
    return matching_weight(w, improved) - matching_weight(w, m)


# -- producers ------------------------------------------------------------------------


def find_popular_ha(inst: Instance) -> Optional[Matching]:
    """A popular matching of an augmented HA instance, or ``None``.

    Match on the f/s edges, then move one applicant onto each first-choice
    house left unmatched.
    """
    fs = compute_fs_ha(inst)
    g = BipartiteGraph(inst.left, inst.right, [(a, fs.f[a]) for a in inst.left] + [(a, fs.s[a]) for a in inst.left])
    mm = maximum_matching(g)
    if len(mm) < len(inst.left):
        return None
    mate = {a: mm.partner(a) for a in inst.left}
    taken = set(mate.values())
    for h in sorted(fs.h_f):
        if h not in taken:
            a = next(a for a in inst.left if fs.f[a] == h)
            taken.discard(mate[a])
            mate[a] = h
            taken.add(h)
    m = Matching(mate.items())
    return m if structural_check_ha(inst, m).popular else None


def find_popular_hat(inst: Instance) -> Optional[Matching]:
    """A popular matching of an augmented HAT instance, or ``None``.

    Grows a maximum matching of G_f inside the f/s edges that respect the
    even/odd/unreachable labels, then validates it.
    """
    fs = compute_fs_hat(inst)
    lab = fs.labels
    dead = (DMLabel.ODD, DMLabel.UNREACHABLE)
    edges = []
    for a in inst.left:
        for h in sorted(fs.f[a]):
            if lab[a] in dead and lab[h] in dead and DMLabel.ODD in (lab[a], lab[h]):
                continue
            edges.append((a, h))
        if lab[a] is DMLabel.EVEN:
            edges.extend((a, h) for h in sorted(fs.s[a] - fs.f[a]))
    g = BipartiteGraph(inst.left, inst.right, edges)
    m = maximum_matching(g, initial=fs.max_f_matching)
    if not inst.is_a_perfect(m):
        return None
    return m if structural_check_hat(inst, m).popular else None


def gale_shapley_smi(inst: Instance) -> Matching:
    """Left-proposing stable matching."""
    if inst.variant != Variant.SMI:
        raise ValidationError("expected an SMI instance")
    order = {u: [v for g in inst.prefs[u] for v in sorted(g)] for u in inst.left}
    nxt = {u: 0 for u in inst.left}
    holds = {}
    free = deque(inst.left)
    while free:
        u = free.popleft()
        if nxt[u] >= len(order[u]):
            continue
        v = order[u][nxt[u]]
        nxt[u] += 1
        cur = holds.get(v)
        if cur is None:
            holds[v] = u
        elif inst.prefers(v, u, cur):
            holds[v] = u
            free.append(cur)
        else:
            free.append(u)
    return Matching((u, v) for v, u in holds.items())


def blocking_pairs(inst: Instance, m: Matching):
    out = []
    for u, v in inst.edges:
        if (u, v) in m.edges:
            continue
        if inst.prefers(u, v, m.partner(u)) and inst.prefers(v, u, m.partner(v)):
            out.append((u, v))
    return out


def find_popular(inst: Instance) -> Optional[Matching]:
    if inst.variant == Variant.HA:
        return find_popular_ha(inst)
    if inst.variant == Variant.HAT:
        return find_popular_hat(inst)
    return gale_shapley_smi(inst)


def check(inst: Instance, m: Matching, method, guard: int = 24) -> Verdict:
    method = Method(method)
    if method is Method.STRUCTURAL:
        return structural_check(inst, m)
    if method is Method.OPTIMIZATION:
        return optimization_check(inst, m)
    from .oracle import is_popular_bruteforce

    return is_popular_bruteforce(inst, m, guard)
