"""Max-weight matching with integral duals, and dual certificates.

Two dual regimes occur:

``a-perfect``
    dual of the applicant-perfect matching LP: applicant values are free in
    sign, house values are nonnegative.
``nonnegative``
    dual of the ordinary matching LP: every value is nonnegative.

The forward constructions (:func:`build_dual_ha`, :func:`build_dual_hat`,
:func:`build_dual_smi`) turn a structurally popular matching into a dual of
matching objective; the reverse derivations (:func:`derive_structure_ha`,
:func:`derive_structure_hat`) read the structure back off an optimal dual.
Every construction checks its own output and raises instead of repairing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Set, Tuple

from .errors import (
    Infeasible,
    OptimalityPreconditionViolated,
    StructuralPreconditionViolated,
)
from .graph import BipartiteGraph, Edge, Matching, Side, Vertex
from .instance import Instance, Variant
from .matching_core import AltWalkSpec, DMLabel, EdgeKind, alternating_reachable, maximum_matching
from .structure import compute_fs_ha, compute_fs_hat
from .weights import SMIEdgeLabels, Weights, g_m_plus, labels_smi, matching_weight, weight_house

A_PERFECT = "a-perfect"
NONNEGATIVE = "nonnegative"


class Mode(str, Enum):
    FREE = "free"
    LEFT_PERFECT = "left-perfect"

    @property
    def regime(self) -> str:
        return A_PERFECT if self is Mode.LEFT_PERFECT else NONNEGATIVE


@dataclass
class DualVector:
    y: Dict[Vertex, int]
    regime: str

    @property
    def objective(self) -> int:
        return sum(self.y.values())

    def values(self) -> Set[int]:
        return set(self.y.values())

    def __getitem__(self, v: Vertex) -> int:
        return self.y[v]

    def to_json(self) -> dict:
        return {
            "regime": self.regime,
            "y": {v.name: val for v, val in sorted(self.y.items())},
            "objective": self.objective,
        }


class Check(NamedTuple):
    ok: bool
    violation: object = None

    def __bool__(self):
        return self.ok


# -- Hungarian method ---------------------------------------------------------


def _hungarian(cost: List[List[int]]):
    """Min-cost perfect assignment on a square integer matrix.

    Returns ``(row_of_col, u, v)`` with ``u[i] + v[j] <= cost[i][j]``,
    tight on the assignment.  Indices are 0-based.  Column scans run in
    increasing index, so ties go to the lowest column.
    """
    n = len(cost)
    inf = float("inf")
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = cost[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    row_of_col = [p[j] - 1 for j in range(1, n + 1)]
    return row_of_col, u[1:], v[1:]


def max_weight_matching(graph: BipartiteGraph, w: Weights, mode: Mode = Mode.FREE) -> Tuple[Matching, DualVector]:
    """Maximum-weight matching and an integral optimal dual.

    ``LEFT_PERFECT`` restricts to matchings covering every left vertex and
    returns an ``a-perfect`` dual with every unmatched right vertex at 0.
    ``FREE`` returns a nonnegative dual; zero-weight edges are left out of
    the matching.
    """
    mode = Mode(mode)
    left, right = graph.left, graph.right
    n_l, n_r = len(left), len(right)
    if any(w[e] < 0 for e in graph.edges):
        raise ValueError("weights must be nonnegative")
    if mode is Mode.LEFT_PERFECT and n_l > n_r:
        raise Infeasible("more left than right vertices; no left-perfect matching")
    n = max(n_l, n_r)
    li = {a: i for i, a in enumerate(left)}
    ri = {h: j for j, h in enumerate(right)}
    big = sum(w[e] for e in graph.edges) + 1
    if mode is Mode.LEFT_PERFECT:
        cost = [[big] * n if i < n_l else [0] * n for i in range(n)]
    else:
        cost = [[0] * n for _ in range(n)]
    for a, h in graph.edges:
        cost[li[a]][ri[h]] = -w[(a, h)]
    row_of_col, u, v = _hungarian(cost)

    yr = [-x for x in u]
    yc = [-x for x in v]
    if mode is Mode.LEFT_PERFECT:
        t = min(yc[:n_r])
        yc = [x - t for x in yc]
        yr = [x + t for x in yr]
    else:
        t = -min(yr)
        yr = [x + t for x in yr]
        yc = [x - t for x in yc]

    edges = []
    for j, i in enumerate(row_of_col):
        if i < n_l and j < n_r:
            e = (left[i], right[j])
            if e in graph.edge_set:
                if mode is Mode.LEFT_PERFECT or w[e] > 0:
                    edges.append(e)
            elif mode is Mode.LEFT_PERFECT:
                raise Infeasible("no left-perfect matching exists")
    m = Matching(edges)
    if mode is Mode.LEFT_PERFECT and len(m) != n_l:
        raise Infeasible("no left-perfect matching exists")
    y = {a: yr[i] for i, a in enumerate(left)}
    y.update({h: yc[j] for j, h in enumerate(right)})
    dual = DualVector(y, mode.regime)

    primal = matching_weight(w, m)
    if dual.objective != primal:
        raise AssertionError(f"strong duality failed: primal {primal}, dual {dual.objective}")
    feas = dual_feasible(dual, w)
    if not feas:
        raise AssertionError(f"solver dual infeasible: {feas.violation}")
    return m, dual


# -- dual checks ----------------------------------------------------------------


def dual_feasible(y: DualVector, w: Weights) -> Check:
    """``y(u) + y(v) >= w(u, v)`` on every weighted edge, plus the regime's signs."""
    for v in sorted(y.y):
        val = y.y[v]
        if val < 0 and (y.regime == NONNEGATIVE or v.side == Side.RIGHT):
            return Check(False, ("negative", v, val))
    for e in sorted(w):
        a, h = e
        if a not in y.y or h not in y.y:
            return Check(False, ("missing", a if a not in y.y else h, None))
        if y.y[a] + y.y[h] < w[e]:
            return Check(False, ("edge", e, y.y[a] + y.y[h] - w[e]))
    return Check(True)


def check_cs(m: Matching, y: DualVector, w: Weights) -> Check:
    """Complementary slackness of ``(m, y)``: matched edges tight, positive
    right vertices (and, in the nonnegative regime, left ones) saturated."""
    for e in m.sorted_edges():
        a, h = e
        if y.y.get(a, 0) + y.y.get(h, 0) != w[e]:
            return Check(False, ("slack-edge", e, y.y.get(a, 0) + y.y.get(h, 0) - w[e]))
    for v in sorted(y.y):
        if y.y[v] > 0 and not m.is_matched(v):
            if v.side == Side.RIGHT or y.regime == NONNEGATIVE:
                return Check(False, ("unsaturated", v, y.y[v]))
    return Check(True)


# -- HA forward construction ----------------------------------------------------


@dataclass(frozen=True)
class StructuralPartitionHA:
    a_f: FrozenSet[Vertex]
    a_s: FrozenSet[Vertex]
    h_f: FrozenSet[Vertex]
    f: Dict[Vertex, Vertex]
    s: Dict[Vertex, Vertex]


def partition_ha(inst: Instance, m: Matching) -> StructuralPartitionHA:
    fs = compute_fs_ha(inst)
    a_f, a_s = set(), set()
    for a in inst.left:
        mate = m.partner(a)
        if mate == fs.f[a]:
            a_f.add(a)
        elif mate == fs.s[a]:
            a_s.add(a)
        else:
            raise StructuralPreconditionViolated(f"M({a}) = {mate} is neither f({a}) nor s({a})")
    return StructuralPartitionHA(frozenset(a_f), frozenset(a_s), fs.h_f, fs.f, fs.s)


def _assert_certificate(y: DualVector, w: Weights, target: int):
    feas = dual_feasible(y, w)
    if not feas:
        raise StructuralPreconditionViolated(f"constructed dual is infeasible: {feas.violation}")
    if y.objective != target:
        raise StructuralPreconditionViolated(f"constructed dual has objective {y.objective}, expected {target}")


def build_dual_ha(inst: Instance, m: Matching, part: Optional[StructuralPartitionHA] = None) -> DualVector:
    """0/1 dual from the A_f / A_s split: applicants in A_s and houses in H_f get 1."""
    part = part or partition_ha(inst, m)
    y = {a: (1 if a in part.a_s else 0) for a in inst.left}
    y.update({h: (1 if h in part.h_f else 0) for h in inst.right})
    dual = DualVector(y, A_PERFECT)
    _assert_certificate(dual, weight_house(inst, m), len(inst.left))
    return dual


# -- HAT forward construction ---------------------------------------------------


@dataclass(frozen=True)
class StructuralPartitionHAT:
    a_f: FrozenSet[Vertex]
    a_s: FrozenSet[Vertex]
    f: Dict[Vertex, FrozenSet[Vertex]]
    s: Dict[Vertex, FrozenSet[Vertex]]
    labels: Dict[Vertex, DMLabel]


def partition_hat(inst: Instance, m: Matching) -> StructuralPartitionHAT:
    fs = compute_fs_hat(inst)
    a_f, a_s = set(), set()
    for a in inst.left:
        mate = m.partner(a)
        if mate in fs.f[a]:
            a_f.add(a)
        elif mate in fs.s[a]:
            a_s.add(a)
        else:
            raise StructuralPreconditionViolated(f"M({a}) = {mate} lies outside f({a}) and s({a})")
    return StructuralPartitionHAT(frozenset(a_f), frozenset(a_s), fs.f, fs.s, fs.labels)


def build_dual_hat(inst: Instance, m: Matching, part: Optional[StructuralPartitionHAT] = None) -> DualVector:
    part = part or partition_hat(inst, m)
    lab = part.labels
    y = {}
    for a in inst.left:
        if lab[a] is DMLabel.ODD or (lab[a] is DMLabel.EVEN and a in part.a_s):
            y[a] = 1
        else:
            y[a] = 0
    for h in inst.right:
        y[h] = 0 if lab[h] is DMLabel.EVEN else 1
    dual = DualVector(y, A_PERFECT)
    _assert_certificate(dual, weight_house(inst, m), len(inst.left))
    return dual


def build_dual_house(inst: Instance, m: Matching) -> DualVector:
    if inst.variant == Variant.HA:
        return build_dual_ha(inst, m)
    return build_dual_hat(inst, m)


# -- SMI forward construction ---------------------------------------------------


@dataclass(frozen=True)
class SMIPathPartition:
    u_even: FrozenSet[Vertex]
    u_odd: FrozenSet[Vertex]
    v_even: FrozenSet[Vertex]
    v_odd: FrozenSet[Vertex]
    pp_edges: FrozenSet[Edge]

    @property
    def covered(self) -> FrozenSet[Vertex]:
        return self.u_even | self.u_odd | self.v_even | self.v_odd


def smi_path_partition(inst: Instance, m: Matching, labels: SMIEdgeLabels, gplus) -> SMIPathPartition:
    """Vertices on alternating paths through (+,+) edges, split by the side
    of the (+,+) edge they hang off."""
    graph = inst.graph().subgraph(gplus)
    near_u: Set[Vertex] = set()
    near_v: Set[Vertex] = set()
    pp = []
    for e in labels.plus_plus:
        u_p, v_p = e
        if not (m.is_matched(u_p) and m.is_matched(v_p)):
            raise StructuralPreconditionViolated(f"(+,+) edge {e} has an unmatched endpoint")
        pp.append(e)
        near_u |= alternating_reachable(AltWalkSpec(frozenset({u_p}), EdgeKind.MATCHED, graph), m).vertices
        near_v |= alternating_reachable(AltWalkSpec(frozenset({v_p}), EdgeKind.MATCHED, graph), m).vertices
    return SMIPathPartition(
        u_even=frozenset(x for x in near_u if x.side == Side.LEFT),
        v_odd=frozenset(x for x in near_u if x.side == Side.RIGHT),
        v_even=frozenset(x for x in near_v if x.side == Side.RIGHT),
        u_odd=frozenset(x for x in near_v if x.side == Side.LEFT),
        pp_edges=frozenset(pp),
    )


def build_dual_smi(
    inst: Instance,
    m: Matching,
    labels: Optional[SMIEdgeLabels] = None,
    gplus=None,
) -> Tuple[SMIPathPartition, DualVector]:
    """{0,1,2} dual: 2 on the even sides of the path family, 0 on the odd
    sides, 1 on other matched vertices, 0 on other unmatched ones."""
    labels = labels or labels_smi(inst, m)
    gplus = gplus if gplus is not None else g_m_plus(labels)
    part = smi_path_partition(inst, m, labels, gplus)
    if part.u_even & part.u_odd or part.v_even & part.v_odd:
        clash = sorted((part.u_even & part.u_odd) | (part.v_even & part.v_odd))
        raise StructuralPreconditionViolated(f"even and odd path sets overlap at {clash}")
    unmatched = sorted(x for x in part.covered if not m.is_matched(x))
    if unmatched:
        raise StructuralPreconditionViolated(f"path family reaches unmatched vertices {unmatched}")
    y = {}
    for x in inst.vertices:
        if x in part.u_even or x in part.v_even:
            y[x] = 2
        elif x in part.u_odd or x in part.v_odd:
            y[x] = 0
        else:
            y[x] = 1 if m.is_matched(x) else 0
    dual = DualVector(y, NONNEGATIVE)
    _assert_certificate(dual, labels.w, 2 * len(m))
    return part, dual


# -- reverse derivations --------------------------------------------------------


@dataclass
class DerivedPartition:
    a_0: FrozenSet[Vertex]
    a_1: FrozenSet[Vertex]
    h_0: FrozenSet[Vertex]
    h_1: FrozenSet[Vertex]
    a_1_prime: FrozenSet[Vertex] = frozenset()
    report: Dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.report.values())

    def failed(self) -> List[str]:
        return [k for k, v in self.report.items() if not v]


def _require_optimal_pair(inst: Instance, m: Matching, y: DualVector, w: Weights):
    if not inst.is_a_perfect(m):
        raise OptimalityPreconditionViolated("matching is not A-perfect")
    feas = dual_feasible(y, w)
    if not feas:
        raise OptimalityPreconditionViolated(f"dual infeasible: {feas.violation}")
    cs = check_cs(m, y, w)
    if not cs:
        raise OptimalityPreconditionViolated(f"complementary slackness fails: {cs.violation}")
    if y.objective != matching_weight(w, m):
        raise OptimalityPreconditionViolated("dual objective differs from matching weight")


def _split(inst: Instance, y: DualVector):
    a_0 = frozenset(a for a in inst.left if y.y[a] == 0)
    a_1 = frozenset(a for a in inst.left if y.y[a] == 1)
    h_0 = frozenset(h for h in inst.right if y.y[h] == 0)
    h_1 = frozenset(h for h in inst.right if y.y[h] == 1)
    return a_0, a_1, h_0, h_1


def derive_structure_ha(inst: Instance, m: Matching, y: DualVector, verify: bool = True) -> DerivedPartition:
    """Read f/s structure off an optimal ``(m, y)`` pair of an HA instance."""
    if verify:
        _require_optimal_pair(inst, m, y, weight_house(inst, m))
    fs = compute_fs_ha(inst)
    a_0, a_1, h_0, h_1 = _split(inst, y)
    report = {
        "zero_one": all(val in (0, 1) for val in y.y.values()),
        "a0_first_choice": all(m.partner(a) == fs.f[a] for a in a_0),
        "a1_first_or_second": all(m.partner(a) in (fs.f[a], fs.s[a]) for a in a_1),
        "h_f_matched": all(m.is_matched(h) for h in fs.h_f),
    }
    return DerivedPartition(a_0, a_1, h_0, h_1, frozenset(), report)


def derive_structure_hat(inst: Instance, m: Matching, y: DualVector, verify: bool = True) -> DerivedPartition:
    """Read the HAT structure off an optimal pair: A_1' and H_1 give a König
    cover of G_f whose size equals |M_f|."""
    if verify:
        _require_optimal_pair(inst, m, y, weight_house(inst, m))
    fs = compute_fs_hat(inst)
    a_0, a_1, h_0, h_1 = _split(inst, y)
    a_1p = frozenset(a for a in a_1 if fs.f[a] & h_0)
    cover = a_1p | h_1
    m_f = [e for e in m.edges if e in fs.g_f.edge_set]
    independent_max = len(maximum_matching(fs.g_f))
    report = {
        "zero_one": all(val in (0, 1) for val in y.y.values()),
        "a0_h1_paired": all(m.partner(a) in h_1 for a in a_0) and all(m.partner(h) in a_0 for h in h_1),
        "a0_in_f": all(m.partner(a) in fs.f[a] for a in a_0),
        "cover": all(a in cover or h in cover for a, h in fs.g_f.edges),
        "mf_count": len(m_f) == len(a_1p) + len(h_1),
        "mf_maximum": len(m_f) == independent_max == len(a_1p) + len(h_1),
        "a1_in_f_or_s": all(m.partner(a) in fs.f[a] | fs.s[a] for a in a_1),
    }
    return DerivedPartition(a_0, a_1, h_0, h_1, a_1p, report)


def derive_structure(inst: Instance, m: Matching, y: DualVector, verify: bool = True) -> DerivedPartition:
    if inst.variant == Variant.HA:
        return derive_structure_ha(inst, m, y, verify)
    if inst.variant == Variant.HAT:
        return derive_structure_hat(inst, m, y, verify)
    raise ValueError("reverse derivation is defined for HA and HAT")


def certificate_json(m: Matching, y: DualVector, w: Weights) -> dict:
    out = y.to_json()
    out["primal_value"] = matching_weight(w, m)
    out["cs_ok"] = bool(check_cs(m, y, w))
    out["feasible"] = bool(dual_feasible(y, w))
    return out
