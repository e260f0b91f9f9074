"""Exhaustive cross-checking of the three popularity tests and of every
certificate they produce, one instance at a time or over a fuzzed batch."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .characterize import (
    blocking_pairs,
    find_popular,
    improve_matching_smi,
    optimization_check,
    structural_check,
    weight_gain,
)
from .errors import BadParameters, PopmatchError
from .graph import BipartiteGraph, Matching, Vertex
from .instance import Instance, Variant, add_last_resorts, random_instance
from .lp import check_cs, derive_structure, dual_feasible
from .matching_core import dm_labels, konig_cover, maximum_matching
from .oracle import DEFAULT_GUARD, MatchingTable, delta
from .structure import compute_fs_hat, first_choice_edges
from .verdict import WitnessKind
from .weights import g_m_plus, labels_smi, weights_for

CRITERIA = (
    "three_way",
    "forward_dual",
    "integrality",
    "reverse_derivation",
    "smi_improver",
    "konig_dm",
    "solver_vs_bruteforce",
    "find",
)


def digest(inst: Instance) -> str:
    return hashlib.sha256(inst.serialize().encode("utf-8")).hexdigest()


@dataclass
class Tally:
    checked: int = 0
    failed: int = 0

    def record(self, ok: bool) -> bool:
        self.checked += 1
        if not ok:
            self.failed += 1
        return ok


@dataclass
class InstanceReport:
    inst: Instance
    candidates: int = 0
    popular: int = 0
    tallies: Dict[str, Tally] = field(default_factory=lambda: {c: Tally() for c in CRITERIA})
    failures: List[dict] = field(default_factory=list)
    witness_kinds: Dict[str, int] = field(default_factory=dict)
    min_gain: Dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def note(self, criterion: str, ok: bool, m: Optional[Matching] = None, detail: str = ""):
        if not self.tallies[criterion].record(ok):
            self.failures.append(
                {"criterion": criterion, "matching": m.to_text() if m is not None else None, "detail": detail}
            )


def graph_identities(g: BipartiteGraph) -> Tuple[bool, str]:
    """König equality and DM-label invariance on one graph."""
    mm = maximum_matching(g)
    cover = konig_cover(g, mm)
    if len(cover) != len(mm):
        return False, f"cover size {len(cover)} != matching size {len(mm)}"
    if any(a not in cover and h not in cover for a, h in g.edges):
        return False, "Konig set is not a vertex cover"
    other = maximum_matching(g.reordered(list(reversed(g.edges))))
    if len(other) != len(mm):
        return False, "maximum matching size depends on edge order"
    if dm_labels(g, mm) != dm_labels(g, other):
        return False, "DM labels depend on the maximum matching"
    return True, ""


def _check_graphs(report: InstanceReport, graphs: Sequence[BipartiteGraph], m: Optional[Matching] = None):
    for g in graphs:
        try:
            ok, why = graph_identities(g)
        except PopmatchError as exc:
            ok, why = False, f"{type(exc).__name__}: {exc}"
        report.note("konig_dm", ok, m, why)


def check_instance(inst: Instance, guard: int = DEFAULT_GUARD) -> InstanceReport:
    """Run every agreement and certificate check over all candidate matchings.

    One-sided instances must already carry last resorts.
    """
    report = InstanceReport(inst)
    table = MatchingTable(inst, guard=guard)
    pop_mask = table.popular_mask()
    max_w = table.max_weight()
    own_w = table.own_weight()
    one_sided = inst.variant.one_sided
    graphs = [inst.graph()]
    if one_sided:
        graphs.append(compute_fs_hat(inst).g_f if inst.variant == Variant.HAT else inst.graph().subgraph(first_choice_edges(inst)))
    _check_graphs(report, graphs)

    for i, m in enumerate(table.matchings):
        report.candidates += 1
        brute = bool(pop_mask[i])
        report.popular += brute
        s = structural_check(inst, m)
        o = optimization_check(inst, m)
        solver_value = o.certificate.objective if o.popular else o.certificate.weight
        report.note("solver_vs_bruteforce", solver_value == int(max_w[i]), m, f"solver {solver_value} brute {max_w[i]}")
        agree = s.popular == o.popular == brute == bool(max_w[i] == own_w[i])
        report.note("three_way", agree, m, f"structural={s.popular} optimization={o.popular} bruteforce={brute}")

        if s.popular:
            y = s.certificate
            w = weights_for(inst, m)
            target = len(inst.left) if one_sided else 2 * len(m)
            ok = bool(dual_feasible(y, w)) and bool(check_cs(m, y, w)) and y.objective == target == int(max_w[i])
            report.note("forward_dual", ok, m, f"objective {y.objective} target {target} brute {max_w[i]}")
            allowed = {0, 1} if one_sided else {0, 1, 2}
            report.note("integrality", y.values() <= allowed, m, f"values {sorted(y.values())}")
        else:
            kind = s.certificate.kind.value
            report.witness_kinds[kind] = report.witness_kinds.get(kind, 0) + 1

        if one_sided and o.popular:
            try:
                part = derive_structure(inst, m, o.certificate)
                ok, why = part.ok, ",".join(part.failed())
            except PopmatchError as exc:
                ok, why = False, f"{type(exc).__name__}: {exc}"
            report.note("reverse_derivation", ok, m, why)

        if not one_sided:
            labels = labels_smi(inst, m)
            _check_graphs(report, [inst.graph().subgraph(g_m_plus(labels))], m)
            if not s.popular:
                witness = s.certificate
                try:
                    better = improve_matching_smi(inst, m, witness)
                    gain = weight_gain(inst, m, better)
                    need = 1 if witness.kind is WitnessKind.PLUS_PLUS_PATH_FROM_UNMATCHED else 2
                    ok, why = gain >= need, f"gain {gain}"
                    kind = witness.kind.value
                    report.min_gain[kind] = min(report.min_gain.get(kind, gain), gain)
                except (PopmatchError, AssertionError) as exc:
                    ok, why = False, f"{type(exc).__name__}: {exc}"
                report.note("smi_improver", ok, m, why)

    found = find_popular(inst)
    if found is None:
        report.note("find", not pop_mask.any(), None, "finder returned none but a popular matching exists")
    else:
        idx = table.matchings.index(found) if found in table.matchings else None
        ok = idx is not None and bool(pop_mask[idx])
        if ok and inst.variant == Variant.SMI:
            sizes = [len(mm) for mm, p in zip(table.matchings, pop_mask) if p]
            ok = not blocking_pairs(inst, found) and len(found) == min(sizes)
        report.note("find", ok, found, "finder output is not popular (or not minimum size)")
    return report


def delta_antisymmetry(seed: int, pairs: int, guard: int = DEFAULT_GUARD) -> Tally:
    """Check Δ(M,N) = −Δ(N,M) on random pairs of matchings of random instances."""
    rng = random.Random(seed)
    tally = Tally()
    variants = list(Variant)
    while tally.checked < pairs:
        variant = variants[tally.checked % 3]
        inst = random_instance(rng.randrange(2**31), variant, rng.randint(1, 4), rng.randint(1, 4),
                               edge_density=rng.choice((0.5, 0.75, 1.0)),
                               tie_prob=0.4 if variant == Variant.HAT else 0.0)
        if variant.one_sided:
            inst = add_last_resorts(inst)
        ms = MatchingTable(inst, guard=guard).matchings
        for _ in range(min(50, pairs - tally.checked)):
            m, n = rng.choice(ms), rng.choice(ms)
            d1, d2 = delta(inst, m, n), delta(inst, n, m)
            tally.record(d1.value == -d2.value and d1.prefers_m == d2.prefers_n)
    return tally


# -- fuzzing ------------------------------------------------------------------


@dataclass(frozen=True)
class FuzzConfig:
    seed: int
    count: int
    variant: Variant
    left: Tuple[int, int] = (1, 4)
    right: Tuple[int, int] = (1, 4)
    tie_prob: Optional[float] = None
    guard: int = DEFAULT_GUARD

    def validate(self):
        if self.count < 0:
            raise BadParameters("count must be nonnegative")
        for lo, hi in (self.left, self.right):
            if lo < 1 or hi < lo:
                raise BadParameters("size ranges must satisfy 1 <= lo <= hi")
        if self.tie_prob is not None and self.variant != Variant.HAT and self.tie_prob:
            raise BadParameters("tie_prob must be 0 unless the variant is hat")
        worst = self.left[1] * self.right[1] + (self.left[1] if self.variant.one_sided else 0)
        if worst > self.guard:
            raise BadParameters(f"sizes allow {worst} edges, above the oracle guard of {self.guard}")


def fuzz_instance(cfg: FuzzConfig, index: int) -> Instance:
    rng = random.Random(f"{cfg.seed}:{cfg.variant.value}:{index}")
    nl = rng.randint(*cfg.left)
    nr = rng.randint(*cfg.right)
    density = rng.choice((0.4, 0.6, 0.8, 1.0))
    tie = cfg.tie_prob
    if tie is None:
        tie = rng.choice((0.0, 0.3, 0.6)) if cfg.variant == Variant.HAT else 0.0
    inst = random_instance(rng.randrange(2**31), cfg.variant, nl, nr, edge_density=density, tie_prob=tie)
    return add_last_resorts(inst) if cfg.variant.one_sided else inst


def _run_one(args) -> Tuple[int, InstanceReport]:
    cfg, index = args
    return index, check_instance(fuzz_instance(cfg, index), cfg.guard)


@dataclass
class FuzzSummary:
    config: FuzzConfig
    instances: int = 0
    candidates: int = 0
    popular: int = 0
    with_popular: int = 0
    tallies: Dict[str, Tally] = field(default_factory=lambda: {c: Tally() for c in CRITERIA})
    witness_kinds: Dict[str, int] = field(default_factory=dict)
    min_gain: Dict[str, int] = field(default_factory=dict)
    failing: List[Tuple[int, InstanceReport]] = field(default_factory=list)

    @property
    def disagreements(self) -> int:
        return self.tallies["three_way"].failed

    @property
    def ok(self) -> bool:
        return not self.failing

    def add(self, index: int, rep: InstanceReport):
        self.instances += 1
        self.candidates += rep.candidates
        self.popular += rep.popular
        self.with_popular += rep.popular > 0
        for c, t in rep.tallies.items():
            self.tallies[c].checked += t.checked
            self.tallies[c].failed += t.failed
        for k, n in rep.witness_kinds.items():
            self.witness_kinds[k] = self.witness_kinds.get(k, 0) + n
        for k, g in rep.min_gain.items():
            self.min_gain[k] = min(self.min_gain.get(k, g), g)
        if not rep.ok:
            self.failing.append((index, rep))

    def to_json(self) -> dict:
        cfg = self.config
        return {
            "seed": cfg.seed,
            "count": cfg.count,
            "variant": cfg.variant.value,
            "sizes": {"left": list(cfg.left), "right": list(cfg.right)},
            "tie_prob": cfg.tie_prob,
            "instances": self.instances,
            "candidates": self.candidates,
            "popular_candidates": self.popular,
            "instances_with_popular": self.with_popular,
            "disagreements": self.disagreements,
            "criteria": {c: {"checked": t.checked, "failed": t.failed} for c, t in self.tallies.items()},
            "witness_kinds": dict(sorted(self.witness_kinds.items())),
            "min_gain": dict(sorted(self.min_gain.items())),
            "failing_instances": [i for i, _ in self.failing],
        }


def run_fuzz(cfg: FuzzConfig, jobs: int = 1, progress: Optional[Callable[[int], None]] = None) -> FuzzSummary:
    """Check ``cfg.count`` generated instances; results are ordered by index."""
    cfg.validate()
    summary = FuzzSummary(cfg)
    work = [(cfg, i) for i in range(cfg.count)]
    if jobs > 1:
        from multiprocessing import Pool

        with Pool(jobs) as pool:
            results = pool.map(_run_one, work, chunksize=max(1, cfg.count // (4 * jobs)))
    else:
        results = map(_run_one, work)
    for index, rep in results:
        summary.add(index, rep)
        if progress:
            progress(index)
    return summary


# -- minimisation -------------------------------------------------------------


def _rebuild(base: Instance, drop: Tuple[Vertex, Vertex]) -> Optional[Instance]:
    """``base`` without one edge (and any vertex left isolated), or None."""
    a, h = drop
    prefs = {}
    for v, groups in base.prefs.items():
        other = h if v == a else a if v == h else None
        kept = [frozenset(x for x in g if x != other) for g in groups]
        prefs[v] = [g for g in kept if g]
    alive = {v for v in base.vertices if prefs.get(v) or any(v in g for gs in prefs.values() for g in gs)}
    left = [v for v in base.left if v in alive]
    right = [v for v in base.right if v in alive]
    if not left or not right:
        return None
    remap = {v: Vertex(v.side, i, v.name) for side in (left, right) for i, v in enumerate(side)}
    new_prefs = {remap[v]: [[remap[x] for x in g] for g in gs] for v, gs in prefs.items() if v in alive}
    try:
        return Instance(base.variant, [remap[v] for v in left], [remap[v] for v in right], new_prefs)
    except PopmatchError:
        return None


def minimize(inst: Instance, still_fails: Callable[[Instance], bool]) -> Instance:
    """Greedily delete edges while ``still_fails`` keeps holding.

    Works on the instance without last resorts; ``still_fails`` receives
    the re-augmented instance for HA/HAT.
    """
    augment = inst.variant.one_sided
    base = inst.without_last_resorts()
    changed = True
    while changed:
        changed = False
        for e in base.edges:
            cand = _rebuild(base, e)
            if cand is None:
                continue
            test = add_last_resorts(cand) if augment else cand
            try:
                fails = still_fails(test)
            except Exception:
                fails = True
            if fails:
                base = cand
                changed = True
                break
    return add_last_resorts(base) if augment else base


def repro_text(index: int, rep: InstanceReport, minimized: Instance) -> str:
    lines = [f"# fuzz instance {index}"]
    for f in rep.failures[:10]:
        lines.append(f"# {f['criterion']}: matching [{f['matching']}] {f['detail']}")
    return "\n".join(lines) + "\n" + minimized.serialize()

