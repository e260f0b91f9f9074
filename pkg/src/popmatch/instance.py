"""Preference instances for the HA, HAT and SMI problems.

An :class:`Instance` is immutable.  Preference lists are tuples of tie
groups (frozensets), most preferred first; strict variants only ever hold
singleton groups.  House-allocation instances can be augmented with
explicit last-resort houses ``l(a)``.
"""

from __future__ import annotations

import random
import re
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    AlreadyAugmented,
    BadParameters,
    NotAnEdge,
    ParseError,
    ValidationError,
)
from .graph import BipartiteGraph, Edge, Matching, Side, Vertex, make_edge

PrefList = Tuple[FrozenSet[Vertex], ...]


class Variant(str, Enum):
    HA = "ha"
    HAT = "hat"
    SMI = "smi"

    @property
    def one_sided(self) -> bool:
        return self is not Variant.SMI


class Instance:
    """A bipartite preference system.

    ``prefs`` holds a preference list for every left vertex, and for SMI
    also for every right vertex.  The edge set is derived from the lists.
    """

    def __init__(
        self,
        variant: Variant,
        left: Sequence[Vertex],
        right: Sequence[Vertex],
        prefs: Mapping[Vertex, Sequence[Iterable[Vertex]]],
    ):
        self.variant = Variant(variant)
        self.left: Tuple[Vertex, ...] = tuple(left)
        self.right: Tuple[Vertex, ...] = tuple(right)
        self.prefs: Dict[Vertex, PrefList] = {
            v: tuple(frozenset(g) for g in groups) for v, groups in prefs.items()
        }
        self._validate()
        self._rank: Dict[Vertex, Dict[Vertex, int]] = {
            v: {x: i for i, g in enumerate(groups) for x in g} for v, groups in self.prefs.items()
        }
        edges: List[Edge] = []
        for a in self.left:
            for g in self.prefs[a]:
                for h in sorted(g):
                    edges.append((a, h))
        self.edges: Tuple[Edge, ...] = tuple(edges)
        self.edge_index: Dict[Edge, int] = {e: i for i, e in enumerate(edges)}
        self._by_name = {v.name: v for v in self.left + self.right}
        self._graph = BipartiteGraph(self.left, self.right, self.edges)
        self._neighbors: Dict[Vertex, Tuple[Vertex, ...]] = {
            v: tuple(self._graph.adj[v]) for v in self.left + self.right
        }
        self._hash = None

    # -- validation ---------------------------------------------------------

    def _validate(self):
        names = set()
        for side, vs in ((Side.LEFT, self.left), (Side.RIGHT, self.right)):
            for i, v in enumerate(vs):
                if v.side != side or v.index != i:
                    raise ValidationError(f"vertex {v} has inconsistent side/index")
                if v.synthetic and side != Side.RIGHT:
                    raise ValidationError(f"synthetic vertex {v} must be a right vertex")
                if (side, v.name) in names:
                    raise ValidationError(f"duplicate vertex name {v.name}")
                names.add((side, v.name))
        left_set, right_set = set(self.left), set(self.right)
        if any(v.synthetic for v in self.right) and self.variant == Variant.SMI:
            raise ValidationError("SMI instances never carry last resorts")

        holders = set(self.left) | (right_set if self.variant == Variant.SMI else set())
        for v in self.prefs:
            if v not in holders:
                raise ValidationError(f"{v} may not hold a preference list in a {self.variant.value} instance")
        strict = self.variant != Variant.HAT
        for v in holders:
            groups = self.prefs.get(v)
            if not groups:
                raise ValidationError(f"vertex {v} is isolated (no preference list)")
            other = right_set if v.side == Side.LEFT else left_set
            seen = set()
            for g in groups:
                if not g:
                    raise ValidationError(f"empty tie group in preferences of {v}")
                if strict and len(g) != 1:
                    raise ValidationError(f"ties are not allowed in {self.variant.value} (preferences of {v})")
                for x in g:
                    if x not in other:
                        raise ValidationError(f"{v} ranks unknown or same-side vertex {x}")
                    if x in seen:
                        raise ValidationError(f"duplicate preference entry {x} for {v}")
                    seen.add(x)

        covered = {h for a in self.left for g in self.prefs[a] for h in g}
        for h in self.right:
            if h not in covered and not h.synthetic:
                raise ValidationError(f"vertex {h} is isolated")
        for h in self.right:
            if h.synthetic:
                owners = [a for a in self.left if any(h in g for g in self.prefs[a])]
                if len(owners) != 1 or self.prefs[owners[0]][-1] != frozenset({h}):
                    raise ValidationError(f"last resort {h} must be the unique last choice of one applicant")

        if self.variant == Variant.SMI:
            fwd = {(u, v) for u in self.left for g in self.prefs[u] for v in g}
            bwd = {(u, v) for v in self.right for g in self.prefs[v] for u in g}
            if fwd != bwd:
                (u, v) = sorted(fwd ^ bwd)[0]
                raise ValidationError(f"asymmetric neighbourhoods: only one of {u}, {v} lists the other")

    # -- queries ------------------------------------------------------------

    @property
    def augmented(self) -> bool:
        return any(h.synthetic for h in self.right)

    @property
    def vertices(self) -> Tuple[Vertex, ...]:
        return self.left + self.right

    @property
    def voters(self) -> Tuple[Vertex, ...]:
        return self.left if self.variant.one_sided else self.left + self.right

    def vertex(self, name: str) -> Vertex:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown vertex {name!r}") from None

    def graph(self) -> BipartiteGraph:
        return self._graph

    def neighbors(self, v: Vertex) -> Tuple[Vertex, ...]:
        return self._neighbors[v]

    def has_edge(self, x: Vertex, y: Vertex) -> bool:
        return make_edge(x, y) in self.edge_index

    def rank(self, owner: Vertex, other: Optional[Vertex]) -> int:
        """Tie-group index of ``other`` in ``owner``'s list; ``None`` ranks last."""
        if other is None:
            return len(self.prefs[owner])
        return self._rank[owner][other]

    def prefers(self, owner: Vertex, x: Optional[Vertex], y: Optional[Vertex]) -> bool:
        """True iff ``owner`` strictly prefers ``x`` to ``y``."""
        return self.rank(owner, x) < self.rank(owner, y)

    def last_resort(self, a: Vertex) -> Optional[Vertex]:
        last = self.prefs[a][-1]
        if len(last) == 1:
            (h,) = last
            if h.synthetic:
                return h
        return None

    def is_a_perfect(self, m: Matching) -> bool:
        return all(m.is_matched(a) for a in self.left)

    def without_last_resorts(self) -> "Instance":
        if not self.augmented:
            return self
        right = [h for h in self.right if not h.synthetic]
        prefs = {a: [g for g in self.prefs[a] if not any(h.synthetic for h in g)] for a in self.left}
        return Instance(self.variant, self.left, right, prefs)

    def with_variant(self, variant: Variant) -> "Instance":
        return Instance(variant, self.left, self.right, self.prefs)

    # -- identity -----------------------------------------------------------

    def _key(self):
        return (
            self.variant,
            self.left,
            self.right,
            tuple((v, self.prefs[v]) for v in self.vertices if v in self.prefs),
        )

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return (
            f"Instance({self.variant.value}, |L|={len(self.left)}, |R|={len(self.right)}, "
            f"|E|={len(self.edges)})"
        )

    def serialize(self) -> str:
        return serialize_instance(self)


# -- augmentation -------------------------------------------------------------


def add_last_resorts(inst: Instance) -> Instance:
    """Give every applicant a private, least preferred house ``l(a)``."""
    if not inst.variant.one_sided:
        raise ValidationError("last resorts only apply to HA and HAT instances")
    if inst.augmented:
        raise AlreadyAugmented("instance already has last-resort houses")
    right = list(inst.right)
    prefs = {a: list(inst.prefs[a]) for a in inst.left}
    for a in inst.left:
        lr = Vertex(Side.RIGHT, len(right), f"l({a.name})", True)
        right.append(lr)
        prefs[a].append(frozenset({lr}))
    return Instance(inst.variant, inst.left, right, prefs)


def ensure_last_resorts(inst: Instance) -> Instance:
    if inst.variant.one_sided and not inst.augmented:
        return add_last_resorts(inst)
    return inst


# -- text format --------------------------------------------------------------

_NAME = re.compile(r"^[^\s#;>()]+$")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_groups(body: str, lineno: int) -> List[List[str]]:
    groups = []
    for part in body.split(">"):
        part = part.strip()
        if not part:
            raise ParseError("empty preference group", lineno)
        if part.startswith("("):
            if not part.endswith(")"):
                raise ParseError(f"unbalanced parenthesis in {part!r}", lineno)
            names = part[1:-1].split()
            if not names:
                raise ParseError("empty tie group", lineno)
        else:
            names = part.split()
            if len(names) != 1:
                raise ParseError(f"ties must be parenthesised: {part!r}", lineno)
        for n in names:
            if not _NAME.match(n) and not re.match(r"^l\([^\s()]+\)$", n):
                raise ParseError(f"bad vertex name {n!r}", lineno)
        groups.append(names)
    return groups


def parse_instance(text) -> Instance:
    """Parse the line-oriented instance format (bytes or str)."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    variant = None
    left_names: Optional[List[str]] = None
    right_names: Optional[List[str]] = None
    raw_prefs: Dict[str, Tuple[int, List[List[str]]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if variant is None:
            m = re.match(r"^problem\s*:\s*(\S+)$", line)
            if not m:
                raise ParseError("first directive must be 'problem: ha|hat|smi'", lineno)
            try:
                variant = Variant(m.group(1).lower())
            except ValueError:
                raise ParseError(f"unknown problem {m.group(1)!r}", lineno) from None
            continue
        m = re.match(r"^(left|right)\s*:(.*)$", line)
        if m:
            names = m.group(2).split()
            for n in names:
                if not _NAME.match(n):
                    raise ParseError(f"bad vertex name {n!r}", lineno)
            if m.group(1) == "left":
                if left_names is not None:
                    raise ParseError("duplicate 'left' line", lineno)
                left_names = names
            else:
                if right_names is not None:
                    raise ParseError("duplicate 'right' line", lineno)
                right_names = names
            continue
        m = re.match(r"^pref\s+(\S+)\s*:(.*)$", line)
        if m:
            owner = m.group(1)
            if owner in raw_prefs:
                raise ValidationError(f"duplicate preference line for {owner} (line {lineno})")
            raw_prefs[owner] = (lineno, _parse_groups(m.group(2), lineno))
            continue
        raise ParseError(f"unrecognised line {line!r}", lineno)

    if variant is None:
        raise ParseError("missing 'problem:' line")
    if left_names is None or right_names is None:
        raise ParseError("missing 'left:' or 'right:' line")
    if len(set(left_names)) != len(left_names) or len(set(right_names)) != len(right_names):
        raise ValidationError("duplicate vertex name in declaration")
    if set(left_names) & set(right_names):
        raise ValidationError("left and right vertex names must differ")

    left = [Vertex(Side.LEFT, i, n) for i, n in enumerate(left_names)]
    right = [Vertex(Side.RIGHT, i, n) for i, n in enumerate(right_names)]
    by_name = {v.name: v for v in left + right}
    prefs: Dict[Vertex, List[List[Vertex]]] = {}
    for owner_name, (lineno, groups) in raw_prefs.items():
        if owner_name not in by_name:
            raise ValidationError(f"preference line for unknown vertex {owner_name} (line {lineno})")
        owner = by_name[owner_name]
        resolved = []
        for g in groups:
            seen_in_group = set()
            members = []
            for n in g:
                if n not in by_name:
                    raise ValidationError(f"{owner_name} ranks unknown vertex {n} (line {lineno})")
                if n in seen_in_group:
                    raise ValidationError(f"duplicate preference entry {n} for {owner_name} (line {lineno})")
                seen_in_group.add(n)
                members.append(by_name[n])
            resolved.append(members)
        flat = [n for g in groups for n in g]
        if len(flat) != len(set(flat)):
            dup = next(n for n in flat if flat.count(n) > 1)
            raise ValidationError(f"duplicate preference entry {dup} for {owner_name} (line {lineno})")
        prefs[owner] = resolved
    return Instance(variant, left, right, prefs)


def _format_groups(groups: PrefList) -> str:
    parts = []
    for g in groups:
        members = sorted(g)
        if len(members) == 1:
            parts.append(members[0].name)
        else:
            parts.append("(" + " ".join(v.name for v in members) + ")")
    return " > ".join(parts)


def serialize_instance(inst: Instance) -> str:
    """Canonical text form.  Last-resort houses are implicit and omitted."""
    base = inst.without_last_resorts()
    lines = [
        f"problem: {base.variant.value}",
        "left: " + " ".join(v.name for v in base.left),
        "right: " + " ".join(v.name for v in base.right),
    ]
    for v in base.vertices:
        if v in base.prefs:
            lines.append(f"pref {v.name}: {_format_groups(base.prefs[v])}")
    return "\n".join(lines) + "\n"


def parse_matching(inst: Instance, text) -> Matching:
    """Parse ``"a1 h1; a2 h2"``.

    In an augmented HA/HAT instance, applicants left unmatched are
    completed with their last-resort edge.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    pairs = []
    for chunk in re.split(r"[;\n]", text):
        chunk = _strip_comment(chunk)
        if not chunk:
            continue
        tokens = chunk.split()
        if len(tokens) != 2:
            raise ParseError(f"expected 'left right' pair, got {chunk!r}")
        try:
            x, y = inst.vertex(tokens[0]), inst.vertex(tokens[1])
        except KeyError as exc:
            raise NotAnEdge(str(exc.args[0])) from None
        if x.side == y.side or not inst.has_edge(x, y):
            raise NotAnEdge(f"({tokens[0]}, {tokens[1]}) is not an edge of the instance")
        pairs.append(make_edge(x, y))
    m = Matching(pairs)
    if inst.variant.one_sided and inst.augmented:
        m = complete_with_last_resorts(inst, m)
    return m


def complete_with_last_resorts(inst: Instance, m: Matching) -> Matching:
    extra = [(a, inst.last_resort(a)) for a in inst.left if not m.is_matched(a)]
    if not extra:
        return m
    if any(h is None for _, h in extra):
        raise ValidationError("instance has no last resorts to complete the matching with")
    return Matching(list(m.edges) + extra)


# -- random generation --------------------------------------------------------


def random_instance(
    seed: int,
    variant,
    n_left: int,
    n_right: int,
    edge_density: float = 1.0,
    tie_prob: float = 0.0,
) -> Instance:
    """Deterministic random instance (not augmented)."""
    variant = Variant(variant)
    if n_left < 1 or n_right < 1:
        raise BadParameters("sizes must be at least 1")
    if not 0 < edge_density <= 1:
        raise BadParameters("edge_density must lie in (0, 1]")
    if not 0 <= tie_prob <= 1:
        raise BadParameters("tie_prob must lie in [0, 1]")
    if tie_prob and variant != Variant.HAT:
        raise BadParameters("tie_prob must be 0 unless the variant is hat")
    rng = random.Random(seed)
    lp, rp = ("u", "v") if variant == Variant.SMI else ("a", "h")
    left = [Vertex(Side.LEFT, i, f"{lp}{i + 1}") for i in range(n_left)]
    right = [Vertex(Side.RIGHT, j, f"{rp}{j + 1}") for j in range(n_right)]
    adj = {v: [] for v in left + right}
    for a in left:
        for h in right:
            if rng.random() < edge_density:
                adj[a].append(h)
                adj[h].append(a)
    for a in left:
        if not adj[a]:
            h = rng.choice(right)
            adj[a].append(h)
            adj[h].append(a)
    for h in right:
        if not adj[h]:
            a = rng.choice(left)
            adj[a].append(h)
            adj[h].append(a)

    def sample(v):
        order = sorted(adj[v])
        rng.shuffle(order)
        groups = [[order[0]]]
        for x in order[1:]:
            if tie_prob and rng.random() < tie_prob:
                groups[-1].append(x)
            else:
                groups.append([x])
        return groups

    holders = left + right if variant == Variant.SMI else left
    prefs = {v: sample(v) for v in holders}
    return Instance(variant, left, right, prefs)
