"""Verdicts and the certificates they carry."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

from .graph import Matching, Vertex, path_edges


class Method(str, Enum):
    STRUCTURAL = "structural"
    OPTIMIZATION = "optimization"
    BRUTEFORCE = "bruteforce"


class WitnessKind(str, Enum):
    UNMATCHED_F_HOUSE = "UnmatchedFHouse"
    BAD_PARTNER = "BadPartner"
    PLUS_PLUS_CYCLE = "PlusPlusCycle"
    PLUS_PLUS_PATH_FROM_UNMATCHED = "PlusPlusPathFromUnmatched"
    TWO_PLUS_PLUS_PATH = "TwoPlusPlusPath"
    MF_NOT_MAXIMUM = "MfNotMaximum"


@dataclass(frozen=True)
class StructuralWitness:
    """Why a matching fails a structural test.

    ``payload`` is a vertex sequence: a single vertex for the HA/HAT kinds
    naming a vertex, otherwise the path (or cycle, when ``closed``).
    """

    kind: WitnessKind
    payload: Tuple[Vertex, ...]
    closed: bool = False

    @property
    def edges(self):
        return path_edges(self.payload, self.closed)

    def to_json(self) -> dict:
        return {
            "type": "witness",
            "kind": self.kind.value,
            "payload": [v.name for v in self.payload],
            "closed": self.closed,
        }


@dataclass(frozen=True)
class RivalMatching:
    """A matching that beats the tested one: more votes (``delta``) or more
    ``w_M`` weight (``weight``)."""

    matching: Matching
    delta: Optional[int] = None
    weight: Optional[int] = None

    def to_json(self) -> dict:
        out = {"type": "rival", "matching": [[a.name, h.name] for a, h in self.matching.sorted_edges()]}
        if self.delta is not None:
            out["delta"] = self.delta
        if self.weight is not None:
            out["weight"] = self.weight
        return out


@dataclass(frozen=True)
class Verdict:
    popular: bool
    method: Method
    certificate: Union[object, None] = None

    def to_json(self) -> dict:
        cert = self.certificate
        if cert is None:
            blob = None
        elif hasattr(cert, "to_json"):
            blob = cert.to_json()
            if "regime" in blob:
                blob = dict(blob, type="dual")
        else:
            blob = cert
        return {"popular": self.popular, "method": self.method.value, "certificate": blob}
