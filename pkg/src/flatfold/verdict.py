"""Result documents returned by the deciders."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .model import format_length

SAT = "SAT"
UNSAT = "UNSAT"


@dataclass
class Verdict:
    """Outcome of a foldability decision.

    For satisfiable instances ``witness`` maps every angle name to "M",
    "V" or "F" and ``coords`` maps every vertex to its folded position.
    Unsatisfiable instances instead carry a structured ``reason`` whose
    ``kind`` field names the failing stage.  ``stats`` always reports
    instance and solver sizes.
    """

    status: str
    witness: Mapping[str, str] | None = None
    coords: Mapping[str, Fraction] | None = None
    reason: Mapping[str, object] | None = None
    stats: dict = field(default_factory=dict)

    @property
    def is_sat(self) -> bool:
        return self.status == SAT

    def to_document(self) -> dict:
        doc: dict = {"status": self.status}
        if self.witness is not None:
            doc["witness"] = dict(self.witness)
        if self.coords is not None:
            doc["coords"] = {v: format_length(x) for v, x in self.coords.items()}
        if self.reason is not None:
            doc["reason"] = dict(self.reason)
        doc["stats"] = dict(self.stats)
        return doc
