"""Relation reports and the deterministic numeric cross-check.

Reports serialize to stable JSON: keys sorted, fixed indentation, relations
ordered by id, no timestamps unless timings are explicitly requested, so a
repeated run yields byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional


@dataclass
class RelationResult:
    id: str
    status: str  # "pass" | "fail" | "not-applicable"
    checked: int = 0
    params: dict = field(default_factory=dict)
    witness: Optional[dict] = None
    numeric: Optional[dict] = None

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "status": self.status,
            "checked": self.checked,
            "params": self.params,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.numeric is not None:
            out["numeric"] = self.numeric
        return out


@dataclass
class SuiteReport:
    suite: str
    config: dict
    seed: int
    relations: list = field(default_factory=list)
    timings: Optional[dict] = None

    def add(self, rel: RelationResult):
        self.relations.append(rel)

    def summary(self) -> dict:
        counts = {"pass": 0, "fail": 0, "not-applicable": 0}
        for r in self.relations:
            counts[r.status] = counts.get(r.status, 0) + 1
        return {
            "total": len(self.relations),
            "pass": counts["pass"],
            "fail": counts["fail"],
            "not-applicable": counts["not-applicable"],
        }

    @property
    def failed(self) -> bool:
        return any(r.status == "fail" for r in self.relations)

    def to_json(self) -> dict:
        out = {
            "tool": "uqsl",
            "version": "0.1.0",
            "suite": self.suite,
            "config": self.config,
            "seed": self.seed,
            "relations": [r.to_json() for r in sorted(self.relations, key=lambda r: r.id)],
            "summary": self.summary(),
        }
        if self.timings is not None:
            out["timings"] = self.timings
        return out

    def write(self, path: str):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True, ensure_ascii=False)
            fh.write("\n")


def numeric_assignments(seed: int, rel_id: str, table, count: int = 3) -> list:
    """Deterministic rational test points, one dict per assignment.

    Values are derived from sha256 over (seed, relation id, trial, symbol) and
    kept away from 0 and +-1 so that denominators and inverses stay valid.
    """
    out = []
    for t in range(count):
        vals = {}
        for sym in table.symbols:
            h = hashlib.sha256(f"{seed}:{rel_id}:{t}:{sym}".encode()).digest()
            nume = 2 + h[0] % 7
            deno = 1 + h[1] % 5
            v = Fraction(nume, deno)
            step = 0
            while v in (0, 1, -1):
                step += 1
                v = Fraction(nume + step, deno)
            vals[sym] = v
        out.append(vals)
    return out


def numeric_check(seed: int, rel_id: str, pairs: list, count: int = 3, cap: int = 64) -> dict:
    """Evaluate (lhs, rhs) ring-element pairs at random-looking rational
    points; the symbolic checker has already compared them exactly, so this
    is an independent guard against a systematically broken equality test.
    """
    pairs = pairs[:cap]
    if not pairs:
        return {"assignments": count, "pairs": 0, "status": "pass"}
    table = pairs[0][0].table
    for vals in numeric_assignments(seed, rel_id, table, count):
        for lhs, rhs in pairs:
            if lhs.subst_numeric(vals) != rhs.subst_numeric(vals):
                return {"assignments": count, "pairs": len(pairs), "status": "fail"}
    return {"assignments": count, "pairs": len(pairs), "status": "pass"}
