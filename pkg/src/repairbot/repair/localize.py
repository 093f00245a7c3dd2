"""Spectrum-based fault localization over per-test statement coverage.

Scores follow the Ochiai formula: ef / sqrt((ef + nf) * (ef + ep)), where
ef/ep count failing/passing tests that execute the statement and nf/np
those that do not. Statements never executed by a failing test score zero
and are omitted from the ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

from ..minilang.runner import TestReport


class NoFailingTests(Exception):
    pass


@dataclass(frozen=True)
class SuspiciousStatement:
    stmt_id: int
    ef: int
    ep: int
    nf: int
    np: int
    score: float

    def to_dict(self) -> dict:
        return {"stmt_id": self.stmt_id, "ef": self.ef, "ep": self.ep,
                "nf": self.nf, "np": self.np, "score": self.score}


def localize(report: TestReport) -> List[SuspiciousStatement]:
    """Rank statements by suspiciousness, descending; ties by stmt id."""
    failing = set(report.failing_test_names())
    passing = set(report.passing_test_names())
    if not failing:
        raise NoFailingTests("localization needs at least one failing test")

    total_failing = len(failing)
    total_passing = len(passing)

    suspects = []
    for stmt_id in sorted(report.coverage):
        covered_by = report.coverage[stmt_id]
        ef = sum(1 for name in covered_by if name in failing)
        if ef == 0:
            continue
        ep = len(covered_by) - ef
        score = ef / math.sqrt((ef + (total_failing - ef)) * (ef + ep))
        suspects.append(SuspiciousStatement(
            stmt_id=stmt_id, ef=ef, ep=ep,
            nf=total_failing - ef, np=total_passing - ep, score=score))

    suspects.sort(key=lambda s: (-s.score, s.stmt_id))
    return suspects
