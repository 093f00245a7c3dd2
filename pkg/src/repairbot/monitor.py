"""Pipeline stage 1: build-log analysis.

Classification is derived from log text alone, never from forge
internals: the bot only sees what CI artifacts expose. The log grammar
is fixed (see forge.build), so parsing is a line-prefix match.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Tuple

SUCCESS = "success"
COMPILE_ERROR = "compile_error"
TEST_FAILURE = "test_failure"

_RESULT_TO_KIND = {"passed": SUCCESS, "compile_error": COMPILE_ERROR,
                   "test_failure": TEST_FAILURE}


class MalformedLog(Exception):
    pass


class EmptyStream(Exception):
    pass


@dataclass(frozen=True)
class BuildClassification:
    build_id: str
    kind: str                       # success | compile_error | test_failure
    failing_tests: Tuple[str, ...]  # log order, deduplicated

    @property
    def eligible_for_repair(self) -> bool:
        return self.kind == TEST_FAILURE

    def to_dict(self) -> dict:
        return {"build_id": self.build_id, "kind": self.kind,
                "failing_tests": list(self.failing_tests),
                "eligible_for_repair": self.eligible_for_repair}


def classify_build(log: str) -> BuildClassification:
    """Classify one build from its log text.

    Raises MalformedLog when the RESULT line is missing or unreadable.
    """
    build_id = None
    result = None
    failing: List[str] = []
    seen = set()
    for line in log.splitlines():
        parts = line.split()
        if line.startswith("BUILD ") and len(parts) >= 4:
            if parts[2] == "START":
                build_id = parts[1]
            elif parts[2] == "RESULT":
                build_id = build_id or parts[1]
                result = parts[3]
        elif line.startswith("TEST FAIL ") and len(parts) >= 3:
            name = parts[2]
            if name not in seen:
                seen.add(name)
                failing.append(name)
        elif line.startswith("TEST ERROR ") and len(parts) >= 3:
            name = parts[2]
            if name not in seen:
                seen.add(name)
                failing.append(name)
    if result is None or result not in _RESULT_TO_KIND or build_id is None:
        raise MalformedLog("log has no readable RESULT line")
    kind = _RESULT_TO_KIND[result]
    if kind != TEST_FAILURE:
        failing = []
    return BuildClassification(build_id, kind, tuple(failing))


@dataclass(frozen=True)
class StreamStats:
    total: int
    passed: int
    failing: int
    compile_errors: int
    test_failures: int
    fail_ratio: float           # failing / total, 4 decimals
    test_failure_share: float   # test failures / failing, 4 decimals
    no_failures: bool           # share was undefined and reported as 0

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "passed": self.passed,
            "failing": self.failing,
            "compile_errors": self.compile_errors,
            "test_failures": self.test_failures,
            "fail_ratio": self.fail_ratio,
            "test_failure_share": self.test_failure_share,
            "no_failures": self.no_failures,
        }


def _round4(fraction: Fraction) -> float:
    return float(round(fraction, 4))


def stream_stats(classifications: Iterable[BuildClassification]) -> StreamStats:
    """Aggregate counts and ratios; exact rational math, 4-decimal output."""
    total = passed = compile_errors = test_failures = 0
    for c in classifications:
        total += 1
        if c.kind == SUCCESS:
            passed += 1
        elif c.kind == COMPILE_ERROR:
            compile_errors += 1
        else:
            test_failures += 1
    if total == 0:
        raise EmptyStream("no builds in stream")
    failing = compile_errors + test_failures
    fail_ratio = _round4(Fraction(failing, total))
    if failing == 0:
        return StreamStats(total, passed, failing, compile_errors, test_failures,
                           fail_ratio, 0.0, True)
    return StreamStats(total, passed, failing, compile_errors, test_failures,
                       fail_ratio, _round4(Fraction(test_failures, failing)), False)
