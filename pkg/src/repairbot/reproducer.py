"""Pipeline stage 2: local reproduction of CI failures.

A failure is reproduced iff the locally failing test set equals the set
scraped from the CI log. Logs are never compared byte-wise: timestamps
differ between environments, test-failure identity is what matters.
Environment-dependent (flaky) projects pass locally by construction and
land in not_reproduced, which permanently ends their pipeline run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

from .minilang import TestReport, parse_program, parse_suite, run_tests
from .minilang.parser import ParseError, ResolveError
from .monitor import BuildClassification
from .forge.repo import split_snapshot
from .forge.seed import DEFAULT_LOCAL_STEP_BUDGET

REPRODUCED = "reproduced"
NOT_REPRODUCED = "not_reproduced"
COMPILE_ERROR_LOCALLY = "compile_error_locally"


class PreconditionViolation(Exception):
    pass


class SnapshotMissing(Exception):
    pass


@dataclass(frozen=True)
class ReproductionResult:
    build_id: str
    outcome: str                          # reproduced | not_reproduced | compile_error_locally
    local_failing_tests: Tuple[str, ...]
    report: Optional[TestReport]
    duration: int                         # logical minutes charged

    def to_dict(self) -> dict:
        return {
            "build_id": self.build_id,
            "outcome": self.outcome,
            "local_failing_tests": list(self.local_failing_tests),
            "duration": self.duration,
        }


def reproduce(classification: BuildClassification,
              snapshot: Mapping[str, str],
              step_budget: int = DEFAULT_LOCAL_STEP_BUDGET,
              duration: int = 0) -> ReproductionResult:
    """Check out the snapshot and re-run the build locally.

    ``duration`` is the logical cost the pipeline charges for this stage;
    reproduction itself is deterministic given (classification, snapshot).
    """
    if not classification.eligible_for_repair:
        raise PreconditionViolation(
            f"build {classification.build_id} is {classification.kind}, "
            "only test failures are reproduced")
    if not snapshot:
        raise SnapshotMissing(classification.build_id)

    sources, tests, _ = split_snapshot(snapshot)
    try:
        program = parse_program(sources)
        suite = parse_suite(tests)
    except (ParseError, ResolveError):
        return ReproductionResult(classification.build_id, COMPILE_ERROR_LOCALLY,
                                  (), None, duration)

    report = run_tests(program, suite, step_budget)
    local_failing = report.failing_test_names()
    ci_failing = set(classification.failing_tests)
    if local_failing and set(local_failing) == ci_failing:
        outcome = REPRODUCED
    else:
        outcome = NOT_REPRODUCED
    return ReproductionResult(classification.build_id, outcome,
                              local_failing, report, duration)
