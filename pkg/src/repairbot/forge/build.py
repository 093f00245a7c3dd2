"""Build execution: compile + full test run over one commit snapshot.

A build is failing if compilation fails or at least one test case fails.
Logs follow a fixed machine-readable grammar and are the only thing the
monitoring stage is allowed to look at:

    BUILD <id> START <hh:mm>
    COMPILE ERROR <file>:<line>
    TEST PASS <name>
    TEST FAIL <name> at <file>:<line>
    TEST ERROR <name> <kind>
    BUILD <id> RESULT <passed|compile_error|test_failure>
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Mapping, Optional, Tuple

from ..minilang import (
    BUDGET_EXCEEDED,
    ERROR,
    FAIL,
    ParseError,
    ResolveError,
    TestReport,
    parse_program,
    parse_suite,
    run_tests,
)
from .clock import format_hhmm
from .repo import split_snapshot

PASSED = "passed"
COMPILE_ERROR = "compile_error"
TEST_FAILURE = "test_failure"

DEFAULT_BUILD_DURATION = 2
DEFAULT_CI_STEP_BUDGET = 10_000


@dataclass(frozen=True)
class BuildRecord:
    build_id: str
    project_id: str
    commit_id: str
    status: str
    failing_tests: Tuple[str, ...]
    log: str
    started_at: int
    finished_at: int

    def to_dict(self) -> dict:
        return {
            "build_id": self.build_id,
            "project_id": self.project_id,
            "commit_id": self.commit_id,
            "status": self.status,
            "failing_tests": list(self.failing_tests),
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "log": self.log,
        }

    @staticmethod
    def from_dict(data: dict) -> "BuildRecord":
        return BuildRecord(
            build_id=data["build_id"],
            project_id=data["project_id"],
            commit_id=data["commit_id"],
            status=data["status"],
            failing_tests=tuple(data["failing_tests"]),
            log=data["log"],
            started_at=data["started_at"],
            finished_at=data["finished_at"],
        )


def execute_build(build_id: str, project_id: str, commit_id: str,
                  files: Mapping[str, str], started_at: int, finished_at: int,
                  step_budget: int = DEFAULT_CI_STEP_BUDGET) -> BuildRecord:
    """Pure build execution over a snapshot; no forge state involved."""
    lines = [f"BUILD {build_id} START {format_hhmm(started_at)}"]
    sources, tests, _ = split_snapshot(files)

    status: str
    failing: List[str] = []
    error_location: Optional[Tuple[str, int]] = None
    report: Optional[TestReport] = None

    try:
        program = parse_program(sources)
        suite = parse_suite(tests)
        if not suite.tests:
            raise ResolveError("project has no tests", None)
    except ParseError as exc:
        error_location = (exc.file, exc.line)
        status = COMPILE_ERROR
    except ResolveError as exc:
        span = exc.span
        error_location = (span.file, span.line) if span else ("tests", 0)
        status = COMPILE_ERROR
    else:
        report = run_tests(program, suite, step_budget)
        status = PASSED if report.all_passed() else TEST_FAILURE

    if status == COMPILE_ERROR:
        lines.append(f"COMPILE ERROR {error_location[0]}:{error_location[1]}")
    else:
        for verdict in report.verdicts:
            if verdict.status == FAIL:
                lines.append(f"TEST FAIL {verdict.name} at "
                             f"{verdict.fail_file}:{verdict.fail_line}")
                failing.append(verdict.name)
            elif verdict.status == ERROR:
                lines.append(f"TEST ERROR {verdict.name} {verdict.error_kind}")
                failing.append(verdict.name)
            elif verdict.status == BUDGET_EXCEEDED:
                lines.append(f"TEST ERROR {verdict.name} budget_exceeded")
                failing.append(verdict.name)
            else:
                lines.append(f"TEST PASS {verdict.name}")

    lines.append(f"BUILD {build_id} RESULT {status}")
    return BuildRecord(
        build_id=build_id,
        project_id=project_id,
        commit_id=commit_id,
        status=status,
        failing_tests=tuple(failing),
        log="\n".join(lines) + "\n",
        started_at=started_at,
        finished_at=finished_at,
    )
