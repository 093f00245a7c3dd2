"""Test runner: executes a suite against a program and reports verdicts,
per-test statement coverage, and interpreter step usage.

run_tests is a pure function of (program, suite, step_budget): identical
inputs always produce identical reports, and no test can exceed the step
budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from .ast import Program, TestSuite
from .bytecode import (
    ERROR_KIND_NAMES,
    VERDICT_BUDGET,
    VERDICT_ERROR,
    VERDICT_FAIL,
    VERDICT_PASS,
    compile_image,
)
from .kernel import active_kernel

DEFAULT_STEP_BUDGET = 100_000

PASS = "pass"
FAIL = "fail"
ERROR = "error"
BUDGET_EXCEEDED = "budget_exceeded"

_STATUS_BY_CODE = {VERDICT_PASS: PASS, VERDICT_FAIL: FAIL,
                   VERDICT_ERROR: ERROR, VERDICT_BUDGET: BUDGET_EXCEEDED}


@dataclass(frozen=True)
class TestVerdict:
    name: str
    status: str                      # pass | fail | error | budget_exceeded
    fail_file: Optional[str] = None  # assert location when status == fail
    fail_line: Optional[int] = None
    error_kind: Optional[str] = None # division_by_zero | unknown_call | type_error

    def failed(self) -> bool:
        return self.status != PASS

    def to_dict(self) -> dict:
        d = {"name": self.name, "status": self.status}
        if self.status == FAIL:
            d["at"] = f"{self.fail_file}:{self.fail_line}"
        if self.status == ERROR:
            d["kind"] = self.error_kind
        return d


@dataclass(frozen=True)
class TestReport:
    verdicts: Tuple[TestVerdict, ...]
    coverage: Mapping[int, FrozenSet[str]]  # stmt_id -> names of tests that ran it
    total_steps: int

    def failing_test_names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.verdicts if v.failed())

    def passing_test_names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.verdicts if not v.failed())

    def all_passed(self) -> bool:
        return all(not v.failed() for v in self.verdicts)

    def verdict_for(self, name: str) -> TestVerdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "verdicts": [v.to_dict() for v in self.verdicts],
            "total_steps": self.total_steps,
        }


def run_tests(program: Program, suite: TestSuite,
              step_budget: int = DEFAULT_STEP_BUDGET,
              kernel=None) -> TestReport:
    """Run every test; runtime failures become per-test verdicts.

    ``kernel`` overrides the globally selected kernel (benchmarks and
    equivalence tests only).
    """
    if step_budget < 1:
        raise ValueError("step_budget must be >= 1")
    image = compile_image(program, suite)
    impl = kernel if kernel is not None else active_kernel()
    raw_verdicts, coverage_bits, steps = impl.execute(
        image.code, image.func_entries, image.func_nparams, image.func_nlocals,
        image.test_entries, image.test_nlocals, image.n_stmts, step_budget)

    verdicts = []
    for idx, (vcode, detail) in enumerate(raw_verdicts):
        name = image.test_names[idx]
        status = _STATUS_BY_CODE[vcode]
        if status == FAIL:
            site = image.assert_sites[detail]
            verdicts.append(TestVerdict(name, FAIL, fail_file=site.file, fail_line=site.line))
        elif status == ERROR:
            verdicts.append(TestVerdict(name, ERROR, error_kind=ERROR_KIND_NAMES[detail]))
        else:
            verdicts.append(TestVerdict(name, status))

    n_stmts = image.n_stmts
    cov: Dict[int, set] = {}
    for t, name in enumerate(image.test_names):
        row = t * n_stmts
        for sid in range(n_stmts):
            if coverage_bits[row + sid]:
                cov.setdefault(sid, set()).add(name)
    coverage = {sid: frozenset(names) for sid, names in cov.items()}

    return TestReport(tuple(verdicts), coverage, sum(steps))
