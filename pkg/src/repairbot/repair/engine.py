"""Candidate generation, validation against the full suite, and ranking.

Candidates are enumerated lazily in (suspiciousness rank, operator class,
position) order, deduplicated by the mutated program's canonical text, and
capped by the candidate budget. Validation is the plausibility gate: a
patch is plausible iff every test passes within the step budget. The
search never stops at the first plausible patch; ranking afterwards
prefers minimal, well-localized, small patches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

from ..minilang.ast import Program, find_statement, function_of_statement
from ..minilang.parser import ResolveError, resolve_program
from ..minilang.printer import prettyprint, prettyprint_file
from ..minilang.runner import DEFAULT_STEP_BUDGET, TestReport, TestSuite, run_tests
from ..udiff import changed_line_count, make_file_diff
from .edits import PatchApplyError, apply_edits
from .localize import SuspiciousStatement
from .operators import function_ingredients, statement_edits
from .patches import CANDIDATE, PLAUSIBLE, Patch

DEFAULT_CANDIDATE_BUDGET = 2_000


@dataclass
class ValidationResult:
    plausible: bool
    report: Optional[TestReport]   # None when the patched program fails to resolve
    reason: str                    # passed | test_failure | compile_error


def generate_candidates(program: Program,
                        suspects: Sequence[SuspiciousStatement],
                        budget: int = DEFAULT_CANDIDATE_BUDGET,
                        *,
                        project_id: str = "",
                        base_commit: str = "",
                        build_id: str = "") -> Iterator[Patch]:
    """Lazily enumerate single-edit candidate patches.

    Candidates that fail to re-resolve (out-of-scope ingredient, deleted
    binding) or that duplicate an earlier program are skipped and do not
    count against the budget. The input program is never mutated.
    """
    if budget <= 0:
        return
    base_text = prettyprint(program)
    seen = {base_text}
    emitted = 0
    for suspect in suspects:
        stmt = find_statement(program, suspect.stmt_id)
        if stmt is None:
            continue
        fn = function_of_statement(program, suspect.stmt_id)
        ingredients = function_ingredients(fn)
        for edit in statement_edits(stmt, ingredients):
            try:
                mutated = apply_edits(program, (edit,))
                resolve_program(mutated)
            except (PatchApplyError, ResolveError):
                continue
            mutated_text = prettyprint(mutated)
            if mutated_text in seen:
                continue
            seen.add(mutated_text)
            path = fn.span.file
            diff = make_file_diff(path, prettyprint_file(program, path),
                                  prettyprint_file(mutated, path))
            patch = Patch(
                patch_id=f"{build_id or 'local'}-x{emitted:05d}",
                project_id=project_id,
                base_commit=base_commit,
                build_id=build_id,
                edits=(edit,),
                diff=diff,
                operator=edit.operator,
                suspiciousness=suspect.score,
                candidate_index=emitted,
                found_at=0.0,
            )
            yield patch
            emitted += 1
            if emitted >= budget:
                return


def validate(program: Program, patch: Patch, suite: TestSuite,
             step_budget: int = DEFAULT_STEP_BUDGET) -> ValidationResult:
    """Run the full suite on the patched program; plausible iff all pass.

    Raises PatchApplyError when the edits do not apply to ``program``.
    A patched program that no longer resolves is simply not plausible.
    """
    mutated = apply_edits(program, patch.edits)
    try:
        resolve_program(mutated)
    except ResolveError:
        return ValidationResult(False, None, "compile_error")
    report = run_tests(mutated, suite, step_budget)
    if report.all_passed():
        if patch.status == CANDIDATE:
            patch.advance(PLAUSIBLE)
            patch.report_summary = report.to_dict()
        return ValidationResult(True, report, "passed")
    return ValidationResult(False, report, "test_failure")


def rank_plausible(patches: List[Patch]) -> List[Patch]:
    """Deterministic total order over plausible patches.

    Fewest edits, then highest suspiciousness at the edit site, then
    smallest diff, then earliest found, then candidate index as the
    final strict tie-break.
    """
    for patch in patches:
        if patch.status not in (PLAUSIBLE,):
            raise ValueError(f"patch {patch.patch_id} is {patch.status}, not plausible")
    return sorted(patches, key=lambda p: (
        len(p.edits),
        -p.suspiciousness,
        changed_line_count(p.diff),
        p.found_at,
        p.candidate_index,
    ))


def fails_held_out(program: Program, patch: Patch, heldout: TestSuite,
                   step_budget: int = DEFAULT_STEP_BUDGET) -> bool:
    """True when a plausible patch fails extra tests the build never ran.

    This is the overfitting detector: plausible but behind the ground
    truth on inputs outside the build suite.
    """
    if not heldout.tests:
        return False
    mutated = apply_edits(program, patch.edits)
    report = run_tests(mutated, heldout, step_budget)
    return not report.all_passed()
