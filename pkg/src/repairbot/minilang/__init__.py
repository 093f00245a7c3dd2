"""MiniLang: the tiny deterministic language the repair bot operates on.

Parser, canonical pretty-printer, and a budgeted interpreter with per-test
statement coverage. Source files use ``.mini``; the grammar is documented
in docs/minilang.md.
"""

from .ast import Program, TestSuite
from .parser import ParseError, ResolveError, parse, parse_program, parse_suite
from .printer import prettyprint, prettyprint_file, prettyprint_suite
from .runner import (
    BUDGET_EXCEEDED,
    DEFAULT_STEP_BUDGET,
    ERROR,
    FAIL,
    PASS,
    TestReport,
    TestVerdict,
    run_tests,
)
from .kernel import kernel_name

__all__ = [
    "Program", "TestSuite",
    "ParseError", "ResolveError", "parse", "parse_program", "parse_suite",
    "prettyprint", "prettyprint_file", "prettyprint_suite",
    "run_tests", "TestReport", "TestVerdict",
    "PASS", "FAIL", "ERROR", "BUDGET_EXCEEDED", "DEFAULT_STEP_BUDGET",
    "kernel_name",
]
