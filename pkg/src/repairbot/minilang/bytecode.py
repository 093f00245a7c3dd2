"""Compiler from MiniLang ASTs to the flat instruction stream both
interpreter kernels execute.

The instruction stream is a single array of signed 64-bit ints laid out as
``[op, arg, op, arg, ...]``. Compiling program and tests together yields one
shared image, so the compiled and pure-Python kernels count steps, record
coverage, and produce verdicts identically by construction.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .ast import (
    Assert,
    Assign,
    Binary,
    Block,
    BoolLit,
    Call,
    Expr,
    ExprStmt,
    Function,
    If,
    IntLit,
    Let,
    Program,
    Return,
    Span,
    Stmt,
    TestSuite,
    Unary,
    Var,
    While,
)

# Opcodes. Every executed instruction costs exactly one step.
OP_HALT = 0         # end of a test body: verdict pass
OP_PUSH_INT = 1
OP_PUSH_BOOL = 2
OP_LOAD = 3
OP_STORE = 4
OP_JUMP = 5
OP_JF = 6           # pop bool, jump if false
OP_AND_SC = 7       # peek bool; false: jump keeping value, else pop
OP_OR_SC = 8        # peek bool; true: jump keeping value, else pop
OP_CHECK_BOOL = 9   # peek must be bool
OP_BINOP = 10
OP_UNOP = 11
OP_CALL = 12
OP_RET = 13
OP_COV = 14         # statement marker: record coverage for stmt_id arg
OP_ASSERT = 15      # pop bool; false: verdict fail at assert site arg
OP_POP = 16
OP_FALLOFF = 17     # fell off function end: type error
OP_BADCALL = 18     # unresolvable call in a test body: unknown_call

BINOP_CODES = {"+": 0, "-": 1, "*": 2, "/": 3, "%": 4,
               "<": 5, "<=": 6, ">": 7, ">=": 8, "==": 9, "!=": 10}
UNOP_CODES = {"-": 0, "!": 1}

# Runtime error kinds (verdict detail for ERROR verdicts).
ERR_DIV_ZERO = 0
ERR_UNKNOWN_CALL = 1
ERR_TYPE = 2

ERROR_KIND_NAMES = {ERR_DIV_ZERO: "division_by_zero",
                    ERR_UNKNOWN_CALL: "unknown_call",
                    ERR_TYPE: "type_error"}

# Verdict codes returned by the kernels.
VERDICT_PASS = 0
VERDICT_FAIL = 1
VERDICT_ERROR = 2
VERDICT_BUDGET = 3


@dataclass
class ProgramImage:
    code: array                       # array('q'), [op, arg] pairs
    func_entries: array               # array('q'), pc of each function
    func_nparams: array
    func_nlocals: array
    func_names: List[str]
    test_entries: array               # array('q'), pc of each test body
    test_names: List[str]
    test_nlocals: array
    n_stmts: int
    stmt_spans: Dict[int, Span]
    assert_sites: List[Span]          # indexed by OP_ASSERT arg


class CompileError(Exception):
    pass


class _FnCompiler:
    def __init__(self, image: "_ImageBuilder", slots: Dict[str, int]):
        self.image = image
        self.slots = slots

    def emit(self, op: int, arg: int = 0) -> int:
        code = self.image.code
        pc = len(code)
        code.append(op)
        code.append(arg)
        return pc

    def patch_target(self, jump_pc: int) -> None:
        self.image.code[jump_pc + 1] = len(self.image.code)

    # --- expressions ---

    def compile_expr(self, expr: Expr) -> None:
        if isinstance(expr, IntLit):
            self.emit(OP_PUSH_INT, expr.value)
        elif isinstance(expr, BoolLit):
            self.emit(OP_PUSH_BOOL, 1 if expr.value else 0)
        elif isinstance(expr, Var):
            self.emit(OP_LOAD, self.slots[expr.name])
        elif isinstance(expr, Unary):
            self.compile_expr(expr.operand)
            self.emit(OP_UNOP, UNOP_CODES[expr.op])
        elif isinstance(expr, Binary):
            if expr.op == "&&":
                self.compile_expr(expr.left)
                jump = self.emit(OP_AND_SC)
                self.compile_expr(expr.right)
                self.emit(OP_CHECK_BOOL)
                self.patch_target(jump)
            elif expr.op == "||":
                self.compile_expr(expr.left)
                jump = self.emit(OP_OR_SC)
                self.compile_expr(expr.right)
                self.emit(OP_CHECK_BOOL)
                self.patch_target(jump)
            else:
                self.compile_expr(expr.left)
                self.compile_expr(expr.right)
                self.emit(OP_BINOP, BINOP_CODES[expr.op])
        elif isinstance(expr, Call):
            for arg in expr.args:
                self.compile_expr(arg)
            idx = self.image.func_index.get(expr.name)
            if idx is None or self.image.func_nparams[idx] != len(expr.args):
                # Only reachable from test bodies; program calls are resolved.
                self.emit(OP_BADCALL, 0)
            else:
                self.emit(OP_CALL, idx)
        else:
            raise CompileError(f"not an expression: {expr!r}")

    # --- statements ---

    def compile_stmt(self, stmt: Stmt, with_cov: bool) -> None:
        if with_cov:
            self.emit(OP_COV, stmt.stmt_id)
        if isinstance(stmt, (Let, Assign)):
            self.compile_expr(stmt.value)
            self.emit(OP_STORE, self.slots[stmt.name])
        elif isinstance(stmt, If):
            self.compile_expr(stmt.cond)
            jump_else = self.emit(OP_JF)
            self.compile_body(stmt.then_body, with_cov)
            if stmt.else_body is None:
                self.patch_target(jump_else)
            else:
                jump_end = self.emit(OP_JUMP)
                self.patch_target(jump_else)
                self.compile_body(stmt.else_body, with_cov)
                self.patch_target(jump_end)
        elif isinstance(stmt, While):
            top = len(self.image.code)
            self.compile_expr(stmt.cond)
            jump_out = self.emit(OP_JF)
            self.compile_body(stmt.body, with_cov)
            self.emit(OP_JUMP, top)
            self.patch_target(jump_out)
        elif isinstance(stmt, Return):
            self.compile_expr(stmt.value)
            self.emit(OP_RET)
        elif isinstance(stmt, ExprStmt):
            self.compile_expr(stmt.expr)
            self.emit(OP_POP)
        elif isinstance(stmt, Block):
            self.compile_body(stmt.body, with_cov)
        elif isinstance(stmt, Assert):
            self.compile_expr(stmt.expr)
            site = len(self.image.assert_sites)
            self.image.assert_sites.append(stmt.span)
            self.emit(OP_ASSERT, site)
        else:
            raise CompileError(f"not a statement: {stmt!r}")

    def compile_body(self, body: Tuple[Stmt, ...], with_cov: bool) -> None:
        for stmt in body:
            self.compile_stmt(stmt, with_cov)


class _ImageBuilder:
    def __init__(self):
        self.code: List[int] = []
        self.func_index: Dict[str, int] = {}
        self.func_entries: List[int] = []
        self.func_nparams: List[int] = []
        self.func_nlocals: List[int] = []
        self.func_names: List[str] = []
        self.assert_sites: List[Span] = []


def _collect_slots(params: Tuple[str, ...], body: Tuple[Stmt, ...]) -> Dict[str, int]:
    """Allocate one frame slot per param and per let, in source order."""
    slots = {name: i for i, name in enumerate(params)}

    def walk(stmts):
        for stmt in stmts:
            if isinstance(stmt, Let):
                slots[stmt.name] = len(slots)
            elif isinstance(stmt, If):
                walk(stmt.then_body)
                if stmt.else_body is not None:
                    walk(stmt.else_body)
            elif isinstance(stmt, (While, Block)):
                walk(stmt.body)

    walk(body)
    return slots


def compile_image(program: Program, suite: TestSuite) -> ProgramImage:
    """Compile a resolved program plus its test suite into one image."""
    builder = _ImageBuilder()
    for i, fn in enumerate(program.functions):
        builder.func_index[fn.name] = i
        builder.func_nparams.append(len(fn.params))
        builder.func_names.append(fn.name)

    # Two passes over functions: indices above are needed to compile calls.
    for fn in program.functions:
        slots = _collect_slots(fn.params, fn.body)
        builder.func_entries.append(len(builder.code))
        builder.func_nlocals.append(max(len(slots), 1))
        compiler = _FnCompiler(builder, slots)
        compiler.compile_body(fn.body, with_cov=True)
        compiler.emit(OP_FALLOFF)

    test_entries: List[int] = []
    test_names: List[str] = []
    test_nlocals: List[int] = []
    for test in suite.tests:
        slots = _collect_slots((), test.body)
        test_entries.append(len(builder.code))
        test_names.append(test.name)
        test_nlocals.append(max(len(slots), 1))
        compiler = _FnCompiler(builder, slots)
        compiler.compile_body(test.body, with_cov=False)
        compiler.emit(OP_HALT)

    n_stmts = 0
    stmt_spans: Dict[int, Span] = {}
    from .ast import program_statements
    for _, stmt in program_statements(program):
        stmt_spans[stmt.stmt_id] = stmt.span
        n_stmts += 1

    return ProgramImage(
        code=array("q", builder.code),
        func_entries=array("q", builder.func_entries),
        func_nparams=array("q", builder.func_nparams),
        func_nlocals=array("q", builder.func_nlocals),
        func_names=builder.func_names,
        test_entries=array("q", test_entries),
        test_names=test_names,
        test_nlocals=array("q", test_nlocals),
        n_stmts=n_stmts,
        stmt_spans=stmt_spans,
        assert_sites=builder.assert_sites,
    )
