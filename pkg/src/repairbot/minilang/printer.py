"""Canonical pretty-printer for MiniLang.

One statement per line, two-space indentation, minimal parentheses.
``parse(prettyprint(p))`` reproduces ``p`` exactly (spans aside), and
prettyprint is idempotent across a parse round trip.
"""

from __future__ import annotations

from typing import Tuple

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
    Stmt,
    TestCase,
    TestSuite,
    Unary,
    Var,
    While,
)

_PRECEDENCE = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_UNARY_PRECEDENCE = 7


def format_expr(expr: Expr, parent_prec: int = 0, right_side: bool = False) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Call):
        args = ", ".join(format_expr(a) for a in expr.args)
        return f"{expr.name}({args})"
    if isinstance(expr, Unary):
        # -(-x) needs parens; so does !(negated unary)
        if isinstance(expr.operand, Unary):
            inner = f"({format_expr(expr.operand)})"
        else:
            inner = format_expr(expr.operand, _UNARY_PRECEDENCE)
        return f"{expr.op}{inner}"
    if isinstance(expr, Binary):
        prec = _PRECEDENCE[expr.op]
        left = format_expr(expr.left, prec, right_side=False)
        right = format_expr(expr.right, prec, right_side=True)
        text = f"{left} {expr.op} {right}"
        # Binary ops are left-associative: a right child at equal precedence
        # was explicitly grouped, so keep its parens.
        if prec < parent_prec or (prec == parent_prec and right_side):
            return f"({text})"
        return text
    raise TypeError(f"not an expression: {expr!r}")


def _format_stmt(stmt: Stmt, indent: int, out: list) -> None:
    pad = "  " * indent
    if isinstance(stmt, Let):
        out.append(f"{pad}let {stmt.name} = {format_expr(stmt.value)};")
    elif isinstance(stmt, Assign):
        out.append(f"{pad}{stmt.name} = {format_expr(stmt.value)};")
    elif isinstance(stmt, If):
        out.append(f"{pad}if ({format_expr(stmt.cond)}) {{")
        _format_body(stmt.then_body, indent + 1, out)
        if stmt.else_body is None:
            out.append(f"{pad}}}")
        else:
            out.append(f"{pad}}} else {{")
            _format_body(stmt.else_body, indent + 1, out)
            out.append(f"{pad}}}")
    elif isinstance(stmt, While):
        out.append(f"{pad}while ({format_expr(stmt.cond)}) {{")
        _format_body(stmt.body, indent + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(stmt, Return):
        out.append(f"{pad}return {format_expr(stmt.value)};")
    elif isinstance(stmt, ExprStmt):
        out.append(f"{pad}{format_expr(stmt.expr)};")
    elif isinstance(stmt, Block):
        out.append(f"{pad}{{")
        _format_body(stmt.body, indent + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(stmt, Assert):
        out.append(f"{pad}assert {format_expr(stmt.expr)};")
    else:
        raise TypeError(f"not a statement: {stmt!r}")


def _format_body(body: Tuple[Stmt, ...], indent: int, out: list) -> None:
    for stmt in body:
        _format_stmt(stmt, indent, out)


def format_function(fn: Function) -> str:
    out = [f"fn {fn.name}({', '.join(fn.params)}) {{"]
    _format_body(fn.body, 1, out)
    out.append("}")
    return "\n".join(out) + "\n"


def prettyprint(program: Program) -> str:
    """Render a whole program in canonical form, functions in id order."""
    return "\n".join(format_function(fn) for fn in program.functions)


def prettyprint_file(program: Program, path: str) -> str:
    """Render only the functions whose definition lives in ``path``."""
    parts = [format_function(fn) for fn in program.functions if fn.span.file == path]
    return "\n".join(parts)


def format_test(test: TestCase) -> str:
    out = [f"test {test.name} {{"]
    _format_body(test.body, 1, out)
    out.append("}")
    return "\n".join(out) + "\n"


def prettyprint_suite(suite: TestSuite) -> str:
    return "\n".join(format_test(t) for t in suite.tests)
