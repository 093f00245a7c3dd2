"""Single-edit mutation operators used both to generate repair candidates
and to inject corpus bugs.

Operator classes, in enumeration order:
  1. relational-operator replacement  {<, <=, >, >=, ==, !=}
  2. arithmetic-operator replacement  {+, -, *, /, %}
  3. logical-operator replacement (&& <-> ||) and condition negation
  4. integer-constant adjustment      {c-1, c+1, 0}
  5. statement deletion (never a return)
  6. expression replacement with an ingredient from the same function
"""

from __future__ import annotations

from typing import Iterator, List

from ..minilang.ast import (
    Binary,
    Function,
    If,
    IntLit,
    Program,
    Return,
    Stmt,
    Unary,
    While,
    walk_expr_paths,
    walk_statements,
)
from ..minilang.parser import INT64_MAX
from ..minilang.printer import format_expr
from .edits import (
    KIND_DELETE_STMT,
    KIND_REPLACE_EXPR,
    AstEdit,
    format_stmt_source,
)

REL_ALTERNATIVES = ["<", "<=", ">", ">=", "==", "!="]
ARITH_ALTERNATIVES = ["+", "-", "*", "/", "%"]

OP_RELATIONAL = "relational_replacement"
OP_ARITHMETIC = "arithmetic_replacement"
OP_LOGICAL = "logical_replacement"
OP_NEGATE = "condition_negation"
OP_CONSTANT = "constant_adjustment"
OP_DELETE = "statement_deletion"
OP_INGREDIENT = "ingredient_replacement"

OPERATOR_CLASS_ORDER = (
    OP_RELATIONAL, OP_ARITHMETIC, OP_LOGICAL, OP_NEGATE,
    OP_CONSTANT, OP_DELETE, OP_INGREDIENT,
)


def _binary_op_edits(stmt: Stmt, ops, alternatives, operator_name) -> Iterator[AstEdit]:
    for path, expr in walk_expr_paths(stmt):
        if isinstance(expr, Binary) and expr.op in ops:
            before = format_expr(expr)
            for alt in alternatives:
                if alt == expr.op:
                    continue
                after = format_expr(Binary(alt, expr.left, expr.right))
                yield AstEdit(KIND_REPLACE_EXPR, stmt.stmt_id, path,
                              operator_name, before, after)


def relational_edits(stmt: Stmt) -> Iterator[AstEdit]:
    yield from _binary_op_edits(stmt, set(REL_ALTERNATIVES), REL_ALTERNATIVES, OP_RELATIONAL)


def arithmetic_edits(stmt: Stmt) -> Iterator[AstEdit]:
    yield from _binary_op_edits(stmt, set(ARITH_ALTERNATIVES), ARITH_ALTERNATIVES, OP_ARITHMETIC)


def logical_edits(stmt: Stmt) -> Iterator[AstEdit]:
    for path, expr in walk_expr_paths(stmt):
        if isinstance(expr, Binary) and expr.op in ("&&", "||"):
            alt = "||" if expr.op == "&&" else "&&"
            yield AstEdit(KIND_REPLACE_EXPR, stmt.stmt_id, path, OP_LOGICAL,
                          format_expr(expr),
                          format_expr(Binary(alt, expr.left, expr.right)))


def negation_edits(stmt: Stmt) -> Iterator[AstEdit]:
    if isinstance(stmt, (If, While)):
        cond = stmt.cond
        if isinstance(cond, Unary) and cond.op == "!":
            after = format_expr(cond.operand)
        else:
            after = format_expr(Unary("!", cond))
        yield AstEdit(KIND_REPLACE_EXPR, stmt.stmt_id, ("cond",), OP_NEGATE,
                      format_expr(cond), after)


def constant_edits(stmt: Stmt) -> Iterator[AstEdit]:
    for path, expr in walk_expr_paths(stmt):
        if isinstance(expr, IntLit):
            before = format_expr(expr)
            for adjusted in (expr.value - 1, expr.value + 1, 0):
                if adjusted == expr.value or abs(adjusted) > INT64_MAX:
                    continue
                # Negative values render as a unary minus fragment.
                yield AstEdit(KIND_REPLACE_EXPR, stmt.stmt_id, path, OP_CONSTANT,
                              before, str(adjusted))


def deletion_edits(stmt: Stmt) -> Iterator[AstEdit]:
    if not isinstance(stmt, Return):
        yield AstEdit(KIND_DELETE_STMT, stmt.stmt_id, (), OP_DELETE,
                      format_stmt_source(stmt), None)


def function_ingredients(fn: Function) -> List[str]:
    """Distinct expression fragments of a function, first-occurrence order."""
    seen = set()
    pool: List[str] = []
    for stmt in walk_statements(fn.body):
        for _, expr in walk_expr_paths(stmt):
            text = format_expr(expr)
            if text not in seen:
                seen.add(text)
                pool.append(text)
    return pool


def ingredient_edits(stmt: Stmt, ingredients: List[str]) -> Iterator[AstEdit]:
    for path, expr in walk_expr_paths(stmt):
        before = format_expr(expr)
        for fragment in ingredients:
            if fragment != before:
                yield AstEdit(KIND_REPLACE_EXPR, stmt.stmt_id, path,
                              OP_INGREDIENT, before, fragment)


def statement_edits(stmt: Stmt, ingredients: List[str]) -> Iterator[AstEdit]:
    """All single edits for one statement, in operator-class order."""
    yield from relational_edits(stmt)
    yield from arithmetic_edits(stmt)
    yield from logical_edits(stmt)
    yield from negation_edits(stmt)
    yield from constant_edits(stmt)
    yield from deletion_edits(stmt)
    yield from ingredient_edits(stmt, ingredients)


def seedable_edits(stmt: Stmt) -> List[AstEdit]:
    """Edits from classes 1-4 only; the pool corpus bugs are drawn from."""
    return (list(relational_edits(stmt)) + list(arithmetic_edits(stmt))
            + list(logical_edits(stmt)) + list(negation_edits(stmt))
            + list(constant_edits(stmt)))
