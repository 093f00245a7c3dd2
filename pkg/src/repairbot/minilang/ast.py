"""AST node definitions for MiniLang.

Every statement carries a stable preorder ``stmt_id`` assigned at parse
time and a source span. All nodes are frozen: edits build new trees.
Spans never participate in structural equality so a program compares
equal to its pretty-printed-and-reparsed self.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

ARITH_OPS = ("+", "-", "*", "/", "%")
REL_OPS = ("<", "<=", ">", ">=", "==", "!=")
LOGIC_OPS = ("&&", "||")
BINARY_OPS = ARITH_OPS + REL_OPS + LOGIC_OPS


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int


NO_SPAN = Span("<none>", 0, 0)


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[IntLit, BoolLit, Var, Call, Unary, Binary]


# ----------------------------------------------------------------- statements

@dataclass(frozen=True)
class Let:
    name: str
    value: Expr
    stmt_id: int
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    stmt_id: int
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class If:
    cond: Expr
    then_body: Tuple["Stmt", ...]
    else_body: Optional[Tuple["Stmt", ...]]
    stmt_id: int
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class While:
    cond: Expr
    body: Tuple["Stmt", ...]
    stmt_id: int
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class Return:
    value: Expr
    stmt_id: int
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    stmt_id: int
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class Block:
    body: Tuple["Stmt", ...]
    stmt_id: int
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class Assert:
    """Assertion statement; valid only inside test bodies."""

    expr: Expr
    stmt_id: int
    span: Span = field(compare=False, default=NO_SPAN)


Stmt = Union[Let, Assign, If, While, Return, ExprStmt, Block, Assert]


@dataclass(frozen=True)
class Function:
    name: str
    params: Tuple[str, ...]
    body: Tuple[Stmt, ...]
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class Program:
    functions: Tuple[Function, ...]


@dataclass(frozen=True)
class TestCase:
    name: str
    body: Tuple[Stmt, ...]
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class TestSuite:
    tests: Tuple[TestCase, ...]


# ------------------------------------------------------------------- walking

def stmt_children(stmt: Stmt) -> Tuple[Tuple[Stmt, ...], ...]:
    """Nested statement sequences of a statement, in source order."""
    if isinstance(stmt, If):
        bodies = (stmt.then_body,)
        if stmt.else_body is not None:
            bodies += (stmt.else_body,)
        return bodies
    if isinstance(stmt, While):
        return (stmt.body,)
    if isinstance(stmt, Block):
        return (stmt.body,)
    return ()


def walk_statements(body: Tuple[Stmt, ...]):
    """Yield every statement in a body, preorder."""
    for stmt in body:
        yield stmt
        for child_body in stmt_children(stmt):
            yield from walk_statements(child_body)


def program_statements(program: Program):
    """Yield (function, statement) pairs for the whole program, preorder."""
    for fn in program.functions:
        for stmt in walk_statements(fn.body):
            yield fn, stmt


def statement_count(program: Program) -> int:
    return sum(1 for _ in program_statements(program))


def find_statement(program: Program, stmt_id: int) -> Optional[Stmt]:
    for _, stmt in program_statements(program):
        if stmt.stmt_id == stmt_id:
            return stmt
    return None


def function_of_statement(program: Program, stmt_id: int) -> Optional[Function]:
    for fn, stmt in program_statements(program):
        if stmt.stmt_id == stmt_id:
            return fn
    return None


# Expression-path navigation. A path is a tuple of selectors rooted at a
# statement: "value"/"cond"/"expr" pick the statement's expression,
# "left"/"right"/"operand" descend binaries and unaries, and an integer
# indexes call arguments.

_STMT_EXPR_FIELD = {
    Let: "value",
    Assign: "value",
    If: "cond",
    While: "cond",
    Return: "value",
    ExprStmt: "expr",
    Assert: "expr",
}


def stmt_expr_field(stmt: Stmt) -> Optional[str]:
    return _STMT_EXPR_FIELD.get(type(stmt))


def expr_child_selectors(expr: Expr):
    """(selector, child) pairs for an expression node, in source order."""
    if isinstance(expr, Binary):
        return (("left", expr.left), ("right", expr.right))
    if isinstance(expr, Unary):
        return (("operand", expr.operand),)
    if isinstance(expr, Call):
        return tuple((i, a) for i, a in enumerate(expr.args))
    return ()


def walk_expr_paths(stmt: Stmt):
    """Yield (path, expr) for every expression node of a statement, preorder."""
    root_field = stmt_expr_field(stmt)
    if root_field is None:
        return

    def rec(path, expr):
        yield path, expr
        for sel, child in expr_child_selectors(expr):
            yield from rec(path + (sel,), child)

    yield from rec((root_field,), getattr(stmt, root_field))


def get_expr(stmt: Stmt, path: Tuple) -> Expr:
    if not path or path[0] != stmt_expr_field(stmt):
        raise KeyError(f"path {path!r} does not address an expression of {type(stmt).__name__}")
    node = getattr(stmt, path[0])
    for sel in path[1:]:
        if isinstance(node, Binary) and sel in ("left", "right"):
            node = getattr(node, sel)
        elif isinstance(node, Unary) and sel == "operand":
            node = node.operand
        elif isinstance(node, Call) and isinstance(sel, int) and 0 <= sel < len(node.args):
            node = node.args[sel]
        else:
            raise KeyError(f"invalid path element {sel!r} at {type(node).__name__}")
    return node


def replace_expr(stmt: Stmt, path: Tuple, replacement: Expr) -> Stmt:
    """Rebuild a statement with the expression at ``path`` replaced."""

    def rec(node: Expr, rest: Tuple) -> Expr:
        if not rest:
            return replacement
        sel = rest[0]
        if isinstance(node, Binary) and sel in ("left", "right"):
            return Binary(node.op,
                          rec(node.left, rest[1:]) if sel == "left" else node.left,
                          rec(node.right, rest[1:]) if sel == "right" else node.right)
        if isinstance(node, Unary) and sel == "operand":
            return Unary(node.op, rec(node.operand, rest[1:]))
        if isinstance(node, Call) and isinstance(sel, int) and 0 <= sel < len(node.args):
            args = tuple(rec(a, rest[1:]) if i == sel else a for i, a in enumerate(node.args))
            return Call(node.name, args)
        raise KeyError(f"invalid path element {sel!r} at {type(node).__name__}")

    root_field = stmt_expr_field(stmt)
    if not path or path[0] != root_field:
        raise KeyError(f"path {path!r} does not address an expression of {type(stmt).__name__}")
    new_root = rec(getattr(stmt, root_field), tuple(path[1:]))
    return _with_field(stmt, root_field, new_root)


def _with_field(stmt: Stmt, name: str, value) -> Stmt:
    from dataclasses import replace
    return replace(stmt, **{name: value})


def renumber(program: Program) -> Program:
    """Reassign preorder stmt_ids; used after structural edits."""
    counter = [0]

    def stmt_rec(stmt: Stmt) -> Stmt:
        sid = counter[0]
        counter[0] += 1
        from dataclasses import replace
        if isinstance(stmt, If):
            then_body = tuple(stmt_rec(s) for s in stmt.then_body)
            else_body = None if stmt.else_body is None else tuple(stmt_rec(s) for s in stmt.else_body)
            return replace(stmt, stmt_id=sid, then_body=then_body, else_body=else_body)
        if isinstance(stmt, While):
            return replace(stmt, stmt_id=sid, body=tuple(stmt_rec(s) for s in stmt.body))
        if isinstance(stmt, Block):
            return replace(stmt, stmt_id=sid, body=tuple(stmt_rec(s) for s in stmt.body))
        return replace(stmt, stmt_id=sid)

    functions = tuple(
        Function(fn.name, fn.params, tuple(stmt_rec(s) for s in fn.body), fn.span)
        for fn in program.functions
    )
    return Program(functions)
