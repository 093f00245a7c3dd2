"""Serializable single-site AST edits and their application.

An edit addresses a statement by id plus an expression path and carries
the before/after fragments as canonical source text, so edits survive a
round trip through JSON (patch provenance files, corpus manifests).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from ..minilang.ast import (
    Block,
    Function,
    If,
    Program,
    Return,
    Stmt,
    While,
    find_statement,
    get_expr,
    renumber,
    replace_expr,
)
from ..minilang.parser import ParseError, _Parser, tokenize
from ..minilang.printer import _format_stmt, format_expr

KIND_REPLACE_EXPR = "replace_expr"
KIND_DELETE_STMT = "delete_stmt"


class PatchApplyError(Exception):
    pass


@dataclass(frozen=True)
class AstEdit:
    kind: str                 # replace_expr | delete_stmt
    stmt_id: int
    path: Tuple               # empty for delete_stmt
    operator: str             # generating operator name
    before_src: str
    after_src: Optional[str]  # None for delete_stmt

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "stmt_id": self.stmt_id,
            "path": list(self.path),
            "operator": self.operator,
            "before": self.before_src,
            "after": self.after_src,
        }

    @staticmethod
    def from_dict(data: dict) -> "AstEdit":
        return AstEdit(
            kind=data["kind"],
            stmt_id=data["stmt_id"],
            path=tuple(data["path"]),
            operator=data["operator"],
            before_src=data["before"],
            after_src=data["after"],
        )


def format_stmt_source(stmt: Stmt) -> str:
    out: list = []
    _format_stmt(stmt, 0, out)
    return "\n".join(out)


def parse_expr_fragment(text: str):
    parser = _Parser(tokenize(text, "<fragment>"), "<fragment>", allow_assert=False)
    expr = parser.parse_expr()
    if parser.peek().kind != "eof":
        raise ParseError("trailing input after expression",
                         "<fragment>", parser.peek().line, parser.peek().col)
    return expr


def apply_edit(program: Program, edit: AstEdit) -> Program:
    """Apply one edit, returning a fresh renumbered program."""
    stmt = find_statement(program, edit.stmt_id)
    if stmt is None:
        raise PatchApplyError(f"no statement with id {edit.stmt_id}")

    if edit.kind == KIND_DELETE_STMT:
        if isinstance(stmt, Return):
            raise PatchApplyError("return statements are never deleted")
        if format_stmt_source(stmt) != edit.before_src:
            raise PatchApplyError(
                f"statement {edit.stmt_id} does not match edit's before text")
        return renumber(_delete_statement(program, edit.stmt_id))

    if edit.kind == KIND_REPLACE_EXPR:
        try:
            current = get_expr(stmt, edit.path)
        except KeyError as exc:
            raise PatchApplyError(str(exc)) from None
        if format_expr(current) != edit.before_src:
            raise PatchApplyError(
                f"expression at {edit.stmt_id}:{edit.path!r} is "
                f"{format_expr(current)!r}, edit expected {edit.before_src!r}")
        if edit.after_src is None:
            raise PatchApplyError("replace_expr edit has no after fragment")
        try:
            replacement = parse_expr_fragment(edit.after_src)
        except ParseError as exc:
            raise PatchApplyError(f"bad after fragment: {exc}") from None
        new_stmt = replace_expr(stmt, edit.path, replacement)
        return renumber(_replace_statement(program, edit.stmt_id, new_stmt))

    raise PatchApplyError(f"unknown edit kind {edit.kind!r}")


def apply_edits(program: Program, edits: Tuple[AstEdit, ...]) -> Program:
    """Apply edits in order. Later edits address ids of the re-numbered tree."""
    for edit in edits:
        program = apply_edit(program, edit)
    return program


def _map_body(body, fn):
    from dataclasses import replace
    out = []
    for stmt in body:
        mapped = fn(stmt)
        if mapped is None:
            continue
        if isinstance(mapped, If):
            mapped = replace(
                mapped,
                then_body=_map_body(mapped.then_body, fn),
                else_body=None if mapped.else_body is None else _map_body(mapped.else_body, fn))
        elif isinstance(mapped, While):
            mapped = replace(mapped, body=_map_body(mapped.body, fn))
        elif isinstance(mapped, Block):
            mapped = replace(mapped, body=_map_body(mapped.body, fn))
        out.append(mapped)
    return tuple(out)


def _transform_program(program: Program, fn) -> Program:
    functions = tuple(
        Function(f.name, f.params, _map_body(f.body, fn), f.span)
        for f in program.functions
    )
    return Program(functions)


def _delete_statement(program: Program, stmt_id: int) -> Program:
    return _transform_program(
        program, lambda s: None if s.stmt_id == stmt_id else s)


def _replace_statement(program: Program, stmt_id: int, new_stmt: Stmt) -> Program:
    return _transform_program(
        program, lambda s: new_stmt if s.stmt_id == stmt_id else s)
