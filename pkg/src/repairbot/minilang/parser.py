"""Lexer, recursive-descent parser, and name resolver for MiniLang.

Grammar (documented for users in docs/minilang.md):

    program   := function*
    function  := "fn" NAME "(" [NAME ("," NAME)*] ")" block
    block     := "{" stmt* "}"
    stmt      := "let" NAME "=" expr ";"
               | NAME "=" expr ";"
               | "if" "(" expr ")" block ["else" block]
               | "while" "(" expr ")" block
               | "return" expr ";"
               | "assert" expr ";"          (test bodies only)
               | block
               | expr ";"
    expr      := precedence climbing over || && (== !=) (< <= > >=) (+ -) (* / %)
    unary     := ("-" | "!") unary | primary
    primary   := INT | "true" | "false" | NAME | NAME "(" args ")" | "(" expr ")"

Test files use ``test NAME { ... }`` at top level instead of functions.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Optional, Tuple

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
    TestCase,
    TestSuite,
    Unary,
    Var,
    While,
    walk_statements,
)

KEYWORDS = {"fn", "let", "if", "else", "while", "return", "true", "false", "test", "assert"}

_SYMBOLS = [
    "&&", "||", "==", "!=", "<=", ">=",
    "<", ">", "+", "-", "*", "/", "%", "!", "=",
    "(", ")", "{", "}", ",", ";",
]

INT64_MAX = 2**63 - 1


class ParseError(Exception):
    def __init__(self, message: str, file: str, line: int, col: int):
        self.file = file
        self.line = line
        self.col = col
        super().__init__(f"{file}:{line}:{col}: {message}")


class ResolveError(Exception):
    def __init__(self, message: str, span: Optional[Span] = None):
        self.span = span
        if span is not None:
            message = f"{span.file}:{span.line}:{span.col}: {message}"
        super().__init__(message)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind  # "int", "name", "kw", "sym", "eof"
        self.text = text
        self.line = line
        self.col = col


def tokenize(source: str, filename: str) -> List[Token]:
    tokens: List[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            start = i
            start_col = col
            while i < n and source[i].isdigit():
                i += 1
                col += 1
            text = source[start:i]
            if int(text) > INT64_MAX:
                raise ParseError(f"integer literal {text} out of range", filename, line, start_col)
            tokens.append(Token("int", text, line, start_col))
            continue
        if c.isalpha() or c == "_":
            start = i
            start_col = col
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
                col += 1
            text = source[start:i]
            kind = "kw" if text in KEYWORDS else "name"
            tokens.append(Token(kind, text, line, start_col))
            continue
        for sym in _SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token("sym", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", filename, line, col)
    tokens.append(Token("eof", "<eof>", line, col))
    return tokens


class _Parser:
    """One instance per file; statement ids are assigned by the caller."""

    def __init__(self, tokens: List[Token], filename: str, allow_assert: bool):
        self.tokens = tokens
        self.pos = 0
        self.filename = filename
        self.allow_assert = allow_assert

    # --- token plumbing ---

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, self.filename, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            raise self.error(f"expected {text!r}, found {tok.text!r}")
        return self.advance()

    def expect_name(self) -> Token:
        tok = self.peek()
        if tok.kind != "name":
            raise self.error(f"expected identifier, found {tok.text!r}")
        return self.advance()

    def span(self, tok: Token) -> Span:
        return Span(self.filename, tok.line, tok.col)

    # --- declarations ---

    def parse_functions(self) -> List[Function]:
        functions = []
        while self.peek().kind != "eof":
            functions.append(self.parse_function())
        return functions

    def parse_function(self) -> Function:
        kw = self.expect("fn")
        name = self.expect_name()
        self.expect("(")
        params: List[str] = []
        if self.peek().text != ")":
            params.append(self.expect_name().text)
            while self.peek().text == ",":
                self.advance()
                params.append(self.expect_name().text)
        self.expect(")")
        body = self.parse_block_body()
        return Function(name.text, tuple(params), tuple(body), self.span(kw))

    def parse_tests(self) -> List[TestCase]:
        tests = []
        while self.peek().kind != "eof":
            kw = self.expect("test")
            name = self.expect_name()
            body = self.parse_block_body()
            tests.append(TestCase(name.text, tuple(body), self.span(kw)))
        return tests

    # --- statements ---

    def parse_block_body(self) -> List[Stmt]:
        self.expect("{")
        body: List[Stmt] = []
        while self.peek().text != "}":
            if self.peek().kind == "eof":
                raise self.error("expected '}', found end of file")
            body.append(self.parse_stmt())
        self.expect("}")
        return body

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.text == "let":
            self.advance()
            name = self.expect_name()
            self.expect("=")
            value = self.parse_expr()
            self.expect(";")
            return Let(name.text, value, -1, self.span(tok))
        if tok.text == "if":
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then_body = tuple(self.parse_block_body())
            else_body = None
            if self.peek().text == "else":
                self.advance()
                else_body = tuple(self.parse_block_body())
            return If(cond, then_body, else_body, -1, self.span(tok))
        if tok.text == "while":
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            body = tuple(self.parse_block_body())
            return While(cond, body, -1, self.span(tok))
        if tok.text == "return":
            if self.allow_assert:
                raise self.error("'return' is not allowed in test bodies")
            self.advance()
            value = self.parse_expr()
            self.expect(";")
            return Return(value, -1, self.span(tok))
        if tok.text == "assert":
            if not self.allow_assert:
                raise self.error("'assert' is only allowed in test bodies")
            self.advance()
            expr = self.parse_expr()
            self.expect(";")
            return Assert(expr, -1, self.span(tok))
        if tok.text == "{":
            body = tuple(self.parse_block_body())
            return Block(body, -1, self.span(tok))
        if tok.kind == "name" and self.tokens[self.pos + 1].text == "=":
            name = self.advance()
            self.advance()  # "="
            value = self.parse_expr()
            self.expect(";")
            return Assign(name.text, value, -1, self.span(tok))
        expr = self.parse_expr()
        self.expect(";")
        return ExprStmt(expr, -1, self.span(tok))

    # --- expressions (precedence climbing) ---

    _LEVELS = [["||"], ["&&"], ["==", "!="], ["<", "<=", ">", ">="], ["+", "-"], ["*", "/", "%"]]

    def parse_expr(self, level: int = 0) -> Expr:
        if level == len(self._LEVELS):
            return self.parse_unary()
        expr = self.parse_expr(level + 1)
        while self.peek().text in self._LEVELS[level]:
            op = self.advance().text
            right = self.parse_expr(level + 1)
            expr = Binary(op, expr, right)
        return expr

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.text in ("-", "!"):
            self.advance()
            return Unary(tok.text, self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text))
        if tok.text == "true":
            self.advance()
            return BoolLit(True)
        if tok.text == "false":
            self.advance()
            return BoolLit(False)
        if tok.text == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if tok.kind == "name":
            self.advance()
            if self.peek().text == "(":
                self.advance()
                args: List[Expr] = []
                if self.peek().text != ")":
                    args.append(self.parse_expr())
                    while self.peek().text == ",":
                        self.advance()
                        args.append(self.parse_expr())
                self.expect(")")
                return Call(tok.text, tuple(args))
            return Var(tok.text)
        raise self.error(f"expected expression, found {tok.text!r}")


# ------------------------------------------------------------------ id assign

def _assign_ids(functions: Iterable[Function]) -> Tuple[Function, ...]:
    from .ast import renumber
    return renumber(Program(tuple(functions))).functions


# ------------------------------------------------------------------- resolver

def _resolve_body(body: Tuple[Stmt, ...], scope: List[set], declared: set,
                  functions: Optional[Dict[str, Function]], where: str) -> None:
    """Check vars resolve to a param or prior let; no shadowing or redeclare.

    ``functions`` is None for test bodies, where calls are linked against a
    program only at run time.
    """

    def in_scope(name: str) -> bool:
        return any(name in frame for frame in scope)

    def resolve_expr(expr: Expr, span: Span) -> None:
        if isinstance(expr, Var):
            if not in_scope(expr.name):
                raise ResolveError(f"unknown identifier '{expr.name}' in {where}", span)
        elif isinstance(expr, Call):
            if functions is not None:
                fn = functions.get(expr.name)
                if fn is None:
                    raise ResolveError(f"unknown function '{expr.name}' in {where}", span)
                if len(fn.params) != len(expr.args):
                    raise ResolveError(
                        f"function '{expr.name}' expects {len(fn.params)} argument(s), "
                        f"got {len(expr.args)} in {where}", span)
            for arg in expr.args:
                resolve_expr(arg, span)
        elif isinstance(expr, Unary):
            resolve_expr(expr.operand, span)
        elif isinstance(expr, Binary):
            resolve_expr(expr.left, span)
            resolve_expr(expr.right, span)

    def resolve_stmts(stmts: Tuple[Stmt, ...]) -> None:
        scope.append(set())
        for stmt in stmts:
            if isinstance(stmt, Let):
                resolve_expr(stmt.value, stmt.span)
                if in_scope(stmt.name) or stmt.name in declared:
                    raise ResolveError(f"duplicate variable '{stmt.name}' in {where}", stmt.span)
                scope[-1].add(stmt.name)
                declared.add(stmt.name)
            elif isinstance(stmt, Assign):
                if not in_scope(stmt.name):
                    raise ResolveError(f"assignment to unknown variable '{stmt.name}' in {where}",
                                       stmt.span)
                resolve_expr(stmt.value, stmt.span)
            elif isinstance(stmt, If):
                resolve_expr(stmt.cond, stmt.span)
                resolve_stmts(stmt.then_body)
                if stmt.else_body is not None:
                    resolve_stmts(stmt.else_body)
            elif isinstance(stmt, While):
                resolve_expr(stmt.cond, stmt.span)
                resolve_stmts(stmt.body)
            elif isinstance(stmt, (Return, ExprStmt, Assert)):
                expr = stmt.value if isinstance(stmt, Return) else getattr(stmt, "expr")
                resolve_expr(expr, stmt.span)
            elif isinstance(stmt, Block):
                resolve_stmts(stmt.body)
        scope.pop()

    resolve_stmts(body)


def resolve_program(program: Program) -> None:
    """Raise ResolveError unless every name in the program resolves."""
    functions: Dict[str, Function] = {}
    for fn in program.functions:
        if fn.name in functions:
            raise ResolveError(f"duplicate function '{fn.name}'", fn.span)
        functions[fn.name] = fn
    for fn in program.functions:
        params = set()
        for p in fn.params:
            if p in params:
                raise ResolveError(f"duplicate parameter '{p}' in function '{fn.name}'", fn.span)
            params.add(p)
        _resolve_body(fn.body, [set(fn.params)], set(fn.params), functions,
                      f"function '{fn.name}'")


def resolve_test(test: TestCase) -> None:
    """Variables in a test body must resolve within the body itself.

    Calls are deliberately left unchecked: they are linked against a program
    at run time and failures surface as per-test unknown_call verdicts.
    """
    _resolve_body(test.body, [set()], set(), None, f"test '{test.name}'")


# ------------------------------------------------------------------ front end

def parse(source: str, filename: str = "<src>") -> Program:
    """Parse and resolve a single source file into a Program."""
    return parse_program({filename: source})

def parse_program(files: Mapping[str, str]) -> Program:
    """Parse several source files into one Program with global preorder ids.

    Files are processed in sorted path order so ids are stable regardless of
    mapping order.
    """
    functions: List[Function] = []
    for path in sorted(files):
        parser = _Parser(tokenize(files[path], path), path, allow_assert=False)
        functions.extend(parser.parse_functions())
    program = Program(_assign_ids(functions))
    resolve_program(program)
    return program


def parse_suite(files: Mapping[str, str]) -> TestSuite:
    """Parse test files into a TestSuite; test names must be unique."""
    tests: List[TestCase] = []
    for path in sorted(files):
        parser = _Parser(tokenize(files[path], path), path, allow_assert=True)
        tests.extend(parser.parse_tests())
    seen = set()
    for test in tests:
        if test.name in seen:
            raise ResolveError(f"duplicate test '{test.name}'", test.span)
        seen.add(test.name)
        if not any(isinstance(s, Assert) for s in walk_statements(test.body)):
            raise ResolveError(f"test '{test.name}' contains no assert", test.span)
        resolve_test(test)
    return TestSuite(tuple(tests))
