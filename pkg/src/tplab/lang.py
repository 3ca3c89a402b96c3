"""Front end for the `.tl` mini-language: lexer, parser, static checks,
canonical formatting, and per-method accounting (statement/branch counts,
mutation eligibility).

A project is a set of named source documents listed by a `project.json`
manifest: {"project_id": str, "sources": [relative paths]}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

TYPES = ("void", "bool", "int", "float", "str", "arr", "ref")

KEYWORDS = frozenset(
    ("fn", "test", "let", "if", "else", "while", "return", "assert", "spawn",
     "true", "false", "null", "box") + TYPES
)

# builtin name -> (parameter types, result type); "any" is statically opaque
BUILTINS = {
    "len": (("arr",), "int"),
    "get": (("arr", "int"), "any"),
    "deref": (("ref",), "any"),
    "str_cat": (("str", "str"), "str"),
}

# declared type -> feature category
RETURN_CATEGORIES = {
    "void": "void",
    "bool": "boolean",
    "int": "numeric",
    "float": "numeric",
    "str": "string",
    "arr": "array",
    "ref": "reference",
}


class SourceError(Exception):
    """Static error tied to a source position."""

    def __init__(self, message, file="", line=0, col=0):
        self.message = message
        self.file = file
        self.line = line
        self.col = col
        where = f"{file}:{line}:{col}: " if file else ""
        super().__init__(where + message)


class ParseError(SourceError):
    pass


class DuplicateNameError(SourceError):
    pass


class UnresolvedCallError(SourceError):
    pass


class TypeCheckError(SourceError):
    pass


class UndeclaredNameError(SourceError):
    pass


# ---------------------------------------------------------------------------
# AST
#
# Positions and analyzer-derived fields are excluded from equality so that a
# parse -> format -> parse round trip compares structurally equal.

def _pos():
    return field(default=0, compare=False, repr=False)


def _fname():
    return field(default="", compare=False, repr=False)


@dataclass
class IntLit:
    value: int
    line: int = _pos()
    col: int = _pos()


@dataclass
class FloatLit:
    value: float
    line: int = _pos()
    col: int = _pos()


@dataclass
class StrLit:
    value: str
    line: int = _pos()
    col: int = _pos()


@dataclass
class BoolLit:
    value: bool
    line: int = _pos()
    col: int = _pos()


@dataclass
class NullLit:
    line: int = _pos()
    col: int = _pos()


@dataclass
class ArrLit:
    items: list
    line: int = _pos()
    col: int = _pos()


@dataclass
class BoxExpr:
    value: object
    line: int = _pos()
    col: int = _pos()


@dataclass
class VarExpr:
    name: str
    line: int = _pos()
    col: int = _pos()


@dataclass
class CallExpr:
    name: str
    args: list
    line: int = _pos()
    col: int = _pos()


@dataclass
class BinaryExpr:
    op: str
    left: object
    right: object
    line: int = _pos()
    col: int = _pos()


@dataclass
class UnaryExpr:
    op: str
    operand: object
    line: int = _pos()
    col: int = _pos()


@dataclass
class LetStmt:
    name: str
    expr: object
    index: int = _pos()
    line: int = _pos()
    col: int = _pos()


@dataclass
class AssignStmt:
    name: str
    expr: object
    index: int = _pos()
    line: int = _pos()
    col: int = _pos()


@dataclass
class IfStmt:
    cond: object
    then: list
    orelse: object  # list | None
    index: int = _pos()
    branch_id: int = _pos()
    line: int = _pos()
    col: int = _pos()


@dataclass
class WhileStmt:
    cond: object
    body: list
    index: int = _pos()
    branch_id: int = _pos()
    line: int = _pos()
    col: int = _pos()


@dataclass
class ReturnStmt:
    expr: object  # expression | None
    index: int = _pos()
    line: int = _pos()
    col: int = _pos()


@dataclass
class AssertStmt:
    expr: object
    index: int = _pos()
    line: int = _pos()
    col: int = _pos()


@dataclass
class SpawnStmt:
    target: str
    args: list = field(default_factory=list)
    index: int = _pos()
    line: int = _pos()
    col: int = _pos()


@dataclass
class CallStmt:
    call: CallExpr
    index: int = _pos()
    line: int = _pos()
    col: int = _pos()


@dataclass
class FunctionDef:
    name: str
    params: list  # [(name, type), ...]
    return_type: str
    body: list
    file: str = _fname()
    line: int = _pos()
    col: int = _pos()
    # span of the body including braces, for source-level tooling
    body_start: int = _pos()
    body_end: int = _pos()
    # analyzer-derived
    stmt_count: int = _pos()
    branch_point_count: int = _pos()


@dataclass
class TestDef:
    name: str
    body: list
    file: str = _fname()
    line: int = _pos()
    col: int = _pos()
    body_start: int = _pos()
    body_end: int = _pos()
    stmt_count: int = _pos()
    branch_point_count: int = _pos()


@dataclass
class Program:
    project_id: str
    functions: list  # ordered FunctionDef
    tests: list  # ordered TestDef
    fn_map: dict = field(default_factory=dict, compare=False, repr=False)
    test_map: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class MethodInfo:
    method_id: str
    return_category: str
    statement_count: int
    branch_count: int
    is_empty: bool
    is_solely_return_null: bool
    declared_type: str


# ---------------------------------------------------------------------------
# Lexer

_TWO_CHAR_OPS = ("==", "!=", "<=", ">=", "&&", "||", "->")
_ONE_CHAR_OPS = "+-*/%<>!=(){}[],;:"

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass
class _Token:
    kind: str  # ident | kw | int | float | string | op | eof
    value: object
    line: int
    col: int
    pos: int


def _lex(text, file):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        start_line, start_col, start_pos = line, col, i
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "kw" if word in KEYWORDS else "ident"
            tokens.append(_Token(kind, word, start_line, start_col, start_pos))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
                tokens.append(_Token("float", float(text[i:j]), start_line, start_col, start_pos))
            else:
                value = int(text[i:j])
                if value > 2 ** 63 - 1:  # ints are 64-bit signed
                    raise ParseError("integer literal out of range",
                                     file, start_line, start_col)
                tokens.append(_Token("int", value, start_line, start_col, start_pos))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            out = []
            while True:
                if j >= n or text[j] == "\n":
                    raise ParseError("unterminated string literal", file, start_line, start_col)
                ch = text[j]
                if ch == '"':
                    j += 1
                    break
                if ch == "\\":
                    if j + 1 >= n or text[j + 1] not in _ESCAPES:
                        raise ParseError("bad escape sequence", file, line, col + (j - i))
                    out.append(_ESCAPES[text[j + 1]])
                    j += 2
                    continue
                out.append(ch)
                j += 1
            tokens.append(_Token("string", "".join(out), start_line, start_col, start_pos))
            col += j - i
            i = j
            continue
        two = text[i:i + 2]
        if two in _TWO_CHAR_OPS:
            tokens.append(_Token("op", two, start_line, start_col, start_pos))
            i += 2
            col += 2
            continue
        if c in _ONE_CHAR_OPS:
            tokens.append(_Token("op", c, start_line, start_col, start_pos))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", file, line, col)
    tokens.append(_Token("eof", None, line, col, n))
    return tokens


# ---------------------------------------------------------------------------
# Parser (recursive descent, precedence climbing for binary operators)

_BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


class _Parser:
    def __init__(self, text, file):
        self.file = file
        self.toks = _lex(text, file)
        self.i = 0

    def peek(self, ahead=0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.file, tok.line, tok.col)

    def expect_op(self, op):
        tok = self.next()
        if tok.kind != "op" or tok.value != op:
            self.error(f"expected {op!r}, found {tok.value!r}", tok)
        return tok

    def expect_kw(self, kw):
        tok = self.next()
        if tok.kind != "kw" or tok.value != kw:
            self.error(f"expected {kw!r}, found {tok.value!r}", tok)
        return tok

    def expect_ident(self):
        tok = self.next()
        if tok.kind != "ident":
            self.error(f"expected identifier, found {tok.value!r}", tok)
        return tok

    def parse_items(self):
        functions, tests = [], []
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                break
            if tok.kind == "kw" and tok.value == "fn":
                functions.append(self.parse_fn())
            elif tok.kind == "kw" and tok.value == "test":
                tests.append(self.parse_test())
            else:
                self.error(f"expected 'fn' or 'test', found {tok.value!r}", tok)
        return functions, tests

    def parse_fn(self):
        kw = self.expect_kw("fn")
        name = self.expect_ident()
        self.expect_op("(")
        params = []
        if not self.at_op(")"):
            while True:
                pname = self.expect_ident()
                self.expect_op(":")
                ptype = self.parse_type()
                params.append((pname.value, ptype))
                if self.at_op(","):
                    self.next()
                    continue
                break
        self.expect_op(")")
        self.expect_op("->")
        rtype = self.parse_type()
        body, start, end = self.parse_block()
        return FunctionDef(name.value, params, rtype, body, file=self.file,
                           line=kw.line, col=kw.col, body_start=start, body_end=end)

    def parse_test(self):
        kw = self.expect_kw("test")
        name = self.expect_ident()
        body, start, end = self.parse_block()
        return TestDef(name.value, body, file=self.file, line=kw.line, col=kw.col,
                       body_start=start, body_end=end)

    def parse_type(self):
        tok = self.next()
        if tok.kind == "kw" and tok.value in TYPES:
            return tok.value
        self.error(f"expected a type, found {tok.value!r}", tok)

    def at_op(self, op):
        tok = self.peek()
        return tok.kind == "op" and tok.value == op

    def at_kw(self, kw):
        tok = self.peek()
        return tok.kind == "kw" and tok.value == kw

    def parse_block(self):
        open_tok = self.expect_op("{")
        stmts = []
        while not self.at_op("}"):
            if self.peek().kind == "eof":
                self.error("unclosed block", open_tok)
            stmts.append(self.parse_stmt())
        close_tok = self.next()
        return stmts, open_tok.pos, close_tok.pos + 1

    def parse_stmt(self):
        tok = self.peek()
        if tok.kind == "kw":
            if tok.value == "let":
                self.next()
                name = self.expect_ident()
                self.expect_op("=")
                expr = self.parse_expr()
                self.expect_op(";")
                return LetStmt(name.value, expr, line=tok.line, col=tok.col)
            if tok.value == "if":
                self.next()
                cond = self.parse_expr()
                then, _, _ = self.parse_block()
                orelse = None
                if self.at_kw("else"):
                    self.next()
                    orelse, _, _ = self.parse_block()
                return IfStmt(cond, then, orelse, line=tok.line, col=tok.col)
            if tok.value == "while":
                self.next()
                cond = self.parse_expr()
                body, _, _ = self.parse_block()
                return WhileStmt(cond, body, line=tok.line, col=tok.col)
            if tok.value == "return":
                self.next()
                expr = None
                if not self.at_op(";"):
                    expr = self.parse_expr()
                self.expect_op(";")
                return ReturnStmt(expr, line=tok.line, col=tok.col)
            if tok.value == "assert":
                self.next()
                expr = self.parse_expr()
                self.expect_op(";")
                return AssertStmt(expr, line=tok.line, col=tok.col)
            if tok.value == "spawn":
                self.next()
                name = self.expect_ident()
                self.expect_op("(")
                args = self.parse_args(")")
                self.expect_op(";")
                return SpawnStmt(name.value, args, line=tok.line, col=tok.col)
            self.error(f"unexpected keyword {tok.value!r} at statement start", tok)
        if tok.kind == "ident":
            nxt = self.peek(1)
            if nxt.kind == "op" and nxt.value == "(":
                call = self.parse_primary()
                self.expect_op(";")
                return CallStmt(call, line=tok.line, col=tok.col)
            if nxt.kind == "op" and nxt.value == "=":
                self.next()
                self.next()
                expr = self.parse_expr()
                self.expect_op(";")
                return AssignStmt(tok.value, expr, line=tok.line, col=tok.col)
            self.error(f"expected '(' or '=' after identifier {tok.value!r}", nxt)
        self.error(f"expected a statement, found {tok.value!r}", tok)

    def parse_args(self, closing):
        args = []
        if not self.at_op(closing):
            while True:
                args.append(self.parse_expr())
                if self.at_op(","):
                    self.next()
                    continue
                break
        self.expect_op(closing)
        return args

    def parse_expr(self):
        return self.parse_binary(0)

    def parse_binary(self, level):
        if level >= len(_BINARY_LEVELS):
            return self.parse_unary()
        ops = _BINARY_LEVELS[level]
        left = self.parse_binary(level + 1)
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.value in ops:
                self.next()
                right = self.parse_binary(level + 1)
                left = BinaryExpr(tok.value, left, right, line=tok.line, col=tok.col)
                continue
            return left

    def parse_unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.value in ("!", "-"):
            self.next()
            operand = self.parse_unary()
            return UnaryExpr(tok.value, operand, line=tok.line, col=tok.col)
        return self.parse_primary()

    def parse_primary(self):
        tok = self.next()
        if tok.kind == "int":
            return IntLit(tok.value, line=tok.line, col=tok.col)
        if tok.kind == "float":
            return FloatLit(tok.value, line=tok.line, col=tok.col)
        if tok.kind == "string":
            return StrLit(tok.value, line=tok.line, col=tok.col)
        if tok.kind == "kw":
            if tok.value == "true":
                return BoolLit(True, line=tok.line, col=tok.col)
            if tok.value == "false":
                return BoolLit(False, line=tok.line, col=tok.col)
            if tok.value == "null":
                return NullLit(line=tok.line, col=tok.col)
            if tok.value == "box":
                self.expect_op("(")
                inner = self.parse_expr()
                self.expect_op(")")
                return BoxExpr(inner, line=tok.line, col=tok.col)
            self.error(f"unexpected keyword {tok.value!r} in expression", tok)
        if tok.kind == "op":
            if tok.value == "(":
                inner = self.parse_expr()
                self.expect_op(")")
                return inner
            if tok.value == "[":
                items = self.parse_args("]")
                return ArrLit(items, line=tok.line, col=tok.col)
            self.error(f"unexpected {tok.value!r} in expression", tok)
        if tok.kind == "ident":
            if self.at_op("("):
                self.next()
                args = self.parse_args(")")
                return CallExpr(tok.value, args, line=tok.line, col=tok.col)
            return VarExpr(tok.value, line=tok.line, col=tok.col)
        self.error("unexpected end of input", tok)


# ---------------------------------------------------------------------------
# Static analysis

def _walk_stmts(stmts):
    for stmt in stmts:
        yield stmt
        if isinstance(stmt, IfStmt):
            yield from _walk_stmts(stmt.then)
            if stmt.orelse is not None:
                yield from _walk_stmts(stmt.orelse)
        elif isinstance(stmt, WhileStmt):
            yield from _walk_stmts(stmt.body)


def _index_def(d):
    idx = 0
    branches = 0
    for stmt in _walk_stmts(d.body):
        stmt.index = idx
        idx += 1
        if isinstance(stmt, (IfStmt, WhileStmt)):
            stmt.branch_id = branches
            branches += 1
    d.stmt_count = idx
    d.branch_point_count = branches


def _definitely_returns(stmts):
    for stmt in stmts:
        if isinstance(stmt, ReturnStmt):
            return True
        if isinstance(stmt, IfStmt) and stmt.orelse is not None:
            if _definitely_returns(stmt.then) and _definitely_returns(stmt.orelse):
                return True
    return False


_NUMERIC = ("int", "float", "any")


class _Checker:
    """Scope and type checks for one function or test body.

    Expressions whose type cannot be pinned statically (results of `get` and
    `deref`, demoted variables) carry type "any" and pass every check; the
    interpreter enforces the rest dynamically.
    """

    def __init__(self, program, d, return_type):
        self.program = program
        self.d = d
        self.return_type = return_type

    def err(self, cls, message, node):
        raise cls(message, self.d.file, node.line, node.col)

    def check(self):
        scope = {}
        for pname, ptype in getattr(self.d, "params", []):
            if pname in scope or pname in BUILTINS:
                self.err(DuplicateNameError, f"duplicate parameter {pname!r}", self.d)
            scope[pname] = ptype
        self.block(self.d.body, [scope])
        if self.return_type not in ("void", None) and not _definitely_returns(self.d.body):
            self.err(TypeCheckError,
                     f"function {self.d.name!r} may end without returning {self.return_type}",
                     self.d)

    def lookup(self, name, scopes):
        for sc in reversed(scopes):
            if name in sc:
                return sc[name]
        return None

    def block(self, stmts, scopes):
        scopes.append({})
        for stmt in stmts:
            self.stmt(stmt, scopes)
        scopes.pop()

    def stmt(self, stmt, scopes):
        if isinstance(stmt, LetStmt):
            if self.lookup(stmt.name, scopes) is not None:
                self.err(DuplicateNameError, f"{stmt.name!r} is already defined", stmt)
            if stmt.name in BUILTINS or stmt.name in self.program.fn_map \
                    or stmt.name in self.program.test_map:
                self.err(DuplicateNameError, f"{stmt.name!r} collides with a callable name", stmt)
            scopes[-1][stmt.name] = self.expr(stmt.expr, scopes)
        elif isinstance(stmt, AssignStmt):
            t = self.expr(stmt.expr, scopes)
            for sc in reversed(scopes):
                if stmt.name in sc:
                    if sc[stmt.name] != t:
                        sc[stmt.name] = "any"
                    return
            self.err(UndeclaredNameError, f"assignment to undeclared {stmt.name!r}", stmt)
        elif isinstance(stmt, IfStmt):
            self.require(stmt.cond, ("bool", "any"), scopes, "if condition")
            self.block(stmt.then, scopes)
            if stmt.orelse is not None:
                self.block(stmt.orelse, scopes)
        elif isinstance(stmt, WhileStmt):
            self.require(stmt.cond, ("bool", "any"), scopes, "while condition")
            self.block(stmt.body, scopes)
        elif isinstance(stmt, ReturnStmt):
            declared = self.return_type
            if declared in ("void", None):
                if stmt.expr is not None:
                    self.err(TypeCheckError, "void function returns a value", stmt)
                return
            if stmt.expr is None:
                self.err(TypeCheckError, f"return needs a value of type {declared}", stmt)
            t = self.expr(stmt.expr, scopes)
            if t != "any" and t != declared:
                self.err(TypeCheckError, f"returns {t}, declared {declared}", stmt)
        elif isinstance(stmt, AssertStmt):
            self.require(stmt.expr, ("bool", "any"), scopes, "assert")
        elif isinstance(stmt, SpawnStmt):
            fn = self.program.fn_map.get(stmt.target)
            if fn is None:
                self.err(UnresolvedCallError, f"spawn target {stmt.target!r} is not a function", stmt)
            if fn.return_type != "void":
                self.err(TypeCheckError, f"spawn target {stmt.target!r} must be void", stmt)
            self.call_args(stmt.target, stmt.args, [p[1] for p in fn.params], scopes, stmt)
        elif isinstance(stmt, CallStmt):
            self.expr(stmt.call, scopes)
        else:
            raise AssertionError(f"unknown statement {stmt!r}")

    def require(self, expr, allowed, scopes, what):
        t = self.expr(expr, scopes)
        if t not in allowed:
            self.err(TypeCheckError, f"{what} has type {t}, expected {allowed[0]}", expr)
        return t

    def call_args(self, name, args, param_types, scopes, node):
        if len(args) != len(param_types):
            self.err(TypeCheckError,
                     f"{name!r} takes {len(param_types)} argument(s), got {len(args)}", node)
        for arg, pt in zip(args, param_types):
            t = self.expr(arg, scopes)
            if t != "any" and pt != "any" and t != pt:
                self.err(TypeCheckError, f"argument to {name!r} has type {t}, expected {pt}", arg)

    def expr(self, e, scopes):
        if isinstance(e, IntLit):
            return "int"
        if isinstance(e, FloatLit):
            return "float"
        if isinstance(e, StrLit):
            return "str"
        if isinstance(e, BoolLit):
            return "bool"
        if isinstance(e, NullLit):
            return "ref"
        if isinstance(e, ArrLit):
            for item in e.items:
                self.expr(item, scopes)
            return "arr"
        if isinstance(e, BoxExpr):
            self.expr(e.value, scopes)
            return "ref"
        if isinstance(e, VarExpr):
            t = self.lookup(e.name, scopes)
            if t is None:
                self.err(UndeclaredNameError, f"undeclared variable {e.name!r}", e)
            return t
        if isinstance(e, CallExpr):
            if e.name in BUILTINS:
                param_types, ret = BUILTINS[e.name]
                self.call_args(e.name, e.args, list(param_types), scopes, e)
                return ret
            fn = self.program.fn_map.get(e.name)
            if fn is None:
                detail = "a test is not callable" if e.name in self.program.test_map \
                    else "no such function or builtin"
                self.err(UnresolvedCallError, f"call to {e.name!r}: {detail}", e)
            self.call_args(e.name, e.args, [p[1] for p in fn.params], scopes, e)
            return fn.return_type
        if isinstance(e, BinaryExpr):
            lt = self.expr(e.left, scopes)
            rt = self.expr(e.right, scopes)
            op = e.op
            if op in ("&&", "||"):
                for t in (lt, rt):
                    if t not in ("bool", "any"):
                        self.err(TypeCheckError, f"operand of {op} has type {t}", e)
                return "bool"
            if op in ("==", "!="):
                return "bool"
            if op in ("<", "<=", ">", ">="):
                for t in (lt, rt):
                    if t not in _NUMERIC:
                        self.err(TypeCheckError, f"operand of {op} has type {t}", e)
                return "bool"
            # arithmetic
            for t in (lt, rt):
                if t not in _NUMERIC:
                    self.err(TypeCheckError, f"operand of {op} has type {t}", e)
            if lt == "int" and rt == "int":
                return "int"
            if "any" in (lt, rt):
                return "any"
            return "float"
        if isinstance(e, UnaryExpr):
            t = self.expr(e.operand, scopes)
            if e.op == "!":
                if t not in ("bool", "any"):
                    self.err(TypeCheckError, f"operand of ! has type {t}", e)
                return "bool"
            if t not in _NUMERIC:
                self.err(TypeCheckError, f"operand of unary - has type {t}", e)
            return t
        raise AssertionError(f"unknown expression {e!r}")


# ---------------------------------------------------------------------------
# Public API

def parse_document(text, file="<string>"):
    """Parse one source document into raw (functions, tests)."""
    return _Parser(text, file).parse_items()


def parse_project(sources, project_id="project"):
    """Parse named documents [(name, text), ...] into a validated Program."""
    functions, tests = [], []
    for name, text in sources:
        fns, tsts = parse_document(text, name)
        functions.extend(fns)
        tests.extend(tsts)
    program = Program(project_id, functions, tests)
    seen = {}
    for d in functions + tests:
        if d.name in BUILTINS:
            raise DuplicateNameError(f"{d.name!r} shadows a builtin", d.file, d.line, d.col)
        if d.name in seen:
            raise DuplicateNameError(f"{d.name!r} is defined twice", d.file, d.line, d.col)
        seen[d.name] = d
    program.fn_map = {f.name: f for f in functions}
    program.test_map = {t.name: t for t in tests}
    for d in functions + tests:
        _index_def(d)
    for f in functions:
        _Checker(program, f, f.return_type).check()
    for t in tests:
        _Checker(program, t, "void").check()
    return program


def analyze_function(fn, program):
    """Re-index a function body in place (used after a body swap)."""
    _index_def(fn)
    _Checker(program, fn, fn.return_type).check()


def load_project(path):
    """Load a project from a directory containing project.json (or from the
    manifest file itself)."""
    path = Path(path)
    manifest_path = path / "project.json" if path.is_dir() else path
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    base = manifest_path.parent
    sources = []
    for rel in manifest["sources"]:
        sources.append((rel, (base / rel).read_text(encoding="utf-8")))
    return parse_project(sources, project_id=manifest["project_id"])


def enumerate_methods(program):
    """One MethodInfo per function, in declaration order."""
    out = []
    for f in program.functions:
        body = f.body
        solely_null = (
            len(body) == 1
            and isinstance(body[0], ReturnStmt)
            and isinstance(body[0].expr, NullLit)
        )
        out.append(MethodInfo(
            method_id=f.name,
            return_category=RETURN_CATEGORIES[f.return_type],
            statement_count=f.stmt_count,
            branch_count=2 * f.branch_point_count,
            is_empty=f.stmt_count == 0,
            is_solely_return_null=solely_null,
            declared_type=f.return_type,
        ))
    return out


def mutation_eligible(method):
    """Whether extreme mutation of this method can produce killable mutants."""
    return not (method.is_empty or method.is_solely_return_null)


# ---------------------------------------------------------------------------
# Canonical formatting (one statement per line)

def _fmt_expr(e, parent_prec=0):
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, FloatLit):
        return repr(e.value)
    if isinstance(e, StrLit):
        body = e.value.replace("\\", "\\\\").replace('"', '\\"')
        body = body.replace("\n", "\\n").replace("\t", "\\t")
        return f'"{body}"'
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, NullLit):
        return "null"
    if isinstance(e, ArrLit):
        return "[" + ", ".join(_fmt_expr(x) for x in e.items) + "]"
    if isinstance(e, BoxExpr):
        return f"box({_fmt_expr(e.value)})"
    if isinstance(e, VarExpr):
        return e.name
    if isinstance(e, CallExpr):
        return e.name + "(" + ", ".join(_fmt_expr(a) for a in e.args) + ")"
    if isinstance(e, BinaryExpr):
        return f"({_fmt_expr(e.left)} {e.op} {_fmt_expr(e.right)})"
    if isinstance(e, UnaryExpr):
        return f"({e.op}{_fmt_expr(e.operand)})"
    raise AssertionError(f"unknown expression {e!r}")


def _fmt_stmts(stmts, indent):
    pad = "    " * indent
    lines = []
    for s in stmts:
        if isinstance(s, LetStmt):
            lines.append(f"{pad}let {s.name} = {_fmt_expr(s.expr)};")
        elif isinstance(s, AssignStmt):
            lines.append(f"{pad}{s.name} = {_fmt_expr(s.expr)};")
        elif isinstance(s, IfStmt):
            lines.append(f"{pad}if {_fmt_expr(s.cond)} {{")
            lines.extend(_fmt_stmts(s.then, indent + 1))
            if s.orelse is not None:
                lines.append(f"{pad}}} else {{")
                lines.extend(_fmt_stmts(s.orelse, indent + 1))
            lines.append(f"{pad}}}")
        elif isinstance(s, WhileStmt):
            lines.append(f"{pad}while {_fmt_expr(s.cond)} {{")
            lines.extend(_fmt_stmts(s.body, indent + 1))
            lines.append(f"{pad}}}")
        elif isinstance(s, ReturnStmt):
            lines.append(f"{pad}return;" if s.expr is None
                         else f"{pad}return {_fmt_expr(s.expr)};")
        elif isinstance(s, AssertStmt):
            lines.append(f"{pad}assert {_fmt_expr(s.expr)};")
        elif isinstance(s, SpawnStmt):
            args = ", ".join(_fmt_expr(a) for a in s.args)
            lines.append(f"{pad}spawn {s.target}({args});")
        elif isinstance(s, CallStmt):
            lines.append(f"{pad}{_fmt_expr(s.call)};")
        else:
            raise AssertionError(f"unknown statement {s!r}")
    return lines


def format_program(program):
    """Render a Program back to canonical source text."""
    chunks = []
    for f in program.functions:
        params = ", ".join(f"{n}: {t}" for n, t in f.params)
        header = f"fn {f.name}({params}) -> {f.return_type} {{"
        chunks.append("\n".join([header] + _fmt_stmts(f.body, 1) + ["}"]))
    for t in program.tests:
        chunks.append("\n".join([f"test {t.name} {{"] + _fmt_stmts(t.body, 1) + ["}"]))
    return "\n\n".join(chunks) + "\n"
