"""Tokenizer and recursive-descent parser for the q-series expression language.

Grammar (whitespace insensitive)::

    expr     := term (("+" | "-") term)*
    term     := factor (("*" | "/") factor)*
    factor   := "-"? atom ("^" exponent)?
    atom     := RATIONAL | "q" | IDENT | "(" expr ")" | call
    exponent := "(" expr ")" | "-"? RATIONAL | IDENT
    call     := IDENT "(" args ")"

A RATIONAL token is ``digits`` or ``digits/digits`` written without spaces,
so ``q^3/2`` means ``q^(3/2)``, matching the text output format.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from ..errors import BindingError, DslError

MAX_DEPTH = 100

# name -> (min args, max args); binder calls take the variable first
CALLS = {
    "poch": (3, 3),
    "pochinf": (1, 2),
    "qbin": (2, 2),
    "tau": (2, 2),
    "jtp": (2, 2),
    "eulerq": (0, 0),
    "phi": (0, 0),
    "psi": (0, 0),
    "sum": (4, 4),
    "bsum": (2, 2),
}
BINDERS = {"sum", "bsum"}

# argument slots that accept the keyword inf
INF_SLOTS = {("poch", 2), ("sum", 2)}


@dataclass(frozen=True)
class Span:
    line: int
    col: int


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction
    span: Span


@dataclass(frozen=True)
class QVar:
    span: Span


@dataclass(frozen=True)
class Name:
    name: str
    span: Span


@dataclass(frozen=True)
class Inf:
    span: Span


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    span: Span


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    span: Span


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: "Node"
    span: Span


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    span: Span


@dataclass(frozen=True)
class Binder:
    """``sum(var, lo, hi, body)`` or ``bsum(var, body)``."""

    name: str
    var: str
    lo: Optional["Node"]
    hi: Optional["Node"]
    body: "Node"
    span: Span


Node = Union[Num, QVar, Name, Inf, Neg, BinOp, Pow, Call, Binder]


# -- tokens ------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # NUM IDENT OP EOF
    text: str
    span: Span
    value: Optional[Fraction] = None


_OPS = set("+-*/^(),")


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        span = Span(line, col)
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            num = int(text[i:j])
            value = Fraction(num)
            if j + 1 < n and text[j] == "/" and text[j + 1].isdigit():
                k = j + 1
                while k < n and text[k].isdigit():
                    k += 1
                den = int(text[j + 1 : k])
                if den == 0:
                    raise DslError("zero denominator in rational literal", line, col)
                value = Fraction(num, den)
                j = k
            tokens.append(Token("NUM", text[i:j], span, value))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[i:j], span))
            col += j - i
            i = j
            continue
        if ch in _OPS:
            tokens.append(Token("OP", ch, span))
            i, col = i + 1, col + 1
            continue
        raise DslError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("EOF", "", Span(line, col)))
    return tokens


def _show(tok: Token) -> str:
    return "end of input" if tok.kind == "EOF" else repr(tok.text)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.depth = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind == "OP" and self.tok.text == text

    def fail(self, what: str, expected: tuple[str, ...]):
        t = self.tok
        raise DslError(f"expected {what}, got {_show(t)}", t.span.line, t.span.col, expected)

    def expect(self, text: str, what: Optional[str] = None):
        if not self.at(text):
            self.fail(what or repr(text), (repr(text),))
        return self.advance()

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            t = self.tok
            raise DslError("expression nested too deeply", t.span.line, t.span.col)

    # grammar

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "EOF":
            self.fail("an operator or end of input", ("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"))
        return node

    def expr(self) -> Node:
        self.enter()
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance()
            node = BinOp(op.text, node, self.term(), op.span)
        self.depth -= 1
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.at("*") or self.at("/"):
            op = self.advance()
            node = BinOp(op.text, node, self.factor(), op.span)
        return node

    def factor(self) -> Node:
        if self.at("-"):
            op = self.advance()
            if self.at("-"):
                self.fail("an operand", _ATOM_START)
            inner = self.powered()
            return Neg(inner, op.span)
        return self.powered()

    def powered(self) -> Node:
        base = self.atom()
        if self.at("^"):
            op = self.advance()
            return Pow(base, self.exponent(), op.span)
        return base

    def exponent(self) -> Node:
        t = self.tok
        if self.at("("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if self.at("-"):
            self.advance()
            if self.tok.kind != "NUM":
                self.fail("a rational exponent", ("RATIONAL",))
            num = self.advance()
            return Num(-num.value, t.span)
        if t.kind == "NUM":
            self.advance()
            return Num(t.value, t.span)
        if t.kind == "IDENT" and t.text not in CALLS and t.text != "inf":
            self.advance()
            return QVar(t.span) if t.text == "q" else Name(t.text, t.span)
        self.fail("an exponent", ("'('", "'-'", "RATIONAL", "IDENT"))

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "NUM":
            self.advance()
            return Num(t.value, t.span)
        if self.at("("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "IDENT":
            self.advance()
            if t.text == "q":
                return QVar(t.span)
            if self.at("("):
                return self.call(t)
            if t.text in CALLS:
                self.fail(f"'(' after {t.text}", ("'('",))
            if t.text == "inf":
                raise DslError("inf is only allowed as a length or an upper summation limit",
                               t.span.line, t.span.col)
            return Name(t.text, t.span)
        self.fail("an operand", _ATOM_START)

    def call(self, name_tok: Token) -> Node:
        name = name_tok.text
        if name not in CALLS:
            raise DslError(f"unknown function {name!r}", name_tok.span.line, name_tok.span.col,
                           tuple(sorted(CALLS)))
        self.expect("(")
        lo, hi = CALLS[name]
        args: list = []
        if name in BINDERS:
            v = self.tok
            if v.kind != "IDENT" or v.text in CALLS or v.text in ("q", "inf"):
                self.fail("a summation variable", ("IDENT",))
            args.append(self.advance().text)
            if not self.at(")"):
                self.expect(",", "','")
        if not self.at(")") or name in BINDERS and len(args) == 1 and self.toks[self.pos - 1].text == ",":
            while True:
                if self.tok.kind == "IDENT" and self.tok.text == "inf" and (name, len(args)) in INF_SLOTS:
                    args.append(Inf(self.advance().span))
                else:
                    args.append(self.expr())
                if not self.at(","):
                    break
                self.advance()
        if not self.at(")"):
            self.fail("',' or ')'", ("','", "')'"))
        self.advance()
        if not lo <= len(args) <= hi:
            want = str(lo) if lo == hi else f"{lo} to {hi}"
            raise DslError(f"{name} takes {want} argument{'s' if hi != 1 else ''}, got {len(args)}",
                           name_tok.span.line, name_tok.span.col)
        if name == "sum":
            return Binder(name, args[0], args[1], args[2], args[3], name_tok.span)
        if name == "bsum":
            return Binder(name, args[0], None, None, args[1], name_tok.span)
        return Call(name, tuple(args), name_tok.span)


_ATOM_START = ("RATIONAL", "'q'", "IDENT", "'('")


def parse(text: str) -> Node:
    """Parse ``text`` into a positioned AST; raises :class:`DslError`."""
    if not isinstance(text, str):
        raise DslError("expression must be text")
    return _Parser(tokenize(text)).parse()


def check_bindings(node: Node, bound: frozenset = frozenset()) -> None:
    """Raise :class:`BindingError` for any identifier used outside its binder."""
    if isinstance(node, Name):
        if node.name not in bound:
            raise BindingError(f"unbound identifier {node.name!r}", node.span.line, node.span.col)
    elif isinstance(node, Neg):
        check_bindings(node.operand, bound)
    elif isinstance(node, BinOp):
        check_bindings(node.left, bound)
        check_bindings(node.right, bound)
    elif isinstance(node, Pow):
        check_bindings(node.base, bound)
        check_bindings(node.exponent, bound)
    elif isinstance(node, Call):
        for a in node.args:
            check_bindings(a, bound)
    elif isinstance(node, Binder):
        for limit in (node.lo, node.hi):
            if limit is not None:
                check_bindings(limit, bound)
        check_bindings(node.body, bound | {node.var})
