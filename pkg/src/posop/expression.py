"""Probe-function expressions in one variable ``t``.

Grammar::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | pow
    pow   := atom ('^' unary)?
    atom  := NUMBER | 't' | '(' expr ')' | FUNC '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so
``-t^2`` is ``-(t^2)``.  Evaluation is elementwise over numpy arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ParseError
from .operators import FunctionHandle

FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "abs": np.abs,
    "sqrt": np.sqrt,
    "log": np.log,
}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]

_BINARY = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide, "^": np.power}


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """``(kind, text, offset)`` triples ending with an ``eof`` token."""
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, sym: str):
        kind, txt, off = self.peek()
        if txt != sym or kind != "op":
            found = "end of input" if kind == "eof" else repr(txt)
            raise ParseError(f"expected {sym!r}, found {found}", off)
        self.take()

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.pow()

    def pow(self) -> Node:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, txt, off = self.take()
        if kind == "num":
            return Num(float(txt))
        if kind == "name":
            if txt == "t":
                return Var()
            if txt in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(txt, arg)
            raise ParseError(f"unknown identifier {txt!r}", off)
        if (kind, txt) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "eof" else repr(txt)
        raise ParseError(f"unexpected {found}", off)


def evaluate(node: Node, t):
    if isinstance(node, Num):
        return np.full(np.shape(t), node.value)
    if isinstance(node, Var):
        return np.asarray(t, dtype=float)
    if isinstance(node, Neg):
        return -evaluate(node.arg, t)
    if isinstance(node, BinOp):
        return _BINARY[node.op](evaluate(node.left, t), evaluate(node.right, t))
    return FUNCS[node.func](evaluate(node.arg, t))


@dataclass(frozen=True)
class Expression:
    text: str
    tree: Node

    def __call__(self, t):
        with np.errstate(all="ignore"):
            v = evaluate(self.tree, np.asarray(t, dtype=float))
        return float(v) if np.ndim(v) == 0 else v

    def to_function(self, domain: str = "halfline") -> FunctionHandle:
        return FunctionHandle(self, domain, vectorized=True, label=self.text)


def parse_expression(text: str) -> Expression:
    p = _Parser(text)
    tree = p.expr()
    kind, txt, off = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected {txt!r}", off)
    return Expression(text, tree)
