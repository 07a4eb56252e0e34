"""One-variable expression language with exact first derivatives.

Grammar (``^`` is right-associative; a leading minus binds tighter than
``^``, so ``-t^2`` is ``(-t)^2``)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := unary ('^' factor)?
    unary  := '-'? atom
    atom   := number | 't' | func '(' expr ')' | '(' expr ')'
    func   := sin | cos | exp | ln | abs

Evaluation is vectorised over numpy arrays and propagates dual numbers
(value, derivative) in a single recursive pass, so ``eval_d(t).value`` is
bit-identical to ``eval(t)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import DomainError, NonDifferentiableError, ParseError

__all__ = [
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Func",
    "Node",
    "FnHandle",
    "EvalPair",
    "parse",
    "render",
    "describe",
    "compose",
    "add",
    "mul",
    "div",
    "const",
]

FUNCS = ("sin", "cos", "exp", "ln", "abs")
OPS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


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
    op: str  # one of OPS
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Func:
    name: str  # one of FUNCS
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Func]


class EvalPair(NamedTuple):
    value: float
    derivative: float


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(src) and src[pos].isspace():
                pos += 1
            if pos >= len(src):
                break
            m = _TOKEN.match(src, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character {src[pos]!r}", pos,
                                 frozenset({"number", "t", "function", "operator"}))
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.tokens.append(("end", "", len(src)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, text, off = self.peek()
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", off, frozenset(expected))

    def expect_op(self, op):
        kind, text, _ = self.peek()
        if kind != "op" or text != op:
            self.fail({op})
        self.take()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = "add" if self.take()[1] == "+" else "sub"
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = "mul" if self.take()[1] == "*" else "div"
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        base = self.unary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("pow", base, self.factor())
        return base

    def unary(self) -> Node:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            arg = self.atom()
            if isinstance(arg, Num):
                return Num(-arg.value)
            return Neg(arg)
        return self.atom()

    def atom(self) -> Node:
        kind, text, off = self.peek()
        if kind == "num":
            self.take()
            return Num(float(text))
        if kind == "name":
            if text == "t":
                self.take()
                return Var()
            if text in FUNCS:
                self.take()
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Func(text, arg)
            raise ParseError(f"unknown name {text!r}", off, frozenset({"t", *FUNCS}))
        if kind == "op" and text == "(":
            self.take()
            node = self.expr()
            self.expect_op(")")
            return node
        self.fail({"number", "t", "(", *FUNCS})


def _fmt_num(v: float) -> str:
    if np.isfinite(v) and v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def render(node: Node) -> str:
    """Fully parenthesised source text that reparses to an equal tree."""
    if isinstance(node, Num):
        s = _fmt_num(node.value)
        return f"({s})" if node.value < 0 or s.startswith("-") else s
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return f"-({render(node.arg)})"
    if isinstance(node, BinOp):
        return f"({render(node.left)} {OPS[node.op]} {render(node.right)})"
    if isinstance(node, Func):
        return f"{node.name}({render(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def describe(node: Node) -> str:
    """Prefix form such as ``add(sin(mul(2, t)), 1)``."""
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return f"neg({describe(node.arg)})"
    if isinstance(node, BinOp):
        return f"{node.op}({describe(node.left)}, {describe(node.right)})"
    if isinstance(node, Func):
        return f"{node.name}({describe(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


# ------------------------------------------------------------- evaluation

def _check(mask, msg, x):
    if np.any(mask):
        bad = np.broadcast_to(x, np.shape(mask))[mask]
        raise DomainError(f"{msg} at t={float(bad.flat[0])!r}")


def _ev(node: Node, t: np.ndarray, need_d: bool):
    """Return (value, derivative or None) arrays for ``node`` at ``t``."""
    if isinstance(node, Num):
        v = np.full_like(t, node.value)
        return v, (np.zeros_like(t) if need_d else None)
    if isinstance(node, Var):
        return t, (np.ones_like(t) if need_d else None)
    if isinstance(node, Neg):
        v, d = _ev(node.arg, t, need_d)
        return -v, (-d if need_d else None)
    if isinstance(node, Func):
        u, du = _ev(node.arg, t, need_d)
        name = node.name
        if name == "sin":
            return np.sin(u), (np.cos(u) * du if need_d else None)
        if name == "cos":
            return np.cos(u), (-np.sin(u) * du if need_d else None)
        if name == "exp":
            v = np.exp(u)
            return v, (v * du if need_d else None)
        if name == "ln":
            _check(u <= 0, "ln of a nonpositive value", t)
            return np.log(u), (du / u if need_d else None)
        if name == "abs":
            if need_d:
                kink = (u == 0) & (du != 0)
                if np.any(kink):
                    at = float(np.broadcast_to(t, kink.shape)[kink].flat[0])
                    raise NonDifferentiableError(f"abs is not differentiable at t={at!r}")
            return np.abs(u), (np.sign(u) * du if need_d else None)
        raise TypeError(f"unknown function {name!r}")
    if isinstance(node, BinOp):
        a, da = _ev(node.left, t, need_d)
        b, db = _ev(node.right, t, need_d)
        op = node.op
        if op == "add":
            return a + b, (da + db if need_d else None)
        if op == "sub":
            return a - b, (da - db if need_d else None)
        if op == "mul":
            return a * b, (da * b + a * db if need_d else None)
        if op == "div":
            _check(b == 0, "division by zero", t)
            v = a / b
            return v, ((da - v * db) / b if need_d else None)
        if op == "pow":
            return _pow(node, a, da, b, db, t, need_d)
    raise TypeError(f"not an expression node: {node!r}")


def _pow(node, a, da, b, db, t, need_d):
    const_exp = isinstance(node.right, Num)
    if const_exp and float(node.right.value).is_integer():
        n = node.right.value
        if n < 0:
            _check(a == 0, "zero raised to a negative power", t)
        v = a ** n
        if not need_d:
            return v, None
        if n == 0:
            return v, np.zeros_like(a)
        return v, n * a ** (n - 1) * da
    if const_exp:
        _check(a <= 0, "non-integer power of a nonpositive base", t)
        p = node.right.value
        v = a ** p
        return v, (p * a ** (p - 1) * da if need_d else None)
    # variable exponent: a^b = exp(b ln a)
    _check(a <= 0, "variable power of a nonpositive base", t)
    v = a ** b
    return v, (v * (db * np.log(a) + b * da / a) if need_d else None)


def _finite(v, t, what):
    if not np.all(np.isfinite(v)):
        idx = np.flatnonzero(~np.isfinite(np.broadcast_to(v, np.shape(t))))[0]
        raise DomainError(f"{what} is not finite at t={float(np.ravel(t)[idx])!r}")


@dataclass(frozen=True)
class FnHandle:
    """Parsed expression in ``t``; immutable and safe to share across threads."""

    ast: Node
    source: str

    @classmethod
    def from_ast(cls, ast: Node) -> "FnHandle":
        return cls(ast, render(ast))

    def eval(self, t):
        """Value at ``t`` (scalar in, float out; arrays map elementwise)."""
        arr = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            v, _ = _ev(self.ast, arr, False)
        _finite(v, arr, "value")
        return float(v) if arr.ndim == 0 else np.array(v, dtype=float)

    def eval_d(self, t):
        """(value, exact derivative) at ``t``."""
        arr = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            v, d = _ev(self.ast, arr, True)
        _finite(v, arr, "value")
        _finite(d, arr, "derivative")
        if arr.ndim == 0:
            return EvalPair(float(v), float(d))
        return EvalPair(np.array(v, dtype=float), np.array(d, dtype=float))

    def deriv(self, t):
        return self.eval_d(t).derivative

    __call__ = eval

    def __str__(self) -> str:
        return self.source


def parse(src: str) -> FnHandle:
    if not isinstance(src, str) or not src.strip():
        raise ParseError("empty expression", 0, frozenset({"number", "t", "(", *FUNCS}))
    return FnHandle(_Parser(src).parse(), src)


def _subst(node: Node, inner: Node) -> Node:
    if isinstance(node, Var):
        return inner
    if isinstance(node, Num):
        return node
    if isinstance(node, Neg):
        return Neg(_subst(node.arg, inner))
    if isinstance(node, Func):
        return Func(node.name, _subst(node.arg, inner))
    return BinOp(node.op, _subst(node.left, inner), _subst(node.right, inner))


def compose(outer: FnHandle, inner: FnHandle) -> FnHandle:
    """``outer(inner(t))`` as a new handle."""
    return FnHandle.from_ast(_subst(outer.ast, inner.ast))


def add(f: FnHandle, g: FnHandle, a: float = 1.0, b: float = 1.0) -> FnHandle:
    """``a*f + b*g``."""
    return FnHandle.from_ast(BinOp("add", BinOp("mul", Num(a), f.ast), BinOp("mul", Num(b), g.ast)))


def mul(f: FnHandle, g: FnHandle) -> FnHandle:
    return FnHandle.from_ast(BinOp("mul", f.ast, g.ast))


def div(f: FnHandle, g: FnHandle) -> FnHandle:
    return FnHandle.from_ast(BinOp("div", f.ast, g.ast))


def const(a: float) -> FnHandle:
    return FnHandle.from_ast(Num(float(a)))
