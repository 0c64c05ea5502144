"""A small arithmetic expression language over the variables ``x`` and ``y``.

Grammar, loosest binding first::

    expr    := sum (CMP sum)?            CMP is one of < <= > >= ==
    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?         right associative
    atom    := NUMBER | NAME | NAME '(' args ')' | '(' expr ')'

Functions: exp, sqrt, abs, pow, min, max and the lazy conditional
``if(cond, a, b)``. Comparisons evaluate to 1.0 or 0.0.

Evaluation works on scalars and numpy arrays alike and never returns
non-finite values: domain violations raise :class:`EvaluationError`.
"""

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError, ExpressionSyntaxError

__all__ = ["Expression", "Num", "Var", "Neg", "BinOp", "Call", "parse", "evaluate", "to_source"]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


_ARITY = {"exp": 1, "sqrt": 1, "abs": 1, "pow": 2, "min": 2, "max": 2, "if": 3}
_COMPARISONS = ("<=", ">=", "==", "<", ">")

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op><=|>=|==|[-+*/^(),<>])
    """,
    re.VERBOSE,
)


def _tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {source[pos]!r}", _offset(source, pos), source)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), _offset(source, pos)))
        pos = m.end()
    tokens.append(("end", "", _offset(source, pos)))
    return tokens


def _offset(source, char_index):
    return len(source[:char_index].encode("utf-8"))


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ExpressionSyntaxError(msg, tok[2], self.source)

    def accept(self, *texts):
        kind, text, _ = self.tok
        if kind == "op" and text in texts:
            self.i += 1
            return text
        return None

    def expect(self, text):
        if not self.accept(text):
            found = self.tok[1] or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def parse(self):
        if self.tok[0] == "end":
            raise self.error("empty expression")
        node = self.expr()
        if self.tok[0] != "end":
            raise self.error(f"unexpected {self.tok[1]!r}")
        return node

    def expr(self):
        node = self.sum()
        op = self.accept(*_COMPARISONS)
        if op:
            node = BinOp(op, node, self.sum())
            if self.tok[0] == "op" and self.tok[1] in _COMPARISONS:
                raise self.error("comparisons cannot be chained")
        return node

    def sum(self):
        node = self.product()
        while op := self.accept("+", "-"):
            node = BinOp(op, node, self.product())
        return node

    def product(self):
        node = self.unary()
        while op := self.accept("*", "/"):
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, _ = tok = self.tok
        if kind == "num":
            self.i += 1
            return Num(float(text))
        if kind == "name":
            self.i += 1
            if self.accept("("):
                if text not in _ARITY:
                    raise self.error(f"unknown function {text!r}", tok)
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
                if len(args) != _ARITY[text]:
                    raise self.error(f"{text}() takes {_ARITY[text]} argument(s), got {len(args)}", tok)
                return Call(text, tuple(args))
            if text not in ("x", "y"):
                hint = " (functions need parentheses)" if text in _ARITY else ""
                raise self.error(f"unknown variable {text!r}{hint}", tok)
            return Var(text)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        raise self.error(f"unexpected {text or 'end of input'!r}")


@dataclass(frozen=True)
class Expression:
    """A parsed expression; callable as ``expr(x, y)``.

    Equality compares syntax trees only, so ``parse("1+x") == parse("1 + x")``.
    """

    tree: object
    source: str = field(default="", compare=False)

    def __call__(self, x, y):
        return evaluate(self, x, y)

    def __str__(self):
        return self.source or to_source(self.tree)

    @property
    def is_constant(self):
        return isinstance(self.tree, Num)


def parse(source):
    """Parse ``source`` into an :class:`Expression`."""
    if isinstance(source, Expression):
        return source
    return Expression(_Parser(str(source)).parse(), str(source))


def to_source(node):
    """Fully parenthesised source text; ``parse(to_source(e)) == e``."""
    if isinstance(node, Expression):
        node = node.tree
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_source(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def _fail(mask, x, y, what):
    k = np.flatnonzero(np.broadcast_to(mask, np.shape(x)))[0] if np.ndim(x) else 0
    px = np.ravel(x)[k] if np.ndim(x) else x
    py = np.ravel(y)[k] if np.ndim(y) else y
    raise EvaluationError(f"{what} at (x, y) = ({float(px)!r}, {float(py)!r})")


def _power(a, b, x, y):
    a, b = np.broadcast_arrays(a, b)
    if np.any((a == 0) & (b < 0)):
        _fail((a == 0) & (b < 0), x, y, "zero raised to a negative power")
    if np.any((a < 0) & (b != np.round(b))):
        _fail((a < 0) & (b != np.round(b)), x, y, "negative base with non-integer exponent")
    return np.power(a, b)


def _eval(node, x, y):
    if isinstance(node, Num):
        return np.full(np.shape(x), node.value)
    if isinstance(node, Var):
        return np.array(x if node.name == "x" else y, dtype=float, copy=True)
    if isinstance(node, Neg):
        return -_eval(node.operand, x, y)
    if isinstance(node, BinOp):
        a = _eval(node.left, x, y)
        b = _eval(node.right, x, y)
        op = node.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if np.any(b == 0):
                _fail(b == 0, x, y, "division by zero")
            return a / b
        if op == "^":
            return _power(a, b, x, y)
        cmp = {"<": np.less, "<=": np.less_equal, ">": np.greater, ">=": np.greater_equal, "==": np.equal}[op]
        return cmp(a, b).astype(float)
    if isinstance(node, Call):
        f = node.func
        if f == "if":
            cond = _eval(node.args[0], x, y) != 0
            out = np.empty(np.shape(x))
            # only the selected branch is evaluated at each point
            for mask, branch in ((cond, node.args[1]), (~cond, node.args[2])):
                if np.any(mask):
                    out[mask] = _eval(branch, np.asarray(x)[mask], np.asarray(y)[mask])
            return out
        args = [_eval(a, x, y) for a in node.args]
        if f == "sqrt":
            if np.any(args[0] < 0):
                _fail(args[0] < 0, x, y, "square root of a negative number")
            return np.sqrt(args[0])
        if f == "exp":
            return np.exp(args[0])
        if f == "abs":
            return np.abs(args[0])
        if f == "pow":
            return _power(args[0], args[1], x, y)
        if f == "min":
            return np.minimum(*args)
        if f == "max":
            return np.maximum(*args)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(node, x, y):
    """Evaluate ``node`` at scalar or array coordinates.

    Scalar inputs give a Python float; array inputs an array of the
    broadcast shape.
    """
    if isinstance(node, Expression):
        node = node.tree
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    with np.errstate(all="ignore"):
        out = _eval(node, x, y)
    bad = ~np.isfinite(out)
    if np.any(bad):
        _fail(bad, x, y, "non-finite result (overflow)")
    return float(out) if scalar else out
