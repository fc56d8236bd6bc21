"""Scalar expressions over named variables: parsing, evaluation, exact derivatives.

The fragment is deliberately small: field operations, integer powers, and the
functions exp, log, sin, cos, sqrt.  Derivatives come from forward-mode dual
numbers, so they are exact up to floating point rounding.

Evaluation is vectorized: every variable may be bound to a float, a numpy array
of sample values, or a :class:`Dual` carrying derivatives with respect to an
arbitrary set of seed directions.  Charts in :mod:`tamevol.cells` rely on the
last form to obtain Jacobians by the chain rule.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownVariable

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")


class Dual:
    """Value plus first derivatives, vectorized over samples.

    ``val`` has shape ``(N,)`` and ``der`` shape ``(N, k)`` where ``k`` is the
    number of seed directions.
    """

    __slots__ = ("val", "der")
    __array_ufunc__ = None

    def __init__(self, val, der):
        self.val = val
        self.der = der

    @classmethod
    def seed(cls, values, k, index):
        values = np.asarray(values, dtype=float)
        der = np.zeros(values.shape + (k,))
        der[..., index] = 1.0
        return cls(values, der)

    @classmethod
    def constant(cls, value, n, k):
        return cls(np.broadcast_to(np.asarray(value, dtype=float), (n,)).copy(), np.zeros((n, k)))

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.der + other.der)
        return Dual(self.val + other, self.der)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.der - other.der)
        return Dual(self.val - other, self.der)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.der)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(
                self.val * other.val,
                self.der * _col(other.val) + other.der * _col(self.val),
            )
        return Dual(self.val * other, self.der * _col(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            _check_nonzero(other.val)
            q = self.val / other.val
            return Dual(q, (self.der - other.der * _col(q)) / _col(other.val))
        _check_nonzero(other)
        return Dual(self.val / other, self.der / _col(other))

    def __rtruediv__(self, other):
        _check_nonzero(self.val)
        q = other / self.val
        return Dual(q, -self.der * _col(q / self.val))


def _col(x):
    x = np.asarray(x)
    return x[..., None] if x.ndim else x


def _check_nonzero(x):
    if np.any(np.asarray(x) == 0):
        raise DomainError("division by zero")


# Elementary functions accepting floats, arrays or Duals.


def d_exp(x):
    if isinstance(x, Dual):
        v = np.exp(x.val)
        return Dual(v, x.der * _col(v))
    return np.exp(x)


def d_log(x):
    v = x.val if isinstance(x, Dual) else x
    if np.any(np.asarray(v) <= 0):
        raise DomainError("log of a nonpositive number")
    if isinstance(x, Dual):
        return Dual(np.log(v), x.der / _col(v))
    return np.log(v)


def d_sin(x):
    if isinstance(x, Dual):
        return Dual(np.sin(x.val), x.der * _col(np.cos(x.val)))
    return np.sin(x)


def d_cos(x):
    if isinstance(x, Dual):
        return Dual(np.cos(x.val), -x.der * _col(np.sin(x.val)))
    return np.cos(x)


def d_sqrt(x):
    v = x.val if isinstance(x, Dual) else x
    if np.any(np.asarray(v) < 0):
        raise DomainError("sqrt of a negative number")
    if isinstance(x, Dual):
        s = np.sqrt(v)
        if np.any(s == 0):
            raise DomainError("sqrt is not differentiable at 0")
        return Dual(s, x.der / _col(2.0 * s))
    return np.sqrt(v)


def d_powi(x, n: int):
    v = x.val if isinstance(x, Dual) else x
    if n < 0 and np.any(np.asarray(v) == 0):
        raise DomainError("negative power of zero")
    if isinstance(x, Dual):
        if n == 0:
            return Dual(np.ones_like(v), np.zeros_like(x.der))
        return Dual(v**n, x.der * _col(n * v ** (n - 1)))
    if n < 0:
        return 1.0 / np.asarray(v, dtype=float) ** (-n)
    return v**n


_FUNC_IMPL = {"exp": d_exp, "log": d_log, "sin": d_sin, "cos": d_cos, "sqrt": d_sqrt}


# AST


@dataclass(frozen=True)
class Const:
    value: float

    def ev(self, env):
        return self.value

    def show(self):
        text = repr(float(self.value))
        return f"({text})" if self.value < 0 else text

    def names(self):
        return set()


@dataclass(frozen=True)
class Var:
    name: str
    index: int

    def ev(self, env):
        return env[self.index]

    def show(self):
        return self.name

    def names(self):
        return {self.name}


@dataclass(frozen=True)
class Neg:
    arg: object

    def ev(self, env):
        return -self.arg.ev(env)

    def show(self):
        return f"(-{self.arg.show()})"

    def names(self):
        return self.arg.names()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def ev(self, env):
        a = self.left.ev(env)
        b = self.right.ev(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if not isinstance(a, Dual) and not isinstance(b, Dual):
            _check_nonzero(b)
            return np.divide(a, b)
        if not isinstance(a, Dual):
            return b.__rtruediv__(a)
        return a / b

    def show(self):
        return f"({self.left.show()} {self.op} {self.right.show()})"

    def names(self):
        return self.left.names() | self.right.names()


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int

    def ev(self, env):
        return d_powi(self.base.ev(env), self.exponent)

    def show(self):
        return f"({self.base.show()})^{self.exponent}"

    def names(self):
        return self.base.names()


@dataclass(frozen=True)
class Call:
    func: str
    arg: object

    def ev(self, env):
        return _FUNC_IMPL[self.func](self.arg.ev(env))

    def show(self):
        return f"{self.func}({self.arg.show()})"

    def names(self):
        return self.arg.names()


# Parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()]))"
)
_TRANSLATE = str.maketrans({"−": "-", "·": "*", "×": "*"})


def _tokenize(text):
    tokens = []
    pos = 0
    text = text.translate(_TRANSLATE)
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        value = m.group(kind)
        tokens.append((kind, "^" if value == "**" else value, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.tokens = _tokenize(text)
        self.i = 0
        self.index = {name: k for k, name in enumerate(variables)}

    def peek(self):
        return self.tokens[self.i]

    def take(self, expected_value=None, expected=None):
        kind, value, pos = self.tokens[self.i]
        if expected_value is not None and value != expected_value:
            what = "end of input" if kind == "end" else repr(value)
            raise ExprSyntaxError(f"unexpected {what}", pos, expected or repr(expected_value))
        self.i += 1
        return kind, value, pos

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {value!r}", pos, "operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.factor()

    def factor(self):
        node = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            sign = 1
            if self.peek()[1] in ("-", "+") and self.peek()[0] == "op":
                sign = -1 if self.take()[1] == "-" else 1
            kind, value, pos = self.peek()
            if kind != "num" or not value.isdigit():
                raise ExprSyntaxError("exponent must be an integer", pos, "integer")
            self.take()
            node = Pow(node, sign * int(value))
        return node

    def base(self):
        kind, value, pos = self.peek()
        if kind == "num":
            self.take()
            return Const(float(value))
        if kind == "id":
            self.take()
            if value in FUNCTIONS:
                self.take("(", f"'(' after {value}")
                arg = self.expr()
                self.take(")", "')'")
                return Call(value, arg)
            if value in self.index:
                return Var(value, self.index[value])
            if value == "pi":
                return Const(math.pi)
            raise UnknownVariable(f"unknown variable {value!r} at position {pos}")
        if (kind, value) == ("op", "("):
            self.take()
            node = self.expr()
            self.take(")", "')'")
            return node
        what = "end of input" if kind == "end" else repr(value)
        raise ExprSyntaxError(f"unexpected {what}", pos, "number, variable, function or '('")


class Expression:
    """An immutable parsed expression with an ordered variable list.

    >>> e = parse_expr("x1^2 + exp(x2)", ["x1", "x2"])
    >>> e.eval([0.0, 0.0])
    1.0
    """

    __slots__ = ("_root", "_vars", "_text")

    def __init__(self, root, variables: Sequence[str], text: str | None = None):
        object.__setattr__(self, "_root", root)
        object.__setattr__(self, "_vars", tuple(variables))
        object.__setattr__(self, "_text", text if text is not None else root.show())

    def __setattr__(self, name, value):
        raise AttributeError("Expression is immutable")

    @property
    def root(self):
        return self._root

    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    @property
    def text(self) -> str:
        return self._text

    def __repr__(self):
        return f"Expression({self._text!r}, {list(self._vars)!r})"

    def __str__(self):
        return self._root.show()

    def is_constant(self) -> bool:
        return not self._root.names()

    def _check_arity(self, p):
        if len(p) != len(self._vars):
            raise ValueError(f"expected {len(self._vars)} values, got {len(p)}")

    def eval(self, p) -> float:
        p = [float(v) for v in np.atleast_1d(np.asarray(p, dtype=float))] if len(self._vars) else []
        self._check_arity(p)
        with np.errstate(over="ignore"):
            return float(self._root.ev(p))

    def grad(self, p) -> np.ndarray:
        p = np.atleast_1d(np.asarray(p, dtype=float))
        k = len(self._vars)
        self._check_arity(p)
        env = [Dual.seed(p[i : i + 1], k, i) for i in range(k)]
        out = self._root.ev(env)
        if not isinstance(out, Dual):
            return np.zeros(k)
        return out.der[0].copy()

    def evaluate(self, env):
        """Evaluate with each variable bound to a float, array or :class:`Dual`.

        Constants may come back as plain floats; callers broadcast.
        """
        self._check_arity(env)
        return self._root.ev(env)


def parse_expr(text: str, variables: Sequence[str]) -> Expression:
    """Parse ``text`` in the expression grammar over the declared ``variables``."""
    if not isinstance(text, str):
        raise ExprSyntaxError("expression must be a string", 0)
    root = _Parser(text, variables).parse()
    return Expression(root, variables, text)


def constant(value: float, variables: Sequence[str] = ()) -> Expression:
    return Expression(Const(float(value)), variables)
