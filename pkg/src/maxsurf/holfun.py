"""Holomorphic functions of one complex variable given as expression strings.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('-')? power
    power  := atom ('^' integer)?
    atom   := number | 'i' | 'z' | ident '(' expr ')' | '(' expr ')'

``number`` is a decimal literal with an optional ``i`` suffix (``2.5i``).
``ident`` is one of exp, log, sin, cos, sinh, cosh, sqrt.  Exponents are
integers, optionally signed or parenthesised (``z^-2``, ``z^(3)``).

Trees are immutable and evaluate elementwise over numpy arrays.  ``sqrt`` and
``log`` use the principal branch.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EvaluationError, NonIntegerExponentError, ParseError, UnknownIdentifierError

FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh", "sqrt")

_NUMPY_FUNCS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "sqrt": np.sqrt,
}


class HolExpr:
    """Base class of expression nodes.

    Calling a node evaluates it strictly (see :func:`evaluate`).
    """

    __slots__ = ()

    def __call__(self, t):
        return evaluate(self, t)

    def values(self, t):
        """Lenient evaluation: singular points give nan instead of raising."""
        return evaluate_lenient(self, t)

    def derivative(self) -> "HolExpr":
        """Cached symbolic derivative."""
        d = self.__dict__.get("_derivative")
        if d is None:
            d = differentiate(self)
            object.__setattr__(self, "_derivative", d)
        return d

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Const(HolExpr):
    value: complex


@dataclass(frozen=True)
class Var(HolExpr):
    pass


@dataclass(frozen=True)
class Neg(HolExpr):
    arg: HolExpr


@dataclass(frozen=True)
class Add(HolExpr):
    left: HolExpr
    right: HolExpr


@dataclass(frozen=True)
class Sub(HolExpr):
    left: HolExpr
    right: HolExpr


@dataclass(frozen=True)
class Mul(HolExpr):
    left: HolExpr
    right: HolExpr


@dataclass(frozen=True)
class Div(HolExpr):
    left: HolExpr
    right: HolExpr


@dataclass(frozen=True)
class Pow(HolExpr):
    base: HolExpr
    exponent: int


@dataclass(frozen=True)
class Func(HolExpr):
    name: str
    arg: HolExpr


Z = Var()
ZERO = Const(0j)
ONE = Const(1 + 0j)


def const(value) -> Const:
    return Const(complex(value))


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", _byte_offset(src, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), _byte_offset(src, pos)))
        pos = m.end()
    tokens.append(_Token("end", "", _byte_offset(src, len(src))))
    return tokens


def _byte_offset(src: str, pos: int) -> int:
    return len(src[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect_op(self, text: str) -> _Token:
        if self.tok.kind != "op" or self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.tok.offset)
        return self.advance()

    def parse(self) -> HolExpr:
        e = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected token {self.tok.text!r}", self.tok.offset)
        return e

    def expr(self) -> HolExpr:
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            right = self.term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self) -> HolExpr:
        left = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            right = self.factor()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def factor(self) -> HolExpr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.power())
        return self.power()

    def power(self) -> HolExpr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return Pow(base, self.integer_exponent())
        return base

    def integer_exponent(self) -> int:
        start = self.tok.offset
        paren = False
        if self.tok.kind == "op" and self.tok.text == "(":
            paren = True
            self.advance()
        sign = 1
        if self.tok.kind == "op" and self.tok.text in "+-":
            sign = -1 if self.advance().text == "-" else 1
        tok = self.tok
        if tok.kind != "number" or not tok.text.isdigit():
            raise NonIntegerExponentError("non-integer exponent (use sqrt)", start)
        self.advance()
        if paren:
            if self.tok.kind != "op" or self.tok.text != ")":
                raise NonIntegerExponentError("non-integer exponent (use sqrt)", start)
            self.advance()
        return sign * int(tok.text)

    def atom(self) -> HolExpr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            if tok.text.endswith("i"):
                return Const(complex(0.0, float(tok.text[:-1])))
            return Const(complex(float(tok.text), 0.0))
        if tok.kind == "ident":
            self.advance()
            if tok.text == "z":
                return Z
            if tok.text == "i":
                return Const(1j)
            if tok.text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Func(tok.text, arg)
            raise UnknownIdentifierError(f"unknown identifier {tok.text!r}", tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            e = self.expr()
            self.expect_op(")")
            return e
        found = tok.text or "end of input"
        raise ParseError(f"unexpected token {found!r}", tok.offset)


def parse(src: str) -> HolExpr:
    """Parse ``src`` into an expression tree."""
    return _Parser(src).parse()


def as_expr(e: Union[str, HolExpr, complex, float, int]) -> HolExpr:
    if isinstance(e, HolExpr):
        return e
    if isinstance(e, str):
        return parse(e)
    return const(e)


# ---------------------------------------------------------------- evaluation

def _eval(e: HolExpr, t):
    if isinstance(e, Const):
        return np.full(np.shape(t), e.value, dtype=complex)
    if isinstance(e, Var):
        return t
    if isinstance(e, Neg):
        return -_eval(e.arg, t)
    if isinstance(e, Add):
        return _eval(e.left, t) + _eval(e.right, t)
    if isinstance(e, Sub):
        return _eval(e.left, t) - _eval(e.right, t)
    if isinstance(e, Mul):
        return _eval(e.left, t) * _eval(e.right, t)
    if isinstance(e, Div):
        den = _eval(e.right, t)
        num = _eval(e.left, t)
        out = np.full(np.shape(den), complex(np.nan, np.nan))
        nz = den != 0
        out[nz] = num[nz] / den[nz]
        return out
    if isinstance(e, Pow):
        b = _eval(e.base, t)
        n = e.exponent
        if n >= 0:
            return b**n
        out = np.full(np.shape(b), complex(np.nan, np.nan))
        nz = b != 0
        out[nz] = 1.0 / b[nz] ** (-n)
        return out
    if isinstance(e, Func):
        arg = _eval(e.arg, t)
        if e.name == "log":
            out = np.full(np.shape(arg), complex(np.nan, np.nan))
            nz = arg != 0
            out[nz] = np.log(arg[nz])
            return out
        return _NUMPY_FUNCS[e.name](arg)
    raise TypeError(f"not an expression node: {e!r}")


def evaluate_lenient(e: HolExpr, t):
    """Evaluate without raising; singular points come back as nan."""
    arr = np.asarray(t, dtype=complex)
    with np.errstate(all="ignore"):
        out = _eval(e, np.atleast_1d(arr))
    out = np.where(np.isfinite(out), out, complex(np.nan, np.nan))
    return out.reshape(arr.shape) if arr.ndim else complex(out[0])


def evaluate(e: HolExpr, t):
    """Evaluate ``e`` at a complex scalar or array.

    Raises EvaluationError on division by zero, log(0) or a non-finite result.
    """
    out = evaluate_lenient(e, t)
    if not np.all(np.isfinite(out)):
        raise EvaluationError(f"{to_string(e)} is singular or non-finite at the requested point(s)")
    return out


# ---------------------------------------------------------------- differentiation

def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


def _add(a, b):
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    return Add(a, b)


def _sub(a, b):
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return _neg(b)
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    return Sub(a, b)


def _neg(a):
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a, b):
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    return Mul(a, b)


def _div(a, b):
    if _is_const(a, 0):
        return ZERO
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b) and b.value != 0:
        return Const(a.value / b.value)
    return Div(a, b)


def _pow(a, n):
    if n == 0:
        return ONE
    if n == 1:
        return a
    if _is_const(a) and (a.value != 0 or n > 0):
        return Const(a.value**n)
    return Pow(a, n)


def differentiate(e: HolExpr) -> HolExpr:
    """Return d e / dz as a new tree (constant-folded, otherwise unsimplified)."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Neg):
        return _neg(differentiate(e.arg))
    if isinstance(e, Add):
        return _add(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Sub):
        return _sub(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Mul):
        return _add(_mul(differentiate(e.left), e.right), _mul(e.left, differentiate(e.right)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        num = _sub(_mul(differentiate(u), v), _mul(u, differentiate(v)))
        return _div(num, _pow(v, 2))
    if isinstance(e, Pow):
        n = e.exponent
        if n == 0:
            return ZERO
        return _mul(_mul(const(n), _pow(e.base, n - 1)), differentiate(e.base))
    if isinstance(e, Func):
        u = e.arg
        du = differentiate(u)
        if e.name == "exp":
            outer = e
        elif e.name == "log":
            return _div(du, u)
        elif e.name == "sin":
            outer = Func("cos", u)
        elif e.name == "cos":
            outer = _neg(Func("sin", u))
        elif e.name == "sinh":
            outer = Func("cosh", u)
        elif e.name == "cosh":
            outer = Func("sinh", u)
        elif e.name == "sqrt":
            return _div(du, _mul(const(2), e))
        else:
            raise TypeError(f"unknown function {e.name}")
        return _mul(outer, du)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------- printing

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _fmt_real(x: float) -> str:
    s = repr(float(x))
    if "inf" in s or "nan" in s:
        raise ValueError(f"cannot print non-finite constant {x}")
    return s


def _fmt_const(c: complex) -> tuple[str, int]:
    re_, im_ = c.real, c.imag
    if im_ == 0 and re_ >= 0 and not np.signbit(re_):
        return _fmt_real(re_), 5
    if re_ == 0 and im_ > 0:
        return _fmt_real(im_) + "i", 5
    if im_ == 0:
        return "-" + _fmt_real(-re_), 3
    if re_ == 0:
        return "-" + _fmt_real(-im_) + "i", 3
    sign = "+" if im_ > 0 else "-"
    return f"({_fmt_real(re_)}{sign}{_fmt_real(abs(im_))}i)", 5


def _show(e: HolExpr) -> tuple[str, int]:
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Var):
        return "z", 5
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})", 5
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, 4), 3
    if isinstance(e, Pow):
        return f"{_wrap(e.base, 5)}^{e.exponent}" if e.exponent >= 0 else f"{_wrap(e.base, 5)}^({e.exponent})", 4
    prec = _PREC[type(e)]
    op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
    # left associative: the right operand is parenthesised at equal precedence
    return f"{_wrap(e.left, prec)}{op}{_wrap(e.right, prec + 1)}", prec


def _wrap(e: HolExpr, min_prec: int) -> str:
    s, p = _show(e)
    return f"({s})" if p < min_prec else s


def to_string(e: HolExpr) -> str:
    """Render a tree in the input grammar; ``parse(to_string(e))`` evaluates like ``e``."""
    return _show(e)[0]


# ---------------------------------------------------------------- tree rewrites

def substitute(e: HolExpr, repl: HolExpr) -> HolExpr:
    """Replace the variable z by ``repl``, i.e. the composition e(repl(z))."""
    if isinstance(e, Var):
        return repl
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, repl))
    if isinstance(e, (Add, Sub, Mul, Div)):
        return type(e)(substitute(e.left, repl), substitute(e.right, repl))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, repl), e.exponent)
    if isinstance(e, Func):
        return Func(e.name, substitute(e.arg, repl))
    raise TypeError(f"not an expression node: {e!r}")


def conjugate_coefficients(e: HolExpr) -> HolExpr:
    """Tree of the holomorphic function w -> conj(e(conj(w))).

    Every node except the literals commutes with conjugation (off the
    principal branch cut), so only the constants change.
    """
    if isinstance(e, Const):
        return Const(e.value.conjugate())
    if isinstance(e, Var):
        return e
    if isinstance(e, Neg):
        return Neg(conjugate_coefficients(e.arg))
    if isinstance(e, (Add, Sub, Mul, Div)):
        return type(e)(conjugate_coefficients(e.left), conjugate_coefficients(e.right))
    if isinstance(e, Pow):
        return Pow(conjugate_coefficients(e.base), e.exponent)
    if isinstance(e, Func):
        return Func(e.name, conjugate_coefficients(e.arg))
    raise TypeError(f"not an expression node: {e!r}")


def affine(a, b) -> HolExpr:
    """The map z -> a z + b as a tree."""
    return _add(_mul(const(a), Z), const(b))
