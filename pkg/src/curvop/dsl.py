"""Surface description language.

A surface file gives the embedding ``r(u, v)`` as three coordinate
expressions plus parameter defaults and a chart domain::

    # truncated cone
    x = (R + v*cos(phi))*cos(u); y = (R + v*cos(phi))*sin(u); z = v*sin(phi)
    params R=1, phi=0.5235988, l=2
    domain u in [0, 2*pi) periodic, v in [0, l]

Statements end at ``;`` or a newline (newlines inside brackets are ignored).
Expressions use ``+ - * /``, ``^`` with a rational constant exponent, the
functions ``sin cos tan exp log sqrt`` and the constant ``pi``.  Evaluation is
generic over floats, numpy arrays and :class:`~curvop.jets.Jet3`.
"""
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
import math
import re

import numpy as np

from . import jets
from .errors import (
    BadDomain,
    DomainErrorJet,
    SurfaceSyntaxError,
    UnknownIdentifier,
    UnknownParameter,
    UnknownSurface,
)
from .jets import Jet3

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt")
VARIABLES = ("u", "v")
CONSTANTS = {"pi": math.pi}
COORDS = ("x", "y", "z")
KEYWORDS = ("params", "domain", "in", "periodic") + COORDS


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

class Expr:
    prec = 5

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Const(Expr):
    name: str


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr
    prec = 3


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def prec(self):
        return 1 if self.op in "+-" else 2


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction
    prec = 4


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


@dataclass(frozen=True)
class Interval:
    lo: Expr
    hi: Expr
    lo_closed: bool = True
    hi_closed: bool = True
    periodic: bool = False


@dataclass(frozen=True)
class SurfaceDef:
    """Parsed parametrized surface.

    ``params`` maps parameter names to their default values; ``domain`` holds
    the u and v intervals.  Instances are immutable; use :meth:`with_params`
    to bind other parameter values.
    """

    exprs: tuple
    params: tuple  # ((name, value), ...) in declaration order
    domain: tuple  # (Interval for u, Interval for v)
    name: str = field(default="", compare=False)

    @property
    def param_map(self):
        return dict(self.params)

    @property
    def periodic_u(self):
        return self.domain[0].periodic

    @property
    def periodic_v(self):
        return self.domain[1].periodic

    def with_params(self, overrides=None, **kw):
        values = _merge_params(self, overrides, kw)
        new = replace(self, params=tuple(values.items()))
        new.bounds()  # re-validate the domain under the new values
        return new

    def bounds(self):
        """Numeric ``((u_min, u_max), (v_min, v_max))``."""
        env = self.param_map
        out = []
        for var, iv in zip(VARIABLES, self.domain):
            lo = float(evaluate(iv.lo, {}, env))
            hi = float(evaluate(iv.hi, {}, env))
            if not lo < hi:
                raise BadDomain(f"empty domain for {var}: [{lo}, {hi}]")
            out.append((lo, hi))
        return tuple(out)

    @cached_property
    def tangent_exprs(self):
        """Symbolic ``(dr/du, dr/dv)``, each a triple of expressions."""
        return tuple(tuple(simplify(diff(e, var)) for e in self.exprs) for var in VARIABLES)

    def to_text(self):
        return format_surface(self)


def _merge_params(sdef, overrides, kw):
    values = sdef.param_map
    for src in (overrides or {}), kw:
        for k, val in src.items():
            if k not in values:
                raise UnknownParameter(f"surface has no parameter {k!r} (declared: {', '.join(values) or 'none'})")
            values[k] = float(val)
    return values


# --------------------------------------------------------------------------
# tokenizer
# --------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()\[\],;=])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str  # num, name, op, sep, eof
    text: str
    line: int
    col: int


def tokenize(text):
    tokens = []
    line, col, pos, depth = 1, 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SurfaceSyntaxError(f"unexpected character {text[pos]!r}", line, col, source=text)
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            if depth == 0:
                tokens.append(Token("sep", "\\n", line, col))
            line, col = line + 1, 1
        else:
            if kind == "op":
                if tok in "([":
                    depth += 1
                elif tok in ")]":
                    depth = max(depth - 1, 0)
                if tok == ";":
                    kind = "sep"
            if kind not in ("ws", "comment"):
                tokens.append(Token(kind, tok, line, col))
            col += len(tok)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

_ADD_OPS = ("+", "-")
_MUL_OPS = ("*", "/")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.names = []  # (name, token) for deferred resolution

    @property
    def tok(self):
        return self.toks[self.i]

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, expected, tok=None, message=None):
        tok = tok or self.tok
        if message is None:
            message = "unexpected end of input" if tok.kind == "eof" else f"unexpected {tok.text!r}"
        return SurfaceSyntaxError(message, tok.line, tok.col, expected, source=self.text)

    def expect_op(self, op, expected=None):
        if self.tok.kind == "op" and self.tok.text == op:
            return self.advance()
        raise self.error(expected or (op,))

    def at_op(self, *ops):
        return self.tok.kind == "op" and self.tok.text in ops

    # expressions ----------------------------------------------------------
    def expr(self):
        node = self.term()
        while self.at_op(*_ADD_OPS):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at_op(*_MUL_OPS):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.at_op("-"):
            self.advance()
            return Neg(self.unary())
        if self.at_op("+"):
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.at_op("^"):
            self.advance()
            start = self.i
            exp_node = self.unary()
            try:
                exponent = _fold_rational(exp_node)
            except ValueError:
                raise self.error((), self.toks[start], "exponent must be a rational constant") from None
            return Pow(base, exponent)
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")", (")", "+", "-", "*", "/", "^"))
                return Call(tok.text, arg)
            if tok.text in KEYWORDS:
                raise self.error(("number", "name", "("), tok, f"keyword {tok.text!r} in expression")
            if self.at_op("("):
                raise UnknownIdentifier(
                    f"line {tok.line}, column {tok.col}: unknown function {tok.text!r} "
                    f"(allowed: {', '.join(FUNCTIONS)})"
                )
            self.names.append(tok)
            return _Name(tok.text, tok.line, tok.col)
        if self.at_op("("):
            self.advance()
            node = self.expr()
            self.expect_op(")", (")", "+", "-", "*", "/", "^"))
            return node
        raise self.error(("number", "name", "(", "-"))

    # statements -----------------------------------------------------------
    def program(self):
        coords, params, domain = {}, {}, {}
        while True:
            while self.tok.kind == "sep":
                self.advance()
            tok = self.tok
            if tok.kind == "eof":
                break
            if tok.kind == "name" and tok.text in COORDS:
                self.advance()
                self.expect_op("=")
                if tok.text in coords:
                    raise self.error((), tok, f"duplicate definition of {tok.text}")
                coords[tok.text] = self.expr()
            elif tok.kind == "name" and tok.text == "params":
                self.advance()
                if self.tok.kind in ("sep", "eof"):
                    continue  # an empty clause declares no parameters
                self.param(params)
                while self.at_op(","):
                    self.advance()
                    self.param(params)
            elif tok.kind == "name" and tok.text == "domain":
                self.advance()
                self.interval(domain)
                while self.at_op(","):
                    self.advance()
                    self.interval(domain)
            else:
                raise self.error(COORDS + ("params", "domain"))
            if self.tok.kind not in ("sep", "eof"):
                raise self.error((";", "newline", "end of input") + (("+", "-", "*", "/", "^") if tok.text in COORDS else ()))
        end = self.tok
        for c in COORDS:
            if c not in coords:
                raise self.error((c,), end, f"missing definition of {c}")
        for var in VARIABLES:
            if var not in domain:
                raise BadDomain(f"missing domain clause for {var}")
        return coords, params, domain

    def param(self, params):
        tok = self.tok
        if tok.kind != "name":
            raise self.error(("parameter name",))
        if tok.text in KEYWORDS or tok.text in VARIABLES or tok.text in FUNCTIONS or tok.text in CONSTANTS:
            raise self.error((), tok, f"{tok.text!r} is reserved and cannot be a parameter")
        if tok.text in params:
            raise self.error((), tok, f"duplicate parameter {tok.text}")
        self.advance()
        self.expect_op("=")
        start = len(self.names)
        value = self.expr()
        for name_tok in self.names[start:]:
            if name_tok.text not in CONSTANTS:
                raise UnknownIdentifier(
                    f"line {name_tok.line}, column {name_tok.col}: parameter values may only use numbers and pi, "
                    f"found {name_tok.text!r}"
                )
        del self.names[start:]
        params[tok.text] = float(evaluate(_resolve(value, set()), {}, {}))

    def interval(self, domain):
        tok = self.tok
        if not (tok.kind == "name" and tok.text in VARIABLES):
            raise self.error(VARIABLES)
        self.advance()
        if not (self.tok.kind == "name" and self.tok.text == "in"):
            raise self.error(("in",))
        self.advance()
        if not self.at_op("[", "("):
            raise self.error(("[", "("))
        lo_closed = self.advance().text == "["
        lo = self.expr()
        self.expect_op(",", (",",))
        hi = self.expr()
        if not self.at_op("]", ")"):
            raise self.error(("]", ")", "+", "-", "*", "/", "^"))
        hi_closed = self.advance().text == "]"
        periodic = False
        if self.tok.kind == "name" and self.tok.text == "periodic":
            self.advance()
            periodic = True
        if tok.text in domain:
            raise self.error((), tok, f"duplicate domain for {tok.text}")
        domain[tok.text] = Interval(lo, hi, lo_closed, hi_closed, periodic)


@dataclass(frozen=True)
class _Name(Expr):
    name: str
    line: int = field(compare=False)
    col: int = field(compare=False)


def _resolve(node, params):
    if isinstance(node, _Name):
        if node.name in VARIABLES:
            return Var(node.name)
        if node.name in CONSTANTS:
            return Const(node.name)
        if node.name in params:
            return Param(node.name)
        raise UnknownIdentifier(f"line {node.line}, column {node.col}: unknown identifier {node.name!r}")
    if isinstance(node, Neg):
        return Neg(_resolve(node.arg, params))
    if isinstance(node, BinOp):
        return BinOp(node.op, _resolve(node.left, params), _resolve(node.right, params))
    if isinstance(node, Pow):
        return Pow(_resolve(node.base, params), node.exponent)
    if isinstance(node, Call):
        return Call(node.fn, _resolve(node.arg, params))
    return node


def _fold_rational(node):
    if isinstance(node, Num):
        return Fraction(repr(node.value)) if node.value != int(node.value) else Fraction(int(node.value))
    if isinstance(node, Neg):
        return -_fold_rational(node.arg)
    if isinstance(node, BinOp):
        a, b = _fold_rational(node.left), _fold_rational(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0:
            raise ValueError("zero denominator")
        return a / b
    if isinstance(node, Pow) and node.exponent.denominator == 1:
        return _fold_rational(node.base) ** int(node.exponent)
    raise ValueError("not a rational constant")


def parse_surface(text, name=""):
    """Parse surface source into a :class:`SurfaceDef`.

    Raises :class:`SurfaceSyntaxError` (with line, column and the expected
    token set), :class:`UnknownIdentifier` or :class:`BadDomain`.
    """
    p = _Parser(text)
    coords, params, domain = p.program()
    names = set(params)
    exprs = tuple(_resolve(coords[c], names) for c in COORDS)
    for var in VARIABLES:
        iv = domain[var]
        for bound in (iv.lo, iv.hi):
            for leaf in _leaves(bound):
                if isinstance(leaf, _Name) and leaf.name in VARIABLES:
                    raise BadDomain(f"domain bound for {var} refers to the variable {leaf.name}")
    dom = tuple(
        Interval(_resolve(domain[v].lo, names), _resolve(domain[v].hi, names),
                 domain[v].lo_closed, domain[v].hi_closed, domain[v].periodic)
        for v in VARIABLES
    )
    sdef = SurfaceDef(exprs, tuple(params.items()), dom, name)
    sdef.bounds()
    return sdef


def _leaves(node):
    if isinstance(node, Neg):
        yield from _leaves(node.arg)
    elif isinstance(node, BinOp):
        yield from _leaves(node.left)
        yield from _leaves(node.right)
    elif isinstance(node, Pow):
        yield from _leaves(node.base)
    elif isinstance(node, Call):
        yield from _leaves(node.arg)
    else:
        yield node


# --------------------------------------------------------------------------
# printing
# --------------------------------------------------------------------------

def _fmt_num(x):
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _fmt_fraction(q):
    if q.denominator == 1 and q >= 0:
        return str(q.numerator)
    return f"({q.numerator}/{q.denominator})" if q.denominator != 1 else f"({q.numerator})"


def to_text(node, parent=0, right=False):
    if isinstance(node, Num):
        s = _fmt_num(node.value)
        return s
    if isinstance(node, (Const, Var, Param, _Name)):
        return node.name
    if isinstance(node, Call):
        return f"{node.fn}({to_text(node.arg)})"
    if isinstance(node, Neg):
        s = "-" + to_text(node.arg, node.prec)
    elif isinstance(node, Pow):
        s = to_text(node.base, node.prec + 1) + "^" + _fmt_fraction(node.exponent)
    elif isinstance(node, BinOp):
        s = f"{to_text(node.left, node.prec)} {node.op} {to_text(node.right, node.prec, True)}"
    else:
        raise TypeError(f"not an expression node: {node!r}")
    need = node.prec < parent or (right and node.prec == parent)
    return f"({s})" if need else s


def format_surface(sdef):
    lines = [f"{c} = {to_text(e)}" for c, e in zip(COORDS, sdef.exprs)]
    if sdef.params:
        lines.append("params " + ", ".join(f"{k}={_fmt_num(v)}" for k, v in sdef.params))
    doms = []
    for var, iv in zip(VARIABLES, sdef.domain):
        s = f"{var} in {'[' if iv.lo_closed else '('}{to_text(iv.lo)}, {to_text(iv.hi)}{']' if iv.hi_closed else ')'}"
        if iv.periodic:
            s += " periodic"
        doms.append(s)
    lines.append("domain " + ", ".join(doms))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

def evaluate(node, variables, params):
    """Evaluate ``node`` with ``variables`` (u, v values) and ``params``.

    Values may be floats, numpy arrays or jets; the result has the same kind.
    """
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return variables[node.name]
    if isinstance(node, Param):
        return params[node.name]
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -evaluate(node.arg, variables, params)
    if isinstance(node, BinOp):
        a = evaluate(node.left, variables, params)
        b = evaluate(node.right, variables, params)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if isinstance(b, Jet3) or isinstance(a, Jet3):
            return a / b
        return np.divide(a, b) if isinstance(b, np.ndarray) or isinstance(a, np.ndarray) else a / b
    if isinstance(node, Pow):
        base = evaluate(node.base, variables, params)
        p = node.exponent
        if isinstance(base, Jet3):
            return jets.power(base, p)
        if p.denominator == 1:
            return base ** int(p) if not isinstance(base, np.ndarray) else np.power(base, float(p))
        if np.any(np.asarray(base) < 0):
            raise DomainErrorJet(f"fractional power {p} of a negative number")
        return np.power(base, float(p))
    if isinstance(node, Call):
        arg = evaluate(node.arg, variables, params)
        if not isinstance(arg, Jet3):
            a = np.asarray(arg)
            if (node.fn == "log" and np.any(a <= 0)) or (node.fn == "sqrt" and np.any(a < 0)):
                raise DomainErrorJet(f"{node.fn} of a non-positive number")
        return jets.UNARY[node.fn](arg)
    raise TypeError(f"cannot evaluate {node!r}")


def _as_result(val, like):
    if like is None or isinstance(val, Jet3):
        return val
    ref = like
    return Jet3.constant(np.broadcast_to(np.asarray(val, dtype=float), ref.shape).copy())


def eval_embedding(sdef, u, v, overrides=None):
    """Evaluate ``(x, y, z)`` at ``(u, v)``.

    ``u``/``v`` may be floats, arrays or jets; with jet inputs every returned
    component is a jet (constant coordinates become constant jets).
    """
    params = _merge_params(sdef, overrides, {})
    return _eval_triple(sdef.exprs, u, v, params)


def _eval_triple(exprs, u, v, params):
    env = {"u": u, "v": v}
    like = u if isinstance(u, Jet3) else (v if isinstance(v, Jet3) else None)
    if like is not None and isinstance(u, Jet3) and isinstance(v, Jet3):
        like = u + v * 0.0
    out = []
    for e in exprs:
        val = evaluate(e, env, params)
        if like is not None:
            val = _as_result(val, like)
        elif np.ndim(u) or np.ndim(v):
            val = np.broadcast_to(np.asarray(val, dtype=float), np.broadcast(np.asarray(u), np.asarray(v)).shape).copy()
        out.append(val)
    return tuple(out)


def eval_tangents(sdef, u, v, overrides=None):
    """Evaluate the symbolic tangents: ``((x_u, y_u, z_u), (x_v, y_v, z_v))``."""
    params = _merge_params(sdef, overrides, {})
    return tuple(_eval_triple(t, u, v, params) for t in sdef.tangent_exprs)


# --------------------------------------------------------------------------
# symbolic differentiation
# --------------------------------------------------------------------------

ZERO = Num(0.0)
ONE = Num(1.0)


def _is_num(node, value=None):
    return isinstance(node, Num) and (value is None or node.value == value)


def _add(a, b):
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    if _is_num(a) and _is_num(b):
        return Num(a.value + b.value)
    if isinstance(b, Neg):
        return _sub(a, b.arg)
    return BinOp("+", a, b)


def _sub(a, b):
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return _neg(b)
    if _is_num(a) and _is_num(b):
        return Num(a.value - b.value)
    return BinOp("-", a, b)


def _neg(a):
    if isinstance(a, Neg):
        return a.arg
    if _is_num(a):
        return Num(-a.value) if a.value != 0 else ZERO
    return Neg(a)


def _mul(a, b):
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    if _is_num(a) and _is_num(b):
        return Num(a.value * b.value)
    if isinstance(a, Neg):
        return _neg(_mul(a.arg, b))
    if isinstance(b, Neg):
        return _neg(_mul(a, b.arg))
    return BinOp("*", a, b)


def _div(a, b):
    if _is_num(a, 0.0):
        return ZERO
    if _is_num(b, 1.0):
        return a
    return BinOp("/", a, b)


def _pow(a, p):
    if p == 0:
        return ONE
    if p == 1:
        return a
    return Pow(a, Fraction(p))


def diff(node, var):
    """Symbolic partial derivative of ``node`` with respect to ``var``."""
    if isinstance(node, (Num, Const, Param)):
        return ZERO
    if isinstance(node, Var):
        return ONE if node.name == var else ZERO
    if isinstance(node, Neg):
        return _neg(diff(node.arg, var))
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        da, db = diff(a, var), diff(b, var)
        if node.op == "+":
            return _add(da, db)
        if node.op == "-":
            return _sub(da, db)
        if node.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        # (a/b)' = a'/b - a b'/b^2
        return _sub(_div(da, b), _div(_mul(a, db), _pow(b, 2)))
    if isinstance(node, Pow):
        p = node.exponent
        return _mul(_mul(Num(float(p)), _pow(node.base, p - 1)), diff(node.base, var))
    if isinstance(node, Call):
        a = node.arg
        da = diff(a, var)
        if _is_num(da, 0.0):
            return ZERO
        fn = node.fn
        if fn == "sin":
            outer = Call("cos", a)
        elif fn == "cos":
            outer = _neg(Call("sin", a))
        elif fn == "tan":
            outer = _pow(Call("cos", a), -2)
        elif fn == "exp":
            outer = node
        elif fn == "log":
            return _div(da, a)
        elif fn == "sqrt":
            return _div(da, _mul(Num(2.0), node))
        else:  # pragma: no cover - parser whitelists functions
            raise ValueError(fn)
        return _mul(outer, da)
    raise TypeError(f"cannot differentiate {node!r}")


def simplify(node):
    """Cheap bottom-up constant folding; leaves structure otherwise intact."""
    if isinstance(node, Neg):
        return _neg(simplify(node.arg))
    if isinstance(node, BinOp):
        a, b = simplify(node.left), simplify(node.right)
        return {"+": _add, "-": _sub, "*": _mul, "/": _div}[node.op](a, b)
    if isinstance(node, Pow):
        return _pow(simplify(node.base), node.exponent)
    if isinstance(node, Call):
        return Call(node.fn, simplify(node.arg))
    return node


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------

CATALOG_SOURCES = {
    "cone": """
        # truncated cone: w = R + v cos(phi); u is the azimuth, v the generatrix length
        x = (R + v*cos(phi))*cos(u); y = (R + v*cos(phi))*sin(u); z = v*sin(phi)
        params R=1, phi=0.5235987755982988, l=2
        domain u in [0, 2*pi) periodic, v in [0, l]
    """,
    "cylinder": """
        # the cone chart with the inclination pinned at pi/2
        x = (R + v*cos(pi/2))*cos(u); y = (R + v*cos(pi/2))*sin(u); z = v*sin(pi/2)
        params R=1, l=2
        domain u in [0, 2*pi) periodic, v in [0, l]
    """,
    "plane_ring": """
        x = (R + v)*cos(u); y = (R + v)*sin(u); z = 0
        params R=1, l=2
        domain u in [0, 2*pi) periodic, v in [0, l]
    """,
    "sphere": """
        # polar chart; the poles v = 0, pi are excluded from the default domain
        x = R*sin(v)*cos(u); y = R*sin(v)*sin(u); z = R*cos(v)
        params R=1
        domain u in [0, 2*pi) periodic, v in [0.1, pi - 0.1]
    """,
    "torus": """
        x = (R + a*cos(v))*cos(u); y = (R + a*cos(v))*sin(u); z = a*sin(v)
        params R=2, a=1
        domain u in [0, 2*pi) periodic, v in [0, 2*pi) periodic
    """,
    "catenoid": """
        x = c*(exp(v/c) + exp(-v/c))/2*cos(u); y = c*(exp(v/c) + exp(-v/c))/2*sin(u); z = v
        params c=1
        domain u in [0, 2*pi) periodic, v in [-1, 1]
    """,
}


def builtin_catalog(name):
    """Return the built-in :class:`SurfaceDef` called ``name``."""
    try:
        src = CATALOG_SOURCES[name]
    except KeyError:
        raise UnknownSurface(f"unknown surface {name!r}; choose from {', '.join(CATALOG_SOURCES)}") from None
    return parse_surface(src, name=name)
