"""Differential-operator expressions and their normal-ordered form.

An :class:`OpExpr` is a tree of multiplication operators (coefficient
fields), tangential derivatives ``D1``/``D2``, sums, compositions and scalar
multiples.  :func:`normal_order` pushes every derivative to the right with the
Leibniz rule and returns a :class:`DiffOp`, a map from derivative
multi-indices ``(m, n)`` (meaning ``D1^m D2^n``) to coefficient fields.
"""
from dataclasses import dataclass, field
from math import comb

import numpy as np

from ..errors import DegreeOverflow, ShapeMismatch
from ..geometry import grid_axes
from ..gridfield import GridField, dumps
from .fields import Const, Field, FieldContext, as_field, fadd, fmul, fpartial, summands

MAX_DEGREE = 3
PRUNE_REL = 1e-14
PROBE = 5


# --------------------------------------------------------------------------
# expression tree
# --------------------------------------------------------------------------

class OpExpr:
    def __matmul__(self, other):
        return Compose((self, as_op(other)))

    def __rmatmul__(self, other):
        return Compose((as_op(other), self))

    def __add__(self, other):
        return Add((self, as_op(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Add((self, Scale(-1.0, as_op(other))))

    def __neg__(self):
        return Scale(-1.0, self)

    def __mul__(self, c):
        return Scale(complex(c), self)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Coef(OpExpr):
    """Multiplication by a coefficient field; ``tag`` records its origin."""

    field: Field
    tag: str = ""


@dataclass(frozen=True)
class D(OpExpr):
    axis: int  # 0 -> d/du, 1 -> d/dv


@dataclass(frozen=True)
class Compose(OpExpr):
    parts: tuple


@dataclass(frozen=True)
class Add(OpExpr):
    parts: tuple


@dataclass(frozen=True)
class Scale(OpExpr):
    c: complex
    arg: OpExpr


D1, D2 = D(0), D(1)


def as_op(x):
    if isinstance(x, OpExpr):
        return x
    return Coef(as_field(x))


def deriv(m, n):
    """``D1^m D2^n`` as an expression."""
    parts = (D1,) * m + (D2,) * n
    if not parts:
        return Coef(Const(1.0))
    return parts[0] if len(parts) == 1 else Compose(parts)


# --------------------------------------------------------------------------
# normal ordering
# --------------------------------------------------------------------------

def _merge(acc, multi, f, tags):
    if multi in acc:
        g, t = acc[multi]
        acc[multi] = (fadd(g, f), t | tags)
    else:
        acc[multi] = (f, frozenset(tags))


def _compose(left, right):
    out = {}
    for (a1, a2), (c, tc) in left.items():
        for beta, (d, td) in right.items():
            for g1 in range(a1 + 1):
                for g2 in range(a2 + 1):
                    multi = (a1 - g1 + beta[0], a2 - g2 + beta[1])
                    if sum(multi) > MAX_DEGREE:
                        raise DegreeOverflow(f"composition produces D^{multi}, beyond total degree {MAX_DEGREE}")
                    k = comb(a1, g1) * comb(a2, g2)
                    f = fmul(Const(float(k)), c, fpartial(d, (g1, g2)))
                    _merge(out, multi, f, tc | td)
    return out


def _order(expr):
    if isinstance(expr, Coef):
        return {(0, 0): (expr.field, frozenset([expr.tag] if expr.tag else []))}
    if isinstance(expr, D):
        multi = (1, 0) if expr.axis == 0 else (0, 1)
        return {multi: (Const(1.0), frozenset())}
    if isinstance(expr, Scale):
        return {m: (fmul(Const(expr.c), f), t) for m, (f, t) in _order(expr.arg).items()}
    if isinstance(expr, Add):
        out = {}
        for p in expr.parts:
            for m, (f, t) in _order(p).items():
                _merge(out, m, f, t)
        return out
    if isinstance(expr, Compose):
        acc = _order(expr.parts[0])
        for p in expr.parts[1:]:
            acc = _compose(acc, _order(p))
        return acc
    raise TypeError(f"not an operator expression: {expr!r}")


@dataclass(frozen=True)
class CoefficientField:
    """A coefficient field together with a tag naming where it came from."""

    field: Field
    provenance: str = ""

    @property
    def kind(self):
        return self.field.kind

    def evaluate(self, sdef, u, v, overrides=None):
        ctx = FieldContext.on_points(sdef, u, v, overrides)
        vals = ctx.value(self.field)
        return vals.reshape(np.broadcast(np.asarray(u), np.asarray(v)).shape + vals.shape[1:])


@dataclass
class DiffOp:
    """Normal-ordered operator ``sum_(m,n) c_(m,n)(u, v) D1^m D2^n``.

    ``terms`` maps multi-indices to :class:`CoefficientField`; ``sdef`` is the
    surface (with bound parameters) the fields refer to.
    """

    kind: str
    terms: dict
    sdef: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = dict(sorted(self.terms.items(), key=lambda kv: _multi_key(kv[0])))

    @property
    def multi_indices(self):
        return list(self.terms)

    @property
    def degree(self):
        return max((sum(m) for m in self.terms), default=0)

    def coefficient(self, multi):
        return self.terms[tuple(multi)]

    def to_expr(self):
        """Re-embed as an :class:`OpExpr` (coefficients left of derivatives)."""
        parts = [Coef(cf.field, cf.provenance) @ deriv(*m) for m, cf in self.terms.items()]
        if not parts:
            return Coef(Const(0.0))
        return parts[0] if len(parts) == 1 else Add(tuple(parts))

    def evaluate(self, u, v, ctx=None):
        """``{multi: values}`` at the given chart points (arrays broadcast)."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        shape = np.broadcast(u, v).shape
        if ctx is None:
            ctx = FieldContext.on_points(self.sdef, u, v)
        out = {}
        for m, cf in self.terms.items():
            vals = ctx.value(cf.field)
            out[m] = vals.reshape(shape + vals.shape[1:])
        return out

    def scaled(self, c):
        return DiffOp(self.kind, {m: CoefficientField(fmul(Const(complex(c)), cf.field), cf.provenance)
                                  for m, cf in self.terms.items()}, self.sdef, dict(self.meta))

    def __add__(self, other):
        if self.kind != other.kind:
            raise ShapeMismatch(f"cannot add {self.kind} and {other.kind} operators")
        expr = Add((self.to_expr(), other.to_expr()))
        return normal_order(expr, self.sdef, kind=self.kind, prune=False)


def _multi_key(m):
    return (-sum(m), -m[0], -m[1])


def probe_context(sdef, n=PROBE):
    """Field context on the n x n probe grid used for pruning and checks."""
    u, v = grid_axes(sdef, n, n)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    return FieldContext.on_points(sdef, uu.ravel(), vv.ravel())


def normal_order(expr, sdef=None, kind=None, prune=True, ctx=None):
    """Rewrite ``expr`` with all derivatives to the right.

    With ``prune`` (and a surface to probe on), terms whose coefficients vanish
    on the probe grid up to ``PRUNE_REL`` relative to the size of what was
    summed into them, or to the largest term, are dropped.
    """
    raw = _order(expr)
    kinds = {f.kind for f, _ in raw.values() if not isinstance(f, Const) or f.value != 0}
    if kind is None:
        nonscalar = kinds - {"scalar"}
        if len(nonscalar) > 1:
            raise ShapeMismatch(f"mixed operator kinds {sorted(nonscalar)}")
        kind = nonscalar.pop() if nonscalar else "scalar"
    terms = {}
    for m, (f, tags) in raw.items():
        if isinstance(f, Const) and f.value == 0:
            continue
        terms[m] = CoefficientField(f, " + ".join(sorted(tags)))
    if prune and sdef is not None and terms:
        terms = _prune(terms, ctx or probe_context(sdef))
    return DiffOp(kind, terms, sdef)


def _prune(terms, ctx):
    mags, contrib = {}, {}
    for m, cf in terms.items():
        mags[m] = float(np.max(np.abs(ctx.value(cf.field))))
        total = sum(np.abs(ctx.value(s)).reshape(ctx.npoints, -1) for s in summands(cf.field))
        contrib[m] = float(np.max(total))
    scale = max(mags.values())
    return {m: cf for m, cf in terms.items()
            if mags[m] > PRUNE_REL * max(contrib[m], scale) and mags[m] > 0}


# --------------------------------------------------------------------------
# grid evaluation and export
# --------------------------------------------------------------------------

def eval_on_grid(op, sdef=None, nu=16, nv=16, overrides=None):
    """Sample every coefficient on the standard grid; ordered by multi-index."""
    sdef = sdef if sdef is not None else op.sdef
    if overrides:
        sdef = sdef.with_params(overrides)
    u, v = grid_axes(sdef, nu, nv)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    ctx = FieldContext.on_points(sdef, uu.ravel(), vv.ravel())
    out = {}
    for m, cf in op.terms.items():
        vals = ctx.value(cf.field).reshape((nu, nv) + ctx.value(cf.field).shape[1:])
        out[m] = GridField(u, v, vals, name=f"D{m[0]}{m[1]}", kind=op.kind,
                           meta={"provenance": cf.provenance})
    return out


def operator_document(op, name, grid=None):
    """JSON-ready dict; ``grid`` is ``(nu, nv)`` to include sampled fields."""
    doc = {"operator": name, "value_kind": op.kind, "terms": []}
    if op.meta:
        doc["meta"] = op.meta
    sampled = eval_on_grid(op, nu=grid[0], nv=grid[1]) if grid else {}
    for m, cf in op.terms.items():
        entry = {"dmu": m[0], "dnu": m[1], "provenance": cf.provenance}
        if m in sampled:
            entry["field"] = sampled[m].to_dict()
        doc["terms"].append(entry)
    return doc


def dump_operator(op, name, grid=None):
    return dumps(operator_document(op, name, grid))


__all__ = [
    "OpExpr", "Coef", "D", "D1", "D2", "Compose", "Add", "Scale", "deriv",
    "normal_order", "DiffOp", "CoefficientField", "eval_on_grid",
    "operator_document", "dump_operator", "probe_context",
]
