"""Symbolic coefficient fields evaluated lazily on batches of chart points.

A field is a small immutable expression DAG over named geometric leaves.
Evaluation turns every node into complex jet coefficients of shape
``(20, N) + vshape`` so that tangential derivatives (needed when derivatives
are commuted to the right) come straight from the jets.
"""
from dataclasses import dataclass
from functools import reduce
import re

import numpy as np

from .. import jets
from ..errors import JetOrderError, ShapeMismatch
from ..geometry import Geometry
from ..spin import PATTERN, sigma_from_jacobian

VSHAPE = {"scalar": (), "vector3": (3,), "spin": (2, 2)}


class Field:
    kind = "scalar"

    def __mul__(self, other):
        return fmul(self, other)

    __rmul__ = __mul__

    def __add__(self, other):
        return fadd(self, other)

    __radd__ = __add__

    def __neg__(self):
        return fmul(Const(-1.0), self)

    def __sub__(self, other):
        return fadd(self, -as_field(other))


@dataclass(frozen=True)
class Leaf(Field):
    name: str
    kind: str = "scalar"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const(Field):
    value: complex

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Prod(Field):
    factors: tuple
    kind: str = "scalar"

    def __str__(self):
        return "*".join(_paren(f) for f in self.factors)


@dataclass(frozen=True)
class Sum(Field):
    terms: tuple
    kind: str = "scalar"

    def __str__(self):
        return " + ".join(str(t) for t in self.terms)


@dataclass(frozen=True)
class Partial(Field):
    arg: Field
    multi: tuple  # (i, j): d_u^i d_v^j
    kind: str = "scalar"

    def __str__(self):
        return f"d{self.multi}[{self.arg}]"


def _paren(f):
    return f"({f})" if isinstance(f, Sum) else str(f)


ZERO = Const(0.0)
ONE = Const(1.0)


def as_field(x):
    if isinstance(x, Field):
        return x
    return Const(complex(x))


def _is_const(f, value=None):
    return isinstance(f, Const) and (value is None or f.value == value)


def _combine_kinds(kinds):
    nonscalar = {k for k in kinds if k != "scalar"}
    if len(nonscalar) > 1:
        raise ShapeMismatch(f"cannot multiply fields of kinds {sorted(nonscalar)}")
    return nonscalar.pop() if nonscalar else "scalar"


def fmul(*fs):
    fs = [as_field(f) for f in fs]
    flat = []
    coef = 1.0 + 0j
    for f in fs:
        parts = f.factors if isinstance(f, Prod) else (f,)
        for p in parts:
            if isinstance(p, Const):
                coef *= p.value
            else:
                flat.append(p)
    if coef == 0:
        return ZERO
    if not flat:
        return Const(coef)
    kind = _combine_kinds([p.kind for p in flat])
    if coef != 1:
        flat.insert(0, Const(coef))
    if len(flat) == 1:
        return flat[0]
    return Prod(tuple(flat), kind)


def fadd(*fs):
    flat = []
    for f in map(as_field, fs):
        parts = f.terms if isinstance(f, Sum) else (f,)
        flat.extend(p for p in parts if not _is_const(p, 0))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    kinds = {p.kind for p in flat}
    if len(kinds) > 1:
        raise ShapeMismatch(f"cannot add fields of kinds {sorted(kinds)}")
    return Sum(tuple(flat), kinds.pop())


def fpartial(f, multi):
    multi = tuple(multi)
    if multi == (0, 0):
        return f
    if isinstance(f, Const):
        return ZERO
    if isinstance(f, Partial):
        return Partial(f.arg, (f.multi[0] + multi[0], f.multi[1] + multi[1]), f.kind)
    if isinstance(f, Sum):
        return fadd(*(fpartial(t, multi) for t in f.terms))
    return Partial(f, multi, f.kind)


def summands(f):
    return f.terms if isinstance(f, Sum) else (f,)


# --------------------------------------------------------------------------
# leaves
# --------------------------------------------------------------------------

def _sc(name):
    return Leaf(name, "scalar")


def ginv(a, b):
    return _sc(f"ginv{a}{b}")


def g1(a, b):
    return _sc(f"g1_{a}{b}")


SQRT_G = _sc("sqrt_g")
INV_SQRT_G = _sc("inv_sqrt_g")
MEAN = _sc("M")
GAUSS = _sc("K")
CURV_GRAD = _sc("3M2-K")


def inv_sqrt_gaa(a):
    return _sc(f"gdiag{a}^-1/2")


def rashba(i, j):
    """Reduced Rashba component for unit coupling (alpha = hbar = 1)."""
    return _sc(f"S_R{i}{j}")


def dresselhaus(i, j):
    """Reduced Dresselhaus component S_iijj for unit coupling."""
    return _sc(f"S_D{i}{j}")


def sigma(i):
    return Leaf(f"sigma{i}", "spin")


def tangent(a):
    return Leaf(f"e{a}", "vector3")


NORMAL = Leaf("en", "vector3")
CHART_U = Leaf("u", "scalar")
CHART_V = Leaf("v", "scalar")


def position(k):
    """Cartesian component ``k`` of the embedding r(u, v)."""
    return Leaf(f"r{k}", "scalar")

R_CROSS_EN = Leaf("rxen", "vector3")


def r_cross_tangent(a):
    return Leaf(f"rxe{a}", "vector3")


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

@dataclass
class CArray:
    """Complex jet coefficients ``(20, N) + vshape`` valid up to ``order``."""

    c: np.ndarray
    order: int


def _from_jet(j):
    return CArray(j.c.astype(complex), j.order)


def _from_vec(vec):
    order = min(x.order for x in vec)
    return CArray(np.stack([x.c for x in vec], axis=-1).astype(complex), order)


def _from_values(vals):
    """Pointwise data without derivative information (order 0)."""
    vals = np.asarray(vals, dtype=complex)
    c = np.zeros((jets.NCOEF,) + vals.shape, dtype=complex)
    c[0] = vals
    return CArray(c, 0)


_LEAF_RE = re.compile(r"^(ginv|g1_|S_R|S_D|gdiag|sigma|e|rxe|r)(\d)(\d)?")


class FieldContext:
    """Evaluation context: a :class:`Geometry` batch plus a memo table."""

    def __init__(self, geo):
        self.geo = geo
        self.memo = {}
        self._leaf = {}

    @classmethod
    def on_points(cls, sdef, u, v, overrides=None):
        return cls(Geometry(sdef, u, v, overrides))

    @property
    def npoints(self):
        return self.geo.npoints

    def leaf(self, name):
        if name not in self._leaf:
            self._leaf[name] = self._make_leaf(name)
        return self._leaf[name]

    def _make_leaf(self, name):
        geo = self.geo
        if name == "sqrt_g":
            return _from_jet(geo.sqrt_g)
        if name == "inv_sqrt_g":
            return _from_jet(1.0 / geo.sqrt_g)
        if name in ("u", "v"):
            return _from_jet(jets.Jet3.seed("uv".index(name), geo.u if name == "u" else geo.v))
        if name == "M":
            return _from_jet(geo.M)
        if name == "K":
            return _from_jet(geo.K)
        if name == "3M2-K":
            return _from_jet(geo.M * geo.M * 3.0 - geo.K)
        if name == "en":
            return _from_vec(geo.en)
        if name == "rxen":
            return _from_vec(geo.r_cross_en)
        m = _LEAF_RE.match(name)
        if not m:
            raise KeyError(f"unknown field leaf {name!r}")
        tag, i = m.group(1), int(m.group(2))
        j = int(m.group(3)) if m.group(3) is not None else None
        if tag == "ginv":
            return _from_jet(geo.g_inv[i][j])
        if tag == "g1_":
            return _from_jet(geo.g1[i][j])
        if tag == "gdiag":
            return _from_jet(jets.power(geo.g[i][i], -0.5))
        if tag == "e":
            return _from_vec(geo.e[i])
        if tag == "r":
            return _from_jet(geo.r[i])
        if tag == "rxe":
            return _from_vec(geo.r_cross_e[i])
        J = geo.jacobian
        if tag == "sigma":
            return _from_values(self._sigma()[:, i])
        if tag == "S_R":
            return _from_values(np.einsum("ns,st,nt->n", J[:, :, i], PATTERN, J[:, :, j]))
        if tag == "S_D":
            J2 = J * J
            return _from_values(np.einsum("ns,st,nt->n", J2[:, :, i], PATTERN, J2[:, :, j]))
        raise KeyError(name)  # pragma: no cover

    def _sigma(self):
        if "_sigma" not in self._leaf:
            self._leaf["_sigma"] = sigma_from_jacobian(self.geo.jacobian)
        return self._leaf["_sigma"]

    # ------------------------------------------------------------------
    def eval(self, f):
        """Jet coefficients of ``f``; results are memoised per node."""
        hit = self.memo.get(f)
        if hit is not None:
            return hit
        out = self._eval(f)
        self.memo[f] = out
        return out

    def _eval(self, f):
        if isinstance(f, Const):
            c = np.zeros((jets.NCOEF, 1), dtype=complex)
            c[0] = f.value
            return CArray(c, jets.MAX_ORDER)
        if isinstance(f, Leaf):
            return self.leaf(f.name)
        if isinstance(f, Prod):
            return reduce(lambda a, b: _mul(a, b), (self.eval(x) for x in f.factors))
        if isinstance(f, Sum):
            parts = [self.eval(t) for t in f.terms]
            c = reduce(np.add, (_pad(p.c, max(q.c.ndim for q in parts)) for p in parts))
            return CArray(c, min(p.order for p in parts))
        if isinstance(f, Partial):
            arg = self.eval(f.arg)
            i, j = f.multi
            if i + j > arg.order:
                raise JetOrderError(f"field {f.arg} is only known to order {arg.order}; d{f.multi} requested")
            c = arg.c
            for _ in range(i):
                c = jets.diff_coeffs(c, 0)
            for _ in range(j):
                c = jets.diff_coeffs(c, 1)
            return CArray(c, arg.order - i - j)
        raise TypeError(f"cannot evaluate {f!r}")

    def value(self, f):
        """Point values of ``f`` with shape ``(N,) + vshape``."""
        f = as_field(f)
        c = self.eval(f).c
        target = (self.npoints,) + VSHAPE[f.kind]
        return np.broadcast_to(c[0], target).copy()


def _pad(c, ndim):
    if c.ndim < ndim:
        c = c.reshape(c.shape + (1,) * (ndim - c.ndim))
    return c


def _mul(a, b):
    nd = max(a.c.ndim, b.c.ndim)
    return CArray(jets.mul_coeffs(_pad(a.c, nd), _pad(b.c, nd)), min(a.order, b.order))
