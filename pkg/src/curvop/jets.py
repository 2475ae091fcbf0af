"""Truncated Taylor jets in three variables (forward-mode AD).

A :class:`Jet3` carries the 20 Taylor coefficients of a function of
``(q1, q2, q3)`` up to total degree 3, stored densely on a leading axis.  The
coefficient of multi-index ``(i, j, k)`` is ``d^(i+j+k) f / (dq1^i dq2^j dq3^k)
/ (i! j! k!)``.  Any number of trailing axes may follow, so one ``Jet3`` can
hold a whole grid of points and the kernels below run over all of them at once.

Jets also remember the highest degree they are still exact to (``order``).
Differentiating drops it by one; products keep the smaller of the two.
Coefficients beyond ``order`` are always zero.
"""
from fractions import Fraction
import math

import numpy as np

from ._accel import HAVE_NUMBA, njit
from .errors import DivisionByZeroJet, DomainErrorJet, JetOrderError

MAX_ORDER = 3
MULTI = [
    (i, j, k)
    for d in range(MAX_ORDER + 1)
    for i in range(d, -1, -1)
    for j in range(d - i, -1, -1)
    for k in [d - i - j]
]
NCOEF = len(MULTI)  # 20
INDEX = {m: n for n, m in enumerate(MULTI)}
DEGREE = np.array([sum(m) for m in MULTI])
_FACT = np.array([math.factorial(i) * math.factorial(j) * math.factorial(k) for i, j, k in MULTI], dtype=float)


def _product_table():
    ia, ib, ic = [], [], []
    for x, a in enumerate(MULTI):
        for y, b in enumerate(MULTI):
            s = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
            if sum(s) <= MAX_ORDER:
                ia.append(x)
                ib.append(y)
                ic.append(INDEX[s])
    return np.array(ia), np.array(ib), np.array(ic)


_IA, _IB, _IC = _product_table()  # 84 (a, b) -> c triples
_GATHER = np.zeros((NCOEF, len(_IC)))
_GATHER[_IC, np.arange(len(_IC))] = 1.0

# d/dq_axis: coefficient n of the derivative is _DIFF_FAC * coefficient _DIFF_SRC
_DIFF_SRC = np.full((3, NCOEF), -1)
_DIFF_FAC = np.zeros((3, NCOEF))
for _n, _m in enumerate(MULTI):
    for _ax in range(3):
        _up = list(_m)
        _up[_ax] += 1
        if sum(_up) <= MAX_ORDER:
            _DIFF_SRC[_ax, _n] = INDEX[tuple(_up)]
            _DIFF_FAC[_ax, _n] = _up[_ax]


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

def _mul_numpy(a, b):
    return _GATHER @ (a[_IA] * b[_IB])


def _compose_numpy(a, d):
    t = a.copy()
    t[0] = 0
    out = np.zeros_like(t)
    out[0] = d[3]
    for k in (2, 1, 0):
        out = _mul_numpy(out, t)
        out[0] += d[k]
    return out


@njit
def _mul_kernel(a, b, ia, ib, ic):
    out = np.zeros(a.shape, dtype=a.dtype)
    for p in range(ia.shape[0]):
        x = ia[p]
        y = ib[p]
        z = ic[p]
        for m in range(a.shape[1]):
            out[z, m] += a[x, m] * b[y, m]
    return out


@njit
def _compose_kernel(a, d, ia, ib, ic):
    ncoef, npts = a.shape
    out = np.zeros(a.shape, dtype=a.dtype)
    tmp = np.zeros(a.shape, dtype=a.dtype)
    for m in range(npts):
        out[0, m] = d[3, m]
    for k in range(2, -1, -1):
        for n in range(ncoef):
            for m in range(npts):
                tmp[n, m] = 0.0
        for p in range(ia.shape[0]):
            y = ib[p]
            if y == 0:
                continue
            x = ia[p]
            z = ic[p]
            for m in range(npts):
                tmp[z, m] += out[x, m] * a[y, m]
        for n in range(ncoef):
            for m in range(npts):
                out[n, m] = tmp[n, m]
        for m in range(npts):
            out[0, m] += d[k, m]
    return out


def _mul_numba(a, b):
    return _mul_kernel(a, b, _IA, _IB, _IC)


def _compose_numba(a, d):
    return _compose_kernel(a, d, _IA, _IB, _IC)


_BACKENDS = {"numpy": (_mul_numpy, _compose_numpy)}
if HAVE_NUMBA:
    _BACKENDS["numba"] = (_mul_numba, _compose_numba)
_backend = "numba" if HAVE_NUMBA else "numpy"


def backend():
    """Name of the kernel backend in use (``"numba"`` or ``"numpy"``)."""
    return _backend


def set_backend(name):
    """Switch kernels at runtime; mainly for benchmarks and cross-checks."""
    global _backend
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(_BACKENDS)}")
    _backend = name


def _flat_pair(a, b):
    a, b = np.broadcast_arrays(a, b)
    dtype = np.result_type(a.dtype, b.dtype, np.float64)
    shape = a.shape
    a = np.ascontiguousarray(a, dtype=dtype).reshape(NCOEF, -1)
    b = np.ascontiguousarray(b, dtype=dtype).reshape(NCOEF, -1)
    return a, b, shape


def mul_coeffs(a, b):
    """Truncated product of two coefficient arrays of shape ``(20, ...)``."""
    a, b, shape = _flat_pair(np.asarray(a), np.asarray(b))
    return _BACKENDS[_backend][0](a, b).reshape(shape)


def compose_coeffs(a, d):
    """Evaluate ``sum_k d[k] * (a - a0)^k`` for k <= 3.

    ``d[k]`` is the k-th Taylor coefficient of the outer function at the
    constant term ``a0``; it has the batch shape of ``a``.
    """
    a = np.asarray(a)
    d = np.asarray(d)
    dtype = np.result_type(a.dtype, d.dtype, np.float64)
    shape = a.shape
    af = np.ascontiguousarray(a, dtype=dtype).reshape(NCOEF, -1)
    df = np.ascontiguousarray(np.broadcast_to(d, (4,) + shape[1:]), dtype=dtype).reshape(4, -1)
    return _BACKENDS[_backend][1](af, df).reshape(shape)


def diff_coeffs(c, axis):
    """Coefficients of d/dq_axis; the top-degree slots come back zero."""
    c = np.asarray(c)
    src = _DIFF_SRC[axis]
    out = np.zeros_like(c)
    ok = src >= 0
    fac = _DIFF_FAC[axis][ok].reshape((-1,) + (1,) * (c.ndim - 1))
    out[ok] = c[src[ok]] * fac
    return out


def _align(a, b):
    """Left-pad batch axes (after the coefficient axis) so both ranks agree."""
    nd = max(a.ndim, b.ndim)
    if a.ndim < nd:
        a = a.reshape(a.shape[:1] + (1,) * (nd - a.ndim) + a.shape[1:])
    if b.ndim < nd:
        b = b.reshape(b.shape[:1] + (1,) * (nd - b.ndim) + b.shape[1:])
    return a, b


def truncate_coeffs(c, order):
    if order >= MAX_ORDER:
        return c
    c = c.copy()
    c[DEGREE > order] = 0
    return c


def drop_axis(c, axis):
    """Restrict to q_axis = 0 (the expansion point): drop terms containing q_axis."""
    c = np.array(c, copy=True)
    keep = np.array([m[axis] == 0 for m in MULTI])
    c[~keep] = 0
    return c


# --------------------------------------------------------------------------
# Jet3
# --------------------------------------------------------------------------

class Jet3:
    """Real truncated Taylor jet in (q1, q2, q3), total degree <= 3."""

    __slots__ = ("c", "order")
    __array_priority__ = 100  # numpy scalars defer to our reflected ops

    def __init__(self, coeffs, order=MAX_ORDER):
        c = np.asarray(coeffs, dtype=np.float64)
        if c.ndim == 0 or c.shape[0] != NCOEF:
            raise ValueError(f"Jet3 needs {NCOEF} coefficients on axis 0, got shape {c.shape}")
        if not 0 <= order <= MAX_ORDER:
            raise ValueError("order must lie in 0..3")
        self.c = truncate_coeffs(c, order)
        self.order = order

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, value):
        value = np.asarray(value, dtype=np.float64)
        c = np.zeros((NCOEF,) + value.shape)
        c[0] = value
        return cls(c)

    @classmethod
    def seed(cls, which, value):
        if which not in (0, 1, 2):
            raise IndexError(f"jet variable index must be 0, 1 or 2, got {which!r}")
        value = np.asarray(value, dtype=np.float64)
        c = np.zeros((NCOEF,) + value.shape)
        c[0] = value
        c[1 + which] = 1.0
        return cls(c)

    # access ---------------------------------------------------------------
    @property
    def value(self):
        return self.c[0]

    @property
    def shape(self):
        return self.c.shape[1:]

    def coeff(self, multi):
        return self.c[INDEX[tuple(multi)]]

    def partial(self, multi):
        """Partial derivative ``d^|multi| f`` at the expansion point."""
        multi = tuple(multi)
        if sum(multi) > self.order:
            raise JetOrderError(f"derivative {multi} exceeds jet order {self.order}")
        n = INDEX[multi]
        return self.c[n] * _FACT[n]

    def diff(self, axis):
        if self.order == 0:
            raise JetOrderError("cannot differentiate an order-0 jet")
        return Jet3(diff_coeffs(self.c, axis), self.order - 1)

    def at_zero(self, axis):
        """Restrict to q_axis = 0 (drops every term containing that variable)."""
        return Jet3(drop_axis(self.c, axis), self.order)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet3(self.c[(slice(None),) + idx], self.order)

    def __repr__(self):
        if self.c.ndim == 1:
            terms = {m: float(v) for m, v in zip(MULTI, self.c) if v != 0}
            return f"Jet3({terms}, order={self.order})"
        return f"Jet3(shape={self.shape}, order={self.order})"

    # arithmetic -----------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Jet3):
            return other
        return Jet3.constant(other)

    def __add__(self, other):
        other = self._lift(other)
        a, b = _align(self.c, other.c)
        return Jet3(a + b, min(self.order, other.order))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        a, b = _align(self.c, other.c)
        return Jet3(a - b, min(self.order, other.order))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Jet3(-self.c, self.order)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Jet3):
            a, b = _align(self.c, np.asarray(other, dtype=np.float64)[np.newaxis])
            return Jet3(a * b, self.order)
        a, b = _align(self.c, other.c)
        return Jet3(mul_coeffs(a, b), min(self.order, other.order))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet3):
            other = np.asarray(other, dtype=np.float64)
            if np.any(other == 0):
                raise DivisionByZeroJet("division of a jet by zero")
            return self * (1.0 / other)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return self._lift(other) * reciprocal(self)

    def __pow__(self, p):
        return power(self, p)


def seed(which, value):
    """Jet of the coordinate ``q_which`` expanded at ``value``."""
    return Jet3.seed(which, value)


def _apply(a, derivs, order=None):
    return Jet3(compose_coeffs(a.c, derivs), a.order if order is None else order)


def reciprocal(a):
    x = a.value
    if np.any(x == 0):
        raise DivisionByZeroJet("jet division with zero constant term")
    r = 1.0 / x
    return _apply(a, np.stack([r, -r * r, r ** 3, -(r ** 4)]))


def _is_integral(p):
    return float(p) == int(p) and abs(float(p)) < 2 ** 31


def power(a, p):
    """``a ** p`` for rational (or real) ``p``.

    Integer exponents use repeated products and accept any sign of the base;
    other exponents need a positive constant term.
    """
    if not isinstance(a, Jet3):
        return np.power(a, float(p))
    if isinstance(p, Jet3):
        raise TypeError("jet exponents are not supported")
    if _is_integral(p):
        n = int(p)
        if n < 0:
            return power(reciprocal(a), -n)
        result = Jet3.constant(np.ones(a.shape))
        base = a
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result if int(p) else Jet3(result.c, a.order)
    p = float(Fraction(p)) if isinstance(p, Fraction) else float(p)
    x = a.value
    if np.any(x <= 0):
        raise DomainErrorJet(f"non-integer power {p} of a jet with non-positive constant term")
    d = np.stack([
        x ** p,
        p * x ** (p - 1),
        p * (p - 1) / 2 * x ** (p - 2),
        p * (p - 1) * (p - 2) / 6 * x ** (p - 3),
    ])
    return _apply(a, d)


def sqrt(a):
    if not isinstance(a, Jet3):
        return np.sqrt(a)
    if np.any(a.value <= 0):
        raise DomainErrorJet("sqrt of a jet with non-positive constant term")
    return power(a, Fraction(1, 2))


def exp(a):
    if not isinstance(a, Jet3):
        return np.exp(a)
    e = np.exp(a.value)
    return _apply(a, np.stack([e, e, e / 2, e / 6]))


def log(a):
    if not isinstance(a, Jet3):
        return np.log(a)
    x = a.value
    if np.any(x <= 0):
        raise DomainErrorJet("log of a jet with non-positive constant term")
    r = 1.0 / x
    return _apply(a, np.stack([np.log(x), r, -r * r / 2, r ** 3 / 3]))


def sin(a):
    if not isinstance(a, Jet3):
        return np.sin(a)
    s, c = np.sin(a.value), np.cos(a.value)
    return _apply(a, np.stack([s, c, -s / 2, -c / 6]))


def cos(a):
    if not isinstance(a, Jet3):
        return np.cos(a)
    s, c = np.sin(a.value), np.cos(a.value)
    return _apply(a, np.stack([c, -s, -c / 2, s / 6]))


def tan(a):
    if not isinstance(a, Jet3):
        return np.tan(a)
    t = np.tan(a.value)
    s2 = 1 + t * t  # sec^2
    return _apply(a, np.stack([t, s2, t * s2, s2 * (1 + 3 * t * t) / 3]))


UNARY = {"sin": sin, "cos": cos, "tan": tan, "exp": exp, "log": log, "sqrt": sqrt}
