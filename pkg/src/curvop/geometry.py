"""Pointwise differential geometry of a parametrized surface.

Everything is computed from one batched jet evaluation of the embedding ``r``
and its symbolic tangents ``r_u``, ``r_v`` (so ``r`` is effectively known to
fourth order).  Jets are seeded with ``q1 = u`` and ``q2 = v``; the normal
offset ``q3`` is seeded separately wherever the thin-layer metric is needed.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import jets
from .dsl import eval_embedding, eval_tangents
from .errors import DegenerateMetric, InvalidOffset
from .gridfield import GridField
from .jets import Jet3

DEGENERACY = 1e-14


# small helpers on 3-vectors of jets ----------------------------------------

def dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a, b):
    return [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]


def scale(a, s):
    return [x * s for x in a]


def inv2(m):
    """Inverse of a 2x2 matrix given as nested lists (jets or arrays)."""
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    r = 1.0 / det
    return [[m[1][1] * r, -m[0][1] * r], [-m[1][0] * r, m[0][0] * r]]


def matmul2(a, b):
    return [[a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)] for i in range(2)]


def transpose2(a):
    return [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]


def values(x):
    """Strip jets (recursively through lists) down to numpy value arrays."""
    if isinstance(x, Jet3):
        return x.value
    if isinstance(x, (list, tuple)):
        return np.array([values(y) for y in x])
    return np.asarray(x)


def grid_axes(sdef, nu, nv):
    """1-D sample positions; periodic axes drop the duplicated seam point."""
    if nu < 2 or nv < 2:
        raise ValueError("grid needs at least 2 points per axis")
    (u0, u1), (v0, v1) = sdef.bounds()
    u = np.linspace(u0, u1, nu, endpoint=not sdef.periodic_u)
    v = np.linspace(v0, v1, nv, endpoint=not sdef.periodic_v)
    return u, v


class Geometry:
    """Batched geometry on arbitrary arrays of chart points.

    All attributes are computed lazily.  Scalar quantities are :class:`Jet3`
    objects whose batch shape is ``shape``; vectors are lists of three jets
    and matrices nested lists.
    """

    def __init__(self, sdef, u, v, overrides=None, check=True):
        if overrides:
            sdef = sdef.with_params(overrides)
        self.sdef = sdef
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        self.shape = u.shape
        self.u = u.ravel().copy()
        self.v = v.ravel().copy()
        U = Jet3.seed(0, self.u)
        V = Jet3.seed(1, self.v)
        self.r = list(eval_embedding(sdef, U, V))
        self.ru, self.rv = (list(t) for t in eval_tangents(sdef, U, V))
        if check:
            self.check_metric()

    @property
    def npoints(self):
        return self.u.size

    # first fundamental form -------------------------------------------
    @cached_property
    def g(self):
        g11 = dot(self.ru, self.ru)
        g12 = dot(self.ru, self.rv)
        g22 = dot(self.rv, self.rv)
        return [[g11, g12], [g12, g22]]

    @cached_property
    def det_g(self):
        g = self.g
        return g[0][0] * g[1][1] - g[0][1] * g[1][0]

    def check_metric(self):
        g11, g22 = self.g[0][0].value, self.g[1][1].value
        bad = ~(self.det_g.value > DEGENERACY * (g11 + g22) ** 2)
        if np.any(bad):
            pts = list(zip(self.u[bad].tolist(), self.v[bad].tolist()))
            u0, v0 = pts[0]
            raise DegenerateMetric(
                f"degenerate metric at (u, v) = ({u0:.12g}, {v0:.12g})"
                + (f" and {len(pts) - 1} more point(s)" if len(pts) > 1 else ""),
                points=pts,
            )

    @cached_property
    def g_inv(self):
        return inv2(self.g)

    @cached_property
    def sqrt_g(self):
        return jets.sqrt(self.det_g)

    # frames --------------------------------------------------------------
    @cached_property
    def en(self):
        n = cross(self.ru, self.rv)
        return scale(n, 1.0 / jets.sqrt(dot(n, n)))

    @cached_property
    def e(self):
        """Unit tangents ``(e1, e2)``."""
        return [scale(t, 1.0 / jets.sqrt(dot(t, t))) for t in (self.ru, self.rv)]

    # second fundamental form and curvature ----------------------------------
    @cached_property
    def h(self):
        en = self.en
        ruu = [c.diff(0) for c in self.ru]
        ruv = [c.diff(1) for c in self.ru]
        rvu = [c.diff(0) for c in self.rv]
        rvv = [c.diff(1) for c in self.rv]
        return [[dot(en, ruu), dot(en, ruv)], [dot(en, rvu), dot(en, rvv)]]

    @cached_property
    def alpha(self):
        (g11, g12), (g21, g22) = self.g
        (h11, h12), (h21, h22) = self.h
        r = 1.0 / self.det_g
        return [
            [(g12 * h21 - g22 * h11) * r, (g21 * h11 - g11 * h21) * r],
            [(g12 * h22 - g22 * h12) * r, (g12 * h21 - g11 * h22) * r],
        ]

    @cached_property
    def M(self):
        a = self.alpha
        return (a[0][0] + a[1][1]) * 0.5

    @cached_property
    def K(self):
        a = self.alpha
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]

    def V_g(self, hbar=1.0, mass=0.5):
        return (self.M * self.M - self.K) * (-hbar * hbar / (2.0 * mass))

    # thin-layer metric ---------------------------------------------------
    @cached_property
    def _q3(self):
        return Jet3.seed(2, np.zeros(self.npoints))

    @cached_property
    def G_offset(self):
        """``G_ab(q3)`` built from the Weingarten matrix (quadratic in q3)."""
        q = self._q3
        g, a = self.g, self.alpha
        ag = matmul2(a, g)
        lin = [[ag[i][j] + ag[j][i] for j in range(2)] for i in range(2)]
        quad = matmul2(ag, transpose2(a))
        return [[g[i][j] + q * lin[i][j] + q * q * quad[i][j] for j in range(2)] for i in range(2)]

    @cached_property
    def G_normal(self):
        """``G_ab(q3)`` from the offset embedding ``R = r + q3 en`` directly."""
        q = self._q3
        R = [[t[k] + q * self.en[k].diff(a) for k in range(3)] for a, t in enumerate([self.ru, self.rv])]
        return [[dot(R[i], R[j]) for j in range(2)] for i in range(2)]

    @cached_property
    def g1(self):
        """``d/dq3 G^{ab}`` at q3 = 0 (order-1 jets in the tangential variables)."""
        Ginv = inv2(self.G_offset)
        return [[Ginv[i][j].diff(2).at_zero(2) for j in range(2)] for i in range(2)]

    @cached_property
    def g1_normal(self):
        """Same as :attr:`g1` but through the offset embedding."""
        Ginv = inv2(self.G_normal)
        return [[Ginv[i][j].diff(2).at_zero(2) for j in range(2)] for i in range(2)]

    @cached_property
    def g1_closed(self):
        """``-g^-1 (alpha g + g alpha^T) g^-1``."""
        gi = self.g_inv
        ag = matmul2(self.alpha, self.g)
        s = [[ag[i][j] + ag[j][i] for j in range(2)] for i in range(2)]
        m = matmul2(matmul2(gi, s), gi)
        return [[-m[i][j] for j in range(2)] for i in range(2)]

    @cached_property
    def f_metric(self):
        """``sqrt(det G / det g)`` as a jet in q3 (tangential terms dropped)."""
        G = self.G_normal
        det = G[0][0] * G[1][1] - G[0][1] * G[1][0]
        ratio = det / self.det_g
        c = np.zeros_like(ratio.c)
        for k in range(4):
            c[jets.INDEX[(0, 0, k)]] = ratio.c[jets.INDEX[(0, 0, k)]]
        return jets.sqrt(Jet3(c, ratio.order))

    @cached_property
    def f_jet(self):
        """``1 + 2 M q3 + K q3^2`` at the expansion point, as a q3 jet."""
        c = np.zeros((jets.NCOEF, self.npoints))
        c[0] = 1.0
        c[jets.INDEX[(0, 0, 1)]] = 2.0 * self.M.value
        c[jets.INDEX[(0, 0, 2)]] = self.K.value
        return Jet3(c)

    # spin frame ------------------------------------------------------------
    @cached_property
    def jacobian(self):
        """``J[:, :, i]`` columns ``(r_u, r_v, en)`` at q3 = 0, shape (N, 3, 3)."""
        cols = [values(self.ru), values(self.rv), values(self.en)]
        return np.stack(cols, axis=-1).transpose(1, 0, 2)

    # derived cartesian vectors ---------------------------------------------
    @cached_property
    def r_cross_e(self):
        return [cross(self.r, self.e[0]), cross(self.r, self.e[1])]

    @cached_property
    def r_cross_en(self):
        return cross(self.r, self.en)

    def reshape(self, arr):
        """Restore the caller's batch shape on an (N, ...) array."""
        arr = np.asarray(arr)
        return arr.reshape(self.shape + arr.shape[1:])


@dataclass
class GeometryPoint:
    """All geometric data at one chart point."""

    u: float
    v: float
    r: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    en: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    h: np.ndarray
    alpha: np.ndarray
    M: float
    K: float
    f_jet: Jet3
    g1_inv: np.ndarray
    dg_inv: np.ndarray  # [a, b, k]: d_k g^{ab}
    d2g_inv: np.ndarray  # [a, b, k, l]: d_k d_l g^{ab}
    dM: np.ndarray
    dK: np.ndarray

    @property
    def det_g(self):
        return float(np.linalg.det(self.g))


def _partials(jet, order):
    axes = [(1, 0, 0), (0, 1, 0)]
    if order == 1:
        return np.array([jet.partial(a) for a in axes])
    out = np.empty((2, 2) + jet.shape)
    for k in range(2):
        for l in range(2):
            m = [0, 0, 0]
            m[k] += 1
            m[l] += 1
            out[k, l] = jet.partial(m)
    return out


def frame_at(sdef, u, v, overrides=None):
    """Geometry at a single chart point as a :class:`GeometryPoint`."""
    geo = Geometry(sdef, np.array([float(u)]), np.array([float(v)]), overrides)
    gi = geo.g_inv
    dg = np.array([[_partials(gi[a][b], 1)[:, 0] for b in range(2)] for a in range(2)])
    d2g = np.array([[_partials(gi[a][b], 2)[:, :, 0] for b in range(2)] for a in range(2)])
    return GeometryPoint(
        u=float(u),
        v=float(v),
        r=values(geo.r)[:, 0],
        e1=values(geo.e[0])[:, 0],
        e2=values(geo.e[1])[:, 0],
        en=values(geo.en)[:, 0],
        g=values(geo.g)[:, :, 0],
        g_inv=values(gi)[:, :, 0],
        h=values(geo.h)[:, :, 0],
        alpha=values(geo.alpha)[:, :, 0],
        M=float(geo.M.value[0]),
        K=float(geo.K.value[0]),
        f_jet=geo.f_jet[0],
        g1_inv=values(geo.g1)[:, :, 0],
        dg_inv=dg,
        d2g_inv=d2g,
        dM=_partials(geo.M, 1)[:, 0],
        dK=_partials(geo.K, 1)[:, 0],
    )


def offset_metric(pt, q3):
    """The 3x3 thin-layer metric ``G_ij`` at normal offset ``q3``."""
    f = 1.0 + 2.0 * pt.M * q3 + pt.K * q3 * q3
    if not f > 0:
        raise InvalidOffset(f"offset q3={q3} leaves the tubular neighbourhood (f = {f:.6g} <= 0)")
    a, g = pt.alpha, pt.g
    ag = a @ g
    G = np.eye(3)
    G[:2, :2] = g + q3 * (ag + g.T @ a.T) + q3 * q3 * (ag @ a.T)
    return G


_BRACKET_FIELDS = ("f", "inv_sqrt_f")


def reduced_bracket(pt, field, order):
    """``d^n/dq3^n`` of ``f`` or ``1/sqrt(f)`` at q3 = 0, for n = 1, 2."""
    if field not in _BRACKET_FIELDS:
        raise ValueError(f"field must be one of {_BRACKET_FIELDS}")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    f = pt.f_jet if isinstance(pt, GeometryPoint) else pt
    jet = f if field == "f" else jets.power(f, -0.5)
    return jet.partial((0, 0, order))


def geometric_potential(pt, hbar=1.0, mass=0.5):
    """``-hbar^2/(2 m) (M^2 - K)``."""
    if not mass > 0:
        raise ValueError("mass must be positive")
    return -hbar * hbar / (2.0 * mass) * (pt.M * pt.M - pt.K)


# grid sampling ---------------------------------------------------------------

QUANTITIES = {
    "M": lambda geo, kw: geo.M.value,
    "K": lambda geo, kw: geo.K.value,
    "V_g": lambda geo, kw: geo.V_g(**kw).value,
    "det_g": lambda geo, kw: geo.det_g.value,
    "f1": lambda geo, kw: 2.0 * geo.M.value,
    "f2": lambda geo, kw: geo.K.value,
}
for _i in range(2):
    for _j in range(2):
        QUANTITIES[f"g{_i + 1}{_j + 1}"] = (lambda i, j: lambda geo, kw: geo.g[i][j].value)(_i, _j)
        QUANTITIES[f"ginv{_i + 1}{_j + 1}"] = (lambda i, j: lambda geo, kw: geo.g_inv[i][j].value)(_i, _j)
        QUANTITIES[f"h{_i + 1}{_j + 1}"] = (lambda i, j: lambda geo, kw: geo.h[i][j].value)(_i, _j)
        QUANTITIES[f"alpha{_i + 1}{_j + 1}"] = (lambda i, j: lambda geo, kw: geo.alpha[i][j].value)(_i, _j)
        QUANTITIES[f"g1_{_i + 1}{_j + 1}"] = (lambda i, j: lambda geo, kw: geo.g1[i][j].value)(_i, _j)
for _k, _ax in enumerate("xyz"):
    QUANTITIES[_ax] = (lambda k: lambda geo, kw: geo.r[k].value)(_k)
    QUANTITIES[f"en_{_ax}"] = (lambda k: lambda geo, kw: geo.en[k].value)(_k)


def sample_geometry(sdef, nu, nv, overrides=None):
    """Geometry on the standard ``nu x nv`` grid; returns ``(u, v, geo)``."""
    if overrides:
        sdef = sdef.with_params(overrides)
    u, v = grid_axes(sdef, nu, nv)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    return u, v, Geometry(sdef, uu, vv)


def grid_sample(sdef, nu, nv, quantity, overrides=None, hbar=1.0, mass=0.5):
    """Sample a named geometric quantity (see ``QUANTITIES``) on a grid."""
    if quantity not in QUANTITIES:
        raise KeyError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    u, v, geo = sample_geometry(sdef, nu, nv, overrides)
    kw = {"hbar": hbar, "mass": mass} if quantity == "V_g" else {}
    vals = np.broadcast_to(QUANTITIES[quantity](geo, kw), (geo.npoints,))
    return GridField(u, v, geo.reshape(vals), name=quantity)
