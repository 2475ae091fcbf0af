"""Closed-form truncated-cone results used as ground truth.

Chart: ``r(theta, r) = (w cos theta, w sin theta, r sin phi)`` with
``w = R + r cos phi``.  Every operator row keeps its own label, so verification
mismatches point at a single line of the closed form.
Indices: 0 = theta, 1 = r, 2 = normal.
"""
from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomain
from .spin import SIGMA

SX, SY, SZ = SIGMA
EDGE_TOL = 1e-12


@dataclass(frozen=True)
class ConeParams:
    R: float = 1.0
    phi: float = np.pi / 6
    l: float = 2.0

    def __post_init__(self):
        if not self.R > 0 or not self.l > 0:
            raise OutOfDomain("R and l must be positive")
        if not -EDGE_TOL <= self.phi <= np.pi / 2 + EDGE_TOL:
            raise OutOfDomain(f"phi = {self.phi} outside [0, pi/2]")

    def w(self, r):
        return self.R + r * np.cos(self.phi)

    def check(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < -EDGE_TOL) or np.any(r > self.l + EDGE_TOL):
            raise OutOfDomain(f"r outside [0, {self.l}]")
        if np.any(self.w(r) <= 0):
            raise OutOfDomain("w = R + r cos(phi) must stay positive")


def _ax(x, n):
    """Append ``n`` trailing axes (works for 0-d input too)."""
    return np.asarray(x)[(...,) + (None,) * n]


def _vec(*comps):
    comps = np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in comps])
    return np.stack(comps, axis=-1)


def _spin(cx, cy, cz):
    cx, cy, cz = np.broadcast_arrays(*[np.asarray(c, dtype=complex) for c in (cx, cy, cz)])
    return cx[..., None, None] * SX + cy[..., None, None] * SY + cz[..., None, None] * SZ


def _trig(p, theta, r):
    p.check(r)
    th = np.asarray(theta, dtype=float)
    r = np.asarray(r, dtype=float)
    th, r = np.broadcast_arrays(th, r)
    return th, r, np.sin(p.phi), np.cos(p.phi), np.sin(th), np.cos(th), p.w(r)


def frames(p, theta, r):
    """Orthonormal frame ``(e_theta, e_r, e_n)``."""
    th, r, sp, cp, st, ct, w = _trig(p, theta, r)
    zero = np.zeros_like(th)
    return (
        _vec(-st, ct, zero),
        _vec(cp * ct, cp * st, sp + zero),
        _vec(sp * ct, sp * st, -cp + zero),
    )


def reduced_pauli(p, theta, r):
    """``sigma^theta_0, sigma^r_0, sigma^3_0`` stacked on axis -3."""
    th, r, sp, cp, st, ct, w = _trig(p, theta, r)
    s_th = _spin(-st / w, ct / w, 0 * w)
    s_r = _spin(cp * ct, cp * st, sp + 0 * w)
    s_3 = _spin(sp * ct, sp * st, -cp + 0 * w)
    return np.stack([s_th, s_r, s_3], axis=-3)


def _antisym(entries, shape):
    out = np.zeros(shape + (3, 3))
    for (i, j), val in entries.items():
        out[..., i, j] = val
        out[..., j, i] = -val
    return out


def quantity(p, which, theta, r, q3=0.0, hbar=1.0, mass=0.5, alpha_R=1.0, beta_D=1.0):
    """Closed-form value of a named quantity at ``(theta, r)``.

    ``which``: g, G, f, M, K, g_inv, G_inv, g1, V_g, P_g, L_g, e_theta, e_r,
    en, sigma, rashba, dresselhaus.
    """
    th, rr, sp, cp, st, ct, w = _trig(p, theta, r)
    shape = th.shape
    one = np.ones(shape)
    if which == "g":
        return _diag(w * w, one)
    if which == "G":
        W = w + q3 * sp
        out = np.zeros(shape + (3, 3))
        out[..., 0, 0] = W * W
        out[..., 1, 1] = 1.0
        out[..., 2, 2] = 1.0
        return out
    if which == "f":
        return 1.0 + sp / w * q3
    if which == "M":
        return sp / (2 * w)
    if which == "K":
        return np.zeros(shape)
    if which == "g_inv":
        return _diag(1.0 / (w * w), one)
    if which == "G_inv":
        W = w + q3 * sp
        return _diag(1.0 / (W * W), one)
    if which == "g1":
        return _diag(-2.0 * sp / w ** 3, 0 * one)
    if which == "V_g":
        return -hbar ** 2 / (8 * mass) * sp ** 2 / w ** 2
    e_th, e_r, e_n = frames(p, th, rr)
    if which == "e_theta":
        return e_th
    if which == "e_r":
        return e_r
    if which == "en":
        return e_n
    if which == "P_g":
        return _ax(1j * hbar * sp / (2 * w), 1) * e_n
    if which == "L_g":
        return _ax(1j * hbar * (p.R * cp + rr) * sp / (2 * w), 1) * e_th
    if which == "sigma":
        return reduced_pauli(p, th, rr)
    if which == "rashba":
        k = alpha_R / hbar
        return _antisym({
            (0, 1): k * w * (sp * (st + ct) - cp),
            (1, 2): k * (ct - st) * one,
            (2, 0): k * w * (sp + cp * (st + ct)),
        }, shape)
    if which == "dresselhaus":
        k = beta_D / hbar ** 3
        c = np.cos(2 * p.phi) * np.cos(2 * th)
        return _antisym({
            (0, 1): -k * w * w * c,
            (1, 2): -k * c,
            (2, 0): -k * w * w * c,
        }, shape)
    raise KeyError(f"unknown oracle quantity {which!r}")


def _diag(a, b):
    out = np.zeros(np.shape(a) + (2, 2))
    out[..., 0, 0] = a
    out[..., 1, 1] = b
    return out


# --------------------------------------------------------------------------
# operators, row by row
# --------------------------------------------------------------------------

def operator_rows(p, which, theta, r, hbar=1.0, mass=0.5, alpha_R=1.0, beta_D=1.0):
    """``[(row_label, {multi: values}), ...]`` for a closed-form operator.

    ``which``: H, P, L, Rashba, Dresselhaus, CylRashba, CylDresselhaus.  The
    Cyl* forms use the cylinder equations with ``phi`` forced to pi/2.
    """
    if which.startswith("Cyl"):
        p = ConeParams(p.R, np.pi / 2, p.l)
    th, rr, sp, cp, st, ct, w = _trig(p, theta, r)
    one = np.ones(th.shape)
    R = p.R
    ih = 1j * hbar
    if which == "H":
        k = -hbar ** 2 / (2 * mass)
        return [
            ("ConeEH term 1", {(2, 0): k / w ** 2 + 0j}),
            ("ConeEH term 2", {(0, 2): k * one + 0j}),
            ("ConeEH term 3", {(0, 1): k * cp / w + 0j}),
            ("ConeEH term 4", {(0, 0): -hbar ** 2 / (8 * mass) * sp ** 2 / w ** 2 + 0j}),
        ]
    e_th, e_r, e_n = frames(p, th, rr)
    if which == "P":
        return [
            ("ConeEM term 1", {(1, 0): -ih * e_th / w[..., None]}),
            ("ConeEM term 2", {(0, 1): -ih * e_r}),
            ("ConeEM term 3", {(0, 0): ih * _ax(sp / (2 * w), 1) * e_n}),
        ]
    if which == "L":
        return [
            ("ConeEAM term 1-2", {(1, 0): ih * (e_n * _ax((R * cp + rr) / w, 1) - e_r * _ax(R * sp / w, 1))}),
            ("ConeEAM term 3", {(0, 1): ih * R * sp * e_th}),
            ("ConeGAM", {(0, 0): ih * _ax((R * cp + rr) * sp / (2 * w), 1) * e_th}),
        ]
    a = alpha_R
    if which == "Rashba":
        s2p = np.sin(2 * p.phi)
        return [
            ("ConeRSOC row 1", {(1, 0): -1j * a * _spin(ct, st, -(st + ct)) / w[..., None, None]}),
            ("ConeRSOC row 2", {(0, 1): 1j * a * _spin(sp - cp * st, -(sp - cp * ct), -cp * (ct - st))}),
            ("ConeRSOC row 3", {(0, 0): 0.5j * a / R * _spin(sp ** 2 * st - 0.5 * s2p, -(sp ** 2 * ct + 0.5 * s2p),
                                                             -sp ** 2 * (st - ct))}),
        ]
    if which == "CylRashba":
        return [
            ("CylRSOC row 1", {(1, 0): -1j * a / R * _spin(ct, st, -(st + ct)),
                               (0, 1): 1j * a * _spin(one, -one, 0 * one)}),
            ("CylRSOC row 2", {(0, 0): 0.5j * a / R * _spin(st, -ct, -(st - ct))}),
        ]
    b = beta_D
    if which == "Dresselhaus":
        C = np.cos(2 * p.phi) * np.cos(2 * th)
        ibC = _ax(1j * b * C, 2)
        s_r = _spin(cp * ct, cp * st, sp * one)
        s_3 = _spin(sp * ct, sp * st, -cp * one)
        w_ = w[..., None, None]
        return [
            ("ConeDSOC row 1", {(2, 1): ibC * s_r / w_ ** 2, (1, 2): ibC * _spin(st, -ct, 0 * one) / w_}),
            ("ConeDSOC row 2", {(2, 0): -4 * ibC * cp * s_3 / w_ ** 3}),
            ("ConeDSOC row 3", {(2, 0): 0.5 * ibC * sp * s_3 / w_ ** 3, (0, 2): -0.5 * ibC * sp * s_3 / w_}),
            ("ConeDSOC row 4", {(1, 0): 0.75 * ibC * sp ** 2 * _spin(-st, ct, 0 * one) / w_ ** 3}),
            ("ConeDSOC row 5", {(0, 1): ibC * sp * _spin(0.25 * sp * cp * ct, 0.25 * sp * cp * st,
                                                         (0.25 * sp ** 2 - 1) * one) / w_ ** 2}),
            ("ConeDSOC row 6", {(0, 0): ibC * _spin(0.5 * sp ** 2 * cp ** 2 * ct, 0.5 * sp ** 2 * cp ** 2 * st,
                                                    sp * cp * (1 + 0.5 * sp ** 2) * one) / w_ ** 3}),
        ]
    if which == "CylDresselhaus":
        c2 = _ax(1j * b * np.cos(2 * th), 2)
        return [
            ("CylDSOC row 1", {(1, 2): c2 * _spin(-st, ct, 0 * one) / R,
                               (2, 1): -c2 * _spin(0 * one, 0 * one, one) / R ** 2,
                               (2, 0): -0.5 * c2 * _spin(ct, st, 0 * one) / R ** 3,
                               (0, 2): 0.5 * c2 * _spin(ct, st, 0 * one) / R}),
            ("CylDSOC row 2", {(1, 0): 0.75 * c2 * _spin(st, -ct, 0 * one) / R ** 3,
                               (0, 1): 0.75 * c2 * _spin(0 * one, 0 * one, one) / R ** 2}),
        ]
    raise KeyError(f"unknown oracle operator {which!r}")


def operator_table(p, which, theta, r, **kw):
    """Collapse :func:`operator_rows` into ``{multi: summed values}``."""
    out = {}
    for _, terms in operator_rows(p, which, theta, r, **kw):
        for m, val in terms.items():
            out[m] = out[m] + val if m in out else val
    return out


OPERATORS = ("H", "P", "L", "Rashba", "Dresselhaus", "CylRashba", "CylDresselhaus")
QUANTITIES = ("g", "G", "f", "M", "K", "g_inv", "G_inv", "g1", "V_g", "P_g", "L_g",
              "e_theta", "e_r", "en", "sigma", "rashba", "dresselhaus")
