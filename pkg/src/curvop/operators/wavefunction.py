"""Apply a DiffOp to sampled wavefunctions with central finite differences."""
from functools import lru_cache

import numpy as np

from ..errors import ShapeMismatch
from ..gridfield import GridField
from .fields import FieldContext

MIN_POINTS = 16


def fd_weights(offsets, order):
    """Fornberg's finite-difference weights for the ``order``-th derivative at 0."""
    x = np.asarray(offsets, dtype=float)
    n = len(x)
    c = np.zeros((n, order + 1))
    c1 = 1.0
    c4 = x[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


@lru_cache(maxsize=None)
def central_stencil(order, accuracy):
    """Offsets and weights of the central stencil of the given accuracy."""
    half = (order + 1) // 2 - 1 + accuracy // 2
    offsets = tuple(range(-half, half + 1))
    return offsets, tuple(fd_weights(offsets, order))


def _diff_axis(f, axis, order, h, periodic, accuracy):
    if order == 0:
        return f
    offsets, weights = central_stencil(order, accuracy)
    out = np.zeros_like(f)
    if periodic:
        for o, w in zip(offsets, weights):
            if w != 0:
                out += w * np.roll(f, -o, axis=axis)
        return out / h ** order
    n = f.shape[axis]
    half = offsets[-1]
    idx = np.arange(half, n - half)
    for o, w in zip(offsets, weights):
        if w != 0:
            sl = [slice(None)] * f.ndim
            sl[axis] = idx + o
            acc = [slice(None)] * f.ndim
            acc[axis] = idx
            out[tuple(acc)] += w * f[tuple(sl)]
    out = out / h ** order
    return out


def _spacing(x, periodic, span):
    if x.size < MIN_POINTS:
        raise ShapeMismatch(f"need at least {MIN_POINTS} grid points per axis, got {x.size}")
    h = np.diff(x)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ShapeMismatch("finite differences need a uniform grid")
    if periodic and not np.isclose(h[0] * x.size, span, rtol=1e-9):
        raise ShapeMismatch("periodic axis must cover exactly one period without the seam point")
    return float(h[0])


def apply_to_wavefunction(op, psi, sdef=None, accuracy=6):
    """``(op psi)`` sampled on the grid of ``psi``.

    ``psi.values`` is ``(nu, nv)`` (scalar) or ``(nu, nv, 2)`` (spinor).
    Non-periodic axes lose the points where the widest stencil does not fit;
    the returned field lives on the remaining interior grid.
    """
    sdef = sdef if sdef is not None else op.sdef
    if accuracy not in (2, 4, 6, 8):
        raise ValueError("accuracy must be 2, 4, 6 or 8")
    vals = np.asarray(psi.values, dtype=complex)
    if vals.ndim == 2:
        spinor = False
    elif vals.ndim == 3 and vals.shape[2] == 2:
        spinor = True
    else:
        raise ShapeMismatch(f"wavefunction must have 1 or 2 components, got shape {vals.shape}")
    if op.kind == "spin" and not spinor:
        raise ShapeMismatch("spin operators act on two-component wavefunctions")
    (u0, u1), (v0, v1) = sdef.bounds()
    hu = _spacing(psi.u, sdef.periodic_u, u1 - u0)
    hv = _spacing(psi.v, sdef.periodic_v, v1 - v0)

    max_order = max((max(m) for m in op.terms), default=0)
    widest = max((central_stencil(k, accuracy)[0][-1] for k in range(1, max_order + 1)), default=0)
    iu = slice(None) if sdef.periodic_u else slice(widest, psi.u.size - widest)
    iv = slice(None) if sdef.periodic_v else slice(widest, psi.v.size - widest)
    u_in, v_in = psi.u[iu], psi.v[iv]
    if u_in.size == 0 or v_in.size == 0:
        raise ShapeMismatch("grid too small for the stencil")

    uu, vv = np.meshgrid(u_in, v_in, indexing="ij")
    ctx = FieldContext.on_points(sdef, uu.ravel(), vv.ravel())
    shape = uu.shape
    out = None
    for (m, n), cf in op.terms.items():
        d = _diff_axis(vals, 0, m, hu, sdef.periodic_u, accuracy)
        d = _diff_axis(d, 1, n, hv, sdef.periodic_v, accuracy)[iu, iv]
        coef = ctx.value(cf.field).reshape(shape + ctx.value(cf.field).shape[1:])
        if op.kind == "scalar":
            term = coef[..., None] * d if spinor else coef * d
        elif op.kind == "vector3":
            term = coef[..., None] * d[:, :, None, :] if spinor else coef * d[..., None]
        else:
            term = np.einsum("uvab,uvb->uva", coef, d)
        out = term if out is None else out + term
    if out is None:
        out = np.zeros(shape + vals.shape[2:], dtype=complex)
    return GridField(u_in, v_in, out, name="op_psi", meta={"accuracy": accuracy})
