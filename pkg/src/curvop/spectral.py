"""Radial eigenvalue problems for surfaces of revolution.

The chart is ``(u, v)`` with ``u`` the periodic angle.  For ``psi = e^{i m u} chi(v)``
the Hamiltonian reduces to

    -k/c^2 (1/w) (w chi')' + (k m^2 / w^2 + V_g) chi,   k = hbar^2 / 2m,

with ``w^2 = g_uu`` and ``c^2 = g_vv`` (constant).  Writing ``chi = w^{-1/2} phi``
removes the first-derivative term and leaves a symmetric Schrodinger problem
with the extra potential ``k/c^2 (w''/(2w) - (w'/w)^2/4)``.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from . import jets
from .errors import ConvergenceFailure, NotAxisymmetric, UnsupportedChart
from .geometry import Geometry

MIN_NODES = 16
SYM_TOL = 1e-10


@dataclass
class RadialProblem:
    """Dirichlet problem on the interior nodes of a uniform grid over ``[v0, v1]``."""

    m_angular: int
    nodes: int
    r: np.ndarray  # interior nodes
    h: float
    kinetic: float  # k / c^2
    potential: np.ndarray  # full symmetric-form potential per node
    w: np.ndarray
    dlogw: np.ndarray  # w'/w, for the direct discretization
    base: np.ndarray  # centrifugal term plus V_g, before the substitution
    include_Vg: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.nodes < MIN_NODES:
            raise ValueError(f"need at least {MIN_NODES} nodes, got {self.nodes}")
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")

    def tridiagonal(self):
        """Diagonal and off-diagonal of the symmetric matrix."""
        t = self.kinetic / self.h ** 2
        diag = 2.0 * t + self.potential
        off = np.full(self.nodes - 1, -t)
        return diag, off

    def direct_matrix(self):
        """Dense non-symmetric discretization of the unsubstituted radial operator."""
        t = self.kinetic / self.h ** 2
        b = self.kinetic * self.dlogw / (2.0 * self.h)
        n = self.nodes
        A = np.diag(2.0 * t + self.base)
        idx = np.arange(n - 1)
        A[idx, idx + 1] = -t - b[:-1]
        A[idx + 1, idx] = -t + b[1:]
        return A


def _probe_axisymmetric(sdef, v, nu=8):
    u0, u1 = sdef.bounds()[0]
    u = u0 + (u1 - u0) * np.arange(nu) / nu
    U, V = np.meshgrid(u, v, indexing="ij")
    geo = Geometry(sdef, U, V)
    g = [[geo.g[a][b].value.reshape(U.shape) for b in range(2)] for a in range(2)]
    for name, q in (("g_uu", g[0][0]), ("g_uv", g[0][1]), ("g_vv", g[1][1]),
                    ("M", geo.M.value.reshape(U.shape)), ("K", geo.K.value.reshape(U.shape))):
        spread = np.max(np.abs(q - q[:1]))
        if spread > SYM_TOL * max(1.0, np.max(np.abs(q))):
            raise NotAxisymmetric(f"{name} depends on u (spread {spread:.3e}); no e^(imu) separation")
    scale = np.sqrt(np.abs(g[0][0] * g[1][1]))
    if np.any(np.abs(g[0][1]) > SYM_TOL * scale):
        raise UnsupportedChart("radial reduction needs g_uv = 0")
    gvv = g[1][1][0]
    if np.max(np.abs(gvv - gvv[0])) > SYM_TOL * abs(gvv[0]):
        raise UnsupportedChart("radial reduction needs a constant g_vv (arc-length profile coordinate)")
    return float(gvv[0])


def radial_reduce(sdef, m_angular=0, include_Vg=True, nodes=2000, hbar=1.0, mass=0.5, overrides=None):
    """Build the symmetric radial problem for angular index ``m_angular``."""
    if overrides:
        sdef = sdef.with_params(overrides)
    if not sdef.periodic_u:
        raise NotAxisymmetric("the u axis must be a periodic angle")
    if sdef.periodic_v:
        raise UnsupportedChart("radial reduction needs an open profile interval with hard walls, v is periodic")
    if int(m_angular) != m_angular:
        raise ValueError("m_angular must be an integer")
    if nodes < MIN_NODES:
        raise ValueError(f"need at least {MIN_NODES} nodes, got {nodes}")
    v0, v1 = sdef.bounds()[1]
    h = (v1 - v0) / (nodes + 1)
    r = v0 + h * np.arange(1, nodes + 1)
    c2 = _probe_axisymmetric(sdef, np.linspace(v0, v1, 9))

    geo = Geometry(sdef, np.zeros_like(r), r)
    w = jets.sqrt(geo.g[0][0])
    wv, dw, d2w = w.value, w.partial((0, 1, 0)), w.partial((0, 2, 0))
    k = hbar * hbar / (2.0 * mass)
    kin = k / c2
    dlogw = dw / wv
    centrifugal = k * m_angular ** 2 / wv ** 2
    vg = geo.V_g(hbar, mass).value if include_Vg else np.zeros_like(r)
    base = centrifugal + vg
    prob = RadialProblem(
        m_angular=int(m_angular), nodes=nodes, r=r, h=h, kinetic=kin,
        potential=base + kin * (0.5 * d2w / wv - 0.25 * dlogw ** 2),
        w=wv, dlogw=dlogw, base=base, include_Vg=include_Vg,
        meta={"hbar": hbar, "mass": mass, "g_vv": c2},
    )
    return prob


def eigenpairs(prob, k):
    """Lowest ``k`` eigenvalues and eigenvectors ``chi`` (columns, w-weighted orthonormal)."""
    if not 0 < k < prob.nodes:
        raise ValueError(f"need 0 < k < nodes, got k={k}")
    diag, off = prob.tridiagonal()
    try:
        vals, phi = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))
    except LinAlgError as exc:
        raise ConvergenceFailure(f"tridiagonal eigensolver failed: {exc}") from exc
    chi = phi / np.sqrt(prob.w)[:, None] / np.sqrt(prob.h)
    # fix the sign so output is reproducible
    chi *= np.sign(chi[np.argmax(np.abs(chi), axis=0), np.arange(k)])
    return vals, chi


def solve_spectrum(prob, k):
    """The ``k`` lowest eigenvalues in ascending order."""
    return eigenpairs(prob, k)[0]


def direct_spectrum(prob, k):
    """Lowest ``k`` eigenvalues of the non-symmetric direct discretization (a cross-check)."""
    vals = np.linalg.eigvals(prob.direct_matrix())
    if np.max(np.abs(vals.imag)) > 1e-8 * np.max(np.abs(vals.real)):
        raise ConvergenceFailure("direct discretization produced complex eigenvalues")
    return np.sort(vals.real)[:k]


def spectrum_table(sdef, modes=(0,), levels=3, nodes=2000, hbar=1.0, mass=0.5, overrides=None):
    """Rows ``(m, n, without_Vg, with_Vg, shift)`` for each mode and level."""
    rows = []
    for m in modes:
        bare = solve_spectrum(radial_reduce(sdef, m, False, nodes, hbar, mass, overrides), levels)
        full = solve_spectrum(radial_reduce(sdef, m, True, nodes, hbar, mass, overrides), levels)
        for n in range(levels):
            rows.append((int(m), n, float(bare[n]), float(full[n]), float(full[n] - bare[n])))
    return rows
