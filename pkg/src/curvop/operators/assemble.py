"""Assembly of the effective surface operators as normal-ordered DiffOps.

Units are explicit: ``hbar``, ``mass``, ``alpha_R`` and ``beta_D`` are plain
reals (defaults hbar = 1, mass = 1/2, so the Hamiltonian is ``-Laplacian - (M^2 - K)``).
Index 0, 1 are the chart directions u, v and 2 is the normal direction.
"""
import numpy as np

from ..errors import NonOrthogonalChart
from . import fields as F
from .diffop import Add, Coef, D, normal_order, probe_context

ORTHO_TOL = 1e-12


def _bind(sdef, overrides):
    return sdef.with_params(overrides) if overrides else sdef


def _sum(parts):
    parts = [p for p in parts if p is not None]
    return parts[0] if len(parts) == 1 else Add(tuple(parts))


def _finish(expr, sdef, kind, meta, ctx=None):
    op = normal_order(expr, sdef, kind=kind, ctx=ctx)
    op.meta.update(meta)
    return op


def hamiltonian_expr(hbar=1.0, mass=0.5, include_vg=True):
    pref = -hbar * hbar / (2.0 * mass)
    parts = []
    for a in range(2):
        for b in range(2):
            parts.append(
                Coef(F.INV_SQRT_G, "surface Laplacian") @ D(a)
                @ Coef(F.fmul(F.SQRT_G, F.ginv(a, b))) @ D(b)
            )
    expr = _sum(parts) * pref
    if include_vg:
        vg = F.fmul(F.Const(pref), F.fadd(F.fmul(F.MEAN, F.MEAN), -F.GAUSS))
        expr = expr + Coef(vg, "geometric potential")
    return expr


def assemble_hamiltonian(sdef, hbar=1.0, mass=0.5, overrides=None, include_vg=True):
    """``-hbar^2/2m (1/sqrt g) d_a (sqrt g g^ab d_b) + V_g``."""
    if not mass > 0:
        raise ValueError("mass must be positive")
    sdef = _bind(sdef, overrides)
    return _finish(hamiltonian_expr(hbar, mass, include_vg), sdef, "scalar",
                   {"hbar": hbar, "mass": mass})


def check_orthogonal(sdef, ctx=None):
    ctx = ctx or probe_context(sdef)
    g = ctx.geo.g
    g12 = np.abs(g[0][1].value)
    ref = np.sqrt(np.abs(g[0][0].value * g[1][1].value))
    if np.any(g12 > ORTHO_TOL * ref):
        k = int(np.argmax(g12 / ref))
        raise NonOrthogonalChart(
            f"chart is not orthogonal: g12 = {g12[k]:.3e} at (u, v) = ({ctx.geo.u[k]:.6g}, {ctx.geo.v[k]:.6g})"
        )
    return ctx


def momentum_expr(hbar=1.0):
    ih = 1j * hbar
    parts = [Coef(F.fmul(F.tangent(a), F.inv_sqrt_gaa(a)), "surface momentum") @ D(a) for a in range(2)]
    return _sum(parts) * (-ih) + Coef(F.fmul(F.Const(ih), F.MEAN, F.NORMAL), "geometric momentum")


def assemble_momentum(sdef, hbar=1.0, overrides=None):
    """``-i hbar e_a g_aa^-1/2 D_a + i hbar M en`` (orthogonal charts only)."""
    sdef = _bind(sdef, overrides)
    ctx = check_orthogonal(sdef)
    return _finish(momentum_expr(hbar), sdef, "vector3", {"hbar": hbar}, ctx)


def oam_expr(hbar=1.0):
    ih = 1j * hbar
    parts = [Coef(F.fmul(F.r_cross_tangent(a), F.inv_sqrt_gaa(a)), "surface OAM") @ D(a) for a in range(2)]
    return _sum(parts) * (-ih) + Coef(F.fmul(F.Const(ih), F.MEAN, F.R_CROSS_EN), "geometric OAM")


def assemble_oam(sdef, hbar=1.0, overrides=None):
    """``-i hbar (r x e_a) g_aa^-1/2 D_a + i hbar (r x en) M``."""
    sdef = _bind(sdef, overrides)
    ctx = check_orthogonal(sdef)
    return _finish(oam_expr(hbar), sdef, "vector3", {"hbar": hbar}, ctx)


def rashba_expr(alpha_R=1.0, hbar=1.0):
    k = alpha_R / hbar  # Cartesian tensor magnitude
    ih = 1j * hbar
    surface = []
    for b in range(2):
        coef = F.fadd(*(F.fmul(F.rashba(i, a), F.sigma(i), F.ginv(a, b)) for i in range(3) for a in range(2)))
        surface.append(Coef(F.fmul(F.Const(-ih * k), coef), "surface Rashba") @ D(b))
    geo = F.fadd(*(F.fmul(F.rashba(i, 2), F.sigma(i)) for i in range(3)))
    return _sum(surface + [Coef(F.fmul(F.Const(ih * k), geo, F.MEAN), "geometric Rashba")])


def assemble_rashba(sdef, alpha_R=1.0, hbar=1.0, overrides=None):
    """``-i hbar S_ia sigma^i g^ab D_b + i hbar S_i3 sigma^i M``."""
    sdef = _bind(sdef, overrides)
    return _finish(rashba_expr(alpha_R, hbar), sdef, "spin", {"hbar": hbar, "alpha_R": alpha_R})


DRESSELHAUS_PARTS = ("surface", "g1", "mcoupled", "gradient")


def dresselhaus_exprs(beta_D=1.0, hbar=1.0):
    """The four pieces of the effective Dresselhaus operator as expressions.

    ``surface``: ``S_aabb sigma^a g^ac D_c g^bd D_d g^be D_e``;
    ``g1``: the ``d3 G^ab`` terms; ``mcoupled``: ``-S_33aa sigma^3 g^ab D_b g^ac D_c M``;
    ``gradient``: ``S_aa33 sigma^a g^ab D_b (3 M^2 - K)``.
    All carry the prefactor ``i hbar^3 beta / hbar^3 = i beta``.
    """
    pref = 1j * hbar ** 3 * (beta_D / hbar ** 3)
    out = {}
    parts = []
    for a in range(2):
        for b in range(2):
            if a == b:
                continue
            lead = F.fmul(F.Const(pref), F.dresselhaus(a, b), F.sigma(a))
            for c in range(2):
                for d in range(2):
                    for e in range(2):
                        parts.append(
                            Coef(F.fmul(lead, F.ginv(a, c)), "surface Dresselhaus") @ D(c)
                            @ Coef(F.ginv(b, d)) @ D(d) @ Coef(F.ginv(b, e)) @ D(e)
                        )
    out["surface"] = _sum(parts)

    parts = []
    for a in range(2):
        lead = F.fmul(F.Const(pref), F.dresselhaus(2, a), F.sigma(2))
        for b in range(2):
            for c in range(2):
                parts.append(Coef(F.fmul(lead, F.g1(a, b)), "g1 Dresselhaus") @ D(b) @ Coef(F.ginv(a, c)) @ D(c))
                parts.append(Coef(F.fmul(F.Const(-1.0), lead, F.ginv(a, b)), "g1 Dresselhaus")
                             @ D(b) @ Coef(F.g1(a, c)) @ D(c))
    out["g1"] = _sum(parts)

    parts = []
    for a in range(2):
        lead = F.fmul(F.Const(-pref), F.dresselhaus(2, a), F.sigma(2))
        for b in range(2):
            for c in range(2):
                parts.append(Coef(F.fmul(lead, F.ginv(a, b)), "M-coupled Dresselhaus") @ D(b)
                             @ Coef(F.ginv(a, c)) @ D(c) @ Coef(F.MEAN))
    out["mcoupled"] = _sum(parts)

    parts = []
    for a in range(2):
        lead = F.fmul(F.Const(pref), F.dresselhaus(a, 2), F.sigma(a))
        for b in range(2):
            parts.append(Coef(F.fmul(lead, F.ginv(a, b)), "curvature-gradient Dresselhaus") @ D(b)
                         @ Coef(F.CURV_GRAD))
    out["gradient"] = _sum(parts)
    return out


def assemble_dresselhaus_parts(sdef, beta_D=1.0, hbar=1.0, overrides=None):
    """Each Dresselhaus piece normal-ordered on its own (see :func:`dresselhaus_exprs`)."""
    sdef = _bind(sdef, overrides)
    ctx = probe_context(sdef)
    meta = {"hbar": hbar, "beta_D": beta_D}
    return {k: _finish(e, sdef, "spin", dict(meta, part=k), ctx) for k, e in dresselhaus_exprs(beta_D, hbar).items()}


def assemble_dresselhaus(sdef, beta_D=1.0, hbar=1.0, overrides=None):
    """Surface plus geometric cubic Dresselhaus operator."""
    sdef = _bind(sdef, overrides)
    expr = Add(tuple(dresselhaus_exprs(beta_D, hbar).values()))
    return _finish(expr, sdef, "spin", {"hbar": hbar, "beta_D": beta_D})


ASSEMBLERS = {
    "H": assemble_hamiltonian,
    "P": assemble_momentum,
    "L": assemble_oam,
    "Rashba": assemble_rashba,
    "Dresselhaus": assemble_dresselhaus,
}
