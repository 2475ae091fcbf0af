import math

import numpy as np
import pytest

from curvop.dsl import builtin_catalog, parse_surface
from curvop.errors import DegreeOverflow, JetOrderError, NonOrthogonalChart, ShapeMismatch
from curvop.gridfield import GridField
from curvop.geometry import grid_axes
from curvop.operators import (apply_to_wavefunction, assemble_dresselhaus, assemble_dresselhaus_parts,
                              assemble_hamiltonian, assemble_momentum, assemble_oam, assemble_rashba,
                              eval_on_grid, normal_order, operator_document)
from curvop.operators import fields as F
from curvop.operators.diffop import D1, D2, Coef, deriv
from curvop.spin import SIGMA

SX, SY, SZ = SIGMA
PHI = math.pi / 6
W = 1.0 + math.cos(PHI)
PLANE = parse_surface("x = u; y = v; z = 0; domain u in [0, 4], v in [0, 4]")
SKEW = parse_surface("x = u + 0.3*v; y = v; z = 0; domain u in [0, 1], v in [0, 1]")


def at(op, u, v):
    return {m: val[0] for m, val in op.evaluate(np.array([float(u)]), np.array([float(v)])).items()}


# normal ordering -----------------------------------------------------------------

def test_product_rule():
    op = normal_order(D1 @ Coef(F.fmul(F.CHART_U, F.CHART_V)), PLANE)
    assert at(op, 2, 3) == pytest.approx({(1, 0): 6.0, (0, 0): 3.0})


def test_leibniz_second_order():
    u2 = F.fmul(F.position(0), F.position(0))
    op = normal_order(D1 @ D1 @ Coef(u2), PLANE)
    assert at(op, 1, 3) == pytest.approx({(2, 0): 1.0, (1, 0): 4.0, (0, 0): 2.0})


def test_mixed_leibniz():
    # D1 D2 (u^2 v) = u^2 v D1 D2 + 2uv D2 + u^2 D1 + 2u
    c = F.fmul(F.CHART_U, F.CHART_U, F.CHART_V)
    op = normal_order(D1 @ D2 @ Coef(c), PLANE)
    assert at(op, 2, 3) == pytest.approx({(1, 1): 12.0, (0, 1): 12.0, (1, 0): 4.0, (0, 0): 4.0})


def test_idempotent(cone):
    H = assemble_hamiltonian(cone)
    again = normal_order(H.to_expr(), cone)
    u, v = np.array([0.3, 1.1]), np.array([0.2, 1.7])
    a, b = H.evaluate(u, v), again.evaluate(u, v)
    assert list(a) == list(b)
    for m in a:
        np.testing.assert_allclose(a[m], b[m], atol=1e-14)


def test_scalar_multiples_and_sums():
    c = Coef(F.CHART_U)
    op = normal_order(2.0 * (c @ D1) - c @ D1 + Coef(F.Const(3.0)), PLANE)
    assert at(op, 0.5, 1.0) == pytest.approx({(1, 0): 0.5, (0, 0): 3.0})
    assert deriv(0, 0) == Coef(F.Const(1.0))


def test_degree_overflow():
    with pytest.raises(DegreeOverflow):
        normal_order(D1 @ D1 @ D2 @ D2)
    with pytest.raises(DegreeOverflow):
        normal_order(D1 @ Coef(F.MEAN) @ D2 @ D2 @ D1)


def test_mixed_kinds_rejected():
    with pytest.raises(ShapeMismatch):
        normal_order(Coef(F.NORMAL) @ D1 + Coef(F.sigma(0)))


def test_pruning_removes_cancelling_terms():
    # u D1 - u D1 cancels exactly; a tiny but genuine term survives
    c = Coef(F.CHART_U)
    op = normal_order(c @ D1 - c @ D1 + Coef(F.Const(1e-9)) @ D2, PLANE)
    assert list(op.terms) == [(0, 1)]
    raw = normal_order(c @ D1 - c @ D1, PLANE, prune=False)
    assert (1, 0) in raw.terms


def test_derivative_beyond_jet_order():
    # sigma leaves carry values only, so differentiating them must fail loudly
    op = normal_order(D1 @ Coef(F.sigma(0)), builtin_catalog("cone"), prune=False)
    with pytest.raises(JetOrderError):
        op.evaluate(np.array([0.1]), np.array([0.5]))


# Hamiltonian ----------------------------------------------------------------------

def test_cone_hamiltonian(cone):
    c = at(assemble_hamiltonian(cone, overrides={"R": 1, "phi": PHI}), 0.0, 1.0)
    assert list(c) == [(2, 0), (0, 2), (0, 1), (0, 0)]
    assert c[(2, 0)].real == pytest.approx(-0.2871871, abs=5e-8)
    assert c[(0, 2)].real == pytest.approx(-1.0, abs=1e-14)
    assert c[(0, 1)].real == pytest.approx(-0.4641016, abs=5e-8)
    assert c[(0, 0)].real == pytest.approx(-0.0179492, abs=5e-8)
    assert c[(0, 1)].real == pytest.approx(-math.cos(PHI) / W, abs=1e-14)


def test_plane_ring_has_no_potential():
    H = assemble_hamiltonian(builtin_catalog("plane_ring"))
    assert (0, 0) not in H.terms


def test_sphere_hamiltonian():
    s = builtin_catalog("sphere")
    H = assemble_hamiltonian(s)
    assert (0, 0) not in H.terms  # umbilic: V_g = 0 exactly on the probe grid
    v = 0.8
    c = at(H, 1.3, v)
    assert c[(2, 0)].real == pytest.approx(-1 / math.sin(v) ** 2, abs=1e-13)
    assert c[(0, 2)].real == pytest.approx(-1.0, abs=1e-14)
    assert c[(0, 1)].real == pytest.approx(-1 / math.tan(v), abs=1e-13)


def test_units(cone):
    a = at(assemble_hamiltonian(cone, hbar=1.0, mass=0.5), 0.4, 0.9)
    b = at(assemble_hamiltonian(cone, hbar=2.0, mass=1.0), 0.4, 0.9)
    for m in a:
        assert b[m] == pytest.approx(2.0 * a[m], rel=1e-14)
    no_vg = assemble_hamiltonian(cone, include_vg=False)
    assert (0, 0) not in no_vg.terms
    with pytest.raises(ValueError):
        assemble_hamiltonian(cone, mass=-1.0)


def test_non_orthogonal_hamiltonian_keeps_mixed_term():
    c = at(assemble_hamiltonian(SKEW), 0.5, 0.5)
    # g = [[1, .3], [.3, 1.09]] so g^-1 = [[1.09, -.3], [-.3, 1]]
    assert c == pytest.approx({(2, 0): -1.09, (1, 1): 0.6, (0, 2): -1.0})


# momentum and OAM -----------------------------------------------------------------

def test_cone_momentum(cone):
    c = at(assemble_momentum(cone, overrides={"R": 1, "phi": PHI}), 0.0, 1.0)
    np.testing.assert_allclose(c[(0, 0)], 1j * 0.1339746 * np.array([0.5, 0.0, -0.8660254]), atol=1e-7)
    np.testing.assert_allclose(c[(1, 0)], -1j * np.array([0.0, 1.0, 0.0]) / W, atol=1e-14)


def test_cylinder_momentum(cylinder):
    P = assemble_momentum(cylinder)
    for r in (0.2, 1.5):
        en = np.array([1.0, 0.0, 0.0])  # outward at theta = 0 with this orientation
        np.testing.assert_allclose(at(P, 0.0, r)[(0, 0)], 0.5j * en, atol=1e-14)


def test_plane_has_no_geometric_momentum():
    P = assemble_momentum(builtin_catalog("plane_ring"))
    L = assemble_oam(builtin_catalog("plane_ring"))
    assert (0, 0) not in P.terms and (0, 0) not in L.terms


def test_cone_oam(cone):
    c = at(assemble_oam(cone, overrides={"R": 1, "phi": PHI}), 0.0, 1.0)
    np.testing.assert_allclose(c[(0, 0)], 0.25j * np.array([0.0, 1.0, 0.0]), atol=1e-14)
    c = at(assemble_oam(builtin_catalog("cylinder")), 0.0, 1.0)
    np.testing.assert_allclose(c[(0, 0)], 0.5j * np.array([0.0, 1.0, 0.0]), atol=1e-14)


def test_non_orthogonal_chart_rejected():
    with pytest.raises(NonOrthogonalChart):
        assemble_momentum(SKEW)
    with pytest.raises(NonOrthogonalChart):
        assemble_oam(SKEW)


# spin-orbit -----------------------------------------------------------------------

def test_cylinder_rashba(cylinder):
    c = at(assemble_rashba(cylinder), 0.0, 0.6)
    np.testing.assert_allclose(c[(1, 0)], -1j * (SX - SZ), atol=1e-14)
    np.testing.assert_allclose(c[(0, 1)], 1j * (SX - SY), atol=1e-14)
    np.testing.assert_allclose(c[(0, 0)], 0.5j * (-SY + SZ), atol=1e-14)


def test_zero_couplings_give_zero_operators(cylinder):
    assert assemble_rashba(cylinder, alpha_R=0.0).terms == {}
    assert assemble_dresselhaus(cylinder, beta_D=0.0).terms == {}


def test_cylinder_dresselhaus(cylinder):
    c = at(assemble_dresselhaus(cylinder), 0.0, 0.6)
    np.testing.assert_allclose(c[(1, 2)], 1j * SY, atol=1e-13)
    np.testing.assert_allclose(c[(2, 1)], -1j * SZ, atol=1e-13)
    np.testing.assert_allclose(c[(0, 1)], 0.75j * SZ, atol=1e-13)
    assert max(sum(m) for m in c) == 3


def test_cone_dresselhaus_vanishes_at_quarter_pi(cone):
    D = assemble_dresselhaus(cone, overrides={"phi": math.pi / 4})
    th, r = np.meshgrid(np.linspace(0, 6, 7), np.linspace(0, 2, 5), indexing="ij")
    for val in D.evaluate(th.ravel(), r.ravel()).values():
        assert np.max(np.abs(val)) <= 1e-12


def test_dresselhaus_vanishes_where_cos2theta_does(cone):
    D = assemble_dresselhaus(cone, overrides={"phi": 0.3})
    for val in D.evaluate(np.full(4, math.pi / 4), np.linspace(0, 2, 4)).values():
        assert np.max(np.abs(val)) <= 1e-12


def test_dresselhaus_parts_sum(cone):
    parts = assemble_dresselhaus_parts(cone, overrides={"phi": 0.6})
    full = assemble_dresselhaus(cone, overrides={"phi": 0.6})
    u, v = np.array([0.3, 2.0]), np.array([0.5, 1.5])
    total = {}
    for op in parts.values():
        for m, val in op.evaluate(u, v).items():
            total[m] = total.get(m, 0) + val
    got = full.evaluate(u, v)
    for m in set(total) | set(got):
        np.testing.assert_allclose(total.get(m, 0), got.get(m, 0), atol=1e-13)


@pytest.mark.parametrize("build,key", [(assemble_rashba, "alpha_R"), (assemble_dresselhaus, "beta_D")])
def test_linearity_in_couplings(cone, build, key):
    u, v = np.array([0.1, 2.5, 4.0]), np.array([0.2, 1.0, 1.9])
    a = build(cone, **{key: 1.0}).evaluate(u, v)
    b = build(cone, **{key: 2.0}).evaluate(u, v)
    assert list(a) == list(b)
    for m in a:
        assert np.array_equal(b[m], 2.0 * a[m])


# grid export ------------------------------------------------------------------------

def test_eval_on_grid_plane():
    H = assemble_hamiltonian(builtin_catalog("plane_ring"))
    grid = eval_on_grid(H, nu=3, nv=3)
    assert list(grid) == [(2, 0), (0, 2), (0, 1)]
    assert all(isinstance(g, GridField) and g.shape == (3, 3) for g in grid.values())


def test_momentum_grid_magnitude(cone):
    g = eval_on_grid(assemble_momentum(cone), nu=4, nv=6)[(0, 0)]
    mag = np.linalg.norm(g.values, axis=-1)
    w = 1 + g.v * math.cos(PHI)
    np.testing.assert_allclose(mag, np.broadcast_to(math.sin(PHI) / (2 * w), mag.shape), atol=1e-14)
    assert np.all(np.diff(mag[0]) < 0)


def test_spin_channels(cylinder):
    g = eval_on_grid(assemble_rashba(cylinder), nu=2, nv=2)[(0, 0)]
    assert g.channels == ["re00", "im00", "re01", "im01", "re10", "im10", "re11", "im11"]
    assert g.to_csv().splitlines()[0] == "u,v," + ",".join(g.channels)


def test_operator_document(cylinder):
    doc = operator_document(assemble_hamiltonian(cylinder), "H", grid=(2, 3))
    assert doc["operator"] == "H" and doc["value_kind"] == "scalar"
    assert [(t["dmu"], t["dnu"]) for t in doc["terms"]] == [(2, 0), (0, 2), (0, 0)]
    assert doc["terms"][0]["field"]["shape"] == [2, 3]
    assert doc["terms"][-1]["provenance"] == "geometric potential"


# finite-difference application --------------------------------------------------------

def _grid(sdef, nu, nv):
    u, v = grid_axes(sdef, nu, nv)
    return u, v, *np.meshgrid(u, v, indexing="ij")


def test_identity_operator(cylinder):
    op = normal_order(Coef(F.Const(1.0)), cylinder)
    u, v, U, V = _grid(cylinder, 32, 32)
    psi = np.exp(1j * U) * np.sin(V)
    out = apply_to_wavefunction(op, GridField(u, v, psi))
    np.testing.assert_array_equal(out.values, psi)


@pytest.mark.parametrize("accuracy,tol", [(4, 4e-6), (6, 1e-6), (8, 1e-8)])
def test_fourier_mode(cylinder, accuracy, tol):
    op = normal_order(D1, cylinder)
    u, v, U, V = _grid(cylinder, 64, 20)
    psi = np.exp(1j * U)
    out = apply_to_wavefunction(op, GridField(u, v, psi), accuracy=accuracy)
    assert out.shape[0] == 64  # periodic axis keeps every point
    assert np.max(np.abs(out.values - 1j * np.exp(1j * out.u)[:, None])) <= tol


def test_cylinder_eigenrelation():
    L = math.pi
    s = builtin_catalog("cylinder").with_params(l=L)
    H = assemble_hamiltonian(s)
    u, v, U, V = _grid(s, 64, 200)
    psi = np.exp(1j * U) * np.sin(math.pi * V / L)
    out = apply_to_wavefunction(H, GridField(u, v, psi))
    lam = 1 + (math.pi / L) ** 2 - 0.25
    expected = lam * np.exp(1j * out.u)[:, None] * np.sin(math.pi * out.v / L)[None, :]
    assert np.max(np.abs(out.values - expected)) <= 1e-4


def test_spin_operator_on_spinor(cylinder):
    R = assemble_rashba(cylinder)
    u, v, U, V = _grid(cylinder, 32, 32)
    chi = np.array([1.0, 2.0j])
    psi = np.broadcast_to(chi, U.shape + (2,)).copy()
    out = apply_to_wavefunction(R, GridField(u, v, psi))
    assert out.kind == "spinor"
    c00 = R.evaluate(np.array([out.u[3]]), np.array([out.v[2]]))[(0, 0)][0]
    np.testing.assert_allclose(out.values[3, 2], c00 @ chi, atol=1e-12)


def test_vector_operator_on_scalar(cylinder):
    P = assemble_momentum(cylinder)
    u, v, U, V = _grid(cylinder, 32, 32)
    out = apply_to_wavefunction(P, GridField(u, v, np.ones(U.shape, dtype=complex)))
    assert out.kind == "vector3" and out.values.shape[-1] == 3


@pytest.mark.parametrize("case", ["spin_on_scalar", "too_small", "non_uniform", "bad_period", "components"])
def test_wavefunction_shape_errors(cylinder, case):
    op = assemble_rashba(cylinder) if case == "spin_on_scalar" else assemble_hamiltonian(cylinder)
    u, v, U, V = _grid(cylinder, 20, 20)
    psi = np.exp(1j * U)
    if case == "too_small":
        u, v, U, V = _grid(cylinder, 8, 20)
        psi = np.exp(1j * U)
    elif case == "non_uniform":
        v = v ** 1.5 / v[-1] ** 0.5
    elif case == "bad_period":
        u = np.linspace(0, 2 * math.pi, 20)
    elif case == "components":
        psi = np.zeros(U.shape + (3,), dtype=complex)
    with pytest.raises(ShapeMismatch):
        apply_to_wavefunction(op, GridField(u, v, psi))


def _inner(a, b, w):
    return np.sum(np.conj(a) * b * w)


def test_hermiticity_on_torus():
    s = builtin_catalog("torus")
    u, v, U, V = _grid(s, 48, 48)
    from curvop.geometry import Geometry
    w = Geometry(s, U, V).sqrt_g.value.reshape(U.shape)
    f = np.exp(1j * U) * np.cos(V) + 0.3 * np.sin(2 * V)
    g = np.exp(-2j * U) + np.sin(U + V)
    for op in (assemble_hamiltonian(s), assemble_momentum(s)):
        Af = apply_to_wavefunction(op, GridField(u, v, f)).values
        Ag = apply_to_wavefunction(op, GridField(u, v, g)).values
        Af, Ag = Af.reshape(U.shape + (-1,)), Ag.reshape(U.shape + (-1,))
        for k in range(Af.shape[-1]):
            lhs, rhs = _inner(g, Af[..., k], w), _inner(Ag[..., k], f, w)
            bound = math.sqrt(abs(_inner(g, g, w)) * abs(_inner(Af[..., k], Af[..., k], w)))
            assert abs(lhs - rhs) <= 1e-6 * bound
