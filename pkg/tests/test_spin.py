import math

import numpy as np
import pytest

from curvop import cone_oracle as oracle
from curvop.dsl import builtin_catalog
from curvop.errors import SingularJacobian
from curvop.geometry import Geometry
from curvop.spin import (IDENTITY, SIGMA, dresselhaus_from_jacobian, dresselhaus_tensor_ccs, pauli_ccs,
                         rashba_from_jacobian, rashba_tensor_ccs, reduced_tensors, sigma_from_jacobian)

SX, SY, SZ = SIGMA
PHIS = (0.0, math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2)


def test_cartesian_pauli():
    for s in SIGMA:
        np.testing.assert_allclose(s, s.conj().T, atol=1e-15)
        assert abs(np.trace(s)) < 1e-15
        np.testing.assert_allclose(s @ s, IDENTITY, atol=1e-15)
    np.testing.assert_allclose(SX @ SY, 1j * SZ, atol=1e-15)


def test_cylinder_pauli(cone):
    sig = pauli_ccs(cone, 0.0, 0.5, {"phi": math.pi / 2})
    np.testing.assert_allclose(sig[0], SY, atol=1e-15)  # theta, w = R = 1
    np.testing.assert_allclose(sig[1], SZ, atol=1e-15)
    np.testing.assert_allclose(sig[2], SX, atol=1e-15)


def test_cone_pauli(cone):
    sig = pauli_ccs(cone, 0.0, 1.0, {"phi": math.pi / 6})
    np.testing.assert_allclose(sig[1], 0.8660254 * SX + 0.5 * SZ, atol=5e-8)
    np.testing.assert_allclose(sig[2], 0.5 * SX - 0.8660254 * SZ, atol=5e-8)


@pytest.mark.parametrize("name", ["cone", "sphere", "torus", "catenoid"])
def test_normal_pauli_squares_to_one(name, rng):
    from conftest import random_points
    s = builtin_catalog(name)
    u, v = random_points(s, 20, rng)
    sig = sigma_from_jacobian(Geometry(s, u, v).jacobian)
    for k in range(u.size):
        np.testing.assert_allclose(sig[k, 2] @ sig[k, 2], IDENTITY, atol=1e-12)
        for i in range(3):
            assert abs(np.trace(sig[k, i])) < 1e-12


def test_cylinder_rashba_tensor(cone):
    S = rashba_tensor_ccs(cone, 0.0, 0.7, 1.0, overrides={"phi": math.pi / 2})
    assert S[0, 1] == pytest.approx(1.0, abs=1e-14)
    assert S[1, 2] == pytest.approx(1.0, abs=1e-14)
    assert S[2, 0] == pytest.approx(1.0, abs=1e-14)


def test_planar_ring_rashba(cone):
    r = 0.8
    S = rashba_tensor_ccs(cone, math.pi / 4, r, 1.0, overrides={"phi": 0.0})
    assert S[0, 1] == pytest.approx(-(1.0 + r), abs=1e-14)


def test_dresselhaus_values(cone):
    S = dresselhaus_tensor_ccs(cone, 0.0, 1.0, 1.0, overrides={"phi": 0.0})
    assert S[0, 1] == pytest.approx(-4.0, abs=1e-13)
    S = dresselhaus_tensor_ccs(cone, 0.3, 1.0, 1.0, overrides={"phi": math.pi / 4})
    np.testing.assert_allclose(S, 0.0, atol=1e-14)


def test_reduced_tensors_bundle(cone):
    t = reduced_tensors(cone, 0.2, 0.4, alpha_R=2.0, beta_D=3.0)
    np.testing.assert_allclose(t.rashba, rashba_tensor_ccs(cone, 0.2, 0.4, 2.0))
    np.testing.assert_allclose(t.dresselhaus, dresselhaus_tensor_ccs(cone, 0.2, 0.4, 3.0))
    np.testing.assert_allclose(t.sigma, pauli_ccs(cone, 0.2, 0.4))


def test_antisymmetry(cone, rng):
    th = rng.uniform(0, 2 * math.pi, 50)
    r = rng.uniform(0, 2, 50)
    J = Geometry(cone, th, r).jacobian
    for S in (rashba_from_jacobian(J, 1.3), dresselhaus_from_jacobian(J, 0.7)):
        np.testing.assert_allclose(S, -np.swapaxes(S, 1, 2), atol=1e-13)


def test_linear_in_couplings(cone, rng):
    J = Geometry(cone, rng.uniform(0, 6, 10), rng.uniform(0, 2, 10)).jacobian
    assert np.array_equal(rashba_from_jacobian(J, 2.0), 2.0 * rashba_from_jacobian(J, 1.0))
    assert np.array_equal(dresselhaus_from_jacobian(J, 2.0), 2.0 * dresselhaus_from_jacobian(J, 1.0))
    np.testing.assert_allclose(rashba_from_jacobian(J, 1.0, hbar=2.0), 0.5 * rashba_from_jacobian(J, 1.0))
    np.testing.assert_allclose(dresselhaus_from_jacobian(J, 1.0, hbar=2.0), dresselhaus_from_jacobian(J, 1.0) / 8)


@pytest.mark.parametrize("phi", PHIS)
def test_matches_closed_forms(cone, phi):
    p = oracle.ConeParams(1.0, phi, 2.0)
    th, r = np.meshgrid(np.linspace(0, 2 * math.pi, 20, endpoint=False), np.linspace(0, 2, 20), indexing="ij")
    th, r = th.ravel(), r.ravel()
    J = Geometry(cone.with_params(phi=phi), th, r).jacobian
    np.testing.assert_allclose(sigma_from_jacobian(J), oracle.quantity(p, "sigma", th, r), atol=1e-10)
    np.testing.assert_allclose(rashba_from_jacobian(J, 1.0), oracle.quantity(p, "rashba", th, r), atol=1e-10)
    np.testing.assert_allclose(dresselhaus_from_jacobian(J, 1.0), oracle.quantity(p, "dresselhaus", th, r),
                               atol=1e-10)


def test_dresselhaus_flips_across_quarter_pi(cone, rng):
    th = rng.uniform(0, 2 * math.pi, 30)
    r = rng.uniform(0, 2, 30)
    lo = dresselhaus_from_jacobian(Geometry(cone.with_params(phi=math.pi / 4 - 0.2), th, r).jacobian, 1.0)
    hi = dresselhaus_from_jacobian(Geometry(cone.with_params(phi=math.pi / 4 + 0.2), th, r).jacobian, 1.0)
    mask = np.abs(lo) > 1e-9
    assert np.all(np.sign(lo[mask]) == -np.sign(hi[mask]))


def test_dresselhaus_cos2phi_scaling(cone):
    # equal w at phi and pi/2 - phi: choose r so that R + r cos(phi) matches
    phi1, phi2 = 0.3, math.pi / 2 - 0.3
    r1 = 1.0
    w = 1.0 + r1 * math.cos(phi1)
    r2 = (w - 1.0) / math.cos(phi2)
    th = np.array([0.4])
    a = dresselhaus_from_jacobian(Geometry(cone.with_params(phi=phi1, l=5), th, np.array([r1])).jacobian, 1.0)
    b = dresselhaus_from_jacobian(Geometry(cone.with_params(phi=phi2, l=5), th, np.array([r2])).jacobian, 1.0)
    np.testing.assert_allclose(a, -b, atol=1e-10)


def test_singular_jacobian():
    J = np.zeros((1, 3, 3))
    J[0, :, 0] = [1, 0, 0]
    J[0, :, 1] = [2, 0, 0]
    J[0, :, 2] = [0, 0, 1]
    with pytest.raises(SingularJacobian):
        sigma_from_jacobian(J)
